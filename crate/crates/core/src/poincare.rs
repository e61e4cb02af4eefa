//! Stroboscopic Poincaré sections at the drive period, period detection, and
//! attractor fingerprints for multistability comparison.
//!
//! Samples are taken at `theta = 0` exactly (the phase-exact stepper lands on
//! the section, no interpolation). Periodic orbits appear as finite point
//! sets, tori as closed curves.

use crate::error::SectionError;
use crate::integrator::{integrate_to_phase, IntegrationStatus, Rk45, StepControl};
use crate::model::{BubbleSystem, DimensionlessParams, State, STATE_DIM};
use crate::real::{lit, Real};

/// Default tolerance for matching section points in period detection.
pub const DEFAULT_POINT_TOL: f64 = 1e-6;
/// Largest period searched for; named periods in this system stay well
/// below it, the headroom covers resonances.
pub const DEFAULT_P_MAX: u32 = 64;
/// Default attractor-cloud distance for `distinct`.
pub const DEFAULT_DISTINCT_TOL: f64 = 1e-3;

/// Ordered section samples `(r1, u1, r2, u2)` at `theta = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionSeries<S> {
    pub points: Vec<[S; 4]>,
    /// Drive periods discarded before recording started.
    pub transient_skipped: u32,
    /// Identifier of the generating parameters.
    pub params_hash: u64,
}

impl<S: Real> SectionSeries<S> {
    /// The full state at the last recorded sample (phase is exactly zero on
    /// the section); the natural seed for continuing this trajectory.
    pub fn last_state(&self) -> Option<State<S>> {
        self.points
            .last()
            .map(|p| State::new(p[0], p[1], p[2], p[3], S::zero()))
    }

    /// Bubble-exchange image of the series.
    pub fn swapped(&self) -> Self {
        Self {
            points: self.points.iter().map(|p| [p[2], p[3], p[0], p[1]]).collect(),
            transient_skipped: self.transient_skipped,
            params_hash: self.params_hash,
        }
    }
}

/// Summary geometry of a section cloud.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fingerprint<S> {
    /// Smallest period `p` such that every sample matches the sample `p`
    /// steps earlier within the point tolerance; `None` for aperiodic series.
    pub detected_period: Option<u32>,
    /// Mean of the cloud.
    pub cloud_center: [S; 4],
    /// Largest max-norm distance of a sample from the center.
    pub cloud_radius: S,
    /// Max over samples of `max(|r1 - r2|, |u1 - u2|)`.
    pub sync_deviation: S,
}

/// Integrate `transient` periods unrecorded, then record `n` exact-phase
/// samples (one per drive period).
pub fn section<S: Real>(
    dp: &DimensionlessParams<S>,
    s0: &State<S>,
    ctl: &StepControl<S>,
    transient: u32,
    n: usize,
) -> Result<SectionSeries<S>, SectionError> {
    assert!(n >= 1);
    let sys = BubbleSystem::new(*dp);
    let mut rk = Rk45::new(STATE_DIM);
    let mut y = s0.to_array();
    let status_err = |status| match status {
        IntegrationStatus::Collapsed => Some(SectionError::Collapsed),
        IntegrationStatus::StepUnderflow => Some(SectionError::StepUnderflow),
        IntegrationStatus::StepLimit => Some(SectionError::StepLimit),
        IntegrationStatus::Completed => None,
    };

    let out = integrate_to_phase(&mut rk, &sys, &mut y, 4, dp.big_omega, transient as u64, ctl)?;
    if let Some(e) = status_err(out.status) {
        return Err(e);
    }
    let mut points = Vec::with_capacity(n);
    // The state right after the transient lies on the section (for transient
    // = 0 the caller's seed is only on the section if theta = 0; the first
    // sample is still defined as the first upcoming crossing).
    for i in 0..n {
        if i > 0 || y[4] != S::zero() || transient == 0 {
            let out = integrate_to_phase(&mut rk, &sys, &mut y, 4, dp.big_omega, 1, ctl)?;
            if let Some(e) = status_err(out.status) {
                return Err(e);
            }
        }
        points.push([y[0], y[1], y[2], y[3]]);
    }
    Ok(SectionSeries {
        points,
        transient_skipped: transient,
        params_hash: dp.params_hash(),
    })
}

/// Smallest `p in [1, p_max]` such that `|x[k+p] - x[k]|_inf < point_tol`
/// for every sampled `k`; `None` when no period qualifies. Requires at least
/// `2 * p_max` samples so every candidate is tested against real recurrences.
pub fn detect_period<S: Real>(
    series: &SectionSeries<S>,
    point_tol: S,
) -> Result<Option<u32>, SectionError> {
    detect_period_up_to(series, point_tol, DEFAULT_P_MAX)
}

/// `detect_period` with an explicit period cap.
pub fn detect_period_up_to<S: Real>(
    series: &SectionSeries<S>,
    point_tol: S,
    p_max: u32,
) -> Result<Option<u32>, SectionError> {
    let len = series.points.len();
    let need = 2 * p_max as usize;
    if len < need {
        return Err(SectionError::SeriesTooShort { len, need });
    }
    Ok(detect_period_unchecked(&series.points, point_tol, p_max))
}

fn detect_period_unchecked<S: Real>(points: &[[S; 4]], point_tol: S, p_max: u32) -> Option<u32> {
    let len = points.len();
    'candidate: for p in 1..=(p_max as usize).min(len.saturating_sub(1)) {
        for k in 0..len - p {
            if dist_inf(&points[k + p], &points[k]) >= point_tol {
                continue 'candidate;
            }
        }
        return Some(p as u32);
    }
    None
}

#[inline]
fn dist_inf<S: Real>(a: &[S; 4], b: &[S; 4]) -> S {
    let mut d = S::zero();
    for i in 0..4 {
        d = d.max((a[i] - b[i]).abs());
    }
    d
}

/// Compute the fingerprint of a non-empty series with the default point
/// tolerance; the period search is capped at `min(DEFAULT_P_MAX, len/2)` so
/// short series stay sound.
pub fn fingerprint<S: Real>(series: &SectionSeries<S>) -> Fingerprint<S> {
    fingerprint_with(series, lit(DEFAULT_POINT_TOL), DEFAULT_P_MAX)
}

pub fn fingerprint_with<S: Real>(
    series: &SectionSeries<S>,
    point_tol: S,
    p_max: u32,
) -> Fingerprint<S> {
    assert!(!series.points.is_empty());
    let n = series.points.len();
    let inv_n = S::one() / S::from_usize(n).unwrap();
    let mut center = [S::zero(); 4];
    for p in &series.points {
        for i in 0..4 {
            center[i] = center[i] + p[i];
        }
    }
    for c in &mut center {
        *c = *c * inv_n;
    }
    let mut radius = S::zero();
    let mut sync_dev = S::zero();
    for p in &series.points {
        radius = radius.max(dist_inf(p, &center));
        sync_dev = sync_dev
            .max((p[0] - p[2]).abs())
            .max((p[1] - p[3]).abs());
    }
    let cap = (p_max as usize).min(n / 2) as u32;
    let detected_period = if cap >= 1 {
        detect_period_unchecked(&series.points, point_tol, cap)
    } else {
        None
    };
    Fingerprint {
        detected_period,
        cloud_center: center,
        cloud_radius: radius,
        sync_deviation: sync_dev,
    }
}

/// Symmetric mean nearest-neighbor distance between two section clouds.
fn cloud_distance<S: Real>(a: &[[S; 4]], b: &[[S; 4]]) -> S {
    let half = lit::<S>(0.5);
    (mean_nn(a, b) + mean_nn(b, a)) * half
}

fn mean_nn<S: Real>(from: &[[S; 4]], to: &[[S; 4]]) -> S {
    let mut total = S::zero();
    for p in from {
        let mut best = S::infinity();
        for q in to {
            let d = dist_inf(p, q);
            if d < best {
                best = d;
            }
        }
        total = total + best;
    }
    total / S::from_usize(from.len()).unwrap()
}

/// True when two series at the same parameters describe substantially
/// different attractors: their clouds are farther than `tol` apart AND
/// neither is the bubble-exchange image of the other (swap-related pairs are
/// the trivial multistability and count as the same attractor).
pub fn distinct<S: Real>(
    a: &SectionSeries<S>,
    b: &SectionSeries<S>,
    tol: S,
) -> Result<bool, SectionError> {
    if a.params_hash != b.params_hash {
        return Err(SectionError::ParamsMismatch);
    }
    if cloud_distance(&a.points, &b.points) <= tol {
        return Ok(false);
    }
    let b_swapped = b.swapped();
    Ok(cloud_distance(&a.points, &b_swapped.points) > tol)
}
