//! Benettin-style Lyapunov spectra.
//!
//! The base trajectory and a set of tangent vectors are co-integrated as one
//! augmented system: the tangents obey the variational equations with the
//! finite-difference Jacobian evaluated at every stage state. Every renorm
//! interval the tangent frame is Gram–Schmidt orthonormalized and the log
//! column norms accumulate; exponents are accumulated log-stretch divided by
//! elapsed `tau` after the transient, so they are quoted per unit
//! nondimensional time.
//!
//! The drive phase is decoupled (`dtheta/dtau = Omega`, a constant), so the
//! phase row of the Jacobian vanishes identically and the subspace of tangent
//! vectors with zero phase component is exactly invariant. [`spectrum`] spans
//! all five directions and reports the trivial zero exponent explicitly;
//! [`two_largest`] seeds its two vectors inside the phase-free subspace and
//! therefore returns the two largest *nontrivial* exponents directly.

use crate::classify::DEFAULT_ZERO_EPS;
use crate::error::{LyapunovError, ModelError};
use crate::integrator::{
    integrate_to_phase, IntegrationStatus, OdeSystem, Rk45, StepControl,
};
use crate::model::{
    jacobian_raw, vector_field_raw, BubbleSystem, DimensionlessParams, State, DEFAULT_R_FLOOR,
    STATE_DIM,
};
use crate::real::{lit, Real};

/// Averaging schedule for a spectrum run. All values are drive periods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovSettings {
    /// Drive periods discarded before accumulation starts.
    pub transient_periods: u32,
    /// Drive periods accumulated into the exponents.
    pub average_periods: u32,
    /// Periods between Gram–Schmidt reorthonormalizations (fractions divide
    /// a period into equal chunks).
    pub renorm_interval: f64,
    /// Trailing fraction of the run used for the standard-error estimate.
    pub convergence_window: f64,
}

impl Default for LyapunovSettings {
    /// Scan-grade schedule: long averaging for publication-grade exponents.
    fn default() -> Self {
        Self {
            transient_periods: 2000,
            average_periods: 20000,
            renorm_interval: 1.0,
            convergence_window: 0.5,
        }
    }
}

impl LyapunovSettings {
    /// Throughput schedule for chart sweeps.
    pub fn chart_grade() -> Self {
        Self {
            transient_periods: 500,
            average_periods: 3000,
            ..Self::default()
        }
    }

    pub fn with_periods(transient: u32, average: u32) -> Self {
        Self {
            transient_periods: transient,
            average_periods: average,
            ..Self::default()
        }
    }
}

/// Full 5-exponent spectrum with convergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovResult<S> {
    /// All five exponents, sorted descending, per unit `tau`.
    pub exponents: [S; 5],
    /// Batch-mean standard error of each exponent.
    pub stderr: [S; 5],
    /// Index of the exponent identified as the phase-direction zero
    /// (the smallest in magnitude).
    pub trivial_index: usize,
    /// The four remaining exponents, descending: the `lambda_1 >= lambda_2
    /// >= ...` quoted for this system.
    pub nontrivial: [S; 4],
    /// Standard errors matching `nontrivial`.
    pub nontrivial_stderr: [S; 4],
    /// Base state at the end of the run (on the attractor); used by
    /// continuation sweeps.
    pub final_state: State<S>,
    /// Set when the top nontrivial exponents are still noisier than the
    /// zero band after the full averaging window.
    pub not_converged: bool,
}

impl<S: Real> LyapunovResult<S> {
    /// Sum of all five exponents; negative on every dissipative run.
    pub fn sum(&self) -> S {
        self.exponents.iter().copied().sum()
    }

    /// Number of exponents inside the zero band `max(3*stderr, zero_eps)`.
    pub fn zero_band_count(&self, zero_eps: S) -> usize {
        self.exponents
            .iter()
            .zip(self.stderr.iter())
            .filter(|(l, se)| l.abs() <= (lit::<S>(3.0) * **se).max(zero_eps))
            .count()
    }
}

/// The two largest nontrivial exponents, for chart sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLargest<S> {
    pub lambda1: S,
    pub lambda2: S,
    pub stderr1: S,
    pub stderr2: S,
    pub final_state: State<S>,
    pub not_converged: bool,
}

/// Base system plus `k` tangent vectors, flattened as
/// `[state; v_1; ...; v_k]`.
struct VariationalSystem<'a, S> {
    dp: &'a DimensionlessParams<S>,
    tangents: usize,
    r_floor: S,
}

impl<S: Real> OdeSystem<S> for VariationalSystem<'_, S> {
    fn dim(&self) -> usize {
        STATE_DIM * (1 + self.tangents)
    }

    fn eval(&self, y: &[S], dy: &mut [S]) -> Result<(), ModelError> {
        let (base, tangent_flat) = y.split_at(STATE_DIM);
        let (dbase, dtangent_flat) = dy.split_at_mut(STATE_DIM);
        vector_field_raw(self.dp, base, dbase)?;
        let mut jac = [[S::zero(); STATE_DIM]; STATE_DIM];
        jacobian_raw(self.dp, base, &mut jac)?;
        for v in 0..self.tangents {
            let src = &tangent_flat[v * STATE_DIM..(v + 1) * STATE_DIM];
            let dst = &mut dtangent_flat[v * STATE_DIM..(v + 1) * STATE_DIM];
            for i in 0..STATE_DIM {
                let mut acc = jac[i][0] * src[0];
                for j in 1..STATE_DIM {
                    acc = acc + jac[i][j] * src[j];
                }
                dst[i] = acc;
            }
        }
        Ok(())
    }

    fn collapsed(&self, y: &[S]) -> bool {
        y[0] <= self.r_floor || y[2] <= self.r_floor
    }
}

/// Modified Gram–Schmidt on the tangent block; returns the column norms
/// before normalization.
fn renormalize<S: Real>(tangent_flat: &mut [S], k: usize, norms: &mut [S]) -> Result<(), LyapunovError> {
    for v in 0..k {
        // Project out the already-orthonormalized columns.
        for prev in 0..v {
            let (before, rest) = tangent_flat.split_at_mut(v * STATE_DIM);
            let q = &before[prev * STATE_DIM..(prev + 1) * STATE_DIM];
            let col = &mut rest[..STATE_DIM];
            let mut dot = S::zero();
            for i in 0..STATE_DIM {
                dot = dot + q[i] * col[i];
            }
            for i in 0..STATE_DIM {
                col[i] = col[i] - dot * q[i];
            }
        }
        let col = &mut tangent_flat[v * STATE_DIM..(v + 1) * STATE_DIM];
        let mut norm_sq = S::zero();
        for x in col.iter() {
            norm_sq = norm_sq + *x * *x;
        }
        let norm = norm_sq.sqrt();
        if !(norm.is_finite() && norm > S::zero()) {
            return Err(LyapunovError::NonFinite);
        }
        for x in col.iter_mut() {
            *x = *x / norm;
        }
        norms[v] = norm;
    }
    Ok(())
}

fn map_status(status: IntegrationStatus, periods: u32) -> Result<(), LyapunovError> {
    match status {
        IntegrationStatus::Completed => Ok(()),
        IntegrationStatus::Collapsed => Err(LyapunovError::Collapsed { periods }),
        IntegrationStatus::StepUnderflow => Err(LyapunovError::StepUnderflow { periods }),
        IntegrationStatus::StepLimit => Err(LyapunovError::StepLimit { periods }),
    }
}

struct BenettinRun<S> {
    /// (exponent, stderr), sorted descending by exponent.
    ordered: Vec<(S, S)>,
    final_state: State<S>,
}

/// Core Benettin loop over `k` tangent vectors seeded on the first `k`
/// coordinate directions (the phase direction is index 4, so `k <= 4` keeps
/// the frame in the invariant phase-free subspace).
fn benettin<S: Real>(
    dp: &DimensionlessParams<S>,
    s0: &State<S>,
    ctl: &StepControl<S>,
    set: &LyapunovSettings,
    k: usize,
) -> Result<BenettinRun<S>, LyapunovError> {
    assert!((1..=STATE_DIM).contains(&k));
    ctl.validate()?;
    let r_floor = lit::<S>(DEFAULT_R_FLOOR);

    // Transient on the plain system.
    let base_sys = BubbleSystem::new(*dp);
    let mut rk = Rk45::new(STATE_DIM);
    let mut y_base = s0.to_array();
    let out = integrate_to_phase(
        &mut rk,
        &base_sys,
        &mut y_base,
        4,
        dp.big_omega,
        set.transient_periods as u64,
        ctl,
    )?;
    map_status(out.status, 0)?;

    // Augmented state: base + orthonormal tangent seeds.
    let sys = VariationalSystem {
        dp,
        tangents: k,
        r_floor,
    };
    let mut y = vec![S::zero(); sys.dim()];
    y[..STATE_DIM].copy_from_slice(&y_base);
    for v in 0..k {
        y[STATE_DIM + v * STATE_DIM + v] = S::one();
    }
    let mut rk_aug = Rk45::new(sys.dim());

    // Renorm schedule: `chunks` renorms per period, or one renorm every
    // `every` periods.
    let (chunks, every) = if set.renorm_interval < 1.0 {
        ((1.0 / set.renorm_interval).round().max(1.0) as u32, 1u32)
    } else {
        (1u32, set.renorm_interval.round().max(1.0) as u32)
    };
    let period = dp.drive_period();

    // Batch-mean standard error over the trailing convergence window.
    let total_events = if chunks > 1 {
        set.average_periods as u64 * chunks as u64
    } else {
        (set.average_periods as u64).div_euclid(every as u64)
    };
    let window = ((set.convergence_window * total_events as f64).ceil() as u64).max(2);
    let window_start = total_events.saturating_sub(window);
    let bins = (window / 4).clamp(2, 16);

    let mut log_acc = vec![S::zero(); k];
    let mut norms = vec![S::zero(); k];
    let mut bin_sum = vec![vec![S::zero(); bins as usize]; k];
    let mut bin_tau = vec![S::zero(); bins as usize];
    let mut elapsed = S::zero();
    let mut event_idx = 0u64;
    let mut tau_since_renorm = S::zero();

    for p in 0..set.average_periods {
        if chunks > 1 {
            let span = period / lit::<S>(chunks as f64);
            for c in 0..chunks {
                let out = rk_aug.integrate_to(&sys, &mut y, span, ctl)?;
                map_status(out.status, p)?;
                elapsed = elapsed + out.elapsed;
                tau_since_renorm = tau_since_renorm + out.elapsed;
                if c == chunks - 1 {
                    y[4] = S::zero();
                }
                renormalize(&mut y[STATE_DIM..], k, &mut norms)?;
                record_event(
                    &norms,
                    tau_since_renorm,
                    event_idx,
                    window_start,
                    window,
                    bins,
                    &mut log_acc,
                    &mut bin_sum,
                    &mut bin_tau,
                );
                tau_since_renorm = S::zero();
                event_idx += 1;
            }
        } else {
            let out = integrate_to_phase(&mut rk_aug, &sys, &mut y, 4, dp.big_omega, 1, ctl)?;
            map_status(out.status, p)?;
            elapsed = elapsed + out.elapsed;
            tau_since_renorm = tau_since_renorm + out.elapsed;
            if (p + 1) % every == 0 {
                renormalize(&mut y[STATE_DIM..], k, &mut norms)?;
                record_event(
                    &norms,
                    tau_since_renorm,
                    event_idx,
                    window_start,
                    window,
                    bins,
                    &mut log_acc,
                    &mut bin_sum,
                    &mut bin_tau,
                );
                tau_since_renorm = S::zero();
                event_idx += 1;
            }
        }
    }

    let mut ordered: Vec<(S, S)> = (0..k)
        .map(|v| {
            let lambda = log_acc[v] / elapsed;
            // Batch means: rate per bin, spread over bins.
            let rates: Vec<S> = (0..bins as usize)
                .filter(|b| bin_tau[*b] > S::zero())
                .map(|b| bin_sum[v][b] / bin_tau[b])
                .collect();
            let stderr = if rates.len() >= 2 {
                let n = S::from_usize(rates.len()).unwrap();
                let mean = rates.iter().copied().sum::<S>() / n;
                let var = rates
                    .iter()
                    .map(|r| (*r - mean) * (*r - mean))
                    .sum::<S>()
                    / (n - S::one());
                (var / n).sqrt()
            } else {
                S::infinity()
            };
            (lambda, stderr)
        })
        .collect();
    ordered.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    let mut base_final = [S::zero(); STATE_DIM];
    base_final.copy_from_slice(&y[..STATE_DIM]);
    Ok(BenettinRun {
        ordered,
        final_state: State::from_array(base_final),
    })
}

#[allow(clippy::too_many_arguments)]
fn record_event<S: Real>(
    norms: &[S],
    event_tau: S,
    event_idx: u64,
    window_start: u64,
    window: u64,
    bins: u64,
    log_acc: &mut [S],
    bin_sum: &mut [Vec<S>],
    bin_tau: &mut [S],
) {
    let in_window = event_idx >= window_start;
    let bin = if in_window {
        (((event_idx - window_start) * bins) / window).min(bins - 1) as usize
    } else {
        0
    };
    for (v, norm) in norms.iter().enumerate() {
        let log_norm = norm.ln();
        log_acc[v] = log_acc[v] + log_norm;
        if in_window {
            bin_sum[v][bin] = bin_sum[v][bin] + log_norm;
        }
    }
    if in_window {
        bin_tau[bin] = bin_tau[bin] + event_tau;
    }
}

/// Full spectrum: five tangent vectors spanning the whole tangent space.
/// The exponent closest to zero is the phase-direction referent.
pub fn spectrum<S: Real>(
    dp: &DimensionlessParams<S>,
    s0: &State<S>,
    ctl: &StepControl<S>,
    set: &LyapunovSettings,
) -> Result<LyapunovResult<S>, LyapunovError> {
    let run = benettin(dp, s0, ctl, set, STATE_DIM)?;
    let exponents: [S; 5] = core::array::from_fn(|i| run.ordered[i].0);
    let stderr: [S; 5] = core::array::from_fn(|i| run.ordered[i].1);
    let trivial_index = exponents
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let mut nontrivial = [S::zero(); 4];
    let mut nontrivial_stderr = [S::zero(); 4];
    let mut w = 0;
    for i in 0..5 {
        if i != trivial_index {
            nontrivial[w] = exponents[i];
            nontrivial_stderr[w] = stderr[i];
            w += 1;
        }
    }
    let zero_eps = lit::<S>(DEFAULT_ZERO_EPS);
    let not_converged = nontrivial_stderr[0] > zero_eps || nontrivial_stderr[1] > zero_eps;
    Ok(LyapunovResult {
        exponents,
        stderr,
        trivial_index,
        nontrivial,
        nontrivial_stderr,
        final_state: run.final_state,
        not_converged,
    })
}

/// The two largest nontrivial exponents, computed from two tangent vectors
/// seeded in the phase-free subspace (which the variational flow leaves
/// invariant exactly, since the phase row of the Jacobian is identically
/// zero). Used by chart sweeps; must agree with `spectrum`'s top two
/// nontrivial exponents within the combined standard errors.
pub fn two_largest<S: Real>(
    dp: &DimensionlessParams<S>,
    s0: &State<S>,
    ctl: &StepControl<S>,
    set: &LyapunovSettings,
) -> Result<TwoLargest<S>, LyapunovError> {
    let run = benettin(dp, s0, ctl, set, 2)?;
    let zero_eps = lit::<S>(DEFAULT_ZERO_EPS);
    let (lambda1, stderr1) = run.ordered[0];
    let (lambda2, stderr2) = run.ordered[1];
    Ok(TwoLargest {
        lambda1,
        lambda2,
        stderr1,
        stderr2,
        final_state: run.final_state,
        not_converged: stderr1 > zero_eps || stderr2 > zero_eps,
    })
}
