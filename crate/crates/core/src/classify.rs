//! Regime classification from the two largest nontrivial Lyapunov exponents
//! and the synchronous-manifold deviation.

use crate::error::InconsistentClassification;
use crate::real::{lit, Real};

/// Zero band half-width for exponent sign decisions, per unit `tau`.
pub const DEFAULT_ZERO_EPS: f64 = 5e-3;
/// Synchronous-manifold deviation below which a regime counts as synchronous.
pub const DEFAULT_SYNC_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeKind {
    Periodic,
    Quasiperiodic,
    Chaotic,
    Hyperchaotic,
}

impl RegimeKind {
    pub const fn name(self) -> &'static str {
        match self {
            RegimeKind::Periodic => "periodic",
            RegimeKind::Quasiperiodic => "quasiperiodic",
            RegimeKind::Chaotic => "chaotic",
            RegimeKind::Hyperchaotic => "hyperchaotic",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "periodic" => Some(RegimeKind::Periodic),
            "quasiperiodic" => Some(RegimeKind::Quasiperiodic),
            "chaotic" => Some(RegimeKind::Chaotic),
            "hyperchaotic" => Some(RegimeKind::Hyperchaotic),
            _ => None,
        }
    }
}

/// A classified regime. Synchronous regimes live on the invariant manifold
/// `r1 = r2, u1 = u2`, where the restricted flow is three-dimensional and
/// volume contracting — they can only be periodic or simply chaotic, so
/// `Quasiperiodic` and `Hyperchaotic` imply asynchronous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeClass<S> {
    pub kind: RegimeKind,
    pub synchronous: bool,
    /// Smallest margin (in units of the zero band) by which the deciding
    /// exponents clear their thresholds; near 0 means a borderline label.
    pub confidence: S,
}

/// Classify from `lambda1 >= lambda2` with per-exponent zero bands
/// `eps_i = max(zero_eps, 3 * stderr_i)`:
///
/// * `lambda1 < -eps`: periodic;
/// * `|lambda1| <= eps`: quasiperiodic;
/// * `lambda1 > eps, lambda2 <= eps`: chaotic;
/// * `lambda1 > eps, lambda2 > eps`: hyperchaotic.
///
/// Structural violations (synchronous quasiperiodic/hyperchaotic) are
/// reported as errors rather than silently coerced.
pub fn classify<S: Real>(
    lambda1: S,
    lambda2: S,
    stderr1: S,
    stderr2: S,
    zero_eps: S,
    sync_deviation: S,
    sync_tol: S,
) -> Result<RegimeClass<S>, InconsistentClassification> {
    debug_assert!(lambda1 >= lambda2);
    let three = lit::<S>(3.0);
    let eps1 = zero_eps.max(three * stderr1);
    let eps2 = zero_eps.max(three * stderr2);

    let (kind, confidence) = if lambda1 < -eps1 {
        (RegimeKind::Periodic, (-lambda1 - eps1) / eps1)
    } else if lambda1 <= eps1 {
        let margin1 = (eps1 - lambda1.abs()) / eps1;
        let margin2 = if lambda2 < -eps2 {
            (-lambda2 - eps2) / eps2
        } else {
            // Second exponent also inside the band (a higher-dimensional
            // torus or unresolved numerics): still quasiperiodic, with the
            // margin reflecting how deep it sits.
            (eps2 - lambda2.abs()) / eps2
        };
        (RegimeKind::Quasiperiodic, margin1.min(margin2))
    } else if lambda2 > eps2 {
        let margin = ((lambda1 - eps1) / eps1).min((lambda2 - eps2) / eps2);
        (RegimeKind::Hyperchaotic, margin)
    } else {
        let margin1 = (lambda1 - eps1) / eps1;
        let margin2 = (eps2 - lambda2) / eps2;
        (RegimeKind::Chaotic, margin1.min(margin2))
    };

    let synchronous = sync_deviation < sync_tol;
    if synchronous
        && matches!(kind, RegimeKind::Quasiperiodic | RegimeKind::Hyperchaotic)
    {
        return Err(InconsistentClassification {
            kind: kind.name(),
            sync_deviation: sync_deviation.as_f64(),
        });
    }
    Ok(RegimeClass {
        kind,
        synchronous,
        confidence,
    })
}

/// Chart color of a regime. Exact bytes, fixed for bit-exact chart
/// regression: periodic blue, quasiperiodic green, chaotic yellow,
/// hyperchaotic red.
pub fn color<S>(rc: &RegimeClass<S>) -> [u8; 3] {
    match rc.kind {
        RegimeKind::Periodic => [0, 0, 255],
        RegimeKind::Quasiperiodic => [0, 200, 0],
        RegimeKind::Chaotic => [255, 215, 0],
        RegimeKind::Hyperchaotic => [220, 0, 0],
    }
}

/// Color used for cells whose trajectory collapsed.
pub const COLLAPSED_COLOR: [u8; 3] = [0, 0, 0];
