//! Adaptive embedded Runge–Kutta 4(5) integration with event-exact stops at
//! drive-period boundaries.
//!
//! Poincaré sections fire at `theta = 0 (mod 2*pi)`; because the phase
//! advances at the constant rate `Omega`, the crossing times are known in
//! closed form and the stepper simply shortens its final step to land on
//! them — no root finding, no dense output.

use crate::error::ModelError;
use crate::real::{lit, Real};
use crate::tableau;

/// Right-hand side of an autonomous first-order system over flat state slices.
pub trait OdeSystem<S: Real> {
    fn dim(&self) -> usize;
    fn eval(&self, y: &[S], dy: &mut [S]) -> Result<(), ModelError>;

    /// Checked on accepted states; returning true halts the integration with
    /// `Collapsed` status. Default: never.
    fn collapsed(&self, _y: &[S]) -> bool {
        false
    }
}

/// Step-size control for the embedded pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl<S> {
    /// Absolute tolerance.
    pub atol: S,
    /// Relative tolerance.
    pub rtol: S,
    /// Initial step in `tau`.
    pub h_init: S,
    /// Smallest admissible step; demanding less reports `StepUnderflow`.
    pub h_min: S,
    /// Largest admissible step.
    pub h_max: S,
    /// Step-size safety factor.
    pub safety: S,
    /// Hard cap on steps (accepted + rejected) per `integrate_to` call.
    pub max_steps: u64,
}

impl<S: Real> Default for StepControl<S> {
    fn default() -> Self {
        Self {
            atol: lit(1e-10),
            rtol: lit(1e-10),
            h_init: lit(1e-3),
            h_min: lit(1e-12),
            h_max: lit(0.5),
            safety: lit(0.9),
            max_steps: 10_000_000,
        }
    }
}

impl<S: Real> StepControl<S> {
    pub fn with_tol(atol: S, rtol: S) -> Self {
        Self {
            atol,
            rtol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let ok = S::zero() < self.h_min
            && self.h_min <= self.h_init
            && self.h_init <= self.h_max
            && S::zero() < self.safety
            && self.safety < S::one()
            && self.atol > S::zero()
            && self.rtol > S::zero();
        if ok {
            Ok(())
        } else {
            Err(ModelError::InvalidParams {
                name: "step_control",
                reason: "need 0 < h_min <= h_init <= h_max, 0 < safety < 1, atol/rtol > 0",
            })
        }
    }
}

/// How an integration run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrationStatus {
    /// Landed on the requested time exactly.
    Completed,
    /// A bubble radius reached the collapse floor (or the field became
    /// singular at every resolvable step size).
    Collapsed,
    /// Error control demanded a step below `h_min`.
    StepUnderflow,
    /// `max_steps` exhausted.
    StepLimit,
}

/// Outcome of `integrate_to`/`integrate_to_phase`; the state itself is
/// updated in place in the caller's buffer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOutcome<S> {
    pub status: IntegrationStatus,
    /// Elapsed `tau`; equals the requested horizon exactly iff `Completed`.
    pub elapsed: S,
    /// Accepted steps.
    pub steps: u64,
    /// Rejected trial steps (including stage failures).
    pub rejected: u64,
}

const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// Dormand–Prince 4(5) stepper with reusable stage buffers.
///
/// All state is per-call scratch; a fresh instance and a reused one produce
/// identical results except that a reused instance carries its last accepted
/// step size into the next call (reset with [`Rk45::reset_step`]).
#[derive(Debug, Clone)]
pub struct Rk45<S> {
    a: [[S; 6]; 7],
    e: [S; 7],
    k: [Vec<S>; 7],
    y_stage: Vec<S>,
    y_new: Vec<S>,
    h_carry: Option<S>,
}

impl<S: Real> Rk45<S> {
    pub fn new(dim: usize) -> Self {
        Self {
            a: tableau::A.map(|row| row.map(lit)),
            e: tableau::E.map(lit),
            k: core::array::from_fn(|_| vec![S::zero(); dim]),
            y_stage: vec![S::zero(); dim],
            y_new: vec![S::zero(); dim],
            h_carry: None,
        }
    }

    fn ensure_dim(&mut self, dim: usize) {
        if self.y_stage.len() != dim {
            for k in &mut self.k {
                k.resize(dim, S::zero());
            }
            self.y_stage.resize(dim, S::zero());
            self.y_new.resize(dim, S::zero());
            self.h_carry = None;
        }
    }

    /// Forget the carried step size; the next call starts from `h_init`.
    pub fn reset_step(&mut self) {
        self.h_carry = None;
    }

    /// One embedded 4(5) trial step of size `h` from `y`, writing the
    /// fifth-order candidate to `y_out` and returning the weighted RMS error
    /// estimate (acceptable when <= 1). `k[0]` must already hold `f(y)` —
    /// see [`Rk45::prime`]; on return `k[6]` holds `f(y_out)` for FSAL reuse.
    fn trial_step(
        &mut self,
        sys: &impl OdeSystem<S>,
        y: &[S],
        h: S,
        ctl: &StepControl<S>,
        y_out: &mut [S],
    ) -> Result<S, ModelError> {
        let dim = y.len();
        for stage in 1..7 {
            for i in 0..dim {
                let mut acc = self.a[stage][0] * self.k[0][i];
                for j in 1..stage {
                    acc = acc + self.a[stage][j] * self.k[j][i];
                }
                self.y_stage[i] = y[i] + h * acc;
            }
            sys.eval(&self.y_stage, &mut self.k[stage])?;
        }
        // FSAL: the seventh stage state is the fifth-order solution.
        y_out.copy_from_slice(&self.y_stage);
        let mut err_sq = S::zero();
        for i in 0..dim {
            let mut err_i = self.e[0] * self.k[0][i];
            for j in 2..7 {
                err_i = err_i + self.e[j] * self.k[j][i];
            }
            err_i = h * err_i;
            let w = ctl.atol + ctl.rtol * y[i].abs().max(y_out[i].abs());
            let q = err_i / w;
            err_sq = err_sq + q * q;
        }
        Ok((err_sq / S::from_usize(dim).unwrap()).sqrt())
    }

    /// Evaluate `f(y)` into the first stage slot.
    fn prime(&mut self, sys: &impl OdeSystem<S>, y: &[S]) -> Result<(), ModelError> {
        sys.eval(y, &mut self.k[0])
    }

    /// Single embedded step exposed for order studies and tests: returns the
    /// fifth-order candidate and the weighted RMS error estimate.
    pub fn step(
        &mut self,
        sys: &impl OdeSystem<S>,
        y: &[S],
        h: S,
        ctl: &StepControl<S>,
    ) -> Result<(Vec<S>, S), ModelError> {
        self.ensure_dim(y.len());
        self.prime(sys, y)?;
        let mut out = vec![S::zero(); y.len()];
        let err = self.trial_step(sys, y, h, ctl, &mut out)?;
        Ok((out, err))
    }

    /// Advance `y` by exactly `tau_end` time units (the accept/reject loop;
    /// the final step is shortened to land on the horizon). Errors are
    /// returned only when the field is undefined at the *initial* state;
    /// everything the loop can diagnose is reported through the status.
    pub fn integrate_to(
        &mut self,
        sys: &impl OdeSystem<S>,
        y: &mut [S],
        tau_end: S,
        ctl: &StepControl<S>,
    ) -> Result<IntegrationOutcome<S>, ModelError> {
        self.ensure_dim(y.len());
        let mut t = S::zero();
        let mut steps = 0u64;
        let mut rejected = 0u64;
        let mut h = self.h_carry.unwrap_or(ctl.h_init).min(ctl.h_max);
        let min_factor = lit::<S>(MIN_FACTOR);
        let max_factor = lit::<S>(MAX_FACTOR);
        let order_exp = lit::<S>(-0.2);

        let outcome = |status, t, steps, rejected| IntegrationOutcome {
            status,
            elapsed: t,
            steps,
            rejected,
        };

        // Errors here mean the field is undefined at the caller's state.
        self.prime(sys, y)?;

        loop {
            if t >= tau_end {
                return Ok(outcome(IntegrationStatus::Completed, tau_end, steps, rejected));
            }
            if steps + rejected >= ctl.max_steps {
                return Ok(outcome(IntegrationStatus::StepLimit, t, steps, rejected));
            }
            let remaining = tau_end - t;
            let clamped = h >= remaining;
            let h_try = if clamped { remaining } else { h };

            // k[0] always holds f(y) here: trial_step writes only k[1..7]
            // and an accepted step swaps in k7 = f(y_new).
            let mut y_new = core::mem::take(&mut self.y_new);
            let trial = self.trial_step(sys, y, h_try, ctl, &mut y_new);
            self.y_new = y_new;

            let err = match trial {
                Ok(err) if err.is_finite() => err,
                // A trial stage left the field's domain (or produced a
                // non-finite estimate); shrink and retry.
                _ => {
                    rejected += 1;
                    let h_next = h_try * lit::<S>(0.5);
                    if h_next < ctl.h_min {
                        return Ok(outcome(IntegrationStatus::Collapsed, t, steps, rejected));
                    }
                    h = h_next;
                    continue;
                }
            };

            if err <= S::one() {
                steps += 1;
                t = if clamped { tau_end } else { t + h_try };
                y.copy_from_slice(&self.y_new);
                self.k.swap(0, 6); // k7 = f(y_new) becomes next k1

                if sys.collapsed(y) {
                    return Ok(outcome(IntegrationStatus::Collapsed, t, steps, rejected));
                }

                let factor = if err == S::zero() {
                    max_factor
                } else {
                    (ctl.safety * err.powf(order_exp)).max(min_factor).min(max_factor)
                };
                let h_grown = (h_try * factor).min(ctl.h_max).max(ctl.h_min);
                // On a horizon-clamped step keep the controller's step if it
                // was larger; the clamp says nothing about accuracy.
                h = if clamped { h.max(h_grown) } else { h_grown };
                self.h_carry = Some(h);
            } else {
                rejected += 1;
                let factor = (ctl.safety * err.powf(order_exp)).max(min_factor).min(S::one());
                let h_next = h_try * factor;
                if h_next < ctl.h_min {
                    return Ok(outcome(IntegrationStatus::StepUnderflow, t, steps, rejected));
                }
                h = h_next;
            }
        }
    }
}

/// Advance `y` by `periods` whole drive periods, landing on
/// `theta = 0 (mod 2*pi)` exactly. The phase advances at the constant rate
/// `big_omega`, so the crossing times are exact: the first crossing lies at
/// `(2*pi - theta)/big_omega`, each later one a full period after. The phase
/// component is set to zero at every boundary (the analytically exact value).
pub fn integrate_to_phase<S: Real>(
    rk: &mut Rk45<S>,
    sys: &impl OdeSystem<S>,
    y: &mut [S],
    theta_index: usize,
    big_omega: S,
    periods: u64,
    ctl: &StepControl<S>,
) -> Result<IntegrationOutcome<S>, ModelError> {
    let period = S::TAU() / big_omega;
    let mut total = IntegrationOutcome {
        status: IntegrationStatus::Completed,
        elapsed: S::zero(),
        steps: 0,
        rejected: 0,
    };
    for _ in 0..periods {
        let theta = y[theta_index];
        let span = if theta == S::zero() {
            period
        } else {
            (S::TAU() - theta) / big_omega
        };
        let out = rk.integrate_to(sys, y, span, ctl)?;
        total.elapsed = total.elapsed + out.elapsed;
        total.steps += out.steps;
        total.rejected += out.rejected;
        if out.status != IntegrationStatus::Completed {
            total.status = out.status;
            return Ok(total);
        }
        y[theta_index] = S::zero();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BubbleSystem, DimensionlessParams, PhysicalParams, State, STATE_DIM};

    struct LinearDecay {
        rate: f64,
    }
    impl OdeSystem<f64> for LinearDecay {
        fn dim(&self) -> usize {
            1
        }
        fn eval(&self, y: &[f64], dy: &mut [f64]) -> Result<(), ModelError> {
            dy[0] = self.rate * y[0];
            Ok(())
        }
    }

    fn quiet_system() -> BubbleSystem<f64> {
        let phys = PhysicalParams::sonovue_1_72um().with_p_ac(0.0);
        BubbleSystem::new(DimensionlessParams::from_physical(&phys).unwrap())
    }

    fn driven_system() -> BubbleSystem<f64> {
        BubbleSystem::new(
            DimensionlessParams::from_physical(&PhysicalParams::sonovue_1_72um()).unwrap(),
        )
    }

    #[test]
    fn constant_field_advances_phase_exactly() {
        // Without drive the equilibrium field is (0,0,0,0,Omega): degree-zero
        // polynomial, integrated exactly, zero error estimate.
        let sys = quiet_system();
        let ctl = StepControl::default();
        let mut rk = Rk45::new(STATE_DIM);
        let y = State::equilibrium().to_array();
        let h = 0.37;
        let (out, err) = rk.step(&sys, &y, h, &ctl).unwrap();
        let dtheta = out[4] - y[4];
        let want = h * sys.dp.big_omega;
        assert!((dtheta - want).abs() <= 4.0 * f64::EPSILON * want);
        assert!(err.abs() < 1e-30, "err = {err:e}");
        for i in 0..4 {
            assert!((out[i] - y[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn one_step_matches_exponential_to_stage_order() {
        // On y' = -y the fifth-order step differs from exp by O(h^6) with the
        // classical z^6/3600 leading term, ~2.8e-10 at h = 0.1.
        let sys = LinearDecay { rate: -1.0 };
        let ctl = StepControl::default();
        let mut rk = Rk45::new(1);
        let h = 0.1;
        let (out, _) = rk.step(&sys, &[1.0], h, &ctl).unwrap();
        let exact = (-h as f64).exp();
        assert!(
            (out[0] - exact).abs() < 1e-9,
            "one-step error {:e}",
            (out[0] - exact).abs()
        );
    }

    #[test]
    fn error_estimate_scales_as_fifth_order() {
        let sys = driven_system();
        let ctl = StepControl::default();
        let mut rk = Rk45::new(STATE_DIM);
        let y = State::new(1.1, 0.2, 0.9, -0.1, 1.0).to_array();
        let h = 2e-2;
        let (_, err_h) = rk.step(&sys, &y, h, &ctl).unwrap();
        let (_, err_h2) = rk.step(&sys, &y, h / 2.0, &ctl).unwrap();
        let ratio = err_h / err_h2;
        assert!(
            (24.0..=40.0).contains(&ratio),
            "halving ratio {ratio} outside [24, 40]"
        );
    }

    #[test]
    fn equilibrium_is_a_fixed_point_of_integration() {
        let sys = quiet_system();
        let ctl = StepControl::default();
        let mut rk = Rk45::new(STATE_DIM);
        let mut y = State::equilibrium().to_array();
        let out = rk.integrate_to(&sys, &mut y, 50.0, &ctl).unwrap();
        assert_eq!(out.status, IntegrationStatus::Completed);
        assert_eq!(out.elapsed, 50.0);
        for (i, want) in [1.0, 0.0, 1.0, 0.0].iter().enumerate() {
            assert!((y[i] - want).abs() <= ctl.atol, "component {i}");
        }
    }

    #[test]
    fn integration_commutes_with_swap() {
        let sys = driven_system();
        let ctl = StepControl::default();
        let period = sys.dp.drive_period();
        let s0 = State::new(1.08, 0.15, 0.94, -0.08, 0.0);

        let mut rk = Rk45::new(STATE_DIM);
        let mut y = s0.to_array();
        rk.integrate_to(&sys, &mut y, period, &ctl).unwrap();
        let then_swap = crate::model::swap(&State::from_array(y));

        let mut rk2 = Rk45::new(STATE_DIM);
        let mut y2 = crate::model::swap(&s0).to_array();
        rk2.integrate_to(&sys, &mut y2, period, &ctl).unwrap();
        let swap_then = State::from_array(y2);

        let a = then_swap.to_array();
        let b = swap_then.to_array();
        for i in 0..STATE_DIM {
            assert!((a[i] - b[i]).abs() < 1e-9, "component {i}: {} vs {}", a[i], b[i]);
        }
    }

    #[test]
    fn tightening_tolerance_converges() {
        // Pre-chaotic point (d/r0 = 6.75, p_ac = 1.7 MPa): 50 periods at
        // 1e-10 vs 1e-12 tolerances agree to 1e-6.
        let phys = PhysicalParams::sonovue_1_72um()
            .with_d_over_r0(6.75)
            .with_p_ac(1.7e6);
        let sys = BubbleSystem::new(DimensionlessParams::from_physical(&phys).unwrap());
        let run = |tol: f64| {
            let ctl = StepControl::with_tol(tol, tol);
            let mut rk = Rk45::new(STATE_DIM);
            let mut y = State::equilibrium().to_array();
            let out =
                integrate_to_phase(&mut rk, &sys, &mut y, 4, sys.dp.big_omega, 50, &ctl).unwrap();
            assert_eq!(out.status, IntegrationStatus::Completed);
            y
        };
        let loose = run(1e-10);
        let tight = run(1e-12);
        for i in 0..4 {
            assert!(
                (loose[i] - tight[i]).abs() < 1e-6,
                "component {i}: {} vs {}",
                loose[i],
                tight[i]
            );
        }
    }

    #[test]
    fn phase_stepping_lands_on_zero_exactly() {
        let sys = driven_system();
        let ctl = StepControl::default();
        let mut rk = Rk45::new(STATE_DIM);
        let mut y = State::new(1.05, 0.0, 0.95, 0.0, 0.0).to_array();
        let out = integrate_to_phase(&mut rk, &sys, &mut y, 4, sys.dp.big_omega, 1, &ctl).unwrap();
        assert_eq!(out.status, IntegrationStatus::Completed);
        assert_eq!(y[4], 0.0);
        assert_eq!(out.elapsed, core::f64::consts::TAU / sys.dp.big_omega);
    }

    #[test]
    fn k_periods_equals_k_times_one_period() {
        let sys = driven_system();
        let ctl = StepControl::default();
        let s0 = State::new(1.05, 0.0, 0.95, 0.0, 0.0).to_array();
        let k = 7;

        let mut rk = Rk45::new(STATE_DIM);
        let mut y_bulk = s0;
        integrate_to_phase(&mut rk, &sys, &mut y_bulk, 4, sys.dp.big_omega, k, &ctl).unwrap();

        let mut rk1 = Rk45::new(STATE_DIM);
        let mut y_steps = s0;
        for _ in 0..k {
            integrate_to_phase(&mut rk1, &sys, &mut y_steps, 4, sys.dp.big_omega, 1, &ctl)
                .unwrap();
        }
        for i in 0..STATE_DIM {
            assert!(
                (y_bulk[i] - y_steps[i]).abs() < 1e-9,
                "component {i}: {} vs {}",
                y_bulk[i],
                y_steps[i]
            );
        }
    }

    #[test]
    fn undriven_state_returns_after_whole_periods() {
        let sys = quiet_system();
        let ctl = StepControl::default();
        let mut rk = Rk45::new(STATE_DIM);
        let mut y = State::equilibrium().to_array();
        integrate_to_phase(&mut rk, &sys, &mut y, 4, sys.dp.big_omega, 10, &ctl).unwrap();
        for (i, want) in State::<f64>::equilibrium().to_array().iter().enumerate() {
            assert!((y[i] - want).abs() <= 1e-9, "component {i}");
        }
    }

    #[test]
    fn determinism_same_inputs_same_bits() {
        let sys = driven_system();
        let ctl = StepControl::default();
        let run = || {
            let mut rk = Rk45::new(STATE_DIM);
            let mut y = State::new(1.05, 0.0, 0.95, 0.0, 0.0).to_array();
            integrate_to_phase(&mut rk, &sys, &mut y, 4, sys.dp.big_omega, 20, &ctl).unwrap();
            y
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn collapse_is_reported_not_clamped() {
        // An extreme inward velocity drives r below the floor.
        let sys = driven_system();
        let ctl = StepControl::default();
        let mut rk = Rk45::new(STATE_DIM);
        let mut y = State::new(0.4, -30.0, 1.0, 0.0, 0.0).to_array();
        let out = rk.integrate_to(&sys, &mut y, 10.0, &ctl).unwrap();
        assert_eq!(out.status, IntegrationStatus::Collapsed);
        assert!(out.elapsed < 10.0);
    }

    #[test]
    fn step_limit_is_reported() {
        let sys = driven_system();
        let ctl = StepControl {
            max_steps: 10,
            ..Default::default()
        };
        let mut rk = Rk45::new(STATE_DIM);
        let mut y = State::new(1.05, 0.0, 0.95, 0.0, 0.0).to_array();
        let out = rk.integrate_to(&sys, &mut y, 1e4, &ctl).unwrap();
        assert_eq!(out.status, IntegrationStatus::StepLimit);
    }
}
