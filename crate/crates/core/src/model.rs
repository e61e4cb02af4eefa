//! Two coupled encapsulated gas bubbles in a compressible liquid, driven by a
//! periodic pressure field.
//!
//! Each bubble wall obeys a Keller–Miksis equation with a de Jong shell
//! (elasticity `chi`, surface viscosity `kappa_s`); the bubbles interact
//! through the secondary Bjerknes term `d/dt(R_j^2 Rdot_j / d)`. Written in
//! nondimensional variables (`r_i = R_i/R0`, `tau = omega0 t`,
//! `u_i = dr_i/dtau`, drive phase `theta`) the motion reduces to a 5D
//! first-order system whose accelerations solve a 2x2 linear system
//! `M * (du1, du2)^T = b` at every state. The entries of `M` and `b`, and all
//! the precomputed coefficients below, are derived step by step in
//! `DERIVATION.md` next to this crate.

use crate::error::ModelError;
use crate::integrator::OdeSystem;
use crate::real::{lit, Real};

/// Dimensional constants of the two-bubble system (SI units).
///
/// Both bubbles share the same equilibrium radius `r0`, which makes the
/// system symmetric under exchanging the bubbles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams<S> {
    /// Static pressure, Pa.
    pub p_stat: S,
    /// Vapor pressure, Pa (`p0 = p_stat - p_v`).
    pub p_v: S,
    /// Surface tension, N/m.
    pub sigma: S,
    /// Liquid density, kg/m^3.
    pub rho: S,
    /// Liquid viscosity, Pa s.
    pub eta_l: S,
    /// Speed of sound in the liquid, m/s.
    pub c: S,
    /// Polytropic exponent of the gas core.
    pub gamma: S,
    /// Shell elasticity, N/m.
    pub chi: S,
    /// Shell surface viscosity, kg/s.
    pub kappa_s: S,
    /// Equilibrium radius of both bubbles, m.
    pub r0: S,
    /// Center-to-center distance, m.
    pub d: S,
    /// Drive amplitude, Pa.
    pub p_ac: S,
    /// Drive cyclic frequency, rad/s.
    pub omega: S,
}

impl<S: Real> PhysicalParams<S> {
    /// SonoVue-type agent, equilibrium radius 1.72 um, adiabatic gas core.
    /// Drive amplitude and bubble distance are control parameters; the preset
    /// ships with `d/r0 = 20` and `p_ac = 1.2 MPa`, meant to be overridden.
    pub fn sonovue_1_72um() -> Self {
        Self {
            p_stat: lit(101_325.0),
            p_v: lit(2330.0),
            sigma: lit(0.0725),
            rho: lit(1000.0),
            eta_l: lit(0.001),
            c: lit(1500.0),
            gamma: lit(4.0 / 3.0),
            chi: lit(0.22),
            kappa_s: lit(2.5e-9),
            r0: lit(1.72e-6),
            d: lit(20.0 * 1.72e-6),
            p_ac: lit(1.2e6),
            omega: lit(2.87e7),
        }
    }

    /// Ambient gas pressure `p0 = p_stat - p_v`.
    pub fn p0(&self) -> S {
        self.p_stat - self.p_v
    }

    /// Ratio `d / r0`.
    pub fn d_over_r0(&self) -> S {
        self.d / self.r0
    }

    /// Returns a copy with the distance set as a multiple of `r0`.
    pub fn with_d_over_r0(mut self, ratio: S) -> Self {
        self.d = ratio * self.r0;
        self
    }

    /// Returns a copy with the drive amplitude replaced.
    pub fn with_p_ac(mut self, p_ac: S) -> Self {
        self.p_ac = p_ac;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let pos: [(&'static str, S); 11] = [
            ("p_stat", self.p_stat),
            ("p_v", self.p_v),
            ("sigma", self.sigma),
            ("rho", self.rho),
            ("eta_l", self.eta_l),
            ("c", self.c),
            ("gamma", self.gamma),
            ("chi", self.chi),
            ("kappa_s", self.kappa_s),
            ("r0", self.r0),
            ("omega", self.omega),
        ];
        for (name, v) in pos {
            if !(v > S::zero()) || !v.is_finite() {
                return Err(ModelError::InvalidParams {
                    name,
                    reason: "must be strictly positive",
                });
            }
        }
        if !(self.p_ac >= S::zero()) || !self.p_ac.is_finite() {
            return Err(ModelError::InvalidParams {
                name: "p_ac",
                reason: "must be non-negative",
            });
        }
        if !(self.d > lit::<S>(2.0) * self.r0) {
            return Err(ModelError::InvalidParams {
                name: "d",
                reason: "bubbles overlap: need d > 2*r0",
            });
        }
        if !(self.p_stat > self.p_v) {
            return Err(ModelError::InvalidParams {
                name: "p_stat",
                reason: "need p_stat > p_v",
            });
        }
        Ok(())
    }
}

/// Natural frequency of small radial oscillations, rad/s:
/// `omega0^2 = [3*gamma*p0 + 2*(3*gamma - 1)*sigma/r0 + 4*chi/r0] / (rho*r0^2)`.
pub fn natural_frequency<S: Real>(p: &PhysicalParams<S>) -> S {
    let three_k = lit::<S>(3.0) * p.gamma;
    let bracket = three_k * p.p0()
        + lit::<S>(2.0) * (three_k - S::one()) * p.sigma / p.r0
        + lit::<S>(4.0) * p.chi / p.r0;
    (bracket / (p.rho * p.r0 * p.r0)).sqrt()
}

/// Nondimensional coefficient bundle for the 5D vector field.
///
/// All pressures are scaled by `rho * r0^2 * omega0^2`, lengths by `r0`,
/// times by `1/omega0`. The dimensional origin of every coefficient is listed
/// field by field; the assembled equations live in `DERIVATION.md`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessParams<S> {
    /// Natural frequency `omega0`, rad/s (the only dimensional field).
    pub omega0: S,
    /// Drive frequency ratio `Omega = omega / omega0`; `theta` advances at
    /// this rate per unit `tau`.
    pub big_omega: S,
    /// Gas prefactor `(p0 + 2*sigma/r0) / scale`, stored as `p_0 + p_sigma`
    /// so the static terms cancel identically at `r = 1`.
    pub p_gas: S,
    /// Ambient pressure `p0 / scale`.
    pub p_0: S,
    /// Surface tension `2*sigma / (r0 * scale)`.
    pub p_sigma: S,
    /// Shell elasticity `4*chi / (r0 * scale)`.
    pub p_chi: S,
    /// Drive amplitude `p_ac / scale`.
    pub p_drive: S,
    /// Liquid viscosity in the wall pressure: `4*eta_l / (rho * r0^2 * omega0)`.
    pub c_visc: S,
    /// Shell viscosity in the wall pressure: `4*kappa_s / (rho * r0^3 * omega0)`.
    pub c_kappa: S,
    /// Wall Mach scale `beta = r0 * omega0 / c`; `Rdot/c = beta * u`.
    pub beta: S,
    /// Liquid-viscosity part of the acoustic mass: `4*eta_l / (rho * c * r0)`.
    pub c_mass_visc: S,
    /// Shell-viscosity part of the acoustic mass: `4*kappa_s / (rho * c * r0^2)`.
    pub c_mass_shell: S,
    /// Inverse distance ratio `r0 / d`; the Bjerknes coupling strength.
    pub inv_delta: S,
    /// Polytropic exponent of the gas term, `3*gamma`.
    pub gas_exp: S,
    /// Integer fast path for the gas exponent (`3*gamma = 4` for `gamma = 4/3`).
    pub gas_exp_int: Option<i32>,
}

impl<S: Real> DimensionlessParams<S> {
    /// Nondimensionalizes a parameter set. Pure function of its input: the
    /// same `PhysicalParams` always produces a bit-identical bundle.
    pub fn from_physical(p: &PhysicalParams<S>) -> Result<Self, ModelError> {
        p.validate()?;
        let omega0 = natural_frequency(p);
        let scale = p.rho * p.r0 * p.r0 * omega0 * omega0;
        let p_0 = p.p0() / scale;
        let p_sigma = lit::<S>(2.0) * p.sigma / (p.r0 * scale);
        let gas_exp = lit::<S>(3.0) * p.gamma;
        let rounded = gas_exp.round();
        let gas_exp_int = if (gas_exp - rounded).abs() < lit(1e-12) {
            rounded.to_i32()
        } else {
            None
        };
        Ok(Self {
            omega0,
            big_omega: p.omega / omega0,
            p_gas: p_0 + p_sigma,
            p_0,
            p_sigma,
            p_chi: lit::<S>(4.0) * p.chi / (p.r0 * scale),
            p_drive: p.p_ac / scale,
            c_visc: lit::<S>(4.0) * p.eta_l / (p.rho * p.r0 * p.r0 * omega0),
            c_kappa: lit::<S>(4.0) * p.kappa_s / (p.rho * p.r0 * p.r0 * p.r0 * omega0),
            beta: p.r0 * omega0 / p.c,
            c_mass_visc: lit::<S>(4.0) * p.eta_l / (p.rho * p.c * p.r0),
            c_mass_shell: lit::<S>(4.0) * p.kappa_s / (p.rho * p.c * p.r0 * p.r0),
            inv_delta: p.r0 / p.d,
            gas_exp,
            gas_exp_int,
        })
    }

    /// Drive period in units of `tau`.
    pub fn drive_period(&self) -> S {
        S::TAU() / self.big_omega
    }

    /// Stable identifier of the generating parameters, used to tag Poincaré
    /// series so fingerprints from different parameter points cannot be
    /// compared by accident.
    pub fn params_hash(&self) -> u64 {
        // FNV-1a over the bit patterns; deterministic across runs.
        let fields = [
            self.omega0,
            self.big_omega,
            self.p_gas,
            self.p_chi,
            self.p_drive,
            self.c_visc,
            self.c_kappa,
            self.beta,
            self.c_mass_visc,
            self.c_mass_shell,
            self.inv_delta,
            self.gas_exp,
        ];
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for f in fields {
            for byte in f.as_f64().to_bits().to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }

    /// `r^(-3*gamma)` with an integer fast path for adiabatic `gamma = 4/3`.
    #[inline]
    fn gas_term(&self, r: S) -> S {
        match self.gas_exp_int {
            Some(n) => r.powi(-n),
            None => r.powf(-self.gas_exp),
        }
    }

    /// `r^(-3*gamma - 1)`, the radial derivative shape of the gas term.
    #[inline]
    fn gas_term_deriv(&self, r: S) -> S {
        match self.gas_exp_int {
            Some(n) => r.powi(-n - 1),
            None => r.powf(-self.gas_exp - S::one()),
        }
    }
}

/// 5D dynamical state in nondimensional variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State<S> {
    /// Radius of bubble 1, units of `r0`.
    pub r1: S,
    /// Wall velocity of bubble 1, `dr1/dtau`.
    pub u1: S,
    /// Radius of bubble 2.
    pub r2: S,
    /// Wall velocity of bubble 2.
    pub u2: S,
    /// Drive phase, kept in `[0, 2*pi)`.
    pub theta: S,
}

pub const STATE_DIM: usize = 5;

impl<S: Real> State<S> {
    pub fn new(r1: S, u1: S, r2: S, u2: S, theta: S) -> Self {
        Self {
            r1,
            u1,
            r2,
            u2,
            theta: reduce_phase(theta),
        }
    }

    /// Rest state of both bubbles at phase zero.
    pub fn equilibrium() -> Self {
        Self::new(S::one(), S::zero(), S::one(), S::zero(), S::zero())
    }

    /// Default symmetry-breaking seed used to hunt asynchronous attractors.
    pub fn asymmetric_seed() -> Self {
        Self::new(lit(1.05), S::zero(), lit(0.95), S::zero(), S::zero())
    }

    /// True when the state lies on the synchronous manifold `r1 = r2, u1 = u2`.
    pub fn is_synchronous(&self) -> bool {
        self.r1 == self.r2 && self.u1 == self.u2
    }

    pub fn to_array(self) -> [S; STATE_DIM] {
        [self.r1, self.u1, self.r2, self.u2, self.theta]
    }

    pub fn from_array(a: [S; STATE_DIM]) -> Self {
        Self {
            r1: a[0],
            u1: a[1],
            r2: a[2],
            u2: a[3],
            theta: a[4],
        }
    }
}

/// Reduce a phase to `[0, 2*pi)`.
pub fn reduce_phase<S: Real>(theta: S) -> S {
    let tau = S::TAU();
    let mut t = theta % tau;
    if t < S::zero() {
        t = t + tau;
    }
    t
}

/// Exchange the two bubbles: `(r1, u1, r2, u2, theta) -> (r2, u2, r1, u1, theta)`.
/// An involution; the vector field is equivariant under it.
pub fn swap<S: Real>(s: &State<S>) -> State<S> {
    State {
        r1: s.r2,
        u1: s.u2,
        r2: s.r1,
        u2: s.u1,
        theta: s.theta,
    }
}

/// Nondimensional wall pressure of one bubble.
///
/// Grouped as `p_gas*(r^(-3g) - 1) + (p_sigma - p_chi)*(1 - 1/r)` plus the
/// velocity and drive terms; since `p_gas = p_0 + p_sigma` this is
/// term-by-term identical to the raw sum of gas, viscous, surface-tension,
/// shell and drive contributions, but cancels exactly at equilibrium.
pub fn wall_pressure<S: Real>(
    dp: &DimensionlessParams<S>,
    r: S,
    u: S,
    theta: S,
) -> Result<S, ModelError> {
    if !(r > S::zero()) {
        return Err(ModelError::NonPositiveRadius {
            index: 0,
            value: r.as_f64(),
        });
    }
    Ok(wall_pressure_unchecked(dp, r, u, theta))
}

#[inline]
fn wall_pressure_unchecked<S: Real>(dp: &DimensionlessParams<S>, r: S, u: S, theta: S) -> S {
    let inv_r = S::one() / r;
    dp.p_gas * (dp.gas_term(r) - S::one()) + (dp.p_sigma - dp.p_chi) * (S::one() - inv_r)
        - dp.c_visc * u * inv_r
        - dp.c_kappa * u * inv_r * inv_r
        - dp.p_drive * theta.sin()
}

/// Radial derivative of the nondimensional wall pressure at fixed `u, theta`.
#[inline]
fn wall_pressure_dr<S: Real>(dp: &DimensionlessParams<S>, r: S, u: S) -> S {
    let inv_r = S::one() / r;
    let inv_r2 = inv_r * inv_r;
    -dp.gas_exp * dp.p_gas * dp.gas_term_deriv(r) + (dp.p_sigma - dp.p_chi) * inv_r2
        + dp.c_visc * u * inv_r2
        + lit::<S>(2.0) * dp.c_kappa * u * inv_r2 * inv_r
}

/// One row of the acceleration system: diagonal mass entry, off-diagonal
/// coupling entry and acceleration-free right-hand side for the bubble with
/// state `(r, u)` whose partner has state `(ro, uo)`.
///
/// Both rows go through this single function so that swapping the bubbles
/// permutes the assembled system bitwise — the source of the exact
/// equivariance and synchronous-manifold invariance of the field.
#[inline]
fn acceleration_row<S: Real>(
    dp: &DimensionlessParams<S>,
    r: S,
    u: S,
    ro: S,
    uo: S,
    sin_theta: S,
    cos_theta: S,
) -> (S, S, S) {
    let inv_r = S::one() / r;
    // Diagonal mass: inertial Keller-Miksis factor plus the acoustic
    // correction -(r/c) dP/dRdot moved to the left-hand side.
    let m_diag = (S::one() - dp.beta * u) * r + dp.c_mass_visc + dp.c_mass_shell * inv_r;
    // Off-diagonal mass: Bjerknes coupling r_other^2 / delta.
    let m_cross = ro * ro * dp.inv_delta;

    let pressure = dp.p_gas * (dp.gas_term(r) - S::one())
        + (dp.p_sigma - dp.p_chi) * (S::one() - inv_r)
        - dp.c_visc * u * inv_r
        - dp.c_kappa * u * inv_r * inv_r
        - dp.p_drive * sin_theta;
    let dp_dr = wall_pressure_dr(dp, r, u);

    let half = lit::<S>(0.5);
    let three = lit::<S>(3.0);
    let rhs = -(three * half) * (S::one() - dp.beta * u / three) * u * u
        + (S::one() + dp.beta * u) * pressure
        + dp.beta * r * (u * dp_dr - dp.big_omega * dp.p_drive * cos_theta)
        - lit::<S>(2.0) * ro * uo * uo * dp.inv_delta;
    (m_diag, m_cross, rhs)
}

/// The 5D vector field `(dr1, du1, dr2, du2, dtheta)/dtau`.
///
/// The two accelerations solve `M * (du1, du2)^T = b`; `M` is checked for
/// singularity against the scale-aware bound `|det M| >= 1e-12 * ||M||_inf^2`.
pub fn vector_field<S: Real>(
    dp: &DimensionlessParams<S>,
    s: &State<S>,
) -> Result<State<S>, ModelError> {
    let mut out = [S::zero(); STATE_DIM];
    vector_field_raw(dp, &s.to_array(), &mut out)?;
    Ok(State::from_array(out))
}

/// Slice-based form of the field, shared with the integrator and the
/// variational system. Layout: `[r1, u1, r2, u2, theta]`.
pub fn vector_field_raw<S: Real>(
    dp: &DimensionlessParams<S>,
    y: &[S],
    dy: &mut [S],
) -> Result<(), ModelError> {
    let (r1, u1, r2, u2, theta) = (y[0], y[1], y[2], y[3], y[4]);
    if !(r1 > S::zero()) {
        return Err(ModelError::NonPositiveRadius {
            index: 1,
            value: r1.as_f64(),
        });
    }
    if !(r2 > S::zero()) {
        return Err(ModelError::NonPositiveRadius {
            index: 2,
            value: r2.as_f64(),
        });
    }
    let (sin_t, cos_t) = (theta.sin(), theta.cos());
    let (m11, m12, b1) = acceleration_row(dp, r1, u1, r2, u2, sin_t, cos_t);
    let (m22, m21, b2) = acceleration_row(dp, r2, u2, r1, u1, sin_t, cos_t);

    let det = m11 * m22 - m12 * m21;
    let norm_inf = (m11.abs() + m12.abs()).max(m21.abs() + m22.abs());
    let threshold = lit::<S>(1e-12) * norm_inf * norm_inf;
    if !(det.abs() >= threshold) {
        return Err(ModelError::SingularMassMatrix {
            det: det.as_f64(),
            threshold: threshold.as_f64(),
        });
    }

    dy[0] = u1;
    dy[1] = (b1 * m22 - m12 * b2) / det;
    dy[2] = u2;
    dy[3] = (m11 * b2 - m21 * b1) / det;
    dy[4] = dp.big_omega;
    Ok(())
}

/// Central finite-difference Jacobian of the vector field, column `j` stepped
/// by `h_j = cbrt(eps) * max(1, |s_j|)`.
pub fn jacobian<S: Real>(
    dp: &DimensionlessParams<S>,
    s: &State<S>,
) -> Result<[[S; STATE_DIM]; STATE_DIM], ModelError> {
    let mut jac = [[S::zero(); STATE_DIM]; STATE_DIM];
    jacobian_raw(dp, &s.to_array(), &mut jac)?;
    Ok(jac)
}

/// Slice-based Jacobian used by the variational system. `y` holds the first
/// `STATE_DIM` components of the (possibly augmented) state.
pub fn jacobian_raw<S: Real>(
    dp: &DimensionlessParams<S>,
    y: &[S],
    jac: &mut [[S; STATE_DIM]; STATE_DIM],
) -> Result<(), ModelError> {
    let mut plus = [S::zero(); STATE_DIM];
    let mut minus = [S::zero(); STATE_DIM];
    let mut yj = [S::zero(); STATE_DIM];
    yj.copy_from_slice(&y[..STATE_DIM]);
    let step_base = S::epsilon().cbrt();
    for j in 0..STATE_DIM {
        let h = step_base * S::one().max(yj[j].abs());
        let center = yj[j];
        yj[j] = center + h;
        vector_field_raw(dp, &yj, &mut plus)?;
        yj[j] = center - h;
        vector_field_raw(dp, &yj, &mut minus)?;
        yj[j] = center;
        let denom = lit::<S>(2.0) * h;
        for i in 0..STATE_DIM {
            jac[i][j] = (plus[i] - minus[i]) / denom;
        }
    }
    Ok(())
}

/// The bubble system packaged for the integrator, with the collapse floor
/// below which the model leaves its validity regime.
#[derive(Debug, Clone, Copy)]
pub struct BubbleSystem<S> {
    pub dp: DimensionlessParams<S>,
    /// Nondimensional radius floor; reaching it is reported as a collapse,
    /// never clamped.
    pub r_floor: S,
}

pub const DEFAULT_R_FLOOR: f64 = 0.05;

impl<S: Real> BubbleSystem<S> {
    pub fn new(dp: DimensionlessParams<S>) -> Self {
        Self {
            dp,
            r_floor: lit(DEFAULT_R_FLOOR),
        }
    }
}

impl<S: Real> OdeSystem<S> for BubbleSystem<S> {
    fn dim(&self) -> usize {
        STATE_DIM
    }

    fn eval(&self, y: &[S], dy: &mut [S]) -> Result<(), ModelError> {
        vector_field_raw(&self.dp, y, dy)
    }

    fn collapsed(&self, y: &[S]) -> bool {
        y[0] <= self.r_floor || y[2] <= self.r_floor
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dp64() -> DimensionlessParams<f64> {
        DimensionlessParams::from_physical(&PhysicalParams::sonovue_1_72um()).unwrap()
    }

    #[test]
    fn natural_frequency_matches_regression_constant() {
        // Independent hand evaluation of the closed form on the preset
        // constants (P_stat = 101.325 kPa).
        let w0 = natural_frequency(&PhysicalParams::<f64>::sonovue_1_72um());
        let expected = 1.9806006189861976e7;
        assert!(
            ((w0 - expected) / expected).abs() < 1e-12,
            "omega0 = {w0:e}"
        );
    }

    #[test]
    fn natural_frequency_free_bubble_limit() {
        let mut p = PhysicalParams::<f64>::sonovue_1_72um();
        p.sigma = 1e-300;
        p.chi = 1e-300;
        let w0 = natural_frequency(&p);
        let minnaert = (3.0 * p.gamma * p.p0() / (p.rho * p.r0 * p.r0)).sqrt();
        assert!(((w0 - minnaert) / minnaert).abs() < 1e-12);
    }

    #[test]
    fn natural_frequency_halves_when_radius_doubles() {
        let mut p = PhysicalParams::<f64>::sonovue_1_72um();
        p.sigma = 1e-300;
        p.chi = 1e-300;
        let w0 = natural_frequency(&p);
        p.r0 = 2.0 * p.r0;
        p.d = 2.0 * p.d;
        let w0_doubled = natural_frequency(&p);
        assert!(((w0 / w0_doubled - 2.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn wall_pressure_vanishes_at_equilibrium() {
        let dp = dp64();
        let p = wall_pressure(&dp, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn wall_pressure_drive_only_at_quarter_phase() {
        let dp = dp64();
        let p = wall_pressure(&dp, 1.0, 0.0, core::f64::consts::FRAC_PI_2).unwrap();
        assert!((p + dp.p_drive).abs() <= 1e-16 * dp.p_drive.abs());
    }

    #[test]
    fn wall_pressure_rejects_nonpositive_radius() {
        let dp = dp64();
        assert!(matches!(
            wall_pressure(&dp, 0.0, 0.0, 0.0),
            Err(ModelError::NonPositiveRadius { .. })
        ));
    }

    /// Term-by-term oracle: evaluate the dimensional wall pressure exactly as
    /// printed (gas, liquid viscosity, surface tension, static, shell
    /// elasticity, shell viscosity, drive) and nondimensionalize afterwards.
    fn wall_pressure_oracle(p: &PhysicalParams<f64>, r: f64, u: f64, theta: f64) -> f64 {
        let w0 = natural_frequency(p);
        let radius = r * p.r0;
        let velocity = u * p.r0 * w0;
        let p0 = p.p0();
        let dim = (p0 + 2.0 * p.sigma / p.r0) * (p.r0 / radius).powf(3.0 * p.gamma)
            - 4.0 * p.eta_l * velocity / radius
            - 2.0 * p.sigma / radius
            - p0
            - 4.0 * p.chi * (1.0 / p.r0 - 1.0 / radius)
            - 4.0 * p.kappa_s * velocity / (radius * radius)
            - p.p_ac * theta.sin();
        dim / (p.rho * p.r0 * p.r0 * w0 * w0)
    }

    #[test]
    fn wall_pressure_matches_term_by_term_oracle() {
        let phys = PhysicalParams::<f64>::sonovue_1_72um();
        let dp = dp64();
        let states = [
            (0.7, -1.3, 0.4),
            (1.3, 2.1, 2.0),
            (0.31, 0.57, 4.9),
            (2.6, -0.04, 6.1),
            (1.0, 5.0, 1.234),
        ];
        for (r, u, theta) in states {
            let got = wall_pressure(&dp, r, u, theta).unwrap();
            let want = wall_pressure_oracle(&phys, r, u, theta);
            assert!(
                (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                "r={r} u={u} theta={theta}: {got:e} vs {want:e}"
            );
        }
    }

    #[test]
    fn field_fixed_point_at_equilibrium_without_drive() {
        let phys = PhysicalParams::sonovue_1_72um().with_p_ac(0.0f64);
        let dp = DimensionlessParams::from_physical(&phys).unwrap();
        let f = vector_field(&dp, &State::equilibrium()).unwrap();
        assert_eq!(f.r1, 0.0);
        assert_eq!(f.r2, 0.0);
        assert!(f.u1.abs() < 1e-12 && f.u2.abs() < 1e-12);
        assert_eq!(f.theta, dp.big_omega);
    }

    #[test]
    fn field_swap_equivariance_is_bitwise() {
        let dp = dp64();
        let states = [
            State::new(1.2, 0.3, 0.8, -0.4, 1.0),
            State::new(0.5, -2.0, 1.7, 0.9, 5.5),
            State::new(1.01, 0.0, 0.99, 0.02, 0.1),
        ];
        for s in states {
            let lhs = vector_field(&dp, &swap(&s)).unwrap();
            let rhs = swap(&vector_field(&dp, &s).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn field_preserves_synchronous_manifold_bitwise() {
        let dp = dp64();
        for (r, u, th) in [(1.1, 0.2, 0.3), (0.6, -1.5, 2.2), (1.9, 0.01, 4.0)] {
            let f = vector_field(&dp, &State::new(r, u, r, u, th)).unwrap();
            assert_eq!(f.r1, f.r2);
            assert_eq!(f.u1, f.u2);
        }
    }

    /// Independent single-bubble Keller-Miksis/de Jong oracle, written
    /// directly from the dimensional wall equation with no coupling.
    fn single_bubble_accel_oracle(p: &PhysicalParams<f64>, r: f64, u: f64, theta: f64) -> f64 {
        let w0 = natural_frequency(p);
        let radius = r * p.r0;
        let vel = u * p.r0 * w0;
        let time = theta / p.omega;
        let p0 = p.p0();
        let pres = (p0 + 2.0 * p.sigma / p.r0) * (p.r0 / radius).powf(3.0 * p.gamma)
            - 4.0 * p.eta_l * vel / radius
            - 2.0 * p.sigma / radius
            - p0
            - 4.0 * p.chi * (1.0 / p.r0 - 1.0 / radius)
            - 4.0 * p.kappa_s * vel / (radius * radius)
            - p.p_ac * (p.omega * time).sin();
        // d/dR of each pressure term; the shell elasticity -4*chi*(1/r0 - 1/R)
        // differentiates to -4*chi/R^2.
        let dp_dr = -(3.0 * p.gamma) * (p0 + 2.0 * p.sigma / p.r0)
            * (p.r0 / radius).powf(3.0 * p.gamma)
            / radius
            + 4.0 * p.eta_l * vel / (radius * radius)
            + 2.0 * p.sigma / (radius * radius)
            - 4.0 * p.chi / (radius * radius)
            + 8.0 * p.kappa_s * vel / (radius * radius * radius);
        let dp_dvel = -4.0 * p.eta_l / radius - 4.0 * p.kappa_s / (radius * radius);
        let dp_dt = -p.p_ac * p.omega * (p.omega * time).cos();
        let mass = (1.0 - vel / p.c) * radius - radius / (p.rho * p.c) * dp_dvel;
        let rhs = -1.5 * (1.0 - vel / (3.0 * p.c)) * vel * vel
            + (1.0 + vel / p.c) * pres / p.rho
            + radius / (p.rho * p.c) * (dp_dr * vel + dp_dt);
        let acc = rhs / mass;
        acc / (p.r0 * w0 * w0)
    }

    #[test]
    fn field_matches_single_bubble_oracle_at_large_distance() {
        let mut phys = PhysicalParams::<f64>::sonovue_1_72um();
        phys.d = 1e12 * phys.r0;
        let dp = DimensionlessParams::from_physical(&phys).unwrap();
        for (r, u, theta) in [(1.1, 0.4, 0.7), (0.8, -0.9, 3.0), (1.6, 0.05, 5.8)] {
            let s = State::new(r, u, 1.0, 0.0, theta);
            let f = vector_field(&dp, &s).unwrap();
            let want = single_bubble_accel_oracle(&phys, r, u, theta);
            assert!(
                (f.u1 - want).abs() <= 1e-9 * want.abs().max(1.0),
                "du1 = {:e}, oracle = {want:e}",
                f.u1
            );
        }
    }

    #[test]
    fn swap_is_an_involution() {
        let s = State::new(1.0f64, 0.0, 2.0, 0.5, 1.3);
        let swapped = swap(&s);
        assert_eq!(swapped, State::new(2.0, 0.5, 1.0, 0.0, 1.3));
        assert_eq!(swap(&swapped), s);
        let sync = State::new(1.1f64, -0.2, 1.1, -0.2, 0.4);
        assert_eq!(swap(&sync), sync);
    }

    #[test]
    fn dimensionless_roundtrip_is_bit_identical() {
        let phys = PhysicalParams::<f64>::sonovue_1_72um();
        let a = DimensionlessParams::from_physical(&phys).unwrap();
        let b = DimensionlessParams::from_physical(&phys).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn jacobian_theta_column_vanishes_without_drive() {
        let phys = PhysicalParams::sonovue_1_72um().with_p_ac(0.0f64);
        let dp = DimensionlessParams::from_physical(&phys).unwrap();
        let j = jacobian(&dp, &State::equilibrium()).unwrap();
        for row in &j {
            assert_eq!(row[4], 0.0);
        }
        // theta-dot is constant: its row is zero everywhere.
        for col in 0..STATE_DIM {
            assert_eq!(j[4][col], 0.0);
        }
    }

    #[test]
    fn jacobian_radius_rows_are_trivial() {
        let dp = dp64();
        let j = jacobian(&dp, &State::new(1.2, 0.3, 0.9, -0.2, 2.0)).unwrap();
        assert!((j[0][1] - 1.0).abs() < 1e-8);
        for col in [0usize, 2, 3, 4] {
            assert!(j[0][col].abs() < 1e-8);
        }
        assert!((j[2][3] - 1.0).abs() < 1e-8);
        for col in [0usize, 1, 2, 4] {
            assert!(j[2][col].abs() < 1e-8);
        }
    }

    #[test]
    fn jacobian_agrees_with_richardson_oracle() {
        let dp = dp64();
        let s = State::new(1.15, 0.45, 0.85, -0.35, 1.9);
        let j = jacobian(&dp, &s).unwrap();
        // Richardson-extrapolated central differences at h and h/2.
        let y = s.to_array();
        let base = f64::EPSILON.cbrt();
        for jcol in 0..STATE_DIM {
            let col_fd = |h: f64| -> [f64; STATE_DIM] {
                let mut plus = [0.0; STATE_DIM];
                let mut minus = [0.0; STATE_DIM];
                let mut yj = y;
                yj[jcol] = y[jcol] + h;
                vector_field_raw(&dp, &yj, &mut plus).unwrap();
                yj[jcol] = y[jcol] - h;
                vector_field_raw(&dp, &yj, &mut minus).unwrap();
                core::array::from_fn(|i| (plus[i] - minus[i]) / (2.0 * h))
            };
            let h = base * y[jcol].abs().max(1.0);
            let d_h = col_fd(h);
            let d_h2 = col_fd(h / 2.0);
            for i in 0..STATE_DIM {
                let richardson = (4.0 * d_h2[i] - d_h[i]) / 3.0;
                let scale = richardson.abs().max(1.0);
                assert!(
                    (j[i][jcol] - richardson).abs() <= 1e-6 * scale,
                    "J[{i}][{jcol}] = {:e} vs {:e}",
                    j[i][jcol],
                    richardson
                );
            }
        }
    }

    #[test]
    fn mass_matrix_diagonally_dominant_at_equilibrium() {
        // |M11 M22| > |M12 M21| at (1,0,1,0,.) whenever d/r0 > 2.
        for ratio in [2.05, 2.5, 3.0, 5.0, 10.0, 20.0, 40.0] {
            let phys = PhysicalParams::<f64>::sonovue_1_72um().with_d_over_r0(ratio);
            let dp = DimensionlessParams::from_physical(&phys).unwrap();
            let (m11, m12, _) = super::acceleration_row(&dp, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0);
            assert!(
                m11 * m11 > m12 * m12,
                "not dominant at d/r0 = {ratio}: diag {m11}, cross {m12}"
            );
        }
    }

    #[test]
    fn works_in_single_precision() {
        let phys = PhysicalParams::<f32>::sonovue_1_72um().with_p_ac(0.0);
        let dp = DimensionlessParams::from_physical(&phys).unwrap();
        let f = vector_field(&dp, &State::equilibrium()).unwrap();
        assert!(f.u1.abs() < 1e-5 && f.u2.abs() < 1e-5);
        assert_eq!(f.theta, dp.big_omega);
    }
}
