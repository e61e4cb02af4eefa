// Scratch diagnostics for calibrating against published exponent values.
use bubblechaos::integrator::StepControl;
use bubblechaos::lyapunov::{spectrum, LyapunovSettings};
use bubblechaos::model::{DimensionlessParams, PhysicalParams, State};
use bubblechaos::poincare::{fingerprint, section};

fn run_dp(tag: &str, phys: &PhysicalParams<f64>, seed: State<f64>) {
    let ctl = StepControl::default();
    let set = LyapunovSettings::with_periods(400, 3000);
    let dp = DimensionlessParams::from_physical(phys).unwrap();
    match spectrum(&dp, &seed, &ctl, &set) {
        Ok(res) => {
            let series = section(&dp, &res.final_state, &ctl, 0, 256).unwrap();
            let fp = fingerprint(&series);
            println!(
                "{tag}: nt=[{:+.4}, {:+.4}, {:+.4}, {:+.4}] per={:?} sync={:.1e}",
                res.nontrivial[0],
                res.nontrivial[1],
                res.nontrivial[2],
                res.nontrivial[3],
                fp.detected_period,
                fp.sync_deviation,
            );
        }
        Err(e) => println!("{tag}: ERROR {e}"),
    }
}

fn main() {
    let sono = PhysicalParams::<f64>::sonovue_1_72um();
    // Anchors: (6.75, 1.7) sync 2-cycle, paper (-0.1437, -0.2057);
    //          (9.85, 1.7) sync chaos, paper (0.0501, -0.1339, -0.3733, -0.4881).
    let candidates: Vec<(&str, Box<dyn Fn(PhysicalParams<f64>) -> PhysicalParams<f64>>)> = vec![
        ("base          ", Box::new(|p| p)),
        ("eta 2e-3      ", Box::new(|mut p| { p.eta_l = 2e-3; p })),
        ("eta 4e-3      ", Box::new(|mut p| { p.eta_l = 4e-3; p })),
        ("kap 5e-9      ", Box::new(|mut p| { p.kappa_s = 5e-9; p })),
        ("kap 7.2e-9    ", Box::new(|mut p| { p.kappa_s = 7.2e-9; p })),
        ("eta2e-3 kap5e9", Box::new(|mut p| { p.eta_l = 2e-3; p.kappa_s = 5e-9; p })),
        ("omega Hz      ", Box::new(|mut p| { p.omega = 2.87e7 * core::f64::consts::TAU; p })),
        ("omega 2.87e6  ", Box::new(|mut p| { p.omega = 2.87e6; p })),
    ];
    for (tag, f) in &candidates {
        let i = f(sono.with_d_over_r0(6.75).with_p_ac(1.7e6));
        run_dp(&format!("i  {tag}"), &i, State::equilibrium());
        let kl = f(sono.with_d_over_r0(9.85).with_p_ac(1.7e6));
        run_dp(&format!("kl {tag}"), &kl, State::equilibrium());
    }
}
