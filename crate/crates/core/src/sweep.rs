//! Parameter-space exploration: 1D bifurcation scans with attractor
//! continuation, 2D Lyapunov charts with leaf-exposing seeding strategies,
//! and multistability probing at a point.
//!
//! Work units (chart cells under fixed seeding, rows/columns under sweep
//! seeding, ensemble members in a probe) are independent and dispatched to a
//! rayon pool; results are assembled by grid index, so output does not depend
//! on scheduling order. Continuation along a sweep axis is inherently
//! sequential.

use rayon::prelude::*;

use crate::classify::{classify, RegimeClass};
use crate::error::SweepError;
use crate::integrator::StepControl;
use crate::lyapunov::{two_largest, LyapunovSettings};
use crate::model::{DimensionlessParams, PhysicalParams, State};
use crate::poincare::{
    distinct, fingerprint_with, section, Fingerprint, SectionSeries, DEFAULT_DISTINCT_TOL,
    DEFAULT_POINT_TOL, DEFAULT_P_MAX,
};
use crate::real::{lit, Real};

/// Which control parameter a scan varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptParam {
    DOverR0,
    PAc,
}

impl SweptParam {
    pub const fn name(self) -> &'static str {
        match self {
            SweptParam::DOverR0 => "d_over_r0",
            SweptParam::PAc => "p_ac",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "d_over_r0" => Some(SweptParam::DOverR0),
            "p_ac" => Some(SweptParam::PAc),
            _ => None,
        }
    }

    fn apply<S: Real>(self, base: &PhysicalParams<S>, value: S) -> PhysicalParams<S> {
        match self {
            SweptParam::DOverR0 => base.with_d_over_r0(value),
            SweptParam::PAc => base.with_p_ac(value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// How each scan step gets its initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Seeding<S> {
    /// Each step starts from the previous step's final state; follows one
    /// attractor branch across bifurcations.
    Continuation { start: State<S> },
    /// Every step restarts from the same initial condition; finds basin
    /// switches instead of following a branch.
    Fresh { ic: State<S> },
}

/// Detection tolerances shared by scans, charts and probes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionTols<S> {
    /// Point tolerance for period detection on the section.
    pub point_tol: S,
    /// Largest period searched for.
    pub p_max: u32,
    /// Synchronous-manifold deviation threshold.
    pub sync_tol: S,
    /// Zero band for exponent sign decisions.
    pub zero_eps: S,
    /// Attractor-cloud distance for `distinct`.
    pub distinct_tol: S,
}

impl<S: Real> Default for DetectionTols<S> {
    fn default() -> Self {
        Self {
            point_tol: lit(DEFAULT_POINT_TOL),
            p_max: DEFAULT_P_MAX,
            sync_tol: lit(crate::classify::DEFAULT_SYNC_TOL),
            zero_eps: lit(crate::classify::DEFAULT_ZERO_EPS),
            distinct_tol: lit(DEFAULT_DISTINCT_TOL),
        }
    }
}

/// A 1D bifurcation scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec<S> {
    /// All parameters except the swept one, including the fixed control
    /// parameter's value.
    pub base: PhysicalParams<S>,
    pub swept: SweptParam,
    pub from: S,
    pub to: S,
    /// Number of scan rows (values are evenly spaced over `[from, to]`).
    pub steps: usize,
    pub direction: Direction,
    pub seeding: Seeding<S>,
    /// Section samples recorded per row (the bifurcation-tree ordinates).
    pub poincare_samples: usize,
    pub lyapunov: LyapunovSettings,
    pub ctl: StepControl<S>,
    pub tols: DetectionTols<S>,
}

impl<S: Real> ScanSpec<S> {
    pub fn validate(&self) -> Result<(), SweepError> {
        self.base.validate()?;
        if !(self.from < self.to) {
            return Err(SweepError::InvalidSpec(format!(
                "empty range [{}, {}]",
                self.from, self.to
            )));
        }
        if self.steps < 1 {
            return Err(SweepError::InvalidSpec("steps must be >= 1".into()));
        }
        if self.poincare_samples < 1 {
            return Err(SweepError::InvalidSpec(
                "poincare_samples must be >= 1".into(),
            ));
        }
        if !(self.from > S::zero()) {
            return Err(SweepError::InvalidSpec(
                "swept parameter must stay positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    /// The trajectory collapsed (or the integrator gave up); recorded and
    /// skipped, the scan continues.
    Collapsed,
    /// The spectrum/fingerprint combination violated a structural rule.
    InconsistentClass,
}

/// One scan row / chart cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow<S> {
    /// Swept parameter value (scans) or `(d_over_r0, p_ac)` via the chart.
    pub value: S,
    pub lambda1: S,
    pub lambda2: S,
    pub stderr1: S,
    pub stderr2: S,
    pub class: Option<RegimeClass<S>>,
    pub detected_period: Option<u32>,
    pub sync_deviation: S,
    /// `r1` at each section sample: the bifurcation-tree ordinates.
    pub poincare_r1: Vec<S>,
    /// Initial state this row was integrated from.
    pub seed: State<S>,
    /// State on the attractor after sampling; seeds the next continuation
    /// step.
    pub final_state: Option<State<S>>,
    pub status: RowStatus,
}

/// Shared per-point pipeline: exponents, section, fingerprint, class.
fn scan_point<S: Real>(
    dp: &DimensionlessParams<S>,
    seed: &State<S>,
    value: S,
    poincare_samples: usize,
    set: &LyapunovSettings,
    ctl: &StepControl<S>,
    tols: &DetectionTols<S>,
) -> ScanRow<S> {
    let collapsed_row = |lambda: Option<(S, S, S, S)>| ScanRow {
        value,
        lambda1: lambda.map_or(S::nan(), |l| l.0),
        lambda2: lambda.map_or(S::nan(), |l| l.1),
        stderr1: lambda.map_or(S::nan(), |l| l.2),
        stderr2: lambda.map_or(S::nan(), |l| l.3),
        class: None,
        detected_period: None,
        sync_deviation: S::nan(),
        poincare_r1: Vec::new(),
        seed: *seed,
        final_state: None,
        status: RowStatus::Collapsed,
    };

    let tl = match two_largest(dp, seed, ctl, set) {
        Ok(tl) => tl,
        Err(_) => return collapsed_row(None),
    };
    let series = match section(dp, &tl.final_state, ctl, 0, poincare_samples) {
        Ok(s) => s,
        Err(_) => return collapsed_row(Some((tl.lambda1, tl.lambda2, tl.stderr1, tl.stderr2))),
    };
    let fp = fingerprint_with(&series, tols.point_tol, tols.p_max);
    let (class, status) = match classify(
        tl.lambda1,
        tl.lambda2,
        tl.stderr1,
        tl.stderr2,
        tols.zero_eps,
        fp.sync_deviation,
        tols.sync_tol,
    ) {
        Ok(c) => (Some(c), RowStatus::Ok),
        Err(_) => (None, RowStatus::InconsistentClass),
    };
    ScanRow {
        value,
        lambda1: tl.lambda1,
        lambda2: tl.lambda2,
        stderr1: tl.stderr1,
        stderr2: tl.stderr2,
        class,
        detected_period: fp.detected_period,
        sync_deviation: fp.sync_deviation,
        poincare_r1: series.points.iter().map(|p| p[0]).collect(),
        seed: *seed,
        final_state: series.last_state(),
        status,
    }
}

fn linspace<S: Real>(from: S, to: S, n: usize) -> Vec<S> {
    if n == 1 {
        return vec![from];
    }
    let step = (to - from) / S::from_usize(n - 1).unwrap();
    (0..n)
        .map(|i| {
            if i == n - 1 {
                to
            } else {
                from + S::from_usize(i).unwrap() * step
            }
        })
        .collect()
}

/// Step the swept parameter across its range, computing exponents, section
/// samples and a classification per row. Under continuation seeding each
/// step starts from the previous step's final state; collapsed rows are
/// recorded with a status flag and the last good state seeds the next row.
/// Rows are returned in scan order (reversed range under `Backward`).
pub fn bifurcation_scan<S: Real>(spec: &ScanSpec<S>) -> Result<Vec<ScanRow<S>>, SweepError> {
    spec.validate()?;
    let mut values = linspace(spec.from, spec.to, spec.steps);
    if spec.direction == Direction::Backward {
        values.reverse();
    }
    let mut seed = match spec.seeding {
        Seeding::Continuation { start } => start,
        Seeding::Fresh { ic } => ic,
    };
    let mut rows = Vec::with_capacity(spec.steps);
    for value in values {
        let phys = spec.swept.apply(&spec.base, value);
        let dp = DimensionlessParams::from_physical(&phys)?;
        let row = scan_point(
            &dp,
            &seed,
            value,
            spec.poincare_samples,
            &spec.lyapunov,
            &spec.ctl,
            &spec.tols,
        );
        match spec.seeding {
            Seeding::Continuation { .. } => {
                if let Some(fs) = row.final_state {
                    seed = fs;
                }
            }
            Seeding::Fresh { ic } => seed = ic,
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Seeding strategy for a 2D chart. The sweep variants run continuation
/// scans along rows or columns; starting from different edges exposes
/// different multistability leaves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChartSeeding<S> {
    /// Every cell starts from the same state; cells are independent
    /// (embarrassingly parallel).
    Fixed(State<S>),
    /// Continuation along increasing `d/r0`, rows in parallel.
    SweepRight,
    /// Continuation along decreasing `d/r0`.
    SweepLeft,
    /// Continuation along increasing `p_ac`, columns in parallel.
    SweepUp,
    /// Continuation along decreasing `p_ac`.
    SweepDown,
}

/// One axis of a chart grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec<S> {
    pub from: S,
    pub to: S,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec<S> {
    pub base: PhysicalParams<S>,
    pub d_over_r0: AxisSpec<S>,
    pub p_ac: AxisSpec<S>,
    pub seeding: ChartSeeding<S>,
    /// Start state of each sweep row/column (and the pre-transient state of
    /// every cell under `Fixed` seeding via that variant's payload).
    pub initial: State<S>,
    pub poincare_samples: usize,
    pub lyapunov: LyapunovSettings,
    pub ctl: StepControl<S>,
    pub tols: DetectionTols<S>,
}

impl<S: Real> ChartSpec<S> {
    pub fn validate(&self) -> Result<(), SweepError> {
        self.base.validate()?;
        for (name, ax) in [("d_over_r0", &self.d_over_r0), ("p_ac", &self.p_ac)] {
            if ax.cells < 1 {
                return Err(SweepError::InvalidSpec(format!("{name}: need >= 1 cell")));
            }
            if ax.cells > 1 && !(ax.from < ax.to) {
                return Err(SweepError::InvalidSpec(format!(
                    "{name}: empty range [{}, {}]",
                    ax.from, ax.to
                )));
            }
            if !(ax.from > S::zero()) {
                return Err(SweepError::InvalidSpec(format!(
                    "{name}: range must be positive"
                )));
            }
        }
        Ok(())
    }
}

/// A chart cell: a [`ScanRow`] tagged with both parameter values.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartCell<S> {
    pub d_over_r0: S,
    pub p_ac: S,
    pub row: ScanRow<S>,
}

/// 2D array over `(d/r0, p_ac)` holding spectra and classes. Cells are
/// stored row-major: index `ip * nd + id` with `id` along `d_values` and
/// `ip` along `p_values` (both ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct ChartGrid<S> {
    pub d_values: Vec<S>,
    pub p_values: Vec<S>,
    pub cells: Vec<ChartCell<S>>,
}

impl<S: Real> ChartGrid<S> {
    pub fn cell(&self, id: usize, ip: usize) -> &ChartCell<S> {
        &self.cells[ip * self.d_values.len() + id]
    }

    /// Cell whose center is closest to `(d_over_r0, p_ac)`.
    pub fn nearest(&self, d_over_r0: S, p_ac: S) -> &ChartCell<S> {
        let id = nearest_index(&self.d_values, d_over_r0);
        let ip = nearest_index(&self.p_values, p_ac);
        self.cell(id, ip)
    }
}

fn nearest_index<S: Real>(values: &[S], x: S) -> usize {
    values
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (*a.1 - x)
                .abs()
                .partial_cmp(&(*b.1 - x).abs())
                .unwrap()
        })
        .map(|(i, _)| i)
        .unwrap()
}

/// Fill every cell of the grid with `(lambda1, lambda2, class)`.
/// Deterministic given the spec, regardless of worker scheduling.
pub fn chart2d<S: Real>(spec: &ChartSpec<S>) -> Result<ChartGrid<S>, SweepError> {
    spec.validate()?;
    let d_values = linspace(spec.d_over_r0.from, spec.d_over_r0.to, spec.d_over_r0.cells);
    let p_values = linspace(spec.p_ac.from, spec.p_ac.to, spec.p_ac.cells);
    let nd = d_values.len();
    let np = p_values.len();

    let cell_at = |id: usize, ip: usize, seed: &State<S>| -> Result<ChartCell<S>, SweepError> {
        let phys = spec
            .base
            .with_d_over_r0(d_values[id])
            .with_p_ac(p_values[ip]);
        let dp = DimensionlessParams::from_physical(&phys)?;
        let row = scan_point(
            &dp,
            seed,
            d_values[id],
            spec.poincare_samples,
            &spec.lyapunov,
            &spec.ctl,
            &spec.tols,
        );
        Ok(ChartCell {
            d_over_r0: d_values[id],
            p_ac: p_values[ip],
            row,
        })
    };

    let cells: Result<Vec<ChartCell<S>>, SweepError> = match spec.seeding {
        ChartSeeding::Fixed(ic) => (0..nd * np)
            .into_par_iter()
            .map(|idx| cell_at(idx % nd, idx / nd, &ic))
            .collect(),
        ChartSeeding::SweepRight | ChartSeeding::SweepLeft => {
            let reversed = spec.seeding == ChartSeeding::SweepLeft;
            let rows: Result<Vec<Vec<ChartCell<S>>>, SweepError> = (0..np)
                .into_par_iter()
                .map(|ip| {
                    let mut seed = spec.initial;
                    let mut row_cells = Vec::with_capacity(nd);
                    let ids: Vec<usize> = if reversed {
                        (0..nd).rev().collect()
                    } else {
                        (0..nd).collect()
                    };
                    for id in ids {
                        let cell = cell_at(id, ip, &seed)?;
                        if let Some(fs) = cell.row.final_state {
                            seed = fs;
                        }
                        row_cells.push(cell);
                    }
                    if reversed {
                        row_cells.reverse();
                    }
                    Ok(row_cells)
                })
                .collect();
            rows.map(|rows| rows.into_iter().flatten().collect())
        }
        ChartSeeding::SweepUp | ChartSeeding::SweepDown => {
            let reversed = spec.seeding == ChartSeeding::SweepDown;
            let cols: Result<Vec<Vec<ChartCell<S>>>, SweepError> = (0..nd)
                .into_par_iter()
                .map(|id| {
                    let mut seed = spec.initial;
                    let mut col_cells = Vec::with_capacity(np);
                    let ips: Vec<usize> = if reversed {
                        (0..np).rev().collect()
                    } else {
                        (0..np).collect()
                    };
                    for ip in ips {
                        let cell = cell_at(id, ip, &seed)?;
                        if let Some(fs) = cell.row.final_state {
                            seed = fs;
                        }
                        col_cells.push(cell);
                    }
                    if reversed {
                        col_cells.reverse();
                    }
                    Ok(col_cells)
                })
                .collect();
            // Transpose columns into row-major order.
            cols.map(|cols| {
                let mut out = Vec::with_capacity(nd * np);
                for ip in 0..np {
                    for col in cols.iter() {
                        out.push(col[ip].clone());
                    }
                }
                out
            })
        }
    };

    Ok(ChartGrid {
        d_values,
        p_values,
        cells: cells?,
    })
}

/// One distinct attractor found by a probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeAttractor<S> {
    pub fingerprint: Fingerprint<S>,
    pub class: Option<RegimeClass<S>>,
    pub inconsistent: bool,
    /// Representative section cloud.
    pub series: SectionSeries<S>,
    pub lambda1: S,
    pub lambda2: S,
    /// Seed that reached this attractor first.
    pub seed: State<S>,
    /// Number of ensemble seeds that landed on this attractor (swap-images
    /// merged).
    pub basin_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport<S> {
    pub attractors: Vec<ProbeAttractor<S>>,
    /// Seeds whose trajectories collapsed, dropped from the attractor list.
    pub collapsed_seeds: Vec<State<S>>,
}

/// Integrate every ensemble seed to its attractor, fingerprint it, and
/// deduplicate with [`distinct`] (swap-image pairs count as one attractor).
/// The ensemble must contain at least one synchronous seed (`r1 = r2`,
/// `u1 = u2`) and one asymmetric seed.
pub fn probe_multistability<S: Real>(
    base: &PhysicalParams<S>,
    d_over_r0: S,
    p_ac: S,
    ensemble: &[State<S>],
    ctl: &StepControl<S>,
    set: &LyapunovSettings,
    tols: &DetectionTols<S>,
) -> Result<ProbeReport<S>, SweepError> {
    if ensemble.is_empty()
        || !ensemble.iter().any(|s| s.is_synchronous())
        || !ensemble.iter().any(|s| !s.is_synchronous())
    {
        return Err(SweepError::BadEnsemble);
    }
    let phys = base.with_d_over_r0(d_over_r0).with_p_ac(p_ac);
    let dp = DimensionlessParams::from_physical(&phys)?;

    struct SeedRun<S> {
        seed: State<S>,
        lambda1: S,
        lambda2: S,
        stderr1: S,
        stderr2: S,
        series: SectionSeries<S>,
    }

    let runs: Vec<Result<SeedRun<S>, State<S>>> = ensemble
        .par_iter()
        .map(|seed| {
            let tl = two_largest(&dp, seed, ctl, set).map_err(|_| *seed)?;
            // Enough samples for period detection up to p_max and a dense
            // cloud for the distinct() comparison.
            let samples = (4 * tols.p_max as usize).max(256);
            let series = section(&dp, &tl.final_state, ctl, 0, samples).map_err(|_| *seed)?;
            Ok(SeedRun {
                seed: *seed,
                lambda1: tl.lambda1,
                lambda2: tl.lambda2,
                stderr1: tl.stderr1,
                stderr2: tl.stderr2,
                series,
            })
        })
        .collect();

    let mut attractors: Vec<ProbeAttractor<S>> = Vec::new();
    let mut collapsed = Vec::new();
    for run in runs {
        let run = match run {
            Ok(r) => r,
            Err(seed) => {
                collapsed.push(seed);
                continue;
            }
        };
        let mut merged = false;
        for known in &mut attractors {
            if !distinct(&known.series, &run.series, tols.distinct_tol)? {
                known.basin_count += 1;
                merged = true;
                break;
            }
        }
        if merged {
            continue;
        }
        let fp = fingerprint_with(&run.series, tols.point_tol, tols.p_max);
        let (class, inconsistent) = match classify(
            run.lambda1,
            run.lambda2,
            run.stderr1,
            run.stderr2,
            tols.zero_eps,
            fp.sync_deviation,
            tols.sync_tol,
        ) {
            Ok(c) => (Some(c), false),
            Err(_) => (None, true),
        };
        attractors.push(ProbeAttractor {
            fingerprint: fp,
            class,
            inconsistent,
            series: run.series,
            lambda1: run.lambda1,
            lambda2: run.lambda2,
            seed: run.seed,
            basin_count: 1,
        });
    }
    Ok(ProbeReport {
        attractors,
        collapsed_seeds: collapsed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lyapunov::two_largest;

    fn fast_settings() -> LyapunovSettings {
        LyapunovSettings {
            transient_periods: 20,
            average_periods: 200,
            renorm_interval: 1.0,
            convergence_window: 0.5,
        }
    }

    fn base_spec() -> ScanSpec<f64> {
        ScanSpec {
            base: PhysicalParams::sonovue_1_72um().with_p_ac(1.7e6),
            swept: SweptParam::DOverR0,
            from: 6.5,
            to: 7.0,
            steps: 3,
            direction: Direction::Forward,
            seeding: Seeding::Continuation {
                start: State::equilibrium(),
            },
            poincare_samples: 16,
            lyapunov: fast_settings(),
            ctl: StepControl::default(),
            tols: DetectionTols::default(),
        }
    }

    #[test]
    fn single_step_scan_equals_direct_calls() {
        let spec = ScanSpec {
            steps: 1,
            ..base_spec()
        };
        let rows = bifurcation_scan(&spec).unwrap();
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert_eq!(row.value, 6.5);

        let phys = spec.base.with_d_over_r0(6.5);
        let dp = DimensionlessParams::from_physical(&phys).unwrap();
        let tl = two_largest(&dp, &State::equilibrium(), &spec.ctl, &spec.lyapunov).unwrap();
        assert_eq!(row.lambda1, tl.lambda1);
        assert_eq!(row.lambda2, tl.lambda2);
        let series = section(&dp, &tl.final_state, &spec.ctl, 0, 16).unwrap();
        assert_eq!(row.poincare_r1.len(), 16);
        assert_eq!(row.poincare_r1[0], series.points[0][0]);
    }

    #[test]
    fn scan_is_deterministic_and_direction_aware() {
        let spec = base_spec();
        let a = bifurcation_scan(&spec).unwrap();
        let b = bifurcation_scan(&spec).unwrap();
        assert_eq!(a, b);

        let back = bifurcation_scan(&ScanSpec {
            direction: Direction::Backward,
            ..base_spec()
        })
        .unwrap();
        let values: Vec<f64> = back.iter().map(|r| r.value).collect();
        assert_eq!(values, vec![7.0, 6.75, 6.5]);
    }

    #[test]
    fn degenerate_chart_equals_single_point() {
        let spec = ChartSpec {
            base: PhysicalParams::sonovue_1_72um(),
            d_over_r0: AxisSpec {
                from: 6.75,
                to: 6.75,
                cells: 1,
            },
            p_ac: AxisSpec {
                from: 1.7e6,
                to: 1.7e6,
                cells: 1,
            },
            seeding: ChartSeeding::Fixed(State::equilibrium()),
            initial: State::equilibrium(),
            poincare_samples: 16,
            lyapunov: fast_settings(),
            ctl: StepControl::default(),
            tols: DetectionTols::default(),
        };
        let grid = chart2d(&spec).unwrap();
        assert_eq!(grid.cells.len(), 1);

        let phys = spec.base.with_d_over_r0(6.75).with_p_ac(1.7e6);
        let dp = DimensionlessParams::from_physical(&phys).unwrap();
        let tl = two_largest(&dp, &State::equilibrium(), &spec.ctl, &spec.lyapunov).unwrap();
        assert_eq!(grid.cells[0].row.lambda1, tl.lambda1);
        assert_eq!(grid.cells[0].row.lambda2, tl.lambda2);
    }

    #[test]
    fn probe_requires_mixed_ensemble() {
        let base = PhysicalParams::<f64>::sonovue_1_72um();
        let only_sync = [State::equilibrium()];
        let err = probe_multistability(
            &base,
            6.75,
            1.7e6,
            &only_sync,
            &StepControl::default(),
            &fast_settings(),
            &DetectionTols::default(),
        )
        .unwrap_err();
        assert!(matches!(err, SweepError::BadEnsemble));
    }

    #[test]
    fn probe_merges_swap_pair_seeds() {
        // {s, swap(s)} plus a synchronous seed at a strongly periodic point:
        // the swap pair lands on one attractor (trivially multistable pair).
        let base = PhysicalParams::<f64>::sonovue_1_72um();
        let asym = State::asymmetric_seed();
        let ensemble = [State::equilibrium(), asym, crate::model::swap(&asym)];
        let report = probe_multistability(
            &base,
            6.75,
            1.7e6,
            &ensemble,
            &StepControl::default(),
            &LyapunovSettings::with_periods(100, 400),
            &DetectionTols::default(),
        )
        .unwrap();
        assert!(report.collapsed_seeds.is_empty());
        assert_eq!(
            report.attractors.len(),
            1,
            "expected one attractor, got {:?}",
            report
                .attractors
                .iter()
                .map(|a| (a.lambda1, a.lambda2, a.basin_count))
                .collect::<Vec<_>>()
        );
        assert_eq!(report.attractors[0].basin_count, 3);
    }
}
