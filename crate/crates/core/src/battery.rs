//! The full β / β* battery on one landscape: mHC, SA at three fixed
//! temperatures, SA with cooling (several snapshots) and nHC.

use serde::{Deserialize, Serialize};

use crate::analytic::{fit_cloud_line, RegressionFit};
use crate::cloud::{
    build_equilibrium_limit_cloud, build_fitness_cloud, build_limit_cloud, build_limit_snapshots,
    estimate_beta, estimate_beta_star, Beta, BetaEstimate, CloudSummary, Equilibrium,
    EstimateMethod, DEFAULT_ACCURACY, DEFAULT_BIN_WIDTH,
};
use crate::error::{Error, Result};
use crate::heuristics::{CoolingSchedule, HeuristicSpec};
use crate::landscape::NkLandscape;
use crate::space::SearchSpace;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryConfig {
    pub n: usize,
    pub k: usize,
    pub bin_width: f64,
    pub accuracy: f64,
    /// Seed of every heuristic's random streams.
    pub rng_seed: u64,
    pub mhc_generations: usize,
    pub temperatures: Vec<f64>,
    /// Stopping rule for the fixed-temperature SA and nHC limit runs.
    pub equilibrium: Equilibrium,
    pub cooling: CoolingSchedule,
    pub snapshots: Vec<usize>,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self {
            n: 20,
            k: 15,
            bin_width: DEFAULT_BIN_WIDTH,
            accuracy: DEFAULT_ACCURACY,
            rng_seed: 0,
            mhc_generations: 50,
            temperatures: vec![0.10, 0.05, 0.01],
            equilibrium: Equilibrium::default(),
            cooling: CoolingSchedule::default(),
            snapshots: vec![50, 1000, 1900, 2450],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "row", rename_all = "snake_case")]
pub enum RowKind {
    Mhc,
    SaFixed { temperature: f64 },
    SaCooling { generation: usize },
    Nhc,
}

impl RowKind {
    pub fn label(&self) -> String {
        match self {
            RowKind::Mhc => "mHC".into(),
            RowKind::SaFixed { temperature } => format!("SA (T={temperature:.2})"),
            RowKind::SaCooling { generation } => format!("SA (Generation {generation})"),
            RowKind::Nhc => "nHC".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryRow {
    pub kind: RowKind,
    pub estimate: BetaEstimate,
    /// Generations behind the limit cloud.
    pub generations: usize,
    /// One-step cloud (absent for cooling snapshots, where β is not used).
    pub fc: Option<CloudSummary>,
    pub fcstar: CloudSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryRun {
    pub landscape_seed: u64,
    pub max_fitness: f64,
    pub mhc_fit: RegressionFit,
    pub rows: Vec<BatteryRow>,
}

impl BatteryRun {
    pub fn row(&self, kind: RowKind) -> Option<&BatteryRow> {
        self.rows.iter().find(|r| r.kind == kind)
    }

    pub fn beta_star(&self, kind: RowKind) -> Option<f64> {
        self.row(kind).and_then(|r| r.estimate.beta_star)
    }
}

fn limit_row(
    space: &SearchSpace,
    kind: RowKind,
    spec: &HeuristicSpec,
    fixed_generations: Option<usize>,
    cfg: &BatteryConfig,
) -> Result<BatteryRow> {
    let fc = build_fitness_cloud(space, spec, 1)?;
    let beta = estimate_beta(&fc, cfg.accuracy)?;
    let (fcstar, generations) = match fixed_generations {
        Some(g) => (build_limit_cloud(space, spec, g)?, g),
        None => build_equilibrium_limit_cloud(space, spec, &cfg.equilibrium)?,
    };
    let estimate = star_or_none(&fcstar, &beta)?;
    Ok(BatteryRow {
        kind,
        estimate,
        generations,
        fc: Some(fc),
        fcstar,
    })
}

// A limit cloud with no readable β* leaves the cell empty.
fn star_or_none(fcstar: &CloudSummary, beta: &BetaEstimate) -> Result<BetaEstimate> {
    match estimate_beta_star(fcstar, beta) {
        Err(Error::Data(_)) => Ok(*beta),
        other => other,
    }
}

/// Runs every row on the landscape generated from `landscape_seed`.
pub fn run_battery(landscape_seed: u64, cfg: &BatteryConfig) -> Result<BatteryRun> {
    let landscape = NkLandscape::generate(cfg.n, cfg.k, landscape_seed)?;
    let space = SearchSpace::build(&landscape, cfg.bin_width)?;
    run_battery_on(&space, landscape_seed, cfg)
}

pub fn run_battery_on(
    space: &SearchSpace,
    landscape_seed: u64,
    cfg: &BatteryConfig,
) -> Result<BatteryRun> {
    let seed = cfg.rng_seed;
    let mut rows = Vec::new();

    let mhc = limit_row(
        space,
        RowKind::Mhc,
        &HeuristicSpec::Mhc,
        Some(cfg.mhc_generations),
        cfg,
    )?;
    let mhc_fit = fit_cloud_line(mhc.fc.as_ref().expect("mHC row has its FC"))?;
    rows.push(mhc);

    for &temperature in &cfg.temperatures {
        let spec = HeuristicSpec::SaFixed { temperature, seed };
        rows.push(limit_row(
            space,
            RowKind::SaFixed { temperature },
            &spec,
            None,
            cfg,
        )?);
    }

    let cooling = HeuristicSpec::SaCooling {
        cooling: cfg.cooling,
        seed,
    };
    let no_beta = BetaEstimate {
        beta: None,
        beta_star: None,
        method: None,
        accuracy: cfg.accuracy,
    };
    let snapshots = build_limit_snapshots(space, &cooling, &cfg.snapshots)?;
    for (&generation, fcstar) in cfg.snapshots.iter().zip(snapshots) {
        rows.push(BatteryRow {
            kind: RowKind::SaCooling { generation },
            estimate: star_or_none(&fcstar, &no_beta)?,
            generations: generation,
            fc: None,
            fcstar,
        });
    }

    rows.push(limit_row(
        space,
        RowKind::Nhc,
        &HeuristicSpec::Nhc { seed },
        None,
        cfg,
    )?);

    Ok(BatteryRun {
        landscape_seed,
        max_fitness: space.table().max(),
        mhc_fit,
        rows,
    })
}

/// `0.645`, `[0.604, 0.792]` or `-`.
pub fn format_beta(beta: Option<Beta>) -> String {
    match beta {
        Some(Beta::Point(b)) => format!("{b:.3}"),
        Some(Beta::Interval([lo, hi])) => format!("[{lo:.3}, {hi:.3}]"),
        None => "-".into(),
    }
}

/// Text table with one line per row, like the published summary.
pub fn format_table(run: &BatteryRun) -> String {
    let mut out = format!(
        "landscape seed {}: maximum fitness {:.3}\n{:<22} {:>16} {:>9}\n",
        run.landscape_seed, run.max_fitness, "metaheuristic", "beta", "beta*"
    );
    for row in &run.rows {
        let beta = match row.kind {
            RowKind::SaCooling { .. } => "-".to_string(),
            _ => format_beta(row.estimate.beta),
        };
        let star = row
            .estimate
            .beta_star
            .map(|b| format!("{b:.3}"))
            .unwrap_or_else(|| "-".into());
        let marker = if row.estimate.method == Some(EstimateMethod::Plateau) {
            " (plateau)"
        } else {
            ""
        };
        out.push_str(&format!(
            "{:<22} {:>16} {:>9}{marker}\n",
            row.kind.label(),
            beta,
            star
        ));
    }
    out
}
