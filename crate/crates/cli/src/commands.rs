use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nk_cloud::analytic::{fit_cloud_line, Prediction, SaIntegrand};
use nk_cloud::battery::{
    format_beta, format_table, run_battery, BatteryConfig, BatteryRun, RowKind,
};
use nk_cloud::cloud::{
    bin_count, build_equilibrium_limit_cloud, build_fitness_cloud, build_hamming_cloud,
    build_limit_cloud, build_limit_snapshots, estimate_beta, estimate_beta_star, offspring_fitness,
    Equilibrium,
};
use nk_cloud::export::{
    write_analytic_csv, write_cloud_csv, write_points_csv, write_trajectory_csv, BetaReport,
};
use nk_cloud::heuristics::run_heuristic;
use nk_cloud::space::{check_enumerable, enumerate_fitness};
use nk_cloud::{
    Beta, BetaEstimate, CloudSummary, CoolingSchedule, Error, Genotype, HeuristicSpec, NkLandscape,
    Result, SearchSpace,
};
use serde::Serialize;

use crate::{
    AnalyticArgs, BinArgs, CloudArgs, GenArgs, HeuristicArgs, HeuristicName, LandscapeArgs,
    LimitArgs, PredictionName, TableArgs,
};

/// Resolved settings of one invocation, written as `config.json` before
/// any compute so the run can be repeated exactly.
#[derive(Serialize)]
struct ExperimentConfig {
    command: &'static str,
    n: usize,
    k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    landscape_seed: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    landscape_seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    landscape_file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    heuristic: Option<HeuristicSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    prediction: Option<Prediction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    budget: Option<Budget>,
    #[serde(skip_serializing_if = "Option::is_none")]
    snapshots: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bin_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    accuracy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples_per_genotype: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    battery: Option<BatteryConfig>,
    outputs: Vec<PathBuf>,
}

impl ExperimentConfig {
    fn new(command: &'static str, n: usize, k: usize) -> Self {
        Self {
            command,
            n,
            k,
            landscape_seed: None,
            landscape_seeds: Vec::new(),
            landscape_file: None,
            heuristic: None,
            prediction: None,
            budget: None,
            snapshots: None,
            bin_width: None,
            accuracy: None,
            samples_per_genotype: None,
            battery: None,
            outputs: Vec::new(),
        }
    }

    fn write(&self, path: &Path) -> Result<()> {
        let mut w = create(path)?;
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Copy, Serialize)]
#[serde(rename_all = "snake_case")]
enum Budget {
    Generations(usize),
    Equilibrium(Equilibrium),
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

fn check_bins(bins: &BinArgs) -> Result<()> {
    bin_count(bins.bin_width)?;
    if !(bins.accuracy > 0.0 && bins.accuracy.is_finite()) {
        return Err(Error::Parameter(format!(
            "accuracy {} must be > 0",
            bins.accuracy
        )));
    }
    Ok(())
}

fn load_landscape(args: &LandscapeArgs) -> Result<NkLandscape> {
    match &args.landscape {
        Some(path) => NkLandscape::load(path).map_err(|e| match e {
            Error::Io(io) => Error::Io(std::io::Error::new(
                io.kind(),
                format!("{}: {io}", path.display()),
            )),
            other => other,
        }),
        None => NkLandscape::generate(args.n, args.k, args.seed),
    }
}

fn heuristic_spec(args: &HeuristicArgs) -> Result<HeuristicSpec> {
    if args.temp.is_some() && args.heuristic != HeuristicName::Sa {
        return Err(Error::Parameter(
            "--temp only applies to --heuristic sa".into(),
        ));
    }
    let seed = args.rng_seed;
    let spec = match args.heuristic {
        HeuristicName::RandomWalk => HeuristicSpec::RandomWalk { seed },
        HeuristicName::Mhc => HeuristicSpec::Mhc,
        HeuristicName::Sa => HeuristicSpec::SaFixed {
            temperature: args
                .temp
                .ok_or_else(|| Error::Parameter("--heuristic sa needs --temp".into()))?,
            seed,
        },
        HeuristicName::SaCooling => HeuristicSpec::SaCooling {
            cooling: CoolingSchedule {
                t_start: args.t_start,
                t_factor: args.t_factor,
                epoch_length: args.epoch_length,
                total_generations: args.cooling_generations,
                t_floor: args.t_floor,
            },
            seed,
        },
        HeuristicName::Nhc => HeuristicSpec::Nhc { seed },
    };
    spec.validate()?;
    Ok(spec)
}

fn default_budget(spec: &HeuristicSpec, generations: Option<usize>) -> Budget {
    match (generations, spec) {
        (Some(g), _) => Budget::Generations(g),
        (None, HeuristicSpec::Mhc) => Budget::Generations(50),
        (None, HeuristicSpec::SaCooling { cooling, .. }) => {
            Budget::Generations(cooling.total_generations)
        }
        (None, _) => Budget::Equilibrium(Equilibrium::default()),
    }
}

fn limit_cloud_with(
    space: &SearchSpace,
    spec: &HeuristicSpec,
    budget: Budget,
) -> Result<(CloudSummary, usize)> {
    match budget {
        Budget::Generations(g) => Ok((build_limit_cloud(space, spec, g)?, g)),
        Budget::Equilibrium(rule) => build_equilibrium_limit_cloud(space, spec, &rule),
    }
}

fn prediction_for(spec: &HeuristicSpec) -> Prediction {
    match spec {
        HeuristicSpec::RandomWalk { .. } => Prediction::Hamming,
        HeuristicSpec::Mhc => Prediction::Mhc,
        HeuristicSpec::SaFixed { temperature, .. } => Prediction::Sa {
            temperature: *temperature,
            integrand: SaIntegrand::Metropolis,
        },
        HeuristicSpec::SaCooling { cooling, .. } => Prediction::Sa {
            temperature: cooling.t_start,
            integrand: SaIntegrand::Metropolis,
        },
        HeuristicSpec::Nhc { .. } => Prediction::Nhc,
    }
}

fn no_beta(accuracy: f64) -> BetaEstimate {
    BetaEstimate {
        beta: None,
        beta_star: None,
        method: None,
        accuracy,
    }
}

// Writes the limit cloud even when no β* can be read off it.
fn try_beta_star(fcstar: &CloudSummary, beta: &BetaEstimate) -> Result<BetaEstimate> {
    match estimate_beta_star(fcstar, beta) {
        Err(Error::Data(reason)) => {
            eprintln!("warning: {reason}; beta* left empty");
            Ok(*beta)
        }
        other => other,
    }
}

fn print_estimate(name: &str, e: &BetaEstimate) {
    let star = e
        .beta_star
        .map(|b| format!("{b:.3}"))
        .unwrap_or_else(|| "-".into());
    println!("{name}: beta {} beta* {star}", format_beta(e.beta));
}

pub fn gen(args: GenArgs) -> Result<()> {
    if args.enumerate {
        check_enumerable(args.n)?;
    }
    let mut config = ExperimentConfig::new("gen", args.n, args.k);
    config.landscape_seed = Some(args.seed);
    config.outputs.push(args.out.clone());
    let landscape = NkLandscape::generate(args.n, args.k, args.seed)?;
    config.write(&args.out.with_extension("config.json"))?;
    landscape.save(&args.out)?;
    print!("n {} k {} seed {}", args.n, args.k, args.seed);
    if args.enumerate {
        print!(" max-fitness {:.6}", enumerate_fitness(&landscape)?.max());
    }
    println!();
    Ok(())
}

pub fn cloud(args: CloudArgs) -> Result<()> {
    check_bins(&args.bins)?;
    if args.samples == 0 {
        return Err(Error::Parameter("--samples must be >= 1".into()));
    }
    let landscape = load_landscape(&args.landscape)?;
    check_enumerable(landscape.n())?;
    let spec = if args.hamming {
        None
    } else {
        Some(heuristic_spec(&args.heuristic)?)
    };
    let budget = spec
        .as_ref()
        .filter(|_| !args.no_limit)
        .map(|s| default_budget(s, args.generations));
    let dir = &args.bins.out_dir;

    let mut config = ExperimentConfig::new("cloud", landscape.n(), landscape.k());
    config.landscape_seed = Some(landscape.seed());
    config.landscape_file = args.landscape.landscape.clone();
    config.heuristic = spec;
    config.budget = budget;
    config.bin_width = Some(args.bins.bin_width);
    config.accuracy = Some(args.bins.accuracy);
    config.samples_per_genotype = spec.map(|_| args.samples);
    config.outputs = vec![dir.join("fc.csv"), dir.join("beta.json")];
    if budget.is_some() {
        config.outputs.push(dir.join("fcstar.csv"));
    }
    if args.raw_points {
        config.outputs.push(dir.join("points.csv"));
    }
    if args.analytic {
        config.outputs.push(dir.join("analytic.csv"));
    }
    config.write(&dir.join("config.json"))?;

    let space = SearchSpace::build(&landscape, args.bins.bin_width)?;
    let fc = match &spec {
        None => build_hamming_cloud(&space)?,
        Some(s) => build_fitness_cloud(&space, s, args.samples)?,
    };
    write_with(&dir.join("fc.csv"), |w| write_cloud_csv(&fc, w))?;

    if args.raw_points {
        let parents = space.table().values();
        write_with(&dir.join("points.csv"), |w| match &spec {
            None => {
                let n = landscape.n();
                let (p, o): (Vec<f64>, Vec<f64>) = parents
                    .iter()
                    .enumerate()
                    .flat_map(|(u, &f)| (0..n).map(move |i| (f, parents[u ^ (1 << i)])))
                    .unzip();
                write_points_csv(&p, &o, w)
            }
            Some(s) => write_points_csv(parents, &offspring_fitness(&space, s, args.samples)?, w),
        })?;
    }

    if args.analytic {
        let prediction = spec.as_ref().map_or(Prediction::Hamming, prediction_for);
        let curve = fc
            .confident_bins()
            .map(|b| {
                Ok((
                    b.center,
                    prediction.mean(b.center, landscape.n(), landscape.k())?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        write_with(&dir.join("analytic.csv"), |w| {
            write_analytic_csv(&prediction, landscape.n(), landscape.k(), &curve, w)
        })?;
    }

    let mut estimate = estimate_beta(&fc, args.bins.accuracy)?;
    let mut generations = None;
    if let (Some(s), Some(b)) = (&spec, budget) {
        let (fcstar, g) = limit_cloud_with(&space, s, b)?;
        write_with(&dir.join("fcstar.csv"), |w| write_cloud_csv(&fcstar, w))?;
        estimate = try_beta_star(&fcstar, &estimate)?;
        generations = Some(g);
    }
    let label = spec.map_or_else(|| "hamming".to_string(), |s| s.label());
    let report = BetaReport::new(&estimate, &label, landscape.seed(), generations);
    write_with(&dir.join("beta.json"), |w| report.to_writer(w))?;

    let fit = fit_cloud_line(&fc)?;
    println!(
        "fit: slope {:.4} intercept {:.4} fixed point {:.4}",
        fit.slope,
        fit.intercept,
        fit.fixed_point()
    );
    print_estimate(&label, &estimate);
    Ok(())
}

pub fn limit_cloud(args: LimitArgs) -> Result<()> {
    check_bins(&args.bins)?;
    let landscape = load_landscape(&args.landscape)?;
    check_enumerable(landscape.n())?;
    let spec = heuristic_spec(&args.heuristic)?;
    let start = args
        .trace_start
        .map(|i| Genotype::new(i, landscape.n()))
        .transpose()?;
    let mut snapshots = args.snapshots.clone();
    if let Some(s) = &mut snapshots {
        if s.is_empty() {
            return Err(Error::Parameter(
                "--snapshots needs at least one generation".into(),
            ));
        }
        s.sort_unstable();
        s.dedup();
    }
    let budget = default_budget(&spec, args.generations);
    let dir = &args.bins.out_dir;

    let mut config = ExperimentConfig::new("limit-cloud", landscape.n(), landscape.k());
    config.landscape_seed = Some(landscape.seed());
    config.landscape_file = args.landscape.landscape.clone();
    config.heuristic = Some(spec);
    config.bin_width = Some(args.bins.bin_width);
    config.accuracy = Some(args.bins.accuracy);
    config.outputs.push(dir.join("fc.csv"));
    match &snapshots {
        Some(s) => {
            for g in s {
                config.outputs.push(dir.join(format!("fcstar_g{g}.csv")));
                config.outputs.push(dir.join(format!("beta_g{g}.json")));
            }
        }
        None => {
            config.budget = Some(budget);
            config.outputs.push(dir.join("fcstar.csv"));
            config.outputs.push(dir.join("beta.json"));
        }
    }
    config.snapshots = snapshots.clone();
    if start.is_some() {
        config.outputs.push(dir.join("trajectory.csv"));
    }
    config.write(&dir.join("config.json"))?;

    let space = SearchSpace::build(&landscape, args.bins.bin_width)?;
    let fc = build_fitness_cloud(&space, &spec, 1)?;
    write_with(&dir.join("fc.csv"), |w| write_cloud_csv(&fc, w))?;
    // Cooling runs have no single one-step cloud, so β* is always a plateau.
    let beta = match spec {
        HeuristicSpec::SaCooling { .. } => no_beta(args.bins.accuracy),
        _ => estimate_beta(&fc, args.bins.accuracy)?,
    };
    let label = spec.label();

    let trace_len = match &snapshots {
        Some(s) => {
            let clouds = build_limit_snapshots(&space, &spec, s)?;
            for (&g, fcstar) in s.iter().zip(&clouds) {
                let estimate = try_beta_star(fcstar, &beta)?;
                write_with(&dir.join(format!("fcstar_g{g}.csv")), |w| {
                    write_cloud_csv(fcstar, w)
                })?;
                let report = BetaReport::new(&estimate, &label, landscape.seed(), Some(g));
                write_with(&dir.join(format!("beta_g{g}.json")), |w| {
                    report.to_writer(w)
                })?;
                print_estimate(&format!("{label} generation {g}"), &estimate);
            }
            *s.last().expect("nonempty")
        }
        None => {
            let (fcstar, g) = limit_cloud_with(&space, &spec, budget)?;
            let estimate = try_beta_star(&fcstar, &beta)?;
            write_with(&dir.join("fcstar.csv"), |w| write_cloud_csv(&fcstar, w))?;
            let report = BetaReport::new(&estimate, &label, landscape.seed(), Some(g));
            write_with(&dir.join("beta.json"), |w| report.to_writer(w))?;
            print_estimate(&format!("{label} generation {g}"), &estimate);
            g
        }
    };

    if let Some(g0) = start {
        let trajectory = run_heuristic(&space, &spec, g0, trace_len)?;
        write_with(&dir.join("trajectory.csv"), |w| {
            write_trajectory_csv(&trajectory, w)
        })?;
    }
    Ok(())
}

pub fn analytic(args: AnalyticArgs) -> Result<()> {
    let needs_temp = matches!(
        args.heuristic,
        PredictionName::Sa | PredictionName::SaPrinted
    );
    if args.temp.is_some() && !needs_temp {
        return Err(Error::Parameter(
            "--temp only applies to sa and sa-printed".into(),
        ));
    }
    let temperature = || {
        args.temp
            .ok_or_else(|| Error::Parameter("sa predictions need --temp".into()))
    };
    let prediction = match args.heuristic {
        PredictionName::Hamming => Prediction::Hamming,
        PredictionName::Mhc => Prediction::Mhc,
        PredictionName::Sa => Prediction::Sa {
            temperature: temperature()?,
            integrand: SaIntegrand::Metropolis,
        },
        PredictionName::SaPrinted => Prediction::Sa {
            temperature: temperature()?,
            integrand: SaIntegrand::Printed,
        },
        PredictionName::Nhc => Prediction::Nhc,
    };
    // Validates n, k, temperature and step before anything is written.
    prediction.mean(0.5, args.n, args.k)?;
    if !(args.step > 0.0 && args.step <= 1.0) {
        return Err(Error::Parameter(format!(
            "--step {} outside (0, 1]",
            args.step
        )));
    }
    let out = args.out_dir.join("analytic.csv");
    let mut config = ExperimentConfig::new("analytic", args.n, args.k);
    config.prediction = Some(prediction);
    config.outputs.push(out.clone());
    config.write(&args.out_dir.join("config.json"))?;

    let curve = prediction.curve(args.n, args.k, args.step)?;
    write_with(&out, |w| {
        write_analytic_csv(&prediction, args.n, args.k, &curve, w)
    })?;
    match prediction.fixed_point(args.n, args.k)? {
        Some(p) => println!("{}: fixed point {p:.4}", prediction.name()),
        None => println!("{}: no fixed point on [0, 1]", prediction.name()),
    }
    Ok(())
}

fn row_slug(kind: RowKind) -> String {
    match kind {
        RowKind::Mhc => "mhc".into(),
        RowKind::SaFixed { temperature } => format!("sa_t{temperature:.2}"),
        RowKind::SaCooling { generation } => format!("sa_cooling_g{generation}"),
        RowKind::Nhc => "nhc".into(),
    }
}

#[derive(Serialize)]
struct RowReport {
    row: String,
    #[serde(flatten)]
    kind: RowKind,
    beta: Option<Beta>,
    beta_star: Option<f64>,
    method: Option<nk_cloud::EstimateMethod>,
    generations: usize,
}

#[derive(Serialize)]
struct SeedReport {
    landscape_seed: u64,
    max_fitness: f64,
    mhc_slope: f64,
    mhc_intercept: f64,
    rows: Vec<RowReport>,
}

#[derive(Serialize)]
struct EnsembleRow {
    row: String,
    /// Mean over seeds where β is a point.
    mean_beta: Option<f64>,
    point_beta_seeds: usize,
    mean_beta_star: Option<f64>,
    beta_star_seeds: usize,
}

#[derive(Serialize)]
struct TableReport {
    n: usize,
    k: usize,
    seeds: Vec<SeedReport>,
    ensemble: Vec<EnsembleRow>,
    mean_max_fitness: f64,
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

fn ensemble(runs: &[BatteryRun]) -> Vec<EnsembleRow> {
    runs[0]
        .rows
        .iter()
        .map(|template| {
            let rows: Vec<_> = runs.iter().filter_map(|r| r.row(template.kind)).collect();
            let betas: Vec<f64> = rows
                .iter()
                .filter_map(|r| match r.estimate.beta {
                    Some(Beta::Point(b)) => Some(b),
                    _ => None,
                })
                .collect();
            let stars: Vec<f64> = rows.iter().filter_map(|r| r.estimate.beta_star).collect();
            EnsembleRow {
                row: template.kind.label(),
                mean_beta: mean(&betas),
                point_beta_seeds: betas.len(),
                mean_beta_star: mean(&stars),
                beta_star_seeds: stars.len(),
            }
        })
        .collect()
}

fn seed_report(run: &BatteryRun) -> SeedReport {
    SeedReport {
        landscape_seed: run.landscape_seed,
        max_fitness: run.max_fitness,
        mhc_slope: run.mhc_fit.slope,
        mhc_intercept: run.mhc_fit.intercept,
        rows: run
            .rows
            .iter()
            .map(|r| RowReport {
                row: r.kind.label(),
                kind: r.kind,
                beta: r.estimate.beta,
                beta_star: r.estimate.beta_star,
                method: r.estimate.method,
                generations: r.generations,
            })
            .collect(),
    }
}

fn format_ensemble(rows: &[EnsembleRow], seeds: usize) -> String {
    let cell = |x: Option<f64>, count: usize| match x {
        Some(v) if count == seeds => format!("{v:.3}"),
        Some(v) => format!("{v:.3} ({count}/{seeds})"),
        None => "-".into(),
    };
    let mut out = format!(
        "mean over {seeds} seeds\n{:<22} {:>16} {:>16}\n",
        "metaheuristic", "beta", "beta*"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<22} {:>16} {:>16}\n",
            r.row,
            cell(r.mean_beta, r.point_beta_seeds),
            cell(r.mean_beta_star, r.beta_star_seeds)
        ));
    }
    out
}

pub fn reproduce_table1(args: TableArgs) -> Result<()> {
    check_bins(&args.bins)?;
    check_enumerable(args.n)?;
    let seeds = match args.seed {
        Some(s) => vec![s],
        None => args.seeds.clone(),
    };
    if seeds.is_empty() {
        return Err(Error::Parameter("no landscape seeds given".into()));
    }
    let battery = BatteryConfig {
        n: args.n,
        k: args.k,
        bin_width: args.bins.bin_width,
        accuracy: args.bins.accuracy,
        rng_seed: args.rng_seed,
        ..Default::default()
    };
    // Generating checks n and k before the sidecar is written.
    NkLandscape::generate(args.n, args.k, seeds[0])?;
    let dir = &args.bins.out_dir;
    let mut config = ExperimentConfig::new("reproduce-table1", args.n, args.k);
    config.landscape_seeds = seeds.clone();
    config.battery = Some(battery.clone());
    config.outputs = vec![dir.join("table1.json"), dir.join("table1.txt")];
    if !args.no_clouds {
        config
            .outputs
            .extend(seeds.iter().map(|s| dir.join(format!("seed_{s}"))));
    }
    config.write(&dir.join("config.json"))?;

    let mut runs = Vec::new();
    let mut text = String::new();
    for &seed in &seeds {
        eprintln!("landscape seed {seed}...");
        let run = run_battery(seed, &battery)?;
        if !args.no_clouds {
            let seed_dir = dir.join(format!("seed_{seed}"));
            for row in &run.rows {
                let slug = row_slug(row.kind);
                if let Some(fc) = &row.fc {
                    write_with(&seed_dir.join(format!("{slug}_fc.csv")), |w| {
                        write_cloud_csv(fc, w)
                    })?;
                }
                write_with(&seed_dir.join(format!("{slug}_fcstar.csv")), |w| {
                    write_cloud_csv(&row.fcstar, w)
                })?;
            }
        }
        let table = format_table(&run);
        print!("{table}");
        println!();
        text.push_str(&table);
        text.push('\n');
        runs.push(run);
    }
    let ensemble = ensemble(&runs);
    if runs.len() > 1 {
        let summary = format_ensemble(&ensemble, runs.len());
        print!("{summary}");
        text.push_str(&summary);
    }
    let report = TableReport {
        n: args.n,
        k: args.k,
        seeds: runs.iter().map(seed_report).collect(),
        ensemble,
        mean_max_fitness: mean(&runs.iter().map(|r| r.max_fitness).collect::<Vec<_>>())
            .expect("at least one seed"),
    };
    write_with(&dir.join("table1.json"), |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        writeln!(w)?;
        Ok(())
    })?;
    fs::write(dir.join("table1.txt"), text)?;
    Ok(())
}
