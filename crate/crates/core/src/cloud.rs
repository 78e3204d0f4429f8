//! Fitness Clouds (one step) and Limit Fitness Clouds (many steps) over an
//! enumerated space, binned by parent fitness, and the β / β* estimators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heuristics::{HeuristicSpec, Stepper, StreamRng};
use crate::par;
use crate::space::{FitnessSource, SearchSpace};

pub const DEFAULT_BIN_WIDTH: f64 = 0.002;
pub const DEFAULT_ACCURACY: f64 = 0.002;

/// Bins holding fewer points than this are flagged and skipped by the estimators.
pub const LOW_CONFIDENCE_COUNT: usize = 5;

/// Number of bins covering `[0, 1]`.
pub fn bin_count(bin_width: f64) -> Result<usize> {
    if !(bin_width > 0.0 && bin_width <= 1.0) {
        return Err(Error::param(format!(
            "bin width {bin_width} outside (0, 1]"
        )));
    }
    Ok(((1.0 / bin_width).ceil() as usize).max(1))
}

/// `floor(f / bin_width)`, with `f = 1` folded into the last bin.
pub fn bin_fitness(f: f64, bin_width: f64) -> Result<usize> {
    let bins = bin_count(bin_width)?;
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::param(format!("fitness {f} outside [0, 1]")));
    }
    Ok(((f / bin_width).floor() as usize).min(bins - 1))
}

pub fn bin_center(bin: usize, bin_width: f64) -> f64 {
    (bin as f64 + 0.5) * bin_width
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CloudKind {
    Fc,
    FcStar,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CloudBin {
    pub bin: usize,
    pub center: f64,
    pub f_min: f64,
    pub f_max: f64,
    pub f_mean: f64,
    /// Population standard deviation (divides by `count`).
    pub f_std: f64,
    pub count: usize,
    pub low_confidence: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CloudSummary {
    pub bin_width: f64,
    pub kind: CloudKind,
    pub heuristic: String,
    /// Trajectory length behind an FC*; `None` for one-step clouds.
    pub generations: Option<usize>,
    /// Nonempty bins in ascending order.
    pub bins: Vec<CloudBin>,
}

impl CloudSummary {
    pub fn total_count(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }

    /// Bins trusted by the estimators.
    pub fn confident_bins(&self) -> impl Iterator<Item = &CloudBin> {
        self.bins.iter().filter(|b| !b.low_confidence)
    }

    /// Aggregates `(parent, offspring)` points by parent bin. `points` is
    /// called twice (sums, then squared deviations) and must yield the same
    /// sequence both times.
    pub fn from_points<I, F>(
        bin_width: f64,
        kind: CloudKind,
        heuristic: impl Into<String>,
        generations: Option<usize>,
        points: F,
    ) -> Result<Self>
    where
        F: Fn() -> I,
        I: Iterator<Item = (f64, f64)>,
    {
        #[derive(Clone, Copy)]
        struct Acc {
            count: usize,
            sum: f64,
            min: f64,
            max: f64,
            sq: f64,
        }
        let nbins = bin_count(bin_width)?;
        let mut acc = vec![
            Acc {
                count: 0,
                sum: 0.0,
                min: f64::INFINITY,
                max: f64::NEG_INFINITY,
                sq: 0.0,
            };
            nbins
        ];
        for (parent, child) in points() {
            let a = &mut acc[bin_fitness(parent, bin_width)?];
            a.count += 1;
            a.sum += child;
            a.min = a.min.min(child);
            a.max = a.max.max(child);
        }
        for (parent, child) in points() {
            let a = &mut acc[bin_fitness(parent, bin_width)?];
            let d = child - a.sum / a.count as f64;
            a.sq += d * d;
        }
        let bins = acc
            .iter()
            .enumerate()
            .filter(|(_, a)| a.count > 0)
            .map(|(bin, a)| {
                let n = a.count as f64;
                CloudBin {
                    bin,
                    center: bin_center(bin, bin_width),
                    f_min: a.min,
                    f_max: a.max,
                    f_mean: (a.sum / n).clamp(a.min, a.max),
                    f_std: (a.sq / n).sqrt(),
                    count: a.count,
                    low_confidence: a.count < LOW_CONFIDENCE_COUNT,
                }
            })
            .collect();
        Ok(Self {
            bin_width,
            kind,
            heuristic: heuristic.into(),
            generations,
            bins,
        })
    }
}

/// Offspring fitness of every genotype after one step of `spec`. With
/// `samples_per_genotype > 1` the samples are averaged per genotype.
pub fn offspring_fitness(
    space: &SearchSpace,
    spec: &HeuristicSpec,
    samples_per_genotype: usize,
) -> Result<Vec<f64>> {
    if samples_per_genotype == 0 {
        return Err(Error::param("samples_per_genotype must be >= 1"));
    }
    let stepper = Stepper::new(space, spec)?;
    let samples = if spec.is_deterministic() {
        1
    } else {
        samples_per_genotype
    };
    Ok(par::collect_indexed(space.len(), |u| {
        let mut rng = stepper.rng_for(u as u64);
        let total: f64 = (0..samples)
            .map(|_| space.fitness_at(stepper.step(u as u64, 0, &mut rng)))
            .sum();
        total / samples as f64
    }))
}

pub fn build_fitness_cloud(
    space: &SearchSpace,
    spec: &HeuristicSpec,
    samples_per_genotype: usize,
) -> Result<CloudSummary> {
    let offspring = offspring_fitness(space, spec, samples_per_genotype)?;
    let parents = space.table().values();
    CloudSummary::from_points(space.bin_width(), CloudKind::Fc, spec.label(), None, || {
        parents.iter().copied().zip(offspring.iter().copied())
    })
}

/// Cloud over every one-bit-flip neighbor of every genotype (N * 2^N points).
pub fn build_hamming_cloud(space: &SearchSpace) -> Result<CloudSummary> {
    let n = space.n();
    let values = space.table().values();
    CloudSummary::from_points(space.bin_width(), CloudKind::Fc, "hamming", None, || {
        values
            .iter()
            .enumerate()
            .flat_map(move |(u, &f)| (0..n).map(move |i| (f, values[u ^ (1usize << i)])))
    })
}

/// Stopping rule for limit runs whose length the caller does not fix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    /// Generations between population-mean checks.
    pub window: usize,
    /// Stop once the population mean moves less than this over one window.
    pub tolerance: f64,
    pub max_generations: usize,
}

impl Default for Equilibrium {
    fn default() -> Self {
        Self {
            window: 50,
            tolerance: 1e-4,
            max_generations: 5000,
        }
    }
}

#[derive(Clone)]
struct Walker {
    at: u64,
    rng: StreamRng,
}

/// Whole-space batch of trajectories, one per start genotype, advanced in
/// lock-step blocks. Each trajectory owns its stream, so results do not
/// depend on how the blocks are scheduled.
struct Population<'a> {
    space: &'a SearchSpace,
    stepper: Stepper<'a, SearchSpace>,
    walkers: Vec<Walker>,
    generation: usize,
}

impl<'a> Population<'a> {
    fn new(space: &'a SearchSpace, spec: &HeuristicSpec) -> Result<Self> {
        let stepper = Stepper::new(space, spec)?;
        let walkers = (0..space.len() as u64)
            .map(|u| Walker {
                at: u,
                rng: stepper.rng_for(u),
            })
            .collect();
        Ok(Self {
            space,
            stepper,
            walkers,
            generation: 0,
        })
    }

    fn advance_to(&mut self, target: usize) -> Result<()> {
        self.stepper.check_generations(target)?;
        if target <= self.generation {
            return Ok(());
        }
        let (from, stepper) = (self.generation, &self.stepper);
        par::for_each_indexed(&mut self.walkers, |_, w| {
            for generation in from..target {
                w.at = stepper.step(w.at, generation, &mut w.rng);
            }
        });
        self.generation = target;
        Ok(())
    }

    fn fitnesses(&self) -> Vec<f64> {
        self.walkers
            .iter()
            .map(|w| self.space.fitness_at(w.at))
            .collect()
    }

    fn mean_fitness(&self) -> f64 {
        self.walkers
            .iter()
            .map(|w| self.space.fitness_at(w.at))
            .sum::<f64>()
            / self.walkers.len() as f64
    }
}

/// Final fitness f*(g) of the trajectory from every genotype g.
pub fn limit_fitness(
    space: &SearchSpace,
    spec: &HeuristicSpec,
    generations: usize,
) -> Result<Vec<f64>> {
    let mut pop = Population::new(space, spec)?;
    pop.advance_to(generations)?;
    Ok(pop.fitnesses())
}

fn limit_summary(
    space: &SearchSpace,
    spec: &HeuristicSpec,
    generations: usize,
    limit: &[f64],
) -> Result<CloudSummary> {
    let parents = space.table().values();
    CloudSummary::from_points(
        space.bin_width(),
        CloudKind::FcStar,
        spec.label(),
        Some(generations),
        || parents.iter().copied().zip(limit.iter().copied()),
    )
}

pub fn build_limit_cloud(
    space: &SearchSpace,
    spec: &HeuristicSpec,
    generations: usize,
) -> Result<CloudSummary> {
    let limit = limit_fitness(space, spec, generations)?;
    limit_summary(space, spec, generations, &limit)
}

/// One FC* per snapshot generation, all taken from a single run.
pub fn build_limit_snapshots(
    space: &SearchSpace,
    spec: &HeuristicSpec,
    snapshots: &[usize],
) -> Result<Vec<CloudSummary>> {
    let mut order: Vec<usize> = snapshots.to_vec();
    order.sort_unstable();
    order.dedup();
    let mut pop = Population::new(space, spec)?;
    let mut by_generation = Vec::with_capacity(order.len());
    for &g in &order {
        pop.advance_to(g)?;
        let limit = pop.fitnesses();
        by_generation.push((g, limit_summary(space, spec, g, &limit)?));
    }
    Ok(snapshots
        .iter()
        .map(|s| {
            by_generation
                .iter()
                .find(|(g, _)| g == s)
                .map(|(_, c)| c.clone())
                .expect("every snapshot was computed")
        })
        .collect())
}

/// Runs until [`Equilibrium`] is met; returns the cloud and the generation
/// count actually used.
pub fn build_equilibrium_limit_cloud(
    space: &SearchSpace,
    spec: &HeuristicSpec,
    rule: &Equilibrium,
) -> Result<(CloudSummary, usize)> {
    if rule.window == 0 {
        return Err(Error::param("equilibrium window must be >= 1"));
    }
    let mut pop = Population::new(space, spec)?;
    let mut previous = pop.mean_fitness();
    while pop.generation < rule.max_generations {
        let next = (pop.generation + rule.window).min(rule.max_generations);
        pop.advance_to(next)?;
        let mean = pop.mean_fitness();
        let settled = (mean - previous).abs() < rule.tolerance;
        previous = mean;
        if settled {
            break;
        }
    }
    let generations = pop.generation;
    let limit = pop.fitnesses();
    Ok((
        limit_summary(space, spec, generations, &limit)?,
        generations,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Beta {
    Point(f64),
    Interval([f64; 2]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    PointCrossing,
    DiagonalInterval,
    Plateau,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaEstimate {
    pub beta: Option<Beta>,
    pub beta_star: Option<f64>,
    /// How the most recent quantity was obtained: β's method, or `plateau`
    /// once β* came from plateau detection.
    pub method: Option<EstimateMethod>,
    pub accuracy: f64,
}

fn require_kind(cloud: &CloudSummary, kind: CloudKind) -> Result<()> {
    if cloud.kind != kind {
        return Err(Error::param(format!(
            "expected a {kind:?} cloud, got {:?}",
            cloud.kind
        )));
    }
    Ok(())
}

/// Longest run of consecutive items satisfying `keep`; returns the index
/// range into `items` (first such run on ties).
fn longest_run<T>(items: &[T], keep: impl Fn(&T) -> bool) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut start = None;
    for i in 0..=items.len() {
        let inside = i < items.len() && keep(&items[i]);
        match (inside, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                if best.is_none_or(|(a, b)| i - s > b - a) {
                    best = Some((s, i));
                }
                start = None;
            }
            _ => {}
        }
    }
    best
}

/// Where FC_mean meets the diagonal.
///
/// Scans confident bins in ascending order for a sign change of
/// `f_mean - center` and interpolates linearly between the two bin centers.
/// A sign change only counts when the curve leaves the `accuracy` band on
/// both sides of it, in opposite directions; a curve that merely runs along
/// the diagonal flips sign on noise alone. Without such a crossing, reports
/// the longest run of bins within `accuracy` of the diagonal; with neither,
/// `beta` is `None`.
pub fn estimate_beta(fc: &CloudSummary, accuracy: f64) -> Result<BetaEstimate> {
    require_kind(fc, CloudKind::Fc)?;
    let bins: Vec<&CloudBin> = fc.confident_bins().collect();
    if bins.len() < 2 {
        return Err(Error::Data(format!(
            "need at least 2 confident bins to locate beta, found {}",
            bins.len()
        )));
    }
    let gaps: Vec<f64> = bins.iter().map(|b| b.f_mean - b.center).collect();
    let in_band = |i: usize| gaps[i].abs() <= accuracy;
    for i in 0..bins.len() - 1 {
        let (d0, d1) = (gaps[i], gaps[i + 1]);
        if d0.signum() == d1.signum() && d0 != 0.0 {
            continue;
        }
        // nearest bins outside the band on either side of the sign change
        let mut left = i;
        while in_band(left) && left > 0 {
            left -= 1;
        }
        let mut right = i + 1;
        while in_band(right) && right + 1 < bins.len() {
            right += 1;
        }
        if in_band(left) || in_band(right) || gaps[left].signum() == gaps[right].signum() {
            continue;
        }
        let beta = if d0 == 0.0 {
            bins[i].center
        } else {
            bins[i].center + d0 * (bins[i + 1].center - bins[i].center) / (d0 - d1)
        };
        return Ok(BetaEstimate {
            beta: Some(Beta::Point(beta)),
            beta_star: None,
            method: Some(EstimateMethod::PointCrossing),
            accuracy,
        });
    }
    let run = longest_run(&bins, |b| (b.f_mean - b.center).abs() <= accuracy);
    Ok(match run {
        Some((a, b)) => BetaEstimate {
            beta: Some(Beta::Interval([bins[a].center, bins[b - 1].center])),
            beta_star: None,
            method: Some(EstimateMethod::DiagonalInterval),
            accuracy,
        },
        None => BetaEstimate {
            beta: None,
            beta_star: None,
            method: None,
            accuracy,
        },
    })
}

/// Completes `beta` with β*.
///
/// For a point β this is f*_mean in β's bin (nearest confident bin when that
/// one is sparse). Otherwise the bins where f*_mean tracks the diagonal are
/// dropped and β* is the mean f*_mean over the longest remaining run whose
/// values span at most `beta.accuracy`.
pub fn estimate_beta_star(fcstar: &CloudSummary, beta: &BetaEstimate) -> Result<BetaEstimate> {
    require_kind(fcstar, CloudKind::FcStar)?;
    let bins: Vec<&CloudBin> = fcstar.confident_bins().collect();
    if bins.is_empty() {
        return Err(Error::Data("limit cloud has no confident bins".into()));
    }
    if let Some(Beta::Point(b)) = beta.beta {
        let target = bin_fitness(b.clamp(0.0, 1.0), fcstar.bin_width)?;
        let nearest = bins
            .iter()
            .min_by_key(|x| x.bin.abs_diff(target))
            .expect("nonempty");
        return Ok(BetaEstimate {
            beta_star: Some(nearest.f_mean),
            ..*beta
        });
    }
    let (beta_star, _) = plateau(fcstar, beta.accuracy)
        .ok_or_else(|| Error::Data("no plateau in the limit cloud and no point beta".into()))?;
    Ok(BetaEstimate {
        beta_star: Some(beta_star),
        method: Some(EstimateMethod::Plateau),
        ..*beta
    })
}

/// Mean f*_mean over the flat region of a limit cloud and the `[lo, hi]`
/// bin centers it spans. Needs at least two bins.
pub fn plateau(fcstar: &CloudSummary, accuracy: f64) -> Option<(f64, [f64; 2])> {
    // Off-diagonal confident bins, with breaks wherever a bin was removed.
    let candidates: Vec<Option<&CloudBin>> = fcstar
        .bins
        .iter()
        .map(|b| (!b.low_confidence && (b.f_mean - b.center).abs() > accuracy).then_some(b))
        .collect();
    let mut best: Option<(usize, usize)> = None;
    for start in 0..candidates.len() {
        let Some(first) = candidates[start] else {
            continue;
        };
        let (mut lo, mut hi) = (first.f_mean, first.f_mean);
        let mut end = start + 1;
        while end < candidates.len() {
            let Some(b) = candidates[end] else { break };
            let (l, h) = (lo.min(b.f_mean), hi.max(b.f_mean));
            if h - l > accuracy {
                break;
            }
            lo = l;
            hi = h;
            end += 1;
        }
        if end - start >= 2 && best.is_none_or(|(a, b)| end - start > b - a) {
            best = Some((start, end));
        }
    }
    let (a, b) = best?;
    let run: Vec<&CloudBin> = candidates[a..b]
        .iter()
        .map(|c| c.expect("in run"))
        .collect();
    let mean = run.iter().map(|x| x.f_mean).sum::<f64>() / run.len() as f64;
    Some((mean, [run[0].center, run[run.len() - 1].center]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heuristics::CoolingSchedule;
    use crate::landscape::NkLandscape;
    use crate::space::FitnessTable;

    fn synthetic(kind: CloudKind, f: impl Fn(f64) -> f64) -> CloudSummary {
        let bins = (100..400)
            .map(|bin| {
                let center = bin_center(bin, 0.002);
                let m = f(center);
                CloudBin {
                    bin,
                    center,
                    f_min: m,
                    f_max: m,
                    f_mean: m,
                    f_std: 0.0,
                    count: 100,
                    low_confidence: false,
                }
            })
            .collect();
        CloudSummary {
            bin_width: 0.002,
            kind,
            heuristic: "synthetic".into(),
            generations: None,
            bins,
        }
    }

    #[test]
    fn binning_rules() {
        assert_eq!(bin_fitness(0.0, 0.002).unwrap(), 0);
        assert_eq!(bin_fitness(0.0035, 0.002).unwrap(), 1);
        assert!((bin_center(1, 0.002) - 0.003).abs() < 1e-15);
        assert_eq!(
            bin_fitness(1.0, 0.002).unwrap(),
            bin_count(0.002).unwrap() - 1
        );
        assert_eq!(bin_count(0.002).unwrap(), 500);
        assert!(bin_fitness(1.5, 0.002).is_err());
        assert!(bin_fitness(-0.1, 0.002).is_err());
        assert!(bin_fitness(0.5, 0.0).is_err());
    }

    #[test]
    fn constant_space_cloud() {
        let t = FitnessTable::from_values(4, vec![0.4; 16]).unwrap();
        let space = SearchSpace::from_table(t, 0.002).unwrap();
        let fc = build_fitness_cloud(&space, &HeuristicSpec::Mhc, 1).unwrap();
        assert_eq!(fc.bins.len(), 1);
        let b = fc.bins[0];
        assert_eq!((b.f_min, b.f_max, b.f_mean, b.count), (0.4, 0.4, 0.4, 16));
    }

    #[test]
    fn single_locus_hamming_cloud() {
        let t = FitnessTable::from_values(1, vec![0.2, 0.7]).unwrap();
        let space = SearchSpace::from_table(t, 0.002).unwrap();
        let fc = build_hamming_cloud(&space).unwrap();
        assert_eq!(fc.bins.len(), 2);
        assert_eq!(fc.bins[0].bin, bin_fitness(0.2, 0.002).unwrap());
        assert_eq!(fc.bins[0].f_mean, 0.7);
        assert_eq!(fc.bins[1].f_mean, 0.2);
        assert_eq!(fc.total_count(), 2);
    }

    #[test]
    fn hamming_counts_and_borders() {
        let l = NkLandscape::generate(10, 3, 2).unwrap();
        let space = SearchSpace::build(&l, 0.002).unwrap();
        let fc = build_hamming_cloud(&space).unwrap();
        assert_eq!(fc.total_count(), 10 << 10);
        let v = space.table().values();
        for u in 0..v.len() {
            let b = fc
                .bins
                .iter()
                .find(|b| b.bin == bin_fitness(v[u], 0.002).unwrap())
                .unwrap();
            for i in 0..10 {
                let child = v[u ^ (1 << i)];
                assert!(b.f_min <= child && child <= b.f_max);
            }
        }
    }

    #[test]
    fn cloud_bin_invariants() {
        let l = NkLandscape::generate(12, 4, 3).unwrap();
        let space = SearchSpace::build(&l, 0.002).unwrap();
        let spec = HeuristicSpec::SaFixed {
            temperature: 0.05,
            seed: 4,
        };
        for fc in [
            build_fitness_cloud(&space, &spec, 1).unwrap(),
            build_fitness_cloud(&space, &spec, 3).unwrap(),
            build_limit_cloud(&space, &spec, 20).unwrap(),
        ] {
            assert_eq!(fc.total_count(), 1 << 12);
            for b in &fc.bins {
                assert!(b.f_min <= b.f_mean && b.f_mean <= b.f_max);
                assert!(b.f_std >= 0.0 && b.count >= 1);
                assert_eq!(b.low_confidence, b.count < LOW_CONFIDENCE_COUNT);
            }
        }
    }

    #[test]
    fn zero_generation_limit_cloud_is_identity() {
        let l = NkLandscape::generate(10, 2, 5).unwrap();
        let space = SearchSpace::build(&l, 0.002).unwrap();
        let fc = build_limit_cloud(&space, &HeuristicSpec::Nhc { seed: 1 }, 0).unwrap();
        for b in &fc.bins {
            // f_mean is the bin's mean parent fitness, within half a bin of the center
            assert!((b.f_mean - b.center).abs() <= 0.001 + 1e-12);
            assert!(b.f_min >= b.center - 0.001 - 1e-12 && b.f_max < b.center + 0.001 + 1e-12);
        }
        let est = estimate_beta_star(
            &fc,
            &BetaEstimate {
                beta: Some(Beta::Point(0.5)),
                beta_star: None,
                method: Some(EstimateMethod::PointCrossing),
                accuracy: 0.002,
            },
        )
        .unwrap();
        assert!((est.beta_star.unwrap() - 0.5).abs() <= 0.002);
    }

    #[test]
    fn limit_run_matches_single_trajectories() {
        let l = NkLandscape::generate(9, 3, 6).unwrap();
        let space = SearchSpace::build(&l, 0.002).unwrap();
        for spec in [
            HeuristicSpec::Mhc,
            HeuristicSpec::RandomWalk { seed: 3 },
            HeuristicSpec::SaFixed {
                temperature: 0.02,
                seed: 3,
            },
            HeuristicSpec::SaCooling {
                cooling: CoolingSchedule::default(),
                seed: 3,
            },
            HeuristicSpec::Nhc { seed: 3 },
        ] {
            let batch = limit_fitness(&space, &spec, 120).unwrap();
            for u in (0..space.len()).step_by(13) {
                let g = crate::genotype::Genotype::new(u as u64, 9).unwrap();
                let t = crate::heuristics::run_heuristic(&space, &spec, g, 120).unwrap();
                assert_eq!(t.final_fitness(), batch[u], "{}", spec.label());
            }
        }
    }

    #[test]
    fn snapshots_match_separate_runs() {
        let l = NkLandscape::generate(9, 3, 6).unwrap();
        let space = SearchSpace::build(&l, 0.002).unwrap();
        let spec = HeuristicSpec::SaCooling {
            cooling: CoolingSchedule::default(),
            seed: 8,
        };
        let snaps = build_limit_snapshots(&space, &spec, &[100, 50]).unwrap();
        assert_eq!(snaps[0], build_limit_cloud(&space, &spec, 100).unwrap());
        assert_eq!(snaps[1], build_limit_cloud(&space, &spec, 50).unwrap());
    }

    #[test]
    fn equilibrium_stops_and_reports_generations() {
        let l = NkLandscape::generate(10, 3, 6).unwrap();
        let space = SearchSpace::build(&l, 0.002).unwrap();
        let spec = HeuristicSpec::SaFixed {
            temperature: 0.1,
            seed: 8,
        };
        let rule = Equilibrium::default();
        let (fc, gens) = build_equilibrium_limit_cloud(&space, &spec, &rule).unwrap();
        assert!(gens > 0 && gens <= rule.max_generations && gens % rule.window == 0);
        assert_eq!(fc.generations, Some(gens));
        assert_eq!(fc, build_limit_cloud(&space, &spec, gens).unwrap());
    }

    #[test]
    fn beta_from_affine_cloud() {
        let fc = synthetic(CloudKind::Fc, |f| 0.2 * f + 0.4);
        let est = estimate_beta(&fc, 0.002).unwrap();
        match est.beta {
            Some(Beta::Point(b)) => assert!((b - 0.5).abs() < 1e-9, "{b}"),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(est.method, Some(EstimateMethod::PointCrossing));
    }

    #[test]
    fn beta_interval_when_curve_hugs_diagonal() {
        // above the diagonal, converging to it from 0.6 on
        let fc = synthetic(CloudKind::Fc, |f| f + (0.6 - f).max(0.0) * 0.5 + 0.0005);
        let est = estimate_beta(&fc, 0.002).unwrap();
        match est.beta {
            Some(Beta::Interval([lo, hi])) => {
                assert!(lo > 0.595 && lo < 0.6, "{lo}");
                assert!((hi - bin_center(399, 0.002)).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        let far = synthetic(CloudKind::Fc, |f| f + 0.1);
        assert_eq!(estimate_beta(&far, 0.002).unwrap().beta, None);
    }

    #[test]
    fn noise_along_the_diagonal_is_not_a_crossing() {
        // converges onto the diagonal, then wobbles by +-0.0005
        let fc = synthetic(CloudKind::Fc, |f| {
            let wobble = if ((f / 0.002) as usize).is_multiple_of(2) {
                0.0005
            } else {
                -0.0005
            };
            f + (0.65 - f).max(0.0) * 0.3 + wobble
        });
        let est = estimate_beta(&fc, 0.002).unwrap();
        assert_eq!(
            est.method,
            Some(EstimateMethod::DiagonalInterval),
            "{est:?}"
        );

        // a steep crossing inside the band region still counts
        let steep = synthetic(CloudKind::Fc, |f| 0.2 * f + 0.52);
        let est = estimate_beta(&steep, 0.002).unwrap();
        assert!(matches!(est.beta, Some(Beta::Point(b)) if (b - 0.65).abs() < 1e-9));
    }

    #[test]
    fn beta_needs_two_bins_and_fc_kind() {
        let mut fc = synthetic(CloudKind::Fc, |f| f);
        fc.bins.truncate(1);
        assert!(matches!(estimate_beta(&fc, 0.002), Err(Error::Data(_))));
        let star = synthetic(CloudKind::FcStar, |f| f);
        assert!(estimate_beta(&star, 0.002).is_err());
    }

    #[test]
    fn plateau_ignores_identity_region() {
        // flat at 0.66 below 0.66, identity above
        let star = synthetic(CloudKind::FcStar, |f| f.max(0.66));
        let interval = BetaEstimate {
            beta: Some(Beta::Interval([0.6, 0.79])),
            beta_star: None,
            method: Some(EstimateMethod::DiagonalInterval),
            accuracy: 0.002,
        };
        let est = estimate_beta_star(&star, &interval).unwrap();
        assert!((est.beta_star.unwrap() - 0.66).abs() < 1e-12);
        assert_eq!(est.method, Some(EstimateMethod::Plateau));
        assert_eq!(est.beta, interval.beta);

        let none = BetaEstimate {
            beta: None,
            ..interval
        };
        let diag = synthetic(CloudKind::FcStar, |f| f);
        assert!(matches!(
            estimate_beta_star(&diag, &none),
            Err(Error::Data(_))
        ));
    }
}
