//! One-step transition rules and trajectory runners.
//!
//! Every stochastic rule draws only from the generator it is handed. The
//! runners give each trajectory its own [`StreamRng`], keyed by the
//! heuristic seed and the start genotype index, so a trajectory replays
//! identically whether it is run alone or as part of a whole-space batch.

use rand::{Rng, RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::cloud::{bin_count, bin_fitness};
use crate::error::{Error, Result};
use crate::genotype::Genotype;
use crate::space::{FitnessSource, FitnessTable};

/// Per-trajectory random stream.
pub type StreamRng = SplitMix64;

/// Stream for the trajectory that starts at `start`.
pub fn trajectory_rng(seed: u64, start: u64) -> StreamRng {
    let key = SplitMix64::seed_from_u64(seed).next_u64();
    let state = SplitMix64::seed_from_u64(key ^ start).next_u64();
    SplitMix64::seed_from_u64(state)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoolingSchedule {
    pub t_start: f64,
    pub t_factor: f64,
    pub epoch_length: usize,
    pub total_generations: usize,
    /// Temperature never drops below this.
    pub t_floor: f64,
}

impl Default for CoolingSchedule {
    fn default() -> Self {
        Self {
            t_start: 0.10,
            t_factor: 0.95,
            epoch_length: 50,
            total_generations: 2450,
            t_floor: 0.01,
        }
    }
}

impl CoolingSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_start > 0.0) {
            return Err(Error::param("cooling t_start must be > 0"));
        }
        if !(self.t_factor > 0.0 && self.t_factor < 1.0) {
            return Err(Error::param("cooling t_factor must lie in (0, 1)"));
        }
        if self.epoch_length == 0 {
            return Err(Error::param("cooling epoch_length must be >= 1"));
        }
        if !(self.t_floor > 0.0) {
            return Err(Error::param("cooling t_floor must be > 0"));
        }
        Ok(())
    }
}

/// `T = t_start * t_factor^(generation / epoch_length)`, floored at `t_floor`.
pub fn temperature_at(cooling: &CoolingSchedule, generation: usize) -> Result<f64> {
    if generation >= cooling.total_generations {
        return Err(Error::param(format!(
            "generation {generation} outside schedule of {} generations",
            cooling.total_generations
        )));
    }
    Ok(temperature_unchecked(cooling, generation))
}

#[inline]
fn temperature_unchecked(cooling: &CoolingSchedule, generation: usize) -> f64 {
    let epoch = (generation / cooling.epoch_length) as i32;
    (cooling.t_start * cooling.t_factor.powi(epoch)).max(cooling.t_floor)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeuristicSpec {
    RandomWalk { seed: u64 },
    Mhc,
    SaFixed { temperature: f64, seed: u64 },
    SaCooling { cooling: CoolingSchedule, seed: u64 },
    Nhc { seed: u64 },
}

impl HeuristicSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            HeuristicSpec::SaFixed { temperature, .. } if !(*temperature > 0.0) => Err(
                Error::param(format!("temperature must be > 0, got {temperature}")),
            ),
            HeuristicSpec::SaCooling { cooling, .. } => cooling.validate(),
            _ => Ok(()),
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, HeuristicSpec::Mhc)
    }

    pub fn seed(&self) -> u64 {
        match *self {
            HeuristicSpec::Mhc => 0,
            HeuristicSpec::RandomWalk { seed }
            | HeuristicSpec::SaFixed { seed, .. }
            | HeuristicSpec::SaCooling { seed, .. }
            | HeuristicSpec::Nhc { seed } => seed,
        }
    }

    /// Temperature a step at `generation` runs at, for the annealing kinds.
    pub fn temperature(&self, generation: usize) -> Option<f64> {
        match self {
            HeuristicSpec::SaFixed { temperature, .. } => Some(*temperature),
            HeuristicSpec::SaCooling { cooling, .. } => {
                Some(temperature_unchecked(cooling, generation))
            }
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            HeuristicSpec::RandomWalk { .. } => "random-walk".into(),
            HeuristicSpec::Mhc => "mhc".into(),
            HeuristicSpec::SaFixed { temperature, .. } => format!("sa(T={temperature})"),
            HeuristicSpec::SaCooling { .. } => "sa-cooling".into(),
            HeuristicSpec::Nhc { .. } => "nhc".into(),
        }
    }
}

/// All N one-bit-flip neighbors, in ascending locus order.
pub fn hamming_neighbors(g: Genotype) -> Vec<Genotype> {
    (0..g.len()).map(|i| g.flip(i)).collect()
}

pub fn random_walk_step<R: Rng + ?Sized>(g: Genotype, rng: &mut R) -> Genotype {
    g.flip(rng.gen_range(0..g.len() as u64) as usize)
}

/// Moves to the fittest neighbor, even when it is worse than `g`.
pub fn mhc_step<S: FitnessSource + ?Sized>(src: &S, g: Genotype) -> Genotype {
    Genotype::from_index_unchecked(src.best_neighbor(g.index()), g.len())
}

/// One Metropolis step: a single uniformly chosen neighbor, accepted when
/// `df >= 0` or otherwise with probability `exp(df / T)`.
pub fn sa_step<S, R>(src: &S, g: Genotype, temperature: f64, rng: &mut R) -> Genotype
where
    S: FitnessSource + ?Sized,
    R: Rng + ?Sized,
{
    Genotype::from_index_unchecked(sa_index(src, g.index(), temperature, rng), g.len())
}

#[inline]
fn sa_index<S, R>(src: &S, index: u64, temperature: f64, rng: &mut R) -> u64
where
    S: FitnessSource + ?Sized,
    R: Rng + ?Sized,
{
    let locus = rng.gen_range(0..src.n() as u64);
    let proposal = index ^ (1u64 << locus);
    let df = src.fitness_at(proposal) - src.fitness_at(index);
    if df >= 0.0 || rng.gen::<f64>() < (df / temperature).exp() {
        proposal
    } else {
        index
    }
}

/// Genotypes grouped by fitness bin, for uniform draws within a neutral set.
#[derive(Clone, Debug)]
pub struct NeutralPartition {
    bin_width: f64,
    bin_of: Vec<u16>,
    offsets: Vec<usize>,
    members: Vec<u32>,
}

impl NeutralPartition {
    pub fn build(table: &FitnessTable, bin_width: f64) -> Result<Self> {
        let bins = bin_count(bin_width)?;
        if bins > usize::from(u16::MAX) + 1 {
            return Err(Error::param(format!("bin width {bin_width} is too fine")));
        }
        let bin_of = table
            .values()
            .iter()
            .map(|&f| bin_fitness(f, bin_width).map(|b| b as u16))
            .collect::<Result<Vec<_>>>()?;

        let mut offsets = vec![0usize; bins + 1];
        for &b in &bin_of {
            offsets[usize::from(b) + 1] += 1;
        }
        for b in 0..bins {
            offsets[b + 1] += offsets[b];
        }
        let mut cursor = offsets.clone();
        let mut members = vec![0u32; bin_of.len()];
        for (u, &b) in bin_of.iter().enumerate() {
            let slot = &mut cursor[usize::from(b)];
            members[*slot] = u as u32;
            *slot += 1;
        }
        Ok(Self {
            bin_width,
            bin_of,
            offsets,
            members,
        })
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn bin_of(&self, index: u64) -> usize {
        usize::from(self.bin_of[index as usize])
    }

    /// Genotype indices in `bin`, ascending.
    pub fn members(&self, bin: usize) -> &[u32] {
        &self.members[self.offsets[bin]..self.offsets[bin + 1]]
    }

    /// `(bin, members)` for every nonempty bin.
    pub fn nonempty_bins(&self) -> impl Iterator<Item = (usize, &[u32])> + '_ {
        (0..self.offsets.len() - 1)
            .map(|b| (b, self.members(b)))
            .filter(|(_, m)| !m.is_empty())
    }
}

pub fn build_neutral_partition(table: &FitnessTable, bin_width: f64) -> Result<NeutralPartition> {
    NeutralPartition::build(table, bin_width)
}

/// Uniform draw from `g`'s fitness bin; `g` itself may come back.
pub fn nop_step<R: Rng + ?Sized>(
    partition: &NeutralPartition,
    g: Genotype,
    rng: &mut R,
) -> Genotype {
    Genotype::from_index_unchecked(nop_index(partition, g.index(), rng), g.len())
}

#[inline]
fn nop_index<R: Rng + ?Sized>(partition: &NeutralPartition, index: u64, rng: &mut R) -> u64 {
    let set = partition.members(partition.bin_of(index));
    u64::from(set[rng.gen_range(0..set.len() as u64) as usize])
}

/// Best neighbor if it is strictly fitter, otherwise a neutral jump.
pub fn nhc_step<S, R>(src: &S, partition: &NeutralPartition, g: Genotype, rng: &mut R) -> Genotype
where
    S: FitnessSource + ?Sized,
    R: Rng + ?Sized,
{
    Genotype::from_index_unchecked(nhc_index(src, partition, g.index(), rng), g.len())
}

#[inline]
fn nhc_index<S, R>(src: &S, partition: &NeutralPartition, index: u64, rng: &mut R) -> u64
where
    S: FitnessSource + ?Sized,
    R: Rng + ?Sized,
{
    let candidate = src.best_neighbor(index);
    if src.fitness_at(candidate) - src.fitness_at(index) > 0.0 {
        candidate
    } else {
        nop_index(partition, index, rng)
    }
}

/// Resolved step rule, shared by single runs and whole-space batches.
pub(crate) struct Stepper<'a, S: FitnessSource + ?Sized> {
    src: &'a S,
    spec: HeuristicSpec,
    partition: Option<&'a NeutralPartition>,
}

impl<'a, S: FitnessSource + ?Sized> Stepper<'a, S> {
    pub(crate) fn new(src: &'a S, spec: &HeuristicSpec) -> Result<Self> {
        spec.validate()?;
        let partition = src.partition();
        if matches!(spec, HeuristicSpec::Nhc { .. }) && partition.is_none() {
            return Err(Error::param(
                "nHC needs a neutral partition; run it on an enumerated search space",
            ));
        }
        Ok(Self {
            src,
            spec: *spec,
            partition,
        })
    }

    pub(crate) fn check_generations(&self, generations: usize) -> Result<()> {
        if let HeuristicSpec::SaCooling { cooling, .. } = &self.spec {
            if generations > cooling.total_generations {
                return Err(Error::param(format!(
                    "{generations} generations exceed the cooling schedule's {}",
                    cooling.total_generations
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn step(&self, index: u64, generation: usize, rng: &mut StreamRng) -> u64 {
        match &self.spec {
            HeuristicSpec::RandomWalk { .. } => {
                index ^ (1u64 << rng.gen_range(0..self.src.n() as u64))
            }
            HeuristicSpec::Mhc => self.src.best_neighbor(index),
            HeuristicSpec::SaFixed { temperature, .. } => {
                sa_index(self.src, index, *temperature, rng)
            }
            HeuristicSpec::SaCooling { cooling, .. } => sa_index(
                self.src,
                index,
                temperature_unchecked(cooling, generation),
                rng,
            ),
            HeuristicSpec::Nhc { .. } => {
                // Stepper::new guarantees the partition for nHC.
                let partition = self.partition.expect("partition present for nHC");
                nhc_index(self.src, partition, index, rng)
            }
        }
    }

    pub(crate) fn rng_for(&self, start: u64) -> StreamRng {
        trajectory_rng(self.spec.seed(), start)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub genotypes: Vec<u64>,
    pub fitnesses: Vec<f64>,
    /// Temperature of the step that produced each entry (`None` for row 0
    /// and for non-annealing heuristics).
    pub temperatures: Vec<Option<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.genotypes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genotypes.is_empty()
    }

    pub fn final_fitness(&self) -> f64 {
        *self.fitnesses.last().expect("trajectory holds at least g0")
    }
}

pub fn run_heuristic<S: FitnessSource + ?Sized>(
    src: &S,
    spec: &HeuristicSpec,
    g0: Genotype,
    generations: usize,
) -> Result<Trajectory> {
    if g0.len() != src.n() {
        return Err(Error::param(format!(
            "start genotype has length {}, landscape expects {}",
            g0.len(),
            src.n()
        )));
    }
    let stepper = Stepper::new(src, spec)?;
    stepper.check_generations(generations)?;
    let mut rng = stepper.rng_for(g0.index());
    let mut current = g0.index();
    let mut trajectory = Trajectory {
        genotypes: Vec::with_capacity(generations + 1),
        fitnesses: Vec::with_capacity(generations + 1),
        temperatures: Vec::with_capacity(generations + 1),
    };
    trajectory.genotypes.push(current);
    trajectory.fitnesses.push(src.fitness_at(current));
    trajectory.temperatures.push(None);
    for generation in 0..generations {
        current = stepper.step(current, generation, &mut rng);
        trajectory.genotypes.push(current);
        trajectory.fitnesses.push(src.fitness_at(current));
        trajectory.temperatures.push(spec.temperature(generation));
    }
    Ok(trajectory)
}
