//! Exhaustively enumerated genotype spaces.

use crate::error::{Error, Result};
use crate::heuristics::NeutralPartition;
use crate::landscape::NkLandscape;
use crate::par;

/// Largest N for which the full space of 2^N genotypes is enumerated.
pub const MAX_ENUMERATION_LEN: usize = 25;

/// Anything that can score genotype indices of a fixed length.
pub trait FitnessSource: Sync {
    fn n(&self) -> usize;

    fn fitness_at(&self, index: u64) -> f64;

    /// Index of the fittest one-bit-flip neighbor; ties go to the lowest locus.
    fn best_neighbor(&self, index: u64) -> u64 {
        let mut best = index ^ 1;
        let mut best_f = self.fitness_at(best);
        for locus in 1..self.n() {
            let nb = index ^ (1u64 << locus);
            let f = self.fitness_at(nb);
            if f > best_f {
                best = nb;
                best_f = f;
            }
        }
        best
    }

    /// Fitness-bin partition, when one has been built for this source.
    fn partition(&self) -> Option<&NeutralPartition> {
        None
    }
}

impl FitnessSource for NkLandscape {
    fn n(&self) -> usize {
        NkLandscape::n(self)
    }

    #[inline]
    fn fitness_at(&self, index: u64) -> f64 {
        self.fitness_of_index(index)
    }
}

/// Fitness of every genotype, indexed by genotype index.
#[derive(Clone, Debug, PartialEq)]
pub struct FitnessTable {
    n: usize,
    values: Vec<f64>,
    argmax: usize,
}

pub fn check_enumerable(n: usize) -> Result<()> {
    if n > MAX_ENUMERATION_LEN {
        return Err(Error::Capacity(format!(
            "exhaustive enumeration needs n <= {MAX_ENUMERATION_LEN}, got {n}"
        )));
    }
    Ok(())
}

pub fn enumerate_fitness(landscape: &NkLandscape) -> Result<FitnessTable> {
    let n = landscape.n();
    check_enumerable(n)?;
    let values = par::collect_indexed(1usize << n, |u| landscape.fitness_of_index(u as u64));
    FitnessTable::from_values(n, values)
}

impl FitnessTable {
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        check_enumerable(n)?;
        if n == 0 || values.len() != 1usize << n {
            return Err(Error::param(format!(
                "table for n = {n} needs {} entries, got {}",
                1usize << n,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::param(format!("fitness {v} outside [0, 1]")));
        }
        let argmax = values
            .iter()
            .enumerate()
            .fold(0, |best, (i, &v)| if v > values[best] { i } else { best });
        Ok(Self { n, values, argmax })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values[self.argmax]
    }

    /// Lowest index attaining the maximum.
    pub fn argmax(&self) -> usize {
        self.argmax
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

impl FitnessSource for FitnessTable {
    fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn fitness_at(&self, index: u64) -> f64 {
        self.values[index as usize]
    }
}

/// An enumerated space with the best-neighbor map and the neutral partition
/// precomputed, which is what the exhaustive cloud builders run against.
#[derive(Clone, Debug)]
pub struct SearchSpace {
    table: FitnessTable,
    best: Vec<u32>,
    partition: NeutralPartition,
}

impl SearchSpace {
    pub fn build(landscape: &NkLandscape, bin_width: f64) -> Result<Self> {
        Self::from_table(enumerate_fitness(landscape)?, bin_width)
    }

    pub fn from_table(table: FitnessTable, bin_width: f64) -> Result<Self> {
        let partition = NeutralPartition::build(&table, bin_width)?;
        let best = par::collect_indexed(table.len(), |u| {
            FitnessSource::best_neighbor(&table, u as u64) as u32
        });
        Ok(Self {
            table,
            best,
            partition,
        })
    }

    pub fn table(&self) -> &FitnessTable {
        &self.table
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn bin_width(&self) -> f64 {
        self.partition.bin_width()
    }

    pub fn neutral_partition(&self) -> &NeutralPartition {
        &self.partition
    }
}

impl FitnessSource for SearchSpace {
    fn n(&self) -> usize {
        self.table.n
    }

    #[inline]
    fn fitness_at(&self, index: u64) -> f64 {
        self.table.values[index as usize]
    }

    #[inline]
    fn best_neighbor(&self, index: u64) -> u64 {
        u64::from(self.best[index as usize])
    }

    fn partition(&self) -> Option<&NeutralPartition> {
        Some(&self.partition)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genotype::Genotype;

    #[test]
    fn four_entries_match_direct_calls() {
        let l = NkLandscape::from_parts(
            2,
            1,
            0,
            vec![vec![1], vec![0]],
            vec![vec![0.1, 0.2, 0.3, 0.4], vec![0.5, 0.6, 0.7, 0.8]],
        )
        .unwrap();
        let t = enumerate_fitness(&l).unwrap();
        assert_eq!(t.len(), 4);
        for u in 0..4u64 {
            let direct = l.fitness(&Genotype::new(u, 2).unwrap()).unwrap();
            assert_eq!(t.values()[u as usize], direct);
        }
        assert_eq!(t.argmax(), 3);
    }

    #[test]
    fn constant_tables_give_constant_space() {
        let n = 5;
        let l = NkLandscape::from_parts(
            n,
            2,
            0,
            (0..n).map(|i| vec![(i + 1) % n, (i + 2) % n]).collect(),
            vec![vec![0.25; 8]; n],
        )
        .unwrap();
        let t = enumerate_fitness(&l).unwrap();
        assert!(t.values().iter().all(|&v| (v - 0.25).abs() < 1e-15));
    }

    #[test]
    fn full_sweep_agrees_with_direct_fitness() {
        for (n, k, seed) in [(12, 3, 1u64), (9, 8, 2), (10, 0, 3)] {
            let l = NkLandscape::generate(n, k, seed).unwrap();
            let t = enumerate_fitness(&l).unwrap();
            for u in 0..t.len() {
                let g = Genotype::new(u as u64, n).unwrap();
                assert_eq!(t.values()[u], l.fitness(&g).unwrap());
            }
        }
    }

    #[test]
    fn max_matches_brute_force() {
        let l = NkLandscape::generate(16, 8, 5).unwrap();
        let t = enumerate_fitness(&l).unwrap();
        let brute = (0..1u64 << 16)
            .map(|u| l.fitness_of_index(u))
            .fold(f64::MIN, f64::max);
        assert_eq!(t.max(), brute);
    }

    #[test]
    fn enumeration_guard() {
        let l = NkLandscape::generate(30, 2, 0).unwrap();
        assert!(matches!(enumerate_fitness(&l), Err(Error::Capacity(_))));
    }

    #[test]
    fn cached_best_neighbor_matches_scan() {
        let l = NkLandscape::generate(11, 4, 8).unwrap();
        let space = SearchSpace::build(&l, 0.002).unwrap();
        for u in 0..space.len() as u64 {
            assert_eq!(space.best_neighbor(u), l.best_neighbor(u));
        }
    }
}
