//! Brute-force and Monte-Carlo recomputations shared by the integration tests.
//! Nothing here calls the library's evaluation, stepping or binning code.

#![allow(dead_code)]

use nk_cloud::cloud::{CloudBin, CloudKind, CloudSummary};
use nk_cloud::NkLandscape;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};
use rand_xoshiro::Xoshiro256PlusPlus;

/// Fitness of `index` read straight off the contribution tables.
pub fn fitness(l: &NkLandscape, index: u64) -> f64 {
    let bit = |i: usize| ((index >> i) & 1) as usize;
    let total: f64 = (0..l.n())
        .map(|i| {
            let mut row = bit(i);
            for (j, &link) in l.links()[i].iter().enumerate() {
                row |= bit(link) << (j + 1);
            }
            l.tables()[i][row]
        })
        .sum();
    total / l.n() as f64
}

pub fn all_fitness(l: &NkLandscape) -> Vec<f64> {
    (0..1u64 << l.n()).map(|u| fitness(l, u)).collect()
}

/// The fittest one-flip neighbor, lowest locus on ties.
pub fn best_neighbor(values: &[f64], n: usize, u: usize) -> usize {
    let mut best = u ^ 1;
    for i in 1..n {
        let v = u ^ (1 << i);
        if values[v] > values[best] {
            best = v;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleBin {
    pub bin: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

/// Groups `(parent, child)` pairs by parent bin and computes the statistics
/// on each group's list of children.
pub fn binned(points: impl Iterator<Item = (f64, f64)>, width: f64) -> Vec<OracleBin> {
    let nbins = (1.0 / width).round() as usize;
    let mut groups: Vec<Vec<f64>> = vec![Vec::new(); nbins];
    for (p, c) in points {
        let b = ((p / width).floor() as usize).min(nbins - 1);
        groups[b].push(c);
    }
    groups
        .into_iter()
        .enumerate()
        .filter(|(_, g)| !g.is_empty())
        .map(|(bin, g)| {
            let count = g.len() as f64;
            let mut sum = 0.0;
            for &x in &g {
                sum += x;
            }
            let mean = sum / count;
            let (min, max) = (
                g.iter().copied().fold(f64::INFINITY, f64::min),
                g.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            );
            let mut sq = 0.0;
            for &x in &g {
                sq += (x - mean) * (x - mean);
            }
            OracleBin {
                bin,
                min,
                max,
                // reported means stay inside [min, max] despite rounding
                mean: mean.clamp(min, max),
                std: (sq / count).sqrt(),
                count: g.len(),
            }
        })
        .collect()
}

pub fn hamming_oracle(l: &NkLandscape, width: f64) -> Vec<OracleBin> {
    let values = all_fitness(l);
    let n = l.n();
    binned(
        (0..values.len()).flat_map(|u| {
            let values = &values;
            (0..n).map(move |i| (values[u], values[u ^ (1 << i)]))
        }),
        width,
    )
}

/// mHC clouds: `generations = 1` gives FC, more gives FC*.
pub fn mhc_oracle(l: &NkLandscape, generations: usize, width: f64) -> Vec<OracleBin> {
    let values = all_fitness(l);
    let n = l.n();
    binned(
        (0..values.len()).map(|u| {
            let mut at = u;
            for _ in 0..generations {
                at = best_neighbor(&values, n, at);
            }
            (values[u], values[at])
        }),
        width,
    )
}

/// Builds a summary whose mean curve is `mean(center)` on bins `lo..hi`.
pub fn synthetic_cloud(
    kind: CloudKind,
    lo: usize,
    hi: usize,
    width: f64,
    mean: impl Fn(f64) -> f64,
) -> CloudSummary {
    let bins = (lo..hi)
        .map(|bin| {
            let center = (bin as f64 + 0.5) * width;
            let m = mean(center);
            CloudBin {
                bin,
                center,
                f_min: m,
                f_max: m,
                f_mean: m,
                f_std: 0.0,
                count: 50,
                low_confidence: false,
            }
        })
        .collect();
    CloudSummary {
        bin_width: width,
        kind,
        heuristic: "synthetic".into(),
        generations: None,
        bins,
    }
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

impl Estimate {
    pub fn from_samples(mut sample: impl FnMut() -> f64, count: usize) -> Self {
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..count {
            let x = sample();
            sum += x;
            sq += x * x;
        }
        let m = count as f64;
        let mean = sum / m;
        let var = (sq / m - mean * mean).max(0.0) * m / (m - 1.0);
        Self {
            mean,
            se: (var / m).sqrt(),
        }
    }

    /// Distance from `value` in standard errors.
    pub fn z(&self, value: f64) -> f64 {
        if self.se == 0.0 {
            if value == self.mean {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (value - self.mean).abs() / self.se
        }
    }
}

pub fn proposal_sigma(k: usize) -> f64 {
    (1.0 / (12.0 * (k as f64 + 1.0))).sqrt()
}

fn mc_rng(salt: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(0x6d63_5f6f_7261_636c ^ salt)
}

/// E(max of `n` i.i.d. N(0.5, sigma_K)).
pub fn mc_expected_max(n: usize, k: usize, samples: usize, salt: u64) -> Estimate {
    let normal = Normal::new(0.5, proposal_sigma(k)).unwrap();
    let mut rng = mc_rng(salt);
    Estimate::from_samples(
        || {
            (0..n)
                .map(|_| normal.sample(&mut rng))
                .fold(f64::NEG_INFINITY, f64::max)
        },
        samples,
    )
}

/// One Metropolis proposal from fitness `f`: the new value, or `f` if rejected.
pub fn mc_sa_metropolis(f: f64, k: usize, t: f64, samples: usize, salt: u64) -> Estimate {
    let normal = Normal::new(0.5, proposal_sigma(k)).unwrap();
    let mut rng = mc_rng(salt);
    Estimate::from_samples(
        || {
            let x = normal.sample(&mut rng);
            let u: f64 = rng.gen();
            if x >= f || u < ((x - f) / t).exp() {
                x
            } else {
                f
            }
        },
        samples,
    )
}

/// `P(X > f) + sigma E[exp(sigma Z / T); Z < 0]`, the unnormalized form,
/// with X ~ N(0.5, sigma) and Z ~ N(0, 1) drawn independently.
pub fn mc_sa_printed(f: f64, k: usize, t: f64, samples: usize, salt: u64) -> Estimate {
    let sigma = proposal_sigma(k);
    let normal = Normal::new(0.5, sigma).unwrap();
    let std = Normal::new(0.0, 1.0).unwrap();
    let mut rng = mc_rng(salt);
    Estimate::from_samples(
        || {
            let x = normal.sample(&mut rng);
            let z: f64 = std.sample(&mut rng);
            let tail = if x > f { 1.0 } else { 0.0 };
            let body = if z < 0.0 {
                sigma * (sigma * z / t).exp()
            } else {
                0.0
            };
            tail + body
        },
        samples,
    )
}
