//! Random-neighborhood NK landscapes.
//!
//! Locus `i` contributes `tables[i][p]` where `p` packs the genotype's own
//! bit at `i` into bit 0 and the bits at `links[i][0..K]` into bits `1..=K`,
//! in link order. Fitness is the mean of the N contributions.
//!
//! Instances are generated from a single 64-bit seed with
//! [`Xoshiro256PlusPlus`]. The generator seeded by `seed_from_u64(seed)`
//! draws all link lists (locus 0 first, partial Fisher-Yates over the
//! ascending list of other loci). Locus `i`'s table is filled from a copy of
//! that base generator advanced by `i + 1` calls to `jump()`, so each table
//! has its own non-overlapping substream. Contributions are the standard
//! 53-bit uniform doubles on `[0, 1)`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genotype::{Genotype, MAX_GENOTYPE_LEN};

pub const LANDSCAPE_FORMAT_VERSION: u32 = 1;

/// Largest K accepted; a table holds 2^(K+1) entries.
pub const MAX_K: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct NkLandscape {
    n: usize,
    k: usize,
    seed: u64,
    links: Vec<Vec<usize>>,
    tables: Vec<Vec<f64>>,
}

/// On-disk form of a landscape.
#[derive(Serialize, Deserialize)]
struct LandscapeFile {
    format_version: u32,
    n: usize,
    k: usize,
    seed: u64,
    links: Vec<Vec<usize>>,
    tables: Vec<Vec<f64>>,
}

fn check_dimensions(n: usize, k: usize, min_n: usize) -> Result<()> {
    if n < min_n {
        return Err(Error::param(format!("n = {n} must be at least {min_n}")));
    }
    if n > MAX_GENOTYPE_LEN {
        return Err(Error::Capacity(format!(
            "n = {n} exceeds the {MAX_GENOTYPE_LEN}-bit genotype limit"
        )));
    }
    if k >= n {
        return Err(Error::param(format!(
            "k = {k} must be at most n - 1 = {}",
            n - 1
        )));
    }
    if k > MAX_K {
        return Err(Error::Capacity(format!(
            "k = {k} exceeds {MAX_K} (contribution tables would hold 2^{} entries)",
            k + 1
        )));
    }
    Ok(())
}

impl NkLandscape {
    pub fn generate(n: usize, k: usize, seed: u64) -> Result<Self> {
        check_dimensions(n, k, 2)?;
        let base = Xoshiro256PlusPlus::seed_from_u64(seed);

        let mut link_rng = base.clone();
        let links = (0..n)
            .map(|i| {
                let mut candidates: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                for t in 0..k {
                    let pick = link_rng.gen_range(t as u64..candidates.len() as u64) as usize;
                    candidates.swap(t, pick);
                }
                candidates.truncate(k);
                candidates
            })
            .collect();

        let table_len = 1usize << (k + 1);
        let mut stream = base;
        let tables = (0..n)
            .map(|_| {
                stream.jump();
                let mut rng = stream.clone();
                (0..table_len).map(|_| rng.gen::<f64>()).collect()
            })
            .collect();

        Ok(Self {
            n,
            k,
            seed,
            links,
            tables,
        })
    }

    /// Builds a landscape from explicit parts, checking every invariant.
    /// Unlike [`generate`](Self::generate), `n = 1` is allowed.
    pub fn from_parts(
        n: usize,
        k: usize,
        seed: u64,
        links: Vec<Vec<usize>>,
        tables: Vec<Vec<f64>>,
    ) -> Result<Self> {
        check_dimensions(n, k, 1).map_err(|e| match e {
            Error::Parameter(m) | Error::Capacity(m) => Error::format("n/k", m),
            other => other,
        })?;
        if links.len() != n {
            return Err(Error::format(
                "links",
                format!("expected {n} link lists, found {}", links.len()),
            ));
        }
        for (i, list) in links.iter().enumerate() {
            let field = format!("links[{i}]");
            if list.len() != k {
                return Err(Error::format(
                    field,
                    format!("expected {k} entries, found {}", list.len()),
                ));
            }
            for (j, &l) in list.iter().enumerate() {
                if l >= n {
                    return Err(Error::format(field, format!("locus {l} out of range")));
                }
                if l == i {
                    return Err(Error::format(field, "links a locus to itself"));
                }
                if list[..j].contains(&l) {
                    return Err(Error::format(field, format!("locus {l} repeated")));
                }
            }
        }
        if tables.len() != n {
            return Err(Error::format(
                "tables",
                format!("expected {n} tables, found {}", tables.len()),
            ));
        }
        let table_len = 1usize << (k + 1);
        for (i, table) in tables.iter().enumerate() {
            let field = format!("tables[{i}]");
            if table.len() != table_len {
                return Err(Error::format(
                    field,
                    format!("expected {table_len} entries, found {}", table.len()),
                ));
            }
            if let Some(v) = table.iter().find(|v| !(0.0..1.0).contains(*v)) {
                return Err(Error::format(field, format!("value {v} outside [0, 1)")));
            }
        }
        Ok(Self {
            n,
            k,
            seed,
            links,
            tables,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn links(&self) -> &[Vec<usize>] {
        &self.links
    }

    pub fn tables(&self) -> &[Vec<f64>] {
        &self.tables
    }

    pub fn fitness(&self, g: &Genotype) -> Result<f64> {
        if g.len() != self.n {
            return Err(Error::param(format!(
                "genotype has length {}, landscape expects {}",
                g.len(),
                self.n
            )));
        }
        Ok(self.fitness_of_index(g.index()))
    }

    /// Fitness of the genotype with the given index; bits above `n` are ignored.
    #[inline]
    pub fn fitness_of_index(&self, index: u64) -> f64 {
        let mut sum = 0.0;
        for (i, (links, table)) in self.links.iter().zip(&self.tables).enumerate() {
            let mut packed = ((index >> i) & 1) as usize;
            for (j, &l) in links.iter().enumerate() {
                packed |= (((index >> l) & 1) as usize) << (j + 1);
            }
            sum += table[packed];
        }
        sum / self.n as f64
    }

    pub fn to_writer<W: Write>(&self, writer: W) -> Result<()> {
        let file = LandscapeFile {
            format_version: LANDSCAPE_FORMAT_VERSION,
            n: self.n,
            k: self.k,
            seed: self.seed,
            links: self.links.clone(),
            tables: self.tables.clone(),
        };
        serde_json::to_writer(writer, &file)?;
        Ok(())
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let file: LandscapeFile = serde_json::from_reader(reader)
            .map_err(|e| Error::format("document", e.to_string()))?;
        if file.format_version != LANDSCAPE_FORMAT_VERSION {
            return Err(Error::format(
                "format_version",
                format!(
                    "unsupported version {} (expected {LANDSCAPE_FORMAT_VERSION})",
                    file.format_version
                ),
            ));
        }
        Self::from_parts(file.n, file.k, file.seed, file.links, file.tables)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.to_writer(&mut w)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_reader(BufReader::new(File::open(path)?))
    }
}
