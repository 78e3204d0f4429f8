use crate::error::{Error, Result};

/// Longest genotype representable by [`Genotype`].
pub const MAX_GENOTYPE_LEN: usize = 64;

/// A binary string of length `len`, stored as the integer whose binary
/// representation equals the bits. Locus 0 is the least significant bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Genotype {
    index: u64,
    len: u8,
}

impl Genotype {
    pub fn new(index: u64, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_GENOTYPE_LEN {
            return Err(Error::param(format!(
                "genotype length {len} outside 1..={MAX_GENOTYPE_LEN}"
            )));
        }
        if len < 64 && index >> len != 0 {
            return Err(Error::param(format!(
                "index {index} does not fit in {len} bits"
            )));
        }
        Ok(Self {
            index,
            len: len as u8,
        })
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let index = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i));
        Self::new(index, bits.len())
    }

    pub(crate) fn from_index_unchecked(index: u64, len: usize) -> Self {
        debug_assert!((1..=MAX_GENOTYPE_LEN).contains(&len));
        Self {
            index,
            len: len as u8,
        }
    }

    #[inline]
    pub fn index(&self) -> u64 {
        self.index
    }

    #[inline]
    pub fn len(&self) -> usize {
        usize::from(self.len)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn bit(&self, locus: usize) -> bool {
        (self.index >> locus) & 1 == 1
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.len()).map(|i| self.bit(i)).collect()
    }

    /// Returns a copy with `locus` flipped.
    #[inline]
    pub fn flip(&self, locus: usize) -> Self {
        debug_assert!(locus < self.len());
        Self {
            index: self.index ^ (1u64 << locus),
            len: self.len,
        }
    }

    pub fn hamming_distance(&self, other: &Genotype) -> u32 {
        (self.index ^ other.index).count_ones()
    }
}

impl std::fmt::Display for Genotype {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}
