//! Bipartitions of an n-party system and the canonical balanced set.
//!
//! Party membership is a bitmask: qubit (or mode) `k`, counted from 1, is
//! bit `k - 1`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest party count a mask can describe.
pub const MAX_PARTIES: usize = 32;

/// A split of `n` parties into A (the mask) and its complement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bipartition {
    n: usize,
    mask: u32,
}

impl Bipartition {
    /// Party A given by `mask`. Both A and its complement must be non-empty.
    pub fn new(n: usize, mask: u32) -> Result<Self> {
        if !(2..=MAX_PARTIES).contains(&n) {
            return Err(Error::InvalidBipartition(format!(
                "party count {n} outside 2..={MAX_PARTIES}"
            )));
        }
        let full = full_mask(n);
        if mask & !full != 0 {
            return Err(Error::InvalidBipartition(format!(
                "mask {mask:#b} has bits beyond {n} parties"
            )));
        }
        if mask == 0 || mask == full {
            return Err(Error::InvalidBipartition(
                "both sides must be non-empty".into(),
            ));
        }
        Ok(Self { n, mask })
    }

    /// Party A from 1-based indices.
    pub fn from_parties(n: usize, parties: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for &k in parties {
            if k == 0 || k > n {
                return Err(Error::InvalidBipartition(format!(
                    "index {k} outside 1..={n}"
                )));
            }
            if mask & (1 << (k - 1)) != 0 {
                return Err(Error::InvalidBipartition(format!("duplicate index {k}")));
            }
            mask |= 1 << (k - 1);
        }
        Self::new(n, mask)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    /// Size of party A.
    pub fn size(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn contains(&self, party: usize) -> bool {
        party >= 1 && party <= self.n && self.mask & (1 << (party - 1)) != 0
    }

    /// Sorted 1-based indices of party A.
    pub fn parties(&self) -> Vec<usize> {
        (1..=self.n).filter(|&k| self.contains(k)).collect()
    }

    /// Sorted 0-based indices of party A.
    pub(crate) fn zero_based(&self) -> Vec<usize> {
        (0..self.n).filter(|&k| self.mask & (1 << k) != 0).collect()
    }

    pub fn complement(&self) -> Self {
        Self {
            n: self.n,
            mask: full_mask(self.n) & !self.mask,
        }
    }

    /// Orientation with the smaller side as A; for equal sizes, the side holding party 1.
    pub fn canonical(&self) -> Self {
        let size = self.size();
        let flip = 2 * size > self.n || (2 * size == self.n && self.mask & 1 == 0);
        if flip {
            self.complement()
        } else {
            *self
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical() == *self
    }

    /// |A| = floor(n/2).
    pub fn is_balanced(&self) -> bool {
        let s = self.canonical().size();
        s == self.n / 2
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.parties())
    }
}

pub(crate) fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// The canonical balanced bipartitions of `n` parties, in ascending mask order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartitionSet {
    n: usize,
    members: Vec<Bipartition>,
}

impl BipartitionSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[Bipartition] {
        &self.members
    }

    /// Number of members, K.
    pub fn k(&self) -> usize {
        self.members.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Bipartition> {
        self.members.iter()
    }

    /// Position of `b` (in either orientation) within the set.
    pub fn index_of(&self, b: &Bipartition) -> Option<usize> {
        let c = b.canonical();
        self.members.binary_search(&c).ok()
    }
}

impl<'a> IntoIterator for &'a BipartitionSet {
    type Item = &'a Bipartition;
    type IntoIter = std::slice::Iter<'a, Bipartition>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

/// All balanced bipartitions with |A| = floor(n/2), each unordered split once.
///
/// For odd `n` this is every subset of size (n-1)/2; for even `n` only the
/// subsets that contain party 1.
pub fn enumerate_balanced(n: usize) -> Result<BipartitionSet> {
    if n < 2 {
        return Err(Error::InvalidQubitCount {
            n,
            reason: "balanced bipartitions need at least 2 parties",
        });
    }
    if n > 24 {
        return Err(Error::InvalidQubitCount {
            n,
            reason: "enumeration limited to 24 parties",
        });
    }
    let half = (n / 2) as u32;
    let even = n.is_multiple_of(2);
    // Gosper's hack walks the masks of a fixed popcount in ascending order.
    let count = binomial(n, n / 2) / if even { 2 } else { 1 };
    let mut members = Vec::with_capacity(count as usize);
    let limit = 1u64 << n;
    let mut mask: u64 = (1u64 << half) - 1;
    while mask < limit {
        if !even || mask & 1 == 1 {
            members.push(Bipartition {
                n,
                mask: mask as u32,
            });
        }
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    Ok(BipartitionSet { n, members })
}

pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}
