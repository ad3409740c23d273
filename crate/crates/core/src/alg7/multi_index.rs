use std::cmp::Ordering;
use std::fmt;
use std::sync::LazyLock;

use crate::error::{Error, Result};
use crate::DIM;

/// Strictly increasing index tuple over `1..=7`, stored as a bit set
/// (bit `i` is the 1-based index `i + 1`).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiIndex(u8);

struct Tables {
    by_degree: Vec<Vec<MultiIndex>>,
    rank: [usize; 128],
}

static TABLES: LazyLock<Tables> = LazyLock::new(|| {
    let mut by_degree: Vec<Vec<MultiIndex>> = vec![Vec::new(); DIM + 1];
    for mask in 0u8..128 {
        let mi = MultiIndex(mask);
        by_degree[mi.degree()].push(mi);
    }
    let mut rank = [0usize; 128];
    for list in by_degree.iter_mut() {
        list.sort();
        for (r, mi) in list.iter().enumerate() {
            rank[mi.0 as usize] = r;
        }
    }
    Tables { by_degree, rank }
});

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex(0);
    pub const FULL: MultiIndex = MultiIndex(0x7f);

    /// From strictly increasing 1-based indices.
    pub fn new(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u8;
        let mut last = 0usize;
        for &i in indices {
            if i == 0 || i > DIM || i <= last {
                return Err(Error::Degree(format!(
                    "indices must be strictly increasing in 1..=7, got {indices:?}"
                )));
            }
            mask |= 1 << (i - 1);
            last = i;
        }
        Ok(MultiIndex(mask))
    }

    pub fn from_mask(mask: u8) -> Self {
        debug_assert!(mask < 128);
        MultiIndex(mask & 0x7f)
    }

    /// Single 0-based axis.
    pub fn axis(i: usize) -> Self {
        MultiIndex(1 << i)
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn zero_based(self) -> impl Iterator<Item = usize> {
        (0..DIM).filter(move |i| self.0 & (1 << i) != 0)
    }

    /// 1-based indices in increasing order.
    pub fn indices(self) -> Vec<usize> {
        self.zero_based().map(|i| i + 1).collect()
    }

    pub fn complement(self) -> Self {
        MultiIndex(!self.0 & 0x7f)
    }

    pub fn without(self, i: usize) -> Self {
        MultiIndex(self.0 & !(1 << i))
    }

    pub fn with(self, i: usize) -> Self {
        MultiIndex(self.0 | (1 << i))
    }

    pub fn is_disjoint(self, other: MultiIndex) -> bool {
        self.0 & other.0 == 0
    }

    /// Sign of the permutation sorting the concatenation `self ++ other`,
    /// or `None` if the two overlap.
    pub fn wedge_sign(self, other: MultiIndex) -> Option<i8> {
        if !self.is_disjoint(other) {
            return None;
        }
        let mut inversions = 0u32;
        for j in other.zero_based() {
            // entries of self sitting above j must hop over it
            inversions += (self.0 >> (j + 1)).count_ones();
        }
        Some(if inversions.is_multiple_of(2) { 1 } else { -1 })
    }

    /// Position of 0-based index `i` inside the tuple, if present.
    pub fn position(self, i: usize) -> Option<usize> {
        if self.contains(i) {
            Some((self.0 & ((1u8 << i) - 1)).count_ones() as usize)
        } else {
            None
        }
    }

    /// Rank among the multi-indices of the same degree (lexicographic).
    pub fn rank(self) -> usize {
        TABLES.rank[self.0 as usize]
    }

    /// All multi-indices of degree `k`, lexicographically ordered.
    pub fn all_of_degree(k: usize) -> &'static [MultiIndex] {
        &TABLES.by_degree[k]
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.zero_based().cmp(other.zero_based()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e")?;
        if self.0 == 0 {
            return write!(f, "()");
        }
        for i in self.indices() {
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
