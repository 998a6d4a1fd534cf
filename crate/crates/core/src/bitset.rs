//! Fixed-width row sets over `[F]`.
//!
//! Every uncached set `A_k` is a `RowSet`. The bound engine spends nearly all
//! of its time intersecting these, so the representation is a flat word
//! vector with no per-element allocation.

use std::fmt;

/// Largest subpacketization accepted anywhere in the crate.
pub const MAX_ROWS: usize = 4096;

type Word = u64;
const WORD_BITS: usize = Word::BITS as usize;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowSet {
    len: usize,
    words: Vec<Word>,
}

impl RowSet {
    pub fn empty(len: usize) -> Self {
        RowSet {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::empty(len);
        for w in s.words.iter_mut() {
            *w = !0;
        }
        s.trim();
        s
    }

    pub fn from_rows<I: IntoIterator<Item = usize>>(len: usize, rows: I) -> Self {
        let mut s = Self::empty(len);
        for r in rows {
            s.insert(r);
        }
        s
    }

    /// Universe size `F` (not the cardinality).
    #[inline]
    pub fn universe(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn insert(&mut self, row: usize) {
        assert!(row < self.len, "row {row} out of range 0..{}", self.len);
        self.words[row / WORD_BITS] |= 1 << (row % WORD_BITS);
    }

    #[inline]
    pub fn remove(&mut self, row: usize) {
        assert!(row < self.len, "row {row} out of range 0..{}", self.len);
        self.words[row / WORD_BITS] &= !(1 << (row % WORD_BITS));
    }

    #[inline]
    pub fn contains(&self, row: usize) -> bool {
        row < self.len && self.words[row / WORD_BITS] & (1 << (row % WORD_BITS)) != 0
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// `|self ∩ other|` without materialising the intersection.
    #[inline]
    pub fn intersection_count(&self, other: &RowSet) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    #[inline]
    pub fn intersect_with(&mut self, other: &RowSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    #[inline]
    pub fn union_with(&mut self, other: &RowSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    #[inline]
    pub fn difference_with(&mut self, other: &RowSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn intersection(&self, other: &RowSet) -> RowSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    /// Writes `self ∩ other` into `out`, reusing its buffer.
    #[inline]
    pub fn intersection_into(&self, other: &RowSet, out: &mut RowSet) {
        debug_assert_eq!(self.len, other.len);
        out.len = self.len;
        out.words.clear();
        out.words
            .extend(self.words.iter().zip(&other.words).map(|(a, b)| a & b));
    }

    pub fn complement(&self) -> RowSet {
        let mut out = RowSet {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.trim();
        out
    }

    #[inline]
    pub fn is_subset(&self, other: &RowSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * WORD_BITS + bit)
            })
        })
    }

    /// Image of the set under a row relabelling `perm[old] = new`.
    pub fn permuted(&self, perm: &[usize]) -> RowSet {
        RowSet::from_rows(self.len, self.iter().map(|r| perm[r]))
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn trim(&mut self) {
        let extra = self.words.len() * WORD_BITS - self.len;
        if extra > 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= !0 >> extra;
            }
        }
    }
}

impl fmt::Debug for RowSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // 1-based, matching every external report.
        f.debug_set().entries(self.iter().map(|r| r + 1)).finish()
    }
}
