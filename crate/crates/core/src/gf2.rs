//! Linear algebra over GF(2) on bit-packed coefficient vectors.
//!
//! A [`PartVector`] records which database parts take part in a cell's sum.
//! [`Basis`] keeps a reduced row-echelon basis that grows one vector at a
//! time, so span queries against a fixed set of cells are cheap to repeat.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// A length-`p` coefficient vector over GF(2).
///
/// Bit `i` is set iff part `x_{i+1}` appears in the combination.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartVector {
    words: Vec<u64>,
    len: usize,
}

impl PartVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(WORD_BITS)],
            len,
        }
    }

    /// The singleton `e_index` (0-based).
    ///
    /// # Panics
    /// Panics if `index >= len`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index);
        v
    }

    /// Builds a vector from 0-based part indices.
    ///
    /// Each index toggles its bit, so a repeated index cancels out the way
    /// repeated terms do over GF(2).
    pub fn from_indices<I>(len: usize, indices: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut v = Self::zeros(len);
        for i in indices {
            if i >= len {
                return Err(Error::Dimension {
                    expected: len,
                    found: i + 1,
                });
            }
            v.toggle(i);
        }
        Ok(v)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len, "bit {index} out of range for length {}", self.len);
        (self.words[index / WORD_BITS] >> (index % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, index: usize) {
        assert!(index < self.len, "bit {index} out of range for length {}", self.len);
        self.words[index / WORD_BITS] |= 1 << (index % WORD_BITS);
    }

    #[inline]
    pub fn toggle(&mut self, index: usize) {
        assert!(index < self.len, "bit {index} out of range for length {}", self.len);
        self.words[index / WORD_BITS] ^= 1 << (index % WORD_BITS);
    }

    /// Number of parts in the combination.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// The part index if this is a singleton.
    pub fn singleton_index(&self) -> Option<usize> {
        if self.weight() == 1 {
            self.lowest_set()
        } else {
            None
        }
    }

    pub fn is_singleton(&self) -> bool {
        self.weight() == 1
    }

    pub fn lowest_set(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * WORD_BITS + w.trailing_zeros() as usize)
    }

    /// Ascending 0-based indices of the set bits.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            core::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD_BITS + bit)
            })
        })
    }

    /// True iff every part of `self` also appears in `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn xor_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn or_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if self.len == len {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: len,
                found: self.len,
            })
        }
    }

    /// Cell order used inside a column: singletons first by part index,
    /// then sums ordered lexicographically by their ascending support.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        match (self.singleton_index(), other.singleton_index()) {
            (Some(a), Some(b)) => a.cmp(&b),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.support().cmp(other.support()),
        }
    }
}

impl fmt::Debug for PartVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartVector[{}](", self.len)?;
        for (n, i) in self.support().enumerate() {
            if n > 0 {
                f.write_str("+")?;
            }
            write!(f, "x{}", i + 1)?;
        }
        f.write_str(")")
    }
}

/// Reduced row-echelon basis of a GF(2) subspace.
///
/// Each row owns a pivot bit that is clear in every other row, so a single
/// pass over the rows reduces any vector to its canonical coset
/// representative.
#[derive(Clone, Debug)]
pub struct Basis {
    len: usize,
    rows: Vec<PartVector>,
    pivots: Vec<usize>,
}

impl Basis {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Basis of the span of `vectors`.
    pub fn spanning<'a, I>(len: usize, vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a PartVector>,
    {
        let mut basis = Self::new(len);
        for v in vectors {
            basis.insert(v)?;
        }
        Ok(basis)
    }

    /// Length of the vectors the basis lives among.
    pub fn dimension(&self) -> usize {
        self.len
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[PartVector] {
        &self.rows
    }

    fn reduce_in_place(&self, v: &mut PartVector) {
        for (row, &pivot) in self.rows.iter().zip(&self.pivots) {
            if v.get(pivot) {
                v.xor_assign(row);
            }
        }
    }

    /// Adds `v` to the spanning set. Returns whether the rank grew.
    pub fn insert(&mut self, v: &PartVector) -> Result<bool> {
        v.check_len(self.len)?;
        let mut r = v.clone();
        self.reduce_in_place(&mut r);
        let Some(pivot) = r.lowest_set() else {
            return Ok(false);
        };
        for row in &mut self.rows {
            if row.get(pivot) {
                row.xor_assign(&r);
            }
        }
        self.rows.push(r);
        self.pivots.push(pivot);
        Ok(true)
    }

    pub fn contains(&self, target: &PartVector) -> Result<bool> {
        target.check_len(self.len)?;
        let mut r = target.clone();
        self.reduce_in_place(&mut r);
        Ok(r.is_zero())
    }

    /// Whether the singleton `e_index` lies in the span.
    pub fn contains_unit(&self, index: usize) -> bool {
        // e_index reduces to zero iff some row equals e_index exactly, since
        // rows are fully reduced against each other's pivots.
        self.rows
            .iter()
            .zip(&self.pivots)
            .any(|(row, &pivot)| pivot == index && row.weight() == 1)
    }
}

fn common_len(vectors: &[PartVector]) -> Result<Option<usize>> {
    let Some(first) = vectors.first() else {
        return Ok(None);
    };
    for v in vectors {
        v.check_len(first.len)?;
    }
    Ok(Some(first.len))
}

/// GF(2) rank of a set of equal-length vectors.
pub fn rank(vectors: &[PartVector]) -> Result<usize> {
    match common_len(vectors)? {
        None => Ok(0),
        Some(len) => Ok(Basis::spanning(len, vectors)?.rank()),
    }
}

/// Whether `target` is a GF(2) combination of `vectors`.
pub fn in_span(vectors: &[PartVector], target: &PartVector) -> Result<bool> {
    let len = common_len(vectors)?.unwrap_or(target.len);
    Basis::spanning(len, vectors)?.contains(target)
}

/// Indices of a subset of `vectors` whose sum is `target`, if one exists.
pub fn solve_combination(vectors: &[PartVector], target: &PartVector) -> Result<Option<Vec<usize>>> {
    let len = target.len;
    for v in vectors {
        v.check_len(len)?;
    }
    // Augmented elimination: each row carries the set of inputs it sums.
    let n = vectors.len();
    let mut rows: Vec<(PartVector, PartVector, usize)> = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        let mut r = v.clone();
        let mut tag = PartVector::unit(n, idx);
        for (row, row_tag, pivot) in &rows {
            if r.get(*pivot) {
                r.xor_assign(row);
                tag.xor_assign(row_tag);
            }
        }
        if let Some(pivot) = r.lowest_set() {
            for (row, row_tag, _) in &mut rows {
                if row.get(pivot) {
                    row.xor_assign(&r);
                    row_tag.xor_assign(&tag);
                }
            }
            rows.push((r, tag, pivot));
        }
    }
    let mut r = target.clone();
    let mut tag = PartVector::zeros(n);
    for (row, row_tag, pivot) in &rows {
        if r.get(*pivot) {
            r.xor_assign(row);
            tag.xor_assign(row_tag);
        }
    }
    Ok(r.is_zero().then(|| tag.support().collect()))
}
