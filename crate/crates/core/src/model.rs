//! The `[t x m, p]` array-code model and recovery plans.
//!
//! Columns are servers, cells are GF(2) combinations of the parts
//! `x_1..x_p`. An [`ArrayCode`] can only be built in a state where every
//! column has full rank `t` and stores `x_i` as a cell whenever it can derive
//! `x_i` on its own.

use alloc::format;
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::gf2::{Basis, PartVector};

/// One server: its `t` cells in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Column {
    cells: Vec<PartVector>,
}

impl Column {
    /// Sorts `cells` into canonical order. No validation happens here; see
    /// [`ArrayCode::new`].
    pub fn new(mut cells: Vec<PartVector>) -> Self {
        cells.sort_by(|a, b| a.canonical_cmp(b));
        Self { cells }
    }

    pub fn cells(&self) -> &[PartVector] {
        &self.cells
    }

    /// Whether `e_part` is stored verbatim.
    pub fn holds_singleton(&self, part: usize) -> bool {
        self.cells.iter().any(|c| c.singleton_index() == Some(part))
    }

    /// Whether `x_part` appears anywhere, as a singleton or inside a sum.
    pub fn involves(&self, part: usize) -> bool {
        self.cells.iter().any(|c| c.get(part))
    }

    pub fn non_singleton_cells(&self) -> impl Iterator<Item = &PartVector> {
        self.cells.iter().filter(|c| !c.is_singleton())
    }

    pub fn is_all_singletons(&self) -> bool {
        self.cells.iter().all(PartVector::is_singleton)
    }

    pub fn basis(&self, p: usize) -> Basis {
        Basis::spanning(p, &self.cells).expect("column cells have length p")
    }
}

/// A validated `[t x m, p]` array code over GF(2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrayCode {
    p: usize,
    t: usize,
    columns: Vec<Column>,
}

impl ArrayCode {
    /// Validates and builds a code. Column order is kept; cells inside each
    /// column are put in canonical order.
    pub fn new(p: usize, t: usize, columns: Vec<Column>) -> Result<Self> {
        if p == 0 || t == 0 {
            return Err(Error::InvalidCode(format!("p={p} and t={t} must be positive")));
        }
        if t > p {
            return Err(Error::InvalidCode(format!("t={t} exceeds p={p}")));
        }
        for (j, col) in columns.iter().enumerate() {
            let col_no = j + 1;
            if col.cells.len() != t {
                return Err(Error::InvalidCode(format!(
                    "column {col_no} has {} cells, expected {t}",
                    col.cells.len()
                )));
            }
            for cell in &col.cells {
                if cell.len() != p {
                    return Err(Error::Dimension {
                        expected: p,
                        found: cell.len(),
                    });
                }
                if cell.is_zero() {
                    return Err(Error::InvalidCode(format!("column {col_no} has a zero cell")));
                }
            }
            let basis = col.basis(p);
            if basis.rank() != t {
                return Err(Error::InvalidCode(format!(
                    "column {col_no} has rank {}, expected {t}",
                    basis.rank()
                )));
            }
            for i in 0..p {
                if basis.contains_unit(i) && !col.holds_singleton(i) {
                    return Err(Error::InvalidCode(format!(
                        "column {col_no} spans x_{} without storing it as a singleton",
                        i + 1
                    )));
                }
            }
        }
        Ok(Self { p, t, columns })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Number of servers.
    pub fn m(&self) -> usize {
        self.columns.len()
    }

    /// `s = p / t`.
    pub fn s(&self) -> Ratio<usize> {
        Ratio::new(self.p, self.t)
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &Column {
        &self.columns[j]
    }

    /// Basis of the span of all cells in the given columns.
    pub fn span_of<I>(&self, columns: I) -> Basis
    where
        I: IntoIterator<Item = usize>,
    {
        let mut basis = Basis::new(self.p);
        for j in columns {
            for cell in &self.columns[j].cells {
                basis.insert(cell).expect("cells have length p");
            }
        }
        basis
    }

    /// Whether the columns jointly recover `x_part`.
    pub fn recovers<I>(&self, columns: I, part: usize) -> bool
    where
        I: IntoIterator<Item = usize>,
    {
        self.span_of(columns).contains_unit(part)
    }

    /// `alpha_i`: how many columns hold `x_i` as a singleton cell.
    pub fn singleton_census(&self) -> Vec<usize> {
        let mut alpha = alloc::vec![0; self.p];
        for col in &self.columns {
            for cell in &col.cells {
                if let Some(i) = cell.singleton_index() {
                    alpha[i] += 1;
                }
            }
        }
        alpha
    }
}

/// A set of columns (0-based, ascending, no repeats).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ColumnSet(Vec<usize>);

impl ColumnSet {
    pub fn new<I: IntoIterator<Item = usize>>(columns: I) -> Self {
        let mut v: Vec<usize> = columns.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    pub fn single(column: usize) -> Self {
        Self(alloc::vec![column])
    }

    pub fn pair(a: usize, b: usize) -> Self {
        Self::new([a, b])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }
}

/// For each part, a list of column sets meant to be pairwise disjoint and
/// each able to recover that part.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RecoveryPlan {
    sets: Vec<Vec<ColumnSet>>,
}

impl RecoveryPlan {
    /// A plan for `p` parts with no sets yet.
    pub fn empty(p: usize) -> Self {
        Self {
            sets: alloc::vec![Vec::new(); p],
        }
    }

    pub fn from_sets(sets: Vec<Vec<ColumnSet>>) -> Self {
        Self { sets }
    }

    pub fn parts(&self) -> usize {
        self.sets.len()
    }

    pub fn sets_for(&self, part: usize) -> &[ColumnSet] {
        &self.sets[part]
    }

    pub fn push(&mut self, part: usize, set: ColumnSet) {
        self.sets[part].push(set);
    }

    pub fn set_part(&mut self, part: usize, sets: Vec<ColumnSet>) {
        self.sets[part] = sets;
    }

    /// `k_i` for each part.
    pub fn per_part_counts(&self) -> Vec<usize> {
        self.sets.iter().map(Vec::len).collect()
    }

    /// `k = min_i k_i`; zero for a plan with no parts.
    pub fn k(&self) -> usize {
        self.sets.iter().map(Vec::len).min().unwrap_or(0)
    }
}
