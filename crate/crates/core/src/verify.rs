//! Certifying the k-PIR property of an array code.
//!
//! Three routes:
//! - [`k_pir_exhaustive`]: exact maximum packing of disjoint recovery sets,
//!   by bitmask search over all column subsets (small `m` only).
//! - [`k_pir_pairs`]: singletons plus a maximum matching of the pair graph.
//!   Exact whenever optimal recovery sets have at most two columns, which
//!   holds for every built-in family; a lower bound otherwise.
//! - [`verify_plan`]: checks a supplied plan.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::arith::ExactRational;
use crate::error::{Error, Result};
use crate::gf2::Basis;
use crate::matching::{max_general_matching, PairGraph};
use crate::model::{ArrayCode, ColumnSet, RecoveryPlan};

/// Default column limit for [`k_pir_exhaustive`].
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum VerifyMode {
    Exhaustive,
    Pairs,
}

impl fmt::Display for VerifyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerifyMode::Exhaustive => "exhaustive",
            VerifyMode::Pairs => "pairs",
        })
    }
}

/// How far a reported `k` can be trusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Exactness {
    /// The maximum over all recovery-set packings.
    Exact,
    /// Exact for the built-in families, a lower bound for arbitrary codes.
    PairsLowerBound,
}

impl fmt::Display for Exactness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Exactness::Exact => "exact",
            Exactness::PairsLowerBound => "exact-for-family,lower-bound-in-general",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub mode: VerifyMode,
    pub exactness: Exactness,
    /// `k_i` per part.
    pub per_part: Vec<usize>,
    pub k: usize,
    pub m: usize,
    pub plan: RecoveryPlan,
    /// `min_u alpha_u + (m - alpha_u)/2`.
    pub singleton_bound: ExactRational,
}

impl VerifyReport {
    fn assemble(code: &ArrayCode, mode: VerifyMode, exactness: Exactness, plan: RecoveryPlan) -> Self {
        let per_part = plan.per_part_counts();
        Self {
            mode,
            exactness,
            k: plan.k(),
            per_part,
            m: code.m(),
            plan,
            singleton_bound: singleton_upper_bound(code),
        }
    }

    /// `k / m`.
    pub fn rate(&self) -> ExactRational {
        BigRational::new(BigInt::from(self.k), BigInt::from(self.m))
    }
}

/// Upper bound on `k` from the singleton census:
/// `min_u alpha_u + (m - alpha_u) / 2`.
///
/// A recovery set without a singleton `x_u` needs two or more columns, so
/// at most `alpha_u` sets have size one and the rest share `m - alpha_u`
/// columns.
pub fn singleton_upper_bound(code: &ArrayCode) -> ExactRational {
    let m = code.m() as i64;
    let best = code.singleton_census().into_iter().min().unwrap_or(0) as i64;
    BigRational::new(BigInt::from(m + best), BigInt::from(2))
}

/// Singleton columns of `part` plus a maximum matching on the remaining
/// columns, joining two columns when together they span `x_part`.
pub fn k_pir_pairs(code: &ArrayCode) -> VerifyReport {
    let bases: Vec<Basis> = code.columns().iter().map(|c| c.basis(code.p())).collect();
    let mut plan = RecoveryPlan::empty(code.p());
    for part in 0..code.p() {
        plan.set_part(part, pair_sets_for_part(code, &bases, part));
    }
    VerifyReport::assemble(code, VerifyMode::Pairs, Exactness::PairsLowerBound, plan)
}

fn pair_sets_for_part(code: &ArrayCode, bases: &[Basis], part: usize) -> Vec<ColumnSet> {
    let (singles, rest): (Vec<usize>, Vec<usize>) = (0..code.m()).partition(|&j| code.column(j).holds_singleton(part));
    let mut sets: Vec<ColumnSet> = singles.into_iter().map(ColumnSet::single).collect();

    let involved: Vec<bool> = rest.iter().map(|&j| code.column(j).involves(part)).collect();
    let mut graph = PairGraph::general(rest.clone());
    for a in 0..rest.len() {
        for b in a + 1..rest.len() {
            // A pair with neither column touching x_part cannot span it.
            if !involved[a] && !involved[b] {
                continue;
            }
            let mut joint = bases[rest[a]].clone();
            for cell in code.column(rest[b]).cells() {
                joint.insert(cell).expect("cells have length p");
            }
            if joint.contains_unit(part) {
                graph.add_edge(a, b).expect("fresh edge");
            }
        }
    }
    sets.extend(
        max_general_matching(&graph)
            .into_iter()
            .map(|(u, v)| ColumnSet::pair(u, v)),
    );
    sets
}

/// Exact `k` by maximum packing of minimal recovery sets, for codes with at
/// most `cap` columns.
pub fn k_pir_exhaustive(code: &ArrayCode, cap: usize) -> Result<VerifyReport> {
    let m = code.m();
    if m > cap {
        return Err(Error::CapExceeded {
            what: "exhaustive verification (use pair mode)",
            required: m.into(),
            cap: cap as u64,
        });
    }
    if m >= usize::BITS as usize - 1 {
        return Err(Error::Parameter(format!("{m} columns do not fit a bitmask")));
    }
    let full = (1usize << m) - 1;

    // Span of every column subset, built from the subset minus its lowest column.
    let mut spans: Vec<Basis> = Vec::with_capacity(full + 1);
    spans.push(Basis::new(code.p()));
    for mask in 1..=full {
        let low = mask.trailing_zeros() as usize;
        let mut basis = spans[mask & (mask - 1)].clone();
        for cell in code.column(low).cells() {
            basis.insert(cell)?;
        }
        spans.push(basis);
    }

    let mut plan = RecoveryPlan::empty(code.p());
    for part in 0..code.p() {
        let spanning: Vec<bool> = spans.iter().map(|b| b.contains_unit(part)).collect();
        // Minimal sets, bucketed by their lowest column.
        let mut by_low: Vec<Vec<usize>> = vec![Vec::new(); m];
        for mask in 1..=full {
            if spanning[mask] && bits(mask).all(|j| !spanning[mask & !(1 << j)]) {
                by_low[mask.trailing_zeros() as usize].push(mask);
            }
        }
        let mut packer = Packer {
            by_low: &by_low,
            memo: BTreeMap::new(),
        };
        packer.best(full);
        plan.set_part(part, packer.witness(full));
    }
    Ok(VerifyReport::assemble(
        code,
        VerifyMode::Exhaustive,
        Exactness::Exact,
        plan,
    ))
}

fn bits(mask: usize) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    core::iter::from_fn(move || {
        if rest == 0 {
            return None;
        }
        let j = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        Some(j)
    })
}

/// Depth-first packing of disjoint minimal sets, memoized on the set of
/// still-available columns.
struct Packer<'a> {
    by_low: &'a [Vec<usize>],
    /// available-mask -> (best count, chosen set or 0 for "skip lowest")
    memo: BTreeMap<usize, (usize, usize)>,
}

impl Packer<'_> {
    fn best(&mut self, avail: usize) -> usize {
        if avail == 0 {
            return 0;
        }
        if let Some(&(n, _)) = self.memo.get(&avail) {
            return n;
        }
        let low = avail.trailing_zeros() as usize;
        let mut best = (self.best(avail & !(1 << low)), 0);
        for &set in &self.by_low[low] {
            if set & avail == set {
                let n = 1 + self.best(avail & !set);
                if n > best.0 {
                    best = (n, set);
                }
            }
        }
        self.memo.insert(avail, best);
        best.0
    }

    fn witness(&self, mut avail: usize) -> Vec<ColumnSet> {
        let mut sets = Vec::new();
        while avail != 0 {
            let low = avail.trailing_zeros() as usize;
            match self.memo.get(&avail) {
                Some(&(_, set)) if set != 0 => {
                    sets.push(ColumnSet::new(bits(set)));
                    avail &= !set;
                }
                _ => avail &= !(1 << low),
            }
        }
        sets.sort();
        sets
    }
}

/// Why a plan failed [`verify_plan`]. Parts, sets, and columns are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanViolation {
    PartCount {
        expected: usize,
        found: usize,
    },
    ColumnOutOfRange {
        part: usize,
        set: usize,
        column: usize,
    },
    EmptySet {
        part: usize,
        set: usize,
    },
    DoesNotRecover {
        part: usize,
        set: usize,
    },
    Overlap {
        part: usize,
        first: usize,
        second: usize,
        column: usize,
    },
}

impl fmt::Display for PlanViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PlanViolation::PartCount { expected, found } => {
                write!(f, "plan covers {found} parts, code has {expected}")
            }
            PlanViolation::ColumnOutOfRange { part, set, column } => write!(
                f,
                "part {}: set {} names column {} which does not exist",
                part + 1,
                set + 1,
                column + 1
            ),
            PlanViolation::EmptySet { part, set } => {
                write!(f, "part {}: set {} is empty", part + 1, set + 1)
            }
            PlanViolation::DoesNotRecover { part, set } => {
                write!(f, "part {}: set {} does not span x_{}", part + 1, set + 1, part + 1)
            }
            PlanViolation::Overlap {
                part,
                first,
                second,
                column,
            } => write!(
                f,
                "part {}: sets {} and {} share column {}",
                part + 1,
                first + 1,
                second + 1,
                column + 1
            ),
        }
    }
}

impl PlanViolation {
    pub fn describe(&self) -> String {
        format!("{self}")
    }
}

/// Checks that every set spans its part and that sets for the same part
/// are pairwise disjoint. Returns the first violation found.
pub fn verify_plan(code: &ArrayCode, plan: &RecoveryPlan) -> core::result::Result<(), PlanViolation> {
    if plan.parts() != code.p() {
        return Err(PlanViolation::PartCount {
            expected: code.p(),
            found: plan.parts(),
        });
    }
    for part in 0..code.p() {
        let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
        for (idx, set) in plan.sets_for(part).iter().enumerate() {
            if set.is_empty() {
                return Err(PlanViolation::EmptySet { part, set: idx });
            }
            for column in set.iter() {
                if column >= code.m() {
                    return Err(PlanViolation::ColumnOutOfRange { part, set: idx, column });
                }
                if let Some(&first) = owner.get(&column) {
                    return Err(PlanViolation::Overlap {
                        part,
                        first,
                        second: idx,
                        column,
                    });
                }
                owner.insert(column, idx);
            }
            if !code.recovers(set.iter(), part) {
                return Err(PlanViolation::DoesNotRecover { part, set: idx });
            }
        }
    }
    Ok(())
}
