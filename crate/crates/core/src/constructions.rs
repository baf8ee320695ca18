//! Generators for the PIR array-code families.
//!
//! Every family splits its servers into types. Type 1 servers hold `t`
//! singletons; the other types hold `t - 1` singletons plus one sum cell.
//! Multiplicities are chosen so that, for each part `x_i`, the servers that
//! do not store `x_i` split into balanced bipartite graphs whose perfect
//! matchings pair them into recovery sets of size two.
//!
//! Server and recovery counts are always computed symbolically
//! ([`family_counts`]) before anything is materialized, so rates stay
//! available for parameters whose codes are far too large to build.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use itertools::Itertools;
use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{binomial, binomial_signed, gcd_all, ExactRational};
use crate::error::{Error, Result};
use crate::gf2::PartVector;
use crate::matching::PairGraph;
use crate::model::{ArrayCode, Column};

/// Default refusal threshold for materializing codes.
pub const DEFAULT_GENERATION_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Family {
    /// `s = 1 + d/t`: all t-subsets of singletons plus one-sum servers.
    C1,
    /// `s = 1 + 1/t`, `t` odd, `(3t+3)/2` servers.
    C2,
    /// `s = 1 + 1/t`, `t` even, `3t+3` servers.
    C3,
    /// Integer `s >= 2`.
    IntegerS,
    /// Non-integer rational `s > 2`.
    GeneralS,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::C1 => "c1",
            Family::C2 => "c2",
            Family::C3 => "c3",
            Family::IntegerS => "integer-s",
            Family::GeneralS => "general-s",
        })
    }
}

/// Validated construction parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionParams {
    family: Family,
    t: u64,
    p: u64,
    s: Ratio<u64>,
}

impl ConstructionParams {
    /// `s = 1 + d/t`, `1 <= d <= t`.
    pub fn c1(t: u64, d: u64) -> Result<Self> {
        if t == 0 {
            return Err(Error::Parameter("c1 needs t >= 1".into()));
        }
        if d == 0 || d > t {
            return Err(Error::Parameter(format!("c1 needs 1 <= d <= t, got d={d}, t={t}")));
        }
        Ok(Self {
            family: Family::C1,
            t,
            p: t + d,
            s: Ratio::new(t + d, t),
        })
    }

    pub fn c2(t: u64) -> Result<Self> {
        if t.is_multiple_of(2) || t < 3 {
            return Err(Error::Parameter(format!("c2 needs odd t >= 3, got t={t}")));
        }
        Ok(Self {
            family: Family::C2,
            t,
            p: t + 1,
            s: Ratio::new(t + 1, t),
        })
    }

    pub fn c3(t: u64) -> Result<Self> {
        if t % 2 == 1 || t < 2 {
            return Err(Error::Parameter(format!("c3 needs even t >= 2, got t={t}")));
        }
        Ok(Self {
            family: Family::C3,
            t,
            p: t + 1,
            s: Ratio::new(t + 1, t),
        })
    }

    pub fn integer_s(s: u64, t: u64) -> Result<Self> {
        if s < 2 || t == 0 {
            return Err(Error::Parameter(format!(
                "integer-s needs integer s >= 2 and t >= 1, got s={s}, t={t}"
            )));
        }
        Ok(Self {
            family: Family::IntegerS,
            t,
            p: s * t,
            s: Ratio::from_integer(s),
        })
    }

    pub fn general_s(s: Ratio<u64>, t: u64) -> Result<Self> {
        if s.is_integer() || s <= Ratio::from_integer(2) {
            return Err(Error::Parameter(format!(
                "general-s needs a non-integer s > 2, got s={s}"
            )));
        }
        if t < 2 {
            return Err(Error::Parameter(format!("general-s needs t >= 2, got t={t}")));
        }
        let p = s * Ratio::from_integer(t);
        if !p.is_integer() {
            return Err(Error::Parameter(format!("p = s*t = {p} is not an integer")));
        }
        Ok(Self {
            family: Family::GeneralS,
            t,
            p: p.to_integer(),
            s,
        })
    }

    /// Picks the family matching a rational `s`: `c1` for `1 < s <= 2`
    /// non-integer or `s = 2`, `integer-s` for integer `s >= 3`, and
    /// `general-s` otherwise.
    pub fn for_rate(s: Ratio<u64>, t: u64) -> Result<Self> {
        let p = s * Ratio::from_integer(t);
        if !p.is_integer() || t == 0 {
            return Err(Error::Parameter(format!("p = s*t = {p} is not a positive integer")));
        }
        let one = Ratio::from_integer(1);
        let two = Ratio::from_integer(2);
        if s <= one {
            Err(Error::Parameter(format!("s must exceed 1, got {s}")))
        } else if s <= two {
            Self::c1(t, p.to_integer() - t)
        } else if s.is_integer() {
            Self::integer_s(s.to_integer(), t)
        } else {
            Self::general_s(s, t)
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> Ratio<u64> {
        self.s
    }

    /// `d = p - t`.
    pub fn d(&self) -> u64 {
        self.p - self.t
    }

    /// `lcm(d, t)`, the multiplicity base of `c1`.
    pub fn theta(&self) -> u64 {
        self.d().lcm(&self.t)
    }

    /// Number of server types, `ceil(s)` for the general families.
    pub fn type_count(&self) -> u64 {
        match self.family {
            Family::C1 | Family::C2 | Family::C3 => 2,
            Family::IntegerS | Family::GeneralS => self.s.ceil().to_integer(),
        }
    }
}

/// Per-type server multiplicities `xi_1..xi_ceil(s)`, gcd-reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct XiVector(Vec<BigUint>);

impl XiVector {
    pub fn new(values: Vec<BigUint>) -> Self {
        Self(values)
    }

    pub fn from_u64s(values: &[u64]) -> Self {
        Self(values.iter().map(|&v| BigUint::from(v)).collect())
    }

    pub fn values(&self) -> &[BigUint] {
        &self.0
    }

    /// `xi_r` for 1-based `r`.
    pub fn get(&self, r: u64) -> &BigUint {
        &self.0[r as usize - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn gcd(&self) -> BigUint {
        gcd_all(&self.0)
    }

    fn as_u64(&self, r: u64) -> Result<u64> {
        self.get(r)
            .to_u64()
            .ok_or_else(|| Error::Parameter(format!("xi_{r} = {} is too large to materialize", self.get(r))))
    }
}

impl fmt::Display for XiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

fn u(n: u64) -> BigUint {
    BigUint::from(n)
}

/// Size of the sum cell of a type-`r` server (`r >= 2`).
fn sum_weight(params: &ConstructionParams, r: u64) -> u64 {
    let (p, t) = (params.p, params.t);
    if params.family == Family::GeneralS && r == params.type_count() {
        p - t + 1
    } else {
        (r - 1) * t + 1
    }
}

/// The ratios `xi_{r+1} / xi_r` for `r = 1..ceil(s)-1` imposed by the
/// balance equations of the general families.
fn balance_ratios(params: &ConstructionParams) -> Vec<BigRational> {
    let (p, t) = (params.p, params.t);
    let top = params.type_count();
    let ratio = |num: BigUint, den: BigUint| BigRational::new(num.into(), den.into());
    let mut ratios = Vec::new();
    match params.family {
        Family::IntegerS => {
            let s = params.s.to_integer();
            // (s-1) xi_1 = C(p-t, t) xi_2
            ratios.push(ratio(u(s - 1), binomial(p - t, t)));
            // C(p-t, (r-1)t+1) xi_r = C(p-t, rt) xi_{r+1},  2 <= r <= s-1
            for r in 2..s {
                ratios.push(ratio(binomial(p - t, (r - 1) * t + 1), binomial(p - t, r * t)));
            }
        }
        Family::GeneralS => {
            // (p-t) xi_1 = t C(p-t, t) xi_2
            ratios.push(ratio(u(p - t), u(t) * binomial(p - t, t)));
            // interior levels, 2 <= r <= ceil(s)-2
            for r in 2..top - 1 {
                ratios.push(ratio(binomial(p - t, (r - 1) * t + 1), binomial(p - t, r * t)));
            }
            // xi_{ceil(s)-1} C(p-t, (ceil(s)-2)t+1) = xi_{ceil(s)}
            ratios.push(ratio(binomial(p - t, (top - 2) * t + 1), BigUint::one()));
        }
        Family::C1 | Family::C2 | Family::C3 => {}
    }
    ratios
}

/// Smallest positive integer solution of the balance equations for the
/// integer-s or general-s family at `(s, t)`.
pub fn solve_xi(s: Ratio<u64>, t: u64) -> Result<XiVector> {
    let params = if s.is_integer() {
        ConstructionParams::integer_s(s.to_integer(), t)?
    } else {
        ConstructionParams::general_s(s, t)?
    };
    Ok(solve_xi_for(&params))
}

fn solve_xi_for(params: &ConstructionParams) -> XiVector {
    let mut xs = alloc::vec![BigRational::one()];
    for r in balance_ratios(params) {
        let next = xs.last().unwrap() * r;
        xs.push(next);
    }
    let denom_lcm = xs.iter().fold(num_bigint::BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigUint> = xs
        .iter()
        .map(|x| {
            (x * BigRational::from_integer(denom_lcm.clone()))
                .to_integer()
                .to_biguint()
                .expect("balance ratios are positive")
        })
        .collect();
    let g = gcd_all(&ints);
    XiVector(ints.into_iter().map(|v| v / &g).collect())
}

/// Checks that `xi` satisfies the balance equations of `params`' family.
pub fn check_xi(params: &ConstructionParams, xi: &XiVector) -> Result<()> {
    if !matches!(params.family, Family::IntegerS | Family::GeneralS) {
        return Err(Error::Parameter(format!(
            "family {} has no xi multiplicities",
            params.family
        )));
    }
    let top = params.type_count();
    if xi.len() as u64 != top {
        return Err(Error::Parameter(format!(
            "expected {top} multiplicities, got {}",
            xi.len()
        )));
    }
    if xi.values().iter().any(Zero::is_zero) {
        return Err(Error::Parameter("multiplicities must be positive".into()));
    }
    for (r, ratio) in (1..).zip(balance_ratios(params)) {
        // xi_{r+1} * den == xi_r * num
        let lhs = BigRational::from_integer(xi.get(r + 1).clone().into());
        let rhs = BigRational::from_integer(xi.get(r).clone().into()) * ratio;
        if lhs != rhs {
            return Err(Error::Parameter(format!(
                "xi = {xi} violates the balance equation between types {r} and {}",
                r + 1
            )));
        }
    }
    Ok(())
}

/// Symbolic sizes of a construction: `b` servers hold any given part as a
/// singleton, the remaining `m - b` are matched into `pairs` recovery pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyCounts {
    pub m: BigUint,
    pub singleton_servers: BigUint,
    pub pairs: BigUint,
    /// Servers per type, in type order.
    pub per_type: Vec<BigUint>,
}

impl FamilyCounts {
    pub fn k(&self) -> BigUint {
        &self.singleton_servers + &self.pairs
    }

    pub fn rate(&self) -> ExactRational {
        BigRational::new(self.k().into(), self.m.clone().into())
    }
}

/// Server counts without materializing the code. `xi` defaults to the
/// gcd-reduced solution for the general families and is ignored otherwise.
pub fn family_counts(params: &ConstructionParams, xi: Option<&XiVector>) -> Result<FamilyCounts> {
    let (p, t) = (params.p, params.t);
    let (pi, ti) = (p as i64, t as i64);
    match params.family {
        Family::C1 => {
            let d = params.d();
            let theta = params.theta();
            let (a_mult, b_mult) = (u(theta / d), u(theta / t));
            let type_a = binomial(p, t) * &a_mult;
            let type_b = binomial(p, t - 1) * &b_mult;
            let singles = binomial(t + d - 1, t - 1) * &a_mult + binomial_signed(ti + d as i64 - 1, ti - 2) * &b_mult;
            let pairs = binomial(t + d - 1, t) * &a_mult;
            Ok(FamilyCounts {
                m: &type_a + &type_b,
                singleton_servers: singles,
                pairs,
                per_type: alloc::vec![type_a, type_b],
            })
        }
        Family::C2 => Ok(FamilyCounts {
            m: u((3 * t + 3) / 2),
            singleton_servers: u(t + (t - 1) / 2),
            pairs: u(1),
            per_type: alloc::vec![u(t + 1), u(t.div_ceil(2))],
        }),
        Family::C3 => Ok(FamilyCounts {
            m: u(3 * t + 3),
            singleton_servers: u(2 * t + t - 1),
            pairs: u(2),
            per_type: alloc::vec![u(2 * (t + 1)), u(t + 1)],
        }),
        Family::IntegerS | Family::GeneralS => {
            let solved;
            let xi = match xi {
                Some(xi) => {
                    check_xi(params, xi)?;
                    xi
                }
                None => {
                    solved = solve_xi_for(params);
                    &solved
                }
            };
            let top = params.type_count();
            let mut per_type = alloc::vec![xi.get(1) * binomial(p, t)];
            let mut singles = xi.get(1) * binomial(p - 1, t - 1);
            let mut pairs = BigUint::zero();
            for r in 2..=top {
                let w = sum_weight(params, r);
                per_type.push(xi.get(r) * binomial(p, t - 1) * binomial(p - t + 1, w));
                singles += xi.get(r) * binomial_signed(pi - 1, ti - 2) * binomial(p - t + 1, w);
                // right side of the level r-1 graph: type r servers with x_i in the sum
                pairs += xi.get(r) * binomial(p - 1, t - 1) * binomial(p - t, w - 1);
            }
            let m = per_type.iter().sum();
            Ok(FamilyCounts {
                m,
                singleton_servers: singles,
                pairs,
                per_type,
            })
        }
    }
}

fn check_cap(params: &ConstructionParams, counts: &FamilyCounts, cap: u64) -> Result<()> {
    if counts.m > u(cap) {
        return Err(Error::CapExceeded {
            what: match params.family {
                Family::C1 => "construction c1",
                Family::C2 => "construction c2",
                Family::C3 => "construction c3",
                Family::IntegerS => "construction integer-s",
                Family::GeneralS => "construction general-s",
            },
            required: counts.m.clone(),
            cap,
        });
    }
    Ok(())
}

struct ColumnBuilder {
    p: usize,
    columns: Vec<Column>,
}

impl ColumnBuilder {
    fn new(p: u64) -> Self {
        Self {
            p: p as usize,
            columns: Vec::new(),
        }
    }

    /// Adds `copies` servers holding `singletons` plus an optional sum cell.
    fn push(&mut self, singletons: &[usize], sum: Option<&[usize]>, copies: u64) {
        let mut cells: Vec<PartVector> = singletons.iter().map(|&i| PartVector::unit(self.p, i)).collect();
        if let Some(parts) = sum {
            cells.push(PartVector::from_indices(self.p, parts.iter().copied()).expect("parts < p"));
        }
        let column = Column::new(cells);
        for _ in 0..copies {
            self.columns.push(column.clone());
        }
    }

    fn finish(self, t: u64) -> Result<ArrayCode> {
        ArrayCode::new(self.p, t as usize, self.columns)
    }
}

fn complement(p: usize, taken: &[usize]) -> Vec<usize> {
    (0..p).filter(|i| !taken.contains(i)).collect()
}

/// Materializes the code for `params`, refusing above `cap` columns.
pub fn build(params: &ConstructionParams, xi: Option<&XiVector>, cap: u64) -> Result<ArrayCode> {
    let counts = family_counts(params, xi)?;
    check_cap(params, &counts, cap)?;
    let (p, t) = (params.p as usize, params.t as usize);
    let mut out = ColumnBuilder::new(params.p);
    match params.family {
        Family::C1 => {
            let theta = params.theta();
            for a in (0..p).combinations(t) {
                out.push(&a, None, theta / params.d());
            }
            for b in (0..p).combinations(t - 1) {
                let rest = complement(p, &b);
                out.push(&b, Some(&rest), theta / params.t);
            }
        }
        Family::C2 => {
            for a in (0..p).combinations(t) {
                out.push(&a, None, 1);
            }
            for j in 0..p / 2 {
                let pair = [2 * j, 2 * j + 1];
                out.push(&complement(p, &pair), Some(&pair), 1);
            }
        }
        Family::C3 => {
            for a in (0..p).combinations(t) {
                out.push(&a, None, 2);
            }
            for j in 0..p {
                let pair = [j, (j + 1) % p];
                out.push(&complement(p, &pair), Some(&pair), 1);
            }
        }
        Family::IntegerS | Family::GeneralS => {
            let solved;
            let xi = match xi {
                Some(xi) => xi,
                None => {
                    solved = solve_xi_for(params);
                    &solved
                }
            };
            let xi1 = xi.as_u64(1)?;
            for a in (0..p).combinations(t) {
                out.push(&a, None, xi1);
            }
            for r in 2..=params.type_count() {
                let copies = xi.as_u64(r)?;
                let w = sum_weight(params, r) as usize;
                for singles in (0..p).combinations(t - 1) {
                    let rest = complement(p, &singles);
                    for sum in rest.iter().copied().combinations(w) {
                        out.push(&singles, Some(&sum), copies);
                    }
                }
            }
        }
    }
    out.finish(params.t)
}

pub fn build_c1(t: u64, d: u64) -> Result<ArrayCode> {
    build(&ConstructionParams::c1(t, d)?, None, DEFAULT_GENERATION_CAP)
}

pub fn build_c2(t: u64) -> Result<ArrayCode> {
    build(&ConstructionParams::c2(t)?, None, DEFAULT_GENERATION_CAP)
}

pub fn build_c3(t: u64) -> Result<ArrayCode> {
    build(&ConstructionParams::c3(t)?, None, DEFAULT_GENERATION_CAP)
}

pub fn build_integer_s(s: u64, t: u64, xi: &XiVector) -> Result<ArrayCode> {
    build(&ConstructionParams::integer_s(s, t)?, Some(xi), DEFAULT_GENERATION_CAP)
}

pub fn build_general_s(s: Ratio<u64>, t: u64, xi: &XiVector) -> Result<ArrayCode> {
    build(&ConstructionParams::general_s(s, t)?, Some(xi), DEFAULT_GENERATION_CAP)
}

/// One balanced pairing level for a fixed part: `left` holds type-`r`
/// servers not involving the part at all, `right` holds type-`r+1` servers
/// whose sum cell contains it. Edges join servers that jointly recover it.
#[derive(Clone, Debug)]
pub struct HallLevel {
    pub level: usize,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub graph: PairGraph,
}

/// The pairing levels of a generated code for `part`, plus any server that
/// neither stores the part as a singleton nor fits a level.
#[derive(Clone, Debug)]
pub struct HallLevels {
    pub levels: Vec<HallLevel>,
    pub unassigned: Vec<usize>,
}

/// Classifies servers by the size of their sum cell (type 1 has none) and
/// builds the bipartite graph between consecutive types for `part`.
///
/// Only meaningful for codes whose columns carry at most one sum cell.
pub fn hall_levels(code: &ArrayCode, part: usize) -> Result<HallLevels> {
    let mut weights = BTreeSet::new();
    let mut column_weight = Vec::with_capacity(code.m());
    for (j, col) in code.columns().iter().enumerate() {
        let sums: Vec<&PartVector> = col.non_singleton_cells().collect();
        match sums.as_slice() {
            [] => column_weight.push(None),
            [cell] => {
                weights.insert(cell.weight());
                column_weight.push(Some(cell.weight()));
            }
            _ => {
                return Err(Error::Contract(format!(
                    "column {} has {} sum cells; levels need at most one",
                    j + 1,
                    sums.len()
                )))
            }
        }
    }
    let weights: Vec<usize> = weights.into_iter().collect();
    let level_of = |j: usize| match column_weight[j] {
        None => 1,
        Some(w) => 2 + weights.binary_search(&w).unwrap(),
    };
    let top = weights.len() + 1;
    let mut left = alloc::vec![Vec::new(); top + 1];
    let mut right = alloc::vec![Vec::new(); top + 1];
    let mut unassigned = Vec::new();
    for (j, col) in code.columns().iter().enumerate() {
        if col.holds_singleton(part) {
            continue;
        }
        let level = level_of(j);
        if !col.involves(part) && level < top {
            left[level].push(j);
        } else if col.involves(part) && level >= 2 {
            right[level - 1].push(j);
        } else {
            unassigned.push(j);
        }
    }
    let mut levels = Vec::new();
    for r in 1..top {
        let (l, rt) = (core::mem::take(&mut left[r]), core::mem::take(&mut right[r]));
        let mut graph = PairGraph::bipartite(l.clone(), rt.clone());
        for (a, &u) in l.iter().enumerate() {
            for (b, &v) in rt.iter().enumerate() {
                if code.recovers([u, v], part) {
                    graph.add_edge(a, l.len() + b)?;
                }
            }
        }
        levels.push(HallLevel {
            level: r,
            left: l,
            right: rt,
            graph,
        });
    }
    Ok(HallLevels { levels, unassigned })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::max_bipartite_matching;

    fn r(n: u64, d: u64) -> Ratio<u64> {
        Ratio::new(n, d)
    }

    #[test]
    fn xi_integer_s3_t2() {
        assert_eq!(solve_xi(r(3, 1), 2).unwrap(), XiVector::from_u64s(&[3, 1, 4]));
    }

    #[test]
    fn xi_integer_s4_t2() {
        assert_eq!(solve_xi(r(4, 1), 2).unwrap(), XiVector::from_u64s(&[15, 3, 4, 24]));
    }

    #[test]
    fn xi_general_five_halves() {
        assert_eq!(solve_xi(r(5, 2), 2).unwrap(), XiVector::from_u64s(&[2, 1, 1]));
    }

    #[test]
    fn xi_general_seven_halves_satisfies_equations() {
        let xi = solve_xi(r(7, 2), 2).unwrap();
        assert_eq!(xi.len(), 4);
        assert!(xi.gcd().is_one());
        // p = 7, p - t = 5: 5 xi_1 = 2 C(5,2) xi_2; C(5,3) xi_2 = C(5,4) xi_3; xi_3 C(5,5) = xi_4
        let v: Vec<u64> = xi.values().iter().map(|x| x.to_u64().unwrap()).collect();
        assert_eq!(5 * v[0], 2 * 10 * v[1]);
        assert_eq!(10 * v[1], 5 * v[2]);
        assert_eq!(v[2], v[3]);
        check_xi(&ConstructionParams::general_s(r(7, 2), 2).unwrap(), &xi).unwrap();
    }

    #[test]
    fn xi_matches_closed_choices_up_to_scale() {
        // s = 3: (C(2t-1,t-1), 1, C(2t,t-1)); s = 4: ((t+1)C(3t-1,t-1), t+1, 2t, 2t C(3t,t-1))
        for t in 2..=8u64 {
            let p3 = ConstructionParams::integer_s(3, t).unwrap();
            let c3 = XiVector::new(alloc::vec![binomial(2 * t - 1, t - 1), u(1), binomial(2 * t, t - 1)]);
            check_xi(&p3, &c3).unwrap();
            let p4 = ConstructionParams::integer_s(4, t).unwrap();
            let c4 = XiVector::new(alloc::vec![
                u(t + 1) * binomial(3 * t - 1, t - 1),
                u(t + 1),
                u(2 * t),
                u(2 * t) * binomial(3 * t, t - 1),
            ]);
            check_xi(&p4, &c4).unwrap();
        }
    }

    #[test]
    fn xi_rejects_bad_parameters() {
        assert!(solve_xi(r(5, 2), 3).is_err());
        assert!(solve_xi(r(3, 2), 2).is_err());
        assert!(solve_xi(r(1, 1), 2).is_err());
        let params = ConstructionParams::integer_s(3, 2).unwrap();
        assert!(check_xi(&params, &XiVector::from_u64s(&[3, 1, 5])).is_err());
        assert!(check_xi(&params, &XiVector::from_u64s(&[3, 1])).is_err());
    }

    #[test]
    fn c1_counts() {
        let c = family_counts(&ConstructionParams::c1(2, 2).unwrap(), None).unwrap();
        assert_eq!((c.m.clone(), c.k()), (u(10), u(7)));
        let c = family_counts(&ConstructionParams::c1(2, 1).unwrap(), None).unwrap();
        assert_eq!((c.m.clone(), c.k()), (u(9), u(7)));
        let c = family_counts(&ConstructionParams::c1(1, 1).unwrap(), None).unwrap();
        assert_eq!((c.m.clone(), c.k()), (u(3), u(2)));
    }

    #[test]
    fn c1_rejects_d_out_of_range() {
        assert!(ConstructionParams::c1(2, 0).is_err());
        assert!(ConstructionParams::c1(2, 3).is_err());
    }

    #[test]
    fn c1_smallest_instance() {
        let code = build_c1(1, 1).unwrap();
        assert_eq!(code.m(), 3);
        let weights: Vec<usize> = code.columns().iter().map(|c| c.cells()[0].weight()).collect();
        assert_eq!(weights, [1, 1, 2]);
    }

    #[test]
    fn c1_census_is_four_per_part() {
        // three Type A columns plus one Type B column per part
        let code = build_c1(2, 2).unwrap();
        assert_eq!(code.m(), 10);
        assert_eq!(code.singleton_census(), [4, 4, 4, 4]);
    }

    #[test]
    fn c2_c3_parity_checks() {
        assert!(ConstructionParams::c2(4).is_err());
        assert!(ConstructionParams::c2(1).is_err());
        assert!(ConstructionParams::c3(3).is_err());
        assert_eq!(build_c2(3).unwrap().m(), 6);
        assert_eq!(build_c2(5).unwrap().m(), 9);
        assert_eq!(build_c3(2).unwrap().m(), 9);
        assert_eq!(build_c3(4).unwrap().m(), 15);
    }

    #[test]
    fn c2_first_pair_recovers_x1() {
        let code = build_c2(3).unwrap();
        let omit_x1 = code
            .columns()
            .iter()
            .position(|c| c.is_all_singletons() && !c.involves(0))
            .unwrap();
        let holds_sum = code
            .columns()
            .iter()
            .position(|c| c.non_singleton_cells().any(|cell| cell.get(0) && cell.get(1)))
            .unwrap();
        assert!(code.recovers([omit_x1, holds_sum], 0));
        assert!(!code.recovers([omit_x1], 0));
    }

    #[test]
    fn integer_s_counts_and_build() {
        let xi = XiVector::from_u64s(&[3, 1, 4]);
        let params = ConstructionParams::integer_s(3, 2).unwrap();
        let c = family_counts(&params, Some(&xi)).unwrap();
        assert_eq!(c.per_type, [u(45), u(60), u(24)]);
        assert_eq!(
            (c.m.clone(), c.singleton_servers.clone(), c.pairs.clone()),
            (u(129), u(29), u(50))
        );
        assert_eq!(build_integer_s(3, 2, &xi).unwrap().m(), 129);
        let s2 = build_integer_s(2, 2, &XiVector::from_u64s(&[1, 1])).unwrap();
        assert_eq!(s2.m(), 10);
        let tiny = build_integer_s(2, 1, &XiVector::from_u64s(&[1, 1])).unwrap();
        assert_eq!(tiny.m(), 3);
    }

    #[test]
    fn general_s_counts() {
        let xi = XiVector::from_u64s(&[2, 1, 1]);
        let params = ConstructionParams::general_s(r(5, 2), 2).unwrap();
        let c = family_counts(&params, Some(&xi)).unwrap();
        assert_eq!(c.per_type, [u(20), u(20), u(5)]);
        assert_eq!(
            (c.m.clone(), c.singleton_servers.clone(), c.pairs.clone()),
            (u(45), u(13), u(16))
        );
        let code = build_general_s(r(5, 2), 2, &xi).unwrap();
        assert_eq!(code.m(), 45);
    }

    #[test]
    fn cap_refuses_with_count() {
        let params = ConstructionParams::integer_s(3, 2).unwrap();
        match build(&params, None, 100) {
            Err(Error::CapExceeded { required, cap, .. }) => {
                assert_eq!(required, u(129));
                assert_eq!(cap, 100);
            }
            other => panic!("expected cap refusal, got {other:?}"),
        }
    }

    #[test]
    fn every_column_has_at_most_one_sum() {
        let codes = [
            build_c1(3, 2).unwrap(),
            build_c2(5).unwrap(),
            build_c3(4).unwrap(),
            build_integer_s(3, 2, &XiVector::from_u64s(&[3, 1, 4])).unwrap(),
            build_general_s(r(5, 2), 2, &XiVector::from_u64s(&[2, 1, 1])).unwrap(),
        ];
        for code in &codes {
            for col in code.columns() {
                assert_eq!(col.cells().len(), code.t());
                assert!(col.non_singleton_cells().count() <= 1);
            }
        }
    }

    #[test]
    fn hall_levels_balance_and_match() {
        let codes = [
            build_c1(2, 2).unwrap(),
            build_c1(3, 2).unwrap(),
            build_c2(3).unwrap(),
            build_c3(2).unwrap(),
            build_integer_s(3, 2, &XiVector::from_u64s(&[3, 1, 4])).unwrap(),
            build_general_s(r(5, 2), 2, &XiVector::from_u64s(&[2, 1, 1])).unwrap(),
        ];
        for code in &codes {
            for part in 0..code.p() {
                let levels = hall_levels(code, part).unwrap();
                assert!(levels.unassigned.is_empty());
                for lvl in &levels.levels {
                    assert_eq!(lvl.left.len(), lvl.right.len(), "level {}", lvl.level);
                    let matching = max_bipartite_matching(&lvl.graph).unwrap();
                    assert_eq!(matching.len(), lvl.left.len());
                }
            }
        }
    }

    #[test]
    fn c1_first_part_graph_is_three_by_three() {
        let code = build_c1(2, 2).unwrap();
        let levels = hall_levels(&code, 0).unwrap();
        assert_eq!(levels.levels.len(), 1);
        assert_eq!(levels.levels[0].left.len(), 3);
        assert_eq!(levels.levels[0].right.len(), 3);
    }
}
