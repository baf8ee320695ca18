//! Closed-form rate bounds, evaluated exactly.
//!
//! Upper bounds on `g(s, t)` (the best PIR rate `k/m` for given `s` and `t`)
//! and the rates achieved by the constructions, all as reduced fractions.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};

use crate::arith::{binomial, ceil, rational, ExactRational};
use crate::constructions::{family_counts, solve_xi, ConstructionParams};
use crate::error::{Error, Result};

fn big(r: Ratio<u64>) -> ExactRational {
    rational(*r.numer(), *r.denom())
}

fn p_of(s: Ratio<u64>, t: u64) -> Result<u64> {
    let p = s * Ratio::from_integer(t);
    if t == 0 || !p.is_integer() {
        return Err(Error::Domain(format!(
            "p = s*t must be a positive integer (s={s}, t={t})"
        )));
    }
    Ok(p.to_integer())
}

/// `(s+1) / (2s)`, the limit of `g(s, t)` as `t` grows.
pub fn upper_g_s(s: Ratio<u64>) -> Result<ExactRational> {
    if s <= Ratio::one() {
        return Err(Error::Domain(format!("s must exceed 1, got {s}")));
    }
    let s = big(s);
    Ok((&s + BigRational::one()) / (s * rational(2, 1)))
}

/// `((2d+1)t + d^2) / ((t+d)(2d+1))`, an upper bound on `g(1 + d/t, t)`.
///
/// Defined for `t >= 2`, `d >= 1`, and at `t = d = 1`, where it is the exact
/// value `g(2, 1) = 2/3`.
pub fn upper_g_st(t: u64, d: u64) -> Result<ExactRational> {
    if d < 1 || (t < 2 && (t, d) != (1, 1)) {
        return Err(Error::Domain(format!("need t >= 2 and d >= 1, got t={t}, d={d}")));
    }
    let (t, d) = (BigInt::from(t), BigInt::from(d));
    let two_d1 = &d * 2 + 1;
    Ok(BigRational::new(&two_d1 * &t + &d * &d, (&t + &d) * two_d1))
}

/// `(l*delta^2 + tau + 2*l*t) / (2*l*delta^2 + delta + tau + 2*l*t)` with
/// `t = l*tau`, as printed for `s = 1 + delta/tau`.
///
/// Only agrees with [`upper_g_st`] when `l == delta`; see
/// [`corollary_bound_substituted`] for the form that follows from it.
pub fn corollary_bound(delta: u64, tau: u64, ell: u64) -> Result<ExactRational> {
    check_corollary_inputs(delta, tau, ell)?;
    let (dl, tau, ell) = (BigInt::from(delta), BigInt::from(tau), BigInt::from(ell));
    let t = &ell * &tau;
    let ld2 = &ell * &dl * &dl;
    let num = &ld2 + &tau + &ell * &t * 2;
    let den = &ld2 * 2 + &dl + &tau + &ell * &t * 2;
    Ok(BigRational::new(num, den))
}

/// [`upper_g_st`] at `t = l*tau`, `d = l*delta`:
/// `(l*delta^2 + tau + 2*l*delta*tau) / (2*l*delta^2 + delta + tau + 2*l*delta*tau)`.
pub fn corollary_bound_substituted(delta: u64, tau: u64, ell: u64) -> Result<ExactRational> {
    check_corollary_inputs(delta, tau, ell)?;
    let (dl, tau, ell) = (BigInt::from(delta), BigInt::from(tau), BigInt::from(ell));
    let ld2 = &ell * &dl * &dl;
    let cross = &ell * &dl * &tau * 2;
    Ok(BigRational::new(&ld2 + &tau + &cross, &ld2 * 2 + &dl + &tau + &cross))
}

fn check_corollary_inputs(delta: u64, tau: u64, ell: u64) -> Result<()> {
    if delta == 0 || tau == 0 || ell == 0 {
        return Err(Error::Domain("delta, tau and l must be positive".into()));
    }
    if delta.gcd(&tau) != 1 {
        return Err(Error::Domain(format!("gcd(delta={delta}, tau={tau}) must be 1")));
    }
    Ok(())
}

/// `(delta, tau, l)` with `s - 1 = delta/tau` in lowest terms and `t = l*tau`.
pub fn corollary_inputs(s: Ratio<u64>, t: u64) -> Result<(u64, u64, u64)> {
    let p = p_of(s, t)?;
    if p <= t {
        return Err(Error::Domain(format!("s must exceed 1, got {s}")));
    }
    let d = p - t;
    let g = d.gcd(&t);
    Ok((d / g, t / g, g))
}

/// `2^(s-1) / (2^s - 1)`, the exact value of `g(s, 1)` for integer `s`.
pub fn t1_rate(s: u64) -> Result<ExactRational> {
    if s < 2 {
        return Err(Error::Domain(format!("need integer s >= 2, got {s}")));
    }
    let two = BigInt::from(2);
    Ok(BigRational::new(two.pow(s as u32 - 1), two.pow(s as u32) - 1))
}

/// `s / (2s - 1)`, a lower bound on `g(s, s-1)` for integer `s >= 3`.
pub fn fvy_rate(s: u64) -> Result<ExactRational> {
    if s < 3 {
        return Err(Error::Domain(format!("need integer s >= 3, got {s}")));
    }
    Ok(rational(s, 2 * s - 1))
}

/// Rate `k/m` of the `c1` construction, from its server and recovery counts.
pub fn c1_rate(t: u64, d: u64) -> Result<ExactRational> {
    Ok(family_counts(&ConstructionParams::c1(t, d)?, None)?.rate())
}

/// `(3t+1) / (4t+2)`.
pub fn s2_rate(t: u64) -> ExactRational {
    rational(3 * t + 1, 4 * t + 2)
}

/// `(16t^2 + 7t + 1) / (24t^2 + 15t + 3)`.
pub fn s3_rate(t: u64) -> ExactRational {
    let t = BigInt::from(t);
    let t2 = &t * &t;
    BigRational::new(&t2 * 16 + &t * 7 + 1, &t2 * 24 + &t * 15 + 3)
}

/// `(120t^3 + 59t^2 + 12t + 1) / (192t^3 + 128t^2 + 36t + 4)`.
pub fn s4_rate(t: u64) -> ExactRational {
    let t = BigInt::from(t);
    let t2 = &t * &t;
    let t3 = &t2 * &t;
    BigRational::new(&t3 * 120 + &t2 * 59 + &t * 12 + 1, &t3 * 192 + &t2 * 128 + &t * 36 + 4)
}

/// The weighted counts whose ratio gives the rate `(beta + gamma) / (beta + 2 gamma)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaGamma {
    pub beta: BigUint,
    pub gamma: BigUint,
}

impl BetaGamma {
    pub fn rate(&self) -> ExactRational {
        let b = BigInt::from(self.beta.clone());
        let g = BigInt::from(self.gamma.clone());
        BigRational::new(&b + &g, &b + &g * 2)
    }
}

/// `beta`, `gamma` for the integer-s family, `s, t >= 2`, from the
/// gcd-reduced multiplicities.
pub fn integer_s_beta_gamma(s: u64, t: u64) -> Result<BetaGamma> {
    if s < 2 || t < 2 {
        return Err(Error::Domain(format!("need integers s, t >= 2, got s={s}, t={t}")));
    }
    let xi = solve_xi(Ratio::from_integer(s), t)?;
    let p = s * t;
    let mut beta = xi.get(1) * BigUint::from(p - t + 1);
    for r in 2..=s {
        beta += xi.get(r) * BigUint::from(t - 1) * binomial(p - t + 1, (r - 1) * t + 1);
    }
    let mut gamma_sum = BigUint::zero();
    for r in 1..s {
        gamma_sum += xi.get(r + 1) * binomial(p - t, r * t);
    }
    Ok(BetaGamma {
        beta,
        gamma: gamma_sum * BigUint::from(p - t + 1),
    })
}

/// `beta`, `gamma` for the general-s family (non-integer `s > 2`, `t >= 2`).
pub fn general_s_beta_gamma(s: Ratio<u64>, t: u64) -> Result<BetaGamma> {
    if s.is_integer() || s <= Ratio::from_integer(2) || t < 2 {
        return Err(Error::Domain(format!(
            "need non-integer s > 2 and t >= 2, got s={s}, t={t}"
        )));
    }
    let p = p_of(s, t)?;
    let xi = solve_xi(s, t)?;
    let top = s.ceil().to_integer();
    let mut beta = xi.get(1) * BigUint::from(p - t + 1);
    for r in 2..top {
        beta += xi.get(r) * BigUint::from(t - 1) * binomial(p - t + 1, (r - 1) * t + 1);
    }
    beta += xi.get(top) * BigUint::from(t - 1);
    let mut gamma_sum = xi.get(top).clone();
    for r in 1..top - 1 {
        gamma_sum += xi.get(r + 1) * binomial(p - t, r * t);
    }
    Ok(BetaGamma {
        beta,
        gamma: gamma_sum * BigUint::from(p - t + 1),
    })
}

pub fn integer_s_rate(s: u64, t: u64) -> Result<ExactRational> {
    Ok(integer_s_beta_gamma(s, t)?.rate())
}

pub fn general_s_rate(s: Ratio<u64>, t: u64) -> Result<ExactRational> {
    Ok(general_s_beta_gamma(s, t)?.rate())
}

/// Every bound and rate formula that applies at `(s, t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundSheet {
    pub s: Ratio<u64>,
    pub t: u64,
    pub upper_g_s: Option<ExactRational>,
    pub upper_g_st: Option<ExactRational>,
    /// `(delta, tau, l)` and the printed corollary value.
    pub corollary: Option<((u64, u64, u64), ExactRational)>,
    pub t1_rate: Option<ExactRational>,
    pub fvy_rate: Option<ExactRational>,
    pub c1_rate: Option<ExactRational>,
    pub integer_s_rate: Option<ExactRational>,
    pub general_s_rate: Option<ExactRational>,
    pub s3_rate: Option<ExactRational>,
    pub s4_rate: Option<ExactRational>,
}

impl BoundSheet {
    /// Upper bounds on `g(s, t)`, by name.
    pub fn upper_bounds(&self) -> Vec<(&'static str, &ExactRational)> {
        [("upper_g_s", &self.upper_g_s), ("upper_g_st", &self.upper_g_st)]
            .into_iter()
            .filter_map(|(n, v)| v.as_ref().map(|v| (n, v)))
            .collect()
    }

    /// Achieved rates (lower bounds on `g(s, t)`), by name.
    pub fn lower_bounds(&self) -> Vec<(&'static str, &ExactRational)> {
        [
            ("t1_rate", &self.t1_rate),
            ("fvy_rate", &self.fvy_rate),
            ("c1_rate", &self.c1_rate),
            ("integer_s_rate", &self.integer_s_rate),
            ("general_s_rate", &self.general_s_rate),
            ("s3_rate", &self.s3_rate),
            ("s4_rate", &self.s4_rate),
        ]
        .into_iter()
        .filter_map(|(n, v)| v.as_ref().map(|v| (n, v)))
        .collect()
    }

    /// All present entries in display order.
    pub fn entries(&self) -> Vec<(&'static str, &ExactRational)> {
        let mut out = self.upper_bounds();
        if let Some((_, v)) = &self.corollary {
            out.push(("corollary_bound", v));
        }
        out.extend(self.lower_bounds());
        out
    }
}

/// Fills a [`BoundSheet`] with every formula defined at `(s, t)`.
pub fn reference_rates(s: Ratio<u64>, t: u64) -> Result<BoundSheet> {
    let p = p_of(s, t)?;
    if p <= t {
        return Err(Error::Domain(format!("s must exceed 1, got {s}")));
    }
    let d = p - t;
    let int_s = s.is_integer().then(|| s.to_integer());
    let two = Ratio::from_integer(2);
    let corollary = if t >= 2 {
        let (dl, tau, ell) = corollary_inputs(s, t)?;
        Some(((dl, tau, ell), corollary_bound(dl, tau, ell)?))
    } else {
        None
    };
    Ok(BoundSheet {
        s,
        t,
        upper_g_s: Some(upper_g_s(s)?),
        upper_g_st: (t >= 2 || (t, d) == (1, 1)).then(|| upper_g_st(t, d)).transpose()?,
        corollary,
        t1_rate: match int_s {
            Some(n) if t == 1 => Some(t1_rate(n)?),
            _ => None,
        },
        fvy_rate: match int_s {
            Some(n) if n >= 3 && t == n - 1 => Some(fvy_rate(n)?),
            _ => None,
        },
        c1_rate: (s <= two).then(|| c1_rate(t, d)).transpose()?,
        integer_s_rate: match int_s {
            Some(n) if t >= 2 => Some(integer_s_rate(n, t)?),
            _ => None,
        },
        general_s_rate: (int_s.is_none() && s > two && t >= 2)
            .then(|| general_s_rate(s, t))
            .transpose()?,
        s3_rate: (int_s == Some(3) && t >= 2).then(|| s3_rate(t)),
        s4_rate: (int_s == Some(4) && t >= 2).then(|| s4_rate(t)),
    })
}

/// One cell of the rate table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub s: u64,
    pub t: u64,
    pub rate: ExactRational,
}

/// Best known rates for integer `2 <= s <= max_s`, `1 <= t <= max_t`,
/// ordered by `t` then `s`.
///
/// Row `t = 1` is `g(s, 1)`; column `s = 2` is `(3t+1)/(4t+2)`; the rest
/// come from the integer-s construction.
pub fn table1(max_s: u64, max_t: u64) -> Result<Vec<TableEntry>> {
    let mut out = Vec::new();
    for t in 1..=max_t {
        for s in 2..=max_s {
            let rate = if t == 1 {
                t1_rate(s)?
            } else if s == 2 {
                s2_rate(t)
            } else {
                integer_s_rate(s, t)?
            };
            out.push(TableEntry { s, t, rate });
        }
    }
    Ok(out)
}

/// Which upper bound [`min_servers_bound`] divided by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ServerBoundSource {
    /// `g(s, 1)` exactly, integer `s`.
    SingleCell,
    /// [`upper_g_st`], for `1 < s <= 2` and `t >= 2`.
    SmallS,
    /// [`upper_g_s`].
    Asymptotic,
}

/// `ceil(k / U)` with `U` an upper bound on `g(s, t)`; a lower bound on the
/// number of servers of any `k`-PIR code with these `s`, `t`.
pub fn min_servers_bound(s: Ratio<u64>, t: u64, k: u64) -> Result<(BigInt, ServerBoundSource)> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let p = p_of(s, t)?;
    if p <= t {
        return Err(Error::Domain(format!("s must exceed 1, got {s}")));
    }
    let (bound, source) = if t == 1 && s.is_integer() {
        (t1_rate(s.to_integer())?, ServerBoundSource::SingleCell)
    } else if t >= 2 && s <= Ratio::from_integer(2) {
        (upper_g_st(t, p - t)?, ServerBoundSource::SmallS)
    } else {
        (upper_g_s(s)?, ServerBoundSource::Asymptotic)
    };
    Ok((ceil(&(rational(k, 1) / bound)), source))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: u64, d: u64) -> Ratio<u64> {
        Ratio::new(n, d)
    }

    #[test]
    fn upper_g_s_values() {
        assert_eq!(upper_g_s(r(2, 1)).unwrap(), rational(3, 4));
        assert_eq!(upper_g_s(r(3, 1)).unwrap(), rational(2, 3));
        assert_eq!(upper_g_s(r(5, 2)).unwrap(), rational(7, 10));
        assert!(upper_g_s(r(1, 1)).is_err());
    }

    #[test]
    fn upper_g_st_values() {
        assert_eq!(upper_g_st(2, 2).unwrap(), rational(7, 10));
        assert_eq!(upper_g_st(3, 1).unwrap(), rational(5, 6));
        assert_eq!(upper_g_st(2, 1).unwrap(), rational(7, 9));
        assert_eq!(upper_g_st(1, 1).unwrap(), t1_rate(2).unwrap());
        assert!(upper_g_st(1, 2).is_err());
        assert!(upper_g_st(2, 0).is_err());
    }

    #[test]
    fn corollary_values() {
        assert_eq!(corollary_bound(1, 2, 1).unwrap(), rational(7, 9));
        assert_eq!(corollary_bound(1, 1, 2).unwrap(), rational(11, 14));
        assert_eq!(corollary_bound(3, 2, 1).unwrap(), rational(5, 9));
        assert!(corollary_bound(2, 4, 1).is_err());
    }

    #[test]
    fn substituted_corollary_matches_upper_g_st() {
        for delta in 1..6 {
            for tau in 1..6 {
                if delta.gcd(&tau) != 1 {
                    continue;
                }
                for ell in 1..5 {
                    if ell * tau < 2 {
                        continue;
                    }
                    assert_eq!(
                        corollary_bound_substituted(delta, tau, ell).unwrap(),
                        upper_g_st(ell * tau, ell * delta).unwrap()
                    );
                    if ell == delta {
                        assert_eq!(
                            corollary_bound(delta, tau, ell).unwrap(),
                            corollary_bound_substituted(delta, tau, ell).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn corollary_inputs_reduce() {
        assert_eq!(corollary_inputs(r(2, 1), 2).unwrap(), (1, 1, 2));
        assert_eq!(corollary_inputs(r(3, 2), 2).unwrap(), (1, 2, 1));
        assert_eq!(corollary_inputs(r(5, 2), 2).unwrap(), (3, 2, 1));
    }

    #[test]
    fn reference_rates_s3_t2() {
        let sheet = reference_rates(r(3, 1), 2).unwrap();
        assert_eq!(sheet.s3_rate, Some(rational(79, 129)));
        assert_eq!(sheet.integer_s_rate, Some(rational(79, 129)));
        assert!(sheet.general_s_rate.is_none());
    }

    #[test]
    fn reference_rates_s4_t2() {
        let sheet = reference_rates(r(4, 1), 2).unwrap();
        assert_eq!(sheet.s4_rate, Some(rational(1221, 2124)));
        assert_eq!(sheet.s4_rate, Some(rational(407, 708)));
        assert_eq!(sheet.integer_s_rate, sheet.s4_rate);
    }

    #[test]
    fn reference_rates_t1() {
        let sheet = reference_rates(r(6, 1), 1).unwrap();
        assert_eq!(sheet.t1_rate, Some(rational(32, 63)));
        assert!(sheet.integer_s_rate.is_none());
        assert!(sheet.upper_g_st.is_none());
    }

    #[test]
    fn reference_rates_general() {
        let sheet = reference_rates(r(5, 2), 2).unwrap();
        assert_eq!(sheet.upper_g_s, Some(rational(7, 10)));
        assert_eq!(sheet.general_s_rate, Some(rational(29, 45)));
        assert!(sheet.integer_s_rate.is_none());
    }

    #[test]
    fn fvy_only_at_t_s_minus_one() {
        assert_eq!(reference_rates(r(3, 1), 2).unwrap().fvy_rate, Some(rational(3, 5)));
        assert!(reference_rates(r(3, 1), 3).unwrap().fvy_rate.is_none());
    }

    #[test]
    fn beta_gamma_small_cases() {
        assert_eq!(
            integer_s_beta_gamma(3, 2).unwrap(),
            BetaGamma {
                beta: 29u32.into(),
                gamma: 50u32.into()
            }
        );
        assert_eq!(
            general_s_beta_gamma(r(5, 2), 2).unwrap(),
            BetaGamma {
                beta: 13u32.into(),
                gamma: 16u32.into()
            }
        );
    }

    #[test]
    fn integer_s_at_two_is_closed_form() {
        for t in 2..40 {
            assert_eq!(integer_s_rate(2, t).unwrap(), s2_rate(t));
        }
    }

    #[test]
    fn c1_rate_equals_upper_bound() {
        for t in 2..=30 {
            for d in 1..=t {
                assert_eq!(c1_rate(t, d).unwrap(), upper_g_st(t, d).unwrap(), "t={t} d={d}");
            }
        }
    }

    #[test]
    fn table_examples() {
        let table = table1(6, 13).unwrap();
        assert_eq!(table.len(), 65);
        let at = |s, t| table.iter().find(|e| e.s == s && e.t == t).unwrap().rate.clone();
        assert_eq!(at(2, 6), rational(19, 26));
        assert_eq!(at(2, 13), rational(20, 27));
        assert_eq!(at(6, 1), rational(32, 63));
    }

    #[test]
    fn min_servers_examples() {
        assert_eq!(
            min_servers_bound(r(2, 1), 2, 7).unwrap(),
            (BigInt::from(10), ServerBoundSource::SmallS)
        );
        assert_eq!(
            min_servers_bound(r(3, 1), 2, 79).unwrap(),
            (BigInt::from(119), ServerBoundSource::Asymptotic)
        );
        assert_eq!(min_servers_bound(r(2, 1), 1, 2).unwrap().0, BigInt::from(3));
        assert!(min_servers_bound(r(2, 1), 2, 0).is_err());
    }
}
