//! Named generating-series checks for the Stern and twisted Stern sequences.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use super::{sequence_series, series_from_fn, DivisionError, LaurentSeries};
use crate::recurrence::{DenseTable, Preset};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CheckError {
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("order {order} too small for e_max {e_max}: need at least 4*2^e_max")]
    OrderTooSmall { order: usize, e_max: u32 },
    #[error("quotient series {name}: {source}")]
    Division {
        name: &'static str,
        source: DivisionError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckName {
    /// `S(X) = S(X^{2^e})·Σ_{r<2^e} (s(2^e−r)X^r + s(r)X^{r−2^e})`
    SumS,
    /// `(1 + X + X²)·S(X²) = X·S(X)`
    Carlitz,
    /// `X·Π_{i<k}(1 + X^{2^i} + X^{2^{i+1}}) = Σ_{n≤2^k} s(n)X^n + Σ_{n<2^k} s(2^k−n)X^{n+2^k}`
    CoonsLemma8,
    /// `Σ t(3·2^e+n)X^n = (−1)^e·U(X^{2^e})·S(X)`, `U = Σ t(3+n)X^n / S`
    BConj1,
    /// `Σ (s(2^{e+1}+n) − s(2^e+n))X^n = A(X^{2^e})·S(X)`
    BConj2,
    /// `(−1)^e·Σ (t(2^{e+1}+n) + t(2^e+n))X^n = B(X^{2^e})·S(X)`
    BConj3,
    /// As `BConj3` with the sign `(−1)^{e+1}`.
    BConj3Printed,
}

impl CheckName {
    pub const ALL: [CheckName; 7] = [
        CheckName::SumS,
        CheckName::Carlitz,
        CheckName::CoonsLemma8,
        CheckName::BConj1,
        CheckName::BConj2,
        CheckName::BConj3,
        CheckName::BConj3Printed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::SumS => "sum_s",
            CheckName::Carlitz => "carlitz",
            CheckName::CoonsLemma8 => "coons_lemma8",
            CheckName::BConj1 => "bconj1",
            CheckName::BConj2 => "bconj2",
            CheckName::BConj3 => "bconj3",
            CheckName::BConj3Printed => "bconj3_printed",
        }
    }
}

impl FromStr for CheckName {
    type Err = CheckError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| CheckError::UnknownCheck(s.to_string()))
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result for one value of `e` (or `k` for `coons_lemma8`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelReport {
    pub e: u32,
    pub holds: bool,
    pub first_bad_exponent: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub name: CheckName,
    pub order: usize,
    pub holds: bool,
    pub levels: Vec<LevelReport>,
    /// Leading coefficients of quotient series built along the way.
    pub artifacts: Vec<(String, Vec<BigInt>)>,
}

impl CheckReport {
    /// `(e, exponent)` of the first failing level.
    pub fn first_bad(&self) -> Option<(u32, i64)> {
        self.levels
            .iter()
            .find(|l| !l.holds)
            .map(|l| (l.e, l.first_bad_exponent.unwrap_or(0)))
    }

    /// One `check=<name> e=<e> holds=<bool> order=<M>` line per level.
    pub fn machine_lines(&self) -> Vec<String> {
        self.levels
            .iter()
            .map(|l| {
                format!(
                    "check={} e={} holds={} order={}",
                    self.name, l.e, l.holds, self.order
                )
            })
            .collect()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.holds { "holds" } else { "FAILS" };
        writeln!(f, "{}: {} (order {})", self.name, verdict, self.order)?;
        for level in &self.levels {
            match level.first_bad_exponent {
                None => writeln!(f, "  e={}: ok", level.e)?,
                Some(x) => writeln!(f, "  e={}: first mismatch at X^{}", level.e, x)?,
            }
        }
        for (name, prefix) in &self.artifacts {
            let items: Vec<String> = prefix.iter().map(|c| c.to_string()).collect();
            writeln!(f, "  {} = {}, ...", name, items.join(", "))?;
        }
        Ok(())
    }
}

const ARTIFACT_LEN: usize = 16;

fn sign(e: u32) -> BigInt {
    if e.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

fn level(e: u32, lhs: &LaurentSeries, rhs: &LaurentSeries) -> LevelReport {
    let bad = lhs.first_mismatch(rhs);
    LevelReport {
        e,
        holds: bad.is_none(),
        first_bad_exponent: bad,
    }
}

fn quotient(
    name: &'static str,
    num: &LaurentSeries,
    den: &LaurentSeries,
) -> Result<LaurentSeries, CheckError> {
    num.divide(den)
        .map_err(|source| CheckError::Division { name, source })
}

/// Runs a named check. `order` is the series truncation `M`; `e_max` is the
/// largest `e` (or `k` for `coons_lemma8`, where `order` is unused).
pub fn check_named(name: CheckName, order: usize, e_max: u32) -> Result<CheckReport, CheckError> {
    let needs_levels = !matches!(name, CheckName::Carlitz | CheckName::CoonsLemma8);
    if needs_levels && (e_max >= 32 || order < 4usize << e_max) {
        return Err(CheckError::OrderTooSmall { order, e_max });
    }
    let mut artifacts = Vec::new();
    let levels = match name {
        CheckName::SumS => sum_s(order, e_max),
        CheckName::Carlitz => vec![carlitz(order)],
        CheckName::CoonsLemma8 => (0..=e_max).into_par_iter().map(coons_lemma8).collect(),
        CheckName::BConj1 => {
            let (u, levels) = bconj1(order, e_max)?;
            artifacts.push(("U".to_string(), u.window(0, ARTIFACT_LEN as i64)));
            levels
        }
        CheckName::BConj2 => {
            let (a, levels) = bconj2(order, e_max)?;
            artifacts.push(("A".to_string(), a.window(0, ARTIFACT_LEN as i64)));
            levels
        }
        CheckName::BConj3 | CheckName::BConj3Printed => {
            let shift = u32::from(name == CheckName::BConj3Printed);
            let (b, levels) = bconj3(order, e_max, shift)?;
            artifacts.push(("B".to_string(), b.window(0, ARTIFACT_LEN as i64)));
            levels
        }
    };
    Ok(CheckReport {
        name,
        order,
        holds: levels.iter().all(|l| l.holds),
        levels,
        artifacts,
    })
}

/// The Laurent polynomial `Σ_{0≤r<2^e} (s(2^e−r)X^r + s(r)X^{r−2^e})`.
pub fn sum_s_bracket(stern: &DenseTable, e: u32) -> LaurentSeries {
    let q = 1i64 << e;
    let s = |k: i64| stern.get(k as u64).expect("table covers 2^e").clone();
    let mut terms = Vec::with_capacity(2 * q as usize);
    for r in 0..q {
        terms.push((r, s(q - r)));
        terms.push((r - q, s(r)));
    }
    LaurentSeries::from_terms(&terms)
}

fn sum_s(order: usize, e_max: u32) -> Vec<LevelReport> {
    let stern = Preset::Stern.spec();
    let s = sequence_series(&stern, 0, order);
    let table = DenseTable::build(&stern, 1 << e_max);
    (0..=e_max)
        .into_par_iter()
        .map(|e| {
            let step = 1i64 << e;
            let composed = s.compose_power(step as u64).truncate(order as i64 + step);
            let rhs = composed.mul(&sum_s_bracket(&table, e));
            // no negative powers may survive the product
            if let Some(x) = (rhs.val()..0).find(|&k| rhs.coeff(k).is_some_and(|c| !c.is_zero())) {
                return LevelReport {
                    e,
                    holds: false,
                    first_bad_exponent: Some(x),
                };
            }
            level(e, &s, &rhs)
        })
        .collect()
}

fn carlitz(order: usize) -> LevelReport {
    let s = sequence_series(&Preset::Stern.spec(), 0, order);
    let trinomial = LaurentSeries::polynomial(0, vec![BigInt::one(); 3]);
    let lhs = trinomial.mul(&s.compose_power(2));
    let rhs = s.shift(1);
    let diff = lhs.sub(&rhs);
    let zero = LaurentSeries::truncated(0, vec![BigInt::zero(); order + 1]);
    level(0, &diff, &zero)
}

fn coons_lemma8(k: u32) -> LevelReport {
    let mut lhs = LaurentSeries::monomial(1, 1);
    for i in 0..k {
        let factor = LaurentSeries::from_terms(&[
            (0, BigInt::one()),
            (1i64 << i, BigInt::one()),
            (1i64 << (i + 1), BigInt::one()),
        ]);
        lhs = lhs.mul(&factor);
    }
    let top = 1i64 << k;
    let stern = DenseTable::build(&Preset::Stern.spec(), top as u64);
    let s = |n: i64| stern.get(n as u64).unwrap().clone();
    let mut terms: Vec<(i64, BigInt)> = (1..=top).map(|n| (n, s(n))).collect();
    terms.extend((1..top).map(|n| (n + top, s(top - n))));
    let rhs = LaurentSeries::from_terms(&terms);
    level(k, &lhs, &rhs)
}

/// Divides `num` by `S`, both known up to `order + 1`, giving a quotient
/// known up to `order`.
fn divide_by_s(
    name: &'static str,
    order: usize,
    num: impl Fn(u64) -> BigInt,
) -> Result<LaurentSeries, CheckError> {
    let s = sequence_series(&Preset::Stern.spec(), 0, order + 1);
    quotient(name, &series_from_fn(order + 1, num), &s)
}

/// Compares `lhs_e` against `scale_e·Q(X^{2^e})·S(X)` for every level.
fn against_quotient(
    q: &LaurentSeries,
    order: usize,
    e_max: u32,
    lhs: impl Fn(u32) -> LaurentSeries + Sync,
    scale: impl Fn(u32) -> BigInt + Sync,
) -> Vec<LevelReport> {
    let s = sequence_series(&Preset::Stern.spec(), 0, order);
    (0..=e_max)
        .into_par_iter()
        .map(|e| {
            let composed = q.compose_power(1 << e).truncate(order as i64);
            let rhs = composed.mul(&s);
            let left = lhs(e).scale(&scale(e));
            level(e, &left, &rhs)
        })
        .collect()
}

fn bconj1(order: usize, e_max: u32) -> Result<(LaurentSeries, Vec<LevelReport>), CheckError> {
    let twisted = Preset::Twisted.spec();
    let t = DenseTable::build(&twisted, (3u64 << e_max) + order as u64 + 1);
    let tv = |k: u64| t.get(k).unwrap().clone();
    let u = divide_by_s("U", order, |n| tv(3 + n))?;
    let levels = against_quotient(
        &u,
        order,
        e_max,
        |e| series_from_fn(order, |n| tv((3 << e) + n)),
        sign,
    );
    Ok((u, levels))
}

fn bconj2(order: usize, e_max: u32) -> Result<(LaurentSeries, Vec<LevelReport>), CheckError> {
    let s = DenseTable::build(&Preset::Stern.spec(), (2u64 << e_max) + order as u64 + 1);
    let sv = |k: u64| s.get(k).unwrap().clone();
    let a = divide_by_s("A", order, |n| sv(2 + n) - sv(1 + n))?;
    let levels = against_quotient(
        &a,
        order,
        e_max,
        |e| series_from_fn(order, |n| sv((2 << e) + n) - sv((1 << e) + n)),
        |_| BigInt::one(),
    );
    Ok((a, levels))
}

/// `sign_shift = 0` uses `(−1)^e`, `1` uses `(−1)^{e+1}`.
fn bconj3(
    order: usize,
    e_max: u32,
    sign_shift: u32,
) -> Result<(LaurentSeries, Vec<LevelReport>), CheckError> {
    let t = DenseTable::build(&Preset::Twisted.spec(), (2u64 << e_max) + order as u64 + 1);
    let tv = |k: u64| t.get(k).unwrap().clone();
    let b = divide_by_s("B", order, |n| tv(2 + n) + tv(1 + n))?;
    let levels = against_quotient(
        &b,
        order,
        e_max,
        |e| series_from_fn(order, |n| tv((2 << e) + n) + tv((1 << e) + n)),
        |e| sign(e + sign_shift),
    );
    Ok((b, levels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn names_round_trip() {
        for name in CheckName::ALL {
            assert_eq!(name.as_str().parse::<CheckName>(), Ok(name));
        }
        assert!("bconj4".parse::<CheckName>().is_err());
    }

    #[test]
    fn small_orders_hold() {
        assert!(check_named(CheckName::Carlitz, 64, 0).unwrap().holds);
        assert!(check_named(CheckName::SumS, 64, 3).unwrap().holds);
        assert!(check_named(CheckName::CoonsLemma8, 0, 4).unwrap().holds);
    }

    #[test]
    fn quotient_prefixes() {
        let u = check_named(CheckName::BConj1, 64, 2).unwrap();
        assert!(u.holds);
        assert_eq!(u.artifacts[0].1[..4], ints(&[1, 0, -2, 0])[..]);
        let a = check_named(CheckName::BConj2, 64, 2).unwrap();
        assert!(a.holds);
        assert_eq!(a.artifacts[0].1[..4], ints(&[1, -2, 2, 0])[..]);
        let b = check_named(CheckName::BConj3, 64, 2).unwrap();
        assert!(b.holds);
        assert_eq!(b.artifacts[0].1[..4], ints(&[-1, 2, 2, -4])[..]);
    }

    #[test]
    fn opposite_sign_fails_everywhere() {
        let report = check_named(CheckName::BConj3Printed, 64, 2).unwrap();
        assert!(!report.holds);
        assert!(report.levels.iter().all(|l| !l.holds));
        assert_eq!(report.first_bad(), Some((0, 1)));
    }

    #[test]
    fn machine_lines_and_order_guard() {
        let report = check_named(CheckName::BConj2, 32, 1).unwrap();
        assert_eq!(
            report.machine_lines(),
            vec![
                "check=bconj2 e=0 holds=true order=32",
                "check=bconj2 e=1 holds=true order=32",
            ]
        );
        assert_eq!(
            check_named(CheckName::BConj1, 100, 5),
            Err(CheckError::OrderTooSmall { order: 100, e_max: 5 })
        );
    }

    #[test]
    fn bracket_matches_small_case() {
        let table = DenseTable::build(&Preset::Stern.spec(), 2);
        // e = 1: s(2) + s(1)X + s(0)X^-2 + s(1)X^-1
        let bracket = sum_s_bracket(&table, 1);
        assert_eq!(bracket.val(), -1);
        assert_eq!(bracket.coeffs(), &ints(&[1, 1, 1])[..]);
    }
}
