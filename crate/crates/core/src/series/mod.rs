//! Truncated Laurent series with exact integer coefficients.
//!
//! A series stores coefficients for exponents `val .. order`; everything at
//! or above `order` is unknown. Series without an order are exact Laurent
//! polynomials. Every operation propagates the tightest order it can vouch
//! for, and comparisons never look past it.

pub mod checks;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::recurrence::{eval_range, SternLikeSpec};

pub use checks::{check_named, CheckError, CheckName, CheckReport, LevelReport};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DivisionError {
    #[error("division by a series that is zero up to its order")]
    ZeroDivisor,
    #[error("valuation of the numerator ({num}) is below that of the denominator ({den})")]
    Valuation { num: i64, den: i64 },
    #[error("coefficient at X^{exponent}: {value} is not divisible by {leading}")]
    NotExact {
        exponent: i64,
        value: BigInt,
        leading: BigInt,
    },
    #[error("polynomial division leaves a nonzero remainder")]
    Remainder,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    val: i64,
    coeffs: Vec<BigInt>,
    /// `None` for an exact Laurent polynomial.
    order: Option<i64>,
}

fn min_order(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl LaurentSeries {
    /// `Σ coeffs[i]·X^(val+i) + O(X^(val + len))`.
    pub fn truncated(val: i64, coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs order > val");
        let order = Some(val + coeffs.len() as i64);
        LaurentSeries { val, coeffs, order }
    }

    /// Exact Laurent polynomial `Σ coeffs[i]·X^(val+i)`.
    pub fn polynomial(val: i64, coeffs: Vec<BigInt>) -> Self {
        LaurentSeries {
            val,
            coeffs,
            order: None,
        }
        .trimmed()
    }

    /// Exact polynomial from `(exponent, coefficient)` pairs; repeated
    /// exponents are summed.
    pub fn from_terms(terms: &[(i64, BigInt)]) -> Self {
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return LaurentSeries::polynomial(0, Vec::new());
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (exp, c) in terms {
            coeffs[(exp - lo) as usize] += c;
        }
        LaurentSeries::polynomial(lo, coeffs)
    }

    pub fn monomial(exp: i64, coeff: impl Into<BigInt>) -> Self {
        LaurentSeries::polynomial(exp, vec![coeff.into()])
    }

    pub fn val(&self) -> i64 {
        self.val
    }

    pub fn order(&self) -> Option<i64> {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.order.is_none()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// One past the last stored exponent.
    fn end(&self) -> i64 {
        self.val + self.coeffs.len() as i64
    }

    /// Coefficient of `X^exp`, or `None` when `exp` is beyond the order.
    pub fn coeff(&self, exp: i64) -> Option<BigInt> {
        if let Some(order) = self.order {
            if exp >= order {
                return None;
            }
        }
        if exp < self.val || exp >= self.end() {
            return Some(BigInt::zero());
        }
        Some(self.coeffs[(exp - self.val) as usize].clone())
    }

    fn coeff_ref(&self, exp: i64) -> Option<&BigInt> {
        if exp < self.val || exp >= self.end() {
            None
        } else {
            Some(&self.coeffs[(exp - self.val) as usize])
        }
    }

    /// Lowest exponent with a nonzero known coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.val + i as i64)
    }

    /// Drops trailing zeros of exact polynomials.
    fn trimmed(mut self) -> Self {
        if self.order.is_none() {
            while self.coeffs.last().is_some_and(|c| c.is_zero()) {
                self.coeffs.pop();
            }
            let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
            if lead > 0 {
                self.coeffs.drain(..lead);
                self.val += lead as i64;
            }
            if self.coeffs.is_empty() {
                self.val = 0;
            }
        }
        self
    }

    /// Lowers the order to `order` (no-op if it is already lower).
    pub fn truncate(&self, order: i64) -> Self {
        let order = min_order(self.order, Some(order)).unwrap();
        let val = self.val.min(order - 1);
        let coeffs = (val..order)
            .map(|k| self.coeff(k).unwrap_or_default())
            .collect();
        LaurentSeries {
            val,
            coeffs,
            order: Some(order),
        }
    }

    fn combine(&self, other: &Self, f: impl Fn(&BigInt, &BigInt) -> BigInt) -> Self {
        let order = min_order(self.order, other.order);
        let val = self.val.min(other.val);
        let end = order.unwrap_or_else(|| self.end().max(other.end()));
        let zero = BigInt::zero();
        let coeffs = (val..end.max(val))
            .map(|k| {
                f(
                    self.coeff_ref(k).unwrap_or(&zero),
                    other.coeff_ref(k).unwrap_or(&zero),
                )
            })
            .collect();
        LaurentSeries { val, coeffs, order }.trimmed()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a - b)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        LaurentSeries {
            val: self.val,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
            order: self.order,
        }
        .trimmed()
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigInt::one())
    }

    /// Product; known up to `min(order1 + val2, order2 + val1)`.
    pub fn mul(&self, other: &Self) -> Self {
        let val = self.val + other.val;
        let order = min_order(
            self.order.map(|o| o + other.val),
            other.order.map(|o| o + self.val),
        );
        if let Some(o) = order {
            if o <= val {
                return LaurentSeries::truncated(o - 1, vec![BigInt::zero()]);
            }
        }
        let end = order.unwrap_or(self.end() + other.end() - 1).max(val);
        let len = (end - val) as usize;
        let mut coeffs = vec![BigInt::zero(); len];
        // iterate the sparser operand on the outside
        let (outer, inner) = if self.nonzeros() <= other.nonzeros() {
            (self, other)
        } else {
            (other, self)
        };
        for (i, a) in outer.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in inner.coeffs.iter().take(len - i).enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        LaurentSeries { val, coeffs, order }.trimmed()
    }

    fn nonzeros(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    /// Substitutes `X → X^m`.
    pub fn compose_power(&self, m: u64) -> Self {
        assert!(m >= 1, "compose_power needs m >= 1");
        let m = m as i64;
        let mut coeffs = Vec::new();
        if !self.coeffs.is_empty() {
            coeffs = vec![BigInt::zero(); (self.coeffs.len() - 1) * m as usize + 1];
            for (i, c) in self.coeffs.iter().enumerate() {
                coeffs[i * m as usize] = c.clone();
            }
        }
        let order = self.order.map(|o| o * m);
        let val = self.val * m;
        if let Some(o) = order {
            coeffs.resize((o - val) as usize, BigInt::zero());
        }
        LaurentSeries { val, coeffs, order }.trimmed()
    }

    /// Multiplies by `X^d`.
    pub fn shift(&self, d: i64) -> Self {
        LaurentSeries {
            val: self.val + d,
            coeffs: self.coeffs.clone(),
            order: self.order.map(|o| o + d),
        }
    }

    /// Exact quotient `num / den` over the integers.
    pub fn divide(&self, den: &Self) -> Result<Self, DivisionError> {
        let vd = den.valuation().ok_or(DivisionError::ZeroDivisor)?;
        let lead = den.coeff_ref(vd).unwrap().clone();
        let Some(vn) = self.valuation() else {
            // a numerator that vanishes below `order` forces q = O(X^(order - vd))
            return Ok(match self.order {
                None => LaurentSeries::polynomial(0, Vec::new()),
                Some(o) => LaurentSeries::truncated(o - vd - 1, vec![BigInt::zero()]),
            });
        };
        if vn < vd {
            return Err(DivisionError::Valuation { num: vn, den: vd });
        }
        let vq = vn - vd;
        let terms = match (self.order, den.order) {
            (None, None) => {
                let num_deg = self.end() - 1;
                let den_deg = den.end() - 1;
                if num_deg - vn < den_deg - vd {
                    return Err(DivisionError::Remainder);
                }
                (num_deg - vn) - (den_deg - vd) + 1
            }
            (on, od) => min_order(on.map(|o| o - vn), od.map(|o| o - vd)).unwrap(),
        };
        let zero = BigInt::zero();
        let mut q: Vec<BigInt> = Vec::with_capacity(terms.max(0) as usize);
        for k in 0..terms.max(0) {
            let mut acc = self.coeff_ref(vn + k).unwrap_or(&zero).clone();
            for i in 1..=k {
                if let Some(d) = den.coeff_ref(vd + i) {
                    if !d.is_zero() {
                        acc -= d * &q[(k - i) as usize];
                    }
                }
            }
            let (quot, rem) = acc.div_rem(&lead);
            if !rem.is_zero() {
                return Err(DivisionError::NotExact {
                    exponent: vq + k,
                    value: acc,
                    leading: lead,
                });
            }
            q.push(quot);
        }
        if self.is_exact() && den.is_exact() {
            let quotient = LaurentSeries::polynomial(vq, q);
            if &quotient.mul(den) != self {
                return Err(DivisionError::Remainder);
            }
            return Ok(quotient);
        }
        if q.is_empty() {
            return Ok(LaurentSeries::truncated(vq - 1, vec![BigInt::zero()]));
        }
        Ok(LaurentSeries::truncated(vq, q))
    }

    /// First exponent (within the shared known range) where the two series
    /// differ.
    pub fn first_mismatch(&self, other: &Self) -> Option<i64> {
        let order = min_order(self.order, other.order);
        let lo = self.val.min(other.val);
        let hi = order.unwrap_or_else(|| self.end().max(other.end()));
        (lo..hi).find(|&k| self.coeff(k) != other.coeff(k))
    }

    /// Equality on the shared known range.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.first_mismatch(other).is_none()
    }

    /// Coefficients for exponents `from .. to` (unknown ones read as zero).
    pub fn window(&self, from: i64, to: i64) -> Vec<BigInt> {
        (from..to).map(|k| self.coeff(k).unwrap_or_default()).collect()
    }
}

/// `Σ_{0 ≤ n < order} v(n + offset)·X^n`.
pub fn sequence_series(spec: &SternLikeSpec, offset: u64, order: usize) -> LaurentSeries {
    assert!(order >= 1, "sequence_series needs order >= 1");
    let coeffs = eval_range(spec, offset, offset + order as u64 - 1).expect("lo <= hi");
    LaurentSeries::truncated(0, coeffs)
}

/// Series with coefficients computed by `f(n)` for `n < order`.
pub fn series_from_fn(order: usize, f: impl Fn(u64) -> BigInt) -> LaurentSeries {
    LaurentSeries::truncated(0, (0..order as u64).map(f).collect())
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let exp = self.val + i as i64;
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match (exp, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("X")?,
                (1, false) => write!(f, "{mag}X")?,
                (_, true) => write!(f, "X^{exp}")?,
                (_, false) => write!(f, "{mag}X^{exp}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        if let Some(order) = self.order {
            write!(f, " + O(X^{order})")?;
        }
        Ok(())
    }
}
