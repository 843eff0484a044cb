//! 2-regular linear representations of Stern-like sequences.
//!
//! For `n ≥ n0` the sequence satisfies `v(2^e·n + r) = A(e,r)·v(n) + B(e,r)·v(n+1)`
//! for every `0 ≤ r ≤ 2^e`. The coefficient table is built with the recursions
//!
//! ```text
//! A(e+1, 2r)   = a·A(e,r)              B(e+1, 2r)   = a·B(e,r)
//! A(e+1, 2r+1) = b·A(e,r) + c·A(e,r+1) B(e+1, 2r+1) = b·B(e,r) + c·B(e,r+1)
//! ```
//!
//! starting from `A(0,·) = (1, 0)`, `B(0,·) = (0, 1)`. The same recurrence,
//! read one binary digit at a time, gives two 2×2 matrices acting on the
//! state `(v(k), v(k+1))`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::recurrence::{eval_direct, Evaluator, SternLikeSpec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinRepError {
    #[error("(e, r) = ({e}, {r}) is outside the table (e_max = {e_max}, r in [0, 2^e])")]
    Range { e: u32, r: u64, e_max: u32 },
    #[error("singular system: v(x0)v(y0+1) - v(y0)v(x0+1) = 0 for x0 = {x0}, y0 = {y0}")]
    SingularSystem { x0: u64, y0: u64 },
    #[error("x0 = {x0} and y0 = {y0} must both be >= n0 = {n0}")]
    BelowStart { x0: u64, y0: u64, n0: u64 },
    #[error("recovered coefficient is not an integer: {num} / {den}")]
    NotIntegral { num: BigInt, den: BigInt },
    #[error("linear representation line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// `A(e, r)` and `B(e, r)` for `e ≤ e_max` and `0 ≤ r ≤ 2^e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffTable {
    e_max: u32,
    a: Vec<Vec<BigInt>>,
    b: Vec<Vec<BigInt>>,
}

impl CoeffTable {
    pub fn e_max(&self) -> u32 {
        self.e_max
    }

    pub fn get(&self, e: u32, r: u64) -> Result<(&BigInt, &BigInt), LinRepError> {
        if e > self.e_max || r > 1u64 << e {
            return Err(LinRepError::Range {
                e,
                r,
                e_max: self.e_max,
            });
        }
        let (e, r) = (e as usize, r as usize);
        Ok((&self.a[e][r], &self.b[e][r]))
    }

    /// Row `e` of the `A` table, indexed by `r`.
    pub fn row_a(&self, e: u32) -> &[BigInt] {
        &self.a[e as usize]
    }

    pub fn row_b(&self, e: u32) -> &[BigInt] {
        &self.b[e as usize]
    }
}

pub fn coeff_table(spec: &SternLikeSpec, e_max: u32) -> CoeffTable {
    let (pa, pb, pc) = (spec.a(), spec.b(), spec.c());
    let mut a = vec![vec![BigInt::one(), BigInt::zero()]];
    let mut b = vec![vec![BigInt::zero(), BigInt::one()]];
    for e in 0..e_max as usize {
        let width = (1usize << (e + 1)) + 1;
        let (prev_a, prev_b) = (&a[e], &b[e]);
        let mut next_a = Vec::with_capacity(width);
        let mut next_b = Vec::with_capacity(width);
        for m in 0..width {
            let r = m / 2;
            if m % 2 == 0 {
                next_a.push(pa * &prev_a[r]);
                next_b.push(pa * &prev_b[r]);
            } else {
                next_a.push(pb * &prev_a[r] + pc * &prev_a[r + 1]);
                next_b.push(pb * &prev_b[r] + pc * &prev_b[r + 1]);
            }
        }
        a.push(next_a);
        b.push(next_b);
    }
    CoeffTable { e_max, a, b }
}

pub fn coeffs(table: &CoeffTable, e: u32, r: u64) -> Result<(BigInt, BigInt), LinRepError> {
    table.get(e, r).map(|(a, b)| (a.clone(), b.clone()))
}

/// Row-major 2×2 integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix2(pub [[BigInt; 2]; 2]);

impl Matrix2 {
    pub fn apply(&self, (x, y): (&BigInt, &BigInt)) -> (BigInt, BigInt) {
        let m = &self.0;
        (&m[0][0] * x + &m[0][1] * y, &m[1][0] * x + &m[1][1] * y)
    }

    pub fn from_ints(rows: [[i64; 2]; 2]) -> Self {
        Matrix2(rows.map(|row| row.map(BigInt::from)))
    }
}

impl fmt::Display for Matrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(f, "{} {} {} {}", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

/// `M0` sends `(v(k), v(k+1))` to `(v(2k), v(2k+1))`, `M1` sends it to
/// `(v(2k+1), v(2k+2))`. Valid for `k ≥ n0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixPair {
    pub m0: Matrix2,
    pub m1: Matrix2,
}

impl MatrixPair {
    fn digit(&self, bit: bool) -> &Matrix2 {
        if bit {
            &self.m1
        } else {
            &self.m0
        }
    }
}

pub fn transition_matrices(spec: &SternLikeSpec) -> MatrixPair {
    let (a, b, c) = (spec.a().clone(), spec.b().clone(), spec.c().clone());
    MatrixPair {
        m0: Matrix2([[a.clone(), BigInt::zero()], [b.clone(), c.clone()]]),
        m1: Matrix2([[b, c], [BigInt::zero(), a]]),
    }
}

/// Strips low bits off `n` until the remaining prefix falls below
/// `base_len`; returns the prefix and the stripped bits, least significant
/// first. Every prefix the bits are replayed from is then `≥ n_eff`.
fn split_bits(n: u64, base_len: u64) -> (u64, Vec<bool>) {
    let mut k = n;
    let mut bits = Vec::new();
    while k >= base_len {
        bits.push(k & 1 == 1);
        k >>= 1;
    }
    (k, bits)
}

/// `v(n)` by replaying the binary digits of `n` through `M0`/`M1`.
pub fn eval_fast(spec: &SternLikeSpec, n: u64) -> BigInt {
    let (k, bits) = split_bits(n, spec.base_len());
    if bits.is_empty() {
        return spec.init()[k as usize].clone();
    }
    let matrices = transition_matrices(spec);
    let mut state = Evaluator::new(spec).pair(k);
    for &bit in bits.iter().rev() {
        state = matrices.digit(bit).apply((&state.0, &state.1));
    }
    state.0
}

/// Solves the 2×2 system `v(2^e·x + r) = A·v(x) + B·v(x+1)` for `x ∈ {x0, y0}`.
pub fn recover_coefficients(
    spec: &SternLikeSpec,
    e: u32,
    r: u64,
    x0: u64,
    y0: u64,
) -> Result<(BigInt, BigInt), LinRepError> {
    if x0 < spec.n0() || y0 < spec.n0() {
        return Err(LinRepError::BelowStart {
            x0,
            y0,
            n0: spec.n0(),
        });
    }
    let mut ev = Evaluator::new(spec);
    let (vx, vx1) = ev.pair(x0);
    let (vy, vy1) = ev.pair(y0);
    let det = &vx * &vy1 - &vy * &vx1;
    if det.is_zero() {
        return Err(LinRepError::SingularSystem { x0, y0 });
    }
    let step = 1u64 << e;
    let wx = ev.value(step * x0 + r);
    let wy = ev.value(step * y0 + r);
    let exact = |num: BigInt, den: BigInt| {
        let (q, rem) = num.div_rem(&den);
        if rem.is_zero() {
            Ok(q)
        } else {
            Err(LinRepError::NotIntegral { num, den })
        }
    };
    let a = exact(&vx1 * &wy - &vy1 * &wx, -det.clone())?;
    let b = exact(&vx * &wy - &vy * &wx, det)?;
    Ok((a, b))
}

/// Everything needed to evaluate a sequence outside this crate: base pairs
/// `(v(k), v(k+1))` for `k < 2·n_eff`, the digit matrices, and the
/// projection onto the first coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRepresentation {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub n_eff: u64,
    pub base_states: Vec<(BigInt, BigInt)>,
    pub matrices: MatrixPair,
}

pub fn linear_representation(spec: &SternLikeSpec) -> LinearRepresentation {
    let mut ev = Evaluator::new(spec);
    LinearRepresentation {
        a: spec.a().clone(),
        b: spec.b().clone(),
        c: spec.c().clone(),
        n_eff: spec.n_eff(),
        base_states: (0..spec.base_len()).map(|k| ev.pair(k)).collect(),
        matrices: transition_matrices(spec),
    }
}

impl LinearRepresentation {
    pub fn eval(&self, n: u64) -> BigInt {
        let (k, bits) = split_bits(n, 2 * self.n_eff);
        let (x, y) = &self.base_states[k as usize];
        let mut state = (x.clone(), y.clone());
        for &bit in bits.iter().rev() {
            state = self.matrices.digit(bit).apply((&state.0, &state.1));
        }
        state.0
    }
}

impl fmt::Display for LinearRepresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# state (v(k), v(k+1)); digit 0: M0, digit 1: M1")?;
        writeln!(f, "a = {}", self.a)?;
        writeln!(f, "b = {}", self.b)?;
        writeln!(f, "c = {}", self.c)?;
        writeln!(f, "n_eff = {}", self.n_eff)?;
        for (k, (x, y)) in self.base_states.iter().enumerate() {
            writeln!(f, "base {k} = {x} {y}")?;
        }
        writeln!(f, "M0 = {}", self.matrices.m0)?;
        writeln!(f, "M1 = {}", self.matrices.m1)?;
        writeln!(f, "projection = first")
    }
}

impl FromStr for LinearRepresentation {
    type Err = LinRepError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut a = None;
        let mut b = None;
        let mut c = None;
        let mut n_eff = None;
        let mut base = Vec::new();
        let mut m0 = None;
        let mut m1 = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| LinRepError::Syntax {
                line: idx + 1,
                msg: msg.to_string(),
            };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected `key = value`"))?;
            let ints = |v: &str| -> Result<Vec<BigInt>, LinRepError> {
                v.split_whitespace()
                    .map(|x| x.parse::<BigInt>().map_err(|_| err("bad integer")))
                    .collect()
            };
            let one = |v: &str| -> Result<BigInt, LinRepError> {
                let v = ints(v)?;
                match v.as_slice() {
                    [x] => Ok(x.clone()),
                    _ => Err(err("expected one integer")),
                }
            };
            let matrix = |v: &str| -> Result<Matrix2, LinRepError> {
                match ints(v)?.as_slice() {
                    [p, q, r, s] => Ok(Matrix2([[p.clone(), q.clone()], [r.clone(), s.clone()]])),
                    _ => Err(err("expected four matrix entries")),
                }
            };
            match key.trim() {
                "a" => a = Some(one(value)?),
                "b" => b = Some(one(value)?),
                "c" => c = Some(one(value)?),
                "n_eff" => {
                    n_eff = Some(value.trim().parse::<u64>().map_err(|_| err("bad n_eff"))?)
                }
                "M0" => m0 = Some(matrix(value)?),
                "M1" => m1 = Some(matrix(value)?),
                "projection" if value.trim() == "first" => {}
                "projection" => return Err(err("only `first` projection is supported")),
                k if k.starts_with("base ") => {
                    let index: usize = k[5..].trim().parse().map_err(|_| err("bad base index"))?;
                    if index != base.len() {
                        return Err(err("base states must be listed in order"));
                    }
                    match ints(value)?.as_slice() {
                        [x, y] => base.push((x.clone(), y.clone())),
                        _ => return Err(err("expected two state entries")),
                    }
                }
                _ => return Err(err("unknown key")),
            }
        }
        let missing = |what: &str| LinRepError::Syntax {
            line: text.lines().count(),
            msg: format!("missing {what}"),
        };
        let n_eff = n_eff.ok_or_else(|| missing("n_eff"))?;
        if base.len() as u64 != 2 * n_eff {
            return Err(missing("base states"));
        }
        Ok(LinearRepresentation {
            a: a.ok_or_else(|| missing("a"))?,
            b: b.ok_or_else(|| missing("b"))?,
            c: c.ok_or_else(|| missing("c"))?,
            n_eff,
            base_states: base,
            matrices: MatrixPair {
                m0: m0.ok_or_else(|| missing("M0"))?,
                m1: m1.ok_or_else(|| missing("M1"))?,
            },
        })
    }
}

/// Checks `M0`/`M1` against direct evaluation at `k`: returns whether both
/// images match `(v(2k), v(2k+1))` and `(v(2k+1), v(2k+2))`.
pub fn matrices_agree_at(spec: &SternLikeSpec, k: u64) -> bool {
    let m = transition_matrices(spec);
    let mut ev = Evaluator::new(spec);
    let (x, y) = ev.pair(k);
    m.m0.apply((&x, &y)) == ev.pair(2 * k) && m.m1.apply((&x, &y)) == ev.pair(2 * k + 1)
}

/// `v(2^e·n + r)` evaluated through the coefficient table.
pub fn eval_via_table(spec: &SternLikeSpec, table: &CoeffTable, e: u32, r: u64, n: u64) -> BigInt {
    let (a, b) = table.get(e, r).expect("(e, r) inside table");
    a * eval_direct(spec, n) + b * eval_direct(spec, n + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::Preset;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn table_examples() {
        let stern = coeff_table(&Preset::Stern.spec(), 5);
        assert_eq!(coeffs(&stern, 2, 1).unwrap(), (big(2), big(1)));
        assert_eq!(coeffs(&stern, 0, 0).unwrap(), (big(1), big(0)));
        assert_eq!(coeffs(&stern, 0, 1).unwrap(), (big(0), big(1)));
        assert_eq!(coeffs(&stern, 3, 8).unwrap(), (big(0), big(1)));
        assert_eq!(
            coeffs(&stern, 5, 40),
            Err(LinRepError::Range {
                e: 5,
                r: 40,
                e_max: 5
            })
        );
        assert!(coeffs(&stern, 6, 0).is_err());
        let twisted = coeff_table(&Preset::Twisted.spec(), 2);
        assert_eq!(coeffs(&twisted, 1, 1).unwrap(), (big(-1), big(-1)));
        for p in Preset::ALL {
            let t = coeff_table(&p.spec(), 0);
            assert_eq!(coeffs(&t, 0, 0).unwrap(), (big(1), big(0)));
        }
    }

    #[test]
    fn table_reproduces_sequence() {
        for p in Preset::ALL {
            let spec = p.spec();
            let table = coeff_table(&spec, 6);
            for e in 0..=6 {
                for r in 0..=(1u64 << e) {
                    for n in spec.n0()..spec.n0() + 16 {
                        assert_eq!(
                            eval_via_table(&spec, &table, e, r, n),
                            eval_direct(&spec, (n << e) + r),
                            "{p} e={e} r={r} n={n}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn matrices() {
        let m = transition_matrices(&Preset::Stern.spec());
        assert_eq!(m.m0, Matrix2::from_ints([[1, 0], [1, 1]]));
        assert_eq!(m.m1, Matrix2::from_ints([[1, 1], [0, 1]]));
        let m = transition_matrices(&Preset::Twisted.spec());
        assert_eq!(m.m0, Matrix2::from_ints([[-1, 0], [-1, -1]]));
        assert_eq!(m.m1, Matrix2::from_ints([[-1, -1], [0, -1]]));
        let m = transition_matrices(&Preset::TmComplexityShift.spec());
        assert_eq!(m.m0, Matrix2::from_ints([[2, 0], [1, 1]]));
        assert_eq!(m.m1, Matrix2::from_ints([[1, 1], [0, 2]]));
        assert_eq!(
            Matrix2::from_ints([[1, 0], [0, 1]]).apply((&big(3), &big(4))),
            (big(3), big(4))
        );
        for p in Preset::ALL {
            let spec = p.spec();
            for k in spec.n0()..200 {
                assert!(matrices_agree_at(&spec, k), "{p} k={k}");
            }
        }
    }

    #[test]
    fn fast_evaluation() {
        let stern = Preset::Stern.spec();
        assert_eq!(eval_fast(&stern, 11), big(5));
        assert_eq!(eval_fast(&stern, (1 << 20) + 1), big(21));
        assert_eq!(eval_fast(&stern, (1 << 20) + 1), eval_direct(&stern, (1 << 20) + 1));
        let y = Preset::TmComplexityShift.spec();
        for n in 0..4 {
            assert_eq!(&eval_fast(&y, n), &y.init()[n as usize]);
        }
        for p in Preset::ALL {
            let spec = p.spec();
            for n in 0..3000 {
                assert_eq!(eval_fast(&spec, n), eval_direct(&spec, n), "{p} {n}");
            }
        }
    }

    #[test]
    fn recovery() {
        let stern = Preset::Stern.spec();
        assert_eq!(recover_coefficients(&stern, 2, 1, 1, 2).unwrap(), (big(2), big(1)));
        assert_eq!(
            recover_coefficients(&Preset::Z3.spec(), 1, 0, 3, 6),
            Err(LinRepError::SingularSystem { x0: 3, y0: 6 })
        );
        assert_eq!(
            recover_coefficients(&Preset::Twisted.spec(), 1, 1, 1, 2).unwrap(),
            (big(-1), big(-1))
        );
        assert!(matches!(
            recover_coefficients(&Preset::Twisted.spec(), 1, 1, 0, 2),
            Err(LinRepError::BelowStart { .. })
        ));
    }

    #[test]
    fn export_and_replay() {
        let rep = linear_representation(&Preset::Stern.spec());
        assert_eq!(rep.base_states[1], (big(1), big(1)));
        assert_eq!(rep.eval(11), big(5));
        let twisted = linear_representation(&Preset::Twisted.spec());
        assert_eq!(twisted.base_states[1], (big(1), big(-1)));
        for p in Preset::ALL {
            let spec = p.spec();
            let text = linear_representation(&spec).to_string();
            let parsed: LinearRepresentation = text.parse().unwrap();
            assert_eq!(parsed, linear_representation(&spec));
            for n in 0..500 {
                assert_eq!(parsed.eval(n), eval_direct(&spec, n), "{p} {n}");
            }
        }
        assert!("a = 1\n".parse::<LinearRepresentation>().is_err());
    }
}
