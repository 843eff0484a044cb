//! Stern-like sequences: `v(2n) = a·v(n)`, `v(2n+1) = b·v(n) + c·v(n+1)` for
//! every `n ≥ n0`, with the values below the recurrence range given explicitly.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpecError {
    #[error("init has {got} values, expected 2*max(n0,1) = {expected}")]
    InitLength { expected: usize, got: usize },
    #[error("n0 = 0 but init does not satisfy the recurrence at n = 0 ({0})")]
    InconsistentInit(&'static str),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("range error: lo = {lo} > hi = {hi}")]
    Range { lo: u64, hi: u64 },
    #[error("spec file line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// A validated Stern-like sequence definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SternLikeSpec {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    n0: u64,
    init: Vec<BigInt>,
    name: Option<String>,
    output_min_index: u64,
}

impl SternLikeSpec {
    /// Builds a spec. `init` must hold `v(0) .. v(2·max(n0,1) - 1)`.
    ///
    /// With `n0 = 0` the recurrence at `n = 0` only relates init values to
    /// each other (`v(0) = a·v(0)`, `v(1) = b·v(0) + c·v(1)`), so that case is
    /// checked here instead of being assumed.
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        n0: u64,
        init: Vec<BigInt>,
        name: Option<String>,
    ) -> Result<Self, SpecError> {
        let (a, b, c) = (a.into(), b.into(), c.into());
        let n_eff = n0.max(1);
        let expected = (2 * n_eff) as usize;
        if init.len() != expected {
            return Err(SpecError::InitLength {
                expected,
                got: init.len(),
            });
        }
        if n0 == 0 {
            if init[0] != &a * &init[0] {
                return Err(SpecError::InconsistentInit("v(0) != a*v(0)"));
            }
            if init[1] != &b * &init[0] + &c * &init[1] {
                return Err(SpecError::InconsistentInit("v(1) != b*v(0) + c*v(1)"));
            }
        }
        Ok(SternLikeSpec {
            a,
            b,
            c,
            n0,
            init,
            name,
            output_min_index: 0,
        })
    }

    pub fn with_output_min_index(mut self, index: u64) -> Self {
        self.output_min_index = index;
        self
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    pub fn n0(&self) -> u64 {
        self.n0
    }

    /// `max(n0, 1)`: the recurrence is applied for every index `≥ 2·n_eff`.
    pub fn n_eff(&self) -> u64 {
        self.n0.max(1)
    }

    pub fn init(&self) -> &[BigInt] {
        &self.init
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn output_min_index(&self) -> u64 {
        self.output_min_index
    }

    /// Number of leading indices taken from `init`.
    pub fn base_len(&self) -> u64 {
        2 * self.n_eff()
    }

    /// Evaluates `v(m)` given a lookup for smaller indices. `m` must be at
    /// least `base_len()`.
    fn step(&self, m: u64, v: impl Fn(u64) -> BigInt) -> BigInt {
        let n = m / 2;
        if m.is_multiple_of(2) {
            &self.a * v(n)
        } else {
            &self.b * v(n) + &self.c * v(n + 1)
        }
    }
}

impl fmt::Display for SternLikeSpec {
    /// Renders the spec in the `key = value` spec-file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.name {
            writeln!(f, "name = {name}")?;
        }
        writeln!(f, "a = {}", self.a)?;
        writeln!(f, "b = {}", self.b)?;
        writeln!(f, "c = {}", self.c)?;
        writeln!(f, "n0 = {}", self.n0)?;
        let init: Vec<String> = self.init.iter().map(|v| v.to_string()).collect();
        writeln!(f, "init = {}", init.join(", "))?;
        if self.output_min_index != 0 {
            writeln!(f, "output_min_index = {}", self.output_min_index)?;
        }
        Ok(())
    }
}

/// Parses the line-oriented spec-file format:
///
/// ```text
/// # comment
/// name = stern
/// a = 1
/// b = 1
/// c = 1
/// n0 = 0
/// init = 0, 1
/// ```
///
/// `output_min_index` is accepted as an optional extra key.
pub fn parse_spec_file(text: &str) -> Result<SternLikeSpec, SpecError> {
    let mut a = None;
    let mut b = None;
    let mut c = None;
    let mut n0 = None;
    let mut init = None;
    let mut name = None;
    let mut min_index = 0;
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let syntax = |msg: String| SpecError::Syntax { line: line_no, msg };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| syntax("expected `key = value`".into()))?;
        let (key, value) = (key.trim(), value.trim());
        let int = |v: &str| {
            BigInt::from_str(v).map_err(|_| syntax(format!("`{v}` is not an integer")))
        };
        match key {
            "a" => a = Some(int(value)?),
            "b" => b = Some(int(value)?),
            "c" => c = Some(int(value)?),
            "n0" => {
                n0 = Some(
                    value
                        .parse::<u64>()
                        .map_err(|_| syntax(format!("n0 `{value}` is not a non-negative integer")))?,
                )
            }
            "init" => {
                init = Some(
                    value
                        .split(',')
                        .map(|v| int(v.trim()))
                        .collect::<Result<Vec<_>, _>>()?,
                )
            }
            "name" => name = Some(value.to_string()),
            "output_min_index" => {
                min_index = value
                    .parse::<u64>()
                    .map_err(|_| syntax(format!("`{value}` is not a non-negative integer")))?
            }
            other => return Err(syntax(format!("unknown key `{other}`"))),
        }
    }
    let missing = |key: &str| SpecError::Syntax {
        line: last_line,
        msg: format!("missing key `{key}`"),
    };
    let spec = SternLikeSpec::new(
        a.ok_or_else(|| missing("a"))?,
        b.ok_or_else(|| missing("b"))?,
        c.ok_or_else(|| missing("c"))?,
        n0.ok_or_else(|| missing("n0"))?,
        init.ok_or_else(|| missing("init"))?,
        name,
    )?;
    Ok(spec.with_output_min_index(min_index))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Stern,
    Twisted,
    Z1,
    Z2,
    Z3,
    TmComplexityShift,
    Josephus,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::Stern,
        Preset::Twisted,
        Preset::Z1,
        Preset::Z2,
        Preset::Z3,
        Preset::TmComplexityShift,
        Preset::Josephus,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Stern => "stern",
            Preset::Twisted => "twisted",
            Preset::Z1 => "z1",
            Preset::Z2 => "z2",
            Preset::Z3 => "z3",
            Preset::TmComplexityShift => "tm_complexity_shift",
            Preset::Josephus => "josephus",
        }
    }

    /// Fixed parameter table. Values past the recurrence start are never
    /// stored here unless the recurrence cannot produce them.
    pub fn spec(self) -> SternLikeSpec {
        let ints = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        let (a, b, c, n0, init, min_index) = match self {
            Preset::Stern => (1, 1, 1, 0, ints(&[0, 1]), 0),
            Preset::Twisted => (-1, -1, -1, 1, ints(&[0, 1]), 0),
            Preset::Z1 => (1, -1, 1, 1, ints(&[0, 1]), 0),
            Preset::Z2 => (-1, -1, 1, 1, ints(&[0, 1]), 0),
            Preset::Z3 => (-1, 1, 1, 1, ints(&[0, 1]), 0),
            // y(n) = number of length-(n+1) factors of Thue-Morse
            Preset::TmComplexityShift => (2, 1, 1, 2, ints(&[2, 4, 6, 10]), 0),
            // d(0) is a placeholder; the sequence starts at index 1
            Preset::Josephus => (2, 1, 1, 2, ints(&[0, 1, 1, 2]), 1),
        };
        SternLikeSpec::new(a, b, c, n0, init, Some(self.as_str().to_string()))
            .expect("preset table is valid")
            .with_output_min_index(min_index)
    }
}

impl FromStr for Preset {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| SpecError::UnknownPreset(s.to_string()))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn preset(name: &str) -> Result<SternLikeSpec, SpecError> {
    Ok(name.parse::<Preset>()?.spec())
}

/// Memoized evaluator working on consecutive pairs `(v(k), v(k+1))`.
///
/// Each pair depends only on the pair at `k / 2`, so evaluating `v(n)` touches
/// `O(log n)` pairs and recursion depth stays logarithmic.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    spec: &'a SternLikeSpec,
    memo: HashMap<u64, (BigInt, BigInt)>,
}

impl<'a> Evaluator<'a> {
    pub fn new(spec: &'a SternLikeSpec) -> Self {
        Evaluator {
            spec,
            memo: HashMap::new(),
        }
    }

    pub fn spec(&self) -> &SternLikeSpec {
        self.spec
    }

    pub fn value(&mut self, n: u64) -> BigInt {
        if n < self.spec.base_len() {
            return self.spec.init[n as usize].clone();
        }
        self.pair(n).0
    }

    /// `(v(k), v(k+1))`.
    pub fn pair(&mut self, k: u64) -> (BigInt, BigInt) {
        let base = self.spec.base_len();
        if k + 1 < base {
            return (
                self.spec.init[k as usize].clone(),
                self.spec.init[k as usize + 1].clone(),
            );
        }
        if let Some(p) = self.memo.get(&k) {
            return p.clone();
        }
        let spec = self.spec;
        let (lo, hi) = self.pair(k / 2);
        let odd = &spec.b * &lo + &spec.c * &hi;
        let result = if k.is_multiple_of(2) {
            // k = 2j >= base, k + 1 = 2j + 1
            (&spec.a * &lo, odd)
        } else {
            // k = 2j + 1, k + 1 = 2(j + 1); k itself may still be an init index
            let first = if k < base {
                spec.init[k as usize].clone()
            } else {
                odd
            };
            (first, &spec.a * &hi)
        };
        self.memo.insert(k, result.clone());
        result
    }
}

/// `v(n)` by memoized recursion.
pub fn eval_direct(spec: &SternLikeSpec, n: u64) -> BigInt {
    Evaluator::new(spec).value(n)
}

/// `v(n)` by plain recursion on single terms, without any cache. Linear in
/// `n`; only meant for cross-checking small indices.
pub fn eval_naive(spec: &SternLikeSpec, n: u64) -> BigInt {
    if n < spec.base_len() {
        return spec.init[n as usize].clone();
    }
    spec.step(n, |k| eval_naive(spec, k))
}

/// `[v(lo), ..., v(hi)]`.
pub fn eval_range(spec: &SternLikeSpec, lo: u64, hi: u64) -> Result<Vec<BigInt>, SpecError> {
    if lo > hi {
        return Err(SpecError::Range { lo, hi });
    }
    if hi < DenseTable::MAX_LEN {
        let table = DenseTable::build(spec, hi);
        return Ok((lo..=hi).map(|n| table.get(n).unwrap().clone()).collect());
    }
    let mut ev = Evaluator::new(spec);
    Ok((lo..=hi).map(|n| ev.value(n)).collect())
}

/// All values `v(0) ..= v(max)` computed bottom-up.
#[derive(Debug, Clone)]
pub struct DenseTable {
    values: Vec<BigInt>,
}

impl DenseTable {
    /// Largest table the identity engine materializes; beyond this it falls
    /// back to [`Evaluator`].
    pub const MAX_LEN: u64 = 1 << 22;

    pub fn build(spec: &SternLikeSpec, max: u64) -> Self {
        let len = max as usize + 1;
        let mut values: Vec<BigInt> = Vec::with_capacity(len);
        for m in 0..len as u64 {
            let value = if m < spec.base_len() {
                spec.init[m as usize].clone()
            } else {
                spec.step(m, |k| values[k as usize].clone())
            };
            values.push(value);
        }
        DenseTable { values }
    }

    pub fn get(&self, n: u64) -> Option<&BigInt> {
        self.values.get(n as usize)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }
}
