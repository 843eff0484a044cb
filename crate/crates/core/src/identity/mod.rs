//! Exhaustive checking of polynomial identities between sequence terms.
//!
//! An identity is an [`Equation`] whose sequence names are bound to
//! [`SternLikeSpec`]s, quantified over `e ∈ [0, E]`, `r ∈ [0, 2^e]` and
//! `n ∈ [n_min, N]`. Verification walks the grid in lexicographic
//! `(e, r, n)` order and reports the first failing point.

pub mod catalog;
pub mod expr;
pub mod parser;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::linrep::{coeff_table, CoeffTable};
use crate::recurrence::{DenseTable, Evaluator, SternLikeSpec};

pub use catalog::{
    catalog, compare_forms, generic_cor, generic_thm, lookup, CatalogEntry, Form, FormComparison,
};
pub use expr::{Equation, Expr, Var};
pub use parser::{parse_equation, ParseError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum IdentityError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("sequence `{0}` is not bound to a spec")]
    Unbound(String),
    #[error("at (e, r, n) = ({e}, {r}, {n}): {msg}")]
    Domain { e: u32, r: u64, n: u64, msg: String },
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

/// An equation together with its sequence bindings and the lower end of its
/// `n` range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Identity {
    pub equation: Equation,
    pub bindings: BTreeMap<String, SternLikeSpec>,
    pub n_min: u64,
}

impl Identity {
    pub fn parse(text: &str) -> Result<Identity, ParseError> {
        Ok(Identity {
            equation: parse_equation(text)?,
            bindings: BTreeMap::new(),
            n_min: 0,
        })
    }

    pub fn bind(mut self, name: impl Into<String>, spec: SternLikeSpec) -> Self {
        self.bindings.insert(name.into(), spec);
        self
    }

    pub fn with_n_min(mut self, n_min: u64) -> Self {
        self.n_min = n_min;
        self
    }

    /// Sequence names used by either side.
    pub fn sequences(&self) -> Vec<String> {
        let mut names = self.equation.lhs.sequences();
        for name in self.equation.rhs.sequences() {
            if !names.contains(&name) {
                names.push(name);
            }
        }
        names
    }

    pub fn unbound(&self) -> Option<String> {
        self.sequences()
            .into_iter()
            .find(|name| !self.bindings.contains_key(name))
    }

    /// Identities without `n` are checked once per `(e, r)`, at `n = n_min`.
    pub fn uses_n(&self) -> bool {
        self.equation.lhs.uses_var(Var::N) || self.equation.rhs.uses_var(Var::N)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Env {
    e: u32,
    r: u64,
    n: u64,
}

impl Env {
    fn get(&self, var: Var) -> i128 {
        match var {
            Var::E => self.e as i128,
            Var::R => self.r as i128,
            Var::N => self.n as i128,
        }
    }

    fn domain(&self, msg: impl Into<String>) -> IdentityError {
        IdentityError::Domain {
            e: self.e,
            r: self.r,
            n: self.n,
            msg: msg.into(),
        }
    }
}

const MAX_EXPONENT: i128 = 1 << 16;

/// Integer evaluation of an index expression.
fn eval_index(expr: &Expr, env: &Env) -> Result<i128, IdentityError> {
    let overflow = || env.domain(format!("index `{expr}` overflows"));
    match expr {
        Expr::Int(v) => v.to_i128().ok_or_else(overflow),
        Expr::Var(v) => Ok(env.get(*v)),
        Expr::Add(x, y) => eval_index(x, env)?
            .checked_add(eval_index(y, env)?)
            .ok_or_else(overflow),
        Expr::Sub(x, y) => eval_index(x, env)?
            .checked_sub(eval_index(y, env)?)
            .ok_or_else(overflow),
        Expr::Mul(x, y) => eval_index(x, env)?
            .checked_mul(eval_index(y, env)?)
            .ok_or_else(overflow),
        Expr::Neg(x) => eval_index(x, env)?.checked_neg().ok_or_else(overflow),
        Expr::Pow(x, y) => {
            let base = eval_index(x, env)?;
            let exp = eval_index(y, env)?;
            if exp < 0 {
                return Err(env.domain(format!("negative exponent in `{expr}`")));
            }
            u32::try_from(exp)
                .ok()
                .and_then(|exp| base.checked_pow(exp))
                .ok_or_else(overflow)
        }
        Expr::Term { .. } | Expr::Coeff { .. } | Expr::Param { .. } => {
            Err(env.domain(format!("`{expr}` is not an index expression")))
        }
    }
}

fn to_index(expr: &Expr, env: &Env) -> Result<u64, IdentityError> {
    let value = eval_index(expr, env)?;
    u64::try_from(value).map_err(|_| env.domain(format!("index `{expr}` = {value} is negative")))
}

/// Validated `(e, r)` arguments of a coefficient term.
fn coeff_args(e: &Expr, r: &Expr, env: &Env) -> Result<(u32, u64), IdentityError> {
    let ev = to_index(e, env)?;
    let rv = to_index(r, env)?;
    let ev = u32::try_from(ev)
        .ok()
        .filter(|&x| x < 63)
        .ok_or_else(|| env.domain(format!("coefficient depth {ev} too large")))?;
    if rv > 1u64 << ev {
        return Err(env.domain(format!("coefficient r = {rv} exceeds 2^{ev}")));
    }
    Ok((ev, rv))
}

/// Largest term index and coefficient depth needed per sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Needs {
    per_seq: BTreeMap<String, (u64, Option<u32>)>,
}

impl Needs {
    fn merge(&mut self, other: Needs) {
        for (name, (idx, depth)) in other.per_seq {
            let slot = self.per_seq.entry(name).or_insert((0, None));
            slot.0 = slot.0.max(idx);
            slot.1 = slot.1.max(depth);
        }
    }

    fn slot(&mut self, seq: &str) -> &mut (u64, Option<u32>) {
        if !self.per_seq.contains_key(seq) {
            self.per_seq.insert(seq.to_string(), (0, None));
        }
        self.per_seq.get_mut(seq).unwrap()
    }

    fn scan(&mut self, expr: &Expr, env: &Env) -> Result<(), IdentityError> {
        match expr {
            Expr::Int(_) | Expr::Var(_) | Expr::Param { .. } => Ok(()),
            Expr::Term { seq, index } => {
                let idx = to_index(index, env)?;
                let slot = self.slot(seq);
                slot.0 = slot.0.max(idx);
                Ok(())
            }
            Expr::Coeff { seq, e, r, .. } => {
                let (ev, _) = coeff_args(e, r, env)?;
                let slot = self.slot(seq);
                slot.1 = slot.1.max(Some(ev));
                Ok(())
            }
            Expr::Add(x, y) | Expr::Sub(x, y) | Expr::Mul(x, y) => {
                self.scan(x, env)?;
                self.scan(y, env)
            }
            Expr::Pow(x, y) => {
                self.scan(x, env)?;
                let exp = eval_index(y, env)?;
                if !(0..=MAX_EXPONENT).contains(&exp) {
                    return Err(env.domain(format!("exponent in `{expr}` out of range")));
                }
                Ok(())
            }
            Expr::Neg(x) => self.scan(x, env),
        }
    }
}

struct SeqData<'a> {
    spec: &'a SternLikeSpec,
    table: DenseTable,
    coeffs: Option<CoeffTable>,
}

/// Read-only evaluation state shared by all workers.
struct Context<'a> {
    seqs: HashMap<&'a str, SeqData<'a>>,
}

impl<'a> Context<'a> {
    fn build(identity: &'a Identity, needs: &Needs) -> Context<'a> {
        let seqs = identity
            .bindings
            .iter()
            .map(|(name, spec)| {
                let (max_idx, depth) = needs.per_seq.get(name).copied().unwrap_or((0, None));
                let dense_max = max_idx.min(DenseTable::MAX_LEN - 1);
                let data = SeqData {
                    spec,
                    table: DenseTable::build(spec, dense_max),
                    coeffs: depth.map(|d| coeff_table(spec, d)),
                };
                (name.as_str(), data)
            })
            .collect();
        Context { seqs }
    }

    fn seq(&self, name: &str, env: &Env) -> Result<&SeqData<'a>, IdentityError> {
        self.seqs
            .get(name)
            .ok_or_else(|| env.domain(format!("sequence `{name}` is not bound")))
    }

    fn eval(&self, expr: &Expr, env: &Env) -> Result<BigInt, IdentityError> {
        Ok(match expr {
            Expr::Int(v) => v.clone(),
            Expr::Var(v) => BigInt::from(env.get(*v)),
            Expr::Term { seq, index } => {
                let data = self.seq(seq, env)?;
                let idx = to_index(index, env)?;
                match data.table.get(idx) {
                    Some(v) => v.clone(),
                    None => Evaluator::new(data.spec).value(idx),
                }
            }
            Expr::Coeff { which, seq, e, r } => {
                let data = self.seq(seq, env)?;
                let (ev, rv) = coeff_args(e, r, env)?;
                let table = data
                    .coeffs
                    .as_ref()
                    .ok_or_else(|| env.domain("coefficient table missing"))?;
                let (a, b) = table
                    .get(ev, rv)
                    .map_err(|err| env.domain(err.to_string()))?;
                match which {
                    expr::Coeff::A => a.clone(),
                    expr::Coeff::B => b.clone(),
                }
            }
            Expr::Param { which, seq } => {
                let spec = self.seq(seq, env)?.spec;
                match which {
                    expr::Param::A => spec.a().clone(),
                    expr::Param::B => spec.b().clone(),
                    expr::Param::C => spec.c().clone(),
                }
            }
            Expr::Add(x, y) => self.eval(x, env)? + self.eval(y, env)?,
            Expr::Sub(x, y) => self.eval(x, env)? - self.eval(y, env)?,
            Expr::Mul(x, y) => self.eval(x, env)? * self.eval(y, env)?,
            Expr::Neg(x) => -self.eval(x, env)?,
            Expr::Pow(x, y) => {
                let base = self.eval(x, env)?;
                let exp = eval_index(y, env)?;
                let exp = u32::try_from(exp)
                    .ok()
                    .filter(|&x| x as i128 <= MAX_EXPONENT)
                    .ok_or_else(|| env.domain(format!("exponent in `{expr}` out of range")))?;
                num_traits::Pow::pow(base, exp)
            }
        })
    }
}

/// Both sides of one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub lhs: BigInt,
    pub rhs: BigInt,
    pub equal: bool,
}

/// Evaluates one grid point exactly.
pub fn check_instance(identity: &Identity, e: u32, r: u64, n: u64) -> Result<Instance, IdentityError> {
    if let Some(name) = identity.unbound() {
        return Err(IdentityError::Unbound(name));
    }
    let env = Env { e, r, n };
    let mut needs = Needs::default();
    needs.scan(&identity.equation.lhs, &env)?;
    needs.scan(&identity.equation.rhs, &env)?;
    let ctx = Context::build(identity, &needs);
    let lhs = ctx.eval(&identity.equation.lhs, &env)?;
    let rhs = ctx.eval(&identity.equation.rhs, &env)?;
    let equal = lhs == rhs;
    Ok(Instance { lhs, rhs, equal })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub e: u32,
    pub r: u64,
    pub n: u64,
    pub lhs: BigInt,
    pub rhs: BigInt,
}

/// Outcome of a grid sweep. When a counterexample exists it is the
/// lexicographically smallest failing `(e, r, n)` and `checked_count` is its
/// 1-based position in the sweep; otherwise `checked_count` is the grid size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub checked_count: u64,
    pub counterexample: Option<Counterexample>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            None => write!(f, "holds ({} instances checked)", self.checked_count),
            Some(c) => write!(
                f,
                "FAILS at e={} r={} n={}: lhs={} rhs={} (after {} instances)",
                c.e, c.r, c.n, c.lhs, c.rhs, self.checked_count
            ),
        }
    }
}

/// Number of `(e, r)` pairs with `e' < e`: `Σ_{e'<e} (2^e' + 1)`.
fn pairs_before(e: u32) -> u64 {
    (1u64 << e) - 1 + e as u64
}

fn grid_pairs(e_max: u32) -> Vec<(u32, u64)> {
    (0..=e_max)
        .flat_map(|e| (0..=(1u64 << e)).map(move |r| (e, r)))
        .collect()
}

/// Sweeps the grid on the current rayon pool.
pub fn verify(identity: &Identity, e_max: u32, n_max: u64) -> Result<Verdict, IdentityError> {
    if let Some(name) = identity.unbound() {
        return Err(IdentityError::Unbound(name));
    }
    if e_max >= 40 {
        return Err(IdentityError::Domain {
            e: e_max,
            r: 0,
            n: 0,
            msg: "e range too large to sweep".into(),
        });
    }
    let lhs = &identity.equation.lhs;
    let rhs = &identity.equation.rhs;
    let n_lo = identity.n_min;
    let n_hi = if identity.uses_n() { n_max } else { n_lo };
    let n_count = if n_hi >= n_lo { n_hi - n_lo + 1 } else { 0 };
    let pairs = grid_pairs(e_max);

    // pass 1: index bounds (and the first domain error, if any)
    let needs = pairs
        .par_iter()
        .map(|&(e, r)| {
            let mut needs = Needs::default();
            for n in n_lo..=n_hi {
                let env = Env { e, r, n };
                needs.scan(lhs, &env)?;
                needs.scan(rhs, &env)?;
            }
            Ok(needs)
        })
        .collect::<Vec<Result<Needs, IdentityError>>>()
        .into_iter()
        .try_fold(Needs::default(), |mut acc, item| {
            acc.merge(item?);
            Ok::<_, IdentityError>(acc)
        })?;
    let ctx = Context::build(identity, &needs);

    // pass 2: evaluation; find_first keeps the lexicographic minimum
    let first_bad = pairs
        .par_iter()
        .map(|&(e, r)| -> Result<Option<Counterexample>, IdentityError> {
            for n in n_lo..=n_hi {
                let env = Env { e, r, n };
                let l = ctx.eval(lhs, &env)?;
                let rv = ctx.eval(rhs, &env)?;
                if l != rv {
                    return Ok(Some(Counterexample { e, r, n, lhs: l, rhs: rv }));
                }
            }
            Ok(None)
        })
        .find_first(|res| !matches!(res, Ok(None)));

    match first_bad {
        None => Ok(Verdict {
            holds: true,
            checked_count: pairs.len() as u64 * n_count,
            counterexample: None,
        }),
        Some(Err(err)) => Err(err),
        Some(Ok(Some(c))) => Ok(Verdict {
            holds: false,
            checked_count: (pairs_before(c.e) + c.r) * n_count + (c.n - n_lo + 1),
            counterexample: Some(c),
        }),
        Some(Ok(None)) => unreachable!(),
    }
}

/// Like [`verify`], on a dedicated pool with `jobs` worker threads.
pub fn verify_with_jobs(
    identity: &Identity,
    e_max: u32,
    n_max: u64,
    jobs: usize,
) -> Result<Verdict, IdentityError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|err| IdentityError::Pool(err.to_string()))?;
    pool.install(|| verify(identity, e_max, n_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::Preset;

    fn stern_identity(text: &str) -> Identity {
        Identity::parse(text).unwrap().bind("s", Preset::Stern.spec())
    }

    #[test]
    fn coons_instance() {
        let coons = lookup("coons").unwrap().identity;
        let inst = check_instance(&coons, 2, 3, 1).unwrap();
        assert_eq!((inst.lhs, inst.rhs, inst.equal), (9.into(), 9.into(), true));
    }

    #[test]
    fn prop2_instances() {
        let prop2 = lookup("prop2").unwrap().identity;
        let inst = check_instance(&prop2, 1, 1, 3).unwrap();
        assert_eq!((inst.lhs, inst.rhs, inst.equal), ((-1).into(), (-1).into(), true));
        // below the stated range of n the relation breaks
        let inst = check_instance(&prop2, 1, 1, 0).unwrap();
        assert_eq!((inst.lhs, inst.rhs, inst.equal), (1.into(), (-1).into(), false));
    }

    #[test]
    fn domain_errors() {
        let id = stern_identity("s(r - 1) == s(r)");
        assert!(matches!(
            check_instance(&id, 0, 0, 0),
            Err(IdentityError::Domain { e: 0, r: 0, n: 0, .. })
        ));
        assert!(matches!(verify(&id, 2, 0), Err(IdentityError::Domain { r: 0, .. })));
        let unbound = Identity::parse("q(n) == 0").unwrap();
        assert_eq!(verify(&unbound, 1, 1), Err(IdentityError::Unbound("q".into())));
    }

    #[test]
    fn prop1_count() {
        let prop1 = lookup("prop1").unwrap().identity;
        let verdict = verify(&prop1, 4, 20).unwrap();
        let pairs: u64 = (0..=4).map(|e| (1u64 << e) + 1).sum();
        assert_eq!(verdict, Verdict { holds: true, checked_count: pairs * 21, counterexample: None });
    }

    #[test]
    fn mutated_coons_minimal_counterexample() {
        let id = stern_identity("s(r)*s(2*n+4) + s(2^e-r)*s(2*n+3) == s(2^e*(n+2)+r) + s(2^e*(n+1)+r)");
        let verdict = verify(&id, 4, 16).unwrap();
        let c = verdict.counterexample.unwrap();
        // s(1)s(4) + s(0)s(3) = 1 against s(3) + s(2) = 3
        assert_eq!((c.e, c.r, c.n), (0, 1, 0));
        assert_eq!((c.lhs, c.rhs), (1.into(), 3.into()));
        assert_eq!(verdict.checked_count, 17 + 1);
    }

    #[test]
    fn neighbouring_terms() {
        let id = stern_identity("s(r) == s(r+1)");
        let verdict = verify(&id, 1, 1).unwrap();
        let c = verdict.counterexample.unwrap();
        assert_eq!((c.e, c.r, c.n), (0, 0, 0));
        assert_eq!((c.lhs, c.rhs), (0.into(), 1.into()));
    }

    #[test]
    fn no_n_means_single_column() {
        let reflect = lookup("stern_reflect").unwrap().identity;
        let verdict = verify(&reflect, 3, 1000).unwrap();
        assert_eq!(verdict.checked_count, 2 + 3 + 5 + 9);
    }

    #[test]
    fn jobs_do_not_change_verdicts() {
        let id = stern_identity("s(2*n+1) == s(n) + s(n+1) + r*n*(e - 3)");
        let one = verify_with_jobs(&id, 6, 30, 1).unwrap();
        let eight = verify_with_jobs(&id, 6, 30, 8).unwrap();
        assert_eq!(one, eight);
        assert!(!one.holds);
    }

    #[test]
    fn empty_n_range_holds_vacuously() {
        let id = lookup("prop2").unwrap().identity;
        assert_eq!(verify(&id, 2, 0).unwrap().checked_count, 0);
    }
}
