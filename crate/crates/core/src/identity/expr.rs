use std::fmt;

use num_bigint::BigInt;

/// Quantified variables of an identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    E,
    R,
    N,
}

impl Var {
    pub fn from_name(name: &str) -> Option<Var> {
        match name {
            "e" => Some(Var::E),
            "r" => Some(Var::R),
            "n" => Some(Var::N),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::E => "e",
            Var::R => "r",
            Var::N => "n",
        }
    }
}

/// Recurrence parameter of a bound sequence: `a[v]`, `b[v]`, `c[v]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    A,
    B,
    C,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::A => "a",
            Param::B => "b",
            Param::C => "c",
        }
    }
}

/// Which coefficient of `v(2^e n + r) = A(e,r) v(n) + B(e,r) v(n+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coeff {
    A,
    B,
}

impl Coeff {
    pub fn name(self) -> &'static str {
        match self {
            Coeff::A => "A",
            Coeff::B => "B",
        }
    }
}

/// Expression tree shared by index positions (integer arithmetic over the
/// variables) and value positions (polynomials in sequence terms).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Var(Var),
    /// `name(index)`
    Term { seq: String, index: Box<Expr> },
    /// `A[name](e, r)` / `B[name](e, r)`
    Coeff {
        which: Coeff,
        seq: String,
        e: Box<Expr>,
        r: Box<Expr>,
    },
    /// `a[name]`, `b[name]`, `c[name]`
    Param { which: Param, seq: String },
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn int(v: i64) -> Expr {
        Expr::Int(BigInt::from(v))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    /// True when the expression only involves integers and variables, i.e.
    /// it may appear as a sequence index or exponent.
    pub fn is_index(&self) -> bool {
        match self {
            Expr::Int(_) | Expr::Var(_) => true,
            Expr::Term { .. } | Expr::Coeff { .. } | Expr::Param { .. } => false,
            Expr::Add(x, y) | Expr::Sub(x, y) | Expr::Mul(x, y) | Expr::Pow(x, y) => {
                x.is_index() && y.is_index()
            }
            Expr::Neg(x) => x.is_index(),
        }
    }

    pub fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Int(_) | Expr::Var(_) | Expr::Param { .. } => {}
            Expr::Term { index, .. } => index.visit(f),
            Expr::Coeff { e, r, .. } => {
                e.visit(f);
                r.visit(f);
            }
            Expr::Add(x, y) | Expr::Sub(x, y) | Expr::Mul(x, y) | Expr::Pow(x, y) => {
                x.visit(f);
                y.visit(f);
            }
            Expr::Neg(x) => x.visit(f),
        }
    }

    pub fn uses_var(&self, var: Var) -> bool {
        let mut found = false;
        self.visit(&mut |x| found |= matches!(x, Expr::Var(v) if *v == var));
        found
    }

    /// Every sequence name referenced by a term, coefficient or parameter.
    pub fn sequences(&self) -> Vec<String> {
        let mut names = Vec::new();
        self.visit(&mut |x| match x {
            Expr::Term { seq, .. } | Expr::Coeff { seq, .. } | Expr::Param { seq, .. }
                if !names.contains(seq) => {
                    names.push(seq.clone());
                }
            _ => {}
        });
        names
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    /// Canonical form: minimal parentheses, `" + "`/`" - "` between terms,
    /// no spaces around `*` and `^`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(v) => write!(f, "{v}"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Term { seq, index } => write!(f, "{seq}({index})"),
            Expr::Coeff { which, seq, e, r } => write!(f, "{}[{seq}]({e}, {r})", which.name()),
            Expr::Param { which, seq } => write!(f, "{}[{seq}]", which.name()),
            Expr::Add(x, y) => {
                x.fmt_child(f, 1)?;
                f.write_str(" + ")?;
                y.fmt_child(f, 2)
            }
            Expr::Sub(x, y) => {
                x.fmt_child(f, 1)?;
                f.write_str(" - ")?;
                y.fmt_child(f, 2)
            }
            Expr::Mul(x, y) => {
                x.fmt_child(f, 2)?;
                f.write_str("*")?;
                y.fmt_child(f, 3)
            }
            Expr::Neg(x) => {
                f.write_str("-")?;
                x.fmt_child(f, 3)
            }
            Expr::Pow(x, y) => {
                x.fmt_child(f, 5)?;
                f.write_str("^")?;
                y.fmt_child(f, 5)
            }
        }
    }
}

/// `lhs == rhs`, unbound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Expr,
    pub rhs: Expr,
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} == {}", self.lhs, self.rhs)
    }
}
