//! Named identities about the Stern sequence `s`, its twisted version `t`
//! and the sign variants `z1`, `z2`, `z3`.
//!
//! Some relations appear in two forms. `Printed` entries keep the published
//! formula as written. `Derived` entries hold the relation obtained by
//! substituting the coefficient table into the generic corollary
//! `A(e,r)·v(2n+3) + B(e,r)·v(2n+5) = c·v(2^e(n+2)+r) + b·v(2^e(n+1)+r)`,
//! with `A`, `B` identified from the values at `n = 0, 1, 2`.

use std::fmt;

use super::{verify, Identity, IdentityError, Verdict};
use crate::recurrence::{Preset, SternLikeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// Single published form, no competing reading.
    Stated,
    /// Published form as written, which may disagree with the derivation.
    Printed,
    /// Form re-derived from the coefficient recursions.
    Derived,
}

impl Form {
    pub fn as_str(self) -> &'static str {
        match self {
            Form::Stated => "stated",
            Form::Printed => "as-printed",
            Form::Derived => "as-derived",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub form: Form,
    /// Name of the entry holding the other form of the same relation.
    pub counterpart: Option<&'static str>,
    pub description: &'static str,
    pub identity: Identity,
}

struct Raw {
    name: &'static str,
    form: Form,
    counterpart: Option<&'static str>,
    description: &'static str,
    text: &'static str,
    n_min: u64,
}

const fn raw(
    name: &'static str,
    form: Form,
    counterpart: Option<&'static str>,
    description: &'static str,
    text: &'static str,
    n_min: u64,
) -> Raw {
    Raw {
        name,
        form,
        counterpart,
        description,
        text,
        n_min,
    }
}

use Form::{Derived, Printed, Stated};

const ENTRIES: &[Raw] = &[
    raw(
        "prop1",
        Stated,
        None,
        "Stern values along 2^e n + r in terms of s(n), s(n+1)",
        "s(2^e*n + r) == s(r)*s(n+1) + s(2^e - r)*s(n)",
        0,
    ),
    raw(
        "prop2",
        Stated,
        None,
        "twisted values along 2^e n + r with Stern coefficients",
        "t(2^e*n + r) == (0-1)^e*(s(r)*t(n+1) + s(2^e - r)*t(n))",
        1,
    ),
    raw(
        "coons",
        Stated,
        None,
        "correlation identity for the Stern sequence",
        "s(r)*s(2*n+5) + s(2^e-r)*s(2*n+3) == s(2^e*(n+2)+r) + s(2^e*(n+1)+r)",
        0,
    ),
    raw(
        "stern_reflect",
        Stated,
        None,
        "Stern reflection s(2^e + r) - s(r) = s(2^e - r)",
        "s(2^e + r) - s(r) == s(2^e - r)",
        0,
    ),
    raw(
        "t_similar",
        Stated,
        None,
        "twisted values along 2^e n + r with twisted coefficients",
        "t(2^e*n + r) == -t(2^(e+1) + r)*t(n) - t(3*2^e - r)*t(n+1)",
        1,
    ),
    raw(
        "t_corollary",
        Printed,
        Some("t_corollary_derived"),
        "correlation identity for the twisted sequence, published form",
        "t(2^(e+1) + r)*t(2*n+3) + t(3*2^e - r)*t(2*n+5) == t(2^e*(n+2)+r) + t(2^e*(n+1)+r)",
        0,
    ),
    raw(
        "t_corollary_derived",
        Derived,
        Some("t_corollary"),
        "correlation identity for the twisted sequence, A = -t(2^(e+1)+r), B = -t(3*2^e-r), b = c = -1",
        "-t(2^(e+1) + r)*t(2*n+3) - t(3*2^e - r)*t(2*n+5) == -t(2^e*(n+2)+r) - t(2^e*(n+1)+r)",
        0,
    ),
    raw(
        "t_aux",
        Stated,
        None,
        "twisted auxiliary relation",
        "t(2^(e+1) + r) + t(2^e + r) == t(3*2^e - r)",
        0,
    ),
    raw(
        "z2_aux",
        Stated,
        None,
        "z2 auxiliary relation",
        "z2(2^e + r) - z2(r) == -z2(5*2^e + r)",
        0,
    ),
    raw(
        "z1_thm",
        Printed,
        Some("z1_thm_derived"),
        "z1 along 2^e n + r, published form",
        "z1(2^e*n + r) == z1(2^(e+1) + r)*z1(n) + z1(r)*z1(n+1)",
        0,
    ),
    raw(
        "z1_thm_derived",
        Derived,
        Some("z1_thm"),
        "z1 along 2^e n + r, A = z1(2^(e+1)+r) from n = 2, B = z1(r) from n = 0",
        "z1(2^e*n + r) == z1(2^(e+1) + r)*z1(n) + z1(r)*z1(n+1)",
        0,
    ),
    raw(
        "z2_thm",
        Printed,
        Some("z2_thm_derived"),
        "z2 along 2^e n + r, published form (coefficient index 5*2^e*n + r)",
        "z2(2^e*n + r) == -z2(5*2^e*n + r)*z2(n) + z2(r)*z2(n+1)",
        0,
    ),
    raw(
        "z2_thm_alt",
        Printed,
        Some("z2_thm_derived"),
        "z2 along 2^e n + r, published form read with coefficient index 5*2^e + r",
        "z2(2^e*n + r) == -z2(5*2^e + r)*z2(n) + z2(r)*z2(n+1)",
        0,
    ),
    raw(
        "z2_thm_derived",
        Derived,
        Some("z2_thm"),
        "z2 along 2^e n + r, A = z2(2^e+r) + z2(r) from n = 1 (z2(2) = -1), B = z2(r)",
        "z2(2^e*n + r) == (z2(2^e + r) + z2(r))*z2(n) + z2(r)*z2(n+1)",
        0,
    ),
    raw(
        "z3_thm",
        Printed,
        Some("z3_thm_derived"),
        "z3 along 2^e n + r, published form",
        "z3(2^e*n + r) == -z3(2^(e+1) + r)*z3(n) + z3(r)*z3(n+1)",
        0,
    ),
    raw(
        "z3_thm_derived",
        Derived,
        Some("z3_thm"),
        "z3 along 2^e n + r, A = -z3(2^(e+1)+r) from n = 2, B = z3(r) from n = 0",
        "z3(2^e*n + r) == -z3(2^(e+1) + r)*z3(n) + z3(r)*z3(n+1)",
        0,
    ),
    raw(
        "z1_cor",
        Printed,
        Some("z1_cor_derived"),
        "z1 correlation identity, published form",
        "z1(2^(e+1)+r)*z1(2*n+5) + z1(r)*z1(2*n+3) == -z1(2^e*(n+2)+r) + z1(2^e*(n+1)+r)",
        0,
    ),
    raw(
        "z1_cor_derived",
        Derived,
        Some("z1_cor"),
        "z1 correlation identity from the generic corollary, (a, b, c) = (1, -1, 1)",
        "z1(2^(e+1)+r)*z1(2*n+3) + z1(r)*z1(2*n+5) == z1(2^e*(n+2)+r) - z1(2^e*(n+1)+r)",
        0,
    ),
    raw(
        "z2_cor",
        Printed,
        Some("z2_cor_derived"),
        "z2 correlation identity, published form",
        "-z2(5*2^e+r)*z2(2*n+5) + z2(r)*z2(2*n+3) == -z2(2^e*(n+2)+r) + z2(2^e*(n+1)+r)",
        0,
    ),
    raw(
        "z2_cor_derived",
        Derived,
        Some("z2_cor"),
        "z2 correlation identity from the generic corollary, (a, b, c) = (-1, -1, 1)",
        "(z2(2^e+r) + z2(r))*z2(2*n+3) + z2(r)*z2(2*n+5) == z2(2^e*(n+2)+r) - z2(2^e*(n+1)+r)",
        0,
    ),
    raw(
        "z3_cor",
        Printed,
        Some("z3_cor_derived"),
        "z3 correlation identity, published form",
        "-z3(2^(e+1)+r)*z3(2*n+5) + z3(r)*z3(2*n+3) == z3(2^e*(n+2)+r) + z3(2^e*(n+1)+r)",
        0,
    ),
    raw(
        "z3_cor_derived",
        Derived,
        Some("z3_cor"),
        "z3 correlation identity from the generic corollary, (a, b, c) = (-1, 1, 1)",
        "-z3(2^(e+1)+r)*z3(2*n+3) + z3(r)*z3(2*n+5) == z3(2^e*(n+2)+r) + z3(2^e*(n+1)+r)",
        0,
    ),
];

pub const GENERIC_THM: &str = "v(2^e*n + r) == A[v](e, r)*v(n) + B[v](e, r)*v(n+1)";

pub const GENERIC_COR: &str =
    "A[v](e, r)*v(2*n+3) + B[v](e, r)*v(2*n+5) == c[v]*v(2^e*(n+2)+r) + b[v]*v(2^e*(n+1)+r)";

fn bind_presets(mut identity: Identity) -> Identity {
    for name in identity.sequences() {
        let preset = match name.as_str() {
            "s" => Preset::Stern,
            "t" => Preset::Twisted,
            "z1" => Preset::Z1,
            "z2" => Preset::Z2,
            "z3" => Preset::Z3,
            _ => continue,
        };
        identity = identity.bind(name, preset.spec());
    }
    identity
}

/// `v(2^e n + r) = A(e,r)·v(n) + B(e,r)·v(n+1)` for `n ≥ n0`, with `A`, `B`
/// taken from the coefficient table of `spec`.
pub fn generic_thm(spec: &SternLikeSpec) -> Identity {
    Identity::parse(GENERIC_THM)
        .expect("catalog text parses")
        .bind("v", spec.clone())
        .with_n_min(spec.n0())
}

/// The generic correlation identity for any Stern-like `spec`.
pub fn generic_cor(spec: &SternLikeSpec) -> Identity {
    Identity::parse(GENERIC_COR)
        .expect("catalog text parses")
        .bind("v", spec.clone())
        .with_n_min(spec.n0())
}

/// Every catalog entry; the two generic entries are bound to the Stern
/// sequence.
pub fn catalog() -> Vec<CatalogEntry> {
    let mut entries: Vec<CatalogEntry> = ENTRIES
        .iter()
        .map(|raw| CatalogEntry {
            name: raw.name,
            form: raw.form,
            counterpart: raw.counterpart,
            description: raw.description,
            identity: bind_presets(
                Identity::parse(raw.text)
                    .expect("catalog text parses")
                    .with_n_min(raw.n_min),
            ),
        })
        .collect();
    let stern = Preset::Stern.spec();
    entries.push(CatalogEntry {
        name: "generic_thm",
        form: Stated,
        counterpart: None,
        description: "v(2^e n + r) through the coefficient table (v bound to stern by default)",
        identity: generic_thm(&stern),
    });
    entries.push(CatalogEntry {
        name: "generic_cor",
        form: Stated,
        counterpart: None,
        description: "generic correlation identity (v bound to stern by default)",
        identity: generic_cor(&stern),
    });
    entries
}

pub fn lookup(name: &str) -> Result<CatalogEntry, IdentityError> {
    catalog()
        .into_iter()
        .find(|entry| entry.name == name)
        .ok_or_else(|| IdentityError::UnknownIdentity(name.to_string()))
}


/// A published form checked next to its re-derived counterpart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormComparison {
    pub printed: &'static str,
    pub derived: &'static str,
    pub printed_verdict: Verdict,
    pub derived_verdict: Verdict,
}

impl fmt::Display for FormComparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} (as-printed): {}", self.printed, self.printed_verdict)?;
        write!(f, "{} (as-derived): {}", self.derived, self.derived_verdict)
    }
}

/// Runs every `Printed` entry and its `Derived` counterpart on the same
/// grid. Failures are recorded, never propagated.
pub fn compare_forms(e_max: u32, n_max: u64) -> Result<Vec<FormComparison>, IdentityError> {
    let entries = catalog();
    let mut out = Vec::new();
    for printed in entries.iter().filter(|e| e.form == Printed) {
        let derived_name = printed.counterpart.expect("printed entries name a counterpart");
        let derived = entries
            .iter()
            .find(|e| e.name == derived_name)
            .expect("counterpart exists");
        out.push(FormComparison {
            printed: printed.name,
            derived: derived.name,
            printed_verdict: verify(&printed.identity, e_max, n_max)?,
            derived_verdict: verify(&derived.identity, e_max, n_max)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identity::parse_equation;

    #[test]
    fn catalog_shape() {
        let entries = catalog();
        assert!(entries.len() >= 15);
        for entry in &entries {
            assert!(entry.identity.unbound().is_none(), "{}", entry.name);
            if let Some(other) = entry.counterpart {
                assert!(entries.iter().any(|e| e.name == other), "{}", entry.name);
            }
        }
        let coons = lookup("coons").unwrap();
        assert_eq!(coons.identity.n_min, 0);
        assert_eq!(lookup("prop2").unwrap().identity.n_min, 1);
        assert_eq!(
            lookup("nope"),
            Err(IdentityError::UnknownIdentity("nope".into()))
        );
    }

    #[test]
    fn printed_forms_reparse() {
        for entry in catalog() {
            let printed = entry.identity.equation.to_string();
            assert_eq!(
                parse_equation(&printed).unwrap(),
                entry.identity.equation,
                "{}",
                entry.name
            );
        }
    }
}
