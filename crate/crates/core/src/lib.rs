//! Stern-like sequences `v(2n) = a·v(n)`, `v(2n+1) = b·v(n) + c·v(n+1)`:
//! exact evaluation, linear representations, identity checking, truncated
//! generating series, a Thue–Morse oracle and OEIS b-file plumbing.

pub mod bfile;
pub mod cli;
pub mod identity;
pub mod linrep;
pub mod oracle_tm;
pub mod recurrence;
pub mod series;

pub use recurrence::{eval_direct, preset, Preset, SpecError, SternLikeSpec};
