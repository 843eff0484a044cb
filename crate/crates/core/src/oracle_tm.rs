//! Brute-force Thue–Morse factor counting, independent of any recurrence.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use thiserror::Error;

use crate::recurrence::{eval_direct, Preset};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("block length {ell} outside 1..={len}")]
pub struct RangeError {
    pub ell: usize,
    pub len: usize,
}

/// A finite word over `{0, 1}`, one byte per letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryWord(Vec<u8>);

impl BinaryWord {
    pub fn new(bits: Vec<u8>) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "letters must be 0 or 1");
        BinaryWord(bits)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// First `len` letters of the fixed point of `0 → 01, 1 → 10`.
pub fn thue_morse_prefix(len: usize) -> BinaryWord {
    assert!(len >= 1, "prefix length must be positive");
    let mut w = vec![0u8];
    while w.len() < len {
        w = w.iter().flat_map(|&b| [b, 1 - b]).collect();
    }
    w.truncate(len);
    BinaryWord(w)
}

/// Number of distinct length-`ell` windows of `w`.
pub fn factor_complexity(w: &BinaryWord, ell: usize) -> Result<usize, RangeError> {
    let bits = w.bits();
    if ell == 0 || ell > bits.len() {
        return Err(RangeError {
            ell,
            len: bits.len(),
        });
    }
    // short windows pack exactly into an integer key
    if ell <= 128 {
        let mask = if ell == 128 { u128::MAX } else { (1u128 << ell) - 1 };
        let mut key = 0u128;
        let mut seen = HashSet::new();
        for (i, &b) in bits.iter().enumerate() {
            key = ((key << 1) | b as u128) & mask;
            if i + 1 >= ell {
                seen.insert(key);
            }
        }
        return Ok(seen.len());
    }
    Ok(bits.windows(ell).collect::<HashSet<&[u8]>>().len())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub ell: usize,
    pub counted: usize,
    pub expected: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub ell_max: usize,
    pub prefix_len: usize,
    pub counts: Vec<usize>,
    pub mismatches: Vec<Mismatch>,
    /// Lengths whose count changed when the prefix was doubled.
    pub unsaturated: Vec<usize>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.unsaturated.is_empty()
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Thue-Morse factor complexity, prefix {} letters, lengths 1..={}",
            self.prefix_len, self.ell_max
        )?;
        for m in &self.mismatches {
            writeln!(
                f,
                "  mismatch at length {}: counted {}, y({}) = {}",
                m.ell,
                m.counted,
                m.ell - 1,
                m.expected
            )?;
        }
        if !self.unsaturated.is_empty() {
            writeln!(f, "  prefix too short for lengths {:?}", self.unsaturated)?;
        }
        if self.passed() {
            writeln!(f, "  all {} lengths agree with the recurrence", self.ell_max)?;
        }
        Ok(())
    }
}

/// Compares block counts of a Thue–Morse prefix against `tm_complexity_shift`.
pub fn verify_y_preset(ell_max: usize) -> OracleReport {
    assert!(ell_max >= 1, "ell_max must be positive");
    let prefix_len = 1024 * ell_max;
    let doubled = thue_morse_prefix(2 * prefix_len);
    let prefix = BinaryWord(doubled.bits()[..prefix_len].to_vec());
    let spec = Preset::TmComplexityShift.spec();
    let rows: Vec<(usize, usize, usize)> = (1..=ell_max)
        .into_par_iter()
        .map(|ell| {
            let short = factor_complexity(&prefix, ell).unwrap();
            let long = factor_complexity(&doubled, ell).unwrap();
            (ell, short, long)
        })
        .collect();
    let mut report = OracleReport {
        ell_max,
        prefix_len,
        counts: Vec::with_capacity(ell_max),
        mismatches: Vec::new(),
        unsaturated: Vec::new(),
    };
    for (ell, short, long) in rows {
        report.counts.push(short);
        if short != long {
            report.unsaturated.push(ell);
        }
        let expected = eval_direct(&spec, ell as u64 - 1);
        if BigInt::from(short) != expected {
            report.mismatches.push(Mismatch {
                ell,
                counted: short,
                expected,
            });
        }
    }
    report
}
