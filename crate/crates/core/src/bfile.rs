//! OEIS b-files: `index value` per line, `#` comments.

use std::fmt::Write as _;

use num_bigint::BigInt;
use thiserror::Error;

use crate::recurrence::{eval_range, SpecError, SternLikeSpec};

#[derive(Debug, Error)]
pub enum BFileError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: index {index} does not increase (previous {previous})")]
    NonIncreasing {
        line: usize,
        index: i64,
        previous: i64,
    },
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("bad A-number `{0}`")]
    ANumber(String),
    #[error("fetching {url}: {msg}")]
    Fetch { url: String, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BFileTable {
    pub records: Vec<(i64, BigInt)>,
    pub source: String,
}

impl BFileTable {
    pub fn get(&self, index: i64) -> Option<&BigInt> {
        self.records
            .binary_search_by_key(&index, |r| r.0)
            .ok()
            .map(|i| &self.records[i].1)
    }
}

pub fn parse_bfile(text: &str, source: impl Into<String>) -> Result<BFileTable, BFileError> {
    let mut records: Vec<(i64, BigInt)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let (Some(idx), Some(val), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(BFileError::Malformed {
                line,
                msg: format!("expected `<index> <value>`, got `{trimmed}`"),
            });
        };
        let index: i64 = idx.parse().map_err(|_| BFileError::Malformed {
            line,
            msg: format!("bad index `{idx}`"),
        })?;
        let value: BigInt = val.parse().map_err(|_| BFileError::Malformed {
            line,
            msg: format!("bad value `{val}`"),
        })?;
        if let Some(&(previous, _)) = records.last() {
            if index <= previous {
                return Err(BFileError::NonIncreasing {
                    line,
                    index,
                    previous,
                });
            }
        }
        records.push((index, value));
    }
    Ok(BFileTable {
        records,
        source: source.into(),
    })
}

/// `v(lo) ..= v(hi)`, skipping indices below the spec's `output_min_index`.
pub fn write_bfile(spec: &SternLikeSpec, lo: u64, hi: u64) -> Result<String, BFileError> {
    let lo = lo.max(spec.output_min_index());
    let mut out = String::new();
    if lo > hi {
        return Ok(out);
    }
    for (n, v) in (lo..=hi).zip(eval_range(spec, lo, hi)?) {
        writeln!(out, "{n} {v}").unwrap();
    }
    Ok(out)
}

/// Writes a table as records, one per line.
pub fn render_records(records: &[(i64, BigInt)]) -> String {
    let mut out = String::new();
    for (n, v) in records {
        writeln!(out, "{n} {v}").unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossMismatch {
    pub index: i64,
    pub expected: BigInt,
    pub computed: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossReport {
    pub source: String,
    pub shift: i64,
    pub compared: usize,
    pub mismatches: Vec<CrossMismatch>,
}

impl CrossReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.compared > 0
    }
}

/// Compares b-file entry `m` against `v(m - shift)` wherever that index is
/// defined and at least `output_min_index`.
pub fn crosscheck(spec: &SternLikeSpec, table: &BFileTable, shift: i64) -> CrossReport {
    let min = spec.output_min_index() as i64;
    let wanted: Vec<(i64, &BigInt, u64)> = table
        .records
        .iter()
        .filter_map(|(m, value)| {
            let n = m.checked_sub(shift)?;
            (n >= min).then_some((*m, value, n as u64))
        })
        .collect();
    let mut report = CrossReport {
        source: table.source.clone(),
        shift,
        compared: wanted.len(),
        mismatches: Vec::new(),
    };
    let Some(hi) = wanted.iter().map(|w| w.2).max() else {
        return report;
    };
    let lo = wanted.iter().map(|w| w.2).min().unwrap();
    let values = eval_range(spec, lo, hi).expect("lo <= hi");
    for (m, expected, n) in wanted {
        let computed = &values[(n - lo) as usize];
        if computed != expected {
            report.mismatches.push(CrossMismatch {
                index: m,
                expected: expected.clone(),
                computed: computed.clone(),
            });
        }
    }
    report
}

/// Normalizes `A002487`, `a2487` or `2487` to six digits.
pub fn a_number(id: &str) -> Result<String, BFileError> {
    let digits = id.strip_prefix(['A', 'a']).unwrap_or(id);
    if digits.is_empty() || digits.len() > 6 || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(BFileError::ANumber(id.to_string()));
    }
    Ok(format!("{:0>6}", digits))
}

pub fn bfile_url(id: &str) -> Result<String, BFileError> {
    let num = a_number(id)?;
    Ok(format!("https://oeis.org/A{num}/b{num}.txt"))
}

/// Downloads and parses the OEIS b-file for `id`.
pub fn fetch_bfile(id: &str) -> Result<BFileTable, BFileError> {
    let url = bfile_url(id)?;
    let fetch_err = |e: ureq::Error| BFileError::Fetch {
        url: url.clone(),
        msg: e.to_string(),
    };
    let text = ureq::get(&url)
        .call()
        .map_err(fetch_err)?
        .body_mut()
        .read_to_string()
        .map_err(fetch_err)?;
    parse_bfile(&text, url.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::Preset;

    #[test]
    fn parse_examples() {
        assert_eq!(parse_bfile("0 0\n1 1\n2 1", "t").unwrap().records.len(), 3);
        let one = parse_bfile("# comment\n5 3", "t").unwrap();
        assert_eq!(one.records, vec![(5, BigInt::from(3))]);
        assert!(matches!(
            parse_bfile("2 1\n1 1", "t"),
            Err(BFileError::NonIncreasing { line: 2, .. })
        ));
        assert!(matches!(
            parse_bfile("0 0\n\n1 x", "t"),
            Err(BFileError::Malformed { line: 3, .. })
        ));
        assert!(parse_bfile("1 2 3", "t").is_err());
        assert_eq!(parse_bfile("-1 -5\n 0 7 ", "t").unwrap().get(-1), Some(&BigInt::from(-5)));
    }

    #[test]
    fn write_stern_terms() {
        let text = write_bfile(&Preset::Stern.spec(), 0, 16).unwrap();
        let values: Vec<String> = text
            .lines()
            .map(|l| l.split(' ').nth(1).unwrap().to_string())
            .collect();
        assert_eq!(values.join(","), "0,1,1,2,1,3,2,3,1,4,3,5,2,5,3,4,1");
        let table = parse_bfile(&text, "t").unwrap();
        assert_eq!(render_records(&table.records), text);
    }

    #[test]
    fn write_honors_output_min_index() {
        let text = write_bfile(&Preset::Josephus.spec(), 0, 4).unwrap();
        assert_eq!(text, "1 1\n2 1\n3 2\n4 2\n");
    }

    #[test]
    fn crosscheck_shift() {
        // A005942 starts 1, 2, 4, 6, 10; y(n) = A005942(n + 1)
        let table = parse_bfile("0 1\n1 2\n2 4\n3 6\n4 10\n", "t").unwrap();
        let report = crosscheck(&Preset::TmComplexityShift.spec(), &table, 1);
        assert_eq!(report.compared, 4);
        assert!(report.passed());
        let unshifted = crosscheck(&Preset::TmComplexityShift.spec(), &table, 0);
        assert_eq!(unshifted.mismatches.len(), 5);
    }

    #[test]
    fn urls() {
        assert_eq!(bfile_url("A2487").unwrap(), "https://oeis.org/A002487/b002487.txt");
        assert_eq!(a_number("005942").unwrap(), "005942");
        assert!(a_number("A12x").is_err());
        assert!(a_number("A").is_err());
    }
}
