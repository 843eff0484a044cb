//! The `stern` command line.
//!
//! Exit status: 0 when everything holds, 1 when a counterexample or
//! mismatch was found, 2 for usage, parse and spec errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bfile::{crosscheck, fetch_bfile, parse_bfile, write_bfile, BFileTable};
use crate::identity::{compare_forms, lookup, verify, Identity};
use crate::linrep::{coeff_table, eval_fast, linear_representation};
use crate::oracle_tm::verify_y_preset;
use crate::recurrence::{eval_direct, parse_spec_file, Preset, SternLikeSpec};
use crate::series::{check_named, CheckName};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "stern", version, about = "Exact tools for Stern-like sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print v(n)
    Eval {
        seq: String,
        n: u64,
        #[arg(long, conflicts_with = "fast")]
        direct: bool,
        #[arg(long)]
        fast: bool,
    },
    /// Print v(from) ..= v(to)
    Table {
        seq: String,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long, value_enum, default_value_t = TableFormat::Bfile)]
        format: TableFormat,
    },
    /// Print the coefficient table A(e,r), B(e,r)
    Coeffs {
        seq: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(0..=20))]
        e_max: u32,
    },
    /// Export the linear representation
    Compile { seq: String },
    /// Check an identity over e <= E, 0 <= r <= 2^e, n_min <= n <= N
    Verify(VerifyArgs),
    /// Run a generating-series check
    Series {
        check: String,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 5)]
        e_max: u32,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Compare Thue-Morse factor counts with the tm_complexity_shift preset
    OracleTm {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=4096))]
        ell_max: u64,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// OEIS b-file cross-checks
    Oeis {
        #[command(subcommand)]
        action: OeisCommand,
    },
    /// List the named identities
    Catalog,
    /// Check every published form against its re-derived counterpart
    Discrepancies {
        #[arg(long, default_value_t = 10)]
        e_max: u32,
        #[arg(long, default_value_t = 128)]
        n_max: u64,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableFormat {
    Bfile,
    Csv,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Catalog name
    #[arg(conflicts_with = "expr", required_unless_present = "expr")]
    name: Option<String>,
    /// Identity text, e.g. "s(2*n) == s(n)"
    #[arg(long)]
    expr: Option<String>,
    #[arg(long)]
    e_max: u32,
    #[arg(long)]
    n_max: u64,
    #[arg(long)]
    n_min: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Bind a sequence name: NAME=SEQ
    #[arg(long, value_name = "NAME=SEQ")]
    bind: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum OeisCommand {
    /// Compare b-file entry m with v(m - shift)
    Check {
        seq: String,
        #[arg(long, conflicts_with = "fetch", required_unless_present = "fetch")]
        bfile: Option<String>,
        /// Download the b-file (A-number defaults from the preset)
        #[arg(long, num_args = 0..=1, default_missing_value = "")]
        fetch: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        shift: Option<i64>,
    },
}

enum Failure {
    Usage(String),
}

impl<T: ToString> From<T> for Failure {
    fn from(err: T) -> Self {
        Failure::Usage(err.to_string())
    }
}

type Outcome = Result<bool, Failure>;

/// A preset name, a short alias (`s`, `t`, `y`) or a spec-file path.
pub fn resolve_seq(arg: &str) -> Result<SternLikeSpec, String> {
    let alias = match arg {
        "s" => "stern",
        "t" => "twisted",
        "y" => "tm_complexity_shift",
        other => other,
    };
    if let Ok(p) = alias.parse::<Preset>() {
        return Ok(p.spec());
    }
    if Path::new(arg).is_file() {
        let text = std::fs::read_to_string(arg).map_err(|e| format!("{arg}: {e}"))?;
        return parse_spec_file(&text).map_err(|e| format!("{arg}: {e}"));
    }
    Err(format!("`{arg}` is neither a preset nor a spec file"))
}

/// Default OEIS cross-reference `(A-number, shift)` for presets that have one.
pub fn oeis_default(spec: &SternLikeSpec) -> Option<(&'static str, i64)> {
    match spec.name()? {
        "stern" => Some(("A002487", 0)),
        "tm_complexity_shift" => Some(("A005942", 1)),
        "josephus" => Some(("A006165", 0)),
        _ => None,
    }
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Failure::Usage("--jobs must be at least 1".into())),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(j).build()?;
            Ok(pool.install(f))
        }
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAIL,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Eval { seq, n, fast, .. } => {
            let spec = resolve_seq(&seq)?;
            if n < spec.output_min_index() {
                return Err(Failure::Usage(format!(
                    "index {n} is below the first index {}",
                    spec.output_min_index()
                )));
            }
            let v = if fast { eval_fast(&spec, n) } else { eval_direct(&spec, n) };
            writeln!(out, "{v}")?;
            Ok(true)
        }
        Command::Table {
            seq,
            from,
            to,
            format,
        } => {
            let spec = resolve_seq(&seq)?;
            if from > to {
                return Err(Failure::Usage(format!("--from {from} exceeds --to {to}")));
            }
            let text = write_bfile(&spec, from, to)?;
            match format {
                TableFormat::Bfile => write!(out, "{text}")?,
                TableFormat::Csv => {
                    writeln!(out, "n,value")?;
                    for line in text.lines() {
                        writeln!(out, "{}", line.replacen(' ', ",", 1))?;
                    }
                }
            }
            Ok(true)
        }
        Command::Coeffs { seq, e_max } => {
            let spec = resolve_seq(&seq)?;
            let table = coeff_table(&spec, e_max);
            writeln!(out, "e r A B")?;
            for e in 0..=e_max {
                for (r, (a, b)) in table.row_a(e).iter().zip(table.row_b(e)).enumerate() {
                    writeln!(out, "{e} {r} {a} {b}")?;
                }
            }
            Ok(true)
        }
        Command::Compile { seq } => {
            let spec = resolve_seq(&seq)?;
            write!(out, "{}", linear_representation(&spec))?;
            Ok(true)
        }
        Command::Verify(args) => run_verify(args, out),
        Command::Series {
            check,
            order,
            e_max,
            jobs,
        } => {
            let name: CheckName = check.parse()?;
            let report = with_jobs(jobs, || check_named(name, order, e_max))??;
            for line in report.machine_lines() {
                writeln!(out, "{line}")?;
            }
            write!(out, "{report}")?;
            Ok(report.holds)
        }
        Command::OracleTm { ell_max, jobs } => {
            let report = with_jobs(jobs, || verify_y_preset(ell_max as usize))?;
            write!(out, "{report}")?;
            Ok(report.passed())
        }
        Command::Oeis {
            action:
                OeisCommand::Check {
                    seq,
                    bfile,
                    fetch,
                    shift,
                },
        } => {
            let spec = resolve_seq(&seq)?;
            let default = oeis_default(&spec);
            let table: BFileTable = match (bfile, fetch) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?;
                    parse_bfile(&text, path)?
                }
                (None, Some(id)) => {
                    let id = if id.is_empty() {
                        default
                            .map(|d| d.0.to_string())
                            .ok_or("--fetch needs an A-number for this sequence")?
                    } else {
                        id
                    };
                    fetch_bfile(&id)?
                }
                (None, None) => unreachable!("clap requires one source"),
            };
            let shift = shift.or(default.map(|d| d.1)).unwrap_or(0);
            let report = crosscheck(&spec, &table, shift);
            writeln!(
                out,
                "{}: compared {} entries with shift {}, {} mismatches",
                report.source,
                report.compared,
                report.shift,
                report.mismatches.len()
            )?;
            for m in &report.mismatches {
                writeln!(
                    out,
                    "  index {}: b-file {}, computed {}",
                    m.index, m.expected, m.computed
                )?;
            }
            Ok(report.passed())
        }
        Command::Catalog => {
            for entry in crate::identity::catalog() {
                writeln!(
                    out,
                    "{:<22} {:<11} n >= {:<3} {}",
                    entry.name,
                    entry.form.as_str(),
                    entry.identity.n_min,
                    entry.identity.equation
                )?;
            }
            Ok(true)
        }
        Command::Discrepancies {
            e_max,
            n_max,
            jobs,
        } => {
            let rows = with_jobs(jobs, || compare_forms(e_max, n_max))??;
            let mut derived_ok = true;
            for row in &rows {
                writeln!(out, "{row}")?;
                derived_ok &= row.derived_verdict.holds;
            }
            let printed_bad: Vec<&str> = rows
                .iter()
                .filter(|r| !r.printed_verdict.holds)
                .map(|r| r.printed)
                .collect();
            writeln!(
                out,
                "as-printed forms failing: {}",
                if printed_bad.is_empty() {
                    "none".to_string()
                } else {
                    printed_bad.join(", ")
                }
            )?;
            Ok(derived_ok)
        }
    }
}

fn run_verify(args: VerifyArgs, out: &mut dyn Write) -> Outcome {
    let mut identity = match (&args.name, &args.expr) {
        (Some(name), _) => lookup(name)?.identity,
        (None, Some(text)) => {
            let mut identity = Identity::parse(text)?;
            // single-letter names default to the matching preset
            for name in identity.sequences() {
                if let Ok(spec) = resolve_seq(&name) {
                    identity = identity.bind(name, spec);
                }
            }
            identity
        }
        (None, None) => unreachable!("clap requires a name or --expr"),
    };
    for binding in &args.bind {
        let (name, seq) = binding
            .split_once('=')
            .ok_or_else(|| format!("--bind expects NAME=SEQ, got `{binding}`"))?;
        let spec = resolve_seq(seq)?;
        // the generic entries start at the bound sequence's n0
        if name == "v" && args.name.as_deref().is_some_and(|n| n.starts_with("generic_")) {
            identity.n_min = spec.n0();
        }
        identity = identity.bind(name.trim(), spec);
    }
    if let Some(n_min) = args.n_min {
        identity = identity.with_n_min(n_min);
    }
    let verdict = with_jobs(args.jobs, || verify(&identity, args.e_max, args.n_max))??;
    writeln!(out, "{}", identity.equation)?;
    writeln!(out, "{verdict}")?;
    Ok(verdict.holds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("stern").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn eval_examples() {
        assert_eq!(run_str(&["eval", "stern", "11"]).1, "5\n");
        assert_eq!(run_str(&["eval", "s", "11", "--fast"]).1, "5\n");
        assert_eq!(run_str(&["eval", "nope", "1"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["eval", "josephus", "0"]).0, EXIT_USAGE);
    }

    #[test]
    fn table_formats() {
        let (code, out, _) = run_str(&["table", "twisted", "--from", "0", "--to", "3", "--format", "csv"]);
        assert_eq!(code, 0);
        assert_eq!(out, "n,value\n0,0\n1,1\n2,-1\n3,0\n");
        assert_eq!(run_str(&["table", "stern", "--from", "3", "--to", "1"]).0, EXIT_USAGE);
    }

    #[test]
    fn verify_exit_codes() {
        let (code, out, _) = run_str(&["verify", "--expr", "s(r)==s(r+1)", "--e-max", "1", "--n-max", "1"]);
        assert_eq!(code, EXIT_FAIL);
        assert!(out.contains("e=0 r=0 n=0"), "{out}");
        let (code, _, err) = run_str(&["verify", "--expr", "s(r) ==", "--e-max", "1", "--n-max", "1"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("position"));
        assert_eq!(
            run_str(&["verify", "generic_thm", "--bind", "v=z2", "--e-max", "4", "--n-max", "8"]).0,
            EXIT_OK
        );
    }

    #[test]
    fn help_is_success() {
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
        assert_eq!(run_str(&[]).0, EXIT_USAGE);
    }
}
