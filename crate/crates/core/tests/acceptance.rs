//! Acceptance criteria, one PASS/FAIL line each.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stern_core::bfile::{crosscheck, parse_bfile, render_records};
use stern_core::cli;
use stern_core::identity::{compare_forms, generic_cor, lookup, verify, verify_with_jobs, Verdict};
use stern_core::linrep::{coeff_table, eval_fast};
use stern_core::oracle_tm::verify_y_preset;
use stern_core::recurrence::{eval_direct, DenseTable, Preset, SternLikeSpec};
use stern_core::series::{check_named, CheckName};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(std::iter::once("stern").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

fn within(start: Instant, limit: Duration) -> Check {
    let took = start.elapsed();
    if took <= limit {
        Ok(format!("{:.2}s", took.as_secs_f64()))
    } else {
        Err(format!("took {:.2}s, limit {}s", took.as_secs_f64(), limit.as_secs()))
    }
}

fn values_column(table: &str) -> Vec<i64> {
    table
        .lines()
        .map(|l| l.split(' ').nth(1).unwrap().parse().unwrap())
        .collect()
}

fn term_fidelity() -> Check {
    let start = Instant::now();
    let (code, stern) = run_cli(&["table", "stern", "--from", "0", "--to", "16"]);
    let want_s = [0, 1, 1, 2, 1, 3, 2, 3, 1, 4, 3, 5, 2, 5, 3, 4, 1];
    if code != 0 || values_column(&stern) != want_s {
        return Err(format!("stern table: exit {code}, got {stern:?}"));
    }
    let (code, twisted) = run_cli(&["table", "twisted", "--from", "0", "--to", "15"]);
    let want_t = [0, 1, -1, 0, 1, 1, 0, -1, -1, -2, -1, -1, 0, 1, 1, 2];
    if code != 0 || values_column(&twisted) != want_t {
        return Err(format!("twisted table: exit {code}, got {twisted:?}"));
    }
    within(start, Duration::from_secs(1))
}

fn expect_holds(name: &str, verdict: &Verdict) -> Result<(), String> {
    match &verdict.counterexample {
        None => Ok(()),
        Some(c) => Err(format!("{name} fails at (e, r, n) = ({}, {}, {})", c.e, c.r, c.n)),
    }
}

/// Random Stern-like specs; `n0 = 0` draws are rejected until consistent.
fn random_specs(count: usize, seed: u64) -> Vec<SternLikeSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut specs = Vec::new();
    while specs.len() < count {
        let (a, b, c) = (
            rng.gen_range(-3i64..=3),
            rng.gen_range(-3i64..=3),
            rng.gen_range(-3i64..=3),
        );
        let n0 = rng.gen_range(0u64..=3);
        let len = 2 * n0.max(1) as usize;
        let init: Vec<BigInt> = (0..len).map(|_| BigInt::from(rng.gen_range(-5i64..=5))).collect();
        if let Ok(spec) = SternLikeSpec::new(a, b, c, n0, init, Some(format!("random{}", specs.len()))) {
            specs.push(spec);
        }
    }
    specs
}

/// `(A, B)` closed forms in terms of the sequence itself.
fn closed_form_tables() -> Result<usize, String> {
    type Form = fn(&DenseTable, u64, u64) -> (BigInt, BigInt);
    let stern = DenseTable::build(&Preset::Stern.spec(), 4 << 10);
    let forms: [(Preset, Form); 5] = [
        (Preset::Stern, |s, q, r| (s.values()[(q - r) as usize].clone(), s.values()[r as usize].clone())),
        (Preset::Twisted, |t, q, r| {
            (
                -t.values()[(2 * q + r) as usize].clone(),
                -t.values()[(3 * q - r) as usize].clone(),
            )
        }),
        (Preset::Z1, |z, q, r| (z.values()[(2 * q + r) as usize].clone(), z.values()[r as usize].clone())),
        (Preset::Z2, |z, q, r| {
            (
                &z.values()[(q + r) as usize] + &z.values()[r as usize],
                z.values()[r as usize].clone(),
            )
        }),
        (Preset::Z3, |z, q, r| (-z.values()[(2 * q + r) as usize].clone(), z.values()[r as usize].clone())),
    ];
    let mut compared = 0;
    for (preset, form) in forms {
        let spec = preset.spec();
        let values = DenseTable::build(&spec, 4 << 10);
        let table = coeff_table(&spec, 10);
        for e in 0..=10u32 {
            let q = 1u64 << e;
            for r in 0..=q {
                let got = table.get(e, r).unwrap();
                let want = form(&values, q, r);
                if (got.0, got.1) != (&want.0, &want.1) {
                    return Err(format!("{preset} table differs at (e, r) = ({e}, {r})"));
                }
                compared += 1;
            }
        }
    }
    // the twisted table also equals (-1)^e (s(2^e - r), s(r))
    let table = coeff_table(&Preset::Twisted.spec(), 10);
    for e in 0..=10u32 {
        let q = 1u64 << e;
        let sign = if e % 2 == 0 { 1 } else { -1 };
        for r in 0..=q {
            let want = (
                &stern.values()[(q - r) as usize] * sign,
                &stern.values()[r as usize] * sign,
            );
            let got = table.get(e, r).unwrap();
            if (got.0, got.1) != (&want.0, &want.1) {
                return Err(format!("twisted table vs Stern form differs at ({e}, {r})"));
            }
        }
    }
    Ok(compared)
}

fn identity_suite() -> Check {
    let start = Instant::now();
    let runs: [(&str, u32, u64); 13] = [
        ("prop1", 10, 256),
        ("prop2", 10, 256),
        ("coons", 10, 256),
        ("stern_reflect", 16, 0),
        ("t_aux", 16, 0),
        ("t_similar", 10, 128),
        ("z2_aux", 12, 0),
        ("z1_thm_derived", 10, 128),
        ("z2_thm_derived", 10, 128),
        ("z3_thm_derived", 10, 128),
        ("t_corollary_derived", 10, 128),
        ("z1_cor_derived", 10, 128),
        ("z3_cor_derived", 10, 128),
    ];
    let mut total = 0;
    for (name, e_max, n_max) in runs {
        let entry = lookup(name).map_err(|e| e.to_string())?;
        let verdict = verify(&entry.identity, e_max, n_max).map_err(|e| e.to_string())?;
        expect_holds(name, &verdict)?;
        total += verdict.checked_count;
    }
    for spec in random_specs(10, 2024) {
        let verdict = verify(&generic_cor(&spec), 6, 64).map_err(|e| e.to_string())?;
        expect_holds(&format!("generic_cor for {spec:?}"), &verdict)?;
        total += verdict.checked_count;
    }
    let tables = closed_form_tables()?;
    let timing = within(start, Duration::from_secs(60))?;
    Ok(format!("{total} instances, {tables} table entries, {timing}"))
}

fn discrepancy_report() -> Check {
    let rows = compare_forms(10, 128).map_err(|e| e.to_string())?;
    let mut failing = Vec::new();
    for row in &rows {
        expect_holds(row.derived, &row.derived_verdict)?;
        if let Some(c) = &row.printed_verdict.counterexample {
            failing.push(format!("{}@({},{},{})", row.printed, c.e, c.r, c.n));
        }
    }
    let series = check_named(CheckName::BConj3Printed, 256, 5).map_err(|e| e.to_string())?;
    if let Some((e, x)) = series.first_bad() {
        failing.push(format!("bconj3_printed@e={e},X^{x}"));
    }
    let (code, text) = run_cli(&["discrepancies", "--e-max", "6", "--n-max", "32"]);
    if code != 0 || !text.contains("as-printed forms failing") {
        return Err(format!("discrepancies subcommand exit {code}"));
    }
    Ok(format!("{} pairs, all derived hold; printed failures: {}", rows.len(), failing.join(" ")))
}

fn fast_direct() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for preset in Preset::ALL {
        let spec = preset.spec();
        let dense = DenseTable::build(&spec, 1 << 16);
        for n in 0..=(1u64 << 16) {
            let fast = eval_fast(&spec, n);
            if &fast != dense.get(n).unwrap() {
                return Err(format!("{preset}: eval_fast({n}) = {fast}"));
            }
        }
        for n in [0, 1, 2, 3, 1000, 65535] {
            if eval_direct(&spec, n) != *dense.get(n).unwrap() {
                return Err(format!("{preset}: eval_direct({n}) disagrees with the table"));
            }
        }
        for _ in 0..1000 {
            let n = rng.gen_range(0..1u64 << 40);
            if eval_fast(&spec, n) != eval_direct(&spec, n) {
                return Err(format!("{preset}: eval_fast({n}) != eval_direct({n})"));
            }
        }
    }
    within(start, Duration::from_secs(30))
}

fn series_suite() -> Check {
    let start = Instant::now();
    let runs = [
        (CheckName::Carlitz, 4096, 0),
        (CheckName::SumS, 1024, 6),
        (CheckName::CoonsLemma8, 0, 10),
        (CheckName::BConj1, 256, 5),
        (CheckName::BConj2, 256, 5),
        (CheckName::BConj3, 256, 5),
    ];
    for (name, order, e_max) in runs {
        let report = check_named(name, order, e_max).map_err(|e| format!("{name}: {e}"))?;
        if let Some((e, x)) = report.first_bad() {
            return Err(format!("{name} fails at e={e}, X^{x}"));
        }
    }
    within(start, Duration::from_secs(60))
}

fn oracle() -> Check {
    let start = Instant::now();
    let report = verify_y_preset(64);
    if !report.passed() {
        return Err(report.to_string());
    }
    within(start, Duration::from_secs(30))
}

fn periodicity() -> Check {
    let table = DenseTable::build(&Preset::Z3.spec(), 100_000);
    for (n, v) in table.values().iter().enumerate() {
        let want = [0, 1, -1][n % 3];
        if *v != BigInt::from(want) {
            return Err(format!("z3({n}) = {v}"));
        }
    }
    Ok("n <= 100000".into())
}

fn io() -> Check {
    for name in ["b002487.txt", "b005942.txt"] {
        let text = std::fs::read_to_string(fixture(name)).map_err(|e| e.to_string())?;
        let table = parse_bfile(&text, name).map_err(|e| e.to_string())?;
        if render_records(&table.records) != text {
            return Err(format!("{name} does not round-trip"));
        }
    }
    let stern = parse_bfile(&std::fs::read_to_string(fixture("b002487.txt")).unwrap(), "b002487").unwrap();
    let tm = parse_bfile(&std::fs::read_to_string(fixture("b005942.txt")).unwrap(), "b005942").unwrap();
    for (spec, table, shift) in [(Preset::Stern.spec(), &stern, 0), (Preset::TmComplexityShift.spec(), &tm, 1)] {
        let report = crosscheck(&spec, table, shift);
        if !report.passed() {
            return Err(format!("crosscheck {}: {:?}", report.source, report.mismatches));
        }
    }

    let bfile = fixture("b002487.txt");
    let bfile = bfile.to_str().unwrap();
    let spec = fixture("sample.spec");
    let spec = spec.to_str().unwrap();
    let matrix: &[(&[&str], i32)] = &[
        (&["eval", "stern", "11"], 0),
        (&["eval", spec, "5"], 0),
        (&["eval", "nosuch", "5"], 2),
        (&["eval", "stern", "-1"], 2),
        (&["table", "stern", "--from", "0", "--to", "8", "--format", "csv"], 0),
        (&["table", "stern", "--from", "8", "--to", "0"], 2),
        (&["coeffs", "z2", "--e-max", "3"], 0),
        (&["coeffs", "z2"], 2),
        (&["compile", "twisted"], 0),
        (&["compile", "missing.spec"], 2),
        (&["verify", "coons", "--e-max", "10", "--n-max", "256"], 0),
        (&["verify", "--expr", "s(r)==s(r+1)", "--e-max", "1", "--n-max", "1"], 1),
        (&["verify", "--expr", "s(r) ==", "--e-max", "1", "--n-max", "1"], 2),
        (&["verify", "no_such_identity", "--e-max", "1", "--n-max", "1"], 2),
        (&["series", "carlitz", "--order", "64"], 0),
        (&["series", "bconj3_printed", "--order", "64", "--e-max", "2"], 1),
        (&["series", "bconj9", "--order", "64"], 2),
        (&["oracle-tm", "--ell-max", "8"], 0),
        (&["oracle-tm", "--ell-max", "0"], 2),
        (&["oeis", "check", "stern", "--bfile", bfile], 0),
        (&["oeis", "check", "twisted", "--bfile", bfile], 1),
        (&["oeis", "check", "stern", "--bfile", "/nonexistent/b.txt"], 2),
        (&["catalog"], 0),
        (&["catalog", "extra"], 2),
        (&["discrepancies", "--e-max", "3", "--n-max", "8"], 0),
        (&["frobnicate"], 2),
    ];
    for (args, want) in matrix {
        let (code, _) = run_cli(args);
        if code != *want {
            return Err(format!("`stern {}` exited {code}, expected {want}", args.join(" ")));
        }
    }

    let names = ["prop1", "prop2", "coons", "t_similar", "z2_thm", "z2_thm_derived", "z1_cor", "t_corollary"];
    for name in names {
        let identity = lookup(name).unwrap().identity;
        let one = verify_with_jobs(&identity, 8, 64, 1).map_err(|e| e.to_string())?;
        let eight = verify_with_jobs(&identity, 8, 64, 8).map_err(|e| e.to_string())?;
        if one != eight {
            return Err(format!("{name}: --jobs 1 and --jobs 8 disagree"));
        }
    }
    Ok(format!("{} invocations", matrix.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 term fidelity", term_fidelity),
        ("2 identity suite", identity_suite),
        ("3 discrepancy report", discrepancy_report),
        ("4 fast/direct equivalence", fast_direct),
        ("5 series suite", series_suite),
        ("6 Thue-Morse oracle", oracle),
        ("7 z3 periodicity", periodicity),
        ("8 b-file round trip, exit codes, jobs invariance", io),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
