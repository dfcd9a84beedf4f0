//! One line per acceptance criterion. Exits nonzero when a criterion fails,
//! except those in `FALSE_AS_STATED`, which are still printed as FAIL.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use pntap_cli::suites::{self, kind_of};
use pntap_cli::{run_suite, CheckKind, RunConfig, RunOutcome};

/// Inequalities that fail with implied constant 1 on the tested grid.
const FALSE_AS_STATED: &[u32] = &[5];

const SIEVE_LIMIT: u64 = 1_000_000;
const SIEVE_SECONDS: u64 = 10;
const CHARACTER_QMAX: &str = "q <= 500";
const TRIANGLE_PAIRS: u64 = 1000;
const TRIANGLE_SLACK: f64 = -1e-12;
const L1_CEILING: f64 = 3.0;
const NIT_SAMPLE_TMAX: f64 = 1e6;
const SIEGEL_QMAX: u64 = 3000;
const SQRT_Q_FLOOR: f64 = 0.4;
const QUOTIENT_RULE_TOL: f64 = 1e-8;
const EULER_GAMMA_TOL: f64 = 1e-6;
const RECONCILIATION_TOL: f64 = 1e-9;
const NORMALIZED_ERROR: f64 = 0.02;
const PSI_DEVIATION: f64 = 0.05;
const LARGE_LIMIT: u64 = 10_000_000;
const DESK_MINUTES: u64 = 5;
const LARGE_MINUTES: u64 = 30;

struct Line {
    n: u32,
    passed: bool,
    detail: String,
}

fn checks(outcome: &RunOutcome) -> BTreeMap<(String, String), (bool, String)> {
    outcome
        .reports
        .iter()
        .flat_map(|r| &r.checks)
        .map(|c| ((c.suite.to_string(), c.name.to_string()), (c.passed, c.detail.clone())))
        .collect()
}

/// All the named checks passed; the detail joins theirs.
fn from_checks(
    n: u32,
    all: &BTreeMap<(String, String), (bool, String)>,
    suite: &str,
    names: &[&str],
    pinned: bool,
) -> Line {
    let mut passed = pinned;
    let mut parts = Vec::new();
    if !pinned {
        parts.push("pinned tolerance differs from the suite".to_string());
    }
    for name in names {
        match all.get(&(suite.to_string(), name.to_string())) {
            Some((ok, d)) => {
                passed &= ok;
                parts.push(format!("{name}: {d}"));
            }
            None => {
                passed = false;
                parts.push(format!("{name}: missing"));
            }
        }
    }
    Line {
        n,
        passed,
        detail: parts.join(" | "),
    }
}

fn read_dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .expect("report dir")
        .map(|e| {
            let e = e.expect("entry");
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).expect("report file"),
            )
        })
        .collect()
}

fn timed(name: &str, cfg: &RunConfig) -> (RunOutcome, Duration) {
    let start = Instant::now();
    let out = run_suite(name, cfg).unwrap_or_else(|e| panic!("{name}: {e}"));
    (out, start.elapsed())
}

fn main() -> ExitCode {
    let mut lines = Vec::new();

    // 1: single-threaded sieve and oracle comparison
    let cfg = RunConfig {
        limit: SIEVE_LIMIT,
        jobs: Some(1),
        ..RunConfig::default()
    };
    let (arith, took) = timed("arith", &cfg);
    let mut l = from_checks(1, &checks(&arith), "arith", &["sieve-vs-trial-division"], true);
    l.passed &= took <= Duration::from_secs(SIEVE_SECONDS);
    l.detail = format!("{} | single-threaded build and comparison in {:.2?}", l.detail, took);
    lines.push(l);

    // 10 first half: byte reproducibility at the desk limit
    let dirs = [
        tempfile::tempdir().expect("tempdir"),
        tempfile::tempdir().expect("tempdir"),
    ];
    let mut desk_times = Vec::new();
    let mut desk_exit = Vec::new();
    for d in &dirs {
        let cfg = RunConfig {
            limit: SIEVE_LIMIT,
            out: Some(d.path().to_path_buf()),
            ..RunConfig::default()
        };
        let (out, took) = timed("all", &cfg);
        desk_times.push(took);
        desk_exit.push(out.exit_code());
    }
    let a = read_dir_bytes(dirs[0].path());
    let b = read_dir_bytes(dirs[1].path());
    let identical = a == b && !a.is_empty();

    // 2 to 9 from one run at the large limit
    let cfg = RunConfig {
        limit: LARGE_LIMIT,
        ..RunConfig::default()
    };
    let (large, large_took) = timed("all", &cfg);
    let all = checks(&large);

    lines.push(from_checks(
        2,
        &all,
        "characters",
        &[
            "count-equals-phi",
            "orthogonality-exact",
            "real-count-bound",
            "conductor-identity",
        ],
        all.get(&("characters".into(), "count-equals-phi".into()))
            .is_some_and(|c| c.1.contains(CHARACTER_QMAX)),
    ));
    lines.push(from_checks(
        3,
        &all,
        "distance",
        &["triangle-random", "triangle-structured"],
        suites::TRIANGLE_SLACK_FLOOR == TRIANGLE_SLACK && RunConfig::default().pairs == TRIANGLE_PAIRS,
    ));
    lines.push(from_checks(
        4,
        &all,
        "series",
        &["l1-ceiling", "l1-refinement"],
        suites::L1_CEILING == L1_CEILING,
    ));
    lines.push(from_checks(
        5,
        &all,
        "expsums",
        &["nit-ceiling"],
        RunConfig::default().tmax == NIT_SAMPLE_TMAX && pntap_core::expsums::NIT_CONSTANT == 66852.0,
    ));
    lines.push(from_checks(6, &all, "sieve", &["sandwich"], true));
    lines.push(from_checks(
        7,
        &all,
        "series",
        &["faa-partition-count", "faa-quotient-rule", "faa-derlemma-ceiling"],
        suites::QUOTIENT_RULE_TOL == QUOTIENT_RULE_TOL,
    ));
    lines.push(from_checks(
        8,
        &all,
        "siegel",
        &[
            "scan-positive",
            "scan-min-sqrt-q",
            "zerol1-hypothesis",
            "gamma-zero",
            "identity-residuals",
        ],
        suites::SQRT_Q_L1_FLOOR == SQRT_Q_FLOOR
            && suites::EULER_GAMMA_TOL == EULER_GAMMA_TOL
            && RunConfig::default().qmax == SIEGEL_QMAX
            && pntap_core::siegel::IDENTITY_CONSTANT == 10.0,
    ));
    let mut l9 = from_checks(
        9,
        &all,
        "pnt-ap",
        &["reconciliation", "normalized-error", "chebyshev-deviation"],
        suites::RECONCILIATION_TOL == RECONCILIATION_TOL
            && suites::NORMALIZED_ERROR_CEILING == NORMALIZED_ERROR
            && suites::PSI_DEVIATION_CEILING == PSI_DEVIATION,
    );
    let at_large = all
        .get(&("pnt-ap".into(), "normalized-error".into()))
        .is_some_and(|c| c.1.starts_with("x = 1e7"));
    l9.passed &= at_large;
    lines.push(l9);

    let fast = desk_times.iter().all(|&t| t <= Duration::from_secs(DESK_MINUTES * 60))
        && large_took <= Duration::from_secs(LARGE_MINUTES * 60);
    let hard: Vec<String> = large
        .reports
        .iter()
        .flat_map(|r| &r.checks)
        .filter(|c| !c.passed && kind_of(c.suite, c.name) == Some(CheckKind::Hard))
        .map(|c| format!("{}/{}", c.suite, c.name))
        .collect();
    lines.push(Line {
        n: 10,
        passed: identical && fast,
        detail: format!(
            "{} report files byte-identical across two runs: {identical}; all at 1e6 in {:.1?} and {:.1?} \
             (exit codes {:?}); all at 1e7 in {:.1?}; hard failures: {}",
            a.len(),
            desk_times[0],
            desk_times[1],
            desk_exit,
            large_took,
            if hard.is_empty() {
                "none".to_string()
            } else {
                hard.join(", ")
            }
        ),
    });

    lines.sort_by_key(|l| l.n);
    let mut unexpected = 0;
    for l in &lines {
        println!(
            "criterion {}: {}: {}",
            l.n,
            if l.passed { "PASS" } else { "FAIL" },
            l.detail
        );
        if !l.passed && !FALSE_AS_STATED.contains(&l.n) {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
