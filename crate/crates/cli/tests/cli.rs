use std::process::{Command, Output};

fn pntap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pntap"))
        .args(args)
        .output()
        .expect("run pntap")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn passing_suite_exits_zero() {
    let o = pntap(&["verify", "sieve", "--limit", "1e5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("suite,check,kind,status,detail\nsieve,sandwich,hard,pass,"));
}

#[test]
fn hard_failure_exits_one() {
    let o = pntap(&["expsum", "nit-scan", "--tmin", "100", "--tmax", "100", "--samples", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("n,u,t,abs,ceiling,margin,phase_warning\n"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(pntap(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(pntap(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        pntap(&["pnt-ap", "--q", "3", "--a", "3", "--x", "100", "--limit", "1000"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(pntap(&["verify", "arith", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(pntap(&["characters", "list", "--modulus", "0"]).status.code(), Some(2));
}

#[test]
fn resource_errors_exit_three() {
    assert_eq!(pntap(&["verify", "arith", "--limit", "1e13"]).status.code(), Some(3));
    let o = pntap(&[
        "eta",
        "--q",
        "5",
        "--table-cache",
        "/nonexistent-dir/t.bin",
        "--limit",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(0), "eta needs no tables");
    let o = pntap(&[
        "pnt-ap",
        "--q",
        "3",
        "--a",
        "1",
        "--x",
        "100",
        "--limit",
        "100",
        "--table-cache",
        "/nonexistent-dir/t.bin",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "limit = 1e4\nformat = json\n").unwrap();
    let c = cfg.to_str().unwrap();
    let o = pntap(&["--config", c, "pnt-ap", "--q", "4", "--a", "1", "--x", "1e4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_start().starts_with('['));
    let o = pntap(&[
        "--config", c, "--format", "csv", "pnt-ap", "--q", "4", "--a", "1", "--x", "1e4",
    ]);
    assert!(stdout(&o).starts_with("x,q,a,psi,main,error,normalized\n"));
    let o = pntap(&["--config", c, "pnt-ap", "--q", "4", "--a", "1", "--x", "2e4"]);
    assert_eq!(o.status.code(), Some(3), "x beyond the configured limit");
}

#[test]
fn reports_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = pntap(&["verify", "sieve", "--limit", "1e5", "--out", d.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    for f in ["summary.csv", "sieve-sandwich.csv"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn character_listing() {
    let o = pntap(&["characters", "list", "--modulus", "12", "--real-only", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
    assert!(v.as_array().unwrap().iter().all(|r| r["real"] == true));
}

#[test]
fn triangle_fuzz_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fuzz.csv");
    let o = pntap(&[
        "triangle-fuzz",
        "--count",
        "20",
        "--seed",
        "9",
        "--x",
        "1e4",
        "--limit",
        "1e4",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().count(), 21);
    assert!(text.starts_with("seed_f,seed_g,lhs,rhs,slack\n"));
}

#[test]
fn zerol1_and_siegel_scan() {
    let o = pntap(&["siegel", "zerol1-check", "--q1", "3", "--q2", "8", "--nmax", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 3);
    let o = pntap(&["siegel", "scan", "--qmax", "50"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("conductor,index,value,error,sqrt_q_value\n"));
}

#[test]
fn series_and_monitor() {
    let o = pntap(&[
        "series", "eval", "--f", "one", "--y", "1.5", "--sigma", "3", "--limit", "1e5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let row = stdout(&o);
    let re: f64 = row.lines().nth(1).unwrap().split(',').nth(5).unwrap().parse().unwrap();
    assert!((re - 1.202_056_903_159_594_3).abs() < 1e-9);
    let o = pntap(&["monitor", "lchil2", "--q", "5", "--limit", "1e5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("index,sigma,t,y,k,lhs,rhs,ratio\n"));
}

#[test]
fn profile_csv_columns() {
    let o = pntap(&[
        "pnt-ap", "profile", "--q-set", "3,4", "--x-grid", "1e4,1e5", "--limit", "1e5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("q,a,x,psi,main,error,normalized,fitted_cA\n"));
}
