//! The verification suites. Every check is declared in [`MANIFEST`] as hard
//! (gates the exit code) or monitor (annotates only).

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use pntap_core::arith::{chebyshev_psi, factorize, load_or_build, tau_r, totient};
use pntap_core::characters::{
    all_characters, build_group, orthogonality_sum_in, real_characters, CharValue, DirichletCharacter,
};
use pntap_core::expsums::{nit_scan, prefix_exp_sum, prefix_exp_sum_dyadic, sifted_character_sum};
use pntap_core::multfunc::triangle_check;
use pntap_core::pnt_ap::{eta_q, lambda_chi_profile, orthogonality_decomposition, psi_ap_all, theorem_error_profile};
use pntap_core::series::{
    derivative_bundle, faa_log_derivative, l1_residual, lchil1_monitor, lchil2_monitor, lchil3_monitor,
    ordered_partition_count, ComplexPoint, DerivativeBundle, LchiReport, MonitorGrid, SeriesContext, ZERO_FLOOR,
};
use pntap_core::siegel::{
    convolution_partial_sums, eta_constants, partial_sum_identity_check, real_primitive_up_to, siegel_scan,
    zerol1_sweep,
};
use pntap_core::sieve_weights::{build_weights, mean_value, verify_sandwich, Sign};
use pntap_core::sum::block_sum;
use pntap_core::{ArithmeticTables, MultiplicativeFunction, TableConfig};

use crate::config::RunConfig;
use crate::report::{render_summary, write_reports, Artifact, Check, CheckKind, SuiteReport};
use crate::Failure;

use CheckKind::{Hard, Monitor};

pub const SUITES: [&str; 8] = [
    "arith",
    "characters",
    "distance",
    "series",
    "expsums",
    "sieve",
    "siegel",
    "pnt-ap",
];

/// `(suite, check, kind)` for every check a suite can emit.
pub const MANIFEST: &[(&str, &str, CheckKind)] = &[
    ("arith", "sieve-vs-trial-division", Hard),
    ("arith", "chebyshev-psi", Hard),
    ("characters", "count-equals-phi", Hard),
    ("characters", "orthogonality-exact", Hard),
    ("characters", "real-count-bound", Hard),
    ("characters", "conductor-identity", Hard),
    ("distance", "triangle-random", Hard),
    ("distance", "triangle-structured", Hard),
    ("series", "l1-ceiling", Hard),
    ("series", "l1-refinement", Monitor),
    ("series", "faa-partition-count", Hard),
    ("series", "faa-quotient-rule", Hard),
    ("series", "faa-derlemma-ceiling", Hard),
    ("series", "lchil1", Monitor),
    ("series", "lchil2", Monitor),
    ("series", "lchil3", Monitor),
    ("expsums", "nit-ceiling", Hard),
    ("expsums", "nit-phase-warnings", Monitor),
    ("expsums", "dyadic-reassembly", Hard),
    ("expsums", "chinit-discrepancy", Monitor),
    ("sieve", "sandwich", Hard),
    ("sieve", "mean-value", Monitor),
    ("siegel", "gamma-zero", Hard),
    ("siegel", "eta-constants", Hard),
    ("siegel", "gamma-lipschitz", Monitor),
    ("siegel", "identity-residuals", Hard),
    ("siegel", "convolution-bounds", Hard),
    ("siegel", "convolution-fitted-constant", Monitor),
    ("siegel", "zerol1-hypothesis", Hard),
    ("siegel", "scan-positive", Hard),
    ("siegel", "scan-min-sqrt-q", Hard),
    ("siegel", "scan-epsilon-trend", Monitor),
    ("pnt-ap", "reconciliation", Hard),
    ("pnt-ap", "orthogonality", Hard),
    ("pnt-ap", "normalized-error", Hard),
    ("pnt-ap", "chebyshev-deviation", Hard),
    ("pnt-ap", "eta-positive", Hard),
    ("pnt-ap", "lambda-chi-dual-path", Hard),
    ("pnt-ap", "lambda-chi-trend", Monitor),
    ("pnt-ap", "error-profile", Monitor),
];

pub fn kind_of(suite: &str, name: &str) -> Option<CheckKind> {
    MANIFEST.iter().find(|m| m.0 == suite && m.1 == name).map(|m| m.2)
}

/// Frozen golden ceilings.
pub const L1_CEILING: f64 = 3.0;
pub const SQRT_Q_L1_FLOOR: f64 = 0.4;
pub const NORMALIZED_ERROR_CEILING: f64 = 0.02;
pub const PSI_DEVIATION_CEILING: f64 = 0.05;
pub const TRIANGLE_SLACK_FLOOR: f64 = -1e-12;
pub const QUOTIENT_RULE_TOL: f64 = 1e-8;
pub const EULER_GAMMA_TOL: f64 = 1e-6;
pub const RECONCILIATION_TOL: f64 = 1e-9;
pub const DUAL_PATH_TOL: f64 = 1e-7;
/// At `k = 1` the ceiling is attained, so the comparison allows a few ulps.
pub const DERLEMMA_ROUNDING: f64 = 4.0 * f64::EPSILON;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

struct Recorder {
    suite: &'static str,
    checks: Vec<Check>,
    artifacts: Vec<Artifact>,
}

impl Recorder {
    fn new(suite: &'static str) -> Self {
        Self {
            suite,
            checks: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    fn check(&mut self, name: &'static str, passed: bool, detail: String) {
        let kind = kind_of(self.suite, name).unwrap_or_else(|| panic!("{}/{name} is not in the manifest", self.suite));
        self.checks.push(Check {
            suite: self.suite,
            name,
            kind,
            passed,
            detail,
        });
    }

    fn artifact(&mut self, file: &str, contents: String) {
        self.artifacts.push(Artifact {
            file: file.into(),
            contents,
        });
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            suite: self.suite,
            checks: self.checks,
            artifacts: self.artifacts,
        }
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    tables: &'a ArithmeticTables,
}

impl Ctx<'_> {
    fn cap(&self, x: f64) -> f64 {
        x.min(self.tables.limit() as f64)
    }

    fn grid(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter()
            .copied()
            .filter(|&x| x <= self.tables.limit() as f64)
            .collect()
    }
}

fn sieve_mismatch(tables: &ArithmeticTables, n: u64) -> Option<&'static str> {
    let f = factorize(n);
    let mu = match (f.is_squarefree(), f.omega() % 2) {
        (false, _) => 0,
        (true, 0) => 1,
        _ => -1,
    };
    if tables.mobius(n) != mu {
        return Some("mu");
    }
    let pk = (f.factors.len() == 1).then(|| f.factors[0]);
    if tables.mangoldt_pk(n) != pk {
        return Some("Lambda");
    }
    if tables.totient(n) != totient(n) {
        return Some("phi");
    }
    for r in 2..=4 {
        if tables.tau_r(n, r).ok() != tau_r(n, r).ok() {
            return Some("tau_r");
        }
    }
    None
}

fn arith(ctx: &Ctx) -> Result<SuiteReport, Failure> {
    let mut rec = Recorder::new("arith");
    let t = ctx.tables;
    let n_max = t.limit().min(1_000_000);
    let bad = (1..=n_max)
        .into_par_iter()
        .find_first(|&n| sieve_mismatch(t, n).is_some());
    rec.check(
        "sieve-vs-trial-division",
        bad.is_none(),
        match bad {
            None => format!("mu, Lambda, phi, tau_2..4 agree for n <= {n_max}"),
            Some(n) => format!("first mismatch at n = {n} ({})", sieve_mismatch(t, n).unwrap_or("?")),
        },
    );
    let x = t.limit();
    let psi = chebyshev_psi(x as f64, t)?;
    let direct = block_sum(x as usize, |i| t.mangoldt(i as u64 + 1));
    let rel = (psi - direct).abs() / psi;
    rec.check(
        "chebyshev-psi",
        rel <= 1e-12,
        format!("psi({x}) = {psi:.10e}, per-n sum differs by {rel:.3e} relative"),
    );
    Ok(rec.finish())
}

/// `χ(n)` and `χ₁(n)` as exact fractions of a turn agree.
fn same_root(a: CharValue, la: u64, b: CharValue, lb: u64) -> bool {
    match (a, b) {
        (CharValue::Zero, CharValue::Zero) => true,
        (CharValue::Root(x), CharValue::Root(y)) => x as u128 * lb as u128 == y as u128 * la as u128,
        _ => false,
    }
}

fn characters(_ctx: &Ctx) -> Result<SuiteReport, Failure> {
    let mut rec = Recorder::new("characters");
    const QMAX: u64 = 500;
    struct Row {
        q: u64,
        count_ok: bool,
        orth_ok: bool,
        real: u64,
        real_ok: bool,
        conductor_ok: bool,
    }
    let rows: Vec<Row> = (1..=QMAX)
        .into_par_iter()
        .map(|q| {
            let g = build_group(q);
            let chars = all_characters(&g);
            let phi = totient(q);
            let units: Vec<u64> = (1..=q).filter(|&a| pntap_core::arith::gcd(a, q) == 1).collect();
            let orth_ok = units.iter().all(|&a| {
                let off = orthogonality_sum_in(&g, a, 1).ok() == Some(if a % q == 1 % q { phi as i64 } else { 0 });
                let diag = orthogonality_sum_in(&g, a, a).ok() == Some(phi as i64);
                off && diag
            });
            let real = real_characters(&g).len() as u64;
            let tau2 = tau_r(q, 2).unwrap_or(0);
            let conductor_ok = chars.iter().all(|chi| {
                let (c, prim) = chi.conductor_and_primitive_part();
                q % c == 0
                    && prim.modulus() == c
                    && prim.is_primitive()
                    && units
                        .iter()
                        .all(|&n| same_root(chi.evaluate(n), g.exponent(), prim.evaluate(n), prim.group().exponent()))
            });
            Row {
                q,
                count_ok: chars.len() as u64 == phi,
                orth_ok,
                real,
                real_ok: real <= 2 * tau2,
                conductor_ok,
            }
        })
        .collect();
    let first = |f: fn(&Row) -> bool| rows.iter().find(|r| !f(r)).map(|r| r.q);
    let describe = |bad: Option<u64>, what: &str| match bad {
        None => format!("{what} for all q <= {QMAX}"),
        Some(q) => format!("fails at q = {q}"),
    };
    let bad = first(|r| r.count_ok);
    rec.check("count-equals-phi", bad.is_none(), describe(bad, "phi(q) characters"));
    let bad = first(|r| r.orth_ok);
    rec.check(
        "orthogonality-exact",
        bad.is_none(),
        describe(bad, "exact sums over all units"),
    );
    let bad = first(|r| r.real_ok);
    let most = rows.iter().map(|r| r.real).max().unwrap_or(0);
    rec.check(
        "real-count-bound",
        bad.is_none(),
        format!(
            "{}; largest real count {most}",
            describe(bad, "real count <= 2 tau_2(q)")
        ),
    );
    let bad = first(|r| r.conductor_ok);
    rec.check(
        "conductor-identity",
        bad.is_none(),
        describe(bad, "chi = chi_1 on units"),
    );
    Ok(rec.finish())
}

fn structured_functions() -> Vec<MultiplicativeFunction> {
    let mut fs = vec![MultiplicativeFunction::mobius()];
    for q in 1..=12 {
        fs.extend(
            all_characters(&build_group(q))
                .into_iter()
                .map(MultiplicativeFunction::character),
        );
    }
    fs.extend([1.0, -1.0, 5.0, -5.0].map(MultiplicativeFunction::twist));
    fs
}

fn distance(ctx: &Ctx) -> Result<SuiteReport, Failure> {
    let mut rec = Recorder::new("distance");
    let x = ctx.cap(1e5);
    let y = 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let seeds: Vec<(u64, u64)> = (0..ctx.cfg.pairs).map(|_| (rng.random(), rng.random())).collect();
    let random: Vec<(u64, u64, f64, f64, f64)> = seeds
        .par_iter()
        .map(|&(a, b)| {
            let f = MultiplicativeFunction::random_unimodular(a);
            let g = MultiplicativeFunction::random(b);
            let t = triangle_check(&f, &g, y, x, ctx.tables)?;
            Ok((a, b, t.lhs, t.rhs, t.slack))
        })
        .collect::<Result<_, pntap_core::Error>>()?;
    let worst = random.iter().map(|r| r.4).fold(f64::INFINITY, f64::min);
    rec.check(
        "triangle-random",
        worst >= TRIANGLE_SLACK_FLOOR,
        format!("{} seeded pairs, y = {y}, x = {x}, min slack {worst:.6e}", random.len()),
    );
    let mut csv = String::from("seed_f,seed_g,lhs,rhs,slack\n");
    for r in &random {
        let _ = writeln!(csv, "{},{},{:.12e},{:.12e},{:.12e}", r.0, r.1, r.2, r.3, r.4);
    }
    rec.artifact("triangle-fuzz.csv", csv);

    let fs = structured_functions();
    let pairs: Vec<(usize, usize)> = (0..fs.len()).flat_map(|i| (i..fs.len()).map(move |j| (i, j))).collect();
    let slacks: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| triangle_check(&fs[i], &fs[j], y, x, ctx.tables).map(|t| t.slack))
        .collect::<Result<_, _>>()?;
    let (k, worst) = slacks
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |a, (k, &s)| if s < a.1 { (k, s) } else { a });
    let (i, j) = pairs[k];
    rec.check(
        "triangle-structured",
        worst >= TRIANGLE_SLACK_FLOOR,
        format!(
            "{} pairs over {} functions, min slack {worst:.6e} at ({}, {})",
            pairs.len(),
            fs.len(),
            fs[i].label(),
            fs[j].label()
        ),
    );
    Ok(rec.finish())
}

fn l1_functions() -> Vec<MultiplicativeFunction> {
    let mut fs = vec![MultiplicativeFunction::mobius()];
    for q in [3, 4, 5] {
        fs.extend(
            all_characters(&build_group(q))
                .into_iter()
                .map(MultiplicativeFunction::character),
        );
    }
    fs
}

fn l1_sup(fs: &[MultiplicativeFunction], ts: &[f64], xs: &[f64], tables: &ArithmeticTables) -> Result<f64, Failure> {
    let mut sup: f64 = 0.0;
    for f in fs {
        for y in [2.0, 10.0] {
            sup = sup.max(l1_residual(f, ts, y, xs, tables)?.sup);
        }
    }
    Ok(sup)
}

fn midpoints(v: &[f64], geometric: bool) -> Vec<f64> {
    let mut out = Vec::new();
    for (i, &a) in v.iter().enumerate() {
        out.push(a);
        if let Some(&b) = v.get(i + 1) {
            out.push(if geometric { (a * b).sqrt() } else { (a + b) / 2.0 });
        }
    }
    out
}

/// `G^{(n)}` for `G = F'/F` from `F^{(n+1)} = Σ_i C(n,i) G^{(i)} F^{(n−i)}`.
fn quotient_rule(f: &[num_complex::Complex64]) -> Vec<num_complex::Complex64> {
    let mut g: Vec<num_complex::Complex64> = Vec::new();
    for n in 0..f.len() - 1 {
        let mut rhs = f[n + 1];
        let mut binom = 1.0;
        for (i, gi) in g.iter().enumerate() {
            rhs -= *gi * f[n - i] * binom;
            binom = binom * (n - i) as f64 / (i + 1) as f64;
        }
        g.push(rhs / f[0]);
    }
    g
}

fn monitor_pair(coarse: LchiReport, fine: LchiReport) -> (bool, String) {
    let ok = coarse.sup_ratio.is_finite() && fine.sup_ratio.is_finite() && fine.sup_ratio <= 2.0 * coarse.sup_ratio;
    (
        ok,
        format!("sup ratio {:.6e}, refined {:.6e}", coarse.sup_ratio, fine.sup_ratio),
    )
}

fn series(ctx: &Ctx) -> Result<SuiteReport, Failure> {
    let mut rec = Recorder::new("series");
    let t = ctx.tables;
    let fs = l1_functions();
    let ts = [-5.0, -1.0, 0.0, 1.0, 5.0];
    let xs = ctx.grid(&[1e2, 1e3, 1e4, 1e5, 1e6]);
    let coarse = l1_sup(&fs, &ts, &xs, t)?;
    rec.check(
        "l1-ceiling",
        coarse <= L1_CEILING,
        format!(
            "sup {coarse:.6e} over {} functions, x <= {:e}",
            fs.len(),
            xs.last().copied().unwrap_or(0.0)
        ),
    );
    let fine = l1_sup(&fs, &midpoints(&ts, false), &midpoints(&xs, true), t)?;
    rec.check(
        "l1-refinement",
        fine <= 2.0 * coarse,
        format!("refined sup {fine:.6e} against coarse {coarse:.6e}"),
    );

    let bad = (1..=20u32).find(|&k| ordered_partition_count(k).ok() != Some(1 << (k - 1)));
    rec.check(
        "faa-partition-count",
        bad.is_none(),
        match bad {
            None => "2^(k-1) ordered partitions for k <= 20".into(),
            Some(k) => format!("count wrong at k = {k}"),
        },
    );
    let mut worst_rel: f64 = 0.0;
    let mut worst_ceiling: f64 = 0.0;
    for y in [2.0, 10.0] {
        let sc = SeriesContext::new(MultiplicativeFunction::mobius(), y, t)?.with_tol(ctx.cfg.tol);
        for sigma in [1.1, 1.5, 2.0] {
            let b = derivative_bundle(&sc, ComplexPoint::new(sigma, 0.0)?, 5)?;
            let qr = quotient_rule(&b.values);
            for k in 1..=5usize {
                let sub = DerivativeBundle::new(b.values[..=k].to_vec(), b.errors[..=k].to_vec());
                let r = faa_log_derivative(&sub, ZERO_FLOOR)?;
                let expect = qr[k - 1];
                worst_rel = worst_rel.max((r.value - expect).norm() / expect.norm().max(1e-300));
                worst_ceiling = worst_ceiling.max(r.value.norm() / r.bound);
            }
        }
    }
    rec.check(
        "faa-quotient-rule",
        worst_rel <= QUOTIENT_RULE_TOL,
        format!("max relative gap {worst_rel:.3e} for k <= 5, s in {{1.1, 1.5, 2}}, y in {{2, 10}}"),
    );
    rec.check(
        "faa-derlemma-ceiling",
        worst_ceiling <= 1.0 + DERLEMMA_ROUNDING,
        format!("max |value|/bound {worst_ceiling:.17}"),
    );

    let g3 = build_group(3);
    let chi = all_characters(&g3)
        .into_iter()
        .find(|c| !c.is_principal())
        .expect("mod 3");
    let grid = MonitorGrid::default();
    let refined = grid.refined();
    let (ok, d) = monitor_pair(
        lchil1_monitor(&chi, 1, &grid, None, t)?,
        lchil1_monitor(&chi, 1, &refined, None, t)?,
    );
    rec.check("lchil1", ok, format!("chi mod 3, k = 1: {d}"));
    let (ok, d) = monitor_pair(
        lchil2_monitor(&chi, &grid, 2.0, t)?,
        lchil2_monitor(&chi, &refined, 2.0, t)?,
    );
    rec.check("lchil2", ok, format!("chi mod 3: {d}"));
    let (ok, d) = monitor_pair(
        lchil3_monitor(&chi, 1, &grid, t)?,
        lchil3_monitor(&chi, 1, &refined, t)?,
    );
    rec.check("lchil3", ok, format!("chi mod 3, k = 1: {d}"));
    Ok(rec.finish())
}

fn expsums(ctx: &Ctx) -> Result<SuiteReport, Failure> {
    let mut rec = Recorder::new("expsums");
    let top = ctx.cfg.tmax.log10().floor() as i32;
    let ts: Vec<f64> = (1..=top).map(|j| 10f64.powi(j)).collect();
    let samples = nit_scan(&ts, &[0.0, 0.5, 1.0], 1_000_000)?;
    let above: Vec<String> = samples
        .iter()
        .filter(|s| s.margin < 0.0)
        .map(|s| {
            format!(
                "N = {}, t = {:e}, u = {}: |sum|/ceiling = {:.12}",
                s.n,
                s.t,
                s.u,
                s.abs / s.ceiling
            )
        })
        .collect();
    let tightest = samples.iter().map(|s| s.abs / s.ceiling).fold(0.0, f64::max);
    rec.check(
        "nit-ceiling",
        above.is_empty() && !samples.is_empty(),
        if above.is_empty() {
            format!("{} samples, largest |sum|/ceiling {tightest:.12}", samples.len())
        } else {
            format!(
                "{} samples, {} above the ceiling: {}",
                samples.len(),
                above.len(),
                above.join("; ")
            )
        },
    );
    let warnings = samples.iter().filter(|s| s.phase_warning).count();
    rec.check(
        "nit-phase-warnings",
        warnings == 0,
        format!("{warnings} samples with phase warnings"),
    );
    let mut csv = String::from("N,t,u,abs,ceiling,margin,phase_warning\n");
    for s in &samples {
        let _ = writeln!(
            csv,
            "{},{:e},{},{:.12e},{:.12e},{:.12e},{}",
            s.n, s.t, s.u, s.abs, s.ceiling, s.margin, s.phase_warning
        );
    }
    rec.artifact("expsums-nit.csv", csv);

    let mut gap: f64 = 0.0;
    for (n, u, tt) in [(1000u64, 0.5, 100.0), (4096, 0.0, 1e4), (100_000, 1.0, 1e6)] {
        gap = gap.max((prefix_exp_sum(n, u, tt) - prefix_exp_sum_dyadic(n, u, tt)).norm() / n as f64);
    }
    rec.check(
        "dyadic-reassembly",
        gap <= 1e-9,
        format!("direct and dyadic prefix sums differ by at most {gap:.3e} N"),
    );

    let x = ctx.cap(1e6);
    let mut details = Vec::new();
    let mut finite = true;
    let mut chars: Vec<DirichletCharacter> = vec![DirichletCharacter::principal(3)];
    chars.extend(
        all_characters(&build_group(4))
            .into_iter()
            .filter(|c| !c.is_principal()),
    );
    for chi in &chars {
        for tt in [0.0, 10.0] {
            let s = sifted_character_sum(chi, tt, x, 10.0, ctx.tables)?;
            finite &= s.ratio.is_finite();
            details.push(format!("q={} t={tt}: ratio {:.4e}", chi.modulus(), s.ratio));
        }
    }
    rec.check(
        "chinit-discrepancy",
        finite,
        format!("x = {x:e}, y = 10; {}", details.join("; ")),
    );
    Ok(rec.finish())
}

fn sieve(ctx: &Ctx) -> Result<SuiteReport, Failure> {
    let mut rec = Recorder::new("sieve");
    let n_max = ctx.tables.limit().min(100_000);
    let mut csv = String::from("y,u,n_max,m,plus_terms,minus_terms,sifted,violations\n");
    let mut failed = Vec::new();
    let mut fitted: f64 = 0.0;
    for y in [5.0, 10.0, 30.0] {
        for u in [2.0, 3.0, 4.0] {
            let w = build_weights(y, u, ctx.tables)?;
            let r = verify_sandwich(&w, n_max, ctx.tables)?;
            if !r.passed() {
                failed.push(format!("(y={y}, u={u}) at n = {}", r.violations[0].n));
            }
            let _ = writeln!(
                csv,
                "{y},{u},{n_max},{},{},{},{},{}",
                w.m,
                w.lambda_plus.len(),
                w.lambda_minus.len(),
                r.sifted,
                r.violations.len()
            );
        }
    }
    let mut trend = Vec::new();
    let mut monotone = true;
    for y in [5.0, 10.0, 30.0] {
        let mut gaps = Vec::new();
        for u in [2.0, 3.0, 4.0, 6.0] {
            let w = build_weights(y, u, ctx.tables)?;
            let mut gap: f64 = 0.0;
            for sign in [Sign::Plus, Sign::Minus] {
                let m = mean_value(&w, |_| 1.0, sign, ctx.tables)?;
                fitted = fitted.max(m.fitted_constant);
                gap = gap.max((m.ratio - 1.0).abs());
            }
            gaps.push(gap);
        }
        monotone &= gaps.windows(2).all(|w| w[1] <= w[0]);
        trend.push(format!(
            "y={y}: {}",
            gaps.iter().map(|g| format!("{g:.3e}")).collect::<Vec<_>>().join(" ")
        ));
    }
    rec.check(
        "sandwich",
        failed.is_empty(),
        if failed.is_empty() {
            format!("lambda- * 1 <= [P-(n) > y] <= lambda+ * 1 for n <= {n_max} on all 9 (y, u)")
        } else {
            failed.join("; ")
        },
    );
    rec.check(
        "mean-value",
        monotone && fitted.is_finite(),
        format!(
            "|ratio - 1| for g = 1 over u in {{2, 3, 4, 6}}: {}; largest e^u |ratio - 1| {fitted:.6e}",
            trend.join("; ")
        ),
    );
    rec.artifact("sieve-sandwich.csv", csv);
    Ok(rec.finish())
}

fn siegel(ctx: &Ctx) -> Result<SuiteReport, Failure> {
    let mut rec = Recorder::new("siegel");
    let c0 = eta_constants(0.0)?;
    let gap = (c0.gamma_eta - EULER_GAMMA).abs();
    rec.check(
        "gamma-zero",
        gap <= EULER_GAMMA_TOL,
        format!("gamma_0 = {:.12}, off by {gap:.3e}", c0.gamma_eta),
    );
    let grid: Vec<_> = (0..=10)
        .map(|i| eta_constants(i as f64 * 0.005))
        .collect::<Result<_, _>>()?;
    let max_err = grid.iter().map(|c| c.error).fold(0.0, f64::max);
    let max_gamma = grid.iter().map(|c| c.gamma_eta).fold(f64::NEG_INFINITY, f64::max);
    rec.check(
        "eta-constants",
        max_err <= 1e-8 && max_gamma < 1.0,
        format!("eta in [0, 0.05]: error <= {max_err:.3e}, max gamma_eta {max_gamma:.9}"),
    );
    let lip = grid
        .windows(2)
        .map(|w| (w[1].gamma_eta - w[0].gamma_eta).abs() / 0.005)
        .fold(0.0, f64::max);
    rec.check(
        "gamma-lipschitz",
        lip <= 4.0,
        format!("max difference quotient {lip:.6e}"),
    );

    let mut worst: f64 = 0.0;
    let mut all = true;
    for eta in [0.0, 0.01, 0.05] {
        for b in [10u64, 1000, 100_000] {
            let r = partial_sum_identity_check(eta, b)?;
            all &= r.passed();
            worst = worst.max(r.residual_harmonic.max(r.residual_log) / r.ceiling);
        }
    }
    rec.check(
        "identity-residuals",
        all,
        format!("B <= 1e5, eta in {{0, 0.01, 0.05}}: worst residual/ceiling {worst:.6e}"),
    );

    let small = real_primitive_up_to(13);
    let mut conv_ok = true;
    let mut fitted: f64 = 0.0;
    for a in &small {
        for b in &small {
            for x in [10u64, 100, 1000, 10_000] {
                if x > ctx.tables.limit() {
                    continue;
                }
                let r = convolution_partial_sums(a, b, x, ctx.tables)?;
                conv_ok &= r.passed();
                fitted = fitted.max(r.fitted_constant);
            }
        }
    }
    rec.check(
        "convolution-bounds",
        conv_ok,
        format!("{} characters of conductor <= 13, x <= 1e4", small.len()),
    );
    rec.check(
        "convolution-fitted-constant",
        fitted.is_finite(),
        format!("max |sum f|/(q^(4/3) x^(2/3) log x) = {fitted:.6e}"),
    );

    let z = zerol1_sweep(50, 10_000)?;
    let bad = z.iter().find(|r| !r.passed());
    rec.check(
        "zerol1-hypothesis",
        bad.is_none(),
        match bad {
            None => format!(
                "0 <= (1*f)(n) <= tau_4(n) for {} pairs of conductor <= 50, n <= 1e4",
                z.len()
            ),
            Some(r) => format!("fails for ({}, {}): {:?}", r.q1, r.q2, r.first_counterexample),
        },
    );

    let scan = siegel_scan(ctx.cfg.qmax, ctx.cfg.tol)?;
    rec.check(
        "scan-positive",
        scan.all_positive,
        format!("{} characters of conductor <= {}", scan.rows.len(), scan.qmax),
    );
    rec.check(
        "scan-min-sqrt-q",
        scan.min_sqrt_q_value >= SQRT_Q_L1_FLOOR,
        format!(
            "min sqrt(q) L(1, chi) = {:.9} at q = {}",
            scan.min_sqrt_q_value, scan.argmin_conductor
        ),
    );
    let trend: Vec<String> = scan
        .trend
        .iter()
        .map(|b| format!("eps={} [{},{}): {:.4}", b.epsilon, b.lo, b.hi, b.min))
        .collect();
    rec.check(
        "scan-epsilon-trend",
        scan.trend.iter().all(|b| b.min > 0.0),
        format!(
            "one exceptional character cannot be ruled out computationally; {}",
            trend.join("; ")
        ),
    );
    let mut csv = String::from("q,index,L1,error,sqrt_q_L1\n");
    for r in &scan.rows {
        let _ = writeln!(
            csv,
            "{},{},{:.12e},{:.3e},{:.12e}",
            r.conductor, r.index, r.value, r.error, r.sqrt_q_value
        );
    }
    rec.artifact("siegel-scan.csv", csv);
    Ok(rec.finish())
}

fn pnt_ap(ctx: &Ctx) -> Result<SuiteReport, Failure> {
    let mut rec = Recorder::new("pnt-ap");
    let t = ctx.tables;
    let xs = ctx.grid(&[1e3, 1e5, 1e7]);
    let cells: Vec<(u64, f64)> = (1..=50u64).flat_map(|q| xs.iter().map(move |&x| (q, x))).collect();
    let worst = cells
        .par_iter()
        .map(|&(q, x)| psi_ap_all(x, q, t).map(|a| a.relative_residual))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    rec.check(
        "reconciliation",
        worst <= RECONCILIATION_TOL,
        format!("q <= 50, x in {xs:?}: max relative residual {worst:.3e}"),
    );

    let mut triples: Vec<(f64, u64)> = vec![(100.0, 3), (ctx.cap(1e5), 12)];
    triples.extend((1..=12).map(|q| (ctx.cap(1e4), q)));
    let mut orth_ok = true;
    let mut worst_ratio: f64 = 0.0;
    for (x, q) in triples {
        for a in (0..q).filter(|&a| pntap_core::arith::gcd(a, q) == 1) {
            let d = orthogonality_decomposition(x, q, a, t)?;
            orth_ok &= d.passed();
            worst_ratio = worst_ratio.max(d.residual / d.bound);
        }
    }
    rec.check(
        "orthogonality",
        orth_ok,
        format!("max residual/bound {worst_ratio:.6e}"),
    );

    let x = ctx.cap(1e7);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for q in [3u64, 4, 5, 7, 12] {
        let m = psi_ap_all(x, q, t)?.max_normalized();
        worst = worst.max(m);
        rows.push(format!("q={q}: {m:.4e}"));
    }
    rec.check(
        "normalized-error",
        worst <= NORMALIZED_ERROR_CEILING,
        format!("x = {x:e}: {}", rows.join(", ")),
    );

    let top = t.limit().min(10_000_000);
    let mut psi = 0.0;
    let mut dev: f64 = 0.0;
    for n in 1..=top {
        psi += t.mangoldt(n);
        if n >= 10_000 {
            let right = if n < top {
                (psi - (n + 1) as f64).abs() / (n + 1) as f64
            } else {
                0.0
            };
            dev = dev.max((psi - n as f64).abs() / n as f64).max(right);
        }
    }
    rec.check(
        "chebyshev-deviation",
        dev <= PSI_DEVIATION_CEILING && top >= 10_000,
        format!("max |psi(x) - x|/x on [1e4, {top}] = {dev:.6e}"),
    );

    let etas: Vec<Option<f64>> = (1..=500u64)
        .into_par_iter()
        .map(|q| eta_q(q, ctx.cfg.tol).map(|e| e.map(|e| e.value)))
        .collect::<Result<_, _>>()?;
    let min_eta = etas.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    rec.check(
        "eta-positive",
        min_eta > 0.0 && etas[0].is_none() && etas[1].is_none(),
        format!("min eta(q) over q <= 500: {min_eta:.6e}; none for q in {{1, 2}}"),
    );

    let y = ctx.cap(1e4);
    let chi3 = real_characters(&build_group(3))
        .into_iter()
        .find(|c| !c.is_principal())
        .expect("mod 3");
    let mut gap: f64 = 0.0;
    for chi in [DirichletCharacter::principal(1), chi3.clone()] {
        let p = lambda_chi_profile(&chi, &[y], &[1, 3], t)?;
        gap = p.smoothed.iter().map(|s| s.relative_gap).fold(gap, f64::max);
    }
    rec.check(
        "lambda-chi-dual-path",
        gap <= DUAL_PATH_TOL,
        format!("direct and summation-by-parts smoothed sums at y = {y:e}: relative gap {gap:.3e}"),
    );
    let grid = ctx.grid(&[1e4, 1e5, 1e6]);
    let p = lambda_chi_profile(&chi3, &grid, &[], t)?;
    let scaled: Vec<f64> = p.sums.iter().zip(&grid).map(|(s, x)| s.norm() / x).collect();
    rec.check(
        "lambda-chi-trend",
        scaled.windows(2).all(|w| w[1] <= w[0]),
        format!(
            "|sum Lambda_chi|/x for chi mod 3: {:?}; M(chi) = {:.9}",
            scaled.iter().map(|v| format!("{v:.4e}")).collect::<Vec<_>>(),
            p.m_chi
        ),
    );

    let profile = theorem_error_profile(&[3, 4, 5, 7, 12], &ctx.grid(&[1e5, 1e6, 1e7]), t)?;
    let fits: Vec<String> = profile
        .fits
        .iter()
        .map(|f| {
            format!(
                "q={}: c_A {:.4}{}",
                f.q,
                f.c_a,
                if f.monotone { "" } else { " (not monotone)" }
            )
        })
        .collect();
    rec.check(
        "error-profile",
        profile.fits.iter().all(|f| f.monotone),
        fits.join("; "),
    );
    rec.artifact("pnt-ap-profile.csv", profile.to_csv());
    Ok(rec.finish())
}

fn run_one(name: &str, ctx: &Ctx) -> Result<SuiteReport, Failure> {
    match name {
        "arith" => arith(ctx),
        "characters" => characters(ctx),
        "distance" => distance(ctx),
        "series" => series(ctx),
        "expsums" => expsums(ctx),
        "sieve" => sieve(ctx),
        "siegel" => siegel(ctx),
        "pnt-ap" => pnt_ap(ctx),
        other => Err(Failure::Usage(format!("unknown suite '{other}'"))),
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub reports: Vec<SuiteReport>,
    pub summary: String,
}

impl RunOutcome {
    pub fn hard_failures(&self) -> usize {
        self.reports.iter().map(|r| r.hard_failures()).sum()
    }

    pub fn exit_code(&self) -> i32 {
        if self.hard_failures() == 0 {
            crate::EXIT_PASS
        } else {
            crate::EXIT_HARD_FAILURE
        }
    }
}

/// Loads or builds the tables the configuration asks for.
pub fn load_tables(cfg: &RunConfig) -> Result<ArithmeticTables, Failure> {
    Ok(load_or_build(
        cfg.limit,
        cfg.table_cache.as_deref(),
        &TableConfig::default(),
    )?)
}

/// Runs `name` (a member of [`SUITES`] or `all`) and writes reports under
/// `cfg.out` when set.
pub fn run_suite(name: &str, cfg: &RunConfig) -> Result<RunOutcome, Failure> {
    let names: Vec<&str> = match name {
        "all" => SUITES.to_vec(),
        n if SUITES.contains(&n) => vec![n],
        other => {
            return Err(Failure::Usage(format!(
                "unknown suite '{other}' (expected one of {} or all)",
                SUITES.join(", ")
            )))
        }
    };
    let work = || -> Result<Vec<SuiteReport>, Failure> {
        let tables = load_tables(cfg)?;
        let ctx = Ctx { cfg, tables: &tables };
        names.iter().map(|n| run_one(n, &ctx)).collect()
    };
    let reports = match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Failure::Resource(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    if let Some(dir) = &cfg.out {
        write_reports(dir, &reports, cfg.format)?;
    }
    Ok(RunOutcome {
        summary: render_summary(&reports, cfg.format),
        reports,
    })
}
