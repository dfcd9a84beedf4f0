//! `ψ(x; q, a)`, its character decomposition through
//! `Λ_χ(n) = χ(n)Λ(n) − δ(χ)`, the scales `M(χ)` and `η(q)`, and the
//! empirical error profile of the prime number theorem in progressions.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

use crate::arith::{chebyshev_psi, gcd, totient, ArithmeticTables};
use crate::characters::{all_characters, build_group, real_characters, DirichletCharacter};
use crate::error::{Error, Result};
use crate::siegel::l1_real_character;
use crate::sum::{ComplexSum, NeumaierSum};

/// Default tolerance for `L(1, χ)` inside `M(χ)` and `η(q)`.
pub const L1_TOL: f64 = 1e-10;

/// Prime powers `p^k ≤ x` with `log p`, ordered by `p` then `k`.
fn prime_powers(x: f64, tables: &ArithmeticTables) -> impl Iterator<Item = (u64, f64)> + '_ {
    let xmax = x.floor() as u64;
    tables.primes_in(1.0, x).iter().flat_map(move |&p| {
        let p = p as u64;
        let lp = (p as f64).ln();
        std::iter::successors(Some(p), move |&pk| pk.checked_mul(p).filter(|&n| n <= xmax)).map(move |n| (n, lp))
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PsiApResult {
    pub x: f64,
    pub q: u64,
    pub a: u64,
    pub psi: f64,
    pub main: f64,
    pub error: f64,
    /// `|error|·φ(q)/x`.
    pub normalized: f64,
}

impl PsiApResult {
    fn new(x: f64, q: u64, a: u64, psi: f64, phi: u64) -> Self {
        let main = x / phi as f64;
        let error = psi - main;
        Self {
            x,
            q,
            a,
            psi,
            main,
            error,
            normalized: error.abs() * phi as f64 / x,
        }
    }
}

fn check_class(x: f64, q: u64, a: u64, tables: &ArithmeticTables) -> Result<()> {
    if q == 0 {
        return Err(Error::Parameter("modulus must be positive".into()));
    }
    if gcd(a % q, q) != 1 {
        return Err(Error::NotCoprime { n: a, q });
    }
    if !(x >= 1.0) {
        return Err(Error::Parameter(format!("x = {x} below 1")));
    }
    tables.check_range("x", x)
}

/// `ψ(x; q, a) = Σ_{n≤x, n≡a (q)} Λ(n)`.
pub fn psi_ap(x: f64, q: u64, a: u64, tables: &ArithmeticTables) -> Result<PsiApResult> {
    check_class(x, q, a, tables)?;
    let a = a % q;
    let psi: NeumaierSum = prime_powers(x, tables)
        .filter(|&(n, _)| n % q == a)
        .map(|(_, l)| l)
        .collect();
    Ok(PsiApResult::new(x, q, a, psi.value(), totient(q)))
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiApAll {
    pub x: f64,
    pub q: u64,
    /// One entry per reduced residue, increasing.
    pub classes: Vec<PsiApResult>,
    /// `Σ_{p|q, p^k≤x} log p`.
    pub shared: f64,
    pub psi: f64,
    /// `|Σ_a ψ(x;q,a) + shared − ψ(x)|/ψ(x)`.
    pub relative_residual: f64,
}

impl PsiApAll {
    pub fn max_normalized(&self) -> f64 {
        self.classes.iter().map(|c| c.normalized).fold(0.0, f64::max)
    }
}

/// `ψ(x; q, a)` for every reduced residue `a`, in one pass over prime
/// powers, reconciled against `ψ(x)`.
pub fn psi_ap_all(x: f64, q: u64, tables: &ArithmeticTables) -> Result<PsiApAll> {
    check_class(x, q, 1, tables)?;
    let mut buckets = vec![NeumaierSum::new(); q as usize];
    let mut shared = NeumaierSum::new();
    for (n, l) in prime_powers(x, tables) {
        let r = n % q;
        if gcd(r, q) == 1 {
            buckets[r as usize].add(l);
        } else {
            shared.add(l);
        }
    }
    let phi = totient(q);
    let classes: Vec<PsiApResult> = (0..q)
        .filter(|&a| gcd(a, q) == 1)
        .map(|a| PsiApResult::new(x, q, a, buckets[a as usize].value(), phi))
        .collect();
    let psi = chebyshev_psi(x, tables)?;
    let mut total: NeumaierSum = classes.iter().map(|c| c.psi).collect();
    total.add(shared.value());
    Ok(PsiApAll {
        x,
        q,
        classes,
        shared: shared.value(),
        psi,
        relative_residual: if psi > 0.0 {
            (total.value() - psi).abs() / psi
        } else {
            total.value().abs()
        },
    })
}

/// `Σ_{n≤x} Λ_χ(n)`.
pub fn lambda_chi_sum(chi: &DirichletCharacter, x: f64, tables: &ArithmeticTables) -> Result<Complex64> {
    tables.check_range("x", x)?;
    let period = chi.period_values();
    let q = chi.modulus();
    let mut acc: ComplexSum = prime_powers(x, tables)
        .map(|(n, l)| period[(n % q) as usize] * l)
        .collect();
    if chi.is_principal() {
        acc.add(Complex64::new(-x.floor(), 0.0));
    }
    Ok(acc.value())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Decomposition {
    pub x: f64,
    pub q: u64,
    pub a: u64,
    pub psi: f64,
    /// `(1/φ(q))Σ_χ χ̄(a)Σ_{n≤x}Λ_χ(n) + x/φ(q)`.
    pub reconstructed: f64,
    pub residual: f64,
    /// `(Σ_{p|q, p^k≤x} log p)/φ(q) + 1`.
    pub bound: f64,
}

impl Decomposition {
    pub fn passed(&self) -> bool {
        self.residual <= self.bound
    }
}

/// Rebuilds `ψ(x; q, a)` from the character sums and compares.
pub fn orthogonality_decomposition(x: f64, q: u64, a: u64, tables: &ArithmeticTables) -> Result<Decomposition> {
    let direct = psi_ap(x, q, a, tables)?;
    let group = build_group(q);
    let phi = group.order() as f64;
    let mut acc = ComplexSum::new();
    for chi in all_characters(&group) {
        acc.add(chi.value(a).conj() * lambda_chi_sum(&chi, x, tables)?);
    }
    let reconstructed = acc.value().re / phi + x / phi;
    let shared: NeumaierSum = prime_powers(x, tables)
        .filter(|&(n, _)| gcd(n, q) != 1)
        .map(|(_, l)| l)
        .collect();
    Ok(Decomposition {
        x,
        q,
        a: a % q,
        psi: direct.psi,
        reconstructed,
        residual: (reconstructed - direct.psi).abs(),
        bound: shared.value() / phi + 1.0,
    })
}

/// `M(χ) = L_q(1, χ)` for real non-principal `χ`, else 1.
pub fn m_chi(chi: &DirichletCharacter) -> Result<f64> {
    if chi.is_real() && !chi.is_principal() {
        Ok(l1_real_character(chi, L1_TOL)?.value_q)
    } else {
        Ok(1.0)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SmoothedSum {
    pub k: u32,
    pub y: f64,
    /// `Σ_{n≤y} Λ_χ(n)(log n)^{k−1} log(y/n)`.
    pub direct: Complex64,
    /// The same by summation by parts against `Σ_{n≤u} Λ_χ(n)`.
    pub abel: Complex64,
    /// `|direct − abel|` over `Σ_{n≤y} |Λ_χ(n)|(log n)^{k−1} log(y/n)`.
    pub relative_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CharacterSumProfile {
    pub modulus: u64,
    pub index: u64,
    pub xs: Vec<f64>,
    /// `Σ_{n≤x} Λ_χ(n)` on `xs`.
    pub sums: Vec<Complex64>,
    pub m_chi: f64,
    pub smoothed: Vec<SmoothedSum>,
}

/// Largest `k` accepted by [`lambda_chi_profile`].
pub const MAX_SMOOTHING: u32 = 12;

fn smoothed_sum(chi: &DirichletCharacter, y: f64, k: u32, tables: &ArithmeticTables) -> SmoothedSum {
    let q = chi.modulus();
    let period = chi.period_values();
    let delta = chi.delta() as f64;
    let ly = y.ln();
    let weight = |n: u64| {
        let l = (n as f64).ln();
        l.powi(k as i32 - 1) * (ly - l)
    };
    let coeff = |n: u64| period[(n % q) as usize] * tables.mangoldt(n) - delta;
    let top = y.floor() as u64;
    let mut direct = ComplexSum::new();
    let mut scale = NeumaierSum::new();
    let mut abel = ComplexSum::new();
    let mut partial = ComplexSum::new();
    for n in 1..=top {
        let c = coeff(n);
        let w = weight(n);
        direct.add(c * w);
        scale.add(c.norm() * w.abs());
        partial.add(c);
        // Σ a(n)F(n) = −Σ_n A(n)(F(n+1) − F(n)) with F(y) = 0
        let next = if n == top { 0.0 } else { weight(n + 1) };
        abel.add(-partial.value() * (next - w));
    }
    let gap = (direct.value() - abel.value()).norm();
    SmoothedSum {
        k,
        y,
        direct: direct.value(),
        abel: abel.value(),
        relative_gap: if scale.value() > 0.0 { gap / scale.value() } else { gap },
    }
}

/// Unsmoothed sums on `xs` and smoothed sums at `max(xs)` for each `k`.
pub fn lambda_chi_profile(
    chi: &DirichletCharacter,
    xs: &[f64],
    ks: &[u32],
    tables: &ArithmeticTables,
) -> Result<CharacterSumProfile> {
    for &x in xs {
        tables.check_range("x", x)?;
        if !(x >= 1.0) {
            return Err(Error::Parameter(format!("x = {x} below 1")));
        }
    }
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > MAX_SMOOTHING) {
        return Err(Error::Parameter(format!(
            "smoothing order k = {k} outside [1, {MAX_SMOOTHING}]"
        )));
    }
    let sums = xs
        .iter()
        .map(|&x| lambda_chi_sum(chi, x, tables))
        .collect::<Result<_>>()?;
    let y = xs.iter().copied().fold(1.0, f64::max);
    let smoothed = ks.par_iter().map(|&k| smoothed_sum(chi, y, k, tables)).collect();
    Ok(CharacterSumProfile {
        modulus: chi.modulus(),
        index: chi.index(),
        xs: xs.to_vec(),
        sums,
        m_chi: m_chi(chi)?,
        smoothed,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EtaQ {
    pub q: u64,
    /// `min L_q(1, χ)/log(3q)`.
    pub value: f64,
    /// Index of the minimizing character.
    pub index: u64,
}

/// `η(q)`; `None` when there is no real non-principal character mod `q`.
pub fn eta_q(q: u64, tol: f64) -> Result<Option<EtaQ>> {
    if q == 0 {
        return Err(Error::Parameter("modulus must be positive".into()));
    }
    let log3q = (3.0 * q as f64).ln();
    let mut best: Option<EtaQ> = None;
    for chi in real_characters(&build_group(q))
        .into_iter()
        .filter(|c| !c.is_principal())
    {
        let v = l1_real_character(&chi, tol)?.value_q / log3q;
        if best.is_none_or(|b| v < b.value) {
            best = Some(EtaQ {
                q,
                value: v,
                index: chi.index(),
            });
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileCell {
    pub q: u64,
    pub x: f64,
    pub classes: Vec<PsiApResult>,
    pub max_normalized: f64,
    /// `x ≤ q`: outside the asymptotic range.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FittedShape {
    pub q: u64,
    /// Slope of `log(max_a|error|/x)` against `−(log x)^{3/5}(log log x)^{−1/5}`.
    pub c_a: f64,
    /// Max normalized error non-increasing along the grid.
    pub monotone: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorProfile {
    pub cells: Vec<ProfileCell>,
    pub fits: Vec<FittedShape>,
}

fn shape(x: f64) -> f64 {
    let l = x.ln();
    l.powf(0.6) * l.ln().powf(-0.2)
}

/// Least-squares slope of `v` against `h` (with intercept when there are
/// at least two distinct abscissae, through the origin otherwise).
fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if n == 0.0 {
        return f64::NAN;
    }
    let mh = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mv = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mh).powi(2)).sum();
    if sxx > 0.0 {
        points.iter().map(|p| (p.0 - mh) * (p.1 - mv)).sum::<f64>() / sxx
    } else {
        points.iter().map(|p| p.0 * p.1).sum::<f64>() / points.iter().map(|p| p.0 * p.0).sum::<f64>()
    }
}

/// Max normalized errors on `qs × xs` and the fitted `c_A` per modulus.
pub fn theorem_error_profile(qs: &[u64], xs: &[f64], tables: &ArithmeticTables) -> Result<ErrorProfile> {
    let grid: Vec<(u64, f64)> = qs.iter().flat_map(|&q| xs.iter().map(move |&x| (q, x))).collect();
    let cells: Vec<ProfileCell> = grid
        .par_iter()
        .map(|&(q, x)| {
            let all = psi_ap_all(x, q, tables)?;
            Ok(ProfileCell {
                q,
                x,
                max_normalized: all.max_normalized(),
                classes: all.classes,
                degenerate: x <= q as f64,
            })
        })
        .collect::<Result<_>>()?;
    let fits = qs
        .iter()
        .map(|&q| {
            let mine: Vec<&ProfileCell> = cells.iter().filter(|c| c.q == q && !c.degenerate).collect();
            let points: Vec<(f64, f64)> = mine
                .iter()
                .filter(|c| c.x > std::f64::consts::E && c.max_normalized > 0.0)
                .map(|c| {
                    let phi = c.classes.len() as f64;
                    (-shape(c.x), (c.max_normalized / phi).ln())
                })
                .collect();
            FittedShape {
                q,
                c_a: slope(&points),
                monotone: mine.windows(2).all(|w| w[1].max_normalized <= w[0].max_normalized),
            }
        })
        .collect();
    Ok(ErrorProfile { cells, fits })
}

impl ErrorProfile {
    /// Rows `q,a,x,psi,main,error,normalized,fitted_cA`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,a,x,psi,main,error,normalized,fitted_cA\n");
        for cell in &self.cells {
            let c_a = self.fits.iter().find(|f| f.q == cell.q).map_or(f64::NAN, |f| f.c_a);
            for r in &cell.classes {
                let _ = writeln!(
                    out,
                    "{},{},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.6e}",
                    r.q, r.a, r.x, r.psi, r.main, r.error, r.normalized, c_a
                );
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factorize;
    use std::sync::OnceLock;

    fn tables() -> &'static ArithmeticTables {
        static T: OnceLock<ArithmeticTables> = OnceLock::new();
        T.get_or_init(|| ArithmeticTables::build(1_000_000).unwrap())
    }

    fn mangoldt_oracle(n: u64) -> f64 {
        let f = factorize(n);
        if f.factors.len() == 1 {
            (f.factors[0].0 as f64).ln()
        } else {
            0.0
        }
    }

    #[test]
    fn small_class_by_hand() {
        let r = psi_ap(10.0, 3, 1, tables()).unwrap();
        assert!((r.psi - (2f64.ln() + 7f64.ln())).abs() < 1e-14);
        assert!((r.main - 5.0).abs() < 1e-15);
    }

    #[test]
    fn modulus_one_is_chebyshev() {
        for x in [1.0, 10.0, 1000.5, 1e5] {
            let r = psi_ap(x, 1, 0, tables()).unwrap();
            assert!((r.psi - chebyshev_psi(x, tables()).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn class_against_trial_division() {
        for (q, a) in [(4u64, 3u64), (7, 2), (12, 5), (30, 7)] {
            let x = 20_000u64;
            let oracle: f64 = (1..=x).filter(|n| n % q == a).map(mangoldt_oracle).sum();
            let r = psi_ap(x as f64, q, a, tables()).unwrap();
            assert!((r.psi - oracle).abs() < 1e-8 * oracle);
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(psi_ap(100.0, 6, 3, tables()), Err(Error::NotCoprime { .. })));
        assert!(matches!(psi_ap(1e7, 3, 1, tables()), Err(Error::Range { .. })));
    }

    #[test]
    fn reconciliation() {
        for q in 1..=50u64 {
            for x in [1e3, 1e5] {
                let all = psi_ap_all(x, q, tables()).unwrap();
                assert!(all.relative_residual <= 1e-9, "q={q}");
                assert_eq!(all.classes.len() as u64, totient(q));
                for c in all.classes.iter().step_by(5) {
                    let single = psi_ap(x, q, c.a, tables()).unwrap();
                    assert!((single.psi - c.psi).abs() <= 1e-9 * x);
                }
            }
        }
    }

    #[test]
    fn decomposition_residuals() {
        let d = orthogonality_decomposition(100.0, 3, 1, tables()).unwrap();
        assert!(d.passed());
        let d = orthogonality_decomposition(100.0, 1, 0, tables()).unwrap();
        assert!(d.residual < 1e-9);
        for a in [1, 5, 7, 11] {
            assert!(orthogonality_decomposition(1e5, 12, a, tables()).unwrap().passed());
        }
    }

    #[test]
    fn principal_mod_one_profile() {
        let chi = DirichletCharacter::principal(1);
        let p = lambda_chi_profile(&chi, &[1e3, 1e4], &[1, 3], tables()).unwrap();
        assert_eq!(p.m_chi, 1.0);
        let psi = chebyshev_psi(1e4, tables()).unwrap();
        assert!((p.sums[1].re - (psi - 1e4)).abs() < 1e-8);
        for s in &p.smoothed {
            assert!(s.relative_gap < 1e-7, "{s:?}");
        }
    }

    #[test]
    fn support_before_first_prime() {
        // χ mod 3 real: Λ_χ vanishes below 2 and at 3
        let g = build_group(3);
        let chi = real_characters(&g).into_iter().find(|c| !c.is_principal()).unwrap();
        let p = lambda_chi_profile(&chi, &[1.0, 1.5], &[2], tables()).unwrap();
        assert!(p.sums.iter().all(|s| s.norm() == 0.0));
        let m = m_chi(&chi).unwrap();
        assert!((m - 1.5 * std::f64::consts::PI / (3.0 * 3f64.sqrt())).abs() < 1e-9);
        assert!(lambda_chi_profile(&chi, &[10.0], &[13], tables()).is_err());
    }

    #[test]
    fn eta_small_moduli() {
        assert!(eta_q(1, 1e-10).unwrap().is_none());
        assert!(eta_q(2, 1e-10).unwrap().is_none());
        let e3 = eta_q(3, 1e-10).unwrap().unwrap();
        let l = std::f64::consts::PI / (3.0 * 3f64.sqrt());
        assert!((e3.value - 1.5 * l / 9f64.ln()).abs() < 1e-9);
        let e8 = eta_q(8, 1e-10).unwrap().unwrap();
        let g = build_group(8);
        let min = real_characters(&g)
            .into_iter()
            .filter(|c| !c.is_principal())
            .map(|c| l1_real_character(&c, 1e-10).unwrap().value_q / 24f64.ln())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(e8.value, min);
        for q in 3..=100 {
            if let Some(e) = eta_q(q, 1e-8).unwrap() {
                assert!(e.value > 0.0);
            }
        }
    }

    #[test]
    fn profile_and_csv() {
        let p = theorem_error_profile(&[3, 4], &[2.0, 1e4, 1e5, 1e6], tables()).unwrap();
        assert!(p.cells.iter().any(|c| c.degenerate));
        for f in &p.fits {
            assert!(f.c_a.is_finite());
        }
        let csv = p.to_csv();
        assert!(csv.starts_with("q,a,x,psi,main,error,normalized,fitted_cA\n"));
        assert_eq!(csv.lines().count(), 1 + 4 * 2 + 4 * 2);
    }
}
