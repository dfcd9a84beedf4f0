//! Taylor jets of `ζ(s)`, `L(s, χ)` and their sifted versions `L_y(s, f)` for
//! `f = μ^a·χ·n^{iτ}`, valid right up to `σ > 1`.
//!
//! Mean-zero periodic series (the alternating series for `η(s)` and `L(s, χ)`
//! for non-principal `χ`) are summed directly up to a multiple of the period
//! and closed off with the partial-summation tail of [`PeriodicPrefix`];
//! `ζ(s) = η(s)/(1 − 2^{1−s})`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::jet::Jet;
use crate::arith::ArithmeticTables;
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::multfunc::EulerStructure;
use crate::periodic::{log_derivative_weight, PeriodicPrefix};
use crate::sum::{ComplexSum, BLOCK};

/// Partial-summation depth used for the tails.
pub const TAIL_LEVELS: usize = 3;
/// Largest head length tried before giving up.
pub const MAX_HEAD: u64 = 1 << 24;

/// `Σ_{n≤N} c(n)·n^{−s−h}` as a jet, one parallel pass over `n`.
fn head_jet(values: &[Complex64], n_max: u64, s: Complex64, order: usize) -> (Vec<Complex64>, Vec<f64>) {
    let period = values.len() as u64;
    let blocks = (n_max as usize).div_ceil(BLOCK);
    let parts: Vec<(Vec<ComplexSum>, Vec<f64>)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = vec![ComplexSum::new(); order + 1];
            let mut mag = vec![0.0; order + 1];
            let lo = (b * BLOCK) as u64 + 1;
            let hi = (((b + 1) * BLOCK) as u64).min(n_max);
            for n in lo..=hi {
                let c = values[(n % period) as usize];
                if c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let ell = (n as f64).ln();
                let mut term = c * (-s * ell).exp();
                for j in 0..=order {
                    acc[j].add(term);
                    mag[j] += term.norm();
                    term *= -ell / (j + 1) as f64;
                }
            }
            (acc, mag)
        })
        .collect();
    let mut coeffs = vec![ComplexSum::new(); order + 1];
    let mut mags = vec![0.0; order + 1];
    for (acc, mag) in parts {
        for j in 0..=order {
            coeffs[j].add(acc[j].value());
            mags[j] += mag[j];
        }
    }
    (
        coeffs.iter().map(|c| c.value()).collect(),
        mags.iter().map(|m| 4.0 * f64::EPSILON * m).collect(),
    )
}

/// Jet of `Σ_{n≥1} c(n)·n^{−s}` for `c` periodic with mean zero;
/// `values[r] = c(n)` for `n ≡ r`. The head grows until every derivative is
/// certified to `tol` (absolute).
pub fn periodic_series_jet(values: &[Complex64], s: Complex64, order: usize, tol: f64) -> Result<Jet> {
    if s.re + TAIL_LEVELS as f64 <= 1.0 {
        return Err(Error::Domain(format!(
            "Re s = {} too small for the tail expansion",
            s.re
        )));
    }
    let prefix = PeriodicPrefix::new(values, TAIL_LEVELS)?;
    let period = prefix.period();
    let polys: Vec<Vec<Complex64>> = (0..=order).map(|j| log_derivative_weight(j as u32)).collect();
    let tail_at = |n: u64| -> (Vec<Complex64>, Vec<f64>) { polys.iter().map(|p| prefix.tail(n, s, p)).unzip() };
    let fact = |j: usize| -> f64 { (1..=j).map(|i| i as f64).product() };
    // smallest multiple of the period with a certified tail
    let mut n = period * 4096u64.div_ceil(period);
    loop {
        let (_, errs) = tail_at(n);
        let worst = errs.iter().enumerate().map(|(j, e)| e * fact(j)).fold(0.0, f64::max);
        if worst <= tol / 2.0 {
            break;
        }
        if n * 2 > MAX_HEAD.max(period) {
            return Err(Error::ToleranceUnreachable {
                requested: tol,
                achievable: worst,
            });
        }
        n *= 2;
    }
    let (head, round) = head_jet(values, n, s, order);
    let (tail, errs) = tail_at(n);
    let coeffs = head.iter().zip(&tail).map(|(h, t)| h + t).collect();
    let errors = round.iter().zip(&errs).map(|(r, e)| r + e).collect();
    Ok(Jet::new(coeffs, errors))
}

/// `1 − a·p^{−s−h}`.
fn euler_factor(a: Complex64, p: u64, s: Complex64, order: usize) -> Jet {
    let ell = (p as f64).ln();
    let mut e = Jet::exponential(-a * (-s * ell).exp(), ell, order);
    e.coeffs[0] += 1.0;
    e
}

/// Jet of `ζ(s)`.
pub fn zeta_jet(s: Complex64, order: usize, tol: f64) -> Result<Jet> {
    if s.re <= 1.0 {
        return Err(Error::Domain(format!("zeta needs Re s > 1, got {}", s.re)));
    }
    let eta = periodic_series_jet(
        &[Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)],
        s,
        order,
        tol * 1e-2,
    )?;
    // 1 − 2^{1−s−h} = 1 − 2·2^{−s−h}
    let denom = euler_factor(Complex64::new(2.0, 0.0), 2, s, order);
    eta.div(&denom)
}

/// Jet of the complete `L(s, χ)`; `None` means `ζ(s)`.
pub fn dirichlet_l_jet(chi: Option<&DirichletCharacter>, s: Complex64, order: usize, tol: f64) -> Result<Jet> {
    match chi {
        None => zeta_jet(s, order, tol),
        Some(chi) if chi.is_principal() => {
            let mut jet = zeta_jet(s, order, tol)?;
            for (p, _) in crate::arith::factorize(chi.modulus()).factors {
                jet = jet.mul(&euler_factor(Complex64::new(1.0, 0.0), p, s, order));
            }
            Ok(jet)
        }
        Some(chi) => {
            if s.re <= 1.0 {
                return Err(Error::Domain(format!("series needs Re s > 1, got {}", s.re)));
            }
            let values = chi.period_values();
            periodic_series_jet(&values, s, order, tol)
        }
    }
}

/// `Π_{p≤y} (1 − χ(p)p^{−s−h})`.
pub fn euler_product_jet(
    chi: Option<&DirichletCharacter>,
    y: f64,
    s: Complex64,
    order: usize,
    tables: &ArithmeticTables,
) -> Result<Jet> {
    let mut jet = Jet::exact({
        let mut c = vec![Complex64::new(0.0, 0.0); order + 1];
        c[0] = Complex64::new(1.0, 0.0);
        c
    });
    if y < 2.0 {
        return Ok(jet);
    }
    tables.check_range("y", y)?;
    for &p in tables.primes_in(1.0, y) {
        let a = chi.map_or(Complex64::new(1.0, 0.0), |c| c.value(p as u64));
        if a != Complex64::new(0.0, 0.0) {
            jet = jet.mul(&euler_factor(a, p as u64, s, order));
        }
    }
    Ok(jet)
}

/// Jet of `L_y(s, f)` for `f` with an Euler structure.
pub fn sifted_jet(
    structure: &EulerStructure,
    y: f64,
    s: Complex64,
    order: usize,
    tables: &ArithmeticTables,
    tol: f64,
) -> Result<Jet> {
    let shifted = s - Complex64::new(0.0, structure.shift);
    let chi = structure.chi.as_ref();
    let full = dirichlet_l_jet(chi, shifted, order, tol)?;
    let euler = euler_product_jet(chi, y, shifted, order, tables)?;
    let sifted = full.mul(&euler);
    if structure.inverse {
        sifted.recip()
    } else {
        Ok(sifted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{all_characters, build_group};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn zeta_two_and_derivative() {
        let z = zeta_jet(c(2.0), 2, 1e-13).unwrap();
        assert!((z.coeffs[0].re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
        // ζ'(2) = −0.93754825431584375370…
        assert!((z.derivative(1).re + 0.937_548_254_315_843_8).abs() < 1e-11);
        assert!(z.max_derivative_error() < 1e-11);
    }

    #[test]
    fn zeta_near_one_matches_pole_expansion() {
        // ζ(1+ε) = 1/ε + γ − γ₁ε + O(ε²)
        let eps = 0.01;
        let z = zeta_jet(c(1.0 + eps), 0, 1e-12).unwrap().coeffs[0].re;
        let gamma = 0.577_215_664_901_532_9;
        let gamma1 = -0.072_815_845_483_676_72;
        assert!((z - (1.0 / eps + gamma - gamma1 * eps)).abs() < 1e-4);
    }

    #[test]
    fn character_l_values_at_complex_points() {
        // L(s, χ₄) via the Hurwitz split against a long direct partial sum
        let g = build_group(4);
        let chi = all_characters(&g).into_iter().find(|c| !c.is_principal()).unwrap();
        let s = Complex64::new(1.2, 3.0);
        let jet = dirichlet_l_jet(Some(&chi), s, 1, 1e-12).unwrap();
        let mut direct = ComplexSum::new();
        let n_max = 4_000_000u64;
        for n in 1..=n_max {
            let v = chi.value(n);
            if v.norm() > 0.0 {
                direct.add(v * (-s * (n as f64).ln()).exp());
            }
        }
        // tail of an alternating-like series is below |s|·N^{−σ}
        let slack = s.norm() * (n_max as f64).powf(-1.2) * 4.0;
        assert!((jet.coeffs[0] - direct.value()).norm() < slack);
    }

    #[test]
    fn principal_character_has_removed_factors() {
        let chi0 = crate::characters::DirichletCharacter::principal(6);
        let s = c(3.0);
        let l = dirichlet_l_jet(Some(&chi0), s, 0, 1e-13).unwrap().coeffs[0].re;
        let direct: f64 = (1..200_000u64)
            .filter(|n| n % 2 != 0 && n % 3 != 0)
            .map(|n| (n as f64).powi(-3))
            .sum();
        assert!((l - direct).abs() < 1e-10);
    }

    #[test]
    fn sifted_mobius_is_inverse_of_sifted_zeta() {
        let tables = ArithmeticTables::build(1000).unwrap();
        let s = Complex64::new(1.5, 2.0);
        let one = EulerStructure::default();
        let mu = EulerStructure {
            inverse: true,
            ..Default::default()
        };
        let a = sifted_jet(&one, 10.0, s, 3, &tables, 1e-12).unwrap();
        let b = sifted_jet(&mu, 10.0, s, 3, &tables, 1e-12).unwrap();
        let prod = a.mul(&b);
        assert!((prod.coeffs[0] - c(1.0)).norm() < 1e-11);
        for k in 1..=3 {
            assert!(prod.coeffs[k].norm() < 1e-10);
        }
    }

    #[test]
    fn twist_shifts_the_argument() {
        let tables = ArithmeticTables::build(100).unwrap();
        let s = Complex64::new(1.4, 0.5);
        let twisted = EulerStructure {
            shift: 2.0,
            ..Default::default()
        };
        let a = sifted_jet(&twisted, 3.0, s, 0, &tables, 1e-12).unwrap();
        let b = sifted_jet(
            &EulerStructure::default(),
            3.0,
            s - Complex64::new(0.0, 2.0),
            0,
            &tables,
            1e-12,
        )
        .unwrap();
        assert_eq!(a.coeffs[0], b.coeffs[0]);
    }
}
