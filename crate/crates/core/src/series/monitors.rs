//! Empirical monitors for bounds whose constants are unspecified: each
//! reports ratios over a grid, and the sup is compared across grid
//! refinements.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{derivative_bundle, faa_log_derivative, vt, ComplexPoint, SeriesContext, ZERO_FLOOR};
use crate::arith::{gcd, ArithmeticTables};
use crate::characters::DirichletCharacter;
use crate::error::Result;
use crate::multfunc::MultiplicativeFunction;
use crate::sum::NeumaierSum;

#[derive(Debug, Clone, Serialize)]
pub struct MonitorGrid {
    pub sigmas: Vec<f64>,
    pub ts: Vec<f64>,
}

impl Default for MonitorGrid {
    fn default() -> Self {
        let mut sigmas: Vec<f64> = (2..=6).map(|e| 1.0 + 1.0 / (10f64.powi(e)).ln()).collect();
        sigmas.extend([1.01, 1.1, 1.5]);
        sigmas.sort_by(f64::total_cmp);
        Self {
            sigmas,
            ts: vec![-20.0, -5.0, -1.0, -0.1, 0.0, 0.1, 1.0, 5.0, 20.0],
        }
    }
}

fn with_midpoints(v: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * v.len());
    for (i, &x) in v.iter().enumerate() {
        out.push(x);
        if let Some(&next) = v.get(i + 1) {
            out.push((x + next) / 2.0);
        }
    }
    out
}

impl MonitorGrid {
    /// The grid with every gap bisected.
    pub fn refined(&self) -> Self {
        Self {
            sigmas: with_midpoints(&self.sigmas),
            ts: with_midpoints(&self.ts),
        }
    }

    pub fn points(&self) -> Vec<ComplexPoint> {
        self.sigmas
            .iter()
            .flat_map(|&sigma| self.ts.iter().map(move |&t| ComplexPoint { sigma, t }))
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct L1Row {
    pub f: String,
    pub y: f64,
    pub x: f64,
    pub t: f64,
    pub sigma: f64,
    pub log_abs_l: f64,
    pub prime_sum: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct L1Report {
    pub rows: Vec<L1Row>,
    pub sup: f64,
}

/// `|log|L_y(1 + 1/log x + it, f)| − Σ_{y<p≤x} Re(f(p)p^{−it})/p|` over the
/// grid `ts × xs`.
pub fn l1_residual(
    f: &MultiplicativeFunction,
    ts: &[f64],
    y: f64,
    xs: &[f64],
    tables: &ArithmeticTables,
) -> Result<L1Report> {
    let ctx = SeriesContext::new(f.clone(), y, tables)?;
    let cells: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ts.iter().map(move |&t| (x, t))).collect();
    let rows: Vec<L1Row> = cells
        .par_iter()
        .map(|&(x, t)| {
            tables.check_range("x", x)?;
            let sigma = 1.0 + 1.0 / x.ln();
            let s = ComplexPoint::new(sigma, t)?;
            let l = derivative_bundle(&ctx, s, 0)?.values[0];
            let prime_sum: NeumaierSum = tables
                .primes_in(y, x)
                .iter()
                .map(|&p| {
                    let p = p as u64;
                    let twist = Complex64::from_polar(1.0, -t * (p as f64).ln());
                    (f.at_prime(p) * twist).re / p as f64
                })
                .collect();
            let log_abs_l = l.norm().ln();
            Ok(L1Row {
                f: f.label().into(),
                y,
                x,
                t,
                sigma,
                log_abs_l,
                prime_sum: prime_sum.value(),
                residual: (log_abs_l - prime_sum.value()).abs(),
            })
        })
        .collect::<Result<_>>()?;
    let sup = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(L1Report { rows, sup })
}

#[derive(Debug, Clone, Serialize)]
pub struct LchiRow {
    pub sigma: f64,
    pub t: f64,
    pub y: f64,
    pub k: u32,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LchiReport {
    pub rows: Vec<LchiRow>,
    pub sup_ratio: f64,
    pub min_ratio: f64,
}

fn report(rows: Vec<LchiRow>) -> LchiReport {
    let sup_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    LchiReport {
        rows,
        sup_ratio,
        min_ratio,
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `|L_y^{(k)}(s,χ) + (−1)^{k+1}k!/(s−1)^{k+1}·δ(χ)φ(q)/q·Π_{p≤y,p∤q}(1−1/p)|`
/// against `k!(log(yqV_t))^{k+1}/log y`. With `y = None` the sifting bound
/// is `qV_t` at each point.
pub fn lchil1_monitor(
    chi: &DirichletCharacter,
    k: u32,
    grid: &MonitorGrid,
    y: Option<f64>,
    tables: &ArithmeticTables,
) -> Result<LchiReport> {
    let q = chi.modulus();
    let rows = grid
        .points()
        .par_iter()
        .map(|&s| {
            let y = y.unwrap_or(q as f64 * vt(s.t)).max(1.5);
            let ctx = SeriesContext::new(MultiplicativeFunction::character(chi.clone()), y, tables)?;
            let lk = derivative_bundle(&ctx, s, k)?.values[k as usize];
            let mut main = Complex64::new(0.0, 0.0);
            if chi.is_principal() {
                let density: f64 = tables
                    .primes_in(1.0, y)
                    .iter()
                    .filter(|&&p| gcd(p as u64, q) == 1)
                    .map(|&p| 1.0 - 1.0 / p as f64)
                    .product::<f64>()
                    * chi.group().order() as f64
                    / q as f64;
                let sign = if k.is_multiple_of(2) { -1.0 } else { 1.0 };
                main = sign * factorial(k) / (s.s() - 1.0).powu(k + 1) * density;
            }
            let lhs = (lk + main).norm();
            let rhs = factorial(k) * (y * q as f64 * vt(s.t)).ln().powi(k as i32 + 1) / y.ln();
            Ok(LchiRow {
                sigma: s.sigma,
                t: s.t,
                y,
                k,
                lhs,
                rhs,
                ratio: lhs / rhs,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(report(rows))
}

/// `|L_y(s, χ)|` with `y = max(y_min, qV_t)`; `lhs` carries the modulus and
/// `ratio` equals it (the lemma asserts `|L_y| ≍ 1`).
pub fn lchil2_monitor(
    chi: &DirichletCharacter,
    grid: &MonitorGrid,
    y_min: f64,
    tables: &ArithmeticTables,
) -> Result<LchiReport> {
    let q = chi.modulus() as f64;
    let rows = grid
        .points()
        .par_iter()
        .map(|&s| {
            let y = (q * vt(s.t)).max(y_min).max(1.5);
            let ctx = SeriesContext::new(MultiplicativeFunction::character(chi.clone()), y, tables)?;
            let l = derivative_bundle(&ctx, s, 0)?.values[0].norm();
            Ok(LchiRow {
                sigma: s.sigma,
                t: s.t,
                y,
                k: 0,
                lhs: l,
                rhs: 1.0,
                ratio: l,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(report(rows))
}

/// `|(L'/L)^{(k−1)}(s,χ) + δ(χ)(−1)^{k−1}(k−1)!/(s−1)^k|` against
/// `(k·log(qV_t)/(δ(χ) + (1−δ(χ))|L_{qV_t}(s,χ)|))^k`.
pub fn lchil3_monitor(
    chi: &DirichletCharacter,
    k: u32,
    grid: &MonitorGrid,
    tables: &ArithmeticTables,
) -> Result<LchiReport> {
    let q = chi.modulus() as f64;
    let delta = chi.delta() as f64;
    let f = MultiplicativeFunction::character(chi.clone());
    let rows = grid
        .points()
        .par_iter()
        .map(|&s| {
            let full = SeriesContext::new(f.clone(), 1.5, tables)?;
            let g = faa_log_derivative(&derivative_bundle(&full, s, k)?, ZERO_FLOOR)?.value;
            let sign = if (k - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
            let pole = delta * sign * factorial(k - 1) / (s.s() - 1.0).powu(k);
            let lhs = (g + pole).norm();
            let y = q * vt(s.t);
            let sifted = SeriesContext::new(f.clone(), y.max(1.5), tables)?;
            let ly = derivative_bundle(&sifted, s, 0)?.values[0].norm();
            let rhs = (k as f64 * y.ln() / (delta + (1.0 - delta) * ly)).powi(k as i32);
            Ok(LchiRow {
                sigma: s.sigma,
                t: s.t,
                y,
                k,
                lhs,
                rhs,
                ratio: lhs / rhs,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(report(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{all_characters, build_group};
    use std::sync::OnceLock;

    fn tables() -> &'static ArithmeticTables {
        static T: OnceLock<ArithmeticTables> = OnceLock::new();
        T.get_or_init(|| ArithmeticTables::build(100_000).unwrap())
    }

    #[test]
    fn default_grid_shape() {
        let g = MonitorGrid::default();
        assert_eq!(g.sigmas.len(), 8);
        assert_eq!(g.ts.len(), 9);
        assert_eq!(g.refined().sigmas.len(), 15);
        assert!(g.sigmas.iter().all(|&s| s > 1.0));
    }

    #[test]
    fn l1_with_empty_prime_window() {
        let r = l1_residual(&MultiplicativeFunction::one(), &[0.0], 1e4, &[1e4], tables()).unwrap();
        assert_eq!(r.rows[0].prime_sum, 0.0);
        assert!(r.sup.is_finite());
    }

    #[test]
    fn l1_mobius_and_real_character() {
        let r = l1_residual(&MultiplicativeFunction::mobius(), &[0.0], 2.0, &[1e4], tables()).unwrap();
        assert!(r.sup <= 3.0, "{}", r.sup);
        let chi = all_characters(&build_group(5))
            .into_iter()
            .find(|c| c.is_real() && !c.is_principal())
            .unwrap();
        let r = l1_residual(
            &MultiplicativeFunction::character(chi),
            &[0.0, 1.0, 5.0],
            2.0,
            &[1e5],
            tables(),
        )
        .unwrap();
        assert!(r.sup <= 3.0, "{}", r.sup);
    }

    #[test]
    fn lchil1_principal_mod_one_is_finite() {
        let grid = MonitorGrid {
            sigmas: vec![1.5],
            ts: vec![0.0],
        };
        let r = lchil1_monitor(&DirichletCharacter::principal(1), 0, &grid, Some(10.0), tables()).unwrap();
        assert!(r.sup_ratio.is_finite());
        // removing the pole leaves a bounded remainder
        assert!(r.rows[0].lhs < 5.0);
    }

    #[test]
    fn lchil2_mod_five_range() {
        let grid = MonitorGrid {
            sigmas: vec![1.01],
            ts: vec![0.5],
        };
        let chi = all_characters(&build_group(5))
            .into_iter()
            .find(|c| !c.is_principal())
            .unwrap();
        let r = lchil2_monitor(&chi, &grid, 0.0, tables()).unwrap();
        assert!(r.min_ratio > 0.1 && r.sup_ratio < 10.0);
    }

    #[test]
    fn lchil3_refinement_stable() {
        let chi = all_characters(&build_group(4))
            .into_iter()
            .find(|c| !c.is_principal())
            .unwrap();
        let coarse = MonitorGrid {
            sigmas: vec![1.05, 1.5],
            ts: vec![0.0, 5.0],
        };
        let a = lchil3_monitor(&chi, 2, &coarse, tables()).unwrap();
        let b = lchil3_monitor(&chi, 2, &coarse.refined(), tables()).unwrap();
        assert!(a.sup_ratio.is_finite() && b.sup_ratio <= 2.0 * a.sup_ratio);
    }
}
