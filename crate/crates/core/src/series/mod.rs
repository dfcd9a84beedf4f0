//! Sifted Dirichlet series `L_y(s, f) = Σ_{P⁻(n)>y} f(n)n^{−s}`, their
//! derivatives, logarithmic derivatives and bound monitors.

mod faa;
mod jet;
mod lfunc;
mod monitors;

use num_complex::Complex64;
use serde::Serialize;

pub use faa::{
    faa_log_derivative, for_each_partition_tuple, ordered_partition_count, DerivativeBundle, FaaResult, ZERO_FLOOR,
};
pub use jet::Jet;
pub use lfunc::{dirichlet_l_jet, euler_product_jet, periodic_series_jet, sifted_jet, zeta_jet, MAX_HEAD, TAIL_LEVELS};
pub use monitors::{
    l1_residual, lchil1_monitor, lchil2_monitor, lchil3_monitor, L1Report, L1Row, LchiReport, LchiRow, MonitorGrid,
};

use crate::arith::ArithmeticTables;
use crate::error::{Error, Result};
use crate::multfunc::MultiplicativeFunction;
use crate::periodic::log_power_tail;
use crate::sum::block_sum_complex;

/// `V_t = exp{(log(3+|t|))^{2/3}(log log(3+|t|))^{1/3}}`.
pub fn vt(t: f64) -> f64 {
    let l = (3.0 + t.abs()).ln();
    (l.powf(2.0 / 3.0) * l.ln().cbrt()).exp()
}

/// `s = σ + it` with `σ > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexPoint {
    pub sigma: f64,
    pub t: f64,
}

impl ComplexPoint {
    pub fn new(sigma: f64, t: f64) -> Result<Self> {
        if !(sigma > 1.0) || !t.is_finite() {
            return Err(Error::Domain(format!(
                "need sigma > 1 and finite t, got s = {sigma} + {t}i"
            )));
        }
        Ok(Self { sigma, t })
    }

    pub fn s(&self) -> Complex64 {
        Complex64::new(self.sigma, self.t)
    }
}

/// What to evaluate: `f`, the sifting bound `y`, the table, and the target
/// absolute tolerance for each reported derivative.
#[derive(Debug, Clone)]
pub struct SeriesContext<'a> {
    pub f: MultiplicativeFunction,
    pub y: f64,
    pub tables: &'a ArithmeticTables,
    pub tol: f64,
}

impl<'a> SeriesContext<'a> {
    pub fn new(f: MultiplicativeFunction, y: f64, tables: &'a ArithmeticTables) -> Result<Self> {
        if !(y >= 1.5) {
            return Err(Error::Parameter(format!("sifting bound y = {y} below 3/2")));
        }
        Ok(Self {
            f,
            y,
            tables,
            tol: 1e-10,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeriesValue {
    #[serde(skip)]
    pub value: Complex64,
    /// Bound on `|value − L_y^{(k)}(s, f)|`.
    pub certificate: f64,
    /// Last `n` summed directly.
    pub cutoff: u64,
}

/// `∫_N^∞ (log u)^k u^{−σ} du + (log N)^k N^{−σ}`, which dominates
/// `Σ_{n>N} (log n)^k n^{−σ}` once the summand decreases.
pub fn tail_certificate(sigma: f64, k: u32, n: u64) -> f64 {
    let nf = n as f64;
    log_power_tail(k, sigma, nf) + nf.ln().powi(k as i32) * nf.powf(-sigma)
}

/// `Σ_{n≤N, P⁻(n)>y} (−log n)^k f(n) n^{−s}` with its tail certificate.
pub fn evaluate_series_with_cutoff(ctx: &SeriesContext, s: ComplexPoint, k: u32, n: u64) -> Result<SeriesValue> {
    ctx.tables.check_range("cutoff", n as f64)?;
    let z = s.s();
    let value = block_sum_complex(n as usize, |i| {
        let m = i as u64 + 1;
        if m > 1 && (ctx.tables.spf(m) as f64) <= ctx.y {
            return Complex64::new(0.0, 0.0);
        }
        let ell = (m as f64).ln();
        ctx.f.evaluate(m, ctx.tables) * (-z * ell).exp() * (-ell).powi(k as i32)
    });
    Ok(SeriesValue {
        value,
        certificate: tail_certificate(s.sigma, k, n),
        cutoff: n,
    })
}

/// Direct summation of `L_y^{(k)}(s, f)` with `N` grown until the tail
/// certificate drops below `ctx.tol`.
pub fn evaluate_series(ctx: &SeriesContext, s: ComplexPoint, k: u32) -> Result<SeriesValue> {
    if k > 8 {
        return Err(Error::Parameter(format!("derivative order {k} above 8")));
    }
    let limit = ctx.tables.limit();
    let mut n = 64u64;
    // the summand (log n)^k n^{−σ} must be decreasing past N
    let turn = (k as f64 / s.sigma).exp().ceil() as u64;
    while n < turn || tail_certificate(s.sigma, k, n) > ctx.tol {
        if n >= limit {
            let certificate = tail_certificate(s.sigma, k, limit);
            return Err(Error::NonConvergence {
                sigma: s.sigma,
                certificate,
            });
        }
        n = (n * 2).min(limit);
    }
    evaluate_series_with_cutoff(ctx, s, k, n)
}

/// `L_y^{(j)}(s, f)` for `j = 0..=k`. Functions of the form `μ^a·χ·n^{iτ}`
/// use the analytic route of [`sifted_jet`] (fine for any `σ > 1`); others
/// fall back to direct summation.
pub fn derivative_bundle(ctx: &SeriesContext, s: ComplexPoint, k: u32) -> Result<DerivativeBundle> {
    if let Some(structure) = ctx.f.euler_structure() {
        let jet = sifted_jet(&structure, ctx.y, s.s(), k as usize, ctx.tables, ctx.tol)?;
        let errors = (0..=k as usize).map(|j| jet.derivative_error(j)).collect();
        return Ok(DerivativeBundle::new(jet.derivatives(), errors));
    }
    let mut values = Vec::new();
    let mut errors = Vec::new();
    for j in 0..=k {
        let v = evaluate_series(ctx, s, j)?;
        values.push(v.value);
        errors.push(v.certificate);
    }
    Ok(DerivativeBundle::new(values, errors))
}

/// `(L_y'/L_y)^{(k−1)}(s, f)` with the bound `(k!/2)(2M/min{|F|, 1})^k`.
pub fn log_derivative(ctx: &SeriesContext, s: ComplexPoint, k: u32) -> Result<FaaResult> {
    let bundle = derivative_bundle(ctx, s, k)?;
    faa_log_derivative(&bundle, ZERO_FLOOR)
}
