//! Real characters near `s = 1`: the partial-summation constants `γ_η`,
//! `γ′_η`, hyperbola-method convolutions of real primitive characters,
//! the positivity hypothesis `0 ≤ (1∗f)(n) ≤ τ₄(n)` for
//! `f = χ₁∗χ₂∗χ₁χ₂`, and `L(1, χ)` with a scan over conductors.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{dirichlet_convolve, gcd, is_prime, tau_r, ArithmeticTables};
use crate::characters::{build_group, real_characters, DirichletCharacter};
use crate::error::{Error, Result};
use crate::periodic::{log_power_tail, PeriodicPrefix};
use crate::sum::NeumaierSum;

/// Largest `η` the constants are defined for.
pub const ETA_MAX: f64 = 0.05;
/// Constant in the residual ceiling `C·B^{η−1}(1 + log B)`.
pub const IDENTITY_CONSTANT: f64 = 10.0;
/// Partial-summation depth for `L(1, χ)` tails.
pub const L1_LEVELS: usize = 6;
const L1_MAX_CUTOFF: u64 = 1 << 28;
/// Quadrature cutoff `U` for the constant integrals.
const QUAD_CUTOFF: u64 = 1 << 15;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EtaConstants {
    pub eta: f64,
    /// `1 − (1−η)∫₁^∞ {u}u^{η−2} du`.
    pub gamma_eta: f64,
    /// `∫₁^∞ {u}(1 − (1−η)log u)u^{η−2} du`.
    pub gamma_eta_prime: f64,
    /// Absolute error bound, shared by both constants.
    pub error: f64,
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((1.0 - x) / 2.0, w / 2.0));
    }
    out
}

/// `(∫₁^U {u}g₁, ∫₁^U {u}g₂)` by a composite rule over unit intervals.
fn fractional_integrals(eta: f64, nodes: &[(f64, f64)]) -> (f64, f64) {
    let mut i1 = NeumaierSum::new();
    let mut i2 = NeumaierSum::new();
    for n in 1..QUAD_CUTOFF {
        let (mut a1, mut a2) = (0.0, 0.0);
        for &(tau, w) in nodes {
            let u = n as f64 + tau;
            let g = u.powf(eta - 2.0);
            a1 += w * tau * g;
            a2 += w * tau * g * (1.0 - (1.0 - eta) * u.ln());
        }
        i1.add(a1);
        i2.add(a2);
    }
    (i1.value(), i2.value())
}

/// `γ_η` and `γ′_η` for `0 ≤ η ≤ 1/20`, with absolute error at most `1e−8`.
///
/// The integrals are summed unit interval by unit interval up to `U`; on
/// `[U, ∞)` the sawtooth `{u} − 1/2` is integrated by parts once more, which
/// leaves a remainder of at most `(1/12)∫_U^∞ |g′|`.
pub fn eta_constants(eta: f64) -> Result<EtaConstants> {
    if !(0.0..=ETA_MAX).contains(&eta) {
        return Err(Error::Parameter(format!("eta = {eta} outside [0, 1/20]")));
    }
    let (c1, c2) = fractional_integrals(eta, &gauss_legendre(10));
    let (d1, d2) = fractional_integrals(eta, &gauss_legendre(12));
    let quad_err = (c1 - d1).abs().max((c2 - d2).abs());

    let u = QUAD_CUTOFF as f64;
    let g1 = u.powf(eta - 2.0);
    let g2 = g1 * (1.0 - (1.0 - eta) * u.ln());
    let int1 = u.powf(eta - 1.0) / (1.0 - eta);
    let int2 = int1 - (1.0 - eta) * log_power_tail(1, 2.0 - eta, u);
    let tail1 = int1 / 2.0 - g1 / 12.0;
    let tail2 = int2 / 2.0 - g2 / 12.0;
    let rem1 = u.powf(eta - 2.0) / 12.0;
    let rem2 = (3.0 * log_power_tail(0, 3.0 - eta, u) + 2.0 * log_power_tail(1, 3.0 - eta, u)) / 12.0;

    let i1 = d1 + tail1;
    let i2 = d2 + tail2;
    Ok(EtaConstants {
        eta,
        gamma_eta: 1.0 - (1.0 - eta) * i1,
        gamma_eta_prime: i2,
        error: quad_err + rem1.max(rem2) + 1e-14,
    })
}

/// `(e^x − 1)/x`, equal to 1 at 0.
fn phi1(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.exp_m1() / x
    }
}

/// `(x e^x − e^x + 1)/x²`, equal to 1/2 at 0.
fn phi2(x: f64) -> f64 {
    if x.abs() < 0.05 {
        // Σ (k+1) x^k/(k+2)!
        let mut term = 0.5;
        let mut acc = 0.0;
        for k in 0..12 {
            acc += (k + 1) as f64 * term;
            term *= x / (k + 3) as f64;
        }
        acc
    } else {
        (x * x.exp() - x.exp_m1()) / (x * x)
    }
}

/// `(B^η − 1)/η`, with limit `log B`.
pub fn harmonic_main(eta: f64, b: f64) -> f64 {
    let l = b.ln();
    l * phi1(eta * l)
}

/// `B^η log B/η − (B^η − 1)/η²`, with limit `log² B/2`.
pub fn log_harmonic_main(eta: f64, b: f64) -> f64 {
    let l = b.ln();
    l * l * phi2(eta * l)
}

/// `g_x(a) = Σ_{b≤x/a} log(ab)/b^{1−η}` up to its error term, in the form
/// that stays finite at `η = 0`.
pub fn g_x(x: f64, a: f64, c: &EtaConstants) -> f64 {
    let lx = (x / a).ln();
    let eta = c.eta;
    a.ln() * (lx * phi1(eta * lx) + c.gamma_eta) + lx * lx * phi2(eta * lx) + c.gamma_eta_prime
}

/// The same quantity regrouped by powers of `1/η`; needs `η > 0`.
pub fn g_x_expanded(x: f64, a: f64, c: &EtaConstants) -> f64 {
    let eta = c.eta;
    let r = (x / a).powf(eta);
    x.ln() * r / eta + a.ln() * (c.gamma_eta - 1.0 / eta) - (r - 1.0) / (eta * eta) + c.gamma_eta_prime
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IdentityResiduals {
    pub eta: f64,
    pub b: u64,
    /// `|Σ_{b≤B} b^{η−1} − (B^η−1)/η − γ_η|`.
    pub residual_harmonic: f64,
    /// `|Σ_{b≤B} log b·b^{η−1} − B^η log B/η + (B^η−1)/η² − γ′_η|`.
    pub residual_log: f64,
    /// `|Σ_{b≤B} log(2b)·b^{η−1} − g_{2B}(2)|`.
    pub residual_g: f64,
    /// `C·B^{η−1}(1 + log B)`.
    pub ceiling: f64,
}

impl IdentityResiduals {
    pub fn passed(&self) -> bool {
        let g_ceiling = self.ceiling * (1.0 + 2f64.ln());
        self.residual_harmonic <= self.ceiling && self.residual_log <= self.ceiling && self.residual_g <= g_ceiling
    }
}

/// Residuals of the two partial-summation expansions, and of `g_x(a)`, at `B`.
pub fn partial_sum_identity_check(eta: f64, b: u64) -> Result<IdentityResiduals> {
    if b < 2 {
        return Err(Error::Parameter(format!("B = {b} below 2")));
    }
    let c = eta_constants(eta)?;
    let mut s1 = NeumaierSum::new();
    let mut s2 = NeumaierSum::new();
    let mut s3 = NeumaierSum::new();
    let ln2 = 2f64.ln();
    for n in 1..=b {
        let l = (n as f64).ln();
        let w = ((eta - 1.0) * l).exp();
        s1.add(w);
        s2.add(l * w);
        s3.add((l + ln2) * w);
    }
    let bf = b as f64;
    Ok(IdentityResiduals {
        eta,
        b,
        residual_harmonic: (s1.value() - harmonic_main(eta, bf) - c.gamma_eta).abs(),
        residual_log: (s2.value() - log_harmonic_main(eta, bf) - c.gamma_eta_prime).abs(),
        residual_g: (s3.value() - g_x(2.0 * bf, 2.0, &c)).abs(),
        ceiling: IDENTITY_CONSTANT * bf.powf(eta - 1.0) * (1.0 + bf.ln()),
    })
}

/// A real primitive non-principal character with its values on one period.
#[derive(Debug, Clone)]
pub struct RealCharacter {
    pub character: DirichletCharacter,
    values: Vec<i8>,
}

impl RealCharacter {
    pub fn new(character: DirichletCharacter) -> Result<Self> {
        if !character.is_real() || character.is_principal() {
            return Err(Error::Domain(format!(
                "character {} mod {} is not real and non-principal",
                character.index(),
                character.modulus()
            )));
        }
        let values = (0..character.modulus())
            .map(|n| character.real_value(n).expect("real character"))
            .collect();
        Ok(Self { character, values })
    }

    pub fn modulus(&self) -> u64 {
        self.character.modulus()
    }

    #[inline]
    pub fn at(&self, n: u64) -> i8 {
        self.values[(n % self.modulus()) as usize]
    }

    /// Values `χ(0), …, χ(n)`.
    pub fn table(&self, n: u64) -> Vec<i64> {
        (0..=n).map(|k| self.at(k) as i64).collect()
    }

    /// `Σ_{n≤x} χ(n)`.
    pub fn partial_sum(&self, x: u64) -> i64 {
        let q = self.modulus();
        (x / q * q + 1..=x).map(|n| self.at(n) as i64).sum()
    }
}

/// Real primitive non-principal characters of conductor exactly `d`.
pub fn real_primitive_characters(d: u64) -> Vec<RealCharacter> {
    if d < 3 {
        return Vec::new();
    }
    real_characters(&build_group(d))
        .into_iter()
        .filter(|c| c.is_primitive() && !c.is_principal())
        .map(|c| RealCharacter::new(c).expect("filtered"))
        .collect()
}

/// All of them with conductor at most `qmax`, ordered by conductor then index.
pub fn real_primitive_up_to(qmax: u64) -> Vec<RealCharacter> {
    let per: Vec<Vec<RealCharacter>> = (3..=qmax).into_par_iter().map(real_primitive_characters).collect();
    per.into_iter().flatten().collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConvolutionSums {
    pub x: u64,
    pub q: u64,
    /// `Σ_{n≤x} (χ₁∗χ₂)(n)` by the hyperbola method.
    pub conv_sum: i64,
    /// `2q√x`.
    pub conv_ceiling: f64,
    /// `Σ_{n≤x} f(n)`.
    pub f_sum: i64,
    /// `x^{4/5}log x`, when `x ≥ q^{10}`.
    pub f_ceiling: Option<f64>,
    /// `|Σ f|/(q^{4/3}x^{2/3}log x)`.
    pub fitted_constant: f64,
}

impl ConvolutionSums {
    pub fn passed(&self) -> bool {
        (self.conv_sum.abs() as f64) <= self.conv_ceiling
            && self.f_ceiling.is_none_or(|c| (self.f_sum.abs() as f64) <= c)
    }
}

/// `f = χ₁∗χ₂∗(χ₁χ₂)` on `0..=n`.
pub fn convolution_f(chi1: &RealCharacter, chi2: &RealCharacter, n: u64) -> Vec<i64> {
    let a = chi1.table(n);
    let b = chi2.table(n);
    let ab: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    let h = dirichlet_convolve(&a, &b).expect("equal lengths");
    dirichlet_convolve(&h, &ab).expect("equal lengths")
}

/// Both partial sums at `x`, the first by the hyperbola method.
pub fn convolution_partial_sums(
    chi1: &RealCharacter,
    chi2: &RealCharacter,
    x: u64,
    tables: &ArithmeticTables,
) -> Result<ConvolutionSums> {
    tables.check_range("x", x as f64)?;
    let q = chi1.modulus().max(chi2.modulus());
    let r = x.isqrt();
    let mut conv = 0i64;
    for d in 1..=r {
        conv += chi1.at(d) as i64 * chi2.partial_sum(x / d);
        conv += chi2.at(d) as i64 * chi1.partial_sum(x / d);
    }
    conv -= chi1.partial_sum(r) * chi2.partial_sum(r);
    let f = convolution_f(chi1, chi2, x);
    let f_sum: i64 = f.iter().skip(1).sum();
    let xf = x as f64;
    let f_ceiling = (x >= 1 && (q as f64).powi(10) <= xf).then(|| xf.powf(0.8) * xf.ln());
    let scale = (q as f64).powf(4.0 / 3.0) * xf.powf(2.0 / 3.0) * xf.ln();
    Ok(ConvolutionSums {
        x,
        q,
        conv_sum: conv,
        conv_ceiling: 2.0 * q as f64 * xf.sqrt(),
        f_sum,
        f_ceiling,
        fitted_constant: if scale > 0.0 { f_sum.abs() as f64 / scale } else { 0.0 },
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Counterexample {
    pub n: u64,
    pub one_star_f: i64,
    pub tau4: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Zerol1Report {
    pub q1: u64,
    pub index1: u64,
    pub q2: u64,
    pub index2: u64,
    pub nmax: u64,
    pub first_counterexample: Option<Counterexample>,
    /// `f(mn) = f(m)f(n)` held on every sampled coprime pair.
    pub multiplicative: bool,
}

impl Zerol1Report {
    pub fn passed(&self) -> bool {
        self.first_counterexample.is_none() && self.multiplicative
    }
}

/// Checks `0 ≤ (1∗f)(n) ≤ τ₄(n)` for `n ≤ nmax`, and multiplicativity of `f`
/// on coprime pairs with `mn ≤ nmax`.
pub fn zerol1_hypothesis_check(chi1: &RealCharacter, chi2: &RealCharacter, nmax: u64) -> Result<Zerol1Report> {
    if nmax < 1 {
        return Err(Error::Parameter("nmax must be positive".into()));
    }
    let f = convolution_f(chi1, chi2, nmax);
    let ones = vec![1i64; f.len()];
    let one_f = dirichlet_convolve(&ones, &f)?;
    let mut first = None;
    for n in 1..=nmax {
        let v = one_f[n as usize];
        let tau4 = tau_r(n, 4)?;
        if v < 0 || v as u64 > tau4 {
            first = Some(Counterexample { n, one_star_f: v, tau4 });
            break;
        }
    }
    let lim = nmax.isqrt().min(200);
    let multiplicative = (1..=lim).all(|m| {
        (1..=nmax / m)
            .filter(|&n| gcd(m, n) == 1)
            .all(|n| f[(m * n) as usize] == f[m as usize] * f[n as usize])
    });
    Ok(Zerol1Report {
        q1: chi1.modulus(),
        index1: chi1.character.index(),
        q2: chi2.modulus(),
        index2: chi2.character.index(),
        nmax,
        first_counterexample: first,
        multiplicative,
    })
}

/// Runs the check over all unordered pairs (equal ones included) of real
/// primitive characters with conductor at most `qmax`.
pub fn zerol1_sweep(qmax: u64, nmax: u64) -> Result<Vec<Zerol1Report>> {
    let chars = real_primitive_up_to(qmax);
    let pairs: Vec<(usize, usize)> = (0..chars.len())
        .flat_map(|i| (i..chars.len()).map(move |j| (i, j)))
        .collect();
    pairs
        .par_iter()
        .map(|&(i, j)| zerol1_hypothesis_check(&chars[i], &chars[j], nmax))
        .collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct L1Value {
    pub modulus: u64,
    pub conductor: u64,
    pub index: u64,
    /// `L(1, χ)`.
    pub value: f64,
    /// `L_q(1, χ) = L(1, χ)·Π_{p≤q}(1 − χ(p)/p)`.
    pub value_q: f64,
    /// Absolute error bound on `value`.
    pub error: f64,
    pub cutoff: u64,
}

/// `L(1, χ)` for real non-principal `χ`: the head `Σ_{n≤N} χ(n)/n` with `N`
/// a multiple of `q`, plus the partial-summation tail.
pub fn l1_real_character(chi: &DirichletCharacter, tol: f64) -> Result<L1Value> {
    let rc = RealCharacter::new(chi.clone())?;
    let q = rc.modulus();
    let values: Vec<Complex64> = rc.values.iter().map(|&v| Complex64::new(v as f64, 0.0)).collect();
    let prefix = PeriodicPrefix::new(&values, L1_LEVELS)?;
    let one = Complex64::new(1.0, 0.0);
    let rounding = |n: u64| 4.0 * f64::EPSILON * (1.0 + (n as f64).ln());
    let mut n = q * 1024u64.div_ceil(q);
    let (mut tail, mut err) = prefix.tail(n, one, &[one]);
    while err + rounding(n) > tol {
        if n * 2 > L1_MAX_CUTOFF || rounding(n) > tol {
            return Err(Error::ToleranceUnreachable {
                requested: tol,
                achievable: err + rounding(n),
            });
        }
        n *= 2;
        (tail, err) = prefix.tail(n, one, &[one]);
    }
    let head: NeumaierSum = (1..=n)
        .filter_map(|k| match rc.at(k) {
            0 => None,
            v => Some(v as f64 / k as f64),
        })
        .collect();
    let value = head.value() + tail.re;
    let euler: f64 = (2..=q)
        .filter(|&p| is_prime(p))
        .map(|p| 1.0 - rc.at(p) as f64 / p as f64)
        .product();
    Ok(L1Value {
        modulus: q,
        conductor: chi.conductor(),
        index: chi.index(),
        value,
        value_q: value * euler,
        error: err + rounding(n),
        cutoff: n,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SiegelRow {
    pub conductor: u64,
    pub index: u64,
    pub value: f64,
    pub error: f64,
    pub sqrt_q_value: f64,
}

/// Minimum of `q^ε·L(1, χ)` over conductors in `[lo, hi)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrendBand {
    pub epsilon: f64,
    pub lo: u64,
    pub hi: u64,
    pub min: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SiegelScan {
    pub qmax: u64,
    pub rows: Vec<SiegelRow>,
    pub all_positive: bool,
    pub min_sqrt_q_value: f64,
    pub argmin_conductor: u64,
    pub trend: Vec<TrendBand>,
}

pub const TREND_EPSILONS: [f64; 2] = [0.1, 0.5];

/// `L(1, χ)` for every real primitive non-principal `χ` of conductor `≤ qmax`.
pub fn siegel_scan(qmax: u64, tol: f64) -> Result<SiegelScan> {
    let chars = real_primitive_up_to(qmax);
    let rows: Vec<SiegelRow> = chars
        .par_iter()
        .map(|c| {
            let l = l1_real_character(&c.character, tol)?;
            Ok(SiegelRow {
                conductor: l.modulus,
                index: l.index,
                value: l.value,
                error: l.error,
                sqrt_q_value: (l.modulus as f64).sqrt() * l.value,
            })
        })
        .collect::<Result<_>>()?;
    let all_positive = rows.iter().all(|r| r.value - r.error > 0.0);
    let (min_sqrt_q_value, argmin_conductor) = rows
        .iter()
        .map(|r| (r.sqrt_q_value, r.conductor))
        .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a });
    let mut trend = Vec::new();
    for &epsilon in &TREND_EPSILONS {
        let mut lo = 2;
        while lo <= qmax {
            let hi = 2 * lo;
            let min = rows
                .iter()
                .filter(|r| (lo..hi).contains(&r.conductor))
                .map(|r| (r.conductor as f64).powf(epsilon) * r.value)
                .fold(f64::INFINITY, f64::min);
            if min.is_finite() {
                trend.push(TrendBand { epsilon, lo, hi, min });
            }
            lo = hi;
        }
    }
    Ok(SiegelScan {
        qmax,
        rows,
        all_positive,
        min_sqrt_q_value,
        argmin_conductor,
        trend,
    })
}
