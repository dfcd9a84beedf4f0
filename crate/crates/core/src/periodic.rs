//! Tails `Σ_{n>N} c(n)·w(n)` of series with periodic, mean-zero
//! coefficients, by repeated partial summation.
//!
//! With `S₀(u) = Σ_{N<n≤u} c(n)` and `S_{ℓ+1}(u) = ∫_N^u (S_ℓ − S̄_ℓ)`, where
//! `S̄_ℓ` is the mean over a period and `N` is a multiple of the period,
//!
//! `Σ_{n>N} c(n)w(n) = Σ_{ℓ<L} (−1)^ℓ S̄_ℓ w^{(ℓ)}(N) + R`,
//! `|R| ≤ sup|S_L| · ∫_N^∞ |w^{(L+1)}|`.
//!
//! Weights are `w(u) = u^{−s}·P(log u)` with `P` a complex polynomial.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Mean and sup data for the hierarchy `S₀, …, S_L` over one period.
#[derive(Debug, Clone)]
pub struct PeriodicPrefix {
    period: u64,
    means: Vec<Complex64>,
    sups: Vec<f64>,
}

/// `Γ(j+1, z) = j!·e^{−z}·Σ_{i≤j} z^i/i!` for integer `j ≥ 0`, `z ≥ 0`.
pub fn upper_gamma_int(j: u32, z: f64) -> f64 {
    let mut term = 1.0;
    let mut acc = 1.0;
    for i in 1..=j {
        term *= z / i as f64;
        acc += term;
    }
    let fact: f64 = (1..=j).map(|i| i as f64).product();
    fact * (-z).exp() * acc
}

/// `∫_N^∞ (log u)^j u^{−b} du` for `b > 1`.
pub fn log_power_tail(j: u32, b: f64, n: f64) -> f64 {
    let a = b - 1.0;
    upper_gamma_int(j, a * n.ln()) / a.powi(j as i32 + 1)
}

/// Polynomial `(−L)^k / k!` in `L`, lowest degree first.
pub fn log_derivative_weight(k: u32) -> Vec<Complex64> {
    let mut p = vec![Complex64::new(0.0, 0.0); k as usize + 1];
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    p[k as usize] = Complex64::new(if k.is_multiple_of(2) { 1.0 } else { -1.0 } / fact, 0.0);
    p
}

fn eval_poly(p: &[Complex64], x: f64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

/// `d/du [u^{−a}P(log u)] = u^{−a−1}·Q(log u)`; returns `Q = P' − a·P`.
fn differentiate(p: &[Complex64], a: Complex64) -> Vec<Complex64> {
    let mut q: Vec<Complex64> = p.iter().map(|&c| -a * c).collect();
    for (i, &c) in p.iter().enumerate().skip(1) {
        q[i - 1] += c * i as f64;
    }
    q
}

impl PeriodicPrefix {
    /// `values[r] = c(n)` for `n ≡ r (mod P)`; the coefficients must sum to
    /// zero over a period.
    pub fn new(values: &[Complex64], levels: usize) -> Result<Self> {
        let period = values.len();
        if period == 0 {
            return Err(Error::Parameter("empty period".into()));
        }
        let total: Complex64 = values.iter().sum();
        let scale: f64 = values.iter().map(|z| z.norm()).sum::<f64>().max(1.0);
        if total.norm() > 1e-9 * scale {
            return Err(Error::Domain(format!(
                "periodic coefficients have nonzero mean (sum {total})"
            )));
        }
        // piece[j] holds S_ℓ on [N+j, N+j+1) as a polynomial in τ ∈ [0, 1)
        let mut pieces: Vec<Vec<Complex64>> = Vec::with_capacity(period);
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..period {
            if j > 0 {
                s += values[j % period];
            }
            pieces.push(vec![s]);
        }
        let mut means = Vec::with_capacity(levels + 1);
        let mut sups = Vec::with_capacity(levels + 1);
        for level in 0..=levels {
            let mean: Complex64 = pieces
                .iter()
                .map(|p| {
                    p.iter()
                        .enumerate()
                        .map(|(i, &c)| c / (i + 1) as f64)
                        .sum::<Complex64>()
                })
                .sum::<Complex64>()
                / period as f64;
            let sup = pieces
                .iter()
                .map(|p| p[0].norm() + p[1..].iter().map(|c| c.norm()).sum::<f64>())
                .fold(0.0, f64::max);
            means.push(mean);
            sups.push(sup);
            if level == levels {
                break;
            }
            // integrate S_ℓ − S̄_ℓ
            let mut start = Complex64::new(0.0, 0.0);
            let mut next = Vec::with_capacity(period);
            for p in &pieces {
                let mut q = Vec::with_capacity(p.len() + 1);
                q.push(start);
                for (i, &c) in p.iter().enumerate() {
                    let c = if i == 0 { c - mean } else { c };
                    q.push(c / (i + 1) as f64);
                }
                start = q.iter().sum();
                next.push(q);
            }
            pieces = next;
        }
        Ok(Self {
            period: period as u64,
            means,
            sups,
        })
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn levels(&self) -> usize {
        self.means.len() - 1
    }

    /// `S̄_ℓ`.
    pub fn mean(&self, level: usize) -> Complex64 {
        self.means[level]
    }

    /// Upper bound for `sup |S_ℓ|`.
    pub fn sup(&self, level: usize) -> f64 {
        self.sups[level]
    }

    /// Tail `Σ_{n>N} c(n)·n^{−s}·P(log n)` and a bound on its error.
    /// `n` must be a positive multiple of the period and `Re s + levels > 0`.
    pub fn tail(&self, n: u64, s: Complex64, poly: &[Complex64]) -> (Complex64, f64) {
        assert!(
            n > 0 && n.is_multiple_of(self.period),
            "cutoff must be a multiple of the period"
        );
        let levels = self.levels();
        let nf = n as f64;
        let ln = nf.ln();
        // p is the polynomial of u^{s+ℓ}·w^{(ℓ)}(u)
        let mut p = poly.to_vec();
        let mut value = Complex64::new(0.0, 0.0);
        for l in 0..levels {
            let a = s + l as f64;
            let w = eval_poly(&p, ln) * (-a * ln).exp();
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            value += self.means[l] * w * sign;
            p = differentiate(&p, a);
        }
        let last = differentiate(&p, s + levels as f64);
        let b = s.re + levels as f64 + 1.0;
        let integral: f64 = last
            .iter()
            .enumerate()
            .map(|(i, c)| c.norm() * log_power_tail(i as u32, b, nf))
            .sum();
        (value, self.sups[levels] * integral)
    }
}
