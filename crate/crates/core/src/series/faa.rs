//! Higher derivatives of `F'/F` from the derivatives of `F`, by the
//! partition-sum identity
//!
//! `(−F'/F)^{(k−1)} = k! Σ_{a₁+2a₂+⋯+ka_k=k} ((a₁+⋯+a_k−1)!/(a₁!⋯a_k!)) Π_j (−F^{(j)}/(j!F))^{a_j}`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default floor below which `|F(s)|` counts as zero.
pub const ZERO_FLOOR: f64 = 1e-12;

fn factorial(n: u32) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Calls `visit(a)` for every `(a₁, …, a_k)` with `Σ j·a_j = k`.
pub fn for_each_partition_tuple(k: u32, mut visit: impl FnMut(&[u32])) {
    fn rec(j: u32, remaining: u32, a: &mut Vec<u32>, visit: &mut dyn FnMut(&[u32])) {
        if j == 0 {
            if remaining == 0 {
                visit(a);
            }
            return;
        }
        for count in 0..=remaining / j {
            a[j as usize - 1] = count;
            rec(j - 1, remaining - count * j, a, visit);
        }
        a[j as usize - 1] = 0;
    }
    let mut a = vec![0u32; k as usize];
    rec(k, k, &mut a, &mut visit);
}

fn binomial_u128(n: u32, k: u32) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `Σ (a₁+⋯+a_k)!/(a₁!⋯a_k!)` over the tuples with `Σ j·a_j = k`, which
/// counts ordered partitions of `k`.
pub fn ordered_partition_count(k: u32) -> Result<u64> {
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    if k > 62 {
        return Err(Error::Parameter(format!("k = {k} overflows the 64-bit count (max 62)")));
    }
    let mut total: u128 = 0;
    for_each_partition_tuple(k, |a| {
        let mut n = 0u32;
        let mut multinomial: u128 = 1;
        for &aj in a {
            n += aj;
            multinomial *= binomial_u128(n, aj);
        }
        total += multinomial;
    });
    u64::try_from(total).map_err(|_| Error::Parameter(format!("count for k = {k} overflows")))
}

/// Derivatives `F^{(0)}(s), …, F^{(k)}(s)` together with the scale `M` of the
/// bound `|F^{(j)}(s)| ≤ j!·M^j`.
#[derive(Debug, Clone, Serialize)]
pub struct DerivativeBundle {
    pub k: usize,
    #[serde(skip)]
    pub values: Vec<Complex64>,
    pub errors: Vec<f64>,
    pub m: f64,
}

impl DerivativeBundle {
    pub fn new(values: Vec<Complex64>, errors: Vec<f64>) -> Self {
        let k = values.len() - 1;
        let m = (1..=k)
            .map(|j| (values[j].norm() / factorial(j as u32)).powf(1.0 / j as f64))
            .fold(1.0, f64::max);
        Self { k, values, errors, m }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FaaResult {
    /// `(F'/F)^{(k−1)}(s)`.
    #[serde(skip)]
    pub value: Complex64,
    /// `(k!/2)·(2M/min{|F(s)|, 1})^k`.
    pub bound: f64,
    pub m: f64,
}

/// `(F'/F)^{(k−1)}(s)` from a bundle with `k ≥ 1` derivatives.
pub fn faa_log_derivative(bundle: &DerivativeBundle, floor: f64) -> Result<FaaResult> {
    let k = bundle.k as u32;
    if k == 0 {
        return Err(Error::Parameter("need at least one derivative".into()));
    }
    let f0 = bundle.values[0];
    if f0.norm() < floor {
        return Err(Error::ZeroDenominator(f0.norm()));
    }
    let ratios: Vec<Complex64> = (1..=k as usize)
        .map(|j| -bundle.values[j] / (factorial(j as u32) * f0))
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for_each_partition_tuple(k, |a| {
        let total: u32 = a.iter().sum();
        let mut weight = factorial(total - 1);
        let mut term = Complex64::new(1.0, 0.0);
        for (j, &aj) in a.iter().enumerate() {
            if aj > 0 {
                weight /= factorial(aj);
                term *= ratios[j].powu(aj);
            }
        }
        acc += term * weight;
    });
    let value = -acc * factorial(k);
    let bound = factorial(k) / 2.0 * (2.0 * bundle.m / f0.norm().min(1.0)).powi(k as i32);
    Ok(FaaResult {
        value,
        bound,
        m: bundle.m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    /// `G^{(n)}` for `G = F'/F` from `F^{(n+1)} = Σ_i C(n,i) G^{(i)} F^{(n−i)}`.
    fn quotient_rule(f: &[Complex64]) -> Vec<Complex64> {
        let k = f.len() - 1;
        let mut g: Vec<Complex64> = Vec::new();
        for n in 0..k {
            let mut rhs = f[n + 1];
            for (i, gi) in g.iter().enumerate() {
                rhs -= *gi * f[n - i] * binomial_u128(n as u32, i as u32) as f64;
            }
            g.push(rhs / f[0]);
        }
        g
    }

    #[test]
    fn partition_counts() {
        assert_eq!(ordered_partition_count(1).unwrap(), 1);
        assert_eq!(ordered_partition_count(3).unwrap(), 4);
        assert_eq!(ordered_partition_count(62).unwrap(), 1 << 61);
        assert!(ordered_partition_count(63).is_err());
        assert!(ordered_partition_count(0).is_err());
    }

    #[test]
    fn five_as_one_plus_two_twos() {
        let mut weight = None;
        for_each_partition_tuple(5, |a| {
            if a == [1, 2, 0, 0, 0] {
                let n: u32 = a.iter().sum();
                weight = Some(factorial(n) / (factorial(1) * factorial(2)));
            }
        });
        assert_eq!(weight, Some(3.0));
    }

    #[test]
    fn exponential_profile() {
        for k in 1..=8usize {
            let b = DerivativeBundle::new(vec![c(2.5); k + 1], vec![0.0; k + 1]);
            let r = faa_log_derivative(&b, ZERO_FLOOR).unwrap();
            let expect = if k == 1 { 1.0 } else { 0.0 };
            assert!((r.value - c(expect)).norm() < 1e-9, "k={k}: {}", r.value);
        }
    }

    #[test]
    fn geometric_profile() {
        // F = 1/(1−s) at 0: F^{(j)} = j!, (F'/F)^{(k−1)} = (k−1)!
        for k in 1..=10usize {
            let vals: Vec<Complex64> = (0..=k).map(|j| c(factorial(j as u32))).collect();
            let r = faa_log_derivative(&DerivativeBundle::new(vals, vec![0.0; k + 1]), ZERO_FLOOR).unwrap();
            let expect = factorial(k as u32 - 1);
            assert!((r.value.re - expect).abs() < 1e-9 * expect);
            assert!(r.value.norm() <= r.bound);
        }
    }

    #[test]
    fn zero_floor() {
        let b = DerivativeBundle::new(vec![c(1e-13), c(1.0)], vec![0.0; 2]);
        assert!(matches!(
            faa_log_derivative(&b, ZERO_FLOOR),
            Err(Error::ZeroDenominator(_))
        ));
    }

    #[test]
    fn matches_quotient_rule_on_random_profiles() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let k = rng.random_range(1..=7usize);
            let vals: Vec<Complex64> = (0..=k)
                .map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
                .collect();
            if vals[0].norm() < 0.1 {
                continue;
            }
            let b = DerivativeBundle::new(vals.clone(), vec![0.0; k + 1]);
            let r = faa_log_derivative(&b, ZERO_FLOOR).unwrap();
            let oracle = quotient_rule(&vals)[k - 1];
            assert!((r.value - oracle).norm() <= 1e-9 * oracle.norm().max(1.0));
            assert!(r.value.norm() <= r.bound * (1.0 + 1e-12));
        }
    }
}
