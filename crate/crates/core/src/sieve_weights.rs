//! Upper and lower sieve weights `λ^±` of level `D = y^u` from truncated
//! inclusion-exclusion (Brun's pure sieve).
//!
//! `λ⁺(d) = μ(d)` on squarefree `y`-smooth `d ≤ D` with `ω(d) ≤ 2m`, and
//! `λ⁻(d) = μ(d)` with `ω(d) ≤ 2m − 1`, where `m = max(1, ⌊u/2⌋)`. Since the
//! truncated alternating sums `Σ_{i≤K} (−1)^i C(r, i)` are `≥ 0` for even `K`
//! and `≤ 0` for odd `K`, `(λ^±∗1)` sandwich the indicator of `P⁻(n) > y`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{ArithmeticTables, INFINITE_PRIME};
use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

#[derive(Debug, Clone, Serialize)]
pub struct SieveWeights {
    pub y: f64,
    pub u: f64,
    /// Level `D = y^u`.
    pub level: f64,
    pub m: u32,
    pub lambda_plus: BTreeMap<u64, i8>,
    pub lambda_minus: BTreeMap<u64, i8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl SieveWeights {
    pub fn weights(&self, sign: Sign) -> &BTreeMap<u64, i8> {
        match sign {
            Sign::Plus => &self.lambda_plus,
            Sign::Minus => &self.lambda_minus,
        }
    }

    /// `(λ∗1)(n) = Σ_{d|n} λ(d)`, summed over the squarefree `y`-smooth
    /// divisors of `n` (the only ones that can carry weight).
    pub fn convolve_one(&self, sign: Sign, n: u64, tables: &ArithmeticTables) -> i64 {
        let small: Vec<u64> = tables.factorize(n).primes().filter(|&p| p as f64 <= self.y).collect();
        let weights = self.weights(sign);
        let mut total = 0i64;
        for mask in 0u32..(1 << small.len()) {
            let d: u64 = small
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| p)
                .product();
            total += *weights.get(&d).unwrap_or(&0) as i64;
        }
        total
    }
}

/// Builds `λ^±` for `y ≥ 2`, `u ≥ 2`.
pub fn build_weights(y: f64, u: f64, tables: &ArithmeticTables) -> Result<SieveWeights> {
    if !(u >= 2.0) {
        return Err(Error::Parameter(format!("sieve level exponent u = {u} below 2")));
    }
    if !(y >= 2.0) {
        return Err(Error::Parameter(format!("sifting bound y = {y} below 2")));
    }
    tables.check_range("y", y)?;
    let level = y.powf(u);
    let m = ((u / 2.0).floor() as u32).max(1);
    let primes: Vec<u64> = tables.primes_in(1.0, y).iter().map(|&p| p as u64).collect();
    let mut lambda_plus = BTreeMap::new();
    let mut lambda_minus = BTreeMap::new();
    // depth-first over increasing primes
    let mut stack: Vec<(u64, usize, u32)> = vec![(1, 0, 0)];
    while let Some((d, next, omega)) = stack.pop() {
        let mu = if omega % 2 == 0 { 1 } else { -1 };
        lambda_plus.insert(d, mu);
        if omega < 2 * m {
            lambda_minus.insert(d, mu);
        }
        if omega == 2 * m {
            continue;
        }
        for (i, &p) in primes.iter().enumerate().skip(next) {
            match d.checked_mul(p) {
                Some(dp) if dp as f64 <= level => stack.push((dp, i + 1, omega + 1)),
                _ => break,
            }
        }
    }
    Ok(SieveWeights {
        y,
        u,
        level,
        m,
        lambda_plus,
        lambda_minus,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichViolation {
    pub n: u64,
    pub minus: i64,
    pub indicator: i64,
    pub plus: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub y: f64,
    pub u: f64,
    pub n_max: u64,
    pub checked: u64,
    pub sifted: u64,
    pub violations: Vec<SandwichViolation>,
}

impl SandwichReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `(λ⁻∗1)(n) ≤ [P⁻(n) > y] ≤ (λ⁺∗1)(n)` for `n ≤ n_max`, with both
/// sides equal to 1 on the sifted set. Keeps at most 20 violations.
pub fn verify_sandwich(weights: &SieveWeights, n_max: u64, tables: &ArithmeticTables) -> Result<SandwichReport> {
    tables.check_range("n_max", n_max as f64)?;
    let results: Vec<(bool, Option<SandwichViolation>)> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let spf = tables.spf(n);
            let sifted = spf == INFINITE_PRIME || spf as f64 > weights.y;
            let indicator = sifted as i64;
            let plus = weights.convolve_one(Sign::Plus, n, tables);
            let minus = weights.convolve_one(Sign::Minus, n, tables);
            let ok = if sifted {
                plus == 1 && minus == 1
            } else {
                minus <= 0 && plus >= 0
            };
            let bad = (!ok).then_some(SandwichViolation {
                n,
                minus,
                indicator,
                plus,
            });
            (sifted, bad)
        })
        .collect();
    let sifted = results.iter().filter(|(s, _)| *s).count() as u64;
    let violations = results.into_iter().filter_map(|(_, v)| v).take(20).collect();
    Ok(SandwichReport {
        y: weights.y,
        u: weights.u,
        n_max,
        checked: n_max,
        sifted,
        violations,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MeanValue {
    /// `Σ_d λ(d)g(d)/d`.
    pub sum: f64,
    /// `Π_{p≤y} (1 − g(p)/p)`.
    pub product: f64,
    pub ratio: f64,
    /// `|ratio − 1|·e^u`, the fitted constant of the `O(e^{−u})` term.
    pub fitted_constant: f64,
}

/// Both sides of the mean-value estimate for `g` given on primes.
pub fn mean_value(
    weights: &SieveWeights,
    g: impl Fn(u64) -> f64,
    sign: Sign,
    tables: &ArithmeticTables,
) -> Result<MeanValue> {
    let primes: Vec<u64> = tables.primes_in(1.0, weights.y).iter().map(|&p| p as u64).collect();
    let gp: BTreeMap<u64, f64> = primes.iter().map(|&p| (p, g(p))).collect();
    if let Some((p, v)) = gp.iter().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Domain(format!("g({p}) = {v} outside [0, 1]")));
    }
    let mut sum = NeumaierSum::new();
    for (&d, &lambda) in weights.weights(sign) {
        let gd: f64 = tables.factorize(d).primes().map(|p| gp[&p]).product();
        sum.add(lambda as f64 * gd / d as f64);
    }
    let product: f64 = primes.iter().map(|p| 1.0 - gp[p] / *p as f64).product();
    let ratio = sum.value() / product;
    Ok(MeanValue {
        sum: sum.value(),
        product,
        ratio,
        fitted_constant: (ratio - 1.0).abs() * weights.u.exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    fn tables() -> &'static ArithmeticTables {
        static T: OnceLock<ArithmeticTables> = OnceLock::new();
        T.get_or_init(|| ArithmeticTables::build(100_000).unwrap())
    }

    #[test]
    fn single_prime_is_exact() {
        let w = build_weights(2.0, 2.0, tables()).unwrap();
        assert_eq!(w.lambda_plus, BTreeMap::from([(1, 1), (2, -1)]));
        for n in 1..100u64 {
            assert_eq!(w.convolve_one(Sign::Plus, n, tables()), (n % 2) as i64);
        }
    }

    #[test]
    fn one_is_always_sifted() {
        for (y, u) in [(5.0, 2.0), (30.0, 4.0)] {
            let w = build_weights(y, u, tables()).unwrap();
            assert_eq!(w.convolve_one(Sign::Plus, 1, tables()), 1);
            assert_eq!(w.convolve_one(Sign::Minus, 1, tables()), 1);
        }
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(build_weights(10.0, 1.5, tables()), Err(Error::Parameter(_))));
        assert!(matches!(build_weights(1.0, 3.0, tables()), Err(Error::Parameter(_))));
    }

    #[test]
    fn support_and_parity() {
        for y in [5.0, 10.0, 30.0] {
            for u in [2.0, 3.0, 4.0] {
                let w = build_weights(y, u, tables()).unwrap();
                for (sign, cap) in [(Sign::Plus, 2 * w.m), (Sign::Minus, 2 * w.m - 1)] {
                    for (&d, &l) in w.weights(sign) {
                        let f = tables().factorize(d);
                        assert!(f.is_squarefree());
                        assert!(f.primes().all(|p| p as f64 <= y));
                        assert!(d as f64 <= w.level);
                        assert!(f.omega() as u32 <= cap);
                        assert_eq!(l as i32, if f.omega().is_multiple_of(2) { 1 } else { -1 });
                    }
                }
            }
        }
    }

    #[test]
    fn sandwich_y10_u3() {
        let w = build_weights(10.0, 3.0, tables()).unwrap();
        let r = verify_sandwich(&w, 100_000, tables()).unwrap();
        assert!(r.passed(), "{:?}", &r.violations[..r.violations.len().min(3)]);
        let direct = (1..=100_000u64)
            .filter(|&n| n % 2 != 0 && n % 3 != 0 && n % 5 != 0 && n % 7 != 0)
            .count();
        assert_eq!(r.sifted, direct as u64);
    }

    #[test]
    fn mean_values() {
        let w = build_weights(10.0, 4.0, tables()).unwrap();
        for sign in [Sign::Plus, Sign::Minus] {
            let zero = mean_value(&w, |_| 0.0, sign, tables()).unwrap();
            assert_eq!((zero.sum, zero.product, zero.ratio), (1.0, 1.0, 1.0));
            let one = mean_value(&w, |_| 1.0, sign, tables()).unwrap();
            assert!(one.ratio.is_finite());
        }
        let w = build_weights(30.0, 3.0, tables()).unwrap();
        let r = mean_value(&w, |p| 1.0 / p as f64, Sign::Plus, tables()).unwrap();
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
        assert!(matches!(
            mean_value(&w, |_| 1.5, Sign::Plus, tables()),
            Err(Error::Domain(_))
        ));
    }
}
