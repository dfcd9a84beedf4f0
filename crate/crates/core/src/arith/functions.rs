use std::ops::{Add, Mul};

use super::factor::{factorize, Factorization};
use super::tables::ArithmeticTables;
use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

/// Whether [`tau_r`] should fail or saturate when the value leaves `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverflowMode {
    Exact,
    Approximate,
}

fn binomial_checked(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

fn binomial_f64(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// The r-fold divisor function `τ_r(n) = ∏ C(e_i + r − 1, r − 1)`.
pub fn tau_r(n: u64, r: u32) -> Result<u64> {
    if n == 0 {
        return Err(Error::Parameter(format!("tau_r needs n, r >= 1 (got n={n}, r={r})")));
    }
    tau_of(&factorize(n), r)
}

pub(crate) fn tau_of(f: &Factorization, r: u32) -> Result<u64> {
    let n = f.n;
    if n == 0 || r == 0 {
        return Err(Error::Parameter(format!("tau_r needs n, r >= 1 (got n={n}, r={r})")));
    }
    let r1 = r as u64 - 1;
    f.factors.iter().try_fold(1u64, |acc, &(_, e)| {
        binomial_checked(e as u64 + r1, r1)
            .and_then(|b| acc.checked_mul(b))
            .ok_or(Error::Overflow { n, r })
    })
}

/// `τ_r(n)` as a float; saturates to `f64::INFINITY` instead of failing.
pub fn tau_r_approx(n: u64, r: u32) -> f64 {
    let r1 = r.max(1) as u64 - 1;
    factorize(n.max(1))
        .factors
        .iter()
        .map(|&(_, e)| binomial_f64(e as u64 + r1, r1))
        .product()
}

pub fn tau_r_with(n: u64, r: u32, mode: OverflowMode) -> Result<f64> {
    match (tau_r(n, r), mode) {
        (Ok(v), _) => Ok(v as f64),
        (Err(Error::Overflow { .. }), OverflowMode::Approximate) => Ok(tau_r_approx(n, r)),
        (Err(e), _) => Err(e),
    }
}

/// `ψ(x) = Σ_{p^k ≤ x} log p`, grouped per prime: each `p ≤ x` contributes
/// `⌊log_p x⌋ · log p`.
pub fn chebyshev_psi(x: f64, tables: &ArithmeticTables) -> Result<f64> {
    tables.check_range("x", x)?;
    let mut acc = NeumaierSum::new();
    for &p in tables.primes_in(1.0, x) {
        let p = p as u64;
        let mut k = 0u32;
        let mut pk = p;
        loop {
            k += 1;
            match pk.checked_mul(p) {
                Some(next) if next as f64 <= x => pk = next,
                _ => break,
            }
        }
        acc.add(k as f64 * (p as f64).ln());
    }
    Ok(acc.value())
}

/// `θ(u) = Σ_{p ≤ u} log p`.
pub fn theta_sum(u: f64, tables: &ArithmeticTables) -> Result<f64> {
    tables.check_range("u", u)?;
    Ok(tables
        .primes_in(1.0, u)
        .iter()
        .map(|&p| (p as f64).ln())
        .collect::<NeumaierSum>()
        .value())
}

/// Dirichlet convolution of two arrays indexed by `n` (slot 0 ignored).
pub fn dirichlet_convolve<T>(f: &[T], g: &[T]) -> Result<Vec<T>>
where
    T: Copy + Default + Add<Output = T> + Mul<Output = T>,
{
    if f.len() != g.len() {
        return Err(Error::Parameter(format!(
            "convolution operands differ in length ({} vs {})",
            f.len(),
            g.len()
        )));
    }
    let len = f.len();
    let mut h = vec![T::default(); len];
    if len < 2 {
        return Ok(h);
    }
    let n_max = len - 1;
    for a in 1..=n_max {
        let fa = f[a];
        let mut ab = a;
        let mut b = 1;
        while ab <= n_max {
            h[ab] = h[ab] + fa * g[b];
            ab += a;
            b += 1;
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_tau(n: u64, r: u32) -> u64 {
        if r == 1 {
            return 1;
        }
        (1..=n)
            .filter(|d| n.is_multiple_of(*d))
            .map(|d| brute_tau(n / d, r - 1))
            .sum()
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau_r(12, 2).unwrap(), 6);
        assert_eq!(tau_r(997, 1).unwrap(), 1);
        assert_eq!(tau_r(1, 7).unwrap(), 1);
        // ordered 4-factorizations of 8, counted by enumeration
        assert_eq!(brute_tau(8, 4), 20);
        assert_eq!(tau_r(8, 4).unwrap(), 20);
    }

    #[test]
    fn tau_matches_enumeration() {
        for n in 1..200 {
            for r in 1..5 {
                assert_eq!(tau_r(n, r).unwrap(), brute_tau(n, r), "n={n} r={r}");
            }
        }
    }

    #[test]
    fn tau_overflow_policy() {
        let n = 1u64 << 62;
        assert!(matches!(tau_r(n, 40), Err(Error::Overflow { .. })));
        let approx = tau_r_with(n, 40, OverflowMode::Approximate).unwrap();
        assert!(approx > u64::MAX as f64);
        assert!(tau_r_with(n, 40, OverflowMode::Exact).is_err());
    }

    #[test]
    fn psi_and_theta_small() {
        let t = ArithmeticTables::build(100).unwrap();
        assert_eq!(chebyshev_psi(1.0, &t).unwrap(), 0.0);
        let expect = 3.0 * 2f64.ln() + 2.0 * 3f64.ln() + 5f64.ln() + 7f64.ln();
        assert!((chebyshev_psi(10.0, &t).unwrap() - expect).abs() < 1e-12);
        assert_eq!(theta_sum(1.5, &t).unwrap(), 0.0);
        let th = 2f64.ln() + 3f64.ln() + 5f64.ln() + 7f64.ln();
        assert!((theta_sum(10.0, &t).unwrap() - th).abs() < 1e-12);
        assert!(chebyshev_psi(101.0, &t).is_err());
    }

    #[test]
    fn psi_matches_per_n_sum() {
        let t = ArithmeticTables::build(10_000).unwrap();
        for x in [2.0, 17.5, 1000.0, 9999.0] {
            let direct: f64 = (1..=x as u64).map(|n| t.mangoldt(n)).sum();
            assert!((chebyshev_psi(x, &t).unwrap() - direct).abs() < 1e-9);
        }
    }

    #[test]
    fn convolution_identities() {
        let t = ArithmeticTables::build(500).unwrap();
        let n = 500usize;
        let ones: Vec<i64> = (0..=n).map(|i| (i > 0) as i64).collect();
        let mu: Vec<i64> = (0..=n)
            .map(|i| if i == 0 { 0 } else { t.mobius(i as u64) as i64 })
            .collect();
        let e = dirichlet_convolve(&ones, &mu).unwrap();
        assert!(e.iter().enumerate().skip(1).all(|(i, &v)| v == (i == 1) as i64));

        let tau = dirichlet_convolve(&ones, &ones).unwrap();
        for i in 1..=n {
            assert_eq!(tau[i] as u64, tau_r(i as u64, 2).unwrap());
        }

        let onef: Vec<f64> = ones.iter().map(|&v| v as f64).collect();
        let lam: Vec<f64> = (0..=n)
            .map(|i| if i == 0 { 0.0 } else { t.mangoldt(i as u64) })
            .collect();
        let logs = dirichlet_convolve(&onef, &lam).unwrap();
        for i in 1..=n {
            assert!((logs[i] - (i as f64).ln()).abs() < 1e-12);
        }
        assert!(dirichlet_convolve(&onef, &lam[..10]).is_err());
    }
}
