//! Exact sums of roots of unity, reduced modulo the cyclotomic polynomial.

use std::collections::HashMap;

/// Integer coefficients of `Φ_n`, lowest degree first.
pub fn cyclotomic_poly(n: u64) -> Vec<i64> {
    let mut memo = HashMap::new();
    cyclo(n, &mut memo)
}

fn cyclo(n: u64, memo: &mut HashMap<u64, Vec<i64>>) -> Vec<i64> {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    // X^n − 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        let den = cyclo(d, memo);
        num = exact_div(&num, &den);
    }
    memo.insert(n, num.clone());
    num
}

/// Quotient of `num / den` for monic `den` dividing `num` exactly.
fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let mut quot = vec![0i64; rem.len() - dn];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// Element of `ℤ[ζ_L]` in the power basis `1, ζ, …, ζ^{φ(L)−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicInt {
    pub order: u64,
    pub coeffs: Vec<i64>,
}

impl CyclotomicInt {
    /// Reduces `Σ_k counts[k]·ζ_L^k` modulo `Φ_L`.
    pub fn from_counts(order: u64, counts: &[i64], phi_l: &[i64]) -> Self {
        assert_eq!(counts.len() as u64, order);
        let deg = phi_l.len() - 1;
        let mut c = counts.to_vec();
        for i in (deg..c.len()).rev() {
            let lead = c[i];
            if lead != 0 {
                for (j, &p) in phi_l.iter().enumerate() {
                    c[i - deg + j] -= lead * p;
                }
            }
        }
        c.truncate(deg);
        Self { order, coeffs: c }
    }

    /// `Some(n)` when the element is the rational integer `n`.
    pub fn as_integer(&self) -> Option<i64> {
        match self.coeffs.split_first() {
            None => Some(0),
            Some((&c0, rest)) => rest.iter().all(|&c| c == 0).then_some(c0),
        }
    }
}
