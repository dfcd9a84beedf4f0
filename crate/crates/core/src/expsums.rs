//! Oscillatory sums `Σ (n+u)^{it}` and sifted character sums
//! `Σ_{n≤x, P⁻(n)>y} χ(n)n^{it}`, summed directly.

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{gcd, ArithmeticTables};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::series::vt;
use crate::sum::{block_sum_complex, ComplexSum};

/// Constant in the exponent of the dyadic-sum ceiling.
pub const NIT_CONSTANT: f64 = 66852.0;
/// Constant in the exponent of the ceiling for full sums up to `x`.
pub const PRE4_CONSTANT: f64 = 185000.0;

/// Largest tolerated phase error `|t|·ulp(log n)`.
const PHASE_TOLERANCE: f64 = 1e-6;

/// `(n+u)^{it} = e^{it·log(n+u)}`.
#[inline]
fn twist(n: u64, u: f64, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, t * (n as f64 + u).ln())
}

fn ulp(x: f64) -> f64 {
    f64::from_bits(x.abs().to_bits() + 1) - x.abs()
}

/// Whether `e^{it·log m}` loses more than the phase tolerance for `m ≤ top`.
pub fn phase_warning(t: f64, top: f64) -> bool {
    t.abs() * ulp(top.ln()) > PHASE_TOLERANCE
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpSumQuery {
    pub n: u64,
    pub u: f64,
    pub t: f64,
}

impl ExpSumQuery {
    /// Requires `2 ≤ N ≤ t²` and `0 ≤ u ≤ 1`.
    pub fn new(n: u64, u: f64, t: f64) -> Result<Self> {
        if n < 2 || (n as f64) > t * t {
            return Err(Error::Parameter(format!("need 2 <= N <= t^2, got N={n}, t={t}")));
        }
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Parameter(format!("need 0 <= u <= 1, got {u}")));
        }
        Ok(Self { n, u, t })
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DyadicSum {
    pub n: u64,
    pub u: f64,
    pub t: f64,
    #[serde(skip)]
    pub value: Complex64,
    pub abs: f64,
    /// `N·exp{−(log N)³/(66852(log|t|)²)}`.
    pub ceiling: f64,
    pub margin: f64,
    pub phase_warning: bool,
}

pub fn nit_ceiling(n: f64, t: f64) -> f64 {
    let ln = n.ln();
    n * (-(ln * ln * ln) / (NIT_CONSTANT * t.abs().ln().powi(2))).exp()
}

/// `Σ_{lo<n≤hi} (n+u)^{it}`.
pub fn block_exp_sum(lo: u64, hi: u64, u: f64, t: f64) -> Complex64 {
    if hi <= lo {
        return Complex64::new(0.0, 0.0);
    }
    block_sum_complex((hi - lo) as usize, |i| twist(lo + 1 + i as u64, u, t))
}

/// `Σ_{N<n≤2N} (n+u)^{it}` with the dyadic ceiling.
pub fn dyadic_exp_sum(q: &ExpSumQuery) -> DyadicSum {
    let value = block_exp_sum(q.n, 2 * q.n, q.u, q.t);
    let ceiling = nit_ceiling(q.n as f64, q.t);
    DyadicSum {
        n: q.n,
        u: q.u,
        t: q.t,
        value,
        abs: value.norm(),
        ceiling,
        margin: ceiling - value.norm(),
        phase_warning: phase_warning(q.t, 2.0 * q.n as f64 + 1.0),
    }
}

/// `Σ_{n≤N−u} (n+u)^{it}` by direct summation.
pub fn prefix_exp_sum(n: u64, u: f64, t: f64) -> Complex64 {
    let top = (n as f64 - u).floor().max(0.0) as u64;
    block_exp_sum(0, top, u, t)
}

/// The same sum reassembled from the term `n = 1` and the blocks
/// `(2^j, 2^{j+1}]`, the last one cut at `N − u`.
pub fn prefix_exp_sum_dyadic(n: u64, u: f64, t: f64) -> Complex64 {
    let top = (n as f64 - u).floor().max(0.0) as u64;
    let mut acc = ComplexSum::new();
    if top >= 1 {
        acc.add(twist(1, u, t));
    }
    let mut m = 1u64;
    while m < top {
        let hi = (2 * m).min(top);
        acc.add(block_exp_sum(m, hi, u, t));
        m *= 2;
    }
    acc.value()
}

/// Dyadic samples `N = 2^j ≤ min(t², n_cap)` for each `t` and `u`.
pub fn nit_scan(ts: &[f64], us: &[f64], n_cap: u64) -> Result<Vec<DyadicSum>> {
    let mut out = Vec::new();
    for &t in ts {
        for &u in us {
            let top = (t * t).min(n_cap as f64);
            let mut n = 2u64;
            while (n as f64) <= top {
                out.push(dyadic_exp_sum(&ExpSumQuery::new(n, u, t)?));
                n *= 2;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct SiftedSum {
    pub modulus: u64,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    #[serde(skip)]
    pub value: Complex64,
    #[serde(skip)]
    pub main_term: Complex64,
    pub discrepancy: f64,
    /// `(x^{1−1/(30 log y)} + x^{1−1/(100 log V_t)})/log y`.
    pub error_shape: f64,
    pub ratio: f64,
    /// `x·exp{−(log x)³/(185000(log|t|)²)}`, reported only.
    pub pre4_ceiling: f64,
    /// Whether `x ≥ max{q⁴, V_t^{100}}`.
    pub in_range: bool,
}

/// `Σ_{n≤x, P⁻(n)>y} χ(n)n^{it}` with the main term
/// `δ(χ)φ(q)/q · x^{1+it}/(1+it) · Π_{p≤y, p∤q}(1 − 1/p)`.
pub fn sifted_character_sum(
    chi: &DirichletCharacter,
    t: f64,
    x: f64,
    y: f64,
    tables: &ArithmeticTables,
) -> Result<SiftedSum> {
    tables.check_range("x", x)?;
    if y < 2.0 {
        return Err(Error::Parameter(format!("need y >= 2, got {y}")));
    }
    let q = chi.modulus();
    let top = x.floor().max(0.0) as u64;
    let values = chi.period_values();
    let value = block_sum_complex(top as usize, |i| {
        let n = i as u64 + 1;
        if n > 1 && tables.spf(n) as f64 <= y {
            return Complex64::new(0.0, 0.0);
        }
        let c = values[(n % q) as usize];
        if t == 0.0 {
            c
        } else {
            c * twist(n, 0.0, t)
        }
    });
    let main_term = if chi.is_principal() {
        let y_in = y.min(tables.limit() as f64);
        let density: f64 = tables
            .primes_in(1.0, y_in)
            .iter()
            .filter(|&&p| gcd(p as u64, q) == 1)
            .map(|&p| 1.0 - 1.0 / p as f64)
            .product();
        let phi_over_q = chi.group().order() as f64 / q as f64;
        let s = Complex64::new(1.0, t);
        phi_over_q * density * (s * x.ln()).exp() / s
    } else {
        Complex64::new(0.0, 0.0)
    };
    let v = vt(t);
    let error_shape = (x.powf(1.0 - 1.0 / (30.0 * y.ln())) + x.powf(1.0 - 1.0 / (100.0 * v.ln()))) / y.ln();
    let discrepancy = (value - main_term).norm();
    let pre4_ceiling = if t.abs() > 1.0 {
        x * (-(x.ln().powi(3)) / (PRE4_CONSTANT * t.abs().ln().powi(2))).exp()
    } else {
        x
    };
    Ok(SiftedSum {
        modulus: q,
        t,
        x,
        y,
        value,
        main_term,
        discrepancy,
        error_shape,
        ratio: discrepancy / error_shape,
        pre4_ceiling,
        in_range: x >= (q as f64).powi(4).max(v.powi(100)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{all_characters, build_group};
    use proptest::prelude::*;

    #[test]
    fn query_validation() {
        assert!(ExpSumQuery::new(1, 0.0, 10.0).is_err());
        assert!(ExpSumQuery::new(101, 0.0, 10.0).is_err());
        assert!(ExpSumQuery::new(100, 1.5, 10.0).is_err());
        assert!(ExpSumQuery::new(100, 1.0, 10.0).is_ok());
    }

    #[test]
    fn dyadic_sum_at_n_100() {
        for u in [0.0, 1.0] {
            let r = dyadic_exp_sum(&ExpSumQuery::new(100, u, 1e4).unwrap());
            assert!(r.abs <= 100.0);
            assert!(r.margin > 0.0);
            assert!(!r.phase_warning);
            // oracle: plain loop
            let plain: Complex64 = (101..=200u64)
                .map(|n| Complex64::from_polar(1.0, 1e4 * (n as f64 + u).ln()))
                .sum();
            assert!((plain - r.value).norm() < 1e-10);
        }
    }

    #[test]
    fn prefix_sums() {
        assert_eq!(prefix_exp_sum(10, 0.5, 0.0), Complex64::new(9.0, 0.0));
        assert_eq!(prefix_exp_sum(10, 0.0, 0.0), Complex64::new(10.0, 0.0));
        let one = prefix_exp_sum(1, 0.0, 3.0);
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let a = prefix_exp_sum(10_000, 0.5, 100.0);
        let b = prefix_exp_sum_dyadic(10_000, 0.5, 100.0);
        assert!((a - b).norm() < 1e-8 * 10_000.0);
    }

    #[test]
    fn phase_warning_threshold() {
        assert!(!phase_warning(1e6, 2e6));
        assert!(phase_warning(1e12, 2e6));
    }

    #[test]
    fn sifted_sums() {
        let tables = ArithmeticTables::build(100_000).unwrap();
        let chi0 = DirichletCharacter::principal(1);
        let r = sifted_character_sum(&chi0, 0.0, 1000.0, 2.0, &tables).unwrap();
        assert_eq!(r.value, Complex64::new(500.0, 0.0));
        assert!((r.main_term.re - 500.0).abs() < 1e-9);
        let r = sifted_character_sum(&chi0, 0.0, 1000.0, 5000.0, &tables).unwrap();
        assert_eq!(r.value, Complex64::new(1.0, 0.0));
        let chi = all_characters(&build_group(5)).into_iter().nth(1).unwrap();
        let r = sifted_character_sum(&chi, 0.0, 1e5, 2.0, &tables).unwrap();
        assert_eq!(r.main_term, Complex64::new(0.0, 0.0));
        assert!(r.value.norm() < 10.0);
        assert!(sifted_character_sum(&chi, 0.0, 1e6, 2.0, &tables).is_err());
    }

    #[test]
    fn sifted_count_is_exact_for_principal() {
        let tables = ArithmeticTables::build(50_000).unwrap();
        for (q, y) in [(1u64, 3.0), (6, 7.0), (10, 30.0)] {
            let chi0 = DirichletCharacter::principal(q);
            let r = sifted_character_sum(&chi0, 0.0, 50_000.0, y, &tables).unwrap();
            let count = (1..=50_000u64)
                .filter(|&n| gcd(n, q) == 1)
                .filter(|&n| n == 1 || (tables.spf(n) as f64) > y)
                .count();
            assert_eq!(r.value, Complex64::new(count as f64, 0.0));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn conjugation_symmetry(n in 2u64..5000, u in 0.0f64..1.0, t in 80.0f64..1e4) {
            let q = ExpSumQuery::new(n, u, t).unwrap();
            let qm = ExpSumQuery::new(n, u, -t).unwrap();
            let a = dyadic_exp_sum(&q).value;
            let b = dyadic_exp_sum(&qm).value;
            prop_assert!((a - b.conj()).norm() <= 1e-12 * (n as f64));
            prop_assert!(a.norm() <= n as f64 * (1.0 + 1e-12));
        }
    }
}
