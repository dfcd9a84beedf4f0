//! Truncated Taylor expansions `F(s + h) = Σ_j c_j h^j` with per-coefficient
//! absolute error bounds.

use num_complex::Complex64;

use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    /// `c_j = F^{(j)}(s)/j!`.
    pub coeffs: Vec<Complex64>,
    /// Bound on `|c_j − exact c_j|`.
    pub errors: Vec<f64>,
}

fn factorial(j: usize) -> f64 {
    (1..=j).map(|i| i as f64).product()
}

/// Cauchy product of coefficient magnitudes.
fn majorant(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    (0..n).map(|k| (0..=k).map(|i| a[i] * b[k - i]).sum()).collect()
}

impl Jet {
    pub fn new(coeffs: Vec<Complex64>, errors: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), errors.len());
        Self { coeffs, errors }
    }

    pub fn exact(coeffs: Vec<Complex64>) -> Self {
        let errors = vec![0.0; coeffs.len()];
        Self { coeffs, errors }
    }

    /// `a·e^{−h·ℓ}`, the expansion of `a·x^{−s−h}` around `h = 0` with `ℓ = log x`.
    pub fn exponential(a: Complex64, ell: f64, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut c = a;
        for j in 0..=order {
            coeffs.push(c);
            c *= -ell / (j + 1) as f64;
        }
        let errors = coeffs.iter().map(|c| 2.0 * EPS * c.norm()).collect();
        Self { coeffs, errors }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `F^{(j)}(s)`.
    pub fn derivative(&self, j: usize) -> Complex64 {
        self.coeffs[j] * factorial(j)
    }

    /// Error bound on `F^{(j)}(s)`.
    pub fn derivative_error(&self, j: usize) -> f64 {
        self.errors[j] * factorial(j)
    }

    pub fn derivatives(&self) -> Vec<Complex64> {
        (0..=self.order()).map(|j| self.derivative(j)).collect()
    }

    fn abs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm()).collect()
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| c * a).collect(),
            errors: self
                .errors
                .iter()
                .zip(&self.coeffs)
                .map(|(e, c)| e * a.norm() + 2.0 * EPS * (c * a).norm())
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
            errors: (0..self.coeffs.len())
                .map(|j| self.errors[j] + other.errors[j] + EPS * (self.coeffs[j] + other.coeffs[j]).norm())
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs: Vec<Complex64> = (0..n)
            .map(|k| (0..=k).map(|i| self.coeffs[i] * other.coeffs[k - i]).sum())
            .collect();
        let (a, b) = (self.abs(), other.abs());
        let ab = majorant(&a, &b);
        let a_eb = majorant(&a, &other.errors);
        let ea_b = majorant(&self.errors, &b);
        let ea_eb = majorant(&self.errors, &other.errors);
        let errors = (0..n)
            .map(|k| a_eb[k] + ea_b[k] + ea_eb[k] + 4.0 * (k + 1) as f64 * EPS * ab[k])
            .collect();
        Self { coeffs, errors }
    }

    /// `1/F`, failing when `|F(s)|` is not clearly separated from zero.
    pub fn recip(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0.norm() <= 2.0 * self.errors[0] || a0.norm() == 0.0 {
            return Err(Error::ZeroDenominator(a0.norm()));
        }
        let n = self.coeffs.len();
        let inv0 = 1.0 / a0;
        let mut r = vec![inv0];
        for k in 1..n {
            let s: Complex64 = (1..=k).map(|i| self.coeffs[i] * r[k - i]).sum();
            r.push(-s * inv0);
        }
        let ra: Vec<f64> = r.iter().map(|c| c.norm()).collect();
        let rr = majorant(&ra, &ra);
        // 1/(A+Δ) − 1/A = −Δ/(A(A+Δ)); the factor absorbs the second-order part
        let grow = 1.0 / (1.0 - 2.0 * self.errors[0] / a0.norm());
        let rre = majorant(&rr, &self.errors);
        let rra = majorant(&rr, &self.abs());
        let errors = (0..n)
            .map(|k| grow * rre[k] + 4.0 * (k + 2) as f64 * EPS * rra[k])
            .collect();
        Ok(Self { coeffs: r, errors })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    /// Largest error bound among the derivatives `F^{(j)}`, `j ≤ order`.
    pub fn max_derivative_error(&self) -> f64 {
        (0..=self.order()).map(|j| self.derivative_error(j)).fold(0.0, f64::max)
    }
}
