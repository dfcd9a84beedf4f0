//! Compensated (Neumaier) accumulators.
//!
//! Sums over 10^7 logarithms drift by ~1e-10 relative with naive addition;
//! these keep the running error at a few ulps independent of the term count.

use num_complex::Complex64;
use rayon::prelude::*;

/// Terms per block in [`block_sum`]; fixed so the reduction tree does not
/// depend on the thread count.
pub const BLOCK: usize = 1 << 12;

#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Extend<f64> for NeumaierSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        s.extend(iter);
        s
    }
}

/// Component-wise compensated sum of complex terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl Extend<Complex64> for ComplexSum {
    fn extend<I: IntoIterator<Item = Complex64>>(&mut self, iter: I) {
        for z in iter {
            self.add(z);
        }
    }
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut s = Self::new();
        s.extend(iter);
        s
    }
}

/// Compensated sum of a slice of real terms.
pub fn fsum(terms: &[f64]) -> f64 {
    terms.iter().copied().collect::<NeumaierSum>().value()
}

/// `Σ_{i<len} term(i)`: blocks of [`BLOCK`] terms are summed in parallel,
/// then combined in block order. Bit-identical for any thread count.
pub fn block_sum<F>(len: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let blocks: Vec<f64> = (0..len.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            (b * BLOCK..((b + 1) * BLOCK).min(len))
                .map(&term)
                .collect::<NeumaierSum>()
                .value()
        })
        .collect();
    fsum(&blocks)
}

/// Complex analogue of [`block_sum`].
pub fn block_sum_complex<F>(len: usize, term: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    let blocks: Vec<Complex64> = (0..len.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            (b * BLOCK..((b + 1) * BLOCK).min(len))
                .map(&term)
                .collect::<ComplexSum>()
                .value()
        })
        .collect();
    blocks.into_iter().collect::<ComplexSum>().value()
}
