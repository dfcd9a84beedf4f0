use rayon::prelude::*;

use super::factor::Factorization;
use crate::error::{Error, Result};

/// Sentinel returned by [`ArithmeticTables::spf`] for `n = 1`, standing in for `P⁻(1) = ∞`.
pub const INFINITE_PRIME: u64 = u64::MAX;

const SPF_ONE: u32 = u32::MAX;
const BYTES_PER_ENTRY: u64 = 4 + 4 + 1 + 4 + 4 + 1;

#[derive(Debug, Clone)]
pub struct TableConfig {
    /// Entries per sieve segment.
    pub segment_size: usize,
    /// Upper bound on the memory the per-n arrays may occupy.
    pub memory_budget: u64,
    /// Process segments on the rayon pool instead of the calling thread.
    pub parallel: bool,
}

impl Default for TableConfig {
    fn default() -> Self {
        Self {
            segment_size: 1 << 20,
            memory_budget: 8 << 30,
            parallel: true,
        }
    }
}

impl TableConfig {
    pub fn single_threaded() -> Self {
        Self {
            parallel: false,
            ..Self::default()
        }
    }

    /// Largest limit the budget allows (also capped by the 32-bit storage).
    pub fn max_limit(&self) -> u64 {
        (self.memory_budget / BYTES_PER_ENTRY).min(u32::MAX as u64 - 1)
    }
}

/// Sieved arithmetic data for every `n` in `[1, limit]`.
///
/// Arrays are indexed directly by `n`; slot 0 is unused. The von Mangoldt
/// function is kept symbolically as `(p, k)` for `n = p^k` so callers can
/// accumulate `log p` exactly once per prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithmeticTables {
    pub(crate) limit: u64,
    pub(crate) spf: Vec<u32>,
    pub(crate) gpf: Vec<u32>,
    pub(crate) mu: Vec<i8>,
    pub(crate) phi: Vec<u32>,
    pub(crate) mangoldt_p: Vec<u32>,
    pub(crate) mangoldt_k: Vec<u8>,
    pub(crate) primes: Vec<u32>,
}

struct Segment<'a> {
    lo: u64,
    spf: &'a mut [u32],
    gpf: &'a mut [u32],
    mu: &'a mut [i8],
    phi: &'a mut [u32],
    mangoldt_p: &'a mut [u32],
    mangoldt_k: &'a mut [u8],
}

fn simple_primes(bound: u64) -> Vec<u64> {
    let bound = bound as usize;
    let mut composite = vec![false; bound + 1];
    let mut out = Vec::new();
    for i in 2..=bound {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= bound {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

impl Segment<'_> {
    fn sieve(self, small_primes: &[u64]) {
        let len = self.spf.len();
        let lo = self.lo;
        let hi = lo + len as u64;
        let mut rem: Vec<u64> = (lo..hi).collect();
        let mut omega = vec![0u8; len];
        let mut last_e = vec![0u8; len];
        self.mu.fill(1);
        self.phi.fill(1);
        self.spf.fill(0);
        self.gpf.fill(1);

        for &p in small_primes {
            if p >= hi {
                break;
            }
            let first = lo.div_ceil(p) * p;
            let mut m = first;
            while m < hi {
                let i = (m - lo) as usize;
                let mut e = 0u8;
                let mut pe = 1u64;
                while rem[i].is_multiple_of(p) {
                    rem[i] /= p;
                    e += 1;
                    pe *= p;
                }
                if self.spf[i] == 0 {
                    self.spf[i] = p as u32;
                }
                self.gpf[i] = p as u32;
                self.mu[i] = if e > 1 { 0 } else { -self.mu[i] };
                self.phi[i] *= (pe / p * (p - 1)) as u32;
                omega[i] += 1;
                last_e[i] = e;
                m += p;
            }
        }

        for i in 0..len {
            let n = lo + i as u64;
            if n == 1 {
                self.spf[i] = SPF_ONE;
                self.gpf[i] = 1;
                self.mu[i] = 1;
                self.phi[i] = 1;
                self.mangoldt_p[i] = 0;
                self.mangoldt_k[i] = 0;
                continue;
            }
            if rem[i] > 1 {
                let p = rem[i];
                if self.spf[i] == 0 {
                    self.spf[i] = p as u32;
                }
                self.gpf[i] = p as u32;
                self.mu[i] = -self.mu[i];
                self.phi[i] *= (p - 1) as u32;
                omega[i] += 1;
                last_e[i] = 1;
            }
            if omega[i] == 1 {
                self.mangoldt_p[i] = self.gpf[i];
                self.mangoldt_k[i] = last_e[i];
            } else {
                self.mangoldt_p[i] = 0;
                self.mangoldt_k[i] = 0;
            }
        }
    }
}

impl ArithmeticTables {
    /// Segmented sieve filling every per-n array on `[1, limit]`.
    pub fn build(limit: u64) -> Result<Self> {
        Self::build_with(limit, &TableConfig::default())
    }

    pub fn build_with(limit: u64, config: &TableConfig) -> Result<Self> {
        if limit < 1 {
            return Err(Error::Parameter("table limit must be at least 1".into()));
        }
        if config.segment_size == 0 {
            return Err(Error::Parameter("segment size must be positive".into()));
        }
        let max = config.max_limit();
        if limit > max {
            return Err(Error::Capacity { requested: limit, max });
        }
        let size = limit as usize + 1;
        let mut spf = vec![0u32; size];
        let mut gpf = vec![0u32; size];
        let mut mu = vec![0i8; size];
        let mut phi = vec![0u32; size];
        let mut mangoldt_p = vec![0u32; size];
        let mut mangoldt_k = vec![0u8; size];

        let small_primes = simple_primes(isqrt(limit));
        let seg = config.segment_size;
        // Slot 0 is excluded; segments start at n = 1.
        let segments: Vec<Segment<'_>> = spf[1..]
            .chunks_mut(seg)
            .zip(gpf[1..].chunks_mut(seg))
            .zip(mu[1..].chunks_mut(seg))
            .zip(phi[1..].chunks_mut(seg))
            .zip(mangoldt_p[1..].chunks_mut(seg))
            .zip(mangoldt_k[1..].chunks_mut(seg))
            .enumerate()
            .map(|(j, (((((spf, gpf), mu), phi), mangoldt_p), mangoldt_k))| Segment {
                lo: 1 + (j * seg) as u64,
                spf,
                gpf,
                mu,
                phi,
                mangoldt_p,
                mangoldt_k,
            })
            .collect();

        if config.parallel {
            segments.into_par_iter().for_each(|s| s.sieve(&small_primes));
        } else {
            segments.into_iter().for_each(|s| s.sieve(&small_primes));
        }

        let primes = (2..size).filter(|&n| spf[n] as usize == n).map(|n| n as u32).collect();

        Ok(Self {
            limit,
            spf,
            gpf,
            mu,
            phi,
            mangoldt_p,
            mangoldt_k,
            primes,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    #[inline]
    fn idx(&self, n: u64) -> usize {
        debug_assert!(n >= 1 && n <= self.limit, "n = {n} outside [1, {}]", self.limit);
        n as usize
    }

    pub fn check_range(&self, what: &'static str, x: f64) -> Result<()> {
        if x.is_nan() || x > self.limit as f64 {
            return Err(Error::Range {
                what,
                value: x,
                limit: self.limit,
            });
        }
        Ok(())
    }

    #[inline]
    pub fn mobius(&self, n: u64) -> i8 {
        self.mu[self.idx(n)]
    }

    #[inline]
    pub fn totient(&self, n: u64) -> u64 {
        self.phi[self.idx(n)] as u64
    }

    /// `P⁻(n)`, with [`INFINITE_PRIME`] for `n = 1`.
    #[inline]
    pub fn spf(&self, n: u64) -> u64 {
        match self.spf[self.idx(n)] {
            SPF_ONE => INFINITE_PRIME,
            p => p as u64,
        }
    }

    /// `P⁺(n)`, with `P⁺(1) = 1`.
    #[inline]
    pub fn gpf(&self, n: u64) -> u64 {
        self.gpf[self.idx(n)] as u64
    }

    /// `Some((p, k))` when `n = p^k`, i.e. when `Λ(n) = log p`.
    #[inline]
    pub fn mangoldt_pk(&self, n: u64) -> Option<(u64, u32)> {
        let i = self.idx(n);
        match self.mangoldt_p[i] {
            0 => None,
            p => Some((p as u64, self.mangoldt_k[i] as u32)),
        }
    }

    #[inline]
    pub fn mangoldt(&self, n: u64) -> f64 {
        self.mangoldt_pk(n).map_or(0.0, |(p, _)| (p as f64).ln())
    }

    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.spf[self.idx(n)] as u64 == n
    }

    /// All primes up to the table limit, increasing.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Primes in the half-open real interval `(lo, hi]`.
    pub fn primes_in(&self, lo: f64, hi: f64) -> &[u32] {
        let start = self.primes.partition_point(|&p| (p as f64) <= lo);
        let end = self.primes.partition_point(|&p| (p as f64) <= hi);
        &self.primes[start..end.max(start)]
    }

    /// `π(x)` for `x` within the table.
    pub fn prime_count(&self, x: f64) -> usize {
        self.primes.partition_point(|&p| (p as f64) <= x)
    }

    /// Factorization read off the smallest-prime-factor chain, by trial
    /// division beyond the table.
    pub fn factorize(&self, n: u64) -> Factorization {
        if n > self.limit {
            return super::factor::factorize(n);
        }
        let mut factors = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.spf(m);
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        Factorization { n, factors }
    }

    /// `τ_r(n)` from the table factorization.
    pub fn tau_r(&self, n: u64, r: u32) -> Result<u64> {
        super::functions::tau_of(&self.factorize(n), r)
    }

    /// Splits `n ≥ 2` as `(p, k, m)` with `n = p^k·m`, `p = P⁻(n)` and `p ∤ m`.
    #[inline]
    pub fn split_smallest(&self, n: u64) -> (u64, u32, u64) {
        let p = self.spf(n);
        let mut m = n / p;
        let mut k = 1;
        while m.is_multiple_of(p) {
            m /= p;
            k += 1;
        }
        (p, k, m)
    }
}
