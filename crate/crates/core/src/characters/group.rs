use std::sync::Arc;

use num_complex::Complex64;

use crate::arith::{factorize, gcd, lcm, mod_pow};

/// One cyclic factor of `(ℤ/qℤ)*`.
#[derive(Debug, Clone)]
pub struct CyclicFactor {
    /// Prime of the prime-power component this factor belongs to.
    pub prime: u64,
    /// Modulus of that component (`p^e`, or `2^e`).
    pub component_modulus: u64,
    /// Generator as a residue modulo `component_modulus`.
    pub generator: u64,
    /// Element of `(ℤ/qℤ)*` that reduces to `generator` in this component and
    /// to 1 in every other component.
    pub lift: u64,
    pub order: u64,
}

#[derive(Debug, Clone)]
enum Component {
    /// `p^e` with `p` odd: cyclic, one factor.
    Odd { modulus: u64, factor: usize, log: Vec<u32> },
    /// `4`: generated by `−1`.
    Four { factor: usize },
    /// `2^e`, `e ≥ 3`: `±5^k`, two factors (sign, power of 5).
    TwoPower {
        modulus: u64,
        sign_factor: usize,
        five_factor: usize,
        log: Vec<u32>,
        sign: Vec<u8>,
    },
    /// `2`: trivial unit group.
    Two,
}

/// The character group modulo `q`, built from a decomposition of
/// `(ℤ/qℤ)*` into cyclic factors with per-component discrete-log tables.
#[derive(Debug, Clone)]
pub struct CharacterGroup {
    modulus: u64,
    factors: Vec<CyclicFactor>,
    components: Vec<Component>,
    exponent: u64,
    roots: Vec<Complex64>,
}

const NOT_UNIT: u32 = u32::MAX;

/// `e^{2πik/L}`, exact at the quarter turns.
fn unit_root(k: u64, l: u64) -> Complex64 {
    match (4 * k) % (4 * l) {
        0 => return Complex64::new(1.0, 0.0),
        r if r == l => return Complex64::new(0.0, 1.0),
        r if r == 2 * l => return Complex64::new(-1.0, 0.0),
        r if r == 3 * l => return Complex64::new(0.0, -1.0),
        _ => {}
    }
    Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / l as f64)
}

/// Smallest positive primitive root modulo an odd prime power.
pub fn primitive_root(p: u64, e: u32) -> u64 {
    let m = p.pow(e);
    let phi = p.pow(e - 1) * (p - 1);
    let mut ell: Vec<u64> = factorize(p - 1).primes().collect();
    if e >= 2 {
        ell.push(p);
    }
    (2..m)
        .find(|&g| g % p != 0 && ell.iter().all(|&l| mod_pow(g, phi / l, m) != 1))
        .expect("odd prime powers have primitive roots")
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(m as i128) as u64
}

/// The residue mod `q` congruent to `residue` mod `m` and to 1 mod `q/m`
/// (`gcd(m, q/m) = 1`).
fn crt_lift(residue: u64, m: u64, q: u64) -> u64 {
    let rest = q / m;
    if rest == 1 {
        return residue % q;
    }
    // x = 1 + rest·k with rest·k ≡ residue − 1 (mod m)
    let k = ((residue + m - 1) % m) as u128 * mod_inverse(rest % m, m) as u128 % m as u128;
    ((1 + rest as u128 * k) % q as u128) as u64
}

impl CharacterGroup {
    pub fn new(q: u64) -> Arc<Self> {
        assert!(q >= 1, "modulus must be positive");
        let mut factors = Vec::new();
        let mut components = Vec::new();
        for (p, e) in factorize(q).factors {
            let m = p.pow(e);
            if p == 2 {
                match e {
                    1 => components.push(Component::Two),
                    2 => {
                        factors.push(CyclicFactor {
                            prime: 2,
                            component_modulus: 4,
                            generator: 3,
                            lift: crt_lift(3, 4, q),
                            order: 2,
                        });
                        components.push(Component::Four {
                            factor: factors.len() - 1,
                        });
                    }
                    _ => {
                        let half = m / 4;
                        let mut log = vec![NOT_UNIT; m as usize];
                        let mut sign = vec![0u8; m as usize];
                        let mut x = 1u64;
                        for k in 0..half {
                            log[x as usize] = k as u32;
                            log[(m - x) as usize] = k as u32;
                            sign[(m - x) as usize] = 1;
                            x = x * 5 % m;
                        }
                        factors.push(CyclicFactor {
                            prime: 2,
                            component_modulus: m,
                            generator: m - 1,
                            lift: crt_lift(m - 1, m, q),
                            order: 2,
                        });
                        factors.push(CyclicFactor {
                            prime: 2,
                            component_modulus: m,
                            generator: 5,
                            lift: crt_lift(5, m, q),
                            order: half,
                        });
                        components.push(Component::TwoPower {
                            modulus: m,
                            sign_factor: factors.len() - 2,
                            five_factor: factors.len() - 1,
                            log,
                            sign,
                        });
                    }
                }
            } else {
                let g = primitive_root(p, e);
                let order = m / p * (p - 1);
                let mut log = vec![NOT_UNIT; m as usize];
                let mut x = 1u64;
                for k in 0..order {
                    log[x as usize] = k as u32;
                    x = x * g % m;
                }
                factors.push(CyclicFactor {
                    prime: p,
                    component_modulus: m,
                    generator: g,
                    lift: crt_lift(g, m, q),
                    order,
                });
                components.push(Component::Odd {
                    modulus: m,
                    factor: factors.len() - 1,
                    log,
                });
            }
        }
        let exponent = factors.iter().fold(1, |acc, f| lcm(acc, f.order));
        let roots = (0..exponent).map(|k| unit_root(k, exponent)).collect();
        Arc::new(Self {
            modulus: q,
            factors,
            components,
            exponent,
            roots,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn factors(&self) -> &[CyclicFactor] {
        &self.factors
    }

    /// Group exponent `L`; character values are `L`-th roots of unity.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// `|(ℤ/qℤ)*|` as the product of the cyclic orders.
    pub fn order(&self) -> u64 {
        self.factors.iter().map(|f| f.order).product()
    }

    /// Number of characters (equals the group order).
    pub fn len(&self) -> u64 {
        self.order()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `e^{2πik/L}`.
    #[inline]
    pub fn root(&self, k: u64) -> Complex64 {
        self.roots[(k % self.exponent) as usize]
    }

    pub fn is_unit(&self, n: u64) -> bool {
        gcd(n % self.modulus, self.modulus) == 1
    }

    /// Discrete logarithm of `n` with respect to the generators, or `None`
    /// when `gcd(n, q) > 1`.
    pub fn dlog(&self, n: u64) -> Option<Vec<u64>> {
        let mut out = vec![0u64; self.factors.len()];
        self.dlog_into(n, &mut out).then_some(out)
    }

    pub(crate) fn dlog_into(&self, n: u64, out: &mut [u64]) -> bool {
        for c in &self.components {
            match c {
                Component::Two => {
                    if n.is_multiple_of(2) {
                        return false;
                    }
                }
                Component::Four { factor } => {
                    match n % 4 {
                        1 => out[*factor] = 0,
                        3 => out[*factor] = 1,
                        _ => return false,
                    };
                }
                Component::TwoPower {
                    modulus,
                    sign_factor,
                    five_factor,
                    log,
                    sign,
                } => {
                    let r = (n % modulus) as usize;
                    if log[r] == NOT_UNIT {
                        return false;
                    }
                    out[*sign_factor] = sign[r] as u64;
                    out[*five_factor] = log[r] as u64;
                }
                Component::Odd { modulus, factor, log } => {
                    let r = (n % modulus) as usize;
                    if log[r] == NOT_UNIT {
                        return false;
                    }
                    out[*factor] = log[r] as u64;
                }
            }
        }
        true
    }

    /// Exponent vector of the character with enumeration index `index`
    /// (mixed radix, last factor varying fastest; index 0 is principal).
    pub fn exponents_of(&self, index: u64) -> Vec<u64> {
        let mut rest = index;
        let mut out = vec![0; self.factors.len()];
        for (slot, f) in out.iter_mut().zip(&self.factors).rev() {
            *slot = rest % f.order;
            rest /= f.order;
        }
        out
    }

    pub fn index_of(&self, exps: &[u64]) -> u64 {
        exps.iter()
            .zip(&self.factors)
            .fold(0, |acc, (&a, f)| acc * f.order + a % f.order)
    }

    /// Number of real characters: each cyclic factor contributes `gcd(2, order)`.
    pub fn real_count(&self) -> u64 {
        self.factors.iter().map(|f| gcd(2, f.order)).product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_orders() {
        for q in 1..300u64 {
            let g = CharacterGroup::new(q);
            assert_eq!(g.order(), crate::arith::totient(q), "q={q}");
        }
    }

    #[test]
    fn dlog_reconstructs_units() {
        for q in [1u64, 2, 4, 8, 9, 12, 16, 45, 60, 97, 128, 360] {
            let g = CharacterGroup::new(q);
            for n in 0..q {
                match g.dlog(n) {
                    None => assert!(gcd(n, q) > 1),
                    Some(logs) => {
                        assert_eq!(gcd(n, q), 1);
                        let rebuilt = logs.iter().zip(g.factors()).fold(1 % q, |acc, (&k, f)| {
                            (acc as u128 * mod_pow(f.lift, k, q) as u128 % q as u128) as u64
                        });
                        assert_eq!(rebuilt, n % q, "q={q} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(3, 1), 2);
        assert_eq!(primitive_root(7, 1), 3);
        assert_eq!(primitive_root(5, 2), 2);
        // 10 is a primitive root mod 487 but not mod 487^2
        assert_ne!(primitive_root(487, 2), 10);
    }

    #[test]
    fn lifts_are_crt_consistent() {
        let g = CharacterGroup::new(360);
        for f in g.factors() {
            assert_eq!(f.lift % f.component_modulus, f.generator % f.component_modulus);
            assert_eq!(f.lift % (360 / f.component_modulus), 1 % (360 / f.component_modulus));
        }
    }
}
