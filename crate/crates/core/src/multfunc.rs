//! Unit-disc multiplicative functions and the pretentious distance
//! `D(f, g; y, x)`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{lcm, ArithmeticTables};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::sum::block_sum;

#[derive(Clone)]
enum Kind {
    One,
    Mobius,
    Character(DirichletCharacter),
    /// `n ↦ n^{it}`.
    Twist(f64),
    Product(MultiplicativeFunction, MultiplicativeFunction),
    Conjugate(MultiplicativeFunction),
    /// Completely multiplicative, `f(p)` uniform in the disc (or on the
    /// circle when `unimodular`), drawn from a ChaCha stream keyed by `p`.
    Random {
        seed: u64,
        unimodular: bool,
    },
}

/// A multiplicative `f: ℕ → {|z| ≤ 1}` described by its values on prime powers.
#[derive(Clone)]
pub struct MultiplicativeFunction {
    kind: Arc<Kind>,
    label: Arc<str>,
}

impl fmt::Debug for MultiplicativeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiplicativeFunction({})", self.label)
    }
}

impl MultiplicativeFunction {
    fn make(kind: Kind, label: String) -> Self {
        Self {
            kind: Arc::new(kind),
            label: label.into(),
        }
    }

    pub fn one() -> Self {
        Self::make(Kind::One, "one".into())
    }

    pub fn mobius() -> Self {
        Self::make(Kind::Mobius, "mu".into())
    }

    pub fn character(chi: DirichletCharacter) -> Self {
        let label = format!("chi[{}:{}]", chi.modulus(), chi.index());
        Self::make(Kind::Character(chi), label)
    }

    /// `n ↦ n^{it} = e^{it·log n}`.
    pub fn twist(t: f64) -> Self {
        Self::make(Kind::Twist(t), format!("n^it[{t}]"))
    }

    pub fn random(seed: u64) -> Self {
        Self::make(
            Kind::Random {
                seed,
                unimodular: false,
            },
            format!("rand[{seed}]"),
        )
    }

    /// Random completely multiplicative function with `|f(p)| = 1`.
    pub fn random_unimodular(seed: u64) -> Self {
        Self::make(Kind::Random { seed, unimodular: true }, format!("urand[{seed}]"))
    }

    pub fn product(&self, other: &Self) -> Self {
        let label = format!("{}*{}", self.label, other.label);
        Self::make(Kind::Product(self.clone(), other.clone()), label)
    }

    pub fn conj(&self) -> Self {
        let label = format!("conj({})", self.label);
        Self::make(Kind::Conjugate(self.clone()), label)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Whether `f(p^k) = f(p)^k` for all prime powers.
    pub fn is_completely_multiplicative(&self) -> bool {
        match &*self.kind {
            Kind::Mobius => false,
            Kind::One | Kind::Character(_) | Kind::Twist(_) | Kind::Random { .. } => true,
            Kind::Product(a, b) => a.is_completely_multiplicative() && b.is_completely_multiplicative(),
            Kind::Conjugate(a) => a.is_completely_multiplicative(),
        }
    }

    /// `f(p)` for a prime `p`.
    pub fn at_prime(&self, p: u64) -> Complex64 {
        self.at_prime_power(p, 1)
    }

    /// `f(p^k)`, `k ≥ 1`.
    pub fn at_prime_power(&self, p: u64, k: u32) -> Complex64 {
        match &*self.kind {
            Kind::One => Complex64::new(1.0, 0.0),
            Kind::Mobius => Complex64::new(if k == 1 { -1.0 } else { 0.0 }, 0.0),
            Kind::Character(chi) => chi.value(p).powu(k),
            Kind::Twist(t) => Complex64::from_polar(1.0, t * k as f64 * (p as f64).ln()),
            Kind::Product(a, b) => a.at_prime_power(p, k) * b.at_prime_power(p, k),
            Kind::Conjugate(a) => a.at_prime_power(p, k).conj(),
            Kind::Random { seed, unimodular } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(p);
                let r = if *unimodular { 1.0 } else { rng.random::<f64>().sqrt() };
                let theta = rng.random::<f64>() * std::f64::consts::TAU;
                Complex64::from_polar(r, theta).powu(k)
            }
        }
    }

    /// `f(n)` from the factorization of `n` (`f(1) = 1`).
    pub fn evaluate(&self, n: u64, tables: &ArithmeticTables) -> Complex64 {
        tables
            .factorize(n)
            .factors
            .iter()
            .map(|&(p, k)| self.at_prime_power(p, k))
            .product()
    }

    /// `[0, f(1), …, f(n_max)]`.
    pub fn tabulate(&self, n_max: u64, tables: &ArithmeticTables) -> Result<Vec<Complex64>> {
        tables.check_range("n_max", n_max as f64)?;
        let mut out = vec![Complex64::new(0.0, 0.0); n_max as usize + 1];
        if n_max >= 1 {
            out[1] = Complex64::new(1.0, 0.0);
        }
        for n in 2..=n_max {
            let (p, k, m) = tables.split_smallest(n);
            out[n as usize] = self.at_prime_power(p, k) * out[m as usize];
        }
        Ok(out)
    }

    /// Parses the names used on the command line: `one`, `mu`, `chi:Q:INDEX`,
    /// `twist:T`, `rand:SEED`, `urand:SEED`, `conj:NAME`, and products `A*B`.
    pub fn parse(name: &str) -> Result<Self> {
        let bad = || Error::Parameter(format!("unknown function name '{name}'"));
        if let Some((a, b)) = name.split_once('*') {
            return Ok(Self::parse(a)?.product(&Self::parse(b)?));
        }
        if let Some(rest) = name.strip_prefix("conj:") {
            return Ok(Self::parse(rest)?.conj());
        }
        let mut parts = name.split(':');
        let head = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let num = |i: usize| -> Result<f64> { args.get(i).and_then(|s| s.parse().ok()).ok_or_else(bad) };
        let int = |i: usize| -> Result<u64> { args.get(i).and_then(|s| s.parse().ok()).ok_or_else(bad) };
        match (head, args.len()) {
            ("one" | "1", 0) => Ok(Self::one()),
            ("mu", 0) => Ok(Self::mobius()),
            ("twist", 1) => Ok(Self::twist(num(0)?)),
            ("rand", 1) => Ok(Self::random(int(0)?)),
            ("urand", 1) => Ok(Self::random_unimodular(int(0)?)),
            ("chi", 2) => {
                let q = int(0)?;
                if q == 0 {
                    return Err(bad());
                }
                let g = crate::characters::build_group(q);
                let index = int(1)?;
                if index >= g.len() {
                    return Err(Error::Parameter(format!(
                        "character index {index} out of range for modulus {q}"
                    )));
                }
                Ok(Self::character(DirichletCharacter::from_index(&g, index)))
            }
            _ => Err(bad()),
        }
    }

    /// Decomposes `f` as `n ↦ ψ(n)·n^{iτ}` or `n ↦ μ(n)ψ(n)·n^{iτ}` with `ψ`
    /// a Dirichlet character (or 1); `None` for anything else.
    pub fn euler_structure(&self) -> Option<EulerStructure> {
        match &*self.kind {
            Kind::One => Some(EulerStructure::default()),
            Kind::Mobius => Some(EulerStructure {
                inverse: true,
                ..Default::default()
            }),
            Kind::Character(chi) => Some(EulerStructure {
                chi: Some(chi.clone()),
                ..Default::default()
            }),
            Kind::Twist(t) => Some(EulerStructure {
                shift: *t,
                ..Default::default()
            }),
            Kind::Conjugate(a) => {
                let s = a.euler_structure()?;
                Some(EulerStructure {
                    chi: s.chi.map(|c| c.conj()),
                    inverse: s.inverse,
                    shift: -s.shift,
                })
            }
            Kind::Product(a, b) => {
                let (sa, sb) = (a.euler_structure()?, b.euler_structure()?);
                if sa.inverse && sb.inverse {
                    return None;
                }
                let chi = match (sa.chi, sb.chi) {
                    (None, c) | (c, None) => c,
                    (Some(x), Some(y)) => {
                        let m = lcm(x.modulus(), y.modulus());
                        Some(x.lift_to(m).mul(&y.lift_to(m)))
                    }
                };
                Some(EulerStructure {
                    chi,
                    inverse: sa.inverse || sb.inverse,
                    shift: sa.shift + sb.shift,
                })
            }
            Kind::Random { .. } => None,
        }
    }
}

/// `f(n) = μ(n)^{[inverse]}·χ(n)·n^{i·shift}`, so that
/// `L(s, f) = L(s − i·shift, χ)^{±1}`.
#[derive(Debug, Clone, Default)]
pub struct EulerStructure {
    pub chi: Option<DirichletCharacter>,
    pub inverse: bool,
    pub shift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceValue {
    pub f: String,
    pub g: String,
    pub y: f64,
    pub x: f64,
    pub value: f64,
}

fn check_window(y: f64, x: f64, tables: &ArithmeticTables) -> Result<()> {
    if !(y >= 1.0 && y <= x) {
        return Err(Error::Parameter(format!("need 1 <= y <= x, got y={y}, x={x}")));
    }
    tables.check_range("x", x)
}

/// `Σ_{y<p≤x} term(p)/p` with a fixed block reduction order.
fn prime_sum<F>(y: f64, x: f64, tables: &ArithmeticTables, term: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    let primes = tables.primes_in(y, x);
    block_sum(primes.len(), |i| {
        let p = primes[i] as u64;
        term(p) / p as f64
    })
}

/// `D²(f, g; y, x) = Σ_{y<p≤x} (1 − Re f(p)·conj(g(p)))/p`.
pub fn squared_distance(
    f: &MultiplicativeFunction,
    g: &MultiplicativeFunction,
    y: f64,
    x: f64,
    tables: &ArithmeticTables,
) -> Result<f64> {
    check_window(y, x, tables)?;
    Ok(prime_sum(y, x, tables, |p| {
        1.0 - (f.at_prime(p) * g.at_prime(p).conj()).re
    }))
}

pub fn distance(
    f: &MultiplicativeFunction,
    g: &MultiplicativeFunction,
    y: f64,
    x: f64,
    tables: &ArithmeticTables,
) -> Result<DistanceValue> {
    let d2 = squared_distance(f, g, y, x, tables)?;
    Ok(DistanceValue {
        f: f.label().into(),
        g: g.label().into(),
        y,
        x,
        value: d2.max(0.0).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TriangleCheck {
    /// `D(1,f) + D(1,g)`.
    pub lhs: f64,
    /// `D(1,fg)`.
    pub rhs: f64,
    pub slack: f64,
}

pub fn triangle_check(
    f: &MultiplicativeFunction,
    g: &MultiplicativeFunction,
    y: f64,
    x: f64,
    tables: &ArithmeticTables,
) -> Result<TriangleCheck> {
    let one = MultiplicativeFunction::one();
    let df = distance(&one, f, y, x, tables)?.value;
    let dg = distance(&one, g, y, x, tables)?.value;
    let dfg = distance(&one, &f.product(g), y, x, tables)?.value;
    Ok(TriangleCheck {
        lhs: df + dg,
        rhs: dfg,
        slack: df + dg - dfg,
    })
}

/// `D²(χ(n), μ(n)n^{it}; y, x) = Σ_{y<p≤x} (1 + Re χ(p)p^{−it})/p`.
pub fn squared_distance_chi_mu_twist(
    chi: &DirichletCharacter,
    t: f64,
    y: f64,
    x: f64,
    tables: &ArithmeticTables,
) -> Result<f64> {
    check_window(y, x, tables)?;
    Ok(prime_sum(y, x, tables, |p| {
        let twist = Complex64::from_polar(1.0, -t * (p as f64).ln());
        1.0 + (chi.value(p) * twist).re
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{all_characters, build_group};
    use crate::sum::NeumaierSum;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn tables() -> &'static ArithmeticTables {
        static T: OnceLock<ArithmeticTables> = OnceLock::new();
        T.get_or_init(|| ArithmeticTables::build(100_000).unwrap())
    }

    fn trial_primes(lo: u64, hi: u64) -> Vec<u64> {
        (lo + 1..=hi).filter(|&n| crate::arith::is_prime(n)).collect()
    }

    #[test]
    fn values_on_prime_powers() {
        let mu = MultiplicativeFunction::mobius();
        assert_eq!(mu.at_prime_power(7, 1), Complex64::new(-1.0, 0.0));
        assert_eq!(mu.at_prime_power(7, 2), Complex64::new(0.0, 0.0));
        assert!(!mu.is_completely_multiplicative());
        let t = tables();
        for n in 1..200u64 {
            assert_eq!(mu.evaluate(n, t).re, t.mobius(n) as f64);
        }
        let r = MultiplicativeFunction::random(9);
        for p in [2u64, 3, 5, 101] {
            assert!(r.at_prime(p).norm() <= 1.0);
            assert_eq!(r.at_prime(p), r.at_prime(p));
            assert!((r.at_prime_power(p, 3) - r.at_prime(p).powu(3)).norm() < 1e-15);
        }
        assert_ne!(r.at_prime(2), MultiplicativeFunction::random(10).at_prime(2));
        let u = MultiplicativeFunction::random_unimodular(3);
        assert!((u.at_prime(97).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tabulation_is_multiplicative() {
        let t = tables();
        let g = build_group(12);
        let f = MultiplicativeFunction::character(DirichletCharacter::from_index(&g, 3))
            .product(&MultiplicativeFunction::twist(1.5))
            .product(&MultiplicativeFunction::mobius());
        let v = f.tabulate(2000, t).unwrap();
        assert_eq!(v[1], Complex64::new(1.0, 0.0));
        for m in 1..45u64 {
            for n in 1..45u64 {
                if crate::arith::gcd(m, n) == 1 {
                    assert!((v[(m * n) as usize] - v[m as usize] * v[n as usize]).norm() < 1e-12);
                }
            }
        }
        for n in 1..2000u64 {
            assert!((v[n as usize] - f.evaluate(n, t)).norm() < 1e-12);
            assert!(v[n as usize].norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn distance_of_function_to_itself() {
        let t = tables();
        for f in [
            MultiplicativeFunction::twist(2.0),
            MultiplicativeFunction::random_unimodular(1),
            MultiplicativeFunction::mobius(),
        ] {
            assert!(distance(&f, &f, 2.0, 1e4, t).unwrap().value < 1e-7);
        }
    }

    #[test]
    fn one_versus_mobius() {
        let t = tables();
        let d2 = squared_distance(
            &MultiplicativeFunction::one(),
            &MultiplicativeFunction::mobius(),
            3.0,
            5000.0,
            t,
        )
        .unwrap();
        let oracle: NeumaierSum = trial_primes(3, 5000).iter().map(|&p| 2.0 / p as f64).collect();
        assert!((d2 - oracle.value()).abs() < 1e-13);
    }

    #[test]
    fn one_versus_twist_against_oracle() {
        let t = tables();
        let d = distance(
            &MultiplicativeFunction::one(),
            &MultiplicativeFunction::twist(1.0),
            2.0,
            1e4,
            t,
        )
        .unwrap();
        let oracle: f64 = trial_primes(2, 10_000)
            .iter()
            .map(|&p| (1.0 - (p as f64).ln().cos()) / p as f64)
            .sum();
        assert!((d.value - oracle.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn window_errors() {
        let t = tables();
        let one = MultiplicativeFunction::one();
        assert!(matches!(distance(&one, &one, 2.0, 1e6, t), Err(Error::Range { .. })));
        assert!(matches!(distance(&one, &one, 10.0, 5.0, t), Err(Error::Parameter(_))));
    }

    #[test]
    fn triangle_examples() {
        let t = tables();
        let one = MultiplicativeFunction::one();
        let c = triangle_check(&one, &one, 2.0, 1e4, t).unwrap();
        assert_eq!(c.slack, 0.0);
        let mu = MultiplicativeFunction::mobius();
        let c = triangle_check(&mu, &mu, 2.0, 1e4, t).unwrap();
        assert_eq!(c.rhs, 0.0);
        assert!(c.slack > 0.0);
    }

    #[test]
    fn chi_mu_twist_matches_distance_composition() {
        let t = tables();
        let g = build_group(5);
        for chi in all_characters(&g) {
            let direct = squared_distance_chi_mu_twist(&chi, 1.0, 10.0, 1e5, t).unwrap();
            let composed = squared_distance(
                &MultiplicativeFunction::character(chi.clone()),
                &MultiplicativeFunction::mobius().product(&MultiplicativeFunction::twist(1.0)),
                10.0,
                1e5,
                t,
            )
            .unwrap();
            assert!((direct - composed).abs() < 1e-12);
            assert_eq!(squared_distance_chi_mu_twist(&chi, 1.0, 50.0, 50.0, t).unwrap(), 0.0);
        }
        let principal = DirichletCharacter::principal(1);
        let d2 = squared_distance_chi_mu_twist(&principal, 0.0, 2.0, 1e4, t).unwrap();
        let oracle: f64 = trial_primes(2, 10_000).iter().map(|&p| 2.0 / p as f64).sum();
        assert!((d2 - oracle).abs() < 1e-12);
    }

    #[test]
    fn parse_names() {
        for name in [
            "one",
            "mu",
            "chi:5:2",
            "twist:-1.5",
            "rand:7",
            "conj:chi:5:1",
            "mu*twist:2",
        ] {
            let f = MultiplicativeFunction::parse(name).unwrap();
            assert!(!f.label().is_empty());
        }
        assert!(MultiplicativeFunction::parse("chi:5:9").is_err());
        assert!(MultiplicativeFunction::parse("zeta").is_err());
    }

    #[test]
    fn euler_structures() {
        let s = MultiplicativeFunction::parse("conj:twist:2*mu")
            .unwrap()
            .euler_structure()
            .unwrap();
        assert!(s.inverse);
        assert_eq!(s.shift, -2.0);
        let s = MultiplicativeFunction::parse("chi:3:1*chi:4:1")
            .unwrap()
            .euler_structure()
            .unwrap();
        assert_eq!(s.chi.as_ref().unwrap().modulus(), 12);
        assert_eq!(s.chi.unwrap().conductor(), 12);
        assert!(MultiplicativeFunction::parse("mu*mu")
            .unwrap()
            .euler_structure()
            .is_none());
        assert!(MultiplicativeFunction::random(1).euler_structure().is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn distance_symmetric_monotone_additive(
            seed_f in 0u64..1000, seed_g in 0u64..1000,
            y in 2.0f64..200.0, z in 200.0f64..5000.0, x in 5000.0f64..50000.0,
        ) {
            let t = tables();
            let f = MultiplicativeFunction::random(seed_f);
            let g = MultiplicativeFunction::random(seed_g);
            let a = squared_distance(&f, &g, y, x, t).unwrap();
            let b = squared_distance(&g, &f, y, x, t).unwrap();
            prop_assert!((a - b).abs() <= 1e-15 * a.max(1.0));
            let left = squared_distance(&f, &g, y, z, t).unwrap();
            let right = squared_distance(&f, &g, z, x, t).unwrap();
            prop_assert!((left + right - a).abs() < 1e-13);
            prop_assert!(left <= a + 1e-15);
            prop_assert!(a >= 0.0);
        }

        #[test]
        fn triangle_holds_for_random_pairs(seed in 0u64..u64::MAX, y in 2.0f64..50.0) {
            let t = tables();
            let f = MultiplicativeFunction::random(seed);
            let g = MultiplicativeFunction::random(seed.wrapping_add(1));
            prop_assert!(triangle_check(&f, &g, y, 1e5, t).unwrap().slack >= -1e-12);
        }

        #[test]
        fn unimodular_distance_at_most_twice_reciprocal_sum(seed in 0u64..1000) {
            let t = tables();
            let f = MultiplicativeFunction::random_unimodular(seed);
            let d2 = squared_distance(&MultiplicativeFunction::one(), &f, 2.0, 1e4, t).unwrap();
            let bound: f64 = t.primes_in(2.0, 1e4).iter().map(|&p| 2.0 / p as f64).sum();
            prop_assert!(d2 <= bound + 1e-12);
        }
    }
}
