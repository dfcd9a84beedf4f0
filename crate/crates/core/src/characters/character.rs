use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::group::CharacterGroup;
use crate::arith::{gcd, lcm};

/// Exact value of a Dirichlet character: zero, or `e^{2πi·k/L}` with `L`
/// the group exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharValue {
    Zero,
    Root(u64),
}

#[derive(Clone)]
pub struct DirichletCharacter {
    group: Arc<CharacterGroup>,
    exps: Vec<u64>,
    /// `L / order_i` per factor, cached for evaluation.
    scale: Vec<u64>,
    order: u64,
    conductor: u64,
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirichletCharacter")
            .field("modulus", &self.modulus())
            .field("exponents", &self.exps)
            .field("order", &self.order)
            .field("conductor", &self.conductor)
            .finish()
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.exps == other.exps
    }
}

impl Eq for DirichletCharacter {}

/// Serializable summary of one character, as emitted by `characters list`.
#[derive(Debug, Clone, Serialize)]
pub struct CharacterRecord {
    pub modulus: u64,
    pub index: u64,
    pub exponents: Vec<u64>,
    pub orders: Vec<u64>,
    pub order: u64,
    pub conductor: u64,
    pub principal: bool,
    pub real: bool,
    pub primitive: bool,
}

impl DirichletCharacter {
    pub fn new(group: Arc<CharacterGroup>, exps: Vec<u64>) -> Self {
        assert_eq!(exps.len(), group.factors().len(), "one exponent per cyclic factor");
        let l = group.exponent();
        let exps: Vec<u64> = exps.iter().zip(group.factors()).map(|(&a, f)| a % f.order).collect();
        let scale = group.factors().iter().map(|f| l / f.order).collect();
        let order = exps
            .iter()
            .zip(group.factors())
            .fold(1, |acc, (&a, f)| lcm(acc, f.order / gcd(a, f.order)));
        let conductor = conductor_of(&group, &exps);
        Self {
            group,
            exps,
            scale,
            order,
            conductor,
        }
    }

    pub fn principal(q: u64) -> Self {
        let g = CharacterGroup::new(q);
        let n = g.factors().len();
        Self::new(g, vec![0; n])
    }

    pub fn from_index(group: &Arc<CharacterGroup>, index: u64) -> Self {
        Self::new(group.clone(), group.exponents_of(index))
    }

    pub fn group(&self) -> &Arc<CharacterGroup> {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus()
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    pub fn index(&self) -> u64 {
        self.group.index_of(&self.exps)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_principal(&self) -> bool {
        self.order == 1
    }

    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus()
    }

    /// `δ(χ)`: 1 for the principal character, 0 otherwise.
    pub fn delta(&self) -> u8 {
        self.is_principal() as u8
    }

    /// Exact value at `n`.
    pub fn evaluate(&self, n: u64) -> CharValue {
        let mut logs = vec![0u64; self.exps.len()];
        if !self.group.dlog_into(n, &mut logs) {
            return CharValue::Zero;
        }
        CharValue::Root(self.exponent_at(&logs))
    }

    fn exponent_at(&self, logs: &[u64]) -> u64 {
        let l = self.group.exponent() as u128;
        let mut acc: u128 = 0;
        for ((&a, &k), &s) in self.exps.iter().zip(logs).zip(&self.scale) {
            acc = (acc + a as u128 * k as u128 % l * s as u128) % l;
        }
        acc as u64
    }

    /// Floating value at `n`.
    pub fn value(&self, n: u64) -> Complex64 {
        match self.evaluate(n) {
            CharValue::Zero => Complex64::new(0.0, 0.0),
            CharValue::Root(k) => self.group.root(k),
        }
    }

    /// Value as an integer in `{−1, 0, 1}`; `None` for non-real characters.
    pub fn real_value(&self, n: u64) -> Option<i8> {
        if !self.is_real() {
            return None;
        }
        Some(match self.evaluate(n) {
            CharValue::Zero => 0,
            CharValue::Root(0) => 1,
            CharValue::Root(_) => -1,
        })
    }

    /// Values on one full period `0..q`, as exponents (`None` off the units).
    pub fn period_table(&self) -> Vec<CharValue> {
        (0..self.modulus()).map(|n| self.evaluate(n)).collect()
    }

    /// Complex values on one full period `0..q`.
    pub fn period_values(&self) -> Vec<Complex64> {
        (0..self.modulus()).map(|n| self.value(n)).collect()
    }

    pub fn conj(&self) -> Self {
        let exps = self
            .exps
            .iter()
            .zip(self.group.factors())
            .map(|(&a, f)| (f.order - a) % f.order)
            .collect();
        Self::new(self.group.clone(), exps)
    }

    /// Product of two characters to the same modulus.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.modulus(), other.modulus(), "characters to different moduli");
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .zip(self.group.factors())
            .map(|((&a, &b), f)| (a + b) % f.order)
            .collect();
        Self::new(self.group.clone(), exps)
    }

    /// The primitive character mod the conductor inducing `self`.
    pub fn primitive_part(&self) -> DirichletCharacter {
        let q = self.modulus();
        let q1 = self.conductor;
        if q1 == q {
            return self.clone();
        }
        let g1 = CharacterGroup::new(q1);
        let l = self.group.exponent();
        let exps = g1
            .factors()
            .iter()
            .map(|f| {
                // any integer ≡ lift (mod q1) that is a unit mod q
                let mut n = f.lift;
                while gcd(n, q) != 1 {
                    n += q1;
                }
                match self.evaluate(n) {
                    CharValue::Root(k) => k * f.order / l,
                    CharValue::Zero => unreachable!("lift is a unit"),
                }
            })
            .collect();
        DirichletCharacter::new(g1, exps)
    }

    /// Conductor together with the inducing primitive character.
    pub fn conductor_and_primitive_part(&self) -> (u64, DirichletCharacter) {
        (self.conductor, self.primitive_part())
    }

    /// The character mod `m·q` induced by `self` (requires `q | m·q`).
    pub fn lift_to(&self, modulus: u64) -> DirichletCharacter {
        assert!(modulus.is_multiple_of(self.modulus()), "can only induce to multiples");
        let g = CharacterGroup::new(modulus);
        let l = self.group.exponent();
        let exps = g
            .factors()
            .iter()
            .map(|f| match self.evaluate(f.lift) {
                CharValue::Root(k) => k * f.order / l,
                CharValue::Zero => unreachable!("units mod a multiple stay units"),
            })
            .collect();
        DirichletCharacter::new(g, exps)
    }

    pub fn record(&self) -> CharacterRecord {
        CharacterRecord {
            modulus: self.modulus(),
            index: self.index(),
            exponents: self.exps.clone(),
            orders: self.group.factors().iter().map(|f| f.order).collect(),
            order: self.order,
            conductor: self.conductor,
            principal: self.is_principal(),
            real: self.is_real(),
            primitive: self.is_primitive(),
        }
    }
}

/// Conductor from the component characters: an odd component of order `o`
/// has conductor `p^{1+v_p(o)}` (1 when `o = 1`); the 2-part is read off the
/// sign and power-of-5 exponents.
fn conductor_of(group: &CharacterGroup, exps: &[u64]) -> u64 {
    let factors = group.factors();
    let mut conductor = 1u64;
    let mut i = 0;
    while i < factors.len() {
        let f = &factors[i];
        if f.prime == 2 {
            if f.component_modulus == 4 {
                if exps[i] != 0 {
                    conductor *= 4;
                }
                i += 1;
            } else {
                // sign factor then power-of-5 factor
                let sign = exps[i];
                let five = &factors[i + 1];
                let o5 = five.order / gcd(exps[i + 1], five.order);
                if o5 > 1 {
                    conductor *= 4 * o5;
                } else if sign != 0 {
                    conductor *= 4;
                }
                i += 2;
            }
        } else {
            let o = f.order / gcd(exps[i], f.order);
            if o > 1 {
                let mut c = f.prime;
                let mut rest = o;
                while rest.is_multiple_of(f.prime) {
                    rest /= f.prime;
                    c *= f.prime;
                }
                conductor *= c;
            }
            i += 1;
        }
    }
    conductor
}
