//! Dirichlet characters modulo `q`: group construction, exact evaluation,
//! conductors and primitive parts, orthogonality.

mod character;
mod cyclotomic;
mod group;

use std::sync::Arc;

pub use character::{CharValue, CharacterRecord, DirichletCharacter};
pub use cyclotomic::{cyclotomic_poly, CyclotomicInt};
pub use group::{primitive_root, CharacterGroup, CyclicFactor};

use crate::arith::gcd;
use crate::error::{Error, Result};

pub fn build_group(q: u64) -> Arc<CharacterGroup> {
    CharacterGroup::new(q)
}

/// Every character mod `q`, in enumeration-index order.
pub fn all_characters(group: &Arc<CharacterGroup>) -> Vec<DirichletCharacter> {
    (0..group.len())
        .map(|i| DirichletCharacter::from_index(group, i))
        .collect()
}

/// Real characters mod `q`, in enumeration-index order.
pub fn real_characters(group: &Arc<CharacterGroup>) -> Vec<DirichletCharacter> {
    // exponent a_i must satisfy 2·a_i ≡ 0 (mod order_i)
    let choices: Vec<Vec<u64>> = group
        .factors()
        .iter()
        .map(|f| {
            if f.order % 2 == 0 {
                vec![0, f.order / 2]
            } else {
                vec![0]
            }
        })
        .collect();
    let mut out = vec![Vec::new()];
    for c in &choices {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u64>| {
                c.iter().map(move |&a| {
                    let mut v = prefix.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    let mut chars: Vec<DirichletCharacter> = out
        .into_iter()
        .map(|e| DirichletCharacter::new(group.clone(), e))
        .collect();
    chars.sort_by_key(|c| c.index());
    chars
}

/// `Σ_χ χ(a)·conj(χ(b))`, summed exactly in `ℤ[ζ_L]` from the exponent
/// histogram of `χ(a)·conj(χ(b))` over all characters.
pub fn orthogonality_sum(q: u64, a: u64, b: u64) -> Result<i64> {
    let group = build_group(q);
    orthogonality_sum_in(&group, a, b)
}

pub fn orthogonality_sum_in(group: &Arc<CharacterGroup>, a: u64, b: u64) -> Result<i64> {
    let q = group.modulus();
    for n in [a, b] {
        if gcd(n % q, q) != 1 {
            return Err(Error::NotCoprime { n, q });
        }
    }
    let la = group.dlog(a).expect("unit");
    let lb = group.dlog(b).expect("unit");
    let l = group.exponent();
    let mut counts = vec![0i64; l as usize];
    for index in 0..group.len() {
        let exps = group.exponents_of(index);
        let mut k: u128 = 0;
        for ((e, f), (x, y)) in exps.iter().zip(group.factors()).zip(la.iter().zip(&lb)) {
            let diff = (x + f.order - y) % f.order;
            k += *e as u128 * diff as u128 % f.order as u128 * (l / f.order) as u128;
        }
        counts[(k % l as u128) as usize] += 1;
    }
    let phi_l = cyclotomic_poly(l);
    CyclotomicInt::from_counts(l, &counts, &phi_l)
        .as_integer()
        .ok_or_else(|| Error::Domain("character sum is not a rational integer".into()))
}

/// Number of real characters mod `q` (at most `2·τ_2(q)`).
pub fn real_character_census(q: u64) -> u64 {
    build_group(q).real_count()
}
