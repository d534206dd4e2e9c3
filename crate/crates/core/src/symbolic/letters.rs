//! Letter-by-letter evaluation: each letter's portrait is built bottom-up
//! from its wreath recursion and the results are multiplied. Independent of
//! the top-down section machinery, so the two can check each other.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::portrait::{check_depth, Portrait};
use crate::Result;

use super::word::z_power;
use super::{Base, GeneratorSystem, Letter, Word};

fn exponent_mod(e: &BigInt, n: u32) -> u64 {
    e.mod_floor(&(BigInt::from(1u8) << n as usize))
        .to_u64()
        .expect("fits")
}

/// `a_1, ..., a_r` on `T_n`, built level by level.
fn generator_portraits(n: u32, r: u32) -> Vec<Portrait> {
    let mut gens: Vec<Portrait> = (0..r).map(|_| Portrait::identity(0)).collect();
    for d in 1..=n {
        let id = Portrait::identity(d - 1);
        let mut next = Vec::with_capacity(r as usize);
        next.push(Portrait::assemble(&gens[r as usize - 1], &id, true).expect("depths agree"));
        for i in 1..r as usize {
            next.push(Portrait::assemble(&gens[i - 1], &id, false).expect("depths agree"));
        }
        gens = next;
    }
    gens
}

/// `z_k` on `T_n` from `z_k = (z_k, γ^ℓ z_k)`, for `k` given mod `2^n`.
fn z_portrait(k: u64, n: u32) -> Portrait {
    let ell = k >> 1;
    let mut z = Portrait::identity(0);
    for d in 1..=n {
        let shifted = Portrait::gamma_power(d - 1, ell).then(&z);
        z = Portrait::assemble(&z, &shifted, false).expect("depths agree");
    }
    z
}

pub fn letter_portrait(l: &Letter, n: u32, sys: &GeneratorSystem) -> Result<Portrait> {
    check_depth(n)?;
    Word::letter(l.clone()).validate(sys)?;
    Ok(match &l.base {
        Base::A(i) => {
            let g = &generator_portraits(n, sys.r())[*i as usize - 1];
            g.pow(exponent_mod(&l.int_exp()?, n))
        }
        Base::Gamma => Portrait::gamma_power(n, exponent_mod(&l.exp.truncate(n)?, n)),
        Base::Z(k) => {
            let k = z_power(k, &l.exp)?;
            z_portrait(exponent_mod(&k.truncate(n)?, n), n)
        }
    })
}

/// Product of the letter portraits of `w` on `T_n`.
pub fn product_portrait(w: &Word, n: u32, sys: &GeneratorSystem) -> Result<Portrait> {
    let mut acc = Portrait::identity(n);
    for l in w.letters() {
        acc = acc.then(&letter_portrait(l, n, sys)?);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_generators() {
        let s = GeneratorSystem::new(2).unwrap();
        // a_1 on T_2 is (a_2|T_1, id)σ = σ
        let a1 = letter_portrait(&Letter::a(1, 1), 2, &s).unwrap();
        assert_eq!(a1, Portrait::sigma(2).unwrap());
        assert_eq!(a1.order(), 2);
    }

    #[test]
    fn z_examples() {
        let s = GeneratorSystem::basilica();
        assert!(letter_portrait(&Letter::z(5), 2, &s).unwrap().is_identity());
        assert!(!letter_portrait(&Letter::z(5), 3, &s).unwrap().is_identity());
        let z3 = letter_portrait(&Letter::z(3), 2, &s).unwrap();
        let t = z3.cycle_structure(2).unwrap();
        let lengths: Vec<u32> = t.cycles.iter().map(|c| c.length).collect();
        assert_eq!(lengths, vec![1, 1, 2]);
        assert_eq!(t.cycles[2].members, vec![0b10, 0b11]);
    }
}
