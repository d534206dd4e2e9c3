use num_bigint::BigInt;
use num_integer::Integer;

use crate::{Dyadic, Error, Result};

use super::word::z_power;
use super::{Base, GeneratorSystem, Letter, Word};

/// Root permutation: `true` for a swap.
pub fn root_perm(w: &Word) -> Result<bool> {
    let mut swap = false;
    for l in w.letters() {
        match l.base {
            Base::A(1) => swap ^= l.int_exp()?.is_odd(),
            Base::Gamma => swap ^= l.exp.is_odd(),
            _ => {}
        }
    }
    Ok(swap)
}

// Sections of a single letter: (left, right, swap).
fn letter_split(l: &Letter, r: u32) -> Result<(Vec<Letter>, Vec<Letter>, bool)> {
    Ok(match &l.base {
        Base::Gamma => {
            let m = &l.exp;
            if m.is_odd() {
                let up = (m + &Dyadic::one()).halve()?;
                let down = (m - &Dyadic::one()).halve()?;
                (vec![Letter::gamma(up)], vec![Letter::gamma(down)], true)
            } else {
                let h = m.halve()?;
                (
                    vec![Letter::gamma(h.clone())],
                    vec![Letter::gamma(h)],
                    false,
                )
            }
        }
        Base::Z(k) => {
            let k = z_power(k, &l.exp)?;
            let ell = k.ell()?;
            (
                vec![Letter::z(k.clone())],
                vec![Letter::gamma(ell), Letter::z(k)],
                false,
            )
        }
        Base::A(1) => {
            let e = l.int_exp()?;
            let ar = |x: BigInt| Letter {
                base: Base::A(r),
                exp: Dyadic::exact(x),
            };
            if e.is_odd() {
                let up: BigInt = (&e + 1) >> 1usize;
                let down: BigInt = (&e - 1) >> 1usize;
                (vec![ar(up)], vec![ar(down)], true)
            } else {
                let h: BigInt = &e >> 1usize;
                (vec![ar(h.clone())], vec![ar(h)], false)
            }
        }
        Base::A(i) => {
            if *i == 0 || *i > r {
                return Err(Error::GeneratorIndex { index: *i, r });
            }
            let lower = Letter {
                base: Base::A(i - 1),
                exp: Dyadic::exact(l.int_exp()?),
            };
            (vec![lower], Vec::new(), false)
        }
    })
}

/// The wreath recursion `w = (w_0, w_1)τ`, with normalized sections.
pub fn split(w: &Word, sys: &GeneratorSystem) -> Result<(Word, Word, bool)> {
    let mut sides = [Vec::new(), Vec::new()];
    // Which slot each side's path currently occupies.
    let mut pos = [0usize, 1usize];
    for l in w.letters() {
        let (s0, s1, swap) = letter_split(l, sys.r())?;
        for side in 0..2 {
            let part = if pos[side] == 0 { &s0 } else { &s1 };
            sides[side].extend_from_slice(part);
            if swap {
                pos[side] ^= 1;
            }
        }
    }
    let [a, b] = sides;
    let swap = pos[0] == 1;
    Ok((
        Word::from_letters(a).normalized(),
        Word::from_letters(b).normalized(),
        swap,
    ))
}

pub fn section(w: &Word, side: u8, sys: &GeneratorSystem) -> Result<Word> {
    let (a, b, _) = split(w, sys)?;
    Ok(if side == 0 { a } else { b })
}

/// First descendants: both sections for a trivial root, otherwise the
/// single product `w_0 w_1`.
pub fn descendants_1(w: &Word, sys: &GeneratorSystem) -> Result<Vec<Word>> {
    let (a, b, swap) = split(w, sys)?;
    Ok(if swap { vec![a.mul(&b)] } else { vec![a, b] })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(r: u32) -> GeneratorSystem {
        GeneratorSystem::new(r).unwrap()
    }

    #[test]
    fn root_perms() {
        assert!(root_perm(&Word::gamma()).unwrap());
        assert!(!root_perm(&Word::z(7)).unwrap());
        assert!(!root_perm(&Word::a(2)).unwrap());
        assert!(root_perm(&Word::a(1)).unwrap());
    }

    #[test]
    fn letter_sections() {
        let s = sys(2);
        let (a, b, swap) = split(&Word::z(5), &s).unwrap();
        assert!(!swap);
        assert_eq!(a, Word::z(5));
        assert_eq!(b, Word::gamma_z(2, 5));
        let (a, b, swap) = split(&Word::a(1), &s).unwrap();
        assert!(swap);
        assert_eq!(a, Word::a(2));
        assert!(b.is_empty());
    }

    #[test]
    fn first_descendants() {
        let s = sys(3);
        assert_eq!(
            descendants_1(&Word::gamma(), &s).unwrap(),
            vec![Word::gamma()]
        );
        assert_eq!(
            descendants_1(&Word::z(5), &s).unwrap(),
            vec![Word::z(5), Word::gamma_z(2, 5)]
        );
        assert_eq!(descendants_1(&Word::a(1), &s).unwrap(), vec![Word::a(3)]);
        // a_1 z_k has a single descendant a_r γ^ℓ z_(k^2)
        let w = Word::a(1).mul(&Word::z(3));
        let expect = Word::a(3).mul(&Word::gamma_z(1, 9));
        assert_eq!(descendants_1(&w, &s).unwrap(), vec![expect]);
    }

    #[test]
    fn negative_a1_powers() {
        let s = sys(2);
        let (a, b, swap) = split(&Word::a_pow(1, -1), &s).unwrap();
        assert!(swap);
        assert!(a.is_empty());
        assert_eq!(b, Word::a_pow(2, -1));
        let (a, b, swap) = split(&Word::a_pow(1, -3), &s).unwrap();
        assert!(swap);
        assert_eq!(a, Word::a_pow(2, -1));
        assert_eq!(b, Word::a_pow(2, -2));
    }
}
