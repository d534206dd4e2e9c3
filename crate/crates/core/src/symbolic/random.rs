use rand::Rng;

use crate::{Dyadic, Trit};

use super::{Base, GeneratorSystem, Letter, Word};

/// Shape of random words.
#[derive(Clone, Copy, Debug)]
pub struct RandomWordSpec {
    pub max_letters: usize,
    /// Exponents are drawn from `[-2^bits, 2^bits]`.
    pub exp_bits: u32,
    pub a_letters: bool,
    pub gamma_letters: bool,
    pub z_letters: bool,
}

impl Default for RandomWordSpec {
    fn default() -> Self {
        RandomWordSpec {
            max_letters: 6,
            exp_bits: 8,
            a_letters: true,
            gamma_letters: true,
            z_letters: true,
        }
    }
}

fn random_unit<R: Rng + ?Sized>(rng: &mut R, bits: u32) -> i64 {
    loop {
        let k = rng.gen_range(1..=(1i64 << bits)) | 1;
        let k = if rng.gen_bool(0.25) { -k } else { k };
        if k != 1 && k != -1 {
            return k;
        }
    }
}

/// A random word with between 1 and `max_letters` letters; z-indices avoid `±1`.
pub fn random_word<R: Rng + ?Sized>(
    rng: &mut R,
    spec: &RandomWordSpec,
    sys: &GeneratorSystem,
) -> Word {
    let mut kinds = Vec::new();
    if spec.a_letters {
        kinds.push(0);
    }
    if spec.gamma_letters {
        kinds.push(1);
    }
    if spec.z_letters {
        kinds.push(2);
    }
    assert!(!kinds.is_empty(), "no letter kinds enabled");
    let bound = 1i64 << spec.exp_bits;
    let len = rng.gen_range(1..=spec.max_letters.max(1));
    let letters = (0..len)
        .map(|_| match kinds[rng.gen_range(0..kinds.len())] {
            0 => {
                let i = rng.gen_range(1..=sys.r());
                let mut e = 0;
                while e == 0 {
                    e = rng.gen_range(-bound..=bound);
                }
                Letter::a(i, e)
            }
            1 => Letter::gamma(rng.gen_range(-bound..=bound)),
            _ => Letter::z(random_unit(rng, spec.exp_bits)),
        })
        .collect();
    Word::from_letters(letters)
}

/// A random word over `a_i`, `γ^m`, `z_s` (`s ≠ ±1`) whose coset label is not `±1`.
pub fn random_v_word<R: Rng + ?Sized>(
    rng: &mut R,
    spec: &RandomWordSpec,
    sys: &GeneratorSystem,
) -> Word {
    loop {
        let mut w = random_word(rng, spec, sys);
        if !w.letters().iter().any(|l| matches!(l.base, Base::Z(_))) {
            let k = random_unit(rng, spec.exp_bits);
            let at = rng.gen_range(0..=w.len());
            let mut letters = w.letters().to_vec();
            letters.insert(at, Letter::z(Dyadic::exact(k)));
            w = Word::from_letters(letters);
        }
        if w.coset_label().map(|k| k.is_plus_minus_one()) == Ok(Trit::No) {
            return w;
        }
    }
}
