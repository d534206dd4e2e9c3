use num_integer::Integer;
use serde::Serialize;

use crate::{Error, Result};

use super::word::z_power;
use super::{Base, GeneratorSystem, Word};

/// The sequence `sgn_n(w)`, `n ≥ 1`: explicit for `n = 1, ..., r + 1`, then
/// `r`-periodic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SignProfile {
    r: u32,
    values: Vec<i8>,
}

impl SignProfile {
    pub fn at(&self, n: u32) -> i8 {
        assert!(n >= 1, "signs start at level 1");
        let idx = if n <= self.r + 1 {
            n
        } else {
            2 + (n - 2) % self.r
        };
        self.values[idx as usize - 1]
    }

    /// Stored values for levels `1..=r+1`.
    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn is_constant_minus_one(&self) -> bool {
        self.values.iter().all(|&s| s == -1)
    }

    /// First level with sign `+1`, if any.
    pub fn first_plus(&self) -> Option<u32> {
        self.values
            .iter()
            .position(|&s| s == 1)
            .map(|i| i as u32 + 1)
    }

    /// Pointwise product (signs are multiplicative).
    pub fn times(&self, other: &SignProfile) -> SignProfile {
        assert_eq!(self.r, other.r);
        SignProfile {
            r: self.r,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub(crate) fn from_mask(mask: u32, r: u32) -> SignProfile {
        SignProfile {
            r,
            values: (0..=r)
                .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                .collect(),
        }
    }
}

/// Closed-form signs: `γ^m` gives `(-1)^m` on every level, `z_k` gives `+1`
/// on level 1 and `-1` on levels `≥ 2` exactly when `k ≡ 3 mod 4`, and
/// `a_i^e` gives `(-1)^e` on levels `n ≡ i mod r`.
pub fn sign_profile(w: &Word, sys: &GeneratorSystem) -> Result<SignProfile> {
    w.validate(sys)?;
    let r = sys.r();
    let all = (1u32 << (r + 1)) - 1;
    let mut mask = 0u32;
    for l in w.letters() {
        match &l.base {
            Base::Gamma => {
                if l.exp.is_odd() {
                    mask ^= all;
                }
            }
            Base::Z(k) => {
                let k = z_power(k, &l.exp)?;
                if k.precision().is_some_and(|p| p < 2) {
                    return Err(Error::Precision {
                        needed: 2,
                        available: 1,
                    });
                }
                if k.truncate(2)? == 3u8.into() {
                    mask ^= all & !1;
                }
            }
            Base::A(i) => {
                if l.int_exp()?.is_odd() {
                    mask ^= if *i == 1 { 1 | 1 << r } else { 1 << (i - 1) };
                }
            }
        }
    }
    Ok(SignProfile::from_mask(mask, r))
}

/// Whether `w` is an odometer: its sign is `-1` on every level.
pub fn is_odometer_exact(w: &Word, sys: &GeneratorSystem) -> Result<bool> {
    Ok(sign_profile(w, sys)?.is_constant_minus_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::Letter;

    #[test]
    fn profiles() {
        let s = GeneratorSystem::new(3).unwrap();
        let g = sign_profile(&Word::gamma(), &s).unwrap();
        assert!((1..20).all(|n| g.at(n) == -1));
        let z5 = sign_profile(&Word::z(5), &s).unwrap();
        assert!((1..20).all(|n| z5.at(n) == 1));
        let z3 = sign_profile(&Word::z(3), &s).unwrap();
        assert_eq!(z3.at(1), 1);
        assert!((2..20).all(|n| z3.at(n) == -1));
        for i in 1..=3 {
            let p = sign_profile(&Word::a(i), &s).unwrap();
            for n in 1..20 {
                assert_eq!(p.at(n) == -1, n % 3 == i % 3, "a{i} at {n}");
            }
        }
    }

    #[test]
    fn odometer_examples() {
        let s = GeneratorSystem::new(4).unwrap();
        assert!(is_odometer_exact(&Word::gamma_pow(5), &s).unwrap());
        assert!(!is_odometer_exact(&Word::gamma_pow(6), &s).unwrap());
        assert!(!is_odometer_exact(&Word::z(3), &s).unwrap());
        assert!(is_odometer_exact(&s.generator_product(), &s).unwrap());
        let w = Word::from_letters(vec![
            Letter::a(1, 3),
            Letter::a(2, 1),
            Letter::a(3, -1),
            Letter::a(4, 5),
        ]);
        assert!(is_odometer_exact(&w, &s).unwrap());
    }
}
