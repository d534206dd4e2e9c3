use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::{Dyadic, Error, Result, DEFAULT_PRECISION};

use super::GeneratorSystem;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    /// Generator `a_i`, `1 ≤ i ≤ r`.
    A(u32),
    /// The standard odometer `γ = (γ, id)σ`.
    Gamma,
    /// `z_k = (z_k, γ^ℓ z_k)` for a unit `k`.
    Z(Dyadic),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub base: Base,
    pub exp: Dyadic,
}

impl Letter {
    pub fn a(i: u32, e: i64) -> Letter {
        Letter {
            base: Base::A(i),
            exp: Dyadic::exact(e),
        }
    }

    pub fn gamma(m: impl Into<Dyadic>) -> Letter {
        Letter {
            base: Base::Gamma,
            exp: m.into(),
        }
    }

    pub fn z(k: impl Into<Dyadic>) -> Letter {
        Letter {
            base: Base::Z(k.into()),
            exp: Dyadic::one(),
        }
    }

    /// Exponent of an A-letter as a big integer.
    pub(crate) fn int_exp(&self) -> Result<BigInt> {
        if self.exp.is_exact() {
            Ok(self.exp.value().clone())
        } else {
            Err(Error::InexactExponent(self.exp.to_string()))
        }
    }
}

/// A finite word over `{a_1, ..., a_r, γ, z_k}`; the empty word is the identity.
/// Products read left to right: `xy` applies `x` first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Word {
        Word::default()
    }

    /// Letters in the given order, without normalization.
    pub fn from_letters(letters: Vec<Letter>) -> Word {
        Word { letters }
    }

    pub fn letter(l: Letter) -> Word {
        Word { letters: vec![l] }
    }

    pub fn a(i: u32) -> Word {
        Word::letter(Letter::a(i, 1))
    }

    pub fn a_pow(i: u32, e: i64) -> Word {
        Word::letter(Letter::a(i, e))
    }

    pub fn gamma() -> Word {
        Word::letter(Letter::gamma(1))
    }

    pub fn gamma_pow(m: impl Into<Dyadic>) -> Word {
        Word::letter(Letter::gamma(m))
    }

    pub fn z(k: impl Into<Dyadic>) -> Word {
        Word::letter(Letter::z(k))
    }

    /// `γ^m z_k`.
    pub fn gamma_z(m: impl Into<Dyadic>, k: impl Into<Dyadic>) -> Word {
        Word::from_letters(vec![Letter::gamma(m), Letter::z(k)]).normalized()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn has_a_letters(&self) -> bool {
        self.letters.iter().any(|l| matches!(l.base, Base::A(_)))
    }

    pub fn push(&mut self, l: Letter) {
        self.letters.push(l);
    }

    /// Concatenation `self · other`, normalized.
    pub fn mul(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }.normalized()
    }

    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a Word>) -> Word {
        let mut letters = Vec::new();
        for p in parts {
            letters.extend_from_slice(&p.letters);
        }
        Word { letters }.normalized()
    }

    pub fn inverse(&self) -> Word {
        let letters = self
            .letters
            .iter()
            .rev()
            .map(|l| Letter {
                base: l.base.clone(),
                exp: -&l.exp,
            })
            .collect();
        Word { letters }.normalized()
    }

    /// Integer power.
    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut letters = Vec::new();
        for _ in 0..e.unsigned_abs() {
            letters.extend_from_slice(&base.letters);
        }
        Word { letters }.normalized()
    }

    /// Checks generator indices against the system and exponent discipline.
    pub fn validate(&self, sys: &GeneratorSystem) -> Result<()> {
        for l in &self.letters {
            match &l.base {
                Base::A(i) => {
                    if *i == 0 || *i > sys.r() {
                        return Err(Error::GeneratorIndex {
                            index: *i,
                            r: sys.r(),
                        });
                    }
                    l.int_exp()?;
                }
                Base::Gamma => {}
                Base::Z(k) => {
                    if !k.is_unit() {
                        return Err(Error::NotUnit(k.to_string()));
                    }
                    l.int_exp()?;
                }
            }
        }
        Ok(())
    }

    /// Smallest precision among residue exponents and indices, if any.
    pub fn min_precision(&self) -> Option<u32> {
        self.letters
            .iter()
            .flat_map(|l| {
                let k = match &l.base {
                    Base::Z(k) => k.precision(),
                    _ => None,
                };
                [k, l.exp.precision()]
            })
            .flatten()
            .min()
    }

    /// Canonical form: Z exponents folded into the index, adjacent A-letters
    /// with equal index merged, and every maximal run of γ/z letters
    /// rewritten as `γ^m z_k` using `z_k γ^m = γ^(km) z_k` and
    /// `z_k z_k' = z_(kk')`. Exact zero exponents and `z_1` are dropped.
    pub fn normalized(&self) -> Word {
        enum Item {
            A(u32, BigInt),
            Run(Dyadic, Dyadic),
        }
        let run_trivial = |m: &Dyadic, k: &Dyadic| m.is_exact_zero() && k.is_exact_one();
        let mut stack: Vec<Item> = Vec::new();
        for l in &self.letters {
            match &l.base {
                Base::A(i) => {
                    let Ok(e) = l.int_exp() else {
                        // Invalid words are kept verbatim so validation can report them.
                        return self.clone();
                    };
                    if e.is_zero() {
                        continue;
                    }
                    if let Some(Item::A(j, f)) = stack.last_mut() {
                        if *j == *i {
                            *f += e;
                            if f.is_zero() {
                                stack.pop();
                            }
                            continue;
                        }
                    }
                    stack.push(Item::A(*i, e));
                }
                Base::Gamma | Base::Z(_) => {
                    let (gm, zk) = match &l.base {
                        Base::Gamma => (l.exp.clone(), Dyadic::one()),
                        Base::Z(k) => match z_power(k, &l.exp) {
                            Ok(kk) => (Dyadic::zero(), kk),
                            Err(_) => return self.clone(),
                        },
                        Base::A(_) => unreachable!(),
                    };
                    if let Some(Item::Run(m, k)) = stack.last_mut() {
                        // γ^m z_k γ^a z_j = γ^(m + k a) z_(k j)
                        *m = &*m + &(&*k * &gm);
                        *k = &*k * &zk;
                        if run_trivial(m, k) {
                            stack.pop();
                        }
                    } else if !run_trivial(&gm, &zk) {
                        stack.push(Item::Run(gm, zk));
                    }
                }
            }
        }
        let mut letters = Vec::with_capacity(stack.len() + 1);
        for item in stack {
            match item {
                Item::A(i, e) => letters.push(Letter {
                    base: Base::A(i),
                    exp: Dyadic::exact(e),
                }),
                Item::Run(m, k) => {
                    if !m.is_exact_zero() {
                        letters.push(Letter::gamma(m));
                    }
                    if !k.is_exact_one() {
                        letters.push(Letter::z(k));
                    }
                }
            }
        }
        Word { letters }
    }

    /// Product of the Z-letter indices: the unit `k` with `w ∈ G z_k`.
    pub fn coset_label(&self) -> Result<Dyadic> {
        let mut k = Dyadic::one();
        for l in &self.letters {
            if let Base::Z(j) = &l.base {
                k = &k * &z_power(j, &l.exp)?;
            }
        }
        Ok(k)
    }

    /// Number of A-letters weighted by `|exponent|` in this representative.
    pub fn a_length_upper(&self) -> Result<u64> {
        let mut total = BigInt::zero();
        for l in &self.letters {
            if let Base::A(_) = l.base {
                total += l.int_exp()?.abs();
            }
        }
        total
            .to_u64()
            .ok_or_else(|| Error::Unsupported("a-length exceeds u64".into()))
    }

    /// Same word with every exponent and index reduced to at most `bits`.
    /// A-exponents stay exact; the result acts like `self` on `T_bits`.
    pub fn reduced(&self, bits: u32) -> Word {
        let letters = self
            .letters
            .iter()
            .map(|l| match &l.base {
                Base::A(_) => l.clone(),
                Base::Gamma => Letter::gamma(l.exp.reduced(bits)),
                Base::Z(k) => Letter {
                    base: Base::Z(k.reduced(bits)),
                    exp: l.exp.clone(),
                },
            })
            .collect();
        Word { letters }
    }
}

/// `k^e` for an exact integer `e`; negative powers of exact units other than
/// `±1` are inverted at the default precision.
pub(crate) fn z_power(k: &Dyadic, e: &Dyadic) -> Result<Dyadic> {
    if !e.is_exact() {
        return Err(Error::InexactExponent(e.to_string()));
    }
    if !k.is_unit() {
        return Err(Error::NotUnit(k.to_string()));
    }
    if e.value().is_one() {
        return Ok(k.clone());
    }
    k.pow(e.value(), DEFAULT_PRECISION)
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.base {
            Base::A(i) => write!(f, "a{i}")?,
            Base::Gamma => f.write_str("g")?,
            Base::Z(k) => write!(f, "z[{k}]")?,
        }
        if !self.exp.is_exact_one() {
            write!(f, "^{}", self.exp)?;
        }
        Ok(())
    }
}

impl fmt::Display for Word {
    /// Expression syntax accepted by the parser; `id` for the empty word.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("id");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_form_rules() {
        let w = Word::from_letters(vec![Letter::z(3), Letter::gamma(1)]).normalized();
        assert_eq!(w, Word::gamma_z(3, 3));
        let w = Word::from_letters(vec![Letter::z(3), Letter::z(3)]).normalized();
        assert_eq!(w, Word::z(9));
        let w =
            Word::from_letters(vec![Letter::gamma(2), Letter::z(5), Letter::gamma(1)]).normalized();
        assert_eq!(w, Word::gamma_z(7, 5));
        let w = Word::from_letters(vec![Letter::a(1, 2), Letter::a(1, -2)]).normalized();
        assert!(w.is_empty());
        let w = Word::from_letters(vec![
            Letter::a(1, 1),
            Letter::gamma(1),
            Letter::gamma(-1),
            Letter::a(1, 1),
        ])
        .normalized();
        assert_eq!(w, Word::a_pow(1, 2));
    }

    #[test]
    fn labels_and_lengths() {
        let w = Word::a(1).mul(&Word::z(3));
        assert_eq!(w.coset_label().unwrap(), Dyadic::exact(3));
        assert_eq!(Word::gamma_pow(7).coset_label().unwrap(), Dyadic::one());
        assert_eq!(
            Word::z(3).mul(&Word::z(5)).coset_label().unwrap(),
            Dyadic::exact(15)
        );
        assert_eq!(w.a_length_upper().unwrap(), 1);
        assert_eq!(Word::gamma_z(5, 3).a_length_upper().unwrap(), 0);
        assert_eq!(Word::a_pow(2, -3).a_length_upper().unwrap(), 3);
    }

    #[test]
    fn inverse_cancels() {
        let w = Word::from_letters(vec![Letter::a(1, 1), Letter::gamma(3), Letter::a(2, -1)]);
        assert!(w.mul(&w.inverse()).is_empty());
        let z = Word::z(-1);
        assert!(z.mul(&z.inverse()).is_empty());
    }

    #[test]
    fn display() {
        let w = Word::from_letters(vec![
            Letter::a(1, 1),
            Letter::gamma(-1),
            Letter::z(Dyadic::residue(5, 16)),
        ]);
        assert_eq!(w.to_string(), "a1*g^-1*z[5%16]");
        assert_eq!(Word::identity().to_string(), "id");
    }
}
