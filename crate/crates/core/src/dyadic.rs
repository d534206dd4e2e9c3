//! Truncated 2-adic integers.
//!
//! A [`Dyadic`] is either an exact (signed, unbounded) integer embedded in
//! `Z_2`, or a residue `value mod 2^P` known to `P` bits. Arithmetic between
//! residues keeps the smaller precision; an exact operand behaves as if it
//! had infinite precision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::{Error, Result, Trit};

/// 2-adic valuation of a [`Dyadic`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Valuation {
    Finite(u32),
    /// All represented bits are zero; the true valuation is at least this.
    AtLeast(u32),
    /// The exact integer zero.
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    value: BigInt,
    // None marks an exact integer.
    precision: Option<u32>,
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn reduce_mod(value: &BigInt, bits: u32) -> BigInt {
    value.mod_floor(&pow2(bits))
}

fn trailing_zeros(value: &BigInt) -> Option<u32> {
    value.trailing_zeros().map(|z| z as u32)
}

impl Dyadic {
    pub fn exact(value: impl Into<BigInt>) -> Self {
        Dyadic {
            value: value.into(),
            precision: None,
        }
    }

    /// The residue `value mod 2^precision`.
    ///
    /// # Panics
    /// If `precision` is zero.
    pub fn residue(value: impl Into<BigInt>, precision: u32) -> Self {
        assert!(precision >= 1, "residue precision must be at least one bit");
        Dyadic {
            value: reduce_mod(&value.into(), precision),
            precision: Some(precision),
        }
    }

    pub fn zero() -> Self {
        Dyadic::exact(0)
    }

    pub fn one() -> Self {
        Dyadic::exact(1)
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn precision(&self) -> Option<u32> {
        self.precision
    }

    pub fn is_exact(&self) -> bool {
        self.precision.is_none()
    }

    /// The exact value as an `i64`, if this is an exact integer that fits.
    pub fn as_i64(&self) -> Option<i64> {
        if self.is_exact() {
            self.value.to_i64()
        } else {
            None
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.is_exact() && self.value.is_zero()
    }

    pub fn is_exact_one(&self) -> bool {
        self.is_exact() && self.value.is_one()
    }

    pub fn is_odd(&self) -> bool {
        self.value.is_odd()
    }

    pub fn is_unit(&self) -> bool {
        self.is_odd()
    }

    pub fn valuation(&self) -> Valuation {
        match trailing_zeros(&self.value) {
            Some(v) => Valuation::Finite(v),
            None => match self.precision {
                None => Valuation::Infinite,
                Some(p) => Valuation::AtLeast(p),
            },
        }
    }

    /// Whether the element is `+1` or `-1`. Residues congruent to `±1` at
    /// full precision are reported as [`Trit::Unknown`].
    pub fn is_plus_minus_one(&self) -> Trit {
        match self.precision {
            None => Trit::from_bool(self.value.abs().is_one()),
            Some(p) => {
                let minus_one = pow2(p) - 1;
                if self.value.is_one() || self.value == minus_one {
                    Trit::Unknown
                } else {
                    Trit::No
                }
            }
        }
    }

    /// `Σ_{i<n} a_i 2^i`, the non-negative representative mod `2^n`.
    pub fn truncate(&self, n: u32) -> Result<BigInt> {
        if let Some(p) = self.precision {
            if n > p {
                return Err(Error::Precision {
                    needed: n,
                    available: p,
                });
            }
        }
        Ok(reduce_mod(&self.value, n))
    }

    /// Residue mod `2^n` as a machine word.
    pub fn residue_u64(&self, n: u32) -> Result<u64> {
        assert!(n <= 64);
        Ok(self
            .truncate(n)?
            .to_u64()
            .expect("residue below 2^64 fits in u64"))
    }

    /// Drops to precision `min(self, bits)`. Exact values become residues.
    pub fn reduced(&self, bits: u32) -> Dyadic {
        let p = self.precision.map_or(bits, |p| p.min(bits));
        Dyadic::residue(self.value.clone(), p)
    }

    fn combine(&self, other: &Dyadic, value: BigInt) -> Dyadic {
        match (self.precision, other.precision) {
            (None, None) => Dyadic::exact(value),
            (Some(p), None) | (None, Some(p)) => Dyadic::residue(value, p),
            (Some(p), Some(q)) => Dyadic::residue(value, p.min(q)),
        }
    }

    /// Exact division by two.
    pub fn halve(&self) -> Result<Dyadic> {
        if self.is_odd() {
            return Err(Error::OddHalve(self.to_string()));
        }
        match self.precision {
            None => Ok(Dyadic::exact(&self.value >> 1usize)),
            Some(1) => Err(Error::Precision {
                needed: 2,
                available: 1,
            }),
            Some(p) => Ok(Dyadic::residue(&self.value >> 1usize, p - 1)),
        }
    }

    /// `ℓ = (k - 1) / 2` for a unit `k`.
    pub fn ell(&self) -> Result<Dyadic> {
        if !self.is_unit() {
            return Err(Error::NotUnit(self.to_string()));
        }
        (self - &Dyadic::one()).halve()
    }

    /// `ν = v_2((k^2 - 1) / 4)` for a unit `k ≠ ±1`.
    pub fn nu(&self) -> Result<u32> {
        if !self.is_unit() {
            return Err(Error::NotUnit(self.to_string()));
        }
        let q = (&(self * self) - &Dyadic::one()).halve()?.halve()?;
        match q.valuation() {
            Valuation::Finite(v) => Ok(v),
            Valuation::Infinite => Err(Error::Precondition(format!(
                "nu is undefined for k = {self}"
            ))),
            Valuation::AtLeast(p) => Err(Error::Precision {
                needed: p + 1,
                available: p,
            }),
        }
    }

    /// Multiplicative inverse of a unit. Exact units other than `±1` have no
    /// exact inverse and are inverted mod `2^working_precision`.
    pub fn inverse(&self, working_precision: u32) -> Result<Dyadic> {
        if !self.is_unit() {
            return Err(Error::NotUnit(self.to_string()));
        }
        let bits = match self.precision {
            None if self.value.abs().is_one() => return Ok(self.clone()),
            None => working_precision,
            Some(p) => p,
        };
        let modulus = pow2(bits);
        let a = reduce_mod(&self.value, bits);
        // Newton iteration x <- x (2 - a x) doubles the number of correct bits.
        let mut x = BigInt::one();
        let mut correct = 1u32;
        while correct < bits {
            let ax = (&a * &x).mod_floor(&modulus);
            x = (&x * (BigInt::from(2) - ax)).mod_floor(&modulus);
            correct *= 2;
        }
        Ok(Dyadic::residue(x, bits))
    }

    /// Integer power; negative exponents go through [`Dyadic::inverse`].
    pub fn pow(&self, exponent: &BigInt, working_precision: u32) -> Result<Dyadic> {
        let (base, e) = if exponent.is_negative() {
            (self.inverse(working_precision)?, -exponent)
        } else {
            (self.clone(), exponent.clone())
        };
        let bits = e.to_biguint().expect("non-negative exponent");
        let mut result = Dyadic {
            value: BigInt::one(),
            precision: base.precision,
        };
        for i in (0..bits.bits()).rev() {
            result = &result * &result;
            if bits.bit(i) {
                result = &result * &base;
            }
        }
        Ok(result)
    }

    /// Compares the represented values in the 2-adic sense: equal precision
    /// classes and equal residues. Exact and residue values never compare equal.
    pub fn same(&self, other: &Dyadic) -> bool {
        self == other
    }

    /// Whether two elements agree mod `2^n`.
    pub fn agrees_mod(&self, other: &Dyadic, n: u32) -> Result<bool> {
        Ok(self.truncate(n)? == other.truncate(n)?)
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        self.combine(rhs, &self.value + &rhs.value)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self.combine(rhs, &self.value - &rhs.value)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        self.combine(rhs, &self.value * &rhs.value)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        match self.precision {
            None => Dyadic::exact(-&self.value),
            Some(p) => Dyadic::residue(-&self.value, p),
        }
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::exact(v)
    }
}

impl From<BigInt> for Dyadic {
    fn from(v: BigInt) -> Self {
        Dyadic::exact(v)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Arbitrary but total: used only to make normal forms and reports deterministic.
impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        self.precision
            .cmp(&other.precision)
            .then_with(|| self.value.cmp(&other.value))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.precision {
            None => write!(f, "{}", self.value),
            Some(p) => write!(f, "{}%{}", self.value, p),
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Plain signed integers are exact; `v%P` is the residue of `v` mod `2^P`.
    fn from_str(text: &str) -> Result<Self> {
        let syntax = |message: &str| Error::Syntax {
            position: 0,
            message: format!("{message} in 2-adic literal {text:?}"),
        };
        let parse_int = |s: &str| -> Result<BigInt> {
            let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(syntax("expected an integer"));
            }
            s.parse::<BigInt>()
                .map_err(|_| syntax("expected an integer"))
        };
        match text.split_once('%') {
            None => Ok(Dyadic::exact(parse_int(text.trim())?)),
            Some((v, p)) => {
                let value = parse_int(v.trim())?;
                let precision: u32 = p
                    .trim()
                    .parse()
                    .map_err(|_| syntax("expected a precision"))?;
                if precision == 0 {
                    return Err(syntax("precision must be positive"));
                }
                Ok(Dyadic::residue(value, precision))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(v: i64) -> Dyadic {
        Dyadic::exact(v)
    }

    #[test]
    fn valuations() {
        assert_eq!(d(12).valuation(), Valuation::Finite(2));
        assert_eq!(d(0).valuation(), Valuation::Infinite);
        assert_eq!(Dyadic::residue(0, 8).valuation(), Valuation::AtLeast(8));
        assert_eq!(Dyadic::residue(256, 8).valuation(), Valuation::AtLeast(8));
    }

    #[test]
    fn ell_and_nu() {
        assert_eq!(d(3).ell().unwrap(), d(1));
        assert_eq!(d(5).ell().unwrap(), d(2));
        let l7 = d(7).ell().unwrap();
        assert_eq!(l7, d(3));
        assert_eq!(l7.valuation(), Valuation::Finite(0));
        assert!(matches!(d(4).ell(), Err(Error::NotUnit(_))));

        assert_eq!(d(3).nu().unwrap(), 1);
        assert_eq!(d(5).nu().unwrap(), 1);
        assert_eq!(d(7).nu().unwrap(), 2);
        assert_eq!(d(17).nu().unwrap(), 3);
        assert!(d(1).nu().is_err());
        assert!(d(-1).nu().is_err());
        // 1 + 2^10 at 10 bits is indistinguishable from 1.
        assert!(matches!(
            Dyadic::residue(1 + 1024, 10).nu(),
            Err(Error::Precision { .. })
        ));
    }

    #[test]
    fn residue_ell_loses_one_bit() {
        let k = Dyadic::residue(5, 16);
        let l = k.ell().unwrap();
        assert_eq!(l, Dyadic::residue(2, 15));
    }

    #[test]
    fn truncation() {
        assert_eq!(d(3).truncate(1).unwrap(), BigInt::from(1));
        assert_eq!(d(11).truncate(3).unwrap(), BigInt::from(3));
        assert_eq!(d(-1).truncate(4).unwrap(), BigInt::from(15));
        assert!(Dyadic::residue(11, 3).truncate(4).is_err());
        // k with v_2(k - 1) < n truncates to an odd integer above one
        let k = d(1 + 8 + 64);
        for n in 4..10 {
            let t = k.truncate(n).unwrap();
            assert!(t > BigInt::one() && t.is_odd());
        }
    }

    #[test]
    fn ring_operations() {
        let a = Dyadic::residue(3, 4);
        let b = Dyadic::residue(5, 4);
        assert_eq!(&a + &b, Dyadic::residue(8, 4));
        let nine = &d(3) * &d(3);
        assert_eq!(nine, d(9));
        assert_eq!((&nine - &d(1)).valuation(), Valuation::Finite(3));
        assert_eq!(d(6).halve().unwrap(), d(3));
        assert!(matches!(d(7).halve(), Err(Error::OddHalve(_))));
        // mixed precision keeps the minimum
        let c = &Dyadic::residue(7, 10) * &Dyadic::residue(7, 6);
        assert_eq!(c.precision(), Some(6));
        // exact operand is infinite precision
        let e = &Dyadic::residue(7, 10) + &d(1);
        assert_eq!(e, Dyadic::residue(8, 10));
    }

    #[test]
    fn negatives_are_twos_complement() {
        let m = (-&d(1)).reduced(8);
        assert_eq!(m, Dyadic::residue(255, 8));
        assert_eq!(Dyadic::residue(-3, 4), Dyadic::residue(13, 4));
    }

    #[test]
    fn inverses_and_powers() {
        let inv = d(3).inverse(16).unwrap();
        assert_eq!(&inv * &d(3), Dyadic::residue(1, 16));
        assert_eq!(d(-1).inverse(16).unwrap(), d(-1));
        let p = d(3).pow(&BigInt::from(4), 64).unwrap();
        assert_eq!(p, d(81));
        let q = d(5).pow(&BigInt::from(-2), 20).unwrap();
        assert_eq!(&q * &d(25), Dyadic::residue(1, 20));
    }

    #[test]
    fn plus_minus_one() {
        assert_eq!(d(1).is_plus_minus_one(), Trit::Yes);
        assert_eq!(d(-1).is_plus_minus_one(), Trit::Yes);
        assert_eq!(d(3).is_plus_minus_one(), Trit::No);
        assert_eq!(Dyadic::residue(1, 8).is_plus_minus_one(), Trit::Unknown);
        assert_eq!(Dyadic::residue(255, 8).is_plus_minus_one(), Trit::Unknown);
        assert_eq!(Dyadic::residue(5, 8).is_plus_minus_one(), Trit::No);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("5".parse::<Dyadic>().unwrap(), d(5));
        assert_eq!("-3".parse::<Dyadic>().unwrap(), d(-3));
        assert_eq!("5%16".parse::<Dyadic>().unwrap(), Dyadic::residue(5, 16));
        assert_eq!(Dyadic::residue(5, 16).to_string(), "5%16");
        assert!("5%0".parse::<Dyadic>().is_err());
        assert!("x".parse::<Dyadic>().is_err());
    }
}
