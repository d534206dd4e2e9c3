use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::portrait::check_depth;
use crate::{Dyadic, Error, Result, Trit};

use super::residue::RWord;
use super::signs::sign_profile;
use super::word::z_power;
use super::{Base, GeneratorSystem, Letter, Word};

/// Depth used by the finite membership test unless told otherwise.
pub const DEFAULT_MEMBERSHIP_DEPTH: u32 = 12;

/// Verdict of the `𝒰(γ) = {γ^m z_k : k ≠ ±1}` membership test.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Membership {
    /// Exactly `γ^m z_k` with `k ≠ ±1`.
    Yes {
        m: Dyadic,
        k: Dyadic,
    },
    /// Agrees with `γ^m z_k`, `k ≢ ±1 mod 2^depth`, on `T_depth`.
    YesToDepth {
        m: u64,
        k: u64,
        depth: u32,
    },
    No,
    /// The index is `±1` to all known bits.
    Unknown,
    /// The depth test could not separate `k` from `±1`.
    UnknownToDepth {
        depth: u32,
    },
}

impl Membership {
    /// Only exact verdicts are definite.
    pub fn trit(&self) -> Trit {
        match self {
            Membership::Yes { .. } => Trit::Yes,
            Membership::No => Trit::No,
            _ => Trit::Unknown,
        }
    }
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Membership::Yes { m, k } => write!(f, "yes(m={m}, k={k})"),
            Membership::YesToDepth { m, k, depth } => {
                write!(f, "yes-to-depth({depth}; m={m}, k={k})")
            }
            Membership::No => f.write_str("no"),
            Membership::Unknown => f.write_str("unknown"),
            Membership::UnknownToDepth { depth } => write!(f, "unknown-to-depth({depth})"),
        }
    }
}

/// `(m, k)` with `w = γ^m z_k`, for words without A-letters.
pub(crate) fn ngamma_parts(w: &Word) -> Result<(Dyadic, Dyadic)> {
    if w.has_a_letters() {
        return Err(Error::Precondition(
            "normal form γ^m z_k needs a word without a-letters".into(),
        ));
    }
    let mut m = Dyadic::zero();
    let mut k = Dyadic::one();
    for l in w.letters() {
        match &l.base {
            Base::Gamma => m = &m + &(&k * &l.exp),
            Base::Z(j) => k = &k * &z_power(j, &l.exp)?,
            Base::A(_) => unreachable!(),
        }
    }
    Ok((m, k))
}

/// Rewrites a γ/z word into `γ^m z_k`.
pub fn normalize_ngamma(w: &Word) -> Result<Word> {
    let (m, k) = ngamma_parts(w)?;
    Ok(Word::from_letters(vec![Letter::gamma(m), Letter::z(k)]).normalized())
}

/// Decides `w ∈ 𝒰(γ)` exactly where possible and otherwise by comparing
/// `w γ w^-1` with powers of `γ` on `T_depth`.
pub fn membership_u_gamma(w: &Word, sys: &GeneratorSystem, depth: u32) -> Result<Membership> {
    w.validate(sys)?;
    let w = w.normalized();
    if !w.has_a_letters() {
        let (m, k) = ngamma_parts(&w)?;
        return Ok(match k.is_plus_minus_one() {
            Trit::Yes => Membership::No,
            Trit::Unknown => Membership::Unknown,
            Trit::No => Membership::Yes { m, k },
        });
    }

    // Exact obstructions. The coset label of γ^m z_k is k, so a word in a
    // coset labelled ±1 cannot lie in 𝒰(γ).
    let label = w.coset_label()?;
    if label.is_plus_minus_one() == Trit::Yes {
        return Ok(Membership::No);
    }
    // sgn_n(γ^m z_k) is constant for n ≥ 2, and sgn_2 / sgn_1 = -1 iff k ≡ 3 mod 4.
    let profile = sign_profile(&w, sys)?;
    let vals = profile.values();
    if vals[1..].iter().any(|&s| s != vals[1]) {
        return Ok(Membership::No);
    }
    if label.precision().is_none_or(|p| p >= 2) {
        let k_is_3 = label.truncate(2)? == BigInt::from(3);
        if (vals[0] * vals[1] == -1) != k_is_3 {
            return Ok(Membership::No);
        }
    }

    check_depth(depth)?;
    if let Some(p) = w.min_precision() {
        if p < depth {
            return Err(Error::Precision {
                needed: depth,
                available: p,
            });
        }
    }
    let r = sys.r();
    let conj = w.mul(&Word::gamma()).mul(&w.inverse());
    let c = RWord::from_word(&conj, depth)?.to_portrait(r);
    let Some(t) = c.gamma_exponent_recover() else {
        return Ok(Membership::No);
    };
    let modulus = 1u64 << depth;
    if let Ok(lab) = label.residue_u64(depth) {
        if lab != t {
            return Ok(Membership::No);
        }
    }
    if t == 1 || t == modulus - 1 {
        return Ok(Membership::UnknownToDepth { depth });
    }
    let stripped = w.mul(&Word::z(Dyadic::residue(t, depth)).inverse());
    let u = RWord::from_word(&stripped, depth)?.to_portrait(r);
    Ok(match u.gamma_exponent_recover() {
        Some(m) => Membership::YesToDepth { m, k: t, depth },
        None => Membership::No,
    })
}
