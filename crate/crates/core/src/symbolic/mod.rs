//! Words over `{a_1, ..., a_r, γ, z_k}` and their self-similar structure.
//!
//! The recursions used throughout:
//!
//! ```text
//! a_1 = (a_r, id)σ      a_i = (a_{i-1}, id)  for 1 < i ≤ r
//! γ   = (γ, id)σ        z_k = (z_k, γ^ℓ z_k),  ℓ = (k - 1)/2
//! ```

mod dense;
mod letters;
mod membership;
mod parse;
mod random;
pub(crate) mod residue;
mod sections;
mod signs;
mod word;

pub use dense::{
    approximate_in_a, conjugator_word, gamma_power_word, lift_diagonal, lift_pair,
    z_conjugate_word, DenseApproximation,
};
pub use letters::{letter_portrait, product_portrait};
pub use membership::{membership_u_gamma, normalize_ngamma, Membership, DEFAULT_MEMBERSHIP_DEPTH};
pub use parse::{parse_expression, parse_portrait_expression, PortraitExpr};
pub use random::{random_v_word, random_word, RandomWordSpec};
pub use sections::{descendants_1, root_perm, section, split};
pub use signs::{is_odometer_exact, sign_profile, SignProfile};
pub use word::{Base, Letter, Word};

use crate::portrait::{check_depth, Portrait};
use crate::{Error, Result};

use residue::RWord;

/// The period `r` of the postcritical orbit, fixing the generator recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorSystem {
    r: u32,
}

impl GeneratorSystem {
    pub const MIN_R: u32 = 2;
    pub const MAX_R: u32 = 8;

    pub fn new(r: u32) -> Result<GeneratorSystem> {
        if !(Self::MIN_R..=Self::MAX_R).contains(&r) {
            return Err(Error::Period(r));
        }
        Ok(GeneratorSystem { r })
    }

    /// The Basilica system, `r = 2`.
    pub fn basilica() -> GeneratorSystem {
        GeneratorSystem { r: 2 }
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// `a_1 a_2 ... a_r`.
    pub fn generator_product(&self) -> Word {
        Word::from_letters((1..=self.r).map(|i| Letter::a(i, 1)).collect())
    }
}

impl Default for GeneratorSystem {
    fn default() -> Self {
        GeneratorSystem::basilica()
    }
}

/// The action of `w` on `T_n`, computed top-down from root permutations and
/// sections, sharing identical subtrees.
pub fn truncate_word(w: &Word, n: u32, sys: &GeneratorSystem) -> Result<Portrait> {
    check_depth(n)?;
    w.validate(sys)?;
    Ok(RWord::from_word(w, n)?.to_portrait(sys.r()))
}
