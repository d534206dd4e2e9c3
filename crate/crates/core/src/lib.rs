//! Finite-level computations with automorphisms of the rooted binary tree:
//! the standard odometer, its normalizer elements `z_k`, the iterated
//! monodromy generators `a_1, ..., a_r` of a quadratic polynomial with a
//! periodic postcritical orbit, and the stable-cycle counts `s_n`.
//!
//! The crate is split into
//!
//! * [`dyadic`]: truncated 2-adic integers used for exponents and indices,
//! * [`portrait`]: explicit automorphisms of the depth-`n` tree,
//! * [`symbolic`]: words over the generator alphabet and their sections,
//! * [`dynamics`]: stable cycles, settledness profiles, descendants, blocks,
//! * [`verify`]: the named check suites and their JSON report.

pub mod dyadic;
pub mod dynamics;
mod error;
pub mod portrait;
pub mod symbolic;
pub mod verify;

pub use dyadic::{Dyadic, Valuation};
pub use error::{Error, Result};
pub use portrait::{CanonicalKey, CycleTable, Portrait};
pub use symbolic::{Base, GeneratorSystem, Letter, Word};

/// Default residue precision in bits.
pub const DEFAULT_PRECISION: u32 = 64;

/// Bits of headroom demanded above the level of any level-`n` computation.
pub const PRECISION_HEADROOM: u32 = 8;

/// Three-valued verdict used wherever a question may be undecidable at the
/// current precision or depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trit {
    Yes,
    No,
    Unknown,
}

impl Trit {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Trit::Yes
        } else {
            Trit::No
        }
    }

    /// Kleene conjunction.
    pub fn and(self, other: Trit) -> Trit {
        match (self, other) {
            (Trit::No, _) | (_, Trit::No) => Trit::No,
            (Trit::Yes, Trit::Yes) => Trit::Yes,
            _ => Trit::Unknown,
        }
    }

    /// Kleene disjunction.
    pub fn or(self, other: Trit) -> Trit {
        match (self, other) {
            (Trit::Yes, _) | (_, Trit::Yes) => Trit::Yes,
            (Trit::No, Trit::No) => Trit::No,
            _ => Trit::Unknown,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Trit::Yes => "yes",
            Trit::No => "no",
            Trit::Unknown => "unknown",
        }
    }
}

impl std::fmt::Display for Trit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Checks that `precision` leaves the required headroom above `level`.
pub fn check_precision(precision: u32, level: u32) -> Result<()> {
    let needed = level + PRECISION_HEADROOM;
    if precision < needed {
        return Err(Error::Precision {
            needed,
            available: precision,
        });
    }
    Ok(())
}
