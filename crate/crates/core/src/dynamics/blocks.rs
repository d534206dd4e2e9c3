use serde::Serialize;

use crate::symbolic::{
    descendants_1, membership_u_gamma, root_perm, split, GeneratorSystem, Membership, Word,
    DEFAULT_MEMBERSHIP_DEPTH,
};
use crate::{Dyadic, Error, Result, Trit};

use super::count::{Mode, StableCounter};
use super::descendants::{dedup_elements, normal_form, DESCENDANT_LIMIT};

/// Default number of descendant levels examined for blocks.
pub const DEFAULT_BLOCK_DEPTH: u32 = 12;

/// One descendant examined by [`block_analysis`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockEntry {
    pub element: Word,
    pub coset_label: Dyadic,
    pub membership: Membership,
    /// Swap root, or a first section in `𝒰(γ)`.
    pub is_block: Trit,
}

impl BlockEntry {
    fn in_u(&self) -> Trit {
        self.membership.trit()
    }

    /// Whether this descendant is harmless for the block property.
    fn verdict(&self) -> Trit {
        self.in_u().or(self.is_block)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockLevel {
    pub level: u32,
    /// First descendants of the previous level's members outside `𝒰(γ)`.
    pub entries: Vec<BlockEntry>,
    pub is_block: Trit,
    /// The element of `D_n(α)` when it is known to be unique.
    pub member: Option<Word>,
    /// `sgn_1` of that element.
    pub d_sign: Option<i8>,
}

impl BlockLevel {
    /// Size of `D_n(α)`, or `None` when some membership is undecided.
    pub fn d_size(&self) -> Option<usize> {
        let mut n = 0;
        for e in &self.entries {
            match e.in_u() {
                Trit::No => n += 1,
                Trit::Unknown => return None,
                Trit::Yes => {}
            }
        }
        Some(n)
    }

    fn followed(&self) -> impl Iterator<Item = &Word> {
        self.entries
            .iter()
            .filter(|e| e.in_u() != Trit::Yes)
            .map(|e| &e.element)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockReport {
    /// Requested depth.
    pub depth: u32,
    pub levels: Vec<BlockLevel>,
    /// Every examined descendant is a block; vacuous levels past
    /// `terminated_at` count as blocks.
    pub stable_block: Trit,
    /// First `n ≥ 1` with `D_n(α)` empty.
    pub terminated_at: Option<u32>,
}

fn sign1(w: &Word) -> Result<i8> {
    Ok(if root_perm(w)? { -1 } else { 1 })
}

fn membership(w: &Word, sys: &GeneratorSystem) -> Result<Membership> {
    let depth = w.min_precision().map_or(DEFAULT_MEMBERSHIP_DEPTH, |p| {
        p.min(DEFAULT_MEMBERSHIP_DEPTH)
    });
    membership_u_gamma(w, sys, depth)
}

fn is_block(w: &Word, sys: &GeneratorSystem) -> Result<Trit> {
    let (a, b, swap) = split(w, sys)?;
    if swap {
        return Ok(Trit::Yes);
    }
    Ok(membership(&a, sys)?.trit().or(membership(&b, sys)?.trit()))
}

fn examine(level: u32, words: Vec<Word>, sys: &GeneratorSystem) -> Result<BlockLevel> {
    let entries = words
        .into_iter()
        .map(|w| {
            Ok(BlockEntry {
                coset_label: w.coset_label()?,
                membership: membership(&w, sys)?,
                is_block: is_block(&w, sys)?,
                element: w,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let is_block = entries
        .iter()
        .fold(Trit::Yes, |acc, e| acc.and(e.verdict()));
    let (member, d_sign) = {
        let outside: Vec<&BlockEntry> = entries.iter().filter(|e| e.in_u() != Trit::Yes).collect();
        match outside[..] {
            [only] if only.in_u() == Trit::No => {
                (Some(only.element.clone()), Some(sign1(&only.element)?))
            }
            _ => (None, None),
        }
    };
    Ok(BlockLevel {
        level,
        entries,
        is_block,
        member,
        d_sign,
    })
}

fn next_words(prev: &BlockLevel, sys: &GeneratorSystem) -> Result<Vec<Word>> {
    let mut next = Vec::new();
    for w in prev.followed() {
        next.extend(descendants_1(w, sys)?);
    }
    let next = dedup_elements(next, sys)?;
    if next.len() > DESCENDANT_LIMIT {
        return Err(Error::Unsupported(format!(
            "more than {DESCENDANT_LIMIT} descendants outside the uniformly settled part"
        )));
    }
    Ok(next)
}

/// Walks the descendants of `w` outside `𝒰(γ)` (those inside stay inside)
/// for `depth` levels, checking the block property at each. Stops at the
/// first level that is not a block or once no descendant is left.
pub fn block_analysis(w: &Word, depth: u32, sys: &GeneratorSystem) -> Result<BlockReport> {
    w.validate(sys)?;
    let mut levels = vec![examine(0, vec![normal_form(w)], sys)?];
    let mut terminated_at = None;
    for n in 1..=depth {
        let prev = levels.last().expect("nonempty");
        if prev.is_block == Trit::No {
            break;
        }
        let words = next_words(prev, sys)?;
        if words.is_empty() {
            terminated_at = Some(n);
            break;
        }
        levels.push(examine(n, words, sys)?);
    }
    let stable_block = levels.iter().fold(Trit::Yes, |acc, l| acc.and(l.is_block));
    Ok(BlockReport {
        depth,
        levels,
        stable_block,
        terminated_at,
    })
}

/// `d(α)_n` for `n = 0..=N` with the run-length decomposition of the signs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DSequence {
    /// `d(α)_0, d(α)_1, ...`; `None` where `D_n(α)` could not be decided.
    pub values: Vec<Option<i8>>,
    /// First `n ≥ 1` with `D_n(α)` empty; the sequence is undefined from there.
    pub terminated_at: Option<u32>,
    /// `(r_t, m_t)`: lengths of the `t`-th run of `+1` and of the run of `-1`
    /// right after it, over the determined prefix. `r_1 = 0` when the
    /// sequence starts with `-1`; the last run may be cut off.
    pub runs: Vec<(u32, u32)>,
}

/// The sign sequence of the unique descendants outside `𝒰(γ)`.
pub fn d_sequence(w: &Word, max_level: u32, sys: &GeneratorSystem) -> Result<DSequence> {
    w.validate(sys)?;
    let mut level = examine(0, vec![normal_form(w)], sys)?;
    let mut values = vec![Some(sign1(w)?)];
    let mut terminated_at = None;
    for n in 1..=max_level {
        let words = next_words(&level, sys)?;
        if words.is_empty() {
            terminated_at = Some(n);
            break;
        }
        level = examine(n, words, sys)?;
        let followed = level.followed().count();
        match level.d_size() {
            Some(0) => {
                terminated_at = Some(n);
                break;
            }
            Some(1) => values.push(level.d_sign),
            Some(k) => {
                return Err(Error::Precondition(format!(
                    "D_{n} has {k} elements; the sequence needs exactly one"
                )))
            }
            None if followed == 1 => values.push(None),
            None => return Err(Error::Indeterminate(format!("size of D_{n} is undecided"))),
        }
    }
    let runs = runs_of(&values);
    Ok(DSequence {
        values,
        terminated_at,
        runs,
    })
}

fn runs_of(values: &[Option<i8>]) -> Vec<(u32, u32)> {
    let mut runs: Vec<(u32, u32)> = Vec::new();
    for v in values {
        match v {
            Some(1) => match runs.last_mut() {
                Some((_, m)) if *m == 0 => runs.last_mut().expect("nonempty").0 += 1,
                _ => runs.push((1, 0)),
            },
            Some(_) => match runs.last_mut() {
                Some((_, m)) => *m += 1,
                None => runs.push((0, 1)),
            },
            None => break,
        }
    }
    runs
}

/// A lower bound for `s_n(α)` from an all-ones prefix of the d-sequence,
/// next to the exact value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Estimate {
    pub t: u32,
    pub n: u32,
    pub coset_label: Dyadic,
    /// `ν = v_2((k^2 - 1) / 4)`.
    pub nu: u32,
    pub beta_t: Word,
    /// `s_{n-t}(β_t)`.
    pub s_beta: u64,
    /// `s_{n-t}(β_t) + 2^n - 2^(n-t) - t 2^(ν+1)`.
    pub bound: i128,
    /// `s_n(α)`.
    pub actual: u64,
    pub holds: bool,
}

/// Evaluates the bound `s_n(α) ≥ s_{n-t}(β_t) + 2^n - 2^(n-t) - t 2^(ν+1)`
/// for `α ∈ G z_k`, `k ≠ ±1`, a block through depth `t` with
/// `d(α)_0 = ... = d(α)_t = 1`, and `n ≥ ν + 1 + t`.
pub fn estimate_111(w: &Word, t: u32, n: u32, sys: &GeneratorSystem) -> Result<Estimate> {
    let label = w.coset_label()?;
    if label.is_plus_minus_one() != Trit::No {
        return Err(Error::Precondition(format!(
            "coset label {label} must differ from ±1"
        )));
    }
    let nu = label.nu()?;
    if n < nu + 1 + t {
        return Err(Error::Precondition(format!(
            "need n ≥ ν + 1 + t = {}",
            nu + 1 + t
        )));
    }
    let report = block_analysis(w, t, sys)?;
    if report.stable_block != Trit::Yes {
        return Err(Error::Precondition(format!(
            "not a block through depth {t} ({})",
            report.stable_block
        )));
    }
    let seq = d_sequence(w, t, sys)?;
    if seq.values.len() != t as usize + 1 || seq.values.iter().any(|&v| v != Some(1)) {
        return Err(Error::Precondition(format!(
            "d(α)_i = 1 fails for some i ≤ {t}"
        )));
    }
    let beta_t = if t == 0 {
        normal_form(w)
    } else {
        report.levels[t as usize]
            .member
            .clone()
            .ok_or_else(|| Error::Precondition(format!("D_{t} is not a single element")))?
    };
    let mut counter = StableCounter::new(*sys);
    let s_beta = counter.count(&beta_t, n - t, Mode::Recursive)?;
    let actual = counter.count(w, n, Mode::Recursive)?;
    let bound =
        s_beta as i128 + (1i128 << n) - (1i128 << (n - t)) - t as i128 * (1i128 << (nu + 1));
    Ok(Estimate {
        t,
        n,
        coset_label: label,
        nu,
        beta_t,
        s_beta,
        bound,
        actual,
        holds: bound <= actual as i128,
    })
}
