use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::portrait::{check_depth, cycles_of, Cycle, Portrait};
use crate::symbolic::residue::RWord;
use crate::symbolic::{sign_profile, split, GeneratorSystem, Word};
use crate::{Error, Result};

/// Depth budget for portrait-mode stability checks.
pub const DEFAULT_DEPTH_BUDGET: u32 = 12;

/// Whether a cycle keeps doubling when lifted to deeper levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum StabilityStatus {
    /// The section product is an odometer, so every lift doubles.
    #[serde(rename = "certified")]
    Certified,
    /// Lifts double through this many further levels.
    #[serde(rename = "to_depth")]
    StableToDepth(u32),
    /// First absolute level at which the lift does not double.
    #[serde(rename = "splits_at")]
    Splits(u32),
}

impl StabilityStatus {
    /// Stable as far as was examined.
    pub fn is_stable(&self) -> bool {
        !matches!(self, StabilityStatus::Splits(_))
    }
}

/// Ordered product of the vertex sections along a cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SectionProduct {
    Word(Word),
    Portrait(Portrait),
}

impl Serialize for SectionProduct {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(1))?;
        match self {
            SectionProduct::Word(w) => m.serialize_entry("word", &w.to_string())?,
            SectionProduct::Portrait(p) => m.serialize_entry("portrait", &p.to_json())?,
        }
        m.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleRecord {
    pub level: u32,
    pub representative: u32,
    pub length: u32,
    /// The orbit `v, vα, vα², ...`.
    pub members: Vec<u32>,
    pub section_product: SectionProduct,
    pub status: StabilityStatus,
}

fn check_orbit(perm: &[u32], cycle: &Cycle) -> Result<()> {
    let ok = !cycle.members.is_empty()
        && cycle.members.len() == cycle.length as usize
        && cycle.members[0] == cycle.representative
        && cycle.members.iter().enumerate().all(|(i, &v)| {
            (v as usize) < perm.len()
                && perm[v as usize] == cycle.members[(i + 1) % cycle.members.len()]
        });
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition("not an orbit of the element".into()))
    }
}

/// Exact sections of `w` at every vertex of level `n`, indexed MSB-first,
/// with the induced permutation of that level.
pub(crate) fn word_level_sections(
    w: &Word,
    n: u32,
    sys: &GeneratorSystem,
) -> Result<(Vec<Word>, Vec<u32>)> {
    check_depth(n)?;
    let mut sections = vec![w.normalized()];
    let mut perm = vec![0u32];
    for _ in 0..n {
        let mut next_s = vec![Word::identity(); sections.len() * 2];
        let mut next_p = vec![0u32; perm.len() * 2];
        for (u, s) in sections.iter().enumerate() {
            let (a, b, swap) = split(s, sys)?;
            for (c, part) in [(0u32, a), (1u32, b)] {
                let child = 2 * u + c as usize;
                next_p[child] = 2 * perm[u] + (c ^ swap as u32);
                next_s[child] = part;
            }
        }
        sections = next_s;
        perm = next_p;
    }
    Ok((sections, perm))
}

/// Residue sections at level `n` of a word held at precision `≥ n`.
pub(crate) fn residue_level_sections(w: &RWord, n: u32, r: u32) -> (Vec<RWord>, Vec<u32>) {
    let mut sections = vec![w.clone()];
    let mut perm = vec![0u32];
    for _ in 0..n {
        let mut next_s = Vec::with_capacity(sections.len() * 2);
        let mut next_p = vec![0u32; perm.len() * 2];
        for (u, s) in sections.iter().enumerate() {
            let (a, b, swap) = s.split(r);
            next_p[2 * u] = 2 * perm[u] + swap as u32;
            next_p[2 * u + 1] = 2 * perm[u] + !swap as u32;
            next_s.push(a);
            next_s.push(b);
        }
        sections = next_s;
        perm = next_p;
    }
    (sections, perm)
}

fn status_from_word(beta: &Word, level: u32, sys: &GeneratorSystem) -> Result<StabilityStatus> {
    let profile = sign_profile(beta, sys)?;
    Ok(match profile.first_plus() {
        None => StabilityStatus::Certified,
        Some(j) => StabilityStatus::Splits(level + j),
    })
}

/// Status of a level-`level` cycle of a word: the cycle is stable exactly
/// when its section product is an odometer, which the exact sign profile
/// decides for all levels at once.
pub fn stable_status_word(
    w: &Word,
    cycle: &Cycle,
    level: u32,
    sys: &GeneratorSystem,
) -> Result<StabilityStatus> {
    let (sections, perm) = word_level_sections(w, level, sys)?;
    check_orbit(&perm, cycle)?;
    let beta = Word::concat(cycle.members.iter().map(|&v| &sections[v as usize]));
    status_from_word(&beta, level, sys)
}

/// Status of a level-`level` cycle of a portrait, checking the signs of the
/// section product on `budget` further levels.
pub fn stable_status_portrait(
    p: &Portrait,
    cycle: &Cycle,
    level: u32,
    budget: u32,
) -> Result<StabilityStatus> {
    if budget < 1 {
        return Err(Error::Precondition(
            "depth budget must be at least 1".into(),
        ));
    }
    if p.depth() < level + budget {
        return Err(Error::Level {
            level: level + budget,
            depth: p.depth(),
        });
    }
    let perm = p.level_permutation(level)?;
    check_orbit(&perm, cycle)?;
    let beta = portrait_section_product(p, cycle, level)?;
    portrait_status(&beta, level, budget)
}

fn portrait_section_product(p: &Portrait, cycle: &Cycle, level: u32) -> Result<Portrait> {
    let mut beta = Portrait::identity(p.depth() - level);
    for &v in &cycle.members {
        beta = beta.then(&p.section_at(v, level)?);
    }
    Ok(beta)
}

fn portrait_status(beta: &Portrait, level: u32, budget: u32) -> Result<StabilityStatus> {
    for j in 1..=budget {
        if beta.sign_at(j)? == 1 {
            return Ok(StabilityStatus::Splits(level + j));
        }
    }
    Ok(StabilityStatus::StableToDepth(budget))
}

/// All cycles of a word on level `n`, with exact section products.
pub fn cycle_records_word(w: &Word, n: u32, sys: &GeneratorSystem) -> Result<Vec<CycleRecord>> {
    w.validate(sys)?;
    let (sections, perm) = word_level_sections(w, n, sys)?;
    cycles_of(&perm)
        .into_iter()
        .map(|c| {
            let beta = Word::concat(c.members.iter().map(|&v| &sections[v as usize]));
            let status = status_from_word(&beta, n, sys)?;
            Ok(CycleRecord {
                level: n,
                representative: c.representative,
                length: c.length,
                members: c.members,
                section_product: SectionProduct::Word(beta),
                status,
            })
        })
        .collect()
}

/// All cycles of a portrait on level `n`, checked through `budget` further levels.
pub fn cycle_records_portrait(p: &Portrait, n: u32, budget: u32) -> Result<Vec<CycleRecord>> {
    if budget < 1 {
        return Err(Error::Precondition(
            "depth budget must be at least 1".into(),
        ));
    }
    if p.depth() < n + budget {
        return Err(Error::Level {
            level: n + budget,
            depth: p.depth(),
        });
    }
    let perm = p.level_permutation(n)?;
    cycles_of(&perm)
        .into_iter()
        .map(|c| {
            let beta = portrait_section_product(p, &c, n)?;
            let status = portrait_status(&beta, n, budget)?;
            Ok(CycleRecord {
                level: n,
                representative: c.representative,
                length: c.length,
                members: c.members,
                section_product: SectionProduct::Portrait(beta),
                status,
            })
        })
        .collect()
}

/// The definition read literally: follows the vertices above a level-`level`
/// cycle through `extra` further levels and returns the first level where
/// they fail to form a single cycle of doubled length.
pub fn lift_doubling_failure(
    p: &Portrait,
    cycle: &Cycle,
    level: u32,
    extra: u32,
) -> Result<Option<u32>> {
    if p.depth() < level + extra {
        return Err(Error::Level {
            level: level + extra,
            depth: p.depth(),
        });
    }
    for m in level + 1..=level + extra {
        let perm = p.level_permutation(m)?;
        let start = cycle.representative << (m - level);
        let mut len = 1u64;
        let mut v = perm[start as usize];
        while v != start {
            v = perm[v as usize];
            len += 1;
        }
        if len != (cycle.length as u64) << (m - level) {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// [`lift_doubling_failure`] for every cycle of level `level` at once.
pub fn lift_doubling_failures(
    p: &Portrait,
    level: u32,
    extra: u32,
) -> Result<Vec<(Cycle, Option<u32>)>> {
    if p.depth() < level + extra {
        return Err(Error::Level {
            level: level + extra,
            depth: p.depth(),
        });
    }
    let perms = (level..=level + extra)
        .map(|m| p.level_permutation(m))
        .collect::<Result<Vec<_>>>()?;
    Ok(cycles_of(&perms[0])
        .into_iter()
        .map(|c| {
            let fail = (1..=extra).find(|&d| {
                let perm = &perms[d as usize];
                let start = c.representative << d;
                let mut len = 1u64;
                let mut v = perm[start as usize];
                while v != start {
                    v = perm[v as usize];
                    len += 1;
                }
                len != (c.length as u64) << d
            });
            (c, fail.map(|d| level + d))
        })
        .collect())
}
