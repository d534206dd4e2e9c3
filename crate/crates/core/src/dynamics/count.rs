use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::portrait::{cycles_of, Portrait};
use crate::symbolic::residue::{RWord, MAX_RESIDUE_BITS};
use crate::symbolic::{GeneratorSystem, Word};
use crate::{Error, Result};

use super::stability::residue_level_sections;

/// Highest level for direct counting, which holds every level-`n` section.
pub const DIRECT_MAX_LEVEL: u32 = 20;

/// Highest level for recursive counting: sections need `n + 2` bits.
pub const RECURSIVE_MAX_LEVEL: u32 = MAX_RESIDUE_BITS - 2;

/// Cap on the number of memoized words in one [`StableCounter`].
pub const MEMO_LIMIT: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Enumerate the cycles of level `n` and test each section product.
    Direct,
    /// `s_n = s_{n-1}(α_0) + s_{n-1}(α_1)` or `2 s_{n-1}(α_0 α_1)`.
    Recursive,
}

/// Counts `s_n` for words of one generator system, sharing a memo table
/// keyed on residue words across calls.
#[derive(Debug)]
pub struct StableCounter {
    sys: GeneratorSystem,
    all: u32,
    memo: HashMap<RWord, u64>,
}

impl StableCounter {
    pub fn new(sys: GeneratorSystem) -> StableCounter {
        StableCounter {
            sys,
            all: (1u32 << (sys.r() + 1)) - 1,
            memo: HashMap::new(),
        }
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// Number of level-`n` vertices lying in stable cycles of `w`.
    pub fn count(&mut self, w: &Word, n: u32, mode: Mode) -> Result<u64> {
        w.validate(&self.sys)?;
        let max = match mode {
            Mode::Direct => DIRECT_MAX_LEVEL,
            Mode::Recursive => RECURSIVE_MAX_LEVEL,
        };
        if n > max {
            return Err(Error::Unsupported(format!(
                "{mode:?} counting is limited to levels up to {max}"
            )));
        }
        let rw = RWord::from_word(w, n + 2)?;
        match mode {
            Mode::Direct => Ok(self.direct(&rw, n)),
            Mode::Recursive => self.recursive(rw),
        }
    }

    fn direct(&self, w: &RWord, n: u32) -> u64 {
        let r = self.sys.r();
        let (sections, perm) = residue_level_sections(w, n, r);
        cycles_of(&perm)
            .iter()
            .filter(|c| {
                let mut beta = RWord::empty(2);
                for &v in &c.members {
                    beta = beta.mul(&sections[v as usize]);
                }
                beta.sign_mask(r) == self.all
            })
            .map(|c| c.length as u64)
            .sum()
    }

    // `w` is held at precision `j + 2` for level `j`.
    fn recursive(&mut self, w: RWord) -> Result<u64> {
        let j = w.prec() - 2;
        if w.is_empty() {
            return Ok(0);
        }
        let r = self.sys.r();
        if w.sign_mask(r) == self.all {
            return Ok(1u64 << j);
        }
        if j == 0 {
            return Ok(0);
        }
        if let Some(&v) = self.memo.get(&w) {
            return Ok(v);
        }
        let (a, b, swap) = w.split(r);
        let v = if swap {
            2 * self.recursive(a.mul(&b))?
        } else {
            self.recursive(a)? + self.recursive(b)?
        };
        if self.memo.len() >= MEMO_LIMIT {
            return Err(Error::Unsupported(format!(
                "memo budget of {MEMO_LIMIT} words exceeded"
            )));
        }
        self.memo.insert(w, v);
        Ok(v)
    }
}

/// `s_n(w)`.
pub fn s_n(w: &Word, n: u32, mode: Mode, sys: &GeneratorSystem) -> Result<u64> {
    StableCounter::new(*sys).count(w, n, mode)
}

/// Vertices of level `n` in cycles of `p` whose lifts double on every
/// level the portrait still covers.
pub fn s_n_portrait(p: &Portrait, n: u32) -> Result<u64> {
    let perm = p.level_permutation(n)?;
    let budget = p.depth() - n;
    let mut total = 0;
    for c in cycles_of(&perm) {
        let mut beta = Portrait::identity(budget);
        for &v in &c.members {
            beta = beta.then(&p.section_at(v, n)?);
        }
        if beta.is_odometer() {
            total += c.length as u64;
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProfileRow {
    pub level: u32,
    pub total: u64,
    pub stable: u64,
}

impl ProfileRow {
    pub fn ratio(&self) -> f64 {
        self.stable as f64 / self.total as f64
    }

    /// The exact ratio as written in the CSV, `stable/total`.
    pub fn fraction(&self) -> String {
        format!("{}/{}", self.stable, self.total)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SettleProfile {
    pub rows: Vec<ProfileRow>,
    /// First level where every vertex lies in a stable cycle.
    pub strongly_settled_at: Option<u32>,
}

pub const PROFILE_CSV_HEADER: &str = "level,total,stable,ratio,stable/total";

impl SettleProfile {
    fn from_rows(rows: Vec<ProfileRow>) -> SettleProfile {
        let strongly_settled_at = rows.iter().find(|r| r.stable == r.total).map(|r| r.level);
        SettleProfile {
            rows,
            strongly_settled_at,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(PROFILE_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.6},{}",
                r.level,
                r.total,
                r.stable,
                r.ratio(),
                r.fraction()
            );
        }
        out
    }

    /// Reads back a profile written by [`SettleProfile::to_csv`].
    pub fn from_csv(text: &str) -> Result<SettleProfile> {
        let bad = |line: usize, msg: &str| Error::Codec(format!("profile CSV line {line}: {msg}"));
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(PROFILE_CSV_HEADER) {
            return Err(bad(1, "unexpected header"));
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let f: Vec<&str> = line.trim().split(',').collect();
            if f.len() != 5 {
                return Err(bad(i + 2, "expected 5 fields"));
            }
            let num = |s: &str| s.parse::<u64>().map_err(|_| bad(i + 2, "bad integer"));
            let row = ProfileRow {
                level: f[0].parse().map_err(|_| bad(i + 2, "bad level"))?,
                total: num(f[1])?,
                stable: num(f[2])?,
            };
            let (s, t) = f[4]
                .split_once('/')
                .ok_or_else(|| bad(i + 2, "bad fraction"))?;
            if num(s)? != row.stable || num(t)? != row.total {
                return Err(bad(i + 2, "fraction disagrees with counts"));
            }
            rows.push(row);
        }
        Ok(SettleProfile::from_rows(rows))
    }
}

/// Exact `s_n(w)` for `n = 1..=max_level`.
pub fn settle_profile(w: &Word, max_level: u32, sys: &GeneratorSystem) -> Result<SettleProfile> {
    let mut counter = StableCounter::new(*sys);
    let rows = (1..=max_level)
        .map(|n| {
            Ok(ProfileRow {
                level: n,
                total: 1u64 << n,
                stable: counter.count(w, n, Mode::Recursive)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SettleProfile::from_rows(rows))
}
