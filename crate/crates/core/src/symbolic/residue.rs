//! Machine-word view of a [`Word`] at a fixed precision `p ≤ 64`.
//!
//! All exponents and indices are kept mod `2^p`; such a word determines the
//! action on `T_p`, and its sections live at precision `p - 1`. The sign
//! profile and the root permutation only need parities and `k mod 4`, so a
//! word at precision `j + 2` carries everything needed to count stable
//! cycles on level `j`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::portrait::{fill_gamma_power, Portrait};
use crate::{Error, Result};

use super::word::z_power;
use super::{Base, Word};

/// Largest precision of a residue word.
pub const MAX_RESIDUE_BITS: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum RLetter {
    A(u8, u64),
    G(u64),
    Z(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct RWord {
    prec: u32,
    letters: Vec<RLetter>,
}

#[inline]
pub(crate) fn mask(p: u32) -> u64 {
    if p >= 64 {
        u64::MAX
    } else {
        (1u64 << p) - 1
    }
}

fn big_mod(v: &BigInt, p: u32) -> u64 {
    let m = BigInt::from(1u8) << p as usize;
    v.mod_floor(&m).to_u64().expect("residue fits")
}

impl RWord {
    pub(crate) fn empty(prec: u32) -> RWord {
        RWord {
            prec,
            letters: Vec::new(),
        }
    }

    pub(crate) fn from_word(w: &Word, prec: u32) -> Result<RWord> {
        if prec > MAX_RESIDUE_BITS {
            return Err(Error::Unsupported(format!(
                "levels needing more than {MAX_RESIDUE_BITS} bits are not supported"
            )));
        }
        let mut letters = Vec::with_capacity(w.len());
        for l in w.letters() {
            let rl = match &l.base {
                Base::A(i) => RLetter::A(*i as u8, big_mod(&l.int_exp()?, prec)),
                Base::Gamma => RLetter::G(big_mod(&l.exp.truncate(prec)?, prec)),
                Base::Z(k) => {
                    let kk = z_power(k, &l.exp)?;
                    RLetter::Z(big_mod(&kk.truncate(prec)?, prec))
                }
            };
            letters.push(rl);
        }
        Ok(RWord { prec, letters }.normalized())
    }

    pub(crate) fn prec(&self) -> u32 {
        self.prec
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub(crate) fn normalized(mut self) -> RWord {
        enum Item {
            A(u8, u64),
            Run(u64, u64),
        }
        if self.prec == 0 {
            self.letters.clear();
            return self;
        }
        let mk = mask(self.prec);
        let mut stack: Vec<Item> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            match l {
                RLetter::A(i, e) => {
                    let e = e & mk;
                    if e == 0 {
                        continue;
                    }
                    if let Some(Item::A(j, f)) = stack.last_mut() {
                        if *j == i {
                            *f = f.wrapping_add(e) & mk;
                            if *f == 0 {
                                stack.pop();
                            }
                            continue;
                        }
                    }
                    stack.push(Item::A(i, e));
                }
                RLetter::G(_) | RLetter::Z(_) => {
                    let (ga, zk) = match l {
                        RLetter::G(a) => (a & mk, 1),
                        RLetter::Z(k) => (0, k & mk),
                        RLetter::A(..) => unreachable!(),
                    };
                    if let Some(Item::Run(m, k)) = stack.last_mut() {
                        // γ^m z_k γ^a z_j = γ^(m + k a) z_(k j)
                        *m = m.wrapping_add(k.wrapping_mul(ga)) & mk;
                        *k = k.wrapping_mul(zk) & mk;
                        if *m == 0 && *k == 1 {
                            stack.pop();
                        }
                    } else if !(ga == 0 && zk == 1) {
                        stack.push(Item::Run(ga, zk));
                    }
                }
            }
        }
        self.letters.clear();
        for item in stack {
            match item {
                Item::A(i, e) => self.letters.push(RLetter::A(i, e)),
                Item::Run(m, k) => {
                    if m != 0 {
                        self.letters.push(RLetter::G(m));
                    }
                    if k != 1 {
                        self.letters.push(RLetter::Z(k));
                    }
                }
            }
        }
        self
    }

    /// Root permutation: parity of the odd γ- and `a_1`-exponents.
    pub(crate) fn root_swap(&self) -> bool {
        let mut s = false;
        for l in &self.letters {
            match *l {
                RLetter::G(m) => s ^= m & 1 == 1,
                RLetter::A(1, e) => s ^= e & 1 == 1,
                _ => {}
            }
        }
        s
    }

    /// Both sections and the root flag, at precision `prec - 1`.
    pub(crate) fn split(&self, r: u32) -> (RWord, RWord, bool) {
        let s0 = self.section_raw(0, r);
        let s1 = self.section_raw(1, r);
        (s0, s1, self.root_swap())
    }

    fn section_raw(&self, side: u8, r: u32) -> RWord {
        assert!(self.prec >= 1, "section of a precision-0 word");
        let mut c = side;
        let mut out = Vec::with_capacity(self.letters.len() + 2);
        for l in &self.letters {
            match *l {
                RLetter::G(m) => {
                    if m & 1 == 1 {
                        out.push(RLetter::G(if c == 0 { (m >> 1) + 1 } else { m >> 1 }));
                        c ^= 1;
                    } else {
                        out.push(RLetter::G(m >> 1));
                    }
                }
                RLetter::Z(k) => {
                    if c == 1 {
                        out.push(RLetter::G(k >> 1));
                    }
                    out.push(RLetter::Z(k));
                }
                RLetter::A(1, e) => {
                    if e & 1 == 1 {
                        out.push(RLetter::A(
                            r as u8,
                            if c == 0 { (e >> 1) + 1 } else { e >> 1 },
                        ));
                        c ^= 1;
                    } else {
                        out.push(RLetter::A(r as u8, e >> 1));
                    }
                }
                RLetter::A(i, e) => {
                    if c == 0 {
                        out.push(RLetter::A(i - 1, e));
                    }
                }
            }
        }
        RWord {
            prec: self.prec - 1,
            letters: out,
        }
        .normalized()
    }

    /// `self · other`; both must share a precision.
    pub(crate) fn mul(&self, other: &RWord) -> RWord {
        debug_assert_eq!(self.prec, other.prec);
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        RWord {
            prec: self.prec,
            letters,
        }
        .normalized()
    }

    /// Signs `sgn_1, ..., sgn_{r+1}` as a bitmask (bit `n-1` set for `-1`).
    /// From level 2 on the signs are `r`-periodic. Needs `prec ≥ 2` to see
    /// `k mod 4` of the Z-letters.
    pub(crate) fn sign_mask(&self, r: u32) -> u32 {
        let all = (1u32 << (r + 1)) - 1;
        let mut m = 0u32;
        for l in &self.letters {
            match *l {
                RLetter::G(a) => {
                    if a & 1 == 1 {
                        m ^= all;
                    }
                }
                RLetter::Z(k) => {
                    if k & 3 == 3 {
                        m ^= all & !1;
                    }
                }
                RLetter::A(i, e) => {
                    if e & 1 == 1 {
                        if i == 1 {
                            m ^= 1 | (1 << r);
                        } else {
                            m ^= 1 << (i - 1);
                        }
                    }
                }
            }
        }
        m
    }

    /// Portrait of depth `prec`.
    pub(crate) fn to_portrait(&self, r: u32) -> Portrait {
        let depth = self.prec;
        let mut bits = Vec::with_capacity((1usize << depth) - 1);
        let mut memo = HashMap::new();
        fill(self, r, &mut bits, &mut memo);
        Portrait::from_bits(depth, bits).expect("depth checked by caller")
    }
}

fn fill(w: &RWord, r: u32, out: &mut Vec<bool>, memo: &mut HashMap<RWord, usize>) {
    let depth = w.prec;
    if depth == 0 {
        return;
    }
    let size = (1usize << depth) - 1;
    if w.is_empty() {
        out.resize(out.len() + size, false);
        return;
    }
    if let [RLetter::G(m)] = w.letters[..] {
        let start = out.len();
        out.resize(start + size, false);
        fill_gamma_power(&mut out[start..], depth, m);
        return;
    }
    let memoize = depth >= 3;
    if memoize {
        if let Some(&start) = memo.get(w) {
            out.extend_from_within(start..start + size);
            return;
        }
    }
    let start = out.len();
    let (s0, s1, swap) = w.split(r);
    out.push(swap);
    fill(&s0, r, out, memo);
    fill(&s1, r, out, memo);
    if memoize {
        memo.insert(w.clone(), start);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::Letter;

    #[test]
    fn normalization_merges_runs() {
        let w = RWord {
            prec: 8,
            letters: vec![RLetter::Z(3), RLetter::G(1)],
        }
        .normalized();
        assert_eq!(w.letters, vec![RLetter::G(3), RLetter::Z(3)]);
        let w = RWord {
            prec: 8,
            letters: vec![
                RLetter::A(1, 1),
                RLetter::G(1),
                RLetter::G(255),
                RLetter::A(1, 1),
            ],
        }
        .normalized();
        assert_eq!(w.letters, vec![RLetter::A(1, 2)]);
        let w = RWord {
            prec: 8,
            letters: vec![
                RLetter::G(1),
                RLetter::A(2, 1),
                RLetter::A(2, 255),
                RLetter::G(2),
            ],
        }
        .normalized();
        assert_eq!(w.letters, vec![RLetter::G(3)]);
    }

    #[test]
    fn sections_of_z() {
        let w = RWord::from_word(&Word::z(5), 6).unwrap();
        let (s0, s1, swap) = w.split(2);
        assert!(!swap);
        assert_eq!(s0.letters, vec![RLetter::Z(5)]);
        assert_eq!(s1.letters, vec![RLetter::G(2), RLetter::Z(5)]);
        assert_eq!(s1.prec, 5);
    }

    #[test]
    fn negative_exponents_wrap() {
        let w = Word::from_letters(vec![Letter::gamma(-1)]);
        let rw = RWord::from_word(&w, 4).unwrap();
        assert_eq!(rw.letters, vec![RLetter::G(15)]);
        assert_eq!(rw.to_portrait(2), Portrait::gamma(4).inverse());
    }
}
