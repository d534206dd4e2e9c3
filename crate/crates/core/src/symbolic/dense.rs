//! Explicit words in `a_1, ..., a_r` for elements of `G` given by their
//! sections, and the approximation of `𝒢`-words by `g z_k` with `g` a
//! positive word and `k > 1` an odd integer.
//!
//! Building blocks, all exact identities in `G`:
//!
//! ```text
//! (a_j^e, 1) = a_{j+1}^e                 (1, a_j^e) = a_1 a_{j+1}^e a_1^-1    (j < r)
//! (a_r^p x a_r^-p, 1) = a_1^2p (x, 1) a_1^-2p        (a_r^S, a_r^S) = a_1^2S
//! ```
//!
//! so a pair `(X, Y)` of words with equal `a_r`-exponent sums has an
//! explicit preimage. From `a_1^-1 (a_1 ... a_r) a_1 = (a_1 ... a_r, id)σ`
//! one gets `γ = g_n (a_1 ... a_r) g_n^-1` on `T_n` with
//! `g_n = (g_{n-1}, g_{n-1}) a_1^-1`, and from `z_s = (z_s, γ^ℓ z_s)`
//! the conjugates `c_i = z_s a_i z_s^-1` satisfy
//! `c_1 = (c_r γ^-ℓ, γ^ℓ)σ` and `c_i = (c_{i-1}, 1)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::portrait::check_depth;
use crate::{Dyadic, Error, Result};

use super::letters::letter_portrait;
use super::residue::RWord;
use super::word::z_power;
use super::{Base, GeneratorSystem, Letter, Word};

/// Words in the generators only, as `(index, exponent)` pairs.
type AWord = Vec<(u32, i64)>;

fn push(out: &mut AWord, i: u32, e: i64) {
    if e == 0 {
        return;
    }
    if let Some((j, f)) = out.last_mut() {
        if *j == i {
            *f += e;
            if *f == 0 {
                out.pop();
            }
            return;
        }
    }
    out.push((i, e));
}

fn extend(out: &mut AWord, w: &[(u32, i64)]) {
    for &(i, e) in w {
        push(out, i, e);
    }
}

fn inverse(w: &[(u32, i64)]) -> AWord {
    w.iter().rev().map(|&(i, e)| (i, -e)).collect()
}

fn power(w: &[(u32, i64)], e: i64) -> AWord {
    let base = if e < 0 { inverse(w) } else { w.to_vec() };
    let mut out = Vec::with_capacity(base.len() * e.unsigned_abs() as usize);
    for _ in 0..e.unsigned_abs() {
        extend(&mut out, &base);
    }
    out
}

fn to_word(w: &[(u32, i64)]) -> Word {
    Word::from_letters(w.iter().map(|&(i, e)| Letter::a(i, e)).collect())
}

fn from_word(w: &Word) -> Result<AWord> {
    let mut out = Vec::with_capacity(w.len());
    for l in w.letters() {
        match l.base {
            Base::A(i) => {
                let e = l
                    .int_exp()?
                    .to_i64()
                    .ok_or_else(|| Error::Unsupported("exponent exceeds i64".into()))?;
                push(&mut out, i, e);
            }
            _ => {
                return Err(Error::Precondition(
                    "expected a word in a_1, ..., a_r only".into(),
                ))
            }
        }
    }
    Ok(out)
}

fn r_sum(w: &[(u32, i64)], r: u32) -> i64 {
    w.iter().filter(|(i, _)| *i == r).map(|(_, e)| e).sum()
}

fn lift_pair_raw(x: &[(u32, i64)], y: &[(u32, i64)], r: u32) -> Result<AWord> {
    let (sx, sy) = (r_sum(x, r), r_sum(y, r));
    if sx != sy {
        return Err(Error::Precondition(format!(
            "a_{r}-exponent sums differ ({sx} vs {sy})"
        )));
    }
    let mut out = Vec::with_capacity(3 * (x.len() + y.len()) + 1);
    for (slot, w) in [(0i64, x), (1i64, y)] {
        let mut p = 0i64;
        for &(j, e) in w {
            if j == r {
                p += e;
                continue;
            }
            let c = 2 * p + slot;
            push(&mut out, 1, c);
            push(&mut out, j + 1, e);
            push(&mut out, 1, -c);
        }
    }
    push(&mut out, 1, 2 * sx);
    Ok(out)
}

/// A word for `(x, y)`; the two words must have equal `a_r`-exponent sums.
pub fn lift_pair(x: &Word, y: &Word, sys: &GeneratorSystem) -> Result<Word> {
    let out = lift_pair_raw(&from_word(x)?, &from_word(y)?, sys.r())?;
    Ok(to_word(&out))
}

fn lift_diagonal_raw(u: &[(u32, i64)], r: u32) -> AWord {
    let mut out = Vec::with_capacity(4 * u.len());
    for &(j, e) in u {
        if j == r {
            push(&mut out, 1, 2 * e);
        } else {
            push(&mut out, j + 1, e);
            push(&mut out, 1, 1);
            push(&mut out, j + 1, e);
            push(&mut out, 1, -1);
        }
    }
    out
}

/// A word for the diagonal element `(u, u)`.
pub fn lift_diagonal(u: &Word, sys: &GeneratorSystem) -> Result<Word> {
    Ok(to_word(&lift_diagonal_raw(&from_word(u)?, sys.r())))
}

fn conjugator_raw(n: u32, r: u32) -> AWord {
    let mut g = AWord::new();
    for _ in 2..=n {
        g = lift_diagonal_raw(&g, r);
        push(&mut g, 1, -1);
    }
    g
}

/// The word `g_n` with `γ = g_n (a_1 ... a_r) g_n^-1` on `T_n`.
pub fn conjugator_word(n: u32, sys: &GeneratorSystem) -> Word {
    to_word(&conjugator_raw(n, sys.r()))
}

fn gamma_power_raw(g: &[(u32, i64)], m: i64, r: u32) -> AWord {
    let product: AWord = (1..=r).map(|i| (i, 1)).collect();
    let mut out = g.to_vec();
    extend(&mut out, &power(&product, m));
    extend(&mut out, &inverse(g));
    out
}

/// A word equal to `γ^m` on `T_n`: `g_n (a_1 ... a_r)^m g_n^-1`.
pub fn gamma_power_word(m: i64, n: u32, sys: &GeneratorSystem) -> Word {
    let g = conjugator_raw(n, sys.r());
    to_word(&gamma_power_raw(&g, m, sys.r()))
}

/// `C_i` words for all `i` at depth `n`, for the odd integer `s`.
fn z_conjugates_raw(s: u64, n: u32, r: u32) -> Result<Vec<AWord>> {
    if s.is_multiple_of(2) {
        return Err(Error::NotUnit(s.to_string()));
    }
    let s_i = i64::try_from(s).map_err(|_| Error::Unsupported("index exceeds i64".into()))?;
    let ell = s_i / 2;
    // Level 0: any word with the right exponent sums; a_i^s keeps them exact.
    let mut level: Vec<AWord> = (1..=r).map(|i| vec![(i, s_i)]).collect();
    for d in 1..=n {
        let g = conjugator_raw(d - 1, r);
        let up = gamma_power_raw(&g, ell, r);
        let down = gamma_power_raw(&g, -ell, r);
        let mut x = level[r as usize - 1].clone();
        extend(&mut x, &down);
        push(&mut x, r, -1);
        let mut c1 = lift_pair_raw(&x, &up, r)?;
        push(&mut c1, 1, 1);
        let mut next = vec![c1];
        for i in 1..r as usize {
            next.push(lift_pair_raw(&level[i - 1], &[], r)?);
        }
        level = next;
    }
    Ok(level)
}

/// A word in `a_1, ..., a_r` equal to `z_s a_i z_s^-1` on `T_n`.
pub fn z_conjugate_word(i: u32, s: u64, n: u32, sys: &GeneratorSystem) -> Result<Word> {
    if i == 0 || i > sys.r() {
        return Err(Error::GeneratorIndex {
            index: i,
            r: sys.r(),
        });
    }
    if s == 1 {
        return Ok(Word::a(i));
    }
    let all = z_conjugates_raw(s, n, sys.r())?;
    Ok(to_word(&all[i as usize - 1]))
}

/// Result of [`approximate_in_a`]: `word = g0 · z_k0` agrees with the input on `T_n`.
#[derive(Clone, Debug, Serialize)]
pub struct DenseApproximation {
    pub level: u32,
    /// Positive-exponent word in `a_1, ..., a_r`.
    pub g0: Word,
    pub k0: Dyadic,
    pub word: Word,
    /// Whether the level-`n` portraits were compared and found equal.
    pub verified: bool,
}

/// Rewrites `w` as `g0 z_k0` on `T_n`, with `g0` a word in the generators
/// with positive exponents and `k0 > 1` odd.
pub fn approximate_in_a(w: &Word, n: u32, sys: &GeneratorSystem) -> Result<DenseApproximation> {
    check_depth(n)?;
    if n == 0 {
        return Err(Error::Precondition(
            "approximation needs level at least 1".into(),
        ));
    }
    w.validate(sys)?;
    let r = sys.r();
    let modulus = 1u64 << n;
    let trunc = |d: &Dyadic| -> Result<u64> { d.residue_u64(n) };

    // Push every z-letter to the right: z_K a_i = c_i(K) z_K, z_K γ^m = γ^(Km) z_K.
    let mut out = AWord::new();
    let mut k = Dyadic::one();
    let mut cache: Vec<(u64, Vec<AWord>)> = Vec::new();
    let g = conjugator_raw(n, r);
    for l in w.letters() {
        match &l.base {
            Base::A(i) => {
                let e = l.int_exp()?.mod_floor(&BigInt::from(modulus));
                let e = e.to_i64().expect("below 2^n");
                let s = trunc(&k)?;
                if s == 1 {
                    push(&mut out, *i, e);
                    continue;
                }
                if !cache.iter().any(|(t, _)| *t == s) {
                    cache.push((s, z_conjugates_raw(s, n, r)?));
                }
                let conj = &cache.iter().find(|(t, _)| *t == s).expect("cached").1;
                extend(&mut out, &power(&conj[*i as usize - 1], e));
            }
            Base::Gamma => {
                let t = trunc(&(&k * &l.exp))?;
                extend(&mut out, &gamma_power_raw(&g, t as i64, r));
            }
            Base::Z(j) => k = &k * &z_power(j, &l.exp)?,
        }
    }

    let t = trunc(&k)?;
    let k0 = if t > 1 {
        Dyadic::exact(t)
    } else {
        Dyadic::exact(BigInt::one() + BigInt::from(modulus))
    };

    // Negative exponents become positive modulo the order of a_j on T_n.
    let orders: Vec<i64> = (1..=r)
        .map(|i| letter_portrait(&Letter::a(i, 1), n, sys).map(|p| p.order() as i64))
        .collect::<Result<_>>()?;
    let mut positive = out;
    loop {
        let mut next = AWord::with_capacity(positive.len());
        for &(i, e) in &positive {
            push(&mut next, i, e.rem_euclid(orders[i as usize - 1]));
        }
        if next
            .iter()
            .all(|&(i, e)| e > 0 && e < orders[i as usize - 1])
        {
            positive = next;
            break;
        }
        positive = next;
    }

    let g0 = to_word(&positive);
    let mut letters = g0.letters().to_vec();
    letters.push(Letter::z(k0.clone()));
    let word = Word::from_letters(letters);

    let lhs = RWord::from_word(&word, n)?.to_portrait(r);
    let rhs = RWord::from_word(w, n)?.to_portrait(r);
    if lhs != rhs {
        return Err(Error::Precondition(format!(
            "approximation of {w} at level {n} does not match"
        )));
    }
    Ok(DenseApproximation {
        level: n,
        g0,
        k0,
        word,
        verified: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::truncate_word;
    use crate::Portrait;

    #[test]
    fn conjugator_words_conjugate_gamma() {
        for r in 2..=4 {
            let s = GeneratorSystem::new(r).unwrap();
            for n in 1..=7 {
                let g = conjugator_word(n, &s);
                let w = g.mul(&s.generator_product()).mul(&g.inverse());
                assert_eq!(
                    truncate_word(&w, n, &s).unwrap(),
                    Portrait::gamma(n),
                    "r={r} n={n}"
                );
            }
        }
    }

    #[test]
    fn lifts_match_assembled_portraits() {
        let s = GeneratorSystem::new(3).unwrap();
        let x = Word::from_letters(vec![Letter::a(1, 2), Letter::a(3, -1), Letter::a(2, 1)]);
        let y = Word::from_letters(vec![Letter::a(3, -1), Letter::a(1, 1)]);
        let n = 6;
        let lifted = truncate_word(&lift_pair(&x, &y, &s).unwrap(), n, &s).unwrap();
        let px = truncate_word(&x, n - 1, &s).unwrap();
        let py = truncate_word(&y, n - 1, &s).unwrap();
        assert_eq!(lifted, Portrait::assemble(&px, &py, false).unwrap());
        let d = truncate_word(&lift_diagonal(&x, &s).unwrap(), n, &s).unwrap();
        assert_eq!(d, Portrait::assemble(&px, &px, false).unwrap());
        assert!(lift_pair(&x, &Word::identity(), &s).is_err());
    }

    #[test]
    fn z_conjugates() {
        for r in 2..=3 {
            let s = GeneratorSystem::new(r).unwrap();
            for k in [3u64, 5, 7, 13] {
                for i in 1..=r {
                    let n = 5;
                    let c = z_conjugate_word(i, k, n, &s).unwrap();
                    let direct = Word::z(k as i64)
                        .mul(&Word::a(i))
                        .mul(&Word::z(k as i64).inverse());
                    assert_eq!(
                        truncate_word(&c, n, &s).unwrap(),
                        truncate_word(&direct, n, &s).unwrap(),
                        "r={r} k={k} i={i}"
                    );
                }
            }
        }
    }

    #[test]
    fn approximation_examples() {
        let s = GeneratorSystem::basilica();
        let a = approximate_in_a(&Word::z(3), 4, &s).unwrap();
        assert!(a.g0.is_empty());
        assert_eq!(a.k0, Dyadic::exact(3));
        let w = Word::from_letters(vec![Letter::gamma(1), Letter::z(1)]);
        assert_eq!(approximate_in_a(&w, 3, &s).unwrap().k0, Dyadic::exact(9));
        let w = Word::a_pow(1, -1).mul(&Word::z(3));
        let a = approximate_in_a(&w, 3, &s).unwrap();
        let e = letter_portrait(&Letter::a(1, 1), 3, &s).unwrap().order() as i64;
        assert_eq!(a.g0, Word::a_pow(1, e - 1));
        assert_eq!(a.k0, Dyadic::exact(3));
    }
}
