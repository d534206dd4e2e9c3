use std::collections::{HashMap, HashSet};

use crate::portrait::Portrait;
use crate::symbolic::{descendants_1, normalize_ngamma, truncate_word, GeneratorSystem, Word};
use crate::{Error, Result};

/// Depth of the portrait key used to merge descendants with different words.
pub const DEDUP_DEPTH: u32 = 12;

/// Depth of the second comparison made when two keys collide.
pub const GUARD_DEPTH: u32 = 16;

/// Largest descendant set handled per level.
pub const DESCENDANT_LIMIT: usize = 1 << 14;

/// `γ^m z_k` for words without A-letters, otherwise the normalized word.
pub fn normal_form(w: &Word) -> Word {
    if w.has_a_letters() {
        w.normalized()
    } else {
        normalize_ngamma(w).unwrap_or_else(|_| w.normalized())
    }
}

fn portrait_at(w: &Word, depth: u32, sys: &GeneratorSystem) -> Result<Portrait> {
    let d = w.min_precision().map_or(depth, |p| p.min(depth));
    truncate_word(w, d, sys)
}

/// Removes repeated elements: first by normal form, then by equality of
/// depth-12 portraits confirmed at depth 16. Keeps first occurrences in order.
pub fn dedup_elements(words: Vec<Word>, sys: &GeneratorSystem) -> Result<Vec<Word>> {
    let mut seen = HashSet::new();
    let mut out: Vec<Word> = Vec::new();
    let mut by_key: HashMap<Portrait, Vec<usize>> = HashMap::new();
    for w in words {
        let nf = normal_form(&w);
        if !seen.insert(nf.clone()) {
            continue;
        }
        let key = portrait_at(&nf, DEDUP_DEPTH, sys)?;
        let bucket = by_key.entry(key).or_default();
        let mut duplicate = false;
        for &i in bucket.iter() {
            if portrait_at(&out[i], GUARD_DEPTH, sys)? == portrait_at(&nf, GUARD_DEPTH, sys)? {
                duplicate = true;
                break;
            }
        }
        if !duplicate {
            bucket.push(out.len());
            out.push(nf);
        }
    }
    Ok(out)
}

/// `Desc_0(w), ..., Desc_n(w)`.
pub fn descendant_levels(w: &Word, n: u32, sys: &GeneratorSystem) -> Result<Vec<Vec<Word>>> {
    w.validate(sys)?;
    let mut levels = vec![vec![normal_form(w)]];
    for _ in 0..n {
        let mut next = Vec::new();
        for b in levels.last().expect("nonempty") {
            next.extend(descendants_1(b, sys)?);
        }
        let next = dedup_elements(next, sys)?;
        if next.len() > DESCENDANT_LIMIT {
            return Err(Error::Unsupported(format!(
                "more than {DESCENDANT_LIMIT} descendants on one level"
            )));
        }
        levels.push(next);
    }
    Ok(levels)
}

/// `Desc_n(w)`, the iterated first descendants.
pub fn descendants_n(w: &Word, n: u32, sys: &GeneratorSystem) -> Result<Vec<Word>> {
    Ok(descendant_levels(w, n, sys)?.pop().expect("nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Letter;

    #[test]
    fn first_descendant_of_a1_zk() {
        let s = GeneratorSystem::basilica();
        let w = Word::from_letters(vec![Letter::a(1, 1), Letter::z(3)]);
        let d = descendants_n(&w, 1, &s).unwrap();
        // a_r γ^ℓ z_{k²} with ℓ = 1.
        let expect = Word::from_letters(vec![Letter::a(2, 1), Letter::gamma(1), Letter::z(9)]);
        assert_eq!(d, vec![expect]);
    }

    #[test]
    fn zk_descendants_stay_gamma_z() {
        let s = GeneratorSystem::new(3).unwrap();
        for n in 0..6 {
            for b in descendants_n(&Word::z(7), n, &s).unwrap() {
                assert!(!b.has_a_letters());
            }
        }
    }

    #[test]
    fn dedup_merges_equal_elements() {
        let s = GeneratorSystem::basilica();
        // a_1^2 = (a_2, a_2): both first descendants coincide.
        let d = descendants_n(&Word::a_pow(1, 2), 1, &s).unwrap();
        assert_eq!(d, vec![Word::a(2)]);
        // (a_1 a_2)^0 written two ways.
        let w = vec![Word::identity(), Word::a(1).mul(&Word::a_pow(1, -1))];
        assert_eq!(dedup_elements(w, &s).unwrap().len(), 1);
    }
}
