use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::dynamics::{s_n, Mode, StableCounter};
use crate::portrait::Portrait;
use crate::symbolic::{
    letter_portrait, product_portrait, random_word, sign_profile, truncate_word, GeneratorSystem,
    Letter, RandomWordSpec, Word,
};
use crate::Result;

use super::{first_failure, GridConfig, Suite, SuiteResult};

/// `v_2(x)`, with `None` for zero.
pub(crate) fn v2(x: i64) -> Option<u32> {
    (x != 0).then(|| x.trailing_zeros())
}

fn ell(k: i64) -> i64 {
    (k - 1).div_euclid(2)
}

fn residue(x: i64, n: u32) -> u64 {
    x.rem_euclid(1i64 << n) as u64
}

fn z(k: i64, n: u32) -> Result<Portrait> {
    letter_portrait(&Letter::z(k), n, &GeneratorSystem::basilica())
}

fn gamma_z(m: i64, k: i64, n: u32) -> Result<Portrait> {
    Ok(Portrait::gamma_power(n, residue(m, n)).then(&z(k, n)?))
}

fn random_unit(rng: &mut ChaCha8Rng, bits: u32) -> i64 {
    loop {
        let k = rng.gen_range(3..(1i64 << bits)) | 1;
        if k != 1 {
            return k;
        }
    }
}

pub fn suite_conjugation(cfg: &GridConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let g = &cfg.conjugation;
    let mut ks = g.ks.clone();
    ks.extend((0..g.random_units).map(|_| random_unit(rng, g.random_bits)));
    let mut suite = Suite::new(
        "conjugation",
        "z_k γ z_k^-1 = γ^k on T_n",
        json!({"ks": ks, "max_level": g.max_level}),
    );
    for &k in &ks {
        suite.case(json!({"k": k, "levels": [1, g.max_level]}), || {
            let bad = first_failure(1..=g.max_level, |n| {
                let zk = z(k, n)?;
                let lhs = zk.then(&Portrait::gamma(n)).then(&zk.inverse());
                Ok(lhs == Portrait::gamma_power(n, residue(k, n)))
            })?;
            Ok(bad.map(|n| json!({"k": k, "n": n})))
        });
    }
    suite.case(json!({"k": 1, "levels": [1, g.max_level]}), || {
        let bad = first_failure(1..=g.max_level, |n| Ok(z(1, n)?.is_identity()))?;
        Ok(bad.map(|n| json!({"k": 1, "n": n, "expected": "z_1 = id"})))
    });
    suite.finish()
}

pub fn suite_sign_lemma(cfg: &GridConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let g = &cfg.sign_lemma;
    let sys = GeneratorSystem::new(cfg.r).expect("validated");
    let mut suite = Suite::new(
        "sign_lemma",
        "sgn_n(z_k) = 1 for all n if k ≡ 1 mod 4; otherwise sgn_1 = 1 and sgn_n = -1 for n ≥ 2; symbolic signs match portrait signs",
        json!({"ks": g.ks, "max_level": g.max_level, "random_words": g.random_words,
               "word_max_level": g.word_max_level, "r": cfg.r}),
    );
    for &k in &g.ks {
        suite.case(json!({"k": k, "levels": [1, g.max_level]}), || {
            let profile = sign_profile(&Word::z(k), &sys)?;
            let p = z(k, g.max_level)?;
            let bad = first_failure(1..=g.max_level, |n| {
                let expected = if k.rem_euclid(4) == 1 || n == 1 {
                    1
                } else {
                    -1
                };
                Ok(profile.at(n) == expected && p.sign_at(n)? == expected)
            })?;
            Ok(bad.map(|n| json!({"k": k, "n": n})))
        });
    }
    let spec = RandomWordSpec::default();
    for i in 0..g.random_words {
        let w = random_word(rng, &spec, &sys);
        suite.case(json!({"word": i, "element": w.to_string()}), || {
            let profile = sign_profile(&w, &sys)?;
            let p = product_portrait(&w, g.word_max_level, &sys)?;
            let bad = first_failure(1..=g.word_max_level, |n| Ok(profile.at(n) == p.sign_at(n)?))?;
            Ok(bad.map(|n| json!({"element": w.to_string(), "n": n})))
        });
    }
    suite.finish()
}

pub fn suite_triviality(cfg: &GridConfig, _rng: &mut ChaCha8Rng) -> SuiteResult {
    let g = &cfg.triviality;
    let mut suite = Suite::new(
        "triviality",
        "z_k = id on T_n exactly for n ≤ v_2(ℓ) + 1; γ^m z_k = id on T_n for n ≤ v_2(m) when v_2(m) ≤ v_2(ℓ)",
        json!({"ks": g.ks, "ms": g.ms}),
    );
    for &k in &g.ks {
        let Some(v) = v2(ell(k)) else { continue };
        suite.case(json!({"k": k, "v2_ell": v}), || {
            if let Some(n) = first_failure(1..=v + 1, |n| Ok(z(k, n)?.is_identity()))? {
                return Ok(Some(json!({"k": k, "n": n, "expected": "identity"})));
            }
            Ok((z(k, v + 2)?.is_identity())
                .then(|| json!({"k": k, "n": v + 2, "expected": "not identity"})))
        });
        for &m in &g.ms {
            let Some(vm) = v2(m) else { continue };
            if vm > v {
                continue;
            }
            suite.case(json!({"k": k, "m": m}), || {
                let bad = first_failure(1..=vm, |n| Ok(gamma_z(m, k, n)?.is_identity()))?;
                Ok(bad.map(|n| json!({"k": k, "m": m, "n": n})))
            });
        }
    }
    suite.finish()
}

pub fn suite_square_law(cfg: &GridConfig, _rng: &mut ChaCha8Rng) -> SuiteResult {
    let g = &cfg.square_law;
    let mut suite = Suite::new(
        "square_law",
        "z_k^2 = z_{k^2} on T_n",
        json!({"ks": g.ks, "max_level": g.max_level}),
    );
    for &k in &g.ks {
        suite.case(json!({"k": k, "levels": [1, g.max_level]}), || {
            let bad = first_failure(1..=g.max_level, |n| {
                let zk = z(k, n)?;
                Ok(zk.then(&zk) == z(k * k, n)?)
            })?;
            Ok(bad.map(|n| json!({"k": k, "n": n})))
        });
    }
    suite.finish()
}

/// Predicted `s_n(γ^m z_k)`: `Exact(v)` or `AtLeast(v)`, from level `from` on.
#[derive(Clone, Copy, Debug)]
enum Prediction {
    Exact(u64),
    AtLeast(u64),
}

fn classification_rule(k: i64, m: i64, n: u32) -> (&'static str, u32, Prediction) {
    let full = 1u64 << n;
    let vl = v2(ell(k)).expect("k ≠ 1");
    let vm = v2(m);
    if vl >= 1 {
        match vm {
            Some(vm) if vm <= vl => ("s_n = 2^n for n ≥ v_2(m)", vm, Prediction::Exact(full)),
            _ => (
                "s_n = 2^n - 2^v_2(ℓ) for n ≥ v_2(ℓ)",
                vl,
                Prediction::Exact(full.saturating_sub(1 << vl)),
            ),
        }
    } else {
        let vk = v2(k + 1).expect("k ≠ -1");
        if vm == Some(0) {
            ("s_n = 2^n for n ≥ v_2(k+1)", vk, Prediction::Exact(full))
        } else {
            (
                "s_n ≥ 2^n - 2^v_2(k+1) for n ≥ v_2(k+1)",
                vk,
                Prediction::AtLeast(full.saturating_sub(1 << vk)),
            )
        }
    }
}

pub fn suite_classification(cfg: &GridConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let g = &cfg.classification;
    let sys = GeneratorSystem::basilica();
    let mut ms = g.ms.clone();
    ms.extend((0..g.random_ms).map(|_| rng.gen_range(0..1i64 << 16)));
    let mut suite = Suite::new(
        "classification",
        "exact s_n(γ^m z_k) follows the valuation case split, and at most 2^(ν+1) vertices of level n ≥ ν+1 lie outside stable cycles",
        json!({"ks": g.ks, "ms": ms, "max_level": g.max_level}),
    );
    for &k in &g.ks {
        for &m in &ms {
            let w = Word::gamma_z(m, k);
            let (rule, from, _) = classification_rule(k, m, 1);
            suite.case(
                json!({"k": k, "m": m, "rule": rule, "from_level": from}),
                || {
                    let mut counter = StableCounter::new(sys);
                    let nu = crate::Dyadic::exact(k).nu()?;
                    let mut values = Vec::new();
                    for n in 1..=g.max_level {
                        let s = counter.count(&w, n, Mode::Recursive)?;
                        let d = s_n(&w, n, Mode::Direct, &sys)?;
                        values.push(s);
                        if s != d {
                            return Ok(Some(json!({"n": n, "recursive": s, "direct": d})));
                        }
                        let (_, from, pred) = classification_rule(k, m, n);
                        let ok = n < from
                            || match pred {
                                Prediction::Exact(v) => s == v,
                                Prediction::AtLeast(v) => s >= v,
                            };
                        if !ok {
                            return Ok(Some(
                                json!({"n": n, "s_n": s, "prediction": format!("{pred:?}")}),
                            ));
                        }
                        if n > nu && (1u64 << n) - s > 1u64 << (nu + 1) {
                            return Ok(Some(json!({"n": n, "s_n": s, "nu": nu})));
                        }
                    }
                    Ok(None)
                },
            );
        }
    }
    suite.finish()
}

pub fn suite_conjugacy_classes(cfg: &GridConfig, _rng: &mut ChaCha8Rng) -> SuiteResult {
    let g = &cfg.conjugacy_classes;
    let sys = GeneratorSystem::basilica();
    let mut suite = Suite::new(
        "conjugacy_classes",
        "γ^m z_k and γ^s z_k are conjugate on every level when the valuation patterns of m and s agree",
        json!({"ks": g.ks, "max_level": g.max_level}),
    );
    // (k, m, s, conjugate?)
    let mut pairs: Vec<(i64, i64, i64, bool, &str)> = Vec::new();
    for &k in &g.ks {
        let vl = v2(ell(k)).expect("k ≠ 1");
        if vl >= 1 {
            for u in 0..=vl {
                for c in [3, 5] {
                    pairs.push((k, 1 << u, c << u, true, "v_2(m) = v_2(s) ≤ v_2(ℓ)"));
                }
            }
            for c in [1, 3] {
                pairs.push((
                    k,
                    c << (vl + 1),
                    0,
                    true,
                    "v_2(m) > v_2(ℓ): conjugate to z_k",
                ));
            }
        } else {
            for s in [3, 5, 7] {
                pairs.push((k, 1, s, true, "m, s odd"));
            }
            for m in [2, 4, 6] {
                pairs.push((k, m, 0, true, "v_2(m) ≥ 1: conjugate to z_k"));
            }
        }
        pairs.push((k, 1, 0, false, "control: γ z_k is not conjugate to z_k"));
    }
    let words = |k: i64, m: i64, s: i64| (Word::gamma_z(m, k), Word::gamma_z(s, k));
    for (k, m, s, expect, rule) in pairs {
        suite.case(
            json!({"k": k, "m": m, "s": s, "conjugate": expect, "rule": rule}),
            || {
                let (a, b) = words(k, m, s);
                let bad = first_failure(1..=g.max_level, |n| {
                    let pa = truncate_word(&a, n, &sys)?;
                    let pb = truncate_word(&b, n, &sys)?;
                    Ok(pa.conjugate_in_level(&pb)? == expect)
                })?;
                Ok(bad.map(|n| json!({"n": n})))
            },
        );
    }
    suite.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuation_helpers() {
        assert_eq!(v2(12), Some(2));
        assert_eq!(v2(0), None);
        assert_eq!(ell(5), 2);
        assert_eq!(ell(-3), -2);
        assert_eq!(residue(-1, 4), 15);
    }

    #[test]
    fn rules_match_stated_examples() {
        assert!(matches!(
            classification_rule(5, 0, 6).2,
            Prediction::Exact(62)
        ));
        assert!(matches!(
            classification_rule(5, 1, 6).2,
            Prediction::Exact(64)
        ));
        assert!(matches!(
            classification_rule(3, 0, 6).2,
            Prediction::AtLeast(60)
        ));
    }
}
