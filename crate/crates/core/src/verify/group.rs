use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::dynamics::{
    block_analysis, cycle_records_word, estimate_111, lift_doubling_failures, s_n, settle_profile,
    Mode, StabilityStatus, StableCounter,
};
use crate::portrait::Portrait;
use crate::symbolic::{
    approximate_in_a, conjugator_word, descendants_1, letter_portrait, lift_diagonal,
    product_portrait, random_v_word, random_word, split, truncate_word, Base, GeneratorSystem,
    Letter, RandomWordSpec, Word,
};
use crate::{Dyadic, Result, Trit};

use super::{first_failure, GridConfig, Suite, SuiteResult};

fn system(r: u32) -> GeneratorSystem {
    GeneratorSystem::new(r).expect("validated")
}

fn a_pow(i: u32, e: i64, n: u32, sys: &GeneratorSystem) -> Result<Portrait> {
    letter_portrait(&Letter::a(i, e), n, sys)
}

pub fn suite_group_g(cfg: &GridConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let g = &cfg.group_g;
    let mut suite = Suite::new(
        "group_g",
        "γ is conjugate to a_1 ... a_r on every level, and G contains the diagonal witnesses (a_r, a_r) and (a_(i-1), a_(i-1))",
        serde_json::to_value(g).expect("grid serializes"),
    );
    let a_only = RandomWordSpec {
        gamma_letters: false,
        z_letters: false,
        ..RandomWordSpec::default()
    };
    for &r in &g.rs {
        let sys = system(r);
        suite.case(
            json!({"r": r, "check": "γ ~ a_1...a_r", "levels": [1, g.max_level]}),
            || {
                let product = sys.generator_product();
                let bad = first_failure(1..=g.max_level, |n| {
                    product_portrait(&product, n, &sys)?.conjugate_in_level(&Portrait::gamma(n))
                })?;
                Ok(bad.map(|n| json!({"n": n})))
            },
        );
        let d = g.diagonal_depth;
        suite.case(
            json!({"r": r, "check": "a_1^2 = (a_r, a_r)", "depth": d}),
            || {
                let lhs = a_pow(1, 2, d, &sys)?;
                let ar = a_pow(r, 1, d - 1, &sys)?;
                Ok((lhs != Portrait::assemble(&ar, &ar, false)?).then(|| json!({"depth": d})))
            },
        );
        for i in 2..=r {
            suite.case(
                json!({"r": r, "check": "a_i a_1 a_i a_1^-1 = (a_(i-1), a_(i-1))", "i": i, "depth": d}),
                || {
                    let w = Word::from_letters(vec![
                        Letter::a(i, 1),
                        Letter::a(1, 1),
                        Letter::a(i, 1),
                        Letter::a(1, -1),
                    ]);
                    let lhs = product_portrait(&w, d, &sys)?;
                    let half = a_pow(i - 1, 1, d - 1, &sys)?;
                    Ok((lhs != Portrait::assemble(&half, &half, false)?).then(|| json!({"i": i})))
                },
            );
        }
        for _ in 0..g.diagonal_words {
            let u = random_word(rng, &a_only, &sys);
            suite.case(
                json!({"r": r, "check": "lift of (u, u)", "u": u.to_string(), "depth": d}),
                || {
                    let lifted = lift_diagonal(&u, &sys)?;
                    let lhs = truncate_word(&lifted, d, &sys)?;
                    let half = product_portrait(&u, d - 1, &sys)?;
                    Ok((lhs != Portrait::assemble(&half, &half, false)?)
                        .then(|| json!({"lift": lifted.to_string()})))
                },
            );
        }
        suite.case(
            json!({"r": r, "check": "g_n (a_1...a_r) g_n^-1 = γ", "levels": [1, g.conjugator_max_level]}),
            || {
                let bad = first_failure(1..=g.conjugator_max_level, |n| {
                    let c = conjugator_word(n, &sys);
                    let w = c.mul(&sys.generator_product()).mul(&c.inverse());
                    Ok(truncate_word(&w, n, &sys)? == Portrait::gamma(n))
                })?;
                Ok(bad.map(|n| json!({"n": n})))
            },
        );
    }
    suite.finish()
}

/// Residues of the exponents below, large enough for every depth used here.
const MOD_BITS: u32 = 48;

fn md(x: i128) -> i64 {
    x.rem_euclid(1i128 << MOD_BITS) as i64
}

/// `a_i γ^m z_k`, or `γ^m z_k` for `i = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Aiz {
    i: u32,
    m: i64,
    k: i64,
}

impl Aiz {
    fn word(&self) -> Word {
        let mut letters = Vec::new();
        if self.i > 0 {
            letters.push(Letter::a(self.i, 1));
        }
        letters.push(Letter::gamma(self.m));
        letters.push(Letter::z(self.k));
        Word::from_letters(letters)
    }

    /// First descendants by the closed formulas.
    fn descendants(&self, r: u32) -> Vec<Aiz> {
        let (i, m, k) = (self.i, self.m as i128, self.k as i128);
        let l = (k - 1) / 2;
        let k2 = md(k * k);
        let odd = m % 2 == 1;
        let e = |i, m| Aiz {
            i,
            m: md(m),
            k: self.k,
        };
        match (i, odd) {
            (0, true) => vec![Aiz {
                i: 0,
                m: md(m * (k + 1) / 2),
                k: k2,
            }],
            (0, false) => vec![e(0, m / 2), e(0, m / 2 + l)],
            (1, true) => vec![e(r, (m - 1) / 2), e(0, (m + 1) / 2 + l)],
            (1, false) => vec![Aiz {
                i: r,
                m: md((1 + k) * m / 2 + l),
                k: k2,
            }],
            (_, false) => vec![e(i - 1, m / 2), e(0, m / 2 + l)],
            (_, true) => vec![Aiz {
                i: i - 1,
                m: md((m + 1) / 2 + l + k * ((m - 1) / 2)),
                k: k2,
            }],
        }
    }

    fn expected_sign(&self) -> i8 {
        let even = self.m % 2 == 0;
        if (self.i > 1 && even) || (self.i == 1 && !even) {
            1
        } else {
            -1
        }
    }
}

fn same_multiset(xs: &[Portrait], ys: &[Portrait]) -> bool {
    let mut left: Vec<&Portrait> = ys.iter().collect();
    xs.len() == ys.len()
        && xs.iter().all(|x| match left.iter().position(|y| *y == x) {
            Some(p) => {
                left.swap_remove(p);
                true
            }
            None => false,
        })
}

fn portraits(ws: &[Word], n: u32, sys: &GeneratorSystem) -> Result<Vec<Portrait>> {
    ws.iter().map(|w| truncate_word(w, n, sys)).collect()
}

/// Compares `descendants_1` with the closed formulas; returns a counterexample.
fn formula_mismatch(x: Aiz, depth: u32, sys: &GeneratorSystem) -> Result<Option<Value>> {
    let actual = descendants_1(&x.word(), sys)?;
    let predicted: Vec<Word> = x.descendants(sys.r()).iter().map(Aiz::word).collect();
    let ok = same_multiset(
        &portraits(&actual, depth, sys)?,
        &portraits(&predicted, depth, sys)?,
    );
    Ok((!ok).then(|| {
        json!({
            "element": x.word().to_string(),
            "computed": actual.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            "formula": predicted.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        })
    }))
}

fn check_chain(x: Aiz, cfg: &GridConfig, sys: &GeneratorSystem) -> Result<Option<Value>> {
    let g = &cfg.blocks;
    let report = block_analysis(&x.word(), g.depth, sys)?;
    if report.stable_block != Trit::Yes {
        return Ok(Some(json!({"stable_block": report.stable_block})));
    }
    let mut cur = x;
    for (n, level) in report.levels.iter().enumerate() {
        let n = n as u32;
        if n > 0 {
            if let Some(c) = formula_mismatch(cur, g.formula_depth, sys)? {
                return Ok(Some(json!({"level": n, "formula": c})));
            }
            let first = cur.descendants(sys.r());
            let k = Dyadic::exact(cur.k);
            let k2 = Dyadic::exact(md(cur.k as i128 * cur.k as i128));
            for d in &first {
                let label = Dyadic::exact(d.k);
                if !label.agrees_mod(&k, MOD_BITS)? && !label.agrees_mod(&k2, MOD_BITS)? {
                    return Ok(Some(json!({"level": n, "label": d.k})));
                }
            }
            cur = match first.into_iter().find(|d| d.i > 0) {
                Some(d) => d,
                None => {
                    return Ok(Some(
                        json!({"level": n, "error": "chain lost its a-letter"}),
                    ))
                }
            };
        }
        match level.d_size() {
            Some(s) if s <= 1 => {}
            other => return Ok(Some(json!({"level": n, "d_size": other}))),
        }
        let Some(member) = &level.member else {
            return Ok(Some(json!({"level": n, "error": "no unique member"})));
        };
        if truncate_word(member, g.formula_depth, sys)?
            != truncate_word(&cur.word(), g.formula_depth, sys)?
        {
            return Ok(Some(
                json!({"level": n, "member": member.to_string(), "formula": cur.word().to_string()}),
            ));
        }
        if level.d_sign != Some(cur.expected_sign()) {
            return Ok(Some(
                json!({"level": n, "d_sign": level.d_sign, "expected": cur.expected_sign()}),
            ));
        }
    }
    // Estimate on every all-plus prefix.
    let plus_prefix = report
        .levels
        .iter()
        .take_while(|l| l.d_sign == Some(1))
        .count() as u32;
    let nu = Dyadic::exact(x.k).nu()?;
    for t in 0..plus_prefix.min(4) {
        for n in nu + 1 + t..=g.estimate_max_level {
            let est = estimate_111(&x.word(), t, n, sys)?;
            if !est.holds {
                return Ok(Some(
                    json!({"t": t, "n": n, "bound": est.bound.to_string(), "actual": est.actual}),
                ));
            }
        }
    }
    Ok(None)
}

pub fn suite_blocks_and_estimates(cfg: &GridConfig, _rng: &mut ChaCha8Rng) -> SuiteResult {
    let g = &cfg.blocks;
    let mut suite = Suite::new(
        "blocks_and_estimates",
        "a_i γ^m z_k and γ^m z_k form stable blocks whose descendants follow the closed formulas, with at most one descendant outside 𝒰(γ) per level, and the block estimate bounds s_n from below",
        serde_json::to_value(g).expect("grid serializes"),
    );
    for &r in &g.rs {
        let sys = system(r);
        for &k in &g.ks {
            for &m in &g.ms {
                for i in 1..=r {
                    let x = Aiz { i, m, k };
                    suite.case(json!({"r": r, "element": x.word().to_string()}), || {
                        check_chain(x, cfg, &sys)
                    });
                }
                let x = Aiz { i: 0, m, k };
                suite.case(json!({"r": r, "element": x.word().to_string()}), || {
                    if let Some(c) = formula_mismatch(x, g.formula_depth, &sys)? {
                        return Ok(Some(c));
                    }
                    let report = block_analysis(&x.word(), g.depth, &sys)?;
                    Ok((report.stable_block != Trit::Yes)
                        .then(|| json!({"stable_block": report.stable_block})))
                });
            }
        }
        suite.case(
            json!({"r": r, "element": "a1", "check": "not a stable block within two levels"}),
            || {
                let report = block_analysis(&Word::a(1), g.depth, &sys)?;
                let rejected = report.stable_block == Trit::No && report.levels.len() <= 3;
                Ok((!rejected).then(
                    || json!({"stable_block": report.stable_block, "levels": report.levels.len()}),
                ))
            },
        );
        let a1z3 = Word::from_letters(vec![Letter::a(1, 1), Letter::z(3)]);
        suite.case(json!({"r": r, "element": "a1 z3", "level": g.profile_level, "ratio_floor": g.ratio_floor}), || {
            let profile = settle_profile(&a1z3, g.profile_level, &sys)?;
            let row = profile.rows.last().expect("nonempty profile");
            Ok((row.ratio() < g.ratio_floor).then(|| json!({"ratio": row.ratio(), "stable": row.stable})))
        });
        for &k in &g.ks {
            suite.case(
                json!({"r": r, "check": "first descendant of a1^3 z_k", "k": k}),
                || {
                    let w = Word::from_letters(vec![Letter::a(1, 3), Letter::z(k)]);
                    let l = (k - 1) / 2;
                    let expected = Word::from_letters(vec![
                        Letter::a(r, 2),
                        Letter::gamma(l),
                        Letter::z(k),
                        Letter::a(r, 1),
                        Letter::z(k),
                    ]);
                    let d = descendants_1(&w, &sys)?;
                    let ok = d.len() == 1
                        && truncate_word(&d[0], g.formula_depth, &sys)?
                            == truncate_word(&expected, g.formula_depth, &sys)?;
                    Ok((!ok).then(
                        || json!({"computed": d.iter().map(|w| w.to_string()).collect::<Vec<_>>()}),
                    ))
                },
            );
        }
    }
    suite.finish()
}

pub fn suite_density(cfg: &GridConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let g = &cfg.density;
    let sys = system(cfg.r);
    let mut suite = Suite::new(
        "density",
        "every element of V agrees on T_n with g z_k0 for a positive word g in a_1, ..., a_r and an odd k0 > 1",
        json!({"words": g.words, "max_level": g.max_level, "r": cfg.r}),
    );
    let spec = RandomWordSpec::default();
    let check = |w: &Word, n: u32| -> Result<Option<Value>> {
        let approx = approximate_in_a(w, n, &sys)?;
        let k0 = approx.k0.value().clone();
        let positive = approx
            .g0
            .letters()
            .iter()
            .all(|l| matches!(l.base, Base::A(_)) && l.exp.as_i64().is_some_and(|e| e > 0));
        let fine = approx.verified
            && positive
            && k0 > 1.into()
            && approx.k0.is_odd()
            && truncate_word(&approx.word, n, &sys)? == product_portrait(w, n, &sys)?;
        Ok((!fine).then(|| json!({"element": w.to_string(), "n": n, "k0": approx.k0.to_string()})))
    };
    for _ in 0..g.words {
        let w = random_v_word(rng, &spec, &sys);
        suite.case(
            json!({"element": w.to_string(), "levels": [1, g.max_level]}),
            || {
                for n in 1..=g.max_level {
                    if let Some(c) = check(&w, n)? {
                        return Ok(Some(c));
                    }
                }
                Ok(None)
            },
        );
    }
    let n = g.max_level.min(6);
    suite.case(json!({"element": "gamma z3", "n": n}), || {
        check(&Word::gamma_z(1, 3), n)
    });
    suite.case(
        json!({"element": "a1 z5 z5^-1", "n": n, "expected_k0": 1 + (1u64 << n)}),
        || {
            let w = Word::a(1).mul(&Word::z(5)).mul(&Word::z(5).inverse());
            let approx = approximate_in_a(&w, n, &sys)?;
            let ok = approx.k0 == Dyadic::exact(1 + (1i64 << n));
            Ok((!ok).then(|| json!({"k0": approx.k0.to_string()})))
        },
    );
    suite.case(json!({"element": "a1 a2", "n": n}), || {
        let w = Word::from_letters(vec![Letter::a(1, 1), Letter::a(2, 1)]);
        let approx = approximate_in_a(&w, n, &sys)?;
        Ok((approx.g0 != w).then(|| json!({"g0": approx.g0.to_string()})))
    });
    for _ in 0..g.words.min(20) {
        let (u, v) = (
            random_v_word(rng, &spec, &sys),
            random_v_word(rng, &spec, &sys),
        );
        suite.case(
            json!({"check": "a-length is subadditive", "u": u.to_string(), "v": v.to_string()}),
            || {
                let uv = u.mul(&v).a_length_upper()?;
                let sum = u.a_length_upper()? + v.a_length_upper()?;
                Ok((uv > sum).then(|| json!({"uv": uv, "u+v": sum})))
            },
        );
    }
    suite.finish()
}

pub fn suite_stable_criterion(cfg: &GridConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let g = &cfg.stable_criterion;
    let sys = system(cfg.r);
    let mut suite = Suite::new(
        "stable_criterion",
        "a cycle is stable exactly when the product of the sections along it is an odometer; the verdict matches following the lifts directly",
        json!({"words": g.words, "max_level": g.max_level, "extra_levels": g.extra_levels, "r": cfg.r}),
    );
    let spec = RandomWordSpec::default();
    for _ in 0..g.words {
        let w = random_word(rng, &spec, &sys);
        let n = rng.gen_range(1..=g.max_level);
        suite.case(json!({"element": w.to_string(), "n": n}), || {
            let records = cycle_records_word(&w, n, &sys)?;
            let p = product_portrait(&w, n + g.extra_levels, &sys)?;
            let lifts = lift_doubling_failures(&p, n, g.extra_levels)?;
            for (cycle, fail) in lifts {
                let Some(rec) = records
                    .iter()
                    .find(|r| r.representative == cycle.representative)
                else {
                    return Ok(Some(json!({"missing_cycle": cycle.representative})));
                };
                let predicted = match rec.status {
                    StabilityStatus::Splits(at) if at <= n + g.extra_levels => Some(at),
                    _ => None,
                };
                if predicted != fail || rec.length != cycle.length {
                    return Ok(Some(json!({
                        "cycle": cycle.representative,
                        "status": rec.status,
                        "lift_failure": fail,
                    })));
                }
            }
            Ok(None)
        });
    }
    suite.finish()
}

pub fn suite_counting_laws(cfg: &GridConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let g = &cfg.counting_laws;
    let sys = system(cfg.r);
    let mut suite = Suite::new(
        "counting_laws",
        "s_n is conjugation invariant, s_(n+1) ≥ 2 s_n, 2 s_n(w) ≤ s_(n+1)(w^2) ≤ s_(n+1)(w), s_(n+1)(w) = s_n(w_0) + s_n(w_1) or 2 s_n(w_0 w_1), and squaring removes exactly the stable fixed vertices",
        json!({"words": g.words, "max_level": g.max_level, "conjugators": g.conjugators, "r": cfg.r}),
    );
    let spec = RandomWordSpec::default();
    let words: Vec<Word> = (0..g.words)
        .map(|_| random_word(rng, &spec, &sys))
        .collect();
    let mut counter = StableCounter::new(sys);
    for w in &words {
        suite.case(
            json!({"element": w.to_string(), "levels": [1, g.max_level]}),
            || {
                let (w0, w1, swap) = split(w, &sys)?;
                let w01 = w0.mul(&w1);
                let square = w.mul(w);
                let mut prev: Option<u64> = None;
                for n in 1..=g.max_level {
                    let s = counter.count(w, n, Mode::Recursive)?;
                    let d = s_n(w, n, Mode::Direct, &sys)?;
                    if s != d {
                        return Ok(Some(json!({"n": n, "recursive": s, "direct": d})));
                    }
                    let before = prev;
                    if let Some(p) = before {
                        if s < 2 * p {
                            return Ok(Some(json!({"n": n, "s_n": s, "s_(n-1)": p})));
                        }
                    }
                    prev = Some(s);
                    if n >= 2 {
                        let below = if swap {
                            2 * counter.count(&w01, n - 1, Mode::Recursive)?
                        } else {
                            counter.count(&w0, n - 1, Mode::Recursive)?
                                + counter.count(&w1, n - 1, Mode::Recursive)?
                        };
                        if s != below {
                            return Ok(Some(json!({"n": n, "s_n": s, "from_sections": below})));
                        }
                    }
                    let fixed: u64 = cycle_records_word(w, n, &sys)?
                        .iter()
                        .filter(|r| r.length == 1 && r.status.is_stable())
                        .count() as u64;
                    let sq = counter.count(&square, n, Mode::Recursive)?;
                    if sq + fixed != s {
                        return Ok(Some(
                            json!({"n": n, "s_n": s, "s_n(w^2)": sq, "stable_fixed": fixed}),
                        ));
                    }
                    // 2 s_(n-1)(w) ≤ s_n(w^2) ≤ s_n(w)
                    if before.is_some_and(|p| 2 * p > sq) || sq > s {
                        return Ok(Some(
                            json!({"n": n, "s_(n-1)": before, "s_n(w^2)": sq, "s_n": s}),
                        ));
                    }
                }
                Ok(None)
            },
        );
    }
    for j in 0..g.conjugators {
        let c = random_word(rng, &spec, &sys);
        let w = &words[j % words.len().max(1)];
        let n = rng.gen_range(1..=g.max_level);
        suite.case(
            json!({"element": w.to_string(), "conjugator": c.to_string(), "n": n}),
            || {
                let conj = c.mul(w).mul(&c.inverse());
                let (a, b) = (
                    counter.count(w, n, Mode::Recursive)?,
                    counter.count(&conj, n, Mode::Recursive)?,
                );
                Ok((a != b).then(|| json!({"s_n": a, "s_n(conjugate)": b})))
            },
        );
    }
    suite.finish()
}
