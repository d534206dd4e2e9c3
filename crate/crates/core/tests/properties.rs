use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use settled::dynamics::{
    s_n, s_n_portrait, settle_profile, stable_status_word, Mode, SettleProfile, StabilityStatus,
};
use settled::symbolic::{
    parse_expression, product_portrait, random_word, sign_profile, split, truncate_word,
    GeneratorSystem, RandomWordSpec, Word,
};
use settled::{Dyadic, Portrait};

fn portrait(depth: u32, seed: u64) -> Portrait {
    Portrait::random(depth, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn word(seed: u64, r: u32) -> (Word, GeneratorSystem) {
    let sys = GeneratorSystem::new(r).unwrap();
    let w = random_word(
        &mut ChaCha8Rng::seed_from_u64(seed),
        &RandomWordSpec::default(),
        &sys,
    );
    (w, sys)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_associative_with_inverses(d in 1u32..9, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (p, q, s) = (portrait(d, a), portrait(d, b), portrait(d, c));
        let left = p.compose(&q).unwrap().compose(&s).unwrap();
        let right = p.compose(&q.compose(&s).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
    }

    #[test]
    fn level_signs_are_multiplicative(d in 1u32..10, a in any::<u64>(), b in any::<u64>()) {
        let (p, q) = (portrait(d, a), portrait(d, b));
        let pq = p.compose(&q).unwrap();
        for j in 1..=d {
            prop_assert_eq!(pq.sign_at(j).unwrap(), p.sign_at(j).unwrap() * q.sign_at(j).unwrap());
        }
    }

    #[test]
    fn conjugation_preserves_class_and_stable_count(d in 2u32..9, a in any::<u64>(), b in any::<u64>()) {
        let (p, g) = (portrait(d, a), portrait(d, b));
        let c = p.conjugate_by(&g).unwrap();
        prop_assert!(p.conjugate_in_level(&c).unwrap());
        prop_assert_eq!(p.cycle_structure(d).unwrap().length_counts(), c.cycle_structure(d).unwrap().length_counts());
        for n in 1..d {
            prop_assert_eq!(s_n_portrait(&p, n).unwrap(), s_n_portrait(&c, n).unwrap());
        }
    }

    #[test]
    fn sections_reassemble(d in 1u32..10, a in any::<u64>()) {
        let p = portrait(d, a);
        let (l, r, swap) = p.sections().unwrap();
        prop_assert_eq!(Portrait::assemble(&l, &r, swap).unwrap(), p.clone());
        let bytes = p.to_binary();
        prop_assert_eq!(Portrait::from_binary(&bytes).unwrap(), p.clone());
        prop_assert_eq!(Portrait::from_json(&p.to_json()).unwrap(), p);
    }

    #[test]
    fn residue_and_letter_evaluations_agree(seed in any::<u64>(), r in 2u32..5, n in 1u32..11) {
        let (w, sys) = word(seed, r);
        prop_assert_eq!(truncate_word(&w, n, &sys).unwrap(), product_portrait(&w, n, &sys).unwrap());
    }

    #[test]
    fn sign_profile_matches_portrait(seed in any::<u64>(), r in 2u32..5) {
        let (w, sys) = word(seed, r);
        let prof = sign_profile(&w, &sys).unwrap();
        let p = truncate_word(&w, 12, &sys).unwrap();
        for j in 1..=12 {
            prop_assert_eq!(prof.at(j), p.sign_at(j).unwrap());
        }
    }

    #[test]
    fn word_display_reparses(seed in any::<u64>(), r in 2u32..5) {
        let (w, sys) = word(seed, r);
        let back = parse_expression(&w.to_string(), &sys).unwrap();
        prop_assert_eq!(truncate_word(&back, 10, &sys).unwrap(), truncate_word(&w, 10, &sys).unwrap());
    }

    #[test]
    fn wreath_recursion_of_words(seed in any::<u64>(), r in 2u32..5) {
        let (w, sys) = word(seed, r);
        let (w0, w1, swap) = split(&w, &sys).unwrap();
        let p = truncate_word(&w, 9, &sys).unwrap();
        let l = truncate_word(&w0, 8, &sys).unwrap();
        let rt = truncate_word(&w1, 8, &sys).unwrap();
        prop_assert_eq!(Portrait::assemble(&l, &rt, swap).unwrap(), p);
    }

    #[test]
    fn stable_counts_grow_and_modes_agree(seed in any::<u64>(), r in 2u32..4) {
        let (w, sys) = word(seed, r);
        let mut prev = 0;
        for n in 1..=10 {
            let s = s_n(&w, n, Mode::Recursive, &sys).unwrap();
            prop_assert_eq!(s, s_n(&w, n, Mode::Direct, &sys).unwrap());
            prop_assert!(s >= 2 * prev);
            prop_assert!(s <= 1 << n);
            prev = s;
        }
    }

    #[test]
    fn stable_count_is_conjugation_invariant(a in any::<u64>(), b in any::<u64>(), n in 1u32..10) {
        let (w, sys) = word(a, 2);
        let (c, _) = word(b, 2);
        let conj = c.mul(&w).mul(&c.inverse());
        prop_assert_eq!(s_n(&w, n, Mode::Recursive, &sys).unwrap(), s_n(&conj, n, Mode::Recursive, &sys).unwrap());
    }

    #[test]
    fn portrait_counts_bound_word_counts(seed in any::<u64>(), n in 1u32..7) {
        let (w, sys) = word(seed, 2);
        // A portrait sees finitely many levels, so it can only over-count.
        let p = truncate_word(&w, n + 8, &sys).unwrap();
        let by_portrait = s_n_portrait(&p, n).unwrap();
        let by_word = s_n(&w, n, Mode::Direct, &sys).unwrap();
        prop_assert!(by_portrait >= by_word);
    }

    #[test]
    fn certified_cycles_keep_doubling(seed in any::<u64>(), n in 1u32..6) {
        let (w, sys) = word(seed, 2);
        let p = truncate_word(&w, n + 6, &sys).unwrap();
        for c in p.cycle_structure(n).unwrap().cycles {
            if stable_status_word(&w, &c, n, &sys).unwrap() == StabilityStatus::Certified {
                let start = c.representative << 6;
                let len = p.cycle_structure(n + 6).unwrap().cycles.into_iter()
                    .find(|d| d.members.contains(&start)).unwrap().length;
                prop_assert_eq!(len, c.length << 6);
            }
        }
    }

    #[test]
    fn profile_csv_round_trips(seed in any::<u64>(), n in 1u32..12) {
        let (w, sys) = word(seed, 2);
        let p = settle_profile(&w, n, &sys).unwrap();
        prop_assert_eq!(SettleProfile::from_csv(&p.to_csv()).unwrap(), p);
    }

    #[test]
    fn unit_arithmetic(k in any::<i32>()) {
        let k = Dyadic::exact(2 * i64::from(k) + 1);
        let inv = k.inverse(40).unwrap();
        prop_assert!((&k * &inv).agrees_mod(&Dyadic::one(), 40).unwrap());
        let ell = k.ell().unwrap();
        let back = &(&ell + &ell) + &Dyadic::one();
        prop_assert!(back.same(&k));
    }
}
