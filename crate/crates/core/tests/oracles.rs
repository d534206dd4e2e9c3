use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use settled::dynamics::{s_n, s_n_portrait, Mode};
use settled::symbolic::{
    conjugator_word, product_portrait, truncate_word, GeneratorSystem, Letter, Word,
};
use settled::{Dyadic, Portrait};

fn all_portraits(depth: u32) -> Vec<Portrait> {
    let nodes = (1usize << depth) - 1;
    (0..1u32 << nodes)
        .map(|mask| {
            let bits = (0..nodes).map(|i| mask >> i & 1 == 1).collect();
            Portrait::from_bits(depth, bits).unwrap()
        })
        .collect()
}

#[test]
fn conjugacy_in_omega_3_matches_brute_force() {
    let all = all_portraits(3);
    assert_eq!(all.len(), 128);
    let inverses: Vec<Portrait> = all.iter().map(Portrait::inverse).collect();
    // Class index of every element by orbit enumeration.
    let mut class = vec![usize::MAX; all.len()];
    let mut classes = 0;
    for i in 0..all.len() {
        if class[i] != usize::MAX {
            continue;
        }
        for (g, gi) in all.iter().zip(&inverses) {
            let c = gi.compose(&all[i]).unwrap().compose(g).unwrap();
            let j = all.iter().position(|q| *q == c).unwrap();
            class[j] = classes;
        }
        classes += 1;
    }
    for i in 0..all.len() {
        for j in 0..all.len() {
            assert_eq!(
                all[i].conjugate_in_level(&all[j]).unwrap(),
                class[i] == class[j],
                "{} vs {}",
                all[i],
                all[j]
            );
        }
    }
}

#[test]
fn odometers_of_omega_4_are_the_full_cycles() {
    for p in all_portraits(4) {
        let full_cycle = p.cycle_structure(4).unwrap().cycles.len() == 1;
        assert_eq!(p.is_odometer(), full_cycle, "{p}");
        assert_eq!(p.signs().iter().all(|&s| s == -1), full_cycle);
    }
}

/// Vertices of level `n` whose cycle doubles on every level down to the portrait's depth.
fn stable_by_lifting(p: &Portrait, n: u32) -> u64 {
    let perms: Vec<Vec<u32>> = (n..=p.depth())
        .map(|m| p.level_permutation(m).unwrap())
        .collect();
    let orbit_len = |perm: &[u32], v: u32| {
        let mut len = 1;
        let mut x = perm[v as usize];
        while x != v {
            x = perm[x as usize];
            len += 1;
        }
        len
    };
    (0..1u32 << n)
        .filter(|&v| {
            let base = orbit_len(&perms[0], v);
            (1..perms.len()).all(|d| orbit_len(&perms[d], v << d) == base << d)
        })
        .count() as u64
}

#[test]
fn portrait_stable_counts_match_lifting() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let p = Portrait::random(11, &mut rng);
        for n in 1..=6 {
            assert_eq!(s_n_portrait(&p, n).unwrap(), stable_by_lifting(&p, n));
        }
    }
}

#[test]
fn word_stable_counts_match_lifting() {
    let sys = GeneratorSystem::basilica();
    for w in [
        "z[3]",
        "g*z[5]",
        "a1*z[3]",
        "a2*g^2*z[7]",
        "a1^3*z[5]",
        "g^4*z[9]",
        "a1*a2",
    ] {
        let w = settled::symbolic::parse_expression(w, &sys).unwrap();
        let p = truncate_word(&w, 16, &sys).unwrap();
        for n in 1..=8 {
            // Eight extra levels of lifting see every split of these words.
            assert_eq!(
                s_n(&w, n, Mode::Direct, &sys).unwrap(),
                stable_by_lifting(&p, n),
                "{w} n={n}"
            );
        }
    }
}

#[test]
fn wreath_recursions_of_gamma_and_z() {
    let sys = GeneratorSystem::basilica();
    for n in 1..=10 {
        let g = Portrait::gamma(n);
        let id = Portrait::identity(n - 1);
        assert_eq!(
            g,
            Portrait::assemble(&Portrait::gamma(n - 1), &id, true).unwrap()
        );
        for k in [3i64, 5, 7, 9, 11, -3] {
            let l = (k - 1).div_euclid(2);
            let z = product_portrait(&Word::z(k), n, &sys).unwrap();
            let right = product_portrait(&Word::gamma_z(l, k), n - 1, &sys).unwrap();
            let left = product_portrait(&Word::z(k), n - 1, &sys).unwrap();
            assert_eq!(
                z,
                Portrait::assemble(&left, &right, false).unwrap(),
                "k={k} n={n}"
            );
        }
    }
}

#[test]
fn generator_recursions() {
    for r in 2..=4 {
        let sys = GeneratorSystem::new(r).unwrap();
        for n in 2..=9 {
            let a1 = product_portrait(&Word::a(1), n, &sys).unwrap();
            let ar = product_portrait(&Word::a(r), n - 1, &sys).unwrap();
            let id = Portrait::identity(n - 1);
            assert_eq!(a1, Portrait::assemble(&ar, &id, true).unwrap());
            for i in 2..=r {
                let ai = product_portrait(&Word::a(i), n, &sys).unwrap();
                let prev = product_portrait(&Word::a(i - 1), n - 1, &sys).unwrap();
                assert_eq!(ai, Portrait::assemble(&prev, &id, false).unwrap());
            }
        }
    }
}

#[test]
fn stated_values() {
    let sys = GeneratorSystem::basilica();
    // γ acts as a 2^n-cycle.
    for n in 1..=12 {
        assert!(Portrait::gamma(n).is_odometer());
    }
    // z_5 is trivial on T_2 but not on T_3; z_9 is trivial on T_3.
    assert!(product_portrait(&Word::z(5), 2, &sys)
        .unwrap()
        .is_identity());
    assert!(!product_portrait(&Word::z(5), 3, &sys)
        .unwrap()
        .is_identity());
    assert!(product_portrait(&Word::z(9), 3, &sys)
        .unwrap()
        .is_identity());
    // Signs of z_5 are all +1; z_3 has sgn_1 = 1 and -1 below.
    let z5 = product_portrait(&Word::z(5), 12, &sys).unwrap();
    let z3 = product_portrait(&Word::z(3), 12, &sys).unwrap();
    assert!(z5.signs().iter().all(|&s| s == 1));
    assert_eq!(z3.signs()[0], 1);
    assert!(z3.signs()[1..].iter().all(|&s| s == -1));
    // s_n(z_5) = 2^n - 2 and s_n(γ z_5) = 2^n.
    for n in 1..=12 {
        assert_eq!(
            s_n(&Word::z(5), n, Mode::Direct, &sys).unwrap(),
            (1 << n) - 2
        );
        assert_eq!(
            s_n(&Word::gamma_z(1, 5), n, Mode::Direct, &sys).unwrap(),
            1 << n
        );
    }
    // At most 2^(ν+1) = 4 vertices of z_3 outside stable cycles.
    for n in 2..=20 {
        let s = s_n(&Word::z(3), n, Mode::Recursive, &sys).unwrap();
        assert!((1u64 << n) - s <= 4, "n={n}");
    }
    assert_eq!(
        s_n(&Word::z(3), 20, Mode::Recursive, &sys).unwrap(),
        (1 << 20) - 4
    );
    // a_1^2 = (a_2, a_2) for the Basilica generators.
    let sq = product_portrait(&Word::a_pow(1, 2), 10, &sys).unwrap();
    let a2 = product_portrait(&Word::a(2), 9, &sys).unwrap();
    assert_eq!(sq, Portrait::assemble(&a2, &a2, false).unwrap());
    // The constructed g_6 conjugates a_1 a_2 to γ.
    let g = conjugator_word(6, &sys);
    let w = g.mul(&sys.generator_product()).mul(&g.inverse());
    assert_eq!(truncate_word(&w, 6, &sys).unwrap(), Portrait::gamma(6));
}

#[test]
fn nu_matches_integer_valuation() {
    for k in (3i64..2000).step_by(2).chain((-2001i64..-1).step_by(2)) {
        let q = (k * k - 1) / 4;
        assert_eq!(Dyadic::exact(k).nu().unwrap(), q.trailing_zeros(), "k={k}");
    }
}

#[test]
fn letter_powers_match_repeated_products() {
    let sys = GeneratorSystem::new(3).unwrap();
    for i in 1..=3 {
        let one = product_portrait(&Word::a(i), 9, &sys).unwrap();
        for e in [-5i64, -1, 2, 7] {
            let p = product_portrait(&Word::letter(Letter::a(i, e)), 9, &sys).unwrap();
            assert_eq!(p, one.pow_signed(e));
        }
    }
}
