mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use qprefix::channel::{self, init_channel, CodeBook, NoiseKind, NoiseModel, Pauli, Schedule};
use qprefix::codec::{
    build_code, concatenated_rate, monotone_entropy, monotone_length_cap, optimal_rate,
    sequential_projections, tensor_ensemble, Ensemble,
};
use qprefix::oracle::{distinct_projections, hmon_bruteforce};
use qprefix::prefix::{distinguishable_by_prefix, gram_schmidt, is_prefix_free, DEPENDENCY_TOL};
use qprefix::{BitString, QubitString};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn key(p: &[f64]) -> Vec<i64> {
    p.iter().map(|x| (x * 1e12).round() as i64).collect()
}

fn random_words<R: Rng>(rng: &mut R, count: usize, max_len: usize) -> Vec<BitString> {
    let set: BTreeSet<BitString> = (0..count)
        .map(|_| {
            let len = rng.random_range(1..=max_len);
            BitString::from_bits((0..len).map(|_| rng.random_bool(0.5)).collect::<Vec<_>>())
        })
        .collect();
    set.into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Padding is injective on supports where no string is a prefix of another.
    #[test]
    fn zero_extension_preserves_inner_products(seed: u64, extra in 0usize..3) {
        let mut r = rng(seed);
        let kets: Vec<QubitString> = random_prefix_code(&mut r, 6, 1)
            .into_iter()
            .map(QubitString::basis)
            .collect();
        let a = random_span_element(&mut r, &kets);
        let b = random_span_element(&mut r, &kets);
        let n = a.base_length().unwrap().max(b.base_length().unwrap()) + extra;
        let za = a.zero_extended(n).unwrap();
        let zb = b.zero_extended(n).unwrap();
        prop_assert!((za.inner(&zb) - a.inner(&b)).norm() <= 1e-12);
    }

    #[test]
    fn lengths_ignore_global_phase(seed: u64, theta in 0.0f64..6.3) {
        let q = random_qstring(&mut rng(seed), 6, 6);
        let rotated = q.scaled(num_complex::Complex64::from_polar(1.0, theta));
        prop_assert_eq!(q.base_length().unwrap(), rotated.base_length().unwrap());
        prop_assert!((q.avg_length().unwrap() - rotated.avg_length().unwrap()).abs() <= 1e-12);
        prop_assert!(q.avg_length().unwrap() <= q.base_length().unwrap() as f64 + 1e-12);
    }

    #[test]
    fn base_length_is_additive(seed: u64) {
        let mut r = rng(seed);
        let a = random_qstring(&mut r, 6, 5);
        let b = random_qstring(&mut r, 6, 5);
        prop_assert_eq!(
            a.concat(&b).base_length().unwrap(),
            a.base_length().unwrap() + b.base_length().unwrap()
        );
    }

    #[test]
    fn eigenvector_concatenation_is_a_tensor_product(seed: u64) {
        let mut r = rng(seed);
        let words = random_words(&mut r, 4, 3);
        let len = words[0].len();
        let same: Vec<QubitString> = words
            .into_iter()
            .filter(|w| w.len() == len)
            .map(QubitString::basis)
            .collect();
        let psi = random_span_element(&mut r, &same);
        let phi = random_qstring(&mut r, 4, 4);
        let joint = psi.concat(&phi);
        for (s, a) in psi.terms() {
            for (t, b) in phi.terms() {
                prop_assert!((joint.amplitude(&s.concat(t)) - a * b).norm() <= 1e-12);
            }
        }
        prop_assert_eq!(joint.support_size(), psi.support_size() * phi.support_size());
    }

    #[test]
    fn distinguishability_matches_prefix_freedom(seed: u64) {
        let mut r = rng(seed);
        let words = random_words(&mut r, 5, 4);
        let vectors = rotate_within_lengths(&mut r, &words);
        prop_assert_eq!(
            distinguishable_by_prefix(&vectors).unwrap(),
            is_prefix_free(&vectors).prefix_free
        );
    }

    #[test]
    fn gram_schmidt_is_orthonormal_and_reconstructs(seed: u64, n in 1usize..7, d in 1usize..5) {
        let e = random_ensemble(&mut rng(seed), n, d);
        let vectors = e.vectors();
        let gs = gram_schmidt(&vectors, DEPENDENCY_TOL);
        for (i, u) in gs.basis.iter().enumerate() {
            for (j, v) in gs.basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((u.dotc(v).norm() - want).abs() <= 1e-9);
            }
        }
        for (k, v) in vectors.iter().enumerate() {
            let used = gs.sources.iter().filter(|&&s| s <= k).count();
            let mut rebuilt = v.clone() * num_complex::Complex64::new(0.0, 0.0);
            for b in &gs.basis[..used] {
                rebuilt += b * b.dotc(v);
            }
            prop_assert!((rebuilt - v).norm() <= 1e-9);
        }
    }

    #[test]
    fn enumerator_matches_permutation_oracle(seed: u64, n in 1usize..7, d in 1usize..5) {
        let e = random_ensemble(&mut rng(seed), n, d);
        let fast: BTreeSet<Vec<i64>> = sequential_projections(&e)
            .unwrap()
            .iter()
            .map(|p| key(&p.probs))
            .collect();
        let slow: BTreeSet<Vec<i64>> = distinct_projections(&e).unwrap().iter().map(|p| key(p)).collect();
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn built_codes_are_valid(seed: u64, n in 1usize..7, d in 1usize..5) {
        let mut r = rng(seed);
        let e = random_ensemble(&mut r, n, d);
        let code = build_code(&e).unwrap();
        let words: Vec<QubitString> = code.codewords().iter().cloned().map(QubitString::basis).collect();
        prop_assert!(is_prefix_free(&words).prefix_free);

        for _ in 0..10 {
            let x = random_span_ket(&mut r, &e);
            let y = random_span_ket(&mut r, &e);
            let (cx, cy) = (code.encode(&x).unwrap(), code.encode(&y).unwrap());
            prop_assert!((cx.inner(&cy) - x.dotc(&y)).norm() <= 1e-9);
        }

        let projection = code.projection();
        let mut expected = 0.0;
        for (k, group) in projection.groups.iter().enumerate() {
            for &j in group {
                let len = code.encode(&e.states()[j].vector).unwrap().base_length().unwrap();
                prop_assert_eq!(len as u32, code.lengths()[k]);
                expected += e.states()[j].probability * len as f64;
            }
        }
        prop_assert!((expected - code.rate()).abs() <= 1e-9);
    }

    #[test]
    fn concatenated_codes_are_subadditive(seed: u64, n in 1usize..4, m in 1usize..4) {
        let mut r = rng(seed);
        let e = random_ensemble(&mut r, n, 2);
        let f = random_ensemble(&mut r, m, 2);
        let (ce, cf) = (build_code(&e).unwrap(), build_code(&f).unwrap());
        let joint = concatenated_rate(&ce, &e, &cf, &f).unwrap();
        prop_assert!((joint - ce.rate() - cf.rate()).abs() <= 1e-9);
        let tensor = optimal_rate(&tensor_ensemble(&e, &f)).unwrap().rate;
        prop_assert!(tensor <= joint + 1e-9);
    }

    #[test]
    fn zero_noise_round_trip_is_a_product_state(seed: u64) {
        let mut r = rng(seed);
        let words = random_prefix_code(&mut r, 6, 1);
        let book = CodeBook::new(words.clone()).unwrap();
        let kets: Vec<QubitString> = words.into_iter().map(QubitString::basis).collect();
        let message = random_span_element(&mut r, &kets);
        let l_max = book.max_len() + r.random_range(0..2);
        let mut state = init_channel(&message, &book, l_max).unwrap();
        for i in 1..=l_max {
            let next = state.step_with_branch(i, Pauli::I).unwrap();
            prop_assert!((next.norm_sqr() - 1.0).abs() <= 1e-9);
            prop_assert_eq!(next.support_size(), state.support_size());
            state = next;
        }
        prop_assert!(state.residual_entanglement() <= 1e-9);
        let target = message.zero_extended(l_max).unwrap();
        prop_assert!((state.bob_register().inner(&target).norm() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn noise_after_the_longest_word_is_harmless(seed: u64, q in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let words = random_prefix_code(&mut r, 5, 1);
        let book = CodeBook::new(words.clone()).unwrap();
        let kets: Vec<QubitString> = words.into_iter().map(QubitString::basis).collect();
        let message = random_span_element(&mut r, &kets);
        let t = book.max_len();
        let noise = NoiseModel::new(NoiseKind::Depolarizing, Schedule::Constant { q }, seed)
            .unwrap()
            .with_window(t + 1, t + 3)
            .unwrap();
        let report = channel::run(&message, &book, t + 3, &noise, 20).unwrap();
        prop_assert!((report.mean_fidelity - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn code_words_arrive_bit_by_bit(seed: u64) {
        let mut r = rng(seed);
        let book = CodeBook::new(random_prefix_code(&mut r, 6, 1)).unwrap();
        for w in book.words() {
            for k in 0..w.len() {
                prop_assert!(!book.contains(&w.prefix(k)));
            }
            let mut state = init_channel(&QubitString::basis(w.clone()), &book, w.len()).unwrap();
            for i in 1..=w.len() {
                let (cfg, _) = state.terms().next().unwrap();
                prop_assert!(!book.completed_before(&cfg.bob, i));
                state = state.step_with_branch(i, Pauli::I).unwrap();
                let (cfg, _) = state.terms().next().unwrap();
                prop_assert_eq!(cfg.bob.get(i - 1), w.get(i - 1));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// The solver's word-length cap never excludes the optimum found with cap 2n.
    #[test]
    fn length_cap_loses_nothing(seed: u64, n in 1usize..=8) {
        let p = random_distribution(&mut rng(seed), n);
        let solver = monotone_entropy(&p).unwrap();
        let oracle = hmon_bruteforce(&p, 2 * n as u32).unwrap();
        prop_assert!((solver.objective - oracle.value).abs() <= 1e-12);
        prop_assert!(oracle.lengths.iter().all(|&l| l <= monotone_length_cap(n) || n == 1));
    }
}

#[test]
fn zero_extension_merges_strings_that_differ_by_trailing_zeros() {
    let (a, b) = (QubitString::ket("0"), QubitString::ket("00"));
    assert_eq!(a.inner(&b).norm(), 0.0);
    assert_eq!(
        a.zero_extended(2)
            .unwrap()
            .inner(&b.zero_extended(2).unwrap())
            .norm(),
        1.0
    );
}

#[test]
fn enumerator_matches_oracle_on_fixtures() {
    for name in [
        "three_orthogonal.json",
        "four_state.json",
        "eight_state.json",
    ] {
        let e: Ensemble = load_ensemble(name);
        let fast: BTreeSet<Vec<i64>> = sequential_projections(&e)
            .unwrap()
            .iter()
            .map(|p| key(&p.probs))
            .collect();
        let slow: BTreeSet<Vec<i64>> = distinct_projections(&e)
            .unwrap()
            .iter()
            .map(|p| key(p))
            .collect();
        assert_eq!(fast, slow, "{name}");
    }
}
