mod common;

use common::{double_loop, max_rel_err, random_string, rng};
use lpdist_core::{
    brute_force_hamming, brute_force_lp, exact_even_p, small_alphabet_distance, small_alphabet_distance_with, Backend,
    CorrelationStats, EngineOptions, IntString,
};
use proptest::prelude::*;
use rand::Rng;

fn s(v: &[u64], bits: u32) -> IntString {
    IntString::new(v.to_vec(), bits).unwrap()
}

#[test]
fn tiny_instance_by_hand() {
    let t = s(&[5, 0, 2], 3);
    let p = s(&[1, 2], 3);
    assert_eq!(brute_force_lp(&t, &p, 2.0).unwrap().values(), [20.0, 1.0]);
    assert_eq!(exact_even_p(&t, &p, 2).unwrap().values(), [20.0, 1.0]);
    let lp = brute_force_lp(&t, &p, 2.0).unwrap().into_lp();
    assert_eq!(lp.values(), [20f64.sqrt(), 1.0]);
    assert_eq!(brute_force_hamming(&t, &p).unwrap().values(), [2.0, 1.0]);
}

#[test]
fn hamming_kernel_is_exact_and_integral() {
    let mut r = rng(1);
    for _ in 0..40 {
        let n = r.random_range(1..=256);
        let m = r.random_range(1..=n.min(32));
        let t = random_string(&mut r, n, 3);
        let p = random_string(&mut r, m, 3);
        let got =
            small_alphabet_distance(&t, &p, |x| x as usize, |y| y as usize, |a, b| (a != b) as u8 as f64, 8).unwrap();
        let want = brute_force_hamming(&t, &p).unwrap();
        for (g, w) in got.values().iter().zip(want.values()) {
            assert_eq!(g.round(), *w);
            assert!((g - w).abs() < 1e-6);
            assert!(*w <= m as f64);
        }
    }
}

#[test]
fn l1_kernel_matches_brute_force() {
    let mut r = rng(2);
    for bits in 1..=4 {
        let t = random_string(&mut r, 300, bits);
        let p = random_string(&mut r, 20, bits);
        let got = small_alphabet_distance(
            &t,
            &p,
            |x| x as usize,
            |y| y as usize,
            |a, b| a.abs_diff(b) as f64,
            1 << bits,
        )
        .unwrap();
        let want = brute_force_lp(&t, &p, 1.0).unwrap();
        for (g, w) in got.values().iter().zip(want.values()) {
            assert_eq!(g.round(), *w);
        }
    }
}

#[test]
fn arbitrary_reduction_matches_double_loop() {
    let mut r = rng(3);
    for _ in 0..20 {
        let t = random_string(&mut r, 200, 10);
        let p = random_string(&mut r, 17, 10);
        let kernel = |a: usize, b: usize| ((a * 3 + b * 7) % 11) as f64 * 0.37 - 1.1;
        let got = small_alphabet_distance(&t, &p, |x| (x % 13) as usize, |y| (y >> 6) as usize, kernel, 16).unwrap();
        let want = double_loop(&t, &p, |a, b| kernel((a % 13) as usize, (b >> 6) as usize));
        for (g, w) in got.values().iter().zip(&want) {
            assert!((g - w).abs() <= 1e-6 * w.abs().max(1.0), "{g} vs {w}");
        }
    }
}

#[test]
fn backends_agree() {
    let mut r = rng(4);
    let t = random_string(&mut r, 500, 4);
    let p = random_string(&mut r, 40, 4);
    let kernel = |a: usize, b: usize| (a as f64 - b as f64).abs().powf(1.5);
    let run = |options: EngineOptions| {
        let mut stats = CorrelationStats::default();
        let d = small_alphabet_distance_with(&t, &p, |x| x as usize, |y| y as usize, kernel, 16, &options, &mut stats)
            .unwrap();
        (d, stats)
    };
    let (conv, conv_stats) = run(EngineOptions::convolution());
    let (direct, direct_stats) = run(EngineOptions::direct());
    assert_eq!(conv_stats.correlations, 16);
    assert_eq!(direct_stats.correlations, 0);
    assert!(max_rel_err(conv.values(), direct.values()) < 1e-9);
    let auto = EngineOptions::default().resolve(500, 40, 16).unwrap();
    assert!(matches!(auto, Backend::Convolution | Backend::Direct));
}

#[test]
fn rejects_out_of_range_reduction() {
    let t = s(&[1, 2, 3], 2);
    let p = s(&[1], 2);
    assert!(small_alphabet_distance(&t, &p, |x| x as usize, |y| y as usize, |_, _| 1.0, 2).is_err());
    assert!(small_alphabet_distance(&p, &t, |x| x as usize, |y| y as usize, |_, _| 1.0, 4).is_err());
}

#[test]
fn even_p_matches_brute_force() {
    let mut r = rng(5);
    for (p, tol) in [(2u32, 1e-9), (4, 1e-6)] {
        for _ in 0..15 {
            let n = r.random_range(1..=1024);
            let m = r.random_range(1..=n.min(100));
            let bits = r.random_range(1..=10);
            let t = random_string(&mut r, n, bits);
            let q = random_string(&mut r, m, bits);
            let got = exact_even_p(&t, &q, p).unwrap();
            let want = brute_force_lp(&t, &q, p as f64).unwrap();
            assert!(max_rel_err(got.values(), want.values()) <= tol, "p={p} n={n} m={m}");
        }
    }
}

#[test]
fn even_p_validation() {
    let t = s(&[1, 2, 3], 2);
    let q = s(&[1], 2);
    assert!(exact_even_p(&t, &q, 3).is_err());
    assert!(exact_even_p(&t, &q, 0).is_err());
    let big = IntString::new(vec![1 << 40; 4], 41).unwrap();
    assert!(exact_even_p(&big, &big, 2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn identical_strings_are_at_distance_zero(v in prop::collection::vec(0u64..256, 1..200)) {
        let t = IntString::new(v, 8).unwrap();
        prop_assert!(brute_force_lp(&t, &t, 1.5).unwrap().values().iter().all(|&x| x == 0.0));
        let even = exact_even_p(&t, &t, 2).unwrap();
        prop_assert_eq!(even.values(), &[0.0][..]);
    }

    #[test]
    fn hamming_bounded_by_pattern_length(
        (t, p) in (1usize..40).prop_flat_map(|m| (
            prop::collection::vec(0u64..4, m..300),
            prop::collection::vec(0u64..4, m),
        ))
    ) {
        let m = p.len() as f64;
        let (t, p) = (IntString::new(t, 2).unwrap(), IntString::new(p, 2).unwrap());
        let d = brute_force_hamming(&t, &p).unwrap();
        prop_assert!(d.values().iter().all(|&v| v.fract() == 0.0 && (0.0..=m).contains(&v)));
    }
}
