use lpdist_core::{correlate, correlate_with_fft_len, naive_correlate};
use proptest::prelude::*;

fn vector(len: impl Into<prop::collection::SizeRange>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1000.0f64..1000.0, len)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

#[test]
fn random_instance_matches_naive() {
    let text: Vec<f64> = (0..64).map(|i| ((i * 37 + 11) % 23) as f64 - 7.5).collect();
    let pattern: Vec<f64> = (0..16).map(|i| ((i * 13 + 5) % 17) as f64 * 0.25).collect();
    let fast = correlate(&text, &pattern).unwrap();
    let slow = naive_correlate(&text, &pattern).unwrap();
    assert_eq!(fast.len(), 49);
    for (a, b) in fast.iter().zip(&slow) {
        assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_naive((text, pattern) in (1usize..64).prop_flat_map(|m| (vector(m..4096), vector(m)))) {
        let fast = correlate(&text, &pattern).unwrap();
        let slow = naive_correlate(&text, &pattern).unwrap();
        let maxval = max_abs(&text).max(max_abs(&pattern));
        let tol = 1e-6 * (maxval * maxval * pattern.len() as f64).max(1.0);
        for (a, b) in fast.iter().zip(&slow) {
            prop_assert!((a - b).abs() <= tol);
        }
    }

    #[test]
    fn linear_in_text((a, b, pattern) in (1usize..32).prop_flat_map(|m| (vector(300), vector(300), vector(m)))) {
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let lhs = correlate(&sum, &pattern).unwrap();
        let ra = correlate(&a, &pattern).unwrap();
        let rb = correlate(&b, &pattern).unwrap();
        for ((l, x), y) in lhs.iter().zip(&ra).zip(&rb) {
            prop_assert!((l - (x + y)).abs() <= 1e-6 * (1.0 + l.abs()));
        }
    }

    #[test]
    fn block_length_does_not_matter(
        (text, pattern) in (1usize..40).prop_flat_map(|m| (vector(m..1500), vector(m))),
        extra in 0u32..4,
    ) {
        let m = pattern.len();
        let smallest = (2 * m).next_power_of_two();
        let reference = correlate(&text, &pattern).unwrap();
        let other = correlate_with_fft_len(&text, &pattern, Some(smallest << extra)).unwrap();
        for (a, b) in reference.iter().zip(&other) {
            prop_assert!((a - b).abs() <= 1e-6 * (1.0 + a.abs()));
        }
    }
}
