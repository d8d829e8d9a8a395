use gdc_bench::{skewed_counts, synthetic_dictionary, synthetic_genome};

#[test]
fn inputs_are_deterministic() {
    assert_eq!(synthetic_genome(5000, 1), synthetic_genome(5000, 1));
    assert_ne!(synthetic_genome(5000, 1), synthetic_genome(5000, 2));
    assert_eq!(skewed_counts(100, 3), skewed_counts(100, 3));
}

#[test]
fn inputs_have_expected_shape() {
    let g = synthetic_genome(10_000, 7);
    assert_eq!(g.len(), 10_000);
    assert!(g.iter().all(|b| b"ACGT".contains(b)));
    let d = synthetic_dictionary(10_000, 15, 7);
    assert!(d.freqs().iter().any(|&f| f > 1));
    assert!(skewed_counts(1000, 9).iter().all(|&f| f >= 1));
}
