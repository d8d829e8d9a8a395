//! Deterministic inputs shared by the benchmarks.

use gdc::{count_kmers, KmerDictionary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform random ACGT sequence with a few copied segments, so that some
/// k-mers repeat.
pub fn synthetic_genome(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g: Vec<u8> = (0..len).map(|_| b"ACGT"[rng.gen_range(0..4)]).collect();
    if len >= 200 {
        for _ in 0..len / 1000 {
            let seg = rng.gen_range(50..100);
            let from = rng.gen_range(0..len - seg);
            let to = rng.gen_range(0..len - seg);
            g.copy_within(from..from + seg, to);
        }
    }
    g
}

pub fn synthetic_dictionary(len: usize, k: usize, seed: u64) -> KmerDictionary {
    count_kmers(&[synthetic_genome(len, seed)], k).expect("valid k and ACGT input")
}

/// Frequencies shaped like real counts: mostly 1, with a geometric tail.
pub fn skewed_counts(n: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut f = 1;
            while f < 1 << 20 && rng.gen_bool(0.3) {
                f += rng.gen_range(1..4);
            }
            f
        })
        .collect()
}
