use std::collections::HashMap;

use rayon::prelude::*;

use super::{check_k, mask, Base, Kmer, KmerDictionary, KmerError};

/// Counts canonical k-mers over a set of sequences.
///
/// Input is case-insensitive. Windows containing `N`/`n` are skipped; any
/// other character outside ACGTN is an error.
pub fn count_kmers<S: AsRef<[u8]>>(records: &[S], k: usize) -> Result<KmerDictionary, KmerError> {
    check_k(k)?;
    let mut tally = HashMap::new();
    for (i, r) in records.iter().enumerate() {
        tally_record(&mut tally, i, r.as_ref(), k)?;
    }
    Ok(into_dictionary(tally, k))
}

/// Same result as [`count_kmers`], sharding records across the rayon pool.
pub fn count_kmers_parallel<S: AsRef<[u8]> + Sync>(
    records: &[S],
    k: usize,
) -> Result<KmerDictionary, KmerError> {
    check_k(k)?;
    let tally = records
        .par_iter()
        .enumerate()
        .try_fold(HashMap::new, |mut acc, (i, r)| {
            tally_record(&mut acc, i, r.as_ref(), k)?;
            Ok::<_, KmerError>(acc)
        })
        .try_reduce(HashMap::new, |a, b| {
            let (small, mut big) = if a.len() < b.len() { (a, b) } else { (b, a) };
            for (key, n) in small {
                *big.entry(key).or_insert(0) += n;
            }
            Ok(big)
        })?;
    Ok(into_dictionary(tally, k))
}

fn tally_record(
    tally: &mut HashMap<u128, u64>,
    record: usize,
    seq: &[u8],
    k: usize,
) -> Result<(), KmerError> {
    let m = mask(k);
    let shift = 2 * (k - 1);
    let mut fwd = 0u128;
    let mut rev = 0u128;
    // number of consecutive ACGT bases ending at the current position
    let mut run = 0usize;
    for (offset, &byte) in seq.iter().enumerate() {
        match Base::from_byte(byte) {
            Some(b) => {
                let r = b.rank() as u128;
                fwd = ((fwd << 2) | r) & m;
                rev = (rev >> 2) | ((r ^ 2) << shift);
                run += 1;
                if run >= k {
                    *tally.entry(fwd.min(rev)).or_insert(0) += 1;
                }
            }
            None if byte == b'N' || byte == b'n' => run = 0,
            None => {
                return Err(KmerError::InvalidSequenceChar {
                    record,
                    offset,
                    byte,
                })
            }
        }
    }
    Ok(())
}

fn into_dictionary(tally: HashMap<u128, u64>, k: usize) -> KmerDictionary {
    let mut pairs: Vec<(u128, u64)> = tally.into_iter().collect();
    pairs.sort_unstable_by_key(|p| p.0);
    let (kmers, freqs) = pairs
        .into_iter()
        .map(|(bits, n)| (Kmer::from_packed_unchecked(bits, k), n))
        .unzip();
    KmerDictionary::from_sorted_unchecked(k, kmers, freqs)
}
