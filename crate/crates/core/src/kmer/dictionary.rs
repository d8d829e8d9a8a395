use std::io::{BufRead, Write};

use super::{check_k, Kmer, KmerError};

/// The pair `(D_k, F_k)`: distinct DSK-canonical k-mers and their counts,
/// index-aligned and kept in ascending DSK order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KmerDictionary {
    k: usize,
    kmers: Vec<Kmer>,
    freqs: Vec<u64>,
}

impl KmerDictionary {
    pub fn empty(k: usize) -> Result<Self, KmerError> {
        check_k(k)?;
        Ok(KmerDictionary {
            k,
            kmers: Vec::new(),
            freqs: Vec::new(),
        })
    }

    /// Validates and sorts an arbitrary collection of pairs.
    pub fn from_pairs<I>(k: usize, pairs: I) -> Result<Self, KmerError>
    where
        I: IntoIterator<Item = (Kmer, u64)>,
    {
        check_k(k)?;
        let mut pairs: Vec<(Kmer, u64)> = pairs.into_iter().collect();
        for (kmer, f) in &pairs {
            if kmer.k() != k {
                return Err(KmerError::LengthMismatch(k, kmer.k()));
            }
            if !kmer.is_canonical() {
                return Err(KmerError::NotCanonical(kmer.to_string()));
            }
            if *f == 0 {
                return Err(KmerError::ZeroCount(kmer.to_string()));
            }
        }
        pairs.sort_unstable_by_key(|p| p.0);
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(KmerError::Duplicate(w[0].0.to_string()));
        }
        let (kmers, freqs) = pairs.into_iter().unzip();
        Ok(KmerDictionary { k, kmers, freqs })
    }

    pub fn new(k: usize, kmers: Vec<Kmer>, freqs: Vec<u64>) -> Result<Self, KmerError> {
        if kmers.len() != freqs.len() {
            return Err(KmerError::Misaligned(kmers.len(), freqs.len()));
        }
        Self::from_pairs(k, kmers.into_iter().zip(freqs))
    }

    pub(crate) fn from_sorted_unchecked(k: usize, kmers: Vec<Kmer>, freqs: Vec<u64>) -> Self {
        debug_assert!(kmers.windows(2).all(|w| w[0] < w[1]));
        KmerDictionary { k, kmers, freqs }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.kmers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kmers.is_empty()
    }

    pub fn kmers(&self) -> &[Kmer] {
        &self.kmers
    }

    pub fn freqs(&self) -> &[u64] {
        &self.freqs
    }

    pub fn iter(&self) -> impl Iterator<Item = (Kmer, u64)> + '_ {
        self.kmers.iter().copied().zip(self.freqs.iter().copied())
    }

    pub fn get(&self, kmer: &Kmer) -> Option<u64> {
        self.kmers.binary_search(kmer).ok().map(|i| self.freqs[i])
    }

    pub fn total_count(&self) -> u64 {
        self.freqs.iter().sum()
    }

    pub fn to_text(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(self.len() * (self.k + 4));
        serialize_dictionary(self, &mut buf).expect("write to Vec");
        buf
    }
}

/// Writes `<KMER> <COUNT>\n` per entry, in DSK order.
pub fn serialize_dictionary<W: Write>(d: &KmerDictionary, mut sink: W) -> std::io::Result<()> {
    let mut line = Vec::with_capacity(d.k() + 22);
    for (kmer, f) in d.iter() {
        line.clear();
        line.extend(kmer.bases().map(|b| b.to_byte()));
        line.push(b' ');
        line.extend_from_slice(f.to_string().as_bytes());
        line.push(b'\n');
        sink.write_all(&line)?;
    }
    Ok(())
}

/// Parses the text produced by [`serialize_dictionary`].
///
/// Keys must be DSK-canonical and of length `k`; input order is free, the
/// result is DSK-sorted.
pub fn parse_dictionary<R: BufRead>(source: R, k: usize) -> Result<KmerDictionary, KmerError> {
    check_k(k)?;
    let mut pairs = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let malformed = |reason: &str| KmerError::Malformed {
            line: lineno,
            reason: reason.into(),
        };
        let (key, count) = line
            .split_once(' ')
            .ok_or_else(|| malformed("expected '<KMER> <COUNT>'"))?;
        if key.len() != k {
            return Err(malformed(&format!("k-mer length {} != {k}", key.len())));
        }
        let kmer: Kmer = key
            .parse()
            .map_err(|e: KmerError| malformed(&e.to_string()))?;
        if !count.bytes().all(|b| b.is_ascii_digit()) || count.is_empty() {
            return Err(malformed("count is not a non-negative integer"));
        }
        let f: u64 = count.parse().map_err(|_| malformed("count out of range"))?;
        pairs.push((kmer, f));
    }
    KmerDictionary::from_pairs(k, pairs)
}

/// Parses whitespace-separated `<KMER> <COUNT>` lines without any
/// canonicity check, as dumped by KMC-style counters.
pub fn parse_standard_pairs<R: BufRead>(
    source: R,
    k: usize,
) -> Result<Vec<(Kmer, u64)>, KmerError> {
    check_k(k)?;
    let mut pairs = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let mut fields = line.split_whitespace();
        let (Some(key), Some(count), None) = (fields.next(), fields.next(), fields.next()) else {
            if line.trim().is_empty() {
                continue;
            }
            return Err(KmerError::Malformed {
                line: i + 1,
                reason: "expected two fields".into(),
            });
        };
        let kmer: Kmer = key.parse().map_err(|e: KmerError| KmerError::Malformed {
            line: i + 1,
            reason: e.to_string(),
        })?;
        if kmer.k() != k {
            return Err(KmerError::LengthMismatch(k, kmer.k()));
        }
        let f = count.parse().map_err(|_| KmerError::Malformed {
            line: i + 1,
            reason: "bad count".into(),
        })?;
        pairs.push((kmer, f));
    }
    Ok(pairs)
}

/// Converts a dictionary keyed by standard-order canonical k-mers
/// (`A < C < G < T`) into one keyed by DSK-canonical k-mers.
pub fn recanonicalize_standard_to_dsk<I>(k: usize, pairs: I) -> Result<KmerDictionary, KmerError>
where
    I: IntoIterator<Item = (Kmer, u64)>,
{
    let mut converted = Vec::new();
    for (kmer, f) in pairs {
        if kmer.k() != k {
            return Err(KmerError::LengthMismatch(k, kmer.k()));
        }
        if kmer.canonical_standard() != kmer {
            return Err(KmerError::NotStandardCanonical(kmer.to_string()));
        }
        converted.push((kmer.canonical(), f));
    }
    KmerDictionary::from_pairs(k, converted).map_err(|e| match e {
        KmerError::Duplicate(s) => KmerError::DuplicateClass(s),
        other => other,
    })
}
