//! Spectrum preserving string sets.
//!
//! [`build_spss`] computes a greedy simplitig cover of the bidirected de
//! Bruijn graph of a dictionary. Every canonical k-mer of the dictionary
//! appears in exactly one window of the output, which gives the identity
//! `total_chars = |D_k| + (k - 1) * strings`.

use std::collections::HashMap;
use std::collections::VecDeque;
use std::io::{BufRead, Write};

use thiserror::Error;

use crate::kmer::{
    self, canonical_windows, mask, Base, FastaRecord, Kmer, KmerDictionary, KmerError,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpssError {
    #[error("spss construction needs k >= 2, got {0}")]
    KTooSmall(usize),
    #[error("string {index} has length {len} < k = {k}")]
    ShortString { index: usize, len: usize, k: usize },
    #[error("canonical k-mer {0} occurs more than once")]
    RepeatedKmer(String),
    #[error(transparent)]
    Kmer(#[from] KmerError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spss {
    k: usize,
    strings: Vec<Vec<u8>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpssStats {
    pub total_chars: u64,
    pub string_count: u64,
    pub ratio_s_over_g: f64,
}

impl Spss {
    /// Validates alphabet and minimum length. Does not check the
    /// exactly-once property; see [`Spss::check_exactly_once`].
    pub fn new(k: usize, strings: Vec<Vec<u8>>) -> Result<Self, SpssError> {
        kmer::check_k(k)?;
        for (index, s) in strings.iter().enumerate() {
            if s.len() < k {
                return Err(SpssError::ShortString {
                    index,
                    len: s.len(),
                    k,
                });
            }
            if let Some(position) = s
                .iter()
                .position(|&b| !matches!(b, b'A' | b'C' | b'G' | b'T'))
            {
                return Err(KmerError::InvalidBase {
                    byte: s[position],
                    position,
                }
                .into());
            }
        }
        Ok(Spss { k, strings })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn strings(&self) -> &[Vec<u8>] {
        &self.strings
    }

    pub fn total_chars(&self) -> u64 {
        self.strings.iter().map(|s| s.len() as u64).sum()
    }

    pub fn window_count(&self) -> usize {
        self.strings.iter().map(|s| s.len() + 1 - self.k).sum()
    }

    /// Canonical k-mer of every window: strings in order, window start
    /// ascending. Index `i` of the result is the global window position.
    pub fn windows(&self) -> Vec<Kmer> {
        let mut out = Vec::with_capacity(self.window_count());
        for s in &self.strings {
            out.extend(canonical_windows(s, self.k).expect("validated on construction"));
        }
        out
    }

    pub fn check_exactly_once(&self) -> Result<(), SpssError> {
        let mut w = self.windows();
        w.sort_unstable();
        match w.windows(2).find(|p| p[0] == p[1]) {
            Some(p) => Err(SpssError::RepeatedKmer(p[0].to_string())),
            None => Ok(()),
        }
    }

    /// FASTA with headers `>0`, `>1`, ...
    pub fn write_fasta<W: Write>(&self, out: W) -> std::io::Result<()> {
        let records: Vec<FastaRecord> = self
            .strings
            .iter()
            .enumerate()
            .map(|(i, s)| FastaRecord {
                header: i.to_string(),
                seq: s.clone(),
            })
            .collect();
        kmer::write_fasta(out, &records)
    }

    pub fn to_fasta(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(self.total_chars() as usize + 8 * self.strings.len());
        self.write_fasta(&mut buf).expect("write to Vec");
        buf
    }

    /// Headers are ignored; sequence content is upper-cased.
    pub fn read_fasta<R: BufRead>(reader: R, k: usize) -> Result<Self, SpssError> {
        let strings = kmer::parse_fasta(reader)?
            .into_iter()
            .map(|r| r.seq.to_ascii_uppercase())
            .collect();
        Spss::new(k, strings)
    }
}

/// Greedy simplitig construction. Seeds are taken in DSK order; each path
/// is extended forward, then backward, always trying the next base in DSK
/// order and taking the first unvisited neighbour.
pub fn build_spss(d: &KmerDictionary) -> Result<Spss, SpssError> {
    let k = d.k();
    if k < 2 {
        return Err(SpssError::KTooSmall(k));
    }
    let m = mask(k);
    let shift = 2 * (k - 1);
    let index: HashMap<u128, usize> = d
        .kmers()
        .iter()
        .enumerate()
        .map(|(i, x)| (x.packed(), i))
        .collect();
    let mut visited = vec![false; d.len()];
    let mut strings = Vec::new();

    let claim = |fwd: u128, rev: u128, visited: &mut [bool]| -> bool {
        match index.get(&fwd.min(rev)) {
            Some(&i) if !visited[i] => {
                visited[i] = true;
                true
            }
            _ => false,
        }
    };

    for (seed_idx, seed) in d.kmers().iter().enumerate() {
        if visited[seed_idx] {
            continue;
        }
        visited[seed_idx] = true;
        let mut path: VecDeque<u8> = seed.bases().map(Base::rank).collect();

        // forward: window at the end of the path
        let mut fwd = seed.packed();
        let mut rev = seed.reverse_complement().packed();
        'forward: loop {
            for r in 0..4u128 {
                let nf = ((fwd << 2) | r) & m;
                let nr = (rev >> 2) | ((r ^ 2) << shift);
                if claim(nf, nr, &mut visited) {
                    path.push_back(r as u8);
                    fwd = nf;
                    rev = nr;
                    continue 'forward;
                }
            }
            break;
        }

        // backward: window at the front of the path
        let mut fwd = seed.packed();
        let mut rev = seed.reverse_complement().packed();
        'backward: loop {
            for r in 0..4u128 {
                let nf = (r << shift) | (fwd >> 2);
                let nr = ((rev << 2) | (r ^ 2)) & m;
                if claim(nf, nr, &mut visited) {
                    path.push_front(r as u8);
                    fwd = nf;
                    rev = nr;
                    continue 'backward;
                }
            }
            break;
        }

        strings.push(
            path.into_iter()
                .map(|r| Base::from_rank(r).to_byte())
                .collect(),
        );
    }
    Ok(Spss { k, strings })
}

/// Deduplicated canonical spectrum of an SPSS, DSK-sorted.
pub fn recover_spectrum(s: &Spss) -> Vec<Kmer> {
    let mut w = s.windows();
    w.sort_unstable();
    w.dedup();
    w
}

pub fn spss_stats(s: &Spss, genome_chars: u64) -> SpssStats {
    let total_chars = s.total_chars();
    SpssStats {
        total_chars,
        string_count: s.strings.len() as u64,
        ratio_s_over_g: if genome_chars == 0 {
            f64::NAN
        } else {
            total_chars as f64 / genome_chars as f64
        },
    }
}
