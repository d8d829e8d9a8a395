//! Nucleotide alphabet, packed k-mers and canonicalization under the DSK
//! order `A < C < T < G`.
//!
//! A [`Kmer`] packs its bases two bits apiece, first base in the most
//! significant position, using the DSK ranks. Integer comparison of two
//! packed k-mers of equal length is therefore exactly DSK lexicographic
//! comparison, and complementing a base is a single `xor 0b10`.

mod count;
mod dictionary;
mod fasta;

pub use count::{count_kmers, count_kmers_parallel};
pub use dictionary::{
    parse_dictionary, parse_standard_pairs, recanonicalize_standard_to_dsk, serialize_dictionary,
    KmerDictionary,
};
pub use fasta::{parse_fasta, write_fasta, FastaRecord};

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest supported k-mer length (two bits per base in a `u128`).
pub const MAX_K: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KmerError {
    #[error("k must be in 1..={MAX_K}, got {0}")]
    InvalidK(usize),
    #[error("invalid character {:?} at position {position}", char::from(*.byte))]
    InvalidBase { byte: u8, position: usize },
    #[error("invalid character {:?} in record {record} at offset {offset}", char::from(*.byte))]
    InvalidSequenceChar {
        record: usize,
        offset: usize,
        byte: u8,
    },
    #[error("k-mer length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("k-mer {0} is not canonical under the DSK order")]
    NotCanonical(String),
    #[error("k-mer {0} is not canonical under the standard order")]
    NotStandardCanonical(String),
    #[error("duplicate k-mer {0}")]
    Duplicate(String),
    #[error("k-mer {0} and its reverse complement both present")]
    DuplicateClass(String),
    #[error("k-mer {0} has zero count")]
    ZeroCount(String),
    #[error("kmers and freqs differ in length ({0} vs {1})")]
    Misaligned(usize, usize),
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for KmerError {
    fn from(e: std::io::Error) -> Self {
        KmerError::Io(e.to_string())
    }
}

/// A nucleotide, with the discriminant equal to its DSK rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Base {
    A = 0,
    C = 1,
    T = 2,
    G = 3,
}

impl Base {
    pub const ALL: [Base; 4] = [Base::A, Base::C, Base::T, Base::G];

    #[inline]
    pub fn rank(self) -> u8 {
        self as u8
    }

    #[inline]
    pub fn from_rank(rank: u8) -> Base {
        Self::ALL[(rank & 3) as usize]
    }

    /// Case-insensitive; `None` for anything outside ACGT.
    #[inline]
    pub fn from_byte(b: u8) -> Option<Base> {
        match b {
            b'A' | b'a' => Some(Base::A),
            b'C' | b'c' => Some(Base::C),
            b'T' | b't' => Some(Base::T),
            b'G' | b'g' => Some(Base::G),
            _ => None,
        }
    }

    #[inline]
    pub fn to_byte(self) -> u8 {
        b"ACTG"[self as usize]
    }

    #[inline]
    pub fn complement(self) -> Base {
        Base::from_rank(self.rank() ^ 2)
    }
}

/// A k-mer of length `1..=64`, packed 2 bits per base.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Kmer {
    bits: u128,
    k: u8,
}

#[inline]
pub(crate) fn mask(k: usize) -> u128 {
    if k == MAX_K {
        u128::MAX
    } else {
        (1u128 << (2 * k)) - 1
    }
}

pub(crate) fn check_k(k: usize) -> Result<(), KmerError> {
    if (1..=MAX_K).contains(&k) {
        Ok(())
    } else {
        Err(KmerError::InvalidK(k))
    }
}

impl Kmer {
    /// Builds a k-mer from its packed form. Bits above `2k` must be zero.
    pub fn from_packed(bits: u128, k: usize) -> Result<Kmer, KmerError> {
        check_k(k)?;
        if bits & !mask(k) != 0 {
            return Err(KmerError::Malformed {
                line: 0,
                reason: format!("packed value has bits above 2*{k}"),
            });
        }
        Ok(Kmer { bits, k: k as u8 })
    }

    #[inline]
    pub(crate) fn from_packed_unchecked(bits: u128, k: usize) -> Kmer {
        debug_assert!((1..=MAX_K).contains(&k) && bits & !mask(k) == 0);
        Kmer { bits, k: k as u8 }
    }

    pub fn from_bytes(s: &[u8]) -> Result<Kmer, KmerError> {
        check_k(s.len())?;
        let mut bits = 0u128;
        for (position, &byte) in s.iter().enumerate() {
            let base = Base::from_byte(byte).ok_or(KmerError::InvalidBase { byte, position })?;
            bits = (bits << 2) | base.rank() as u128;
        }
        Ok(Kmer {
            bits,
            k: s.len() as u8,
        })
    }

    pub fn from_bases(bases: &[Base]) -> Result<Kmer, KmerError> {
        check_k(bases.len())?;
        let bits = bases
            .iter()
            .fold(0u128, |acc, b| (acc << 2) | b.rank() as u128);
        Ok(Kmer {
            bits,
            k: bases.len() as u8,
        })
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k as usize
    }

    #[inline]
    pub fn packed(&self) -> u128 {
        self.bits
    }

    #[inline]
    pub fn base(&self, i: usize) -> Base {
        assert!(i < self.k());
        Base::from_rank((self.bits >> (2 * (self.k() - 1 - i))) as u8)
    }

    pub fn bases(&self) -> impl Iterator<Item = Base> + '_ {
        (0..self.k()).map(move |i| self.base(i))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.bases().map(Base::to_byte).collect()
    }

    pub fn reverse_complement(&self) -> Kmer {
        let k = self.k();
        let mut src = self.bits ^ (0xAAAA_AAAA_AAAA_AAAA_AAAA_AAAA_AAAA_AAAAu128 & mask(k));
        let mut out = 0u128;
        for _ in 0..k {
            out = (out << 2) | (src & 3);
            src >>= 2;
        }
        Kmer {
            bits: out,
            k: self.k,
        }
    }

    pub fn canonical(&self) -> Kmer {
        let rc = self.reverse_complement();
        if rc.bits < self.bits {
            rc
        } else {
            *self
        }
    }

    #[inline]
    pub fn is_canonical(&self) -> bool {
        self.canonical().bits == self.bits
    }

    /// Lexicographic comparison under the DSK ranks.
    pub fn compare_dsk(&self, other: &Kmer) -> Result<Ordering, KmerError> {
        if self.k != other.k {
            return Err(KmerError::LengthMismatch(self.k(), other.k()));
        }
        Ok(self.bits.cmp(&other.bits))
    }

    /// Lexicographic comparison under the standard order `A < C < G < T`,
    /// which coincides with ASCII byte order.
    pub fn compare_standard(&self, other: &Kmer) -> Result<Ordering, KmerError> {
        if self.k != other.k {
            return Err(KmerError::LengthMismatch(self.k(), other.k()));
        }
        Ok(self.standard_key().cmp(&other.standard_key()))
    }

    // Maps DSK ranks (A0 C1 T2 G3) onto standard ranks (A0 C1 G2 T3) by
    // swapping the two upper symbols: rank r>=2 becomes r^1.
    fn standard_key(&self) -> u128 {
        let hi = self.bits & 0xAAAA_AAAA_AAAA_AAAA_AAAA_AAAA_AAAA_AAAAu128;
        self.bits ^ (hi >> 1)
    }

    /// The standard-order canonical form, as emitted by KMC-style counters.
    pub fn canonical_standard(&self) -> Kmer {
        let rc = self.reverse_complement();
        if rc.standard_key() < self.standard_key() {
            rc
        } else {
            *self
        }
    }
}

/// Orders by length first, then by DSK rank.
impl Ord for Kmer {
    fn cmp(&self, other: &Self) -> Ordering {
        self.k.cmp(&other.k).then(self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for Kmer {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Kmer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bases() {
            write!(f, "{}", b.to_byte() as char)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Kmer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Kmer({self})")
    }
}

impl FromStr for Kmer {
    type Err = KmerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Kmer::from_bytes(s.as_bytes())
    }
}

/// Canonical forms of every k-length window of an ACGT string, in order.
pub(crate) fn canonical_windows(seq: &[u8], k: usize) -> Result<Vec<Kmer>, KmerError> {
    check_k(k)?;
    if seq.len() < k {
        return Ok(Vec::new());
    }
    let m = mask(k);
    let shift = 2 * (k - 1);
    let mut fwd = 0u128;
    let mut rev = 0u128;
    let mut out = Vec::with_capacity(seq.len() + 1 - k);
    for (position, &byte) in seq.iter().enumerate() {
        let r = Base::from_byte(byte)
            .ok_or(KmerError::InvalidBase { byte, position })?
            .rank() as u128;
        fwd = ((fwd << 2) | r) & m;
        rev = (rev >> 2) | ((r ^ 2) << shift);
        if position + 1 >= k {
            out.push(Kmer::from_packed_unchecked(fwd.min(rev), k));
        }
    }
    Ok(out)
}
