//! Static k-mer → frequency function.
//!
//! Keys are placed by a multi-level minimal perfect hash in the style of
//! BBHash: at each level a key whose slot is not shared with any other
//! remaining key takes that slot, the rest fall through to the next level.
//! Values are bit-packed at the width of the largest frequency. Keys are not
//! stored (except for the few that survive every level), so a query for a
//! non-key returns an arbitrary but deterministic value, possibly 0.

use super::fm::Reader;
use super::IndexError;
use crate::codecs::{BitReader, BitWriter};
use crate::kmer::{Kmer, KmerDictionary};

const MAGIC: &[u8; 7] = b"GDCSFM1";
const GAMMA_NUM: usize = 2;
const MAX_LEVELS: usize = 24;

#[inline]
fn fmix64(mut x: u64) -> u64 {
    x ^= x >> 33;
    x = x.wrapping_mul(0xff51_afd7_ed55_8ccd);
    x ^= x >> 33;
    x = x.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    x ^ (x >> 33)
}

#[inline]
fn hash(key: u128, level: usize) -> u64 {
    let seed = fmix64((level as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    fmix64((key as u64) ^ fmix64((key >> 64) as u64 ^ seed))
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Level {
    bits: Vec<u64>,
    /// popcount of `bits[..i]`
    rank: Vec<u32>,
    /// global index of the first key placed at this level
    base: usize,
}

impl Level {
    fn new(bits: Vec<u64>, base: usize) -> Level {
        let mut rank = Vec::with_capacity(bits.len());
        let mut acc = 0u32;
        for w in &bits {
            rank.push(acc);
            acc += w.count_ones();
        }
        Level { bits, rank, base }
    }

    fn slots(&self) -> u64 {
        self.bits.len() as u64 * 64
    }

    fn ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn lookup(&self, key: u128, level: usize) -> Option<usize> {
        let pos = (hash(key, level) % self.slots()) as usize;
        let word = self.bits[pos / 64];
        if word >> (pos % 64) & 1 == 0 {
            return None;
        }
        let below = (word & ((1u64 << (pos % 64)) - 1)).count_ones();
        Some(self.base + (self.rank[pos / 64] + below) as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticFreqMap {
    k: usize,
    key_count: usize,
    levels: Vec<Level>,
    /// keys left after the last level, sorted, with their global index
    fallback: Vec<(u128, u64)>,
    width: u32,
    values: Vec<u8>,
}

impl StaticFreqMap {
    pub fn build(d: &KmerDictionary) -> StaticFreqMap {
        let n = d.len();
        let mut remaining: Vec<(u128, u64)> = d.iter().map(|(x, f)| (x.packed(), f)).collect();
        let mut levels = Vec::new();
        let mut slot_value: Vec<u64> = vec![0; n];
        let mut placed = 0usize;

        for level in 0..MAX_LEVELS {
            if remaining.is_empty() {
                break;
            }
            let words = (remaining.len() * GAMMA_NUM).div_ceil(64).max(1);
            let slots = words as u64 * 64;
            let mut seen = vec![0u64; words];
            let mut collide = vec![0u64; words];
            for &(key, _) in &remaining {
                let p = (hash(key, level) % slots) as usize;
                let bit = 1u64 << (p % 64);
                if seen[p / 64] & bit != 0 {
                    collide[p / 64] |= bit;
                } else {
                    seen[p / 64] |= bit;
                }
            }
            let bits: Vec<u64> = seen.iter().zip(&collide).map(|(s, c)| s & !c).collect();
            let lvl = Level::new(bits, placed);
            let mut next = Vec::new();
            for (key, f) in remaining {
                match lvl.lookup(key, level) {
                    Some(idx) => slot_value[idx] = f,
                    None => next.push((key, f)),
                }
            }
            placed += lvl.ones();
            levels.push(lvl);
            remaining = next;
        }
        remaining.sort_unstable();
        let fallback = remaining
            .into_iter()
            .enumerate()
            .map(|(i, (key, f))| {
                slot_value[placed + i] = f;
                (key, (placed + i) as u64)
            })
            .collect();

        let width = slot_value
            .iter()
            .map(|&v| 64 - v.leading_zeros())
            .max()
            .unwrap_or(0);
        let mut w = BitWriter::new();
        for &v in &slot_value {
            w.write(v, width);
        }
        StaticFreqMap {
            k: d.k(),
            key_count: n,
            levels,
            fallback,
            width,
            values: w.finish().0,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn key_count(&self) -> usize {
        self.key_count
    }

    fn value_at(&self, idx: usize) -> u64 {
        let mut r = BitReader::new(&self.values);
        if self.width == 0 {
            return 0;
        }
        // skip to the slot; BitReader is sequential, so read the prefix in one go
        let skip = idx as u64 * self.width as u64;
        let mut left = skip;
        while left > 0 {
            let step = left.min(64) as u32;
            r.read(step).expect("index within packed values");
            left -= step as u64;
        }
        r.read(self.width).expect("index within packed values")
    }

    /// Exact for every key of the source dictionary; arbitrary otherwise.
    pub fn query(&self, x: &Kmer) -> u64 {
        let key = x.packed();
        for (level, lvl) in self.levels.iter().enumerate() {
            if let Some(idx) = lvl.lookup(key, level) {
                return self.value_at(idx);
            }
        }
        match self.fallback.binary_search_by_key(&key, |p| p.0) {
            Ok(i) => self.value_at(self.fallback[i].1 as usize),
            Err(_) => 0,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.k as u64).to_le_bytes());
        out.extend_from_slice(&(self.key_count as u64).to_le_bytes());
        out.extend_from_slice(&(self.levels.len() as u32).to_le_bytes());
        for lvl in &self.levels {
            out.extend_from_slice(&(lvl.bits.len() as u64).to_le_bytes());
            for w in &lvl.bits {
                out.extend_from_slice(&w.to_le_bytes());
            }
        }
        out.extend_from_slice(&(self.fallback.len() as u64).to_le_bytes());
        for &(key, idx) in &self.fallback {
            out.extend_from_slice(&key.to_le_bytes());
            out.extend_from_slice(&idx.to_le_bytes());
        }
        out.push(self.width as u8);
        out.extend_from_slice(&self.values);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<StaticFreqMap, IndexError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(MAGIC.len())? != MAGIC {
            return Err(IndexError::BadMagic);
        }
        let k = r.u64()? as usize;
        let key_count = r.u64()? as usize;
        let level_count = r.u32()? as usize;
        if level_count > MAX_LEVELS {
            return Err(IndexError::Corrupt("too many levels".into()));
        }
        let mut levels = Vec::with_capacity(level_count);
        let mut placed = 0;
        for _ in 0..level_count {
            let words = r.u64()? as usize;
            if words == 0 || words > bytes.len() / 8 {
                return Err(IndexError::Corrupt("bad level size".into()));
            }
            let mut bits = Vec::with_capacity(words);
            for _ in 0..words {
                bits.push(r.u64()?);
            }
            let lvl = Level::new(bits, placed);
            placed += lvl.ones();
            levels.push(lvl);
        }
        let fb = r.u64()? as usize;
        if fb > bytes.len() / 24 {
            return Err(IndexError::Corrupt("bad fallback size".into()));
        }
        let mut fallback = Vec::with_capacity(fb);
        for _ in 0..fb {
            let key = u128::from_le_bytes(r.take(16)?.try_into().unwrap());
            fallback.push((key, r.u64()?));
        }
        if placed + fb != key_count {
            return Err(IndexError::Corrupt("key count mismatch".into()));
        }
        let width = r.u8()? as u32;
        if width > 64 {
            return Err(IndexError::Corrupt("bad value width".into()));
        }
        let values = r.take((key_count * width as usize).div_ceil(8))?.to_vec();
        if r.pos != bytes.len() {
            return Err(IndexError::Corrupt("trailing bytes".into()));
        }
        Ok(StaticFreqMap {
            k,
            key_count,
            levels,
            fallback,
            width,
            values,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kmer::count_kmers;
    use std::collections::HashMap;

    fn dict(k: usize, pairs: &[(&str, u64)]) -> KmerDictionary {
        KmerDictionary::from_pairs(k, pairs.iter().map(|(s, f)| (s.parse().unwrap(), *f))).unwrap()
    }

    #[test]
    fn small_examples() {
        let m = StaticFreqMap::build(&dict(2, &[("AC", 2), ("CG", 1)]));
        assert_eq!(m.query(&"AC".parse().unwrap()), 2);
        assert_eq!(m.query(&"CG".parse().unwrap()), 1);
        assert_eq!(m.key_count(), 2);
    }

    #[test]
    fn exact_on_every_key() {
        let mut seq = Vec::new();
        let mut x = 12345u64;
        for _ in 0..20_000 {
            x = fmix64(x);
            seq.push(b"ACGT"[(x % 4) as usize]);
        }
        let d = count_kmers(&[&seq], 11).unwrap();
        let oracle: HashMap<Kmer, u64> = d.iter().collect();
        let m = StaticFreqMap::build(&d);
        for (key, f) in &oracle {
            assert_eq!(m.query(key), *f);
        }
        let probe: Kmer = "GGGGGGGGGGG".parse().unwrap();
        assert_eq!(m.query(&probe), m.query(&probe));

        let bytes = m.to_bytes();
        assert_eq!(&bytes[..7], b"GDCSFM1");
        let back = StaticFreqMap::from_bytes(&bytes).unwrap();
        assert_eq!(back, m);
        // roughly 2-4 bits per key for placement plus the value width
        assert!(bytes.len() < d.len() * 4);
    }

    #[test]
    fn empty_and_corrupt() {
        let d = KmerDictionary::empty(5).unwrap();
        let m = StaticFreqMap::build(&d);
        assert_eq!(m.query(&"AAAAA".parse().unwrap()), 0);
        assert_eq!(StaticFreqMap::from_bytes(&m.to_bytes()).unwrap(), m);
        let bytes = StaticFreqMap::build(&dict(2, &[("AC", 2)])).to_bytes();
        assert_eq!(
            StaticFreqMap::from_bytes(&bytes[..bytes.len() - 1]),
            Err(IndexError::Truncated)
        );
        assert_eq!(
            StaticFreqMap::from_bytes(b"GDCIDX1"),
            Err(IndexError::BadMagic)
        );
    }
}
