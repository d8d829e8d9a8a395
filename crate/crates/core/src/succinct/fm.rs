//! FM-index over a collection of DNA strings.
//!
//! The indexed text is `s_0 $_0 s_1 $_1 ... s_{m-1} $_{m-1}` where each
//! sentinel is a distinct symbol smaller than `A`, and `$_i < $_j` for
//! `i < j`. Row `j` of the sorted rotations therefore starts with `$_j`,
//! which lets [`FmIndex::extract`] walk each string back from its own
//! sentinel. Patterns never contain sentinels, so `count` is the number of
//! occurrences that lie inside a single string.

use super::sa::suffix_array;
use super::IndexError;

const SENTINEL: u8 = 0;
const OCC_STEP: usize = 64;
pub const DEFAULT_SAMPLE_RATE: usize = 32;
const MAGIC: &[u8; 7] = b"GDCIDX1";

fn code(b: u8) -> Option<u8> {
    match b {
        b'A' => Some(1),
        b'C' => Some(2),
        b'G' => Some(3),
        b'T' => Some(4),
        _ => None,
    }
}

const DECODE: [u8; 5] = *b"$ACGT";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FmIndex {
    bwt: Vec<u8>,
    /// ACGT counts in `bwt[..i * OCC_STEP]`.
    occ: Vec<[u32; 4]>,
    /// Number of text symbols smaller than each code.
    c_table: [usize; 5],
    /// `(row, sentinel id)` for every sentinel in the BWT, by row.
    sentinel_rows: Vec<(u32, u32)>,
    sample_rate: usize,
    /// One bit per row; set when the row's suffix position is sampled.
    sampled: Vec<u64>,
    sampled_rank: Vec<u32>,
    sa_samples: Vec<u32>,
    /// Text offset at which each string starts.
    starts: Vec<u32>,
}

impl FmIndex {
    pub fn build<S: AsRef<[u8]>>(strings: &[S]) -> Result<FmIndex, IndexError> {
        Self::build_with_sample_rate(strings, DEFAULT_SAMPLE_RATE)
    }

    pub fn build_with_sample_rate<S: AsRef<[u8]>>(
        strings: &[S],
        sample_rate: usize,
    ) -> Result<FmIndex, IndexError> {
        if sample_rate == 0 {
            return Err(IndexError::Corrupt("sample rate must be positive".into()));
        }
        let m = strings.len();
        let total: usize = strings.iter().map(|s| s.as_ref().len()).sum();
        if total == 0 {
            return Err(IndexError::EmptyText);
        }
        // sentinel i -> i, base code c -> m + c - 1
        let mut text: Vec<u32> = Vec::with_capacity(total + m);
        let mut starts = Vec::with_capacity(m);
        for (i, s) in strings.iter().enumerate() {
            starts.push(text.len() as u32);
            for (position, &b) in s.as_ref().iter().enumerate() {
                let c = code(b).ok_or(IndexError::InvalidSymbol { byte: b, position })?;
                text.push(m as u32 + c as u32 - 1);
            }
            text.push(i as u32);
        }
        let n = text.len();
        let sa = suffix_array(&text);

        let mut bwt = Vec::with_capacity(n);
        let mut sentinel_rows = Vec::with_capacity(m);
        for (row, &p) in sa.iter().enumerate() {
            let prev = if p == 0 { n - 1 } else { p as usize - 1 };
            let sym = text[prev];
            if (sym as usize) < m {
                bwt.push(SENTINEL);
                sentinel_rows.push((row as u32, sym));
            } else {
                bwt.push((sym - m as u32 + 1) as u8);
            }
        }
        let sampled_positions: Vec<Option<u32>> = sa
            .iter()
            .map(|&p| (p as usize).is_multiple_of(sample_rate).then_some(p))
            .collect();
        Ok(Self::assemble(
            bwt,
            sentinel_rows,
            sample_rate,
            &sampled_positions,
            starts,
        ))
    }

    fn assemble(
        bwt: Vec<u8>,
        sentinel_rows: Vec<(u32, u32)>,
        sample_rate: usize,
        sampled_positions: &[Option<u32>],
        starts: Vec<u32>,
    ) -> FmIndex {
        let n = bwt.len();
        let mut occ = Vec::with_capacity(n / OCC_STEP + 2);
        let mut counts = [0u32; 4];
        for (i, &c) in bwt.iter().enumerate() {
            if i % OCC_STEP == 0 {
                occ.push(counts);
            }
            if c != SENTINEL {
                counts[c as usize - 1] += 1;
            }
        }
        occ.push(counts);
        let mut c_table = [0usize; 5];
        c_table[1] = sentinel_rows.len();
        for c in 2..5 {
            c_table[c] = c_table[c - 1] + counts[c - 2] as usize;
        }

        let words = n.div_ceil(64);
        let mut sampled = vec![0u64; words];
        let mut sa_samples = Vec::new();
        for (row, p) in sampled_positions.iter().enumerate() {
            if let Some(p) = p {
                sampled[row / 64] |= 1 << (row % 64);
                sa_samples.push(*p);
            }
        }
        let mut sampled_rank = Vec::with_capacity(words + 1);
        let mut acc = 0u32;
        for w in &sampled {
            sampled_rank.push(acc);
            acc += w.count_ones();
        }
        sampled_rank.push(acc);

        FmIndex {
            bwt,
            occ,
            c_table,
            sentinel_rows,
            sample_rate,
            sampled,
            sampled_rank,
            sa_samples,
            starts,
        }
    }

    pub fn text_len(&self) -> usize {
        self.bwt.len()
    }

    pub fn string_count(&self) -> usize {
        self.starts.len()
    }

    pub fn sample_rate(&self) -> usize {
        self.sample_rate
    }

    pub fn bwt_string(&self) -> String {
        self.bwt
            .iter()
            .map(|&c| DECODE[c as usize] as char)
            .collect()
    }

    fn occ(&self, c: u8, i: usize) -> usize {
        let block = i / OCC_STEP;
        let base = self.occ[block][c as usize - 1] as usize;
        base + self.bwt[block * OCC_STEP..i]
            .iter()
            .filter(|&&x| x == c)
            .count()
    }

    fn lf(&self, row: usize) -> usize {
        let c = self.bwt[row];
        if c == SENTINEL {
            let i = self
                .sentinel_rows
                .binary_search_by_key(&(row as u32), |p| p.0)
                .expect("sentinel row");
            self.sentinel_rows[i].1 as usize
        } else {
            self.c_table[c as usize] + self.occ(c, row)
        }
    }

    /// Row range `[lo, hi)` of suffixes prefixed by `pattern`.
    fn backward_search(&self, pattern: &[u8]) -> Result<(usize, usize), IndexError> {
        if pattern.is_empty() {
            return Err(IndexError::EmptyPattern);
        }
        let (mut lo, mut hi) = (0, self.bwt.len());
        for (position, &b) in pattern.iter().enumerate().rev() {
            let c = code(b).ok_or(IndexError::InvalidSymbol { byte: b, position })?;
            lo = self.c_table[c as usize] + self.occ(c, lo);
            hi = self.c_table[c as usize] + self.occ(c, hi);
            if lo >= hi {
                return Ok((0, 0));
            }
        }
        Ok((lo, hi))
    }

    pub fn count(&self, pattern: &[u8]) -> Result<usize, IndexError> {
        let (lo, hi) = self.backward_search(pattern)?;
        Ok(hi - lo)
    }

    fn suffix_position(&self, mut row: usize) -> usize {
        let mut steps = 0;
        loop {
            if self.sampled[row / 64] >> (row % 64) & 1 == 1 {
                let below = (self.sampled[row / 64] & ((1u64 << (row % 64)) - 1)).count_ones();
                let idx = self.sampled_rank[row / 64] + below;
                return (self.sa_samples[idx as usize] as usize + steps) % self.bwt.len();
            }
            row = self.lf(row);
            steps += 1;
        }
    }

    /// Occurrences as `(string index, offset)` pairs, sorted.
    pub fn locate(&self, pattern: &[u8]) -> Result<Vec<(usize, usize)>, IndexError> {
        let (lo, hi) = self.backward_search(pattern)?;
        let mut out: Vec<(usize, usize)> = (lo..hi)
            .map(|row| {
                let p = self.suffix_position(row);
                let s = self.starts.partition_point(|&st| st as usize <= p) - 1;
                (s, p - self.starts[s] as usize)
            })
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// The indexed strings, in build order.
    pub fn extract(&self) -> Vec<Vec<u8>> {
        (0..self.string_count())
            .map(|j| self.extract_string(j))
            .collect()
    }

    pub fn extract_string(&self, j: usize) -> Vec<u8> {
        let mut out = Vec::new();
        let mut row = j;
        while self.bwt[row] != SENTINEL {
            out.push(DECODE[self.bwt[row] as usize]);
            row = self.lf(row);
        }
        out.reverse();
        out
    }

    /// `GDCIDX1` image: header, sentinel rows, 2-bit BWT, sampled-row
    /// bitmap, suffix samples, string starts. Little-endian throughout.
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.bwt.len();
        let mut out = Vec::with_capacity(n / 4 + n / 8 + 4 * self.sa_samples.len() + 64);
        out.extend_from_slice(MAGIC);
        put_u64(&mut out, n as u64);
        put_u64(&mut out, self.starts.len() as u64);
        put_u64(&mut out, self.sample_rate as u64);
        for &(row, id) in &self.sentinel_rows {
            put_u32(&mut out, row);
            put_u32(&mut out, id);
        }
        for chunk in self.bwt.chunks(4) {
            let mut byte = 0u8;
            for (j, &c) in chunk.iter().enumerate() {
                byte |= c.saturating_sub(1) << (6 - 2 * j);
            }
            out.push(byte);
        }
        for w in &self.sampled {
            out.extend_from_slice(&w.to_le_bytes());
        }
        put_u64(&mut out, self.sa_samples.len() as u64);
        for &s in &self.sa_samples {
            put_u32(&mut out, s);
        }
        for &s in &self.starts {
            put_u32(&mut out, s);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<FmIndex, IndexError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(MAGIC.len())? != MAGIC {
            return Err(IndexError::BadMagic);
        }
        let n = r.u64()? as usize;
        let m = r.u64()? as usize;
        let sample_rate = r.u64()? as usize;
        if n == 0 || m > n || sample_rate == 0 {
            return Err(IndexError::Corrupt("bad header".into()));
        }
        let mut sentinel_rows = Vec::with_capacity(m);
        for _ in 0..m {
            let row = r.u32()?;
            let id = r.u32()?;
            if row as usize >= n || id as usize >= m {
                return Err(IndexError::Corrupt("sentinel out of range".into()));
            }
            sentinel_rows.push((row, id));
        }
        if sentinel_rows.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(IndexError::Corrupt("sentinel rows not sorted".into()));
        }
        let packed = r.take(n.div_ceil(4))?;
        let mut bwt: Vec<u8> = (0..n)
            .map(|i| ((packed[i / 4] >> (6 - 2 * (i % 4))) & 3) + 1)
            .collect();
        for &(row, _) in &sentinel_rows {
            bwt[row as usize] = SENTINEL;
        }
        let words = n.div_ceil(64);
        let mut flags = Vec::with_capacity(words);
        for _ in 0..words {
            flags.push(r.u64()?);
        }
        let sample_count = r.u64()? as usize;
        let ones: usize = flags.iter().map(|w| w.count_ones() as usize).sum();
        if sample_count != ones {
            return Err(IndexError::Corrupt("sample count mismatch".into()));
        }
        let mut samples = Vec::with_capacity(sample_count);
        for _ in 0..sample_count {
            samples.push(r.u32()?);
        }
        let mut starts = Vec::with_capacity(m);
        for _ in 0..m {
            starts.push(r.u32()?);
        }
        if r.pos != bytes.len() {
            return Err(IndexError::Corrupt("trailing bytes".into()));
        }
        let mut it = samples.into_iter();
        let sampled_positions: Vec<Option<u32>> = (0..n)
            .map(|row| {
                if flags[row / 64] >> (row % 64) & 1 == 1 {
                    it.next()
                } else {
                    None
                }
            })
            .collect();
        Ok(Self::assemble(
            bwt,
            sentinel_rows,
            sample_rate,
            &sampled_positions,
            starts,
        ))
    }
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

pub(crate) struct Reader<'a> {
    pub(crate) bytes: &'a [u8],
    pub(crate) pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8], IndexError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or(IndexError::Truncated)?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    pub(crate) fn u64(&mut self) -> Result<u64, IndexError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub(crate) fn u32(&mut self) -> Result<u32, IndexError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub(crate) fn u8(&mut self) -> Result<u8, IndexError> {
        Ok(self.take(1)?[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_count(strings: &[&[u8]], p: &[u8]) -> usize {
        strings
            .iter()
            .map(|s| s.windows(p.len()).filter(|w| *w == p).count())
            .sum()
    }

    #[test]
    fn count_examples() {
        let ix = FmIndex::build(&["ACGT"]).unwrap();
        assert_eq!(ix.count(b"ACGT").unwrap(), 1);
        let ix = FmIndex::build(&["ACGTAC"]).unwrap();
        assert_eq!(ix.count(b"AC").unwrap(), 2);
        assert_eq!(ix.count(b"TT").unwrap(), 0);
        let ix = FmIndex::build(&["AAAA"]).unwrap();
        assert_eq!(ix.count(b"AA").unwrap(), 3);
        assert_eq!(ix.count(b""), Err(IndexError::EmptyPattern));
        assert!(matches!(
            ix.count(b"AN"),
            Err(IndexError::InvalidSymbol { byte: b'N', .. })
        ));
    }

    #[test]
    fn multi_string_extract_and_boundaries() {
        let ix = FmIndex::build(&["ACG", "TTT"]).unwrap();
        assert_eq!(ix.extract(), [b"ACG".to_vec(), b"TTT".to_vec()]);
        // no match across the string boundary
        assert_eq!(ix.count(b"GT").unwrap(), 0);
        assert_eq!(ix.locate(b"TT").unwrap(), [(1, 0), (1, 1)]);
    }

    #[test]
    fn build_errors() {
        assert_eq!(FmIndex::build::<&str>(&[]), Err(IndexError::EmptyText));
        assert!(matches!(
            FmIndex::build(&["ACxT"]),
            Err(IndexError::InvalidSymbol {
                byte: b'x',
                position: 2
            })
        ));
    }

    #[test]
    fn bwt_single_string() {
        // rotations of ACGT$ sorted: $ACGT ACGT$ CGT$A GT$AC T$ACG
        assert_eq!(FmIndex::build(&["ACGT"]).unwrap().bwt_string(), "T$ACG");
    }

    #[test]
    fn serialization() {
        let ix = FmIndex::build_with_sample_rate(&["ACGTTGCA", "GGA", "T"], 4).unwrap();
        let bytes = ix.to_bytes();
        assert_eq!(&bytes[..7], b"GDCIDX1");
        assert_eq!(FmIndex::from_bytes(&bytes).unwrap(), ix);
        assert_eq!(ix.to_bytes(), bytes);
        assert_eq!(
            FmIndex::from_bytes(&bytes[..bytes.len() - 1]),
            Err(IndexError::Truncated)
        );
        assert_eq!(FmIndex::from_bytes(b"NOTANIDX"), Err(IndexError::BadMagic));
    }

    proptest! {
        #[test]
        fn matches_naive(
            strings in proptest::collection::vec("[ACGT]{1,60}", 1..6),
            patterns in proptest::collection::vec("[ACGT]{1,5}", 1..20),
            rate in 1usize..9,
        ) {
            let raw: Vec<&[u8]> = strings.iter().map(|s| s.as_bytes()).collect();
            let ix = FmIndex::build_with_sample_rate(&raw, rate).unwrap();
            prop_assert_eq!(ix.extract(), raw.iter().map(|s| s.to_vec()).collect::<Vec<_>>());
            for p in &patterns {
                prop_assert_eq!(ix.count(p.as_bytes()).unwrap(), naive_count(&raw, p.as_bytes()));
                let mut expect = Vec::new();
                for (i, s) in raw.iter().enumerate() {
                    for (o, w) in s.windows(p.len()).enumerate() {
                        if w == p.as_bytes() {
                            expect.push((i, o));
                        }
                    }
                }
                prop_assert_eq!(ix.locate(p.as_bytes()).unwrap(), expect);
            }
        }
    }
}
