//! Succinct-on-disk cases.
//!
//! An archive holds an FM-index and a static frequency map. In the explicit
//! case the index covers one string per canonical k-mer; in the implicit case
//! it covers an SPSS of the dictionary. Membership is answered by the index,
//! frequencies by the map.

mod fm;
mod sa;
mod sfm;

pub use fm::{FmIndex, DEFAULT_SAMPLE_RATE};
pub use sa::suffix_array;
pub use sfm::StaticFreqMap;

use std::path::Path;

use thiserror::Error;

use crate::codecs::{CodecError, CodecRegistry};
use crate::kmer::{Kmer, KmerDictionary, KmerError};
use crate::pipeline::{textual_codec, Archive, ArchiveWriter, Case, PipelineConfig, PipelineError};
use crate::spss::{build_spss, recover_spectrum, Spss, SpssError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IndexError {
    #[error("invalid symbol {byte:#04x} at position {position}")]
    InvalidSymbol { byte: u8, position: usize },
    #[error("empty pattern")]
    EmptyPattern,
    #[error("nothing to index")]
    EmptyText,
    #[error("query must be canonical: {0}")]
    NonCanonicalQuery(String),
    #[error("query has length {actual}, index holds {expected}-mers")]
    QueryLength { expected: usize, actual: usize },
    #[error("bad magic number")]
    BadMagic,
    #[error("truncated index image")]
    Truncated,
    #[error("corrupt index image: {0}")]
    Corrupt(String),
    #[error("index and frequency map disagree: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Kmer(#[from] KmerError),
    #[error(transparent)]
    Spss(#[from] SpssError),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

impl IndexError {
    pub fn is_internal(&self) -> bool {
        matches!(self, IndexError::Inconsistent(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexMode {
    Explicit,
    Implicit,
}

impl IndexMode {
    fn tag(self) -> u8 {
        match self {
            IndexMode::Explicit => b'E',
            IndexMode::Implicit => b'I',
        }
    }

    fn case(self) -> Case {
        match self {
            IndexMode::Explicit => Case::SdExplicit,
            IndexMode::Implicit => Case::SdImplicit,
        }
    }
}

/// FM-index over the k-mers of a dictionary. `fm` is `None` for an empty
/// dictionary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuccinctIndex {
    mode: IndexMode,
    k: usize,
    fm: Option<FmIndex>,
}

impl SuccinctIndex {
    pub fn build_explicit(d: &KmerDictionary) -> Result<SuccinctIndex, IndexError> {
        let strings: Vec<Vec<u8>> = d.kmers().iter().map(Kmer::to_bytes).collect();
        Self::from_strings(IndexMode::Explicit, d.k(), &strings)
    }

    pub fn build_implicit(d: &KmerDictionary) -> Result<SuccinctIndex, IndexError> {
        if d.is_empty() {
            return Ok(SuccinctIndex {
                mode: IndexMode::Implicit,
                k: d.k(),
                fm: None,
            });
        }
        let s = build_spss(d)?;
        Self::from_strings(IndexMode::Implicit, d.k(), s.strings())
    }

    pub fn build(d: &KmerDictionary, mode: IndexMode) -> Result<SuccinctIndex, IndexError> {
        match mode {
            IndexMode::Explicit => Self::build_explicit(d),
            IndexMode::Implicit => Self::build_implicit(d),
        }
    }

    fn from_strings(
        mode: IndexMode,
        k: usize,
        strings: &[Vec<u8>],
    ) -> Result<SuccinctIndex, IndexError> {
        let fm = if strings.is_empty() {
            None
        } else {
            Some(FmIndex::build(strings)?)
        };
        Ok(SuccinctIndex { mode, k, fm })
    }

    pub fn mode(&self) -> IndexMode {
        self.mode
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn fm(&self) -> Option<&FmIndex> {
        self.fm.as_ref()
    }

    /// Membership of a canonical k-mer. Non-canonical queries are rejected.
    pub fn contains(&self, q: &Kmer) -> Result<bool, IndexError> {
        if q.k() != self.k {
            return Err(IndexError::QueryLength {
                expected: self.k,
                actual: q.k(),
            });
        }
        if !q.is_canonical() {
            return Err(IndexError::NonCanonicalQuery(q.to_string()));
        }
        let Some(fm) = &self.fm else { return Ok(false) };
        if fm.count(&q.to_bytes())? > 0 {
            return Ok(true);
        }
        // an SPSS may spell a k-mer on either strand
        Ok(self.mode == IndexMode::Implicit && fm.count(&q.reverse_complement().to_bytes())? > 0)
    }

    /// The canonical spectrum, DSK-sorted.
    pub fn recover_kmers(&self) -> Result<Vec<Kmer>, IndexError> {
        let Some(fm) = &self.fm else {
            return Ok(Vec::new());
        };
        let strings = fm.extract();
        match self.mode {
            IndexMode::Explicit => {
                let mut kmers = strings
                    .iter()
                    .map(|s| Kmer::from_bytes(s))
                    .collect::<Result<Vec<_>, _>>()?;
                kmers.sort_unstable();
                Ok(kmers)
            }
            IndexMode::Implicit => Ok(recover_spectrum(&Spss::new(self.k, strings)?)),
        }
    }

    /// `mode tag, k` then the `GDCIDX1` image (absent when empty).
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![self.mode.tag(), self.k as u8];
        if let Some(fm) = &self.fm {
            out.extend_from_slice(&fm.to_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<SuccinctIndex, IndexError> {
        let [tag, k, rest @ ..] = bytes else {
            return Err(IndexError::Truncated);
        };
        let mode = match tag {
            b'E' => IndexMode::Explicit,
            b'I' => IndexMode::Implicit,
            _ => return Err(IndexError::BadMagic),
        };
        let k = *k as usize;
        crate::kmer::check_k(k)?;
        let fm = if rest.is_empty() {
            None
        } else {
            Some(FmIndex::from_bytes(rest)?)
        };
        Ok(SuccinctIndex { mode, k, fm })
    }
}

/// Index plus frequency map: the in-memory form of a succinct archive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuccinctDictionary {
    pub index: SuccinctIndex,
    pub map: StaticFreqMap,
}

impl SuccinctDictionary {
    pub fn build(d: &KmerDictionary, mode: IndexMode) -> Result<SuccinctDictionary, IndexError> {
        Ok(SuccinctDictionary {
            index: SuccinctIndex::build(d, mode)?,
            map: StaticFreqMap::build(d),
        })
    }

    /// Frequency of a canonical k-mer, or `None` when absent.
    pub fn query(&self, q: &Kmer) -> Result<Option<u64>, IndexError> {
        if !self.index.contains(q)? {
            return Ok(None);
        }
        match self.map.query(q) {
            0 => Err(IndexError::Inconsistent(format!(
                "{q} is indexed but has no frequency"
            ))),
            f => Ok(Some(f)),
        }
    }

    pub fn recover(&self) -> Result<KmerDictionary, IndexError> {
        let kmers = self.index.recover_kmers()?;
        if kmers.len() != self.map.key_count() {
            return Err(IndexError::Inconsistent(format!(
                "{} indexed k-mers, {} map keys",
                kmers.len(),
                self.map.key_count()
            )));
        }
        let freqs = kmers.iter().map(|x| self.map.query(x)).collect();
        Ok(KmerDictionary::new(self.index.k, kmers, freqs)?)
    }

    /// Reads and decodes the `index` and `map` payloads of a succinct archive.
    pub fn load(
        a: &Archive,
        registry: &CodecRegistry,
    ) -> Result<SuccinctDictionary, PipelineError> {
        if !a.manifest.case.is_succinct() {
            return Err(PipelineError::WrongCase(a.manifest.case));
        }
        let ix_blob = a.read_blob("index")?;
        let map_blob = a.read_blob("map")?;
        let index = SuccinctIndex::from_bytes(
            &registry
                .get(&ix_blob.codec_id)?
                .decompress_bytes(&ix_blob)?,
        )?;
        let map = StaticFreqMap::from_bytes(
            &registry
                .get(&map_blob.codec_id)?
                .decompress_bytes(&map_blob)?,
        )?;
        if index.mode().case() != a.manifest.case
            || index.k() != a.manifest.k
            || map.k() != a.manifest.k
        {
            return Err(PipelineError::Corrupt(
                "index header disagrees with manifest".into(),
            ));
        }
        Ok(SuccinctDictionary { index, map })
    }
}

/// Implicit-case membership: `q` is present iff it, or its reverse
/// complement, occurs in the indexed SPSS. Returns the frequency if present.
pub fn implicit_membership(
    ix: &SuccinctIndex,
    map: &StaticFreqMap,
    q: &Kmer,
) -> Result<Option<u64>, IndexError> {
    if ix.mode() != IndexMode::Implicit {
        return Err(IndexError::Corrupt("not an implicit index".into()));
    }
    Ok(if ix.contains(q)? {
        Some(map.query(q))
    } else {
        None
    })
}

/// Restores the dictionary from an index and map.
pub fn sd_recover(ix: &SuccinctIndex, map: &StaticFreqMap) -> Result<KmerDictionary, IndexError> {
    SuccinctDictionary {
        index: ix.clone(),
        map: map.clone(),
    }
    .recover()
}

pub(crate) fn sd_compress(
    d: &KmerDictionary,
    cfg: &PipelineConfig,
    registry: &CodecRegistry,
    out_dir: &Path,
) -> Result<Archive, PipelineError> {
    cfg.validate()?;
    let mode = match cfg.case {
        Case::SdExplicit => IndexMode::Explicit,
        Case::SdImplicit => IndexMode::Implicit,
        other => return Err(PipelineError::WrongCase(other)),
    };
    let codec_ix = binary_safe(registry, &cfg.codec_d)?;
    let codec_map = binary_safe(registry, &cfg.codec_f)?;
    let sd = SuccinctDictionary::build(d, mode)?;

    let mut w = ArchiveWriter::new(cfg.case, d.k(), &cfg.codec_d, &cfg.codec_f, false, d.len());
    w.add(
        "index",
        codec_ix.compress_bytes(&sd.index.to_bytes())?,
        registry,
    );
    w.add(
        "map",
        codec_map.compress_bytes(&sd.map.to_bytes())?,
        registry,
    );
    w.write(out_dir)
}

pub(crate) fn sd_decompress(
    a: &Archive,
    registry: &CodecRegistry,
) -> Result<KmerDictionary, PipelineError> {
    let sd = SuccinctDictionary::load(a, registry)?;
    if sd.map.key_count() as u64 != a.manifest.kmer_count {
        return Err(PipelineError::Corrupt(
            "map size disagrees with manifest".into(),
        ));
    }
    Ok(sd.recover()?)
}

/// Index and map images are binary: the codec must be textual and must not
/// expect FASTA input.
fn binary_safe<'r>(
    registry: &'r CodecRegistry,
    id: &str,
) -> Result<&'r crate::codecs::CodecSpec, PipelineError> {
    let spec = textual_codec(registry, id)?;
    if spec.wants_fasta() {
        return Err(CodecError::Config(format!(
            "codec {id} reads FASTA and cannot hold an index image"
        ))
        .into());
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kmer::count_kmers;

    fn km(s: &str) -> Kmer {
        s.parse().unwrap()
    }

    #[test]
    fn membership_both_modes() {
        let d = count_kmers(&["ACGTTGCAAGGCTTAC"], 5).unwrap();
        for mode in [IndexMode::Explicit, IndexMode::Implicit] {
            let sd = SuccinctDictionary::build(&d, mode).unwrap();
            for (x, f) in d.iter() {
                assert_eq!(sd.query(&x).unwrap(), Some(f));
            }
            assert_eq!(sd.recover().unwrap(), d);
            let back = SuccinctIndex::from_bytes(&sd.index.to_bytes()).unwrap();
            assert_eq!(back, sd.index);
        }
    }

    #[test]
    fn non_members_and_bad_queries() {
        let d = count_kmers(&["AAAAACCCCC"], 4).unwrap();
        let sd = SuccinctDictionary::build(&d, IndexMode::Implicit).unwrap();
        assert_eq!(sd.query(&km("ACAC")).unwrap(), None);
        let nc = km("TTTT");
        assert!(!nc.is_canonical());
        assert_eq!(
            sd.query(&nc),
            Err(IndexError::NonCanonicalQuery("TTTT".into()))
        );
        assert!(matches!(
            sd.query(&km("AAA")),
            Err(IndexError::QueryLength {
                expected: 4,
                actual: 3
            })
        ));
        assert_eq!(
            implicit_membership(&sd.index, &sd.map, &km("AAAA")).unwrap(),
            Some(2)
        );
    }

    #[test]
    fn empty_dictionary() {
        let d = KmerDictionary::empty(3).unwrap();
        for mode in [IndexMode::Explicit, IndexMode::Implicit] {
            let sd = SuccinctDictionary::build(&d, mode).unwrap();
            assert_eq!(sd.query(&km("AAA")).unwrap(), None);
            assert_eq!(sd.recover().unwrap(), d);
            assert_eq!(
                SuccinctIndex::from_bytes(&sd.index.to_bytes()).unwrap(),
                sd.index
            );
        }
    }
}
