//! Compressed-on-disk cases.
//!
//! * `DP0` stores `D_k` and `F_k` as they come out of the counter.
//! * `DP1` sorts `D_k` by ASCII byte order and permutes `F_k` alongside.
//! * `DP2` sorts `F_k` ascending (ties by DSK order of the k-mer) and
//!   permutes `D_k` alongside; the sorted stream may be stored as gaps.
//! * `DP3` replaces `D_k` with a spectrum preserving string set `S` and
//!   realigns `F_k` so that its i-th value belongs to the i-th window of `S`.
//!
//! Every case restores the dictionary exactly, in DSK order.

mod archive;

pub(crate) use archive::ArchiveWriter;
pub use archive::{
    archive_size_bytes, Archive, ExternalCommand, Manifest, PayloadEntry, FORMAT_VERSION,
    MANIFEST_FILE,
};

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codecs::{
    gap_decode, gap_encode, CodecError, CodecKind, CodecRegistry, CodecSpec, GapFile,
};
use crate::kmer::{Kmer, KmerDictionary, KmerError};
use crate::spss::{build_spss, Spss, SpssError};
use crate::succinct::{self, IndexError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Kmer(#[from] KmerError),
    #[error(transparent)]
    Spss(#[from] SpssError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("payload {0} is missing")]
    MissingPayload(String),
    #[error("payload {file} is {actual} bytes, manifest says {expected}")]
    SizeMismatch {
        file: String,
        expected: u64,
        actual: u64,
    },
    #[error("checksum mismatch on {0}")]
    ChecksumMismatch(String),
    #[error("window k-mer {0} is absent from the dictionary")]
    MergeMismatch(String),
    #[error("{windows} windows but {freqs} frequencies")]
    WindowCountMismatch { windows: usize, freqs: usize },
    #[error("gap files need a sorted frequency stream; case {0} does not sort F_k")]
    GapsNeedSortedStream(Case),
    #[error("case {0} does not match this operation")]
    WrongCase(Case),
    #[error("corrupt payload: {0}")]
    Corrupt(String),
}

impl PipelineError {
    /// True for failures that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, PipelineError::MergeMismatch(_))
            || matches!(self, PipelineError::Index(e) if e.is_internal())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Case {
    #[serde(rename = "DP0")]
    Dp0,
    #[serde(rename = "DP1")]
    Dp1,
    #[serde(rename = "DP2")]
    Dp2,
    #[serde(rename = "DP3")]
    Dp3,
    #[serde(rename = "Explicit")]
    SdExplicit,
    #[serde(rename = "Implicit")]
    SdImplicit,
}

impl Case {
    pub const COMPRESSED: [Case; 4] = [Case::Dp0, Case::Dp1, Case::Dp2, Case::Dp3];
    pub const SUCCINCT: [Case; 2] = [Case::SdExplicit, Case::SdImplicit];

    pub fn name(self) -> &'static str {
        match self {
            Case::Dp0 => "DP0",
            Case::Dp1 => "DP1",
            Case::Dp2 => "DP2",
            Case::Dp3 => "DP3",
            Case::SdExplicit => "Explicit",
            Case::SdImplicit => "Implicit",
        }
    }

    pub fn is_succinct(self) -> bool {
        matches!(self, Case::SdExplicit | Case::SdImplicit)
    }

    /// Whether the case builds an SPSS during compression.
    pub fn uses_spss(self) -> bool {
        matches!(self, Case::Dp3 | Case::SdImplicit)
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Case {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dp0" => Ok(Case::Dp0),
            "dp1" => Ok(Case::Dp1),
            "dp2" => Ok(Case::Dp2),
            "dp3" => Ok(Case::Dp3),
            "explicit" | "sd-explicit" => Ok(Case::SdExplicit),
            "implicit" | "sd-implicit" => Ok(Case::SdImplicit),
            _ => Err(format!(
                "unknown case {s:?} (expected DP0..DP3, Explicit or Implicit)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    pub case: Case,
    /// Codec for `D_k`, `S`, or the FM-index file.
    pub codec_d: String,
    /// Codec for the frequency stream or the static frequency map.
    pub codec_f: String,
    pub use_gaps: bool,
}

impl PipelineConfig {
    pub fn new(case: Case, codec_d: &str, codec_f: &str) -> Self {
        PipelineConfig {
            case,
            codec_d: codec_d.to_string(),
            codec_f: codec_f.to_string(),
            use_gaps: false,
        }
    }

    pub fn with_gaps(mut self, use_gaps: bool) -> Self {
        self.use_gaps = use_gaps;
        self
    }

    pub fn label(&self) -> String {
        let d_name = match self.case {
            Case::Dp3 => "S",
            Case::SdExplicit | Case::SdImplicit => "Index",
            _ => "Dk",
        };
        let f_name = if self.use_gaps { "Gk" } else { "Fk" };
        format!(
            "{}({}({d_name}), {}({f_name}))",
            self.case, self.codec_d, self.codec_f
        )
    }

    pub(crate) fn validate(&self) -> Result<(), PipelineError> {
        if self.use_gaps && self.case != Case::Dp2 {
            return Err(PipelineError::GapsNeedSortedStream(self.case));
        }
        Ok(())
    }
}

/// Compresses `d` into an archive under `out_dir` according to `cfg.case`.
pub fn compress(
    d: &KmerDictionary,
    cfg: &PipelineConfig,
    registry: &CodecRegistry,
    out_dir: &Path,
) -> Result<Archive, PipelineError> {
    match cfg.case {
        Case::Dp0 => dp0_compress(d, cfg, registry, out_dir),
        Case::Dp1 => dp1_compress(d, cfg, registry, out_dir),
        Case::Dp2 => dp2_compress(d, cfg, registry, out_dir),
        Case::Dp3 => dp3_compress(d, cfg, registry, out_dir),
        Case::SdExplicit | Case::SdImplicit => succinct::sd_compress(d, cfg, registry, out_dir),
    }
}

/// Restores the dictionary stored in `a`, dispatching on its manifest case.
pub fn decompress(a: &Archive, registry: &CodecRegistry) -> Result<KmerDictionary, PipelineError> {
    match a.manifest.case {
        Case::Dp0 | Case::Dp1 | Case::Dp2 => explicit_decompress(a, registry),
        Case::Dp3 => dp3_decompress(a, registry),
        Case::SdExplicit | Case::SdImplicit => succinct::sd_decompress(a, registry),
    }
}

pub fn dp0_compress(
    d: &KmerDictionary,
    cfg: &PipelineConfig,
    registry: &CodecRegistry,
    out_dir: &Path,
) -> Result<Archive, PipelineError> {
    expect_case(cfg, Case::Dp0)?;
    write_explicit(d.kmers(), d.freqs(), d.k(), cfg, registry, out_dir)
}

pub fn dp1_compress(
    d: &KmerDictionary,
    cfg: &PipelineConfig,
    registry: &CodecRegistry,
    out_dir: &Path,
) -> Result<Archive, PipelineError> {
    expect_case(cfg, Case::Dp1)?;
    let (kmers, freqs) = dp1_order(d);
    write_explicit(&kmers, &freqs, d.k(), cfg, registry, out_dir)
}

pub fn dp2_compress(
    d: &KmerDictionary,
    cfg: &PipelineConfig,
    registry: &CodecRegistry,
    out_dir: &Path,
) -> Result<Archive, PipelineError> {
    expect_case(cfg, Case::Dp2)?;
    let (kmers, freqs) = dp2_order(d);
    write_explicit(&kmers, &freqs, d.k(), cfg, registry, out_dir)
}

/// `D_k` in ASCII byte order (what `sort` does to the text), with `F_k`
/// permuted alongside.
pub fn dp1_order(d: &KmerDictionary) -> (Vec<Kmer>, Vec<u64>) {
    let mut perm: Vec<usize> = (0..d.len()).collect();
    let text: Vec<Vec<u8>> = d.kmers().iter().map(Kmer::to_bytes).collect();
    perm.sort_by(|&a, &b| text[a].cmp(&text[b]));
    permute(d, &perm)
}

/// `F_k` ascending, ties broken by DSK order of the k-mer.
pub fn dp2_order(d: &KmerDictionary) -> (Vec<Kmer>, Vec<u64>) {
    let mut perm: Vec<usize> = (0..d.len()).collect();
    // d is DSK-sorted, so a stable sort on frequency breaks ties by DSK order
    perm.sort_by_key(|&i| d.freqs()[i]);
    permute(d, &perm)
}

fn permute(d: &KmerDictionary, perm: &[usize]) -> (Vec<Kmer>, Vec<u64>) {
    perm.iter().map(|&i| (d.kmers()[i], d.freqs()[i])).unzip()
}

fn expect_case(cfg: &PipelineConfig, case: Case) -> Result<(), PipelineError> {
    if cfg.case != case {
        return Err(PipelineError::WrongCase(cfg.case));
    }
    cfg.validate()
}

pub(crate) fn textual_codec<'r>(
    registry: &'r CodecRegistry,
    id: &str,
) -> Result<&'r CodecSpec, PipelineError> {
    let spec = registry.get(id)?;
    if spec.kind != CodecKind::Textual {
        return Err(CodecError::KindMismatch {
            id: id.to_string(),
            expected: CodecKind::Textual,
            actual: spec.kind,
        }
        .into());
    }
    Ok(spec)
}

/// One k-mer per line, or one FASTA record per k-mer for FASTA-only tools.
pub fn kmers_to_text(kmers: &[Kmer], fasta: bool) -> Vec<u8> {
    let k = kmers.first().map_or(0, Kmer::k);
    let mut out = Vec::with_capacity(kmers.len() * (k + 1));
    for (i, x) in kmers.iter().enumerate() {
        if fasta {
            out.push(b'>');
            out.extend_from_slice(i.to_string().as_bytes());
            out.push(b'\n');
        }
        out.extend(x.bases().map(|b| b.to_byte()));
        out.push(b'\n');
    }
    out
}

/// Inverse of [`kmers_to_text`]; FASTA header lines and blank lines are
/// skipped.
pub fn text_to_kmers(text: &[u8], k: usize) -> Result<Vec<Kmer>, PipelineError> {
    let mut out = Vec::new();
    for (i, line) in text.split(|&b| b == b'\n').enumerate() {
        let line = line.strip_suffix(b"\r").unwrap_or(line);
        if line.is_empty() || line[0] == b'>' {
            continue;
        }
        if line.len() != k {
            return Err(PipelineError::Corrupt(format!(
                "line {}: expected a {k}-mer",
                i + 1
            )));
        }
        out.push(Kmer::from_bytes(line)?);
    }
    Ok(out)
}

fn write_explicit(
    kmers: &[Kmer],
    freqs: &[u64],
    k: usize,
    cfg: &PipelineConfig,
    registry: &CodecRegistry,
    out_dir: &Path,
) -> Result<Archive, PipelineError> {
    let codec_d = textual_codec(registry, &cfg.codec_d)?;
    let codec_f = registry.get(&cfg.codec_f)?;
    let stream = if cfg.use_gaps {
        gap_encode(freqs)?.to_stream(freqs.len())
    } else {
        freqs.to_vec()
    };

    let mut w = ArchiveWriter::new(
        cfg.case,
        k,
        &cfg.codec_d,
        &cfg.codec_f,
        cfg.use_gaps,
        kmers.len(),
    );
    w.add(
        "d",
        codec_d.compress_bytes(&kmers_to_text(kmers, codec_d.wants_fasta()))?,
        registry,
    );
    w.add("f", codec_f.encode_values(&stream)?, registry);
    w.write(out_dir)
}

fn explicit_decompress(
    a: &Archive,
    registry: &CodecRegistry,
) -> Result<KmerDictionary, PipelineError> {
    let m = &a.manifest;
    let d_blob = a.read_blob("d")?;
    let f_blob = a.read_blob("f")?;
    let kmers = text_to_kmers(
        &registry.get(&d_blob.codec_id)?.decompress_bytes(&d_blob)?,
        m.k,
    )?;
    let stream = registry.get(&f_blob.codec_id)?.decode_values(&f_blob)?;
    let freqs = if m.use_gaps {
        gap_decode(&GapFile::from_stream(&stream), stream.len())?
    } else {
        stream
    };
    if kmers.len() != freqs.len() || kmers.len() as u64 != m.kmer_count {
        return Err(PipelineError::Corrupt(format!(
            "{} k-mers, {} frequencies, manifest says {}",
            kmers.len(),
            freqs.len(),
            m.kmer_count
        )));
    }
    Ok(KmerDictionary::new(m.k, kmers, freqs)?)
}

/// Frequencies realigned to the window positions of `s`, by sorting
/// `(k-mer, position)` pairs and merging them against the DSK-sorted
/// dictionary.
pub fn align_frequencies(d: &KmerDictionary, s: &Spss) -> Result<Vec<u64>, PipelineError> {
    let mut pairs: Vec<(Kmer, usize)> = s
        .windows()
        .into_iter()
        .enumerate()
        .map(|(i, x)| (x, i))
        .collect();
    if pairs.len() != d.len() {
        return Err(PipelineError::WindowCountMismatch {
            windows: pairs.len(),
            freqs: d.len(),
        });
    }
    pairs.sort_unstable();

    let mut matched: Vec<(usize, u64)> = Vec::with_capacity(pairs.len());
    let (kmers, freqs) = (d.kmers(), d.freqs());
    let mut j = 0;
    for (x, i) in pairs {
        while j < kmers.len() && kmers[j] < x {
            j += 1;
        }
        if j == kmers.len() || kmers[j] != x {
            return Err(PipelineError::MergeMismatch(x.to_string()));
        }
        matched.push((i, freqs[j]));
    }
    matched.sort_unstable_by_key(|p| p.0);
    Ok(matched.into_iter().map(|p| p.1).collect())
}

pub fn dp3_compress(
    d: &KmerDictionary,
    cfg: &PipelineConfig,
    registry: &CodecRegistry,
    out_dir: &Path,
) -> Result<Archive, PipelineError> {
    expect_case(cfg, Case::Dp3)?;
    let codec_s = textual_codec(registry, &cfg.codec_d)?;
    let codec_f = registry.get(&cfg.codec_f)?;
    let s = build_spss(d)?;
    let aligned = align_frequencies(d, &s)?;

    let mut w = ArchiveWriter::new(Case::Dp3, d.k(), &cfg.codec_d, &cfg.codec_f, false, d.len());
    w.add("s", codec_s.compress_bytes(&s.to_fasta())?, registry);
    w.add("f", codec_f.encode_values(&aligned)?, registry);
    w.write(out_dir)
}

pub fn dp3_decompress(
    a: &Archive,
    registry: &CodecRegistry,
) -> Result<KmerDictionary, PipelineError> {
    let m = &a.manifest;
    if m.case != Case::Dp3 {
        return Err(PipelineError::WrongCase(m.case));
    }
    let s_blob = a.read_blob("s")?;
    let f_blob = a.read_blob("f")?;
    let s = Spss::read_fasta(
        &registry.get(&s_blob.codec_id)?.decompress_bytes(&s_blob)?[..],
        m.k,
    )?;
    let freqs = registry.get(&f_blob.codec_id)?.decode_values(&f_blob)?;
    let windows = s.windows();
    if windows.len() != freqs.len() {
        return Err(PipelineError::WindowCountMismatch {
            windows: windows.len(),
            freqs: freqs.len(),
        });
    }
    Ok(KmerDictionary::new(m.k, windows, freqs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn dict(k: usize, pairs: &[(&str, u64)]) -> KmerDictionary {
        KmerDictionary::from_pairs(k, pairs.iter().map(|(s, f)| (s.parse().unwrap(), *f))).unwrap()
    }

    fn names(v: &[Kmer]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    /// The archive lives as long as the returned directory guard.
    fn round_trip(d: &KmerDictionary, cfg: &PipelineConfig) -> (Archive, tempfile::TempDir) {
        let dir = tempfile::tempdir().unwrap();
        let reg = CodecRegistry::builtin();
        let a = compress(d, cfg, &reg, dir.path()).unwrap();
        let reopened = Archive::open(dir.path()).unwrap();
        assert_eq!(reopened, a);
        assert_eq!(&decompress(&reopened, &reg).unwrap(), d, "{}", cfg.label());
        (a, dir)
    }

    #[test]
    fn dp0_examples() {
        let d = dict(2, &[("AC", 2), ("CG", 1)]);
        round_trip(&d, &PipelineConfig::new(Case::Dp0, "store", "store"));
        round_trip(&d, &PipelineConfig::new(Case::Dp0, "twobit", "varint"));
    }

    #[test]
    fn dp1_orders_by_ascii() {
        let d = dict(2, &[("AC", 2), ("CA", 5)]);
        let (k, f) = dp1_order(&d);
        assert_eq!(names(&k), ["AC", "CA"]);
        assert_eq!(f, [2, 5]);

        // TA and GC are palindromes; DSK order is TA < GC
        let d = dict(2, &[("TA", 1), ("GC", 2)]);
        assert_eq!(names(d.kmers()), ["TA", "GC"]);
        let (k, f) = dp1_order(&d);
        assert_eq!(names(&k), ["GC", "TA"]);
        assert_eq!(f, [2, 1]);
        round_trip(&d, &PipelineConfig::new(Case::Dp1, "store", "store"));
    }

    #[test]
    fn dp2_orders_by_frequency() {
        let d = dict(2, &[("AC", 2), ("CG", 1)]);
        let (k, f) = dp2_order(&d);
        assert_eq!(names(&k), ["CG", "AC"]);
        assert_eq!(f, [1, 2]);
        assert_eq!(
            gap_encode(&f).unwrap(),
            GapFile {
                offset: 1,
                gaps: vec![1]
            }
        );
        round_trip(
            &d,
            &PipelineConfig::new(Case::Dp2, "store", "varint").with_gaps(true),
        );
        round_trip(
            &dict(4, &[("AAAA", 7)]),
            &PipelineConfig::new(Case::Dp2, "store", "store"),
        );
    }

    #[test]
    fn dp2_ties_follow_dsk_order() {
        let d = dict(2, &[("AC", 3), ("AA", 3), ("CA", 1), ("TA", 3)]);
        let (k, f) = dp2_order(&d);
        assert_eq!(names(&k), ["CA", "AA", "AC", "TA"]);
        assert_eq!(f, [1, 3, 3, 3]);
    }

    #[test]
    fn dp3_alignment() {
        let d = dict(2, &[("AC", 2), ("CG", 1)]);
        let s = build_spss(&d).unwrap();
        assert_eq!(s.strings(), [b"ACG".to_vec()]);
        assert_eq!(align_frequencies(&d, &s).unwrap(), [2, 1]);
        round_trip(&d, &PipelineConfig::new(Case::Dp3, "twobit", "bic"));

        let d = dict(4, &[("AAAA", 9)]);
        let s = build_spss(&d).unwrap();
        assert_eq!(align_frequencies(&d, &s).unwrap(), [9]);
        round_trip(&d, &PipelineConfig::new(Case::Dp3, "store", "pfor"));
    }

    #[test]
    fn dp3_merge_mismatch_and_count_checks() {
        let d = dict(2, &[("AC", 2), ("CG", 1)]);
        let foreign = Spss::new(2, vec![b"AAC".to_vec()]).unwrap();
        assert!(
            matches!(align_frequencies(&d, &foreign), Err(PipelineError::MergeMismatch(s)) if s == "AA")
        );
        let short = Spss::new(2, vec![b"AC".to_vec()]).unwrap();
        assert!(matches!(
            align_frequencies(&d, &short),
            Err(PipelineError::WindowCountMismatch { .. })
        ));
    }

    #[test]
    fn dp3_positions_are_global_across_strings() {
        let g = b"ACGTTGCATGCAAATTTGGGCCCATATCGCGA";
        let d = crate::kmer::count_kmers(&[&g[..]], 5).unwrap();
        let s = build_spss(&d).unwrap();
        assert!(s.strings().len() > 1);
        let aligned = align_frequencies(&d, &s).unwrap();
        let truth: HashMap<Kmer, u64> = d.iter().collect();
        for (x, f) in s.windows().iter().zip(&aligned) {
            assert_eq!(truth[x], *f);
        }
    }

    #[test]
    fn empty_dictionary_all_cases() {
        let d = KmerDictionary::empty(4).unwrap();
        for case in Case::COMPRESSED {
            let (a, _dir) = round_trip(&d, &PipelineConfig::new(case, "store", "varint"));
            assert_eq!(archive_size_bytes(&a, false).unwrap(), 0);
        }
        let (a, _dir) = round_trip(&d, &PipelineConfig::new(Case::Dp0, "twobit", "pfor"));
        // twobit: len + exception count; pfor: value count
        assert_eq!(archive_size_bytes(&a, false).unwrap(), 3);
    }

    #[test]
    fn gaps_only_with_sorted_stream() {
        let d = dict(2, &[("AC", 2)]);
        let dir = tempfile::tempdir().unwrap();
        let cfg = PipelineConfig::new(Case::Dp0, "store", "store").with_gaps(true);
        assert!(matches!(
            compress(&d, &cfg, &CodecRegistry::builtin(), dir.path()),
            Err(PipelineError::GapsNeedSortedStream(Case::Dp0))
        ));
    }

    #[test]
    fn integer_codec_rejected_for_dk() {
        let d = dict(2, &[("AC", 2)]);
        let dir = tempfile::tempdir().unwrap();
        let cfg = PipelineConfig::new(Case::Dp0, "varint", "store");
        assert!(matches!(
            compress(&d, &cfg, &CodecRegistry::builtin(), dir.path()),
            Err(PipelineError::Codec(CodecError::KindMismatch { .. }))
        ));
        let cfg = PipelineConfig::new(Case::Dp0, "zstd", "store");
        assert!(matches!(
            compress(&d, &cfg, &CodecRegistry::builtin(), dir.path()),
            Err(PipelineError::Codec(CodecError::Unavailable(_)))
        ));
    }

    #[test]
    fn tampering_detected() {
        let d = dict(2, &[("AC", 2), ("CG", 1)]);
        let dir = tempfile::tempdir().unwrap();
        let reg = CodecRegistry::builtin();
        compress(
            &d,
            &PipelineConfig::new(Case::Dp0, "store", "store"),
            &reg,
            dir.path(),
        )
        .unwrap();
        let f = dir.path().join("d.payload");
        std::fs::write(&f, b"AC\nCC\n").unwrap();
        assert!(matches!(
            Archive::open(dir.path()),
            Err(PipelineError::ChecksumMismatch(_))
        ));
        std::fs::write(&f, b"AC\n").unwrap();
        assert!(matches!(
            Archive::open(dir.path()),
            Err(PipelineError::SizeMismatch { .. })
        ));
        std::fs::remove_file(&f).unwrap();
        assert!(matches!(
            Archive::open(dir.path()),
            Err(PipelineError::MissingPayload(_))
        ));
    }

    #[test]
    fn size_is_sum_of_payloads() {
        let d = dict(2, &[("AC", 2), ("CG", 1)]);
        let (a, _dir) = round_trip(&d, &PipelineConfig::new(Case::Dp0, "store", "store"));
        // "AC\nCG\n" + "2\n1\n"
        assert_eq!(archive_size_bytes(&a, false).unwrap(), 6 + 4);
        let manifest_len = std::fs::metadata(a.dir.join(MANIFEST_FILE)).unwrap().len();
        assert_eq!(archive_size_bytes(&a, true).unwrap(), 10 + manifest_len);
    }

    #[test]
    fn kmer_text_accepts_fasta() {
        let kmers: Vec<Kmer> = ["AC", "CG"].iter().map(|s| s.parse().unwrap()).collect();
        let fa = kmers_to_text(&kmers, true);
        assert_eq!(fa, b">0\nAC\n>1\nCG\n");
        assert_eq!(text_to_kmers(&fa, 2).unwrap(), kmers);
        assert!(text_to_kmers(b"ACG\n", 2).is_err());
    }

    #[test]
    fn case_names_parse() {
        for c in Case::COMPRESSED.iter().chain(&Case::SUCCINCT) {
            assert_eq!(c.name().parse::<Case>().unwrap(), *c);
        }
        assert!("DP4".parse::<Case>().is_err());
        assert_eq!(
            PipelineConfig::new(Case::Dp2, "store", "varint")
                .with_gaps(true)
                .label(),
            "DP2(store(Dk), varint(Gk))"
        );
    }
}
