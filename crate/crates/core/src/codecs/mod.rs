//! Byte and integer codecs behind a common registry.
//!
//! Builtin codecs are deterministic and need nothing from the host:
//!
//! | id       | kind    | payload                                    |
//! |----------|---------|--------------------------------------------|
//! | `store`  | textual | the input bytes                            |
//! | `twobit` | textual | 2-bit nucleotides plus patched exceptions  |
//! | `varint` | integer | LEB128 values                              |
//! | `bic`    | integer | interpolative code over prefix sums        |
//! | `pfor`   | integer | patched frame-of-reference, 128-value blocks |
//!
//! External tools (bzip2, zstd, MFC, ...) are registered from a TOML file
//! named by the `GDC_CODEC_CONFIG` environment variable.

mod bic;
mod bits;
mod external;
mod gap;
mod pfor;
mod twobit;
mod varint;

pub use bic::{bic_decode, bic_encode, BitStream};
pub use bits::{BitReader, BitWriter};
pub use external::ExternalTemplate;
pub use gap::{gap_decode, gap_encode, GapFile};
pub use pfor::{
    pfor_decode, pfor_decode_with_block, pfor_encode, pfor_encode_with_block, PFOR_BLOCK,
};
pub use twobit::{twobit_decode, twobit_encode};
pub use varint::{read_varint, varint_decode, varint_encode, varint_len, write_varint};

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CODEC_CONFIG_ENV: &str = "GDC_CODEC_CONFIG";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("unknown codec {0:?}")]
    Unknown(String),
    #[error("codec unavailable: {0}")]
    Unavailable(String),
    #[error("external codec {id} failed (status {status:?}): {stderr}")]
    ExternalFailed {
        id: String,
        status: Option<i32>,
        stderr: String,
    },
    #[error("codec {id} is {actual}, expected {expected}")]
    KindMismatch {
        id: String,
        expected: CodecKind,
        actual: CodecKind,
    },
    #[error("blob was produced by codec {found:?}, not {expected:?}")]
    WrongCodec { expected: String, found: String },
    #[error("truncated stream")]
    Truncated,
    #[error("corrupt payload: {0}")]
    Corrupt(String),
    #[error("decoded length {actual} != recorded length {expected}")]
    LengthMismatch { expected: u64, actual: u64 },
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("input decreases at index {index}")]
    Decreasing { index: usize },
    #[error("input not strictly increasing at index {index}")]
    NotStrictlyIncreasing { index: usize },
    #[error("codec config: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for CodecError {
    fn from(e: std::io::Error) -> Self {
        CodecError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodecKind {
    Textual,
    Integer,
}

impl fmt::Display for CodecKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodecKind::Textual => "textual",
            CodecKind::Integer => "integer",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Store,
    TwoBit,
    Varint,
    Bic,
    Pfor,
}

impl Builtin {
    pub const ALL: [Builtin; 5] = [
        Builtin::Store,
        Builtin::TwoBit,
        Builtin::Varint,
        Builtin::Bic,
        Builtin::Pfor,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Builtin::Store => "store",
            Builtin::TwoBit => "twobit",
            Builtin::Varint => "varint",
            Builtin::Bic => "bic",
            Builtin::Pfor => "pfor",
        }
    }

    pub fn kind(self) -> CodecKind {
        match self {
            Builtin::Store | Builtin::TwoBit => CodecKind::Textual,
            Builtin::Varint | Builtin::Bic | Builtin::Pfor => CodecKind::Integer,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    Builtin(Builtin),
    External(ExternalTemplate),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodecSpec {
    pub id: String,
    pub kind: CodecKind,
    pub backend: Backend,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedBlob {
    pub codec_id: String,
    pub payload: Vec<u8>,
    /// Bytes for textual codecs, value count for integer codecs.
    pub original_len: u64,
}

impl CodecSpec {
    pub fn builtin(b: Builtin) -> Self {
        CodecSpec {
            id: b.id().to_string(),
            kind: b.kind(),
            backend: Backend::Builtin(b),
        }
    }

    pub fn external(id: &str, template: ExternalTemplate) -> Self {
        CodecSpec {
            id: id.to_string(),
            kind: CodecKind::Textual,
            backend: Backend::External(template),
        }
    }

    pub fn is_available(&self) -> bool {
        match &self.backend {
            Backend::Builtin(_) => true,
            Backend::External(t) => t.is_available(),
        }
    }

    /// True when the codec wants its textual input shaped as FASTA.
    pub fn wants_fasta(&self) -> bool {
        matches!(&self.backend, Backend::External(t) if t.fasta_input)
    }

    fn expect_kind(&self, expected: CodecKind) -> Result<(), CodecError> {
        if self.kind != expected {
            return Err(CodecError::KindMismatch {
                id: self.id.clone(),
                expected,
                actual: self.kind,
            });
        }
        Ok(())
    }

    fn check_blob(&self, blob: &CompressedBlob) -> Result<(), CodecError> {
        if blob.codec_id != self.id {
            return Err(CodecError::WrongCodec {
                expected: self.id.clone(),
                found: blob.codec_id.clone(),
            });
        }
        Ok(())
    }

    pub fn compress_bytes(&self, data: &[u8]) -> Result<CompressedBlob, CodecError> {
        self.expect_kind(CodecKind::Textual)?;
        let payload = match &self.backend {
            Backend::Builtin(Builtin::Store) => data.to_vec(),
            Backend::Builtin(Builtin::TwoBit) => twobit_encode(data),
            Backend::Builtin(_) => unreachable!("integer builtins rejected by kind check"),
            Backend::External(t) => t.compress_file(&self.id, data)?,
        };
        Ok(CompressedBlob {
            codec_id: self.id.clone(),
            payload,
            original_len: data.len() as u64,
        })
    }

    pub fn decompress_bytes(&self, blob: &CompressedBlob) -> Result<Vec<u8>, CodecError> {
        self.expect_kind(CodecKind::Textual)?;
        self.check_blob(blob)?;
        let data = match &self.backend {
            Backend::Builtin(Builtin::Store) => blob.payload.clone(),
            Backend::Builtin(Builtin::TwoBit) => twobit_decode(&blob.payload)?,
            Backend::Builtin(_) => unreachable!("integer builtins rejected by kind check"),
            Backend::External(t) => t.decompress_file(&self.id, &blob.payload)?,
        };
        if data.len() as u64 != blob.original_len {
            return Err(CodecError::LengthMismatch {
                expected: blob.original_len,
                actual: data.len() as u64,
            });
        }
        Ok(data)
    }

    /// Encodes an integer list. Textual codecs receive one decimal value per
    /// line.
    pub fn encode_values(&self, values: &[u64]) -> Result<CompressedBlob, CodecError> {
        let Backend::Builtin(b) = &self.backend else {
            return self.compress_bytes(&values_to_text(values));
        };
        let payload = match b {
            Builtin::Store | Builtin::TwoBit => {
                return self.compress_bytes(&values_to_text(values))
            }
            Builtin::Varint => varint_encode(values),
            Builtin::Bic => encode_bic_list(values)?,
            Builtin::Pfor => {
                let narrow = values
                    .iter()
                    .map(|&v| {
                        u32::try_from(v)
                            .map_err(|_| CodecError::OutOfRange(format!("{v} >= 2^32 for pfor")))
                    })
                    .collect::<Result<Vec<u32>, _>>()?;
                pfor_encode(&narrow)
            }
        };
        Ok(CompressedBlob {
            codec_id: self.id.clone(),
            payload,
            original_len: values.len() as u64,
        })
    }

    pub fn decode_values(&self, blob: &CompressedBlob) -> Result<Vec<u64>, CodecError> {
        self.check_blob(blob)?;
        let values = match (&self.backend, self.kind) {
            (_, CodecKind::Textual) => return text_to_values(&self.decompress_bytes(blob)?),
            (Backend::Builtin(Builtin::Varint), _) => varint_decode(&blob.payload)?,
            (Backend::Builtin(Builtin::Bic), _) => decode_bic_list(&blob.payload)?,
            (Backend::Builtin(Builtin::Pfor), _) => pfor_decode(&blob.payload)?
                .into_iter()
                .map(u64::from)
                .collect(),
            _ => unreachable!("integer codecs are builtin"),
        };
        if values.len() as u64 != blob.original_len {
            return Err(CodecError::LengthMismatch {
                expected: blob.original_len,
                actual: values.len() as u64,
            });
        }
        Ok(values)
    }
}

pub fn values_to_text(values: &[u64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.len() * 3);
    for v in values {
        out.extend_from_slice(v.to_string().as_bytes());
        out.push(b'\n');
    }
    out
}

pub fn text_to_values(text: &[u8]) -> Result<Vec<u64>, CodecError> {
    let text = std::str::from_utf8(text)
        .map_err(|_| CodecError::Corrupt("integer text is not UTF-8".into()))?;
    text.lines()
        .map(|l| {
            l.trim()
                .parse::<u64>()
                .map_err(|_| CodecError::Corrupt(format!("bad integer line {l:?}")))
        })
        .collect()
}

// Arbitrary lists become strictly increasing through shifted prefix sums:
// p_i = sum_{j<=i} (v_j + 1) - 1. Layout: varint n, varint p_{n-1}, bits.
fn encode_bic_list(values: &[u64]) -> Result<Vec<u8>, CodecError> {
    let mut prefix = Vec::with_capacity(values.len());
    let mut acc: u64 = 0;
    for &v in values {
        acc = acc
            .checked_add(v)
            .and_then(|a| a.checked_add(1))
            .ok_or_else(|| CodecError::OutOfRange("prefix sum overflows u64".into()))?;
        prefix.push(acc - 1);
    }
    let mut out = Vec::new();
    write_varint(&mut out, values.len() as u64);
    if let Some(&hi) = prefix.last() {
        write_varint(&mut out, hi);
        out.extend(bic_encode(&prefix, 0, hi)?.bytes);
    }
    Ok(out)
}

fn decode_bic_list(bytes: &[u8]) -> Result<Vec<u64>, CodecError> {
    let mut pos = 0;
    let n = read_varint(bytes, &mut pos)? as usize;
    if n == 0 {
        return Ok(Vec::new());
    }
    let hi = read_varint(bytes, &mut pos)?;
    let bits = BitStream {
        bytes: bytes[pos..].to_vec(),
        bit_len: (bytes.len() - pos) as u64 * 8,
    };
    let prefix = bic_decode(&bits, n, 0, hi)?;
    if prefix.last() != Some(&hi) {
        return Err(CodecError::Corrupt(
            "interpolative list does not end at its bound".into(),
        ));
    }
    let mut prev: Option<u64> = None;
    Ok(prefix
        .into_iter()
        .map(|p| {
            let v = match prev {
                None => p,
                Some(q) => p - q - 1,
            };
            prev = Some(p);
            v
        })
        .collect())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    codecs: BTreeMap<String, ConfigEntry>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigEntry {
    compress: Option<String>,
    decompress: Option<String>,
    suffix: Option<String>,
    fasta_input: Option<bool>,
}

/// Immutable id → codec table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodecRegistry {
    specs: BTreeMap<String, CodecSpec>,
}

impl Default for CodecRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl CodecRegistry {
    pub fn builtin() -> Self {
        let specs = Builtin::ALL
            .iter()
            .map(|&b| (b.id().to_string(), CodecSpec::builtin(b)))
            .collect();
        CodecRegistry { specs }
    }

    /// Builtins plus the adapters declared in a TOML document:
    ///
    /// ```toml
    /// [codecs.bzip2]          # known tool, default invocation
    /// [codecs.mytool]
    /// compress = "mytool -c {in} > {out}"
    /// decompress = "mytool -d -c {in} > {out}"
    /// suffix = ".my"
    /// fasta_input = false
    /// ```
    pub fn with_config_str(text: &str) -> Result<Self, CodecError> {
        let cfg: ConfigFile =
            toml::from_str(text).map_err(|e| CodecError::Config(e.to_string()))?;
        let mut reg = Self::builtin();
        for (id, entry) in cfg.codecs {
            if reg.specs.contains_key(&id) {
                return Err(CodecError::Config(format!("{id:?} is a builtin codec id")));
            }
            let defaults = ExternalTemplate::known(&id);
            let pick = |given: Option<String>, default: Option<&str>, field: &str| {
                given
                    .or_else(|| default.map(str::to_string))
                    .ok_or_else(|| CodecError::Config(format!("codec {id:?}: missing {field}")))
            };
            let template = ExternalTemplate {
                compress: pick(
                    entry.compress,
                    defaults.as_ref().map(|d| d.compress.as_str()),
                    "compress",
                )?,
                decompress: pick(
                    entry.decompress,
                    defaults.as_ref().map(|d| d.decompress.as_str()),
                    "decompress",
                )?,
                suffix: entry
                    .suffix
                    .or_else(|| defaults.as_ref().map(|d| d.suffix.clone()))
                    .unwrap_or_default(),
                fasta_input: entry
                    .fasta_input
                    .or(defaults.as_ref().map(|d| d.fasta_input))
                    .unwrap_or(false),
            };
            template.validate()?;
            reg.specs
                .insert(id.clone(), CodecSpec::external(&id, template));
        }
        Ok(reg)
    }

    pub fn from_config_file(path: &Path) -> Result<Self, CodecError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CodecError::Config(format!("{}: {e}", path.display())))?;
        Self::with_config_str(&text)
    }

    /// Reads the file named by `GDC_CODEC_CONFIG`, or builtins only when
    /// the variable is unset.
    pub fn from_env() -> Result<Self, CodecError> {
        match std::env::var_os(CODEC_CONFIG_ENV) {
            Some(p) if !p.is_empty() => Self::from_config_file(Path::new(&p)),
            _ => Ok(Self::builtin()),
        }
    }

    /// Fails with [`CodecError::Unavailable`] for ids that are neither
    /// builtin nor configured.
    pub fn get(&self, id: &str) -> Result<&CodecSpec, CodecError> {
        self.specs
            .get(id)
            .ok_or_else(|| CodecError::Unavailable(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.specs.keys().map(String::as_str)
    }

    pub fn ids_of_kind(&self, kind: CodecKind) -> Vec<&str> {
        self.specs
            .values()
            .filter(|s| s.kind == kind)
            .map(|s| s.id.as_str())
            .collect()
    }

    pub fn is_available(&self, id: &str) -> bool {
        self.specs.get(id).is_some_and(CodecSpec::is_available)
    }

    pub fn decompress_bytes(&self, blob: &CompressedBlob) -> Result<Vec<u8>, CodecError> {
        self.get(&blob.codec_id)?.decompress_bytes(blob)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reg() -> CodecRegistry {
        CodecRegistry::builtin()
    }

    #[test]
    fn store_and_twobit() {
        let store = reg().get("store").unwrap().clone();
        let blob = store.compress_bytes(b"ACGT").unwrap();
        assert_eq!(blob.payload, b"ACGT");
        assert_eq!(store.decompress_bytes(&blob).unwrap(), b"ACGT");

        let twobit = reg().get("twobit").unwrap().clone();
        let blob = twobit.compress_bytes(b"ACGT").unwrap();
        assert_eq!(blob.payload.len(), 3);
        assert_eq!(reg().decompress_bytes(&blob).unwrap(), b"ACGT");
    }

    #[test]
    fn length_mismatch_detected() {
        let store = CodecSpec::builtin(Builtin::Store);
        let mut blob = store.compress_bytes(b"ACGT").unwrap();
        blob.original_len = 5;
        assert_eq!(
            store.decompress_bytes(&blob),
            Err(CodecError::LengthMismatch {
                expected: 5,
                actual: 4
            })
        );
        let varint = CodecSpec::builtin(Builtin::Varint);
        let mut blob = varint.encode_values(&[1, 2]).unwrap();
        blob.original_len = 3;
        assert!(matches!(
            varint.decode_values(&blob),
            Err(CodecError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn kind_checks() {
        let varint = CodecSpec::builtin(Builtin::Varint);
        assert!(matches!(
            varint.compress_bytes(b"x"),
            Err(CodecError::KindMismatch { .. })
        ));
        let blob = CodecSpec::builtin(Builtin::Store)
            .compress_bytes(b"1\n")
            .unwrap();
        assert!(matches!(
            varint.decode_values(&blob),
            Err(CodecError::WrongCodec { .. })
        ));
    }

    #[test]
    fn pfor_rejects_wide_values() {
        let pfor = CodecSpec::builtin(Builtin::Pfor);
        assert!(matches!(
            pfor.encode_values(&[1 << 32]),
            Err(CodecError::OutOfRange(_))
        ));
    }

    #[test]
    fn bic_list_edge_cases() {
        let bic = CodecSpec::builtin(Builtin::Bic);
        for v in [
            vec![],
            vec![0],
            vec![0, 0, 0],
            vec![5, 0, 7, 7, 1],
            vec![u64::MAX - 1],
        ] {
            let blob = bic.encode_values(&v).unwrap();
            assert_eq!(bic.decode_values(&blob).unwrap(), v);
        }
        assert!(bic.encode_values(&[u64::MAX, 1]).is_err());
    }

    #[test]
    fn unknown_ids_are_unavailable() {
        assert_eq!(
            reg().get("zstd"),
            Err(CodecError::Unavailable("zstd".into()))
        );
        assert!(!reg().is_available("zstd"));
        assert_eq!(reg().ids().count(), 5);
        assert_eq!(reg().ids_of_kind(CodecKind::Textual), ["store", "twobit"]);
    }

    #[test]
    fn config_parsing() {
        let reg = CodecRegistry::with_config_str(
            "[codecs.bzip2]\n[codecs.copy]\ncompress = \"cp {in} {out}\"\ndecompress = \"cp {in} {out}\"\n",
        )
        .unwrap();
        let bz = reg.get("bzip2").unwrap();
        assert_eq!(bz.kind, CodecKind::Textual);
        assert!(matches!(&bz.backend, Backend::External(t) if t.suffix == ".bz2"));
        assert!(reg.is_available("copy"));

        assert!(CodecRegistry::with_config_str("[codecs.store]\n").is_err());
        assert!(CodecRegistry::with_config_str("[codecs.unknowntool]\n").is_err());
        assert!(CodecRegistry::with_config_str(
            "[codecs.x]\ncompress = \"a\"\ndecompress = \"b\"\n"
        )
        .is_err());
        assert!(CodecRegistry::with_config_str("bogus = 1\n").is_err());
    }

    #[test]
    fn external_bzip2_when_installed() {
        let reg = CodecRegistry::with_config_str("[codecs.bzip2]\n").unwrap();
        if !reg.is_available("bzip2") {
            eprintln!("bzip2 not installed, skipping");
            return;
        }
        let spec = reg.get("bzip2").unwrap();
        let data: Vec<u8> = b"ACGTTGCA\n".repeat(500);
        let blob = spec.compress_bytes(&data).unwrap();
        assert!(blob.payload.len() < data.len());
        assert_eq!(spec.decompress_bytes(&blob).unwrap(), data);
        let values: Vec<u64> = (0..1000).map(|i| i % 17).collect();
        let blob = spec.encode_values(&values).unwrap();
        assert_eq!(spec.decode_values(&blob).unwrap(), values);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn every_builtin_round_trips_values(values in proptest::collection::vec(0u64..1 << 31, 0..400)) {
            for b in Builtin::ALL {
                let spec = CodecSpec::builtin(b);
                let blob = spec.encode_values(&values).unwrap();
                prop_assert_eq!(spec.decode_values(&blob).unwrap(), values.clone());
            }
        }

        #[test]
        fn textual_builtins_are_deterministic(data in proptest::collection::vec(any::<u8>(), 0..400)) {
            for b in [Builtin::Store, Builtin::TwoBit] {
                let spec = CodecSpec::builtin(b);
                let blob = spec.compress_bytes(&data).unwrap();
                prop_assert_eq!(&blob, &spec.compress_bytes(&data).unwrap());
                prop_assert_eq!(spec.decompress_bytes(&blob).unwrap(), data.clone());
            }
        }
    }
}
