use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Case, PipelineError};
use crate::codecs::{Backend, CodecRegistry, CompressedBlob};

pub const FORMAT_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayloadEntry {
    pub role: String,
    pub file: String,
    pub codec: String,
    pub bytes: u64,
    pub original_len: u64,
    pub sha256: String,
}

/// Command lines used for external codecs, recorded for reproducibility.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalCommand {
    pub compress: String,
    pub decompress: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub case: Case,
    pub k: usize,
    pub codec_d: String,
    pub codec_f: String,
    pub use_gaps: bool,
    pub kmer_count: u64,
    pub payloads: Vec<PayloadEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub external_commands: BTreeMap<String, ExternalCommand>,
}

impl Manifest {
    pub fn payload(&self, role: &str) -> Result<&PayloadEntry, PipelineError> {
        self.payloads
            .iter()
            .find(|p| p.role == role)
            .ok_or_else(|| PipelineError::Manifest(format!("no {role:?} payload")))
    }
}

/// An archive directory: `manifest.json` plus one file per payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Archive {
    pub dir: PathBuf,
    pub manifest: Manifest,
}

pub(crate) fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

/// Collects payloads in memory and writes the archive in one go.
pub(crate) struct ArchiveWriter {
    manifest: Manifest,
    files: Vec<(String, Vec<u8>)>,
}

impl ArchiveWriter {
    pub(crate) fn new(
        case: Case,
        k: usize,
        codec_d: &str,
        codec_f: &str,
        use_gaps: bool,
        kmer_count: usize,
    ) -> Self {
        ArchiveWriter {
            manifest: Manifest {
                format_version: FORMAT_VERSION,
                case,
                k,
                codec_d: codec_d.to_string(),
                codec_f: codec_f.to_string(),
                use_gaps,
                kmer_count: kmer_count as u64,
                payloads: Vec::new(),
                external_commands: BTreeMap::new(),
            },
            files: Vec::new(),
        }
    }

    pub(crate) fn add(&mut self, role: &str, blob: CompressedBlob, registry: &CodecRegistry) {
        let file = format!("{role}.payload");
        if let Ok(spec) = registry.get(&blob.codec_id) {
            if let Backend::External(t) = &spec.backend {
                self.manifest.external_commands.insert(
                    spec.id.clone(),
                    ExternalCommand {
                        compress: t.compress.clone(),
                        decompress: t.decompress.clone(),
                    },
                );
            }
        }
        self.manifest.payloads.push(PayloadEntry {
            role: role.to_string(),
            file: file.clone(),
            codec: blob.codec_id,
            bytes: blob.payload.len() as u64,
            original_len: blob.original_len,
            sha256: sha256_hex(&blob.payload),
        });
        self.files.push((file, blob.payload));
    }

    pub(crate) fn write(self, dir: &Path) -> Result<Archive, PipelineError> {
        fs::create_dir_all(dir)?;
        for (name, data) in &self.files {
            fs::write(dir.join(name), data)?;
        }
        let json = serde_json::to_vec_pretty(&self.manifest)
            .map_err(|e| PipelineError::Manifest(e.to_string()))?;
        fs::write(dir.join(MANIFEST_FILE), json)?;
        Ok(Archive {
            dir: dir.to_path_buf(),
            manifest: self.manifest,
        })
    }
}

impl Archive {
    /// Reads and verifies the manifest and every payload.
    pub fn open(dir: &Path) -> Result<Archive, PipelineError> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read(&path)
            .map_err(|e| PipelineError::Manifest(format!("{}: {e}", path.display())))?;
        let manifest: Manifest =
            serde_json::from_slice(&text).map_err(|e| PipelineError::Manifest(e.to_string()))?;
        if manifest.format_version != FORMAT_VERSION {
            return Err(PipelineError::Manifest(format!(
                "unsupported format_version {}",
                manifest.format_version
            )));
        }
        let archive = Archive {
            dir: dir.to_path_buf(),
            manifest,
        };
        archive.verify()?;
        Ok(archive)
    }

    pub fn verify(&self) -> Result<(), PipelineError> {
        for p in &self.manifest.payloads {
            self.read_verified(p)?;
        }
        Ok(())
    }

    fn read_verified(&self, p: &PayloadEntry) -> Result<Vec<u8>, PipelineError> {
        let path = self.dir.join(&p.file);
        let data = fs::read(&path).map_err(|_| PipelineError::MissingPayload(p.file.clone()))?;
        if data.len() as u64 != p.bytes {
            return Err(PipelineError::SizeMismatch {
                file: p.file.clone(),
                expected: p.bytes,
                actual: data.len() as u64,
            });
        }
        if sha256_hex(&data) != p.sha256 {
            return Err(PipelineError::ChecksumMismatch(p.file.clone()));
        }
        Ok(data)
    }

    pub fn read_blob(&self, role: &str) -> Result<CompressedBlob, PipelineError> {
        let p = self.manifest.payload(role)?;
        Ok(CompressedBlob {
            codec_id: p.codec.clone(),
            payload: self.read_verified(p)?,
            original_len: p.original_len,
        })
    }
}

/// Sum of on-disk payload sizes, optionally with the manifest.
pub fn archive_size_bytes(a: &Archive, include_manifest: bool) -> Result<u64, PipelineError> {
    let mut total = 0;
    for p in &a.manifest.payloads {
        let meta = fs::metadata(a.dir.join(&p.file))
            .map_err(|_| PipelineError::MissingPayload(p.file.clone()))?;
        total += meta.len();
    }
    if include_manifest {
        total += fs::metadata(a.dir.join(MANIFEST_FILE))?.len();
    }
    Ok(total)
}
