//! Configuration matrix runner and reporting.
//!
//! [`run_matrix`] times every (k, case, codec pair) on a dataset and, when
//! asked, the base cases that store the genome itself: `BaseCD` compresses
//! the FASTA text, `BaseSD` indexes it. Post-processing of a base case is
//! decompression followed by a recount.

mod pareto;
mod report;

pub use pareto::{
    best_by, compare_base, format_sci, pareto_frontier, points_from_records, BaseCaseResult,
    Objective, ParetoPoint, Verdict,
};
pub use report::{
    emit_report, read_frontier_csv, read_runs_csv, render_svg, write_frontier_csv, write_runs_csv,
    BaseCaseRow, Report, ReportFiles, REPORT_SCHEMA_VERSION,
};

use std::fmt;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::codecs::{CodecError, CodecKind, CodecRegistry};
use crate::kmer::{count_kmers, parse_fasta, write_fasta, FastaRecord, KmerDictionary, KmerError};
use crate::pipeline::{self, archive_size_bytes, Case, PipelineConfig, PipelineError};
use crate::succinct::FmIndex;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{0}")]
    Empty(&'static str),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("denominator must be positive: {0}")]
    NonPositive(String),
    #[error("no ok records")]
    NoOkRecords,
    #[error("dataset: {0}")]
    Dataset(#[from] KmerError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("round trip mismatch for {0}")]
    RoundTrip(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl BenchError {
    pub fn is_internal(&self) -> bool {
        match self {
            BenchError::RoundTrip(_) => true,
            BenchError::Pipeline(e) => e.is_internal(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "CD")]
    Cd,
    #[serde(rename = "SD")]
    Sd,
    BaseCD,
    BaseSD,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Cd => "CD",
            Scenario::Sd => "SD",
            Scenario::BaseCD => "BaseCD",
            Scenario::BaseSD => "BaseSD",
        }
    }

    pub fn is_base(self) -> bool {
        matches!(self, Scenario::BaseCD | Scenario::BaseSD)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Skipped,
}

/// One row of `runs.csv`. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub dataset_id: String,
    pub k: usize,
    pub scenario: Scenario,
    #[serde(serialize_with = "ser_case", deserialize_with = "de_case")]
    pub case: Option<Case>,
    pub codec_d: String,
    pub codec_f: String,
    pub use_gaps: bool,
    pub bytes_out: Option<u64>,
    pub pre_time_s: Option<f64>,
    pub post_time_s: Option<f64>,
    pub status: Status,
    pub reason: String,
}

fn ser_case<S: Serializer>(case: &Option<Case>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(case.map_or("n/a", Case::name))
}

fn de_case<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Case>, D::Error> {
    let s = String::deserialize(d)?;
    if s == "n/a" {
        return Ok(None);
    }
    s.parse().map(Some).map_err(serde::de::Error::custom)
}

impl RunRecord {
    /// Configuration label, e.g. `DP3(twobit(S), bic(Fk))` or `Base(xz(G))`.
    pub fn label(&self) -> String {
        match (self.scenario, self.case) {
            (Scenario::BaseCD, _) => format!("Base({}(G))", self.codec_d),
            (Scenario::BaseSD, _) => format!("BaseSD({}(Index))", self.codec_d),
            (_, Some(case)) => PipelineConfig::new(case, &self.codec_d, &self.codec_f)
                .with_gaps(self.use_gaps)
                .label(),
            (_, None) => format!("{}({}, {})", self.scenario, self.codec_d, self.codec_f),
        }
    }

    /// Scenario plus case, used to group runner-ups in [`best_by`].
    pub fn family(&self) -> String {
        match self.case {
            Some(c) => format!("{}/{}", self.scenario, c),
            None => self.scenario.to_string(),
        }
    }

    fn skipped(base: RunRecord, reason: String) -> RunRecord {
        RunRecord {
            status: Status::Skipped,
            reason,
            ..base
        }
    }
}

/// A genome: sequences upper-cased, identified by a hash of its FASTA text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub id: String,
    pub records: Vec<FastaRecord>,
}

impl Dataset {
    pub fn from_fasta_bytes(bytes: &[u8]) -> Result<Dataset, BenchError> {
        let mut records = parse_fasta(bytes)?;
        for r in &mut records {
            r.seq.make_ascii_uppercase();
        }
        Ok(Dataset {
            id: content_id(bytes),
            records,
        })
    }

    pub fn from_path(path: &Path) -> Result<Dataset, BenchError> {
        Self::from_fasta_bytes(&std::fs::read(path)?)
    }

    pub fn from_sequences<S: AsRef<[u8]>>(seqs: &[S]) -> Dataset {
        let records: Vec<FastaRecord> = seqs
            .iter()
            .enumerate()
            .map(|(i, s)| FastaRecord {
                header: i.to_string(),
                seq: s.as_ref().to_ascii_uppercase(),
            })
            .collect();
        let mut d = Dataset {
            id: String::new(),
            records,
        };
        d.id = content_id(&d.fasta());
        d
    }

    pub fn fasta(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        write_fasta(&mut buf, &self.records).expect("write to Vec");
        buf
    }

    pub fn sequences(&self) -> Vec<&[u8]> {
        self.records.iter().map(|r| r.seq.as_slice()).collect()
    }

    pub fn genome_chars(&self) -> u64 {
        self.records.iter().map(|r| r.seq.len() as u64).sum()
    }

    pub fn count(&self, k: usize) -> Result<KmerDictionary, KmerError> {
        count_kmers(&self.sequences(), k)
    }
}

/// First 16 hex digits of the SHA-256 of `bytes`.
pub fn content_id(bytes: &[u8]) -> String {
    hex::encode(&Sha256::digest(bytes)[..8])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixSpec {
    pub k_list: Vec<usize>,
    pub cases: Vec<Case>,
    pub codecs_d: Vec<String>,
    pub codecs_f: Vec<String>,
    /// Adds a gap-file variant of every DP2 configuration.
    pub with_gaps: bool,
    /// Adds `BaseCD` and `BaseSD` records, one per textual codec in `codecs_d`.
    pub with_base: bool,
    pub repetitions: usize,
    /// Runs configurations concurrently; times are then less faithful.
    pub parallel: bool,
}

impl MatrixSpec {
    pub fn new(k_list: Vec<usize>, cases: Vec<Case>, codecs_d: &[&str], codecs_f: &[&str]) -> Self {
        MatrixSpec {
            k_list,
            cases,
            codecs_d: codecs_d.iter().map(|s| s.to_string()).collect(),
            codecs_f: codecs_f.iter().map(|s| s.to_string()).collect(),
            with_gaps: false,
            with_base: false,
            repetitions: 3,
            parallel: false,
        }
    }
}

/// Every timing taken for one record, in repetition order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingSamples {
    pub label: String,
    pub k: usize,
    pub pre_s: Vec<f64>,
    pub post_s: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRun {
    pub records: Vec<RunRecord>,
    pub samples: Vec<TimingSamples>,
}

#[derive(Debug, Clone)]
enum Job {
    Pipeline(PipelineConfig),
    BaseCd(String),
    BaseSd(String),
}

pub fn median(samples: &[f64]) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => v[n / 2],
        _ => (v[n / 2 - 1] + v[n / 2]) / 2.0,
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

pub fn run_matrix(
    dataset: &Dataset,
    spec: &MatrixSpec,
    registry: &CodecRegistry,
) -> Result<MatrixRun, BenchError> {
    let reps = spec.repetitions.max(1);
    let mut records = Vec::new();
    let mut samples = Vec::new();
    for &k in &spec.k_list {
        let truth = dataset.count(k)?;
        let mut jobs = Vec::new();
        for &case in &spec.cases {
            for d in &spec.codecs_d {
                for f in &spec.codecs_f {
                    jobs.push(Job::Pipeline(PipelineConfig::new(case, d, f)));
                    if spec.with_gaps && case == Case::Dp2 {
                        jobs.push(Job::Pipeline(
                            PipelineConfig::new(case, d, f).with_gaps(true),
                        ));
                    }
                }
            }
        }
        if spec.with_base {
            for d in &spec.codecs_d {
                jobs.push(Job::BaseCd(d.clone()));
                jobs.push(Job::BaseSd(d.clone()));
            }
        }
        let run = |job: &Job| run_job(dataset, k, &truth, job, registry, reps);
        let results: Vec<_> = if spec.parallel {
            jobs.par_iter().map(run).collect::<Result<_, _>>()?
        } else {
            jobs.iter().map(run).collect::<Result<_, _>>()?
        };
        for (r, s) in results {
            records.push(r);
            samples.extend(s);
        }
    }
    Ok(MatrixRun { records, samples })
}

/// Errors from a configuration that the user chose badly (unavailable or
/// mismatched codec, case constraints) turn the record into a skip.
fn skip_reason(e: &PipelineError) -> Option<String> {
    if e.is_internal() {
        return None;
    }
    match e {
        PipelineError::Codec(CodecError::Unavailable(id)) => {
            Some(format!("codec unavailable: {id}"))
        }
        PipelineError::Io(_) => None,
        other => Some(other.to_string()),
    }
}

fn run_job(
    dataset: &Dataset,
    k: usize,
    truth: &KmerDictionary,
    job: &Job,
    registry: &CodecRegistry,
    reps: usize,
) -> Result<(RunRecord, Option<TimingSamples>), BenchError> {
    let template = |scenario, case, codec_d: &str, codec_f: &str, use_gaps| RunRecord {
        dataset_id: dataset.id.clone(),
        k,
        scenario,
        case,
        codec_d: codec_d.to_string(),
        codec_f: codec_f.to_string(),
        use_gaps,
        bytes_out: None,
        pre_time_s: None,
        post_time_s: None,
        status: Status::Ok,
        reason: String::new(),
    };
    let base = match job {
        Job::Pipeline(cfg) => template(
            if cfg.case.is_succinct() {
                Scenario::Sd
            } else {
                Scenario::Cd
            },
            Some(cfg.case),
            &cfg.codec_d,
            &cfg.codec_f,
            cfg.use_gaps,
        ),
        Job::BaseCd(c) => template(Scenario::BaseCD, None, c, "n/a", false),
        Job::BaseSd(c) => template(Scenario::BaseSD, None, c, "n/a", false),
    };

    let mut pre = Vec::with_capacity(reps);
    let mut post = Vec::with_capacity(reps);
    let mut bytes = 0;
    for _ in 0..reps {
        let attempt = match job {
            Job::Pipeline(cfg) => pipeline_once(dataset, k, truth, cfg, registry),
            Job::BaseCd(c) => base_cd_once(dataset, k, truth, c, registry),
            Job::BaseSd(c) => base_sd_once(dataset, k, truth, c, registry),
        };
        match attempt {
            Ok((b, t_pre, t_post)) => {
                bytes = b;
                pre.push(t_pre);
                post.push(t_post);
            }
            Err(BenchError::Pipeline(e)) => match skip_reason(&e) {
                Some(reason) => return Ok((RunRecord::skipped(base, reason), None)),
                None => return Err(e.into()),
            },
            Err(e) => return Err(e),
        }
    }
    let record = RunRecord {
        bytes_out: Some(bytes),
        pre_time_s: Some(median(&pre)),
        post_time_s: Some(median(&post)),
        ..base
    };
    let samples = TimingSamples {
        label: record.label(),
        k,
        pre_s: pre,
        post_s: post,
    };
    Ok((record, Some(samples)))
}

fn pipeline_once(
    dataset: &Dataset,
    k: usize,
    truth: &KmerDictionary,
    cfg: &PipelineConfig,
    registry: &CodecRegistry,
) -> Result<(u64, f64, f64), BenchError> {
    let dir = tempfile::tempdir()?;
    let (archive, t_pre) = timed(|| -> Result<_, BenchError> {
        let d = dataset.count(k)?;
        Ok(pipeline::compress(&d, cfg, registry, dir.path())?)
    });
    let archive = archive?;
    let bytes = archive_size_bytes(&archive, false)?;
    let (restored, t_post) = timed(|| pipeline::decompress(&archive, registry));
    if &restored? != truth {
        return Err(BenchError::RoundTrip(cfg.label()));
    }
    Ok((bytes, t_pre, t_post))
}

fn base_cd_once(
    dataset: &Dataset,
    k: usize,
    truth: &KmerDictionary,
    codec: &str,
    registry: &CodecRegistry,
) -> Result<(u64, f64, f64), BenchError> {
    let spec = crate::pipeline::textual_codec(registry, codec)?;
    let text = dataset.fasta();
    let (blob, t_pre) = timed(|| spec.compress_bytes(&text));
    let blob = blob.map_err(PipelineError::from)?;
    let (counted, t_post) = timed(|| -> Result<_, BenchError> {
        let raw = spec.decompress_bytes(&blob).map_err(PipelineError::from)?;
        Ok(Dataset::from_fasta_bytes(&raw)?.count(k)?)
    });
    if &counted? != truth {
        return Err(BenchError::RoundTrip(format!("Base({codec}(G))")));
    }
    Ok((blob.payload.len() as u64, t_pre, t_post))
}

/// ACGT runs of every sequence; anything else splits a fragment, which
/// leaves the counted spectrum unchanged.
fn acgt_fragments(dataset: &Dataset) -> Vec<&[u8]> {
    dataset
        .records
        .iter()
        .flat_map(|r| r.seq.split(|b| !matches!(b, b'A' | b'C' | b'G' | b'T')))
        .filter(|s| !s.is_empty())
        .collect()
}

fn base_sd_once(
    dataset: &Dataset,
    k: usize,
    truth: &KmerDictionary,
    codec: &str,
    registry: &CodecRegistry,
) -> Result<(u64, f64, f64), BenchError> {
    let spec = crate::pipeline::textual_codec(registry, codec)?;
    if spec.kind != CodecKind::Textual || spec.wants_fasta() {
        return Err(PipelineError::from(CodecError::Config(format!(
            "codec {codec} cannot hold an index image"
        )))
        .into());
    }
    let (blob, t_pre) = timed(|| -> Result<_, BenchError> {
        let fragments = acgt_fragments(dataset);
        let image = if fragments.is_empty() {
            Vec::new()
        } else {
            FmIndex::build(&fragments)
                .map_err(PipelineError::from)?
                .to_bytes()
        };
        Ok(spec.compress_bytes(&image).map_err(PipelineError::from)?)
    });
    let blob = blob?;
    let (counted, t_post) = timed(|| -> Result<_, BenchError> {
        let image = spec.decompress_bytes(&blob).map_err(PipelineError::from)?;
        if image.is_empty() {
            return Ok(KmerDictionary::empty(k)?);
        }
        let fm = FmIndex::from_bytes(&image).map_err(PipelineError::from)?;
        Ok(count_kmers(&fm.extract(), k)?)
    });
    if &counted? != truth {
        return Err(BenchError::RoundTrip(format!("BaseSD({codec}(Index))")));
    }
    Ok((blob.payload.len() as u64, t_pre, t_post))
}

/// Base-case comparison for every (k, scenario, case) with ok records: `m`
/// and `t1` are the best size and best post time of the case; `g` and `t2`
/// come from the smallest base record of the matching base scenario.
pub fn base_case_rows(records: &[RunRecord]) -> Result<Vec<BaseCaseRow>, BenchError> {
    let ok: Vec<&RunRecord> = records
        .iter()
        .filter(|r| r.status == Status::Ok && r.bytes_out.is_some() && r.post_time_s.is_some())
        .collect();
    let mut keys: Vec<(usize, Scenario, Case)> = ok
        .iter()
        .filter(|r| !r.scenario.is_base())
        .filter_map(|r| Some((r.k, r.scenario, r.case?)))
        .collect();
    keys.sort_by_key(|&(k, s, c)| (k, s.name(), c));
    keys.dedup();

    let mut rows = Vec::new();
    for (k, scenario, case) in keys {
        let base_scenario = if scenario == Scenario::Sd {
            Scenario::BaseSD
        } else {
            Scenario::BaseCD
        };
        let Some(base) = ok
            .iter()
            .filter(|r| r.k == k && r.scenario == base_scenario)
            .min_by(|a, b| {
                a.bytes_out
                    .cmp(&b.bytes_out)
                    .then_with(|| a.label().cmp(&b.label()))
            })
        else {
            continue;
        };
        let of_case = ok
            .iter()
            .filter(|r| r.k == k && r.scenario == scenario && r.case == Some(case));
        let m = of_case
            .clone()
            .filter_map(|r| r.bytes_out)
            .min()
            .expect("non-empty");
        let t1 = of_case
            .filter_map(|r| r.post_time_s)
            .fold(f64::INFINITY, f64::min);
        let result = compare_base(
            m as f64,
            base.bytes_out.unwrap() as f64,
            t1,
            base.post_time_s.unwrap(),
        )?;
        rows.push(BaseCaseRow {
            k,
            scenario,
            case: case.name().to_string(),
            base_label: base.label(),
            result,
        });
    }
    Ok(rows)
}
