//! Compression workbench for k-mer dictionaries.
//!
//! A dictionary is the pair `(D_k, F_k)`: the distinct canonical k-mers of a
//! collection of sequences and their occurrence counts. This crate counts
//! dictionaries, builds spectrum preserving string sets, stores dictionaries
//! under several compressed and succinct layouts, and benchmarks the layouts.

pub mod bench;
pub mod codecs;
pub mod kmer;
pub mod pipeline;
pub mod spss;
pub mod succinct;

pub use bench::{
    best_by, compare_base, emit_report, pareto_frontier, read_runs_csv, run_matrix, BaseCaseResult,
    BenchError, Dataset, MatrixSpec, Objective, ParetoPoint, RunRecord, Scenario, Status, Verdict,
};
pub use codecs::{CodecError, CodecKind, CodecRegistry, CodecSpec, CompressedBlob, GapFile};
pub use kmer::{count_kmers, Base, Kmer, KmerDictionary, KmerError};
pub use pipeline::{
    archive_size_bytes, compress, decompress, Archive, Case, Manifest, PipelineConfig,
    PipelineError,
};
pub use spss::{build_spss, recover_spectrum, spss_stats, Spss, SpssError, SpssStats};
pub use succinct::{
    FmIndex, IndexError, IndexMode, StaticFreqMap, SuccinctDictionary, SuccinctIndex,
};
