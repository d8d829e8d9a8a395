//! `gdc`: count, compress, index and benchmark k-mer dictionaries.
//!
//! Exit status is 0 on success, 1 for bad input or configuration and 2
//! when an internal consistency check fails.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use gdc::bench::{
    base_case_rows, points_from_records, render_svg, write_frontier_csv, Dataset, MatrixSpec,
};
use gdc::kmer::{
    parse_dictionary, parse_fasta, parse_standard_pairs, recanonicalize_standard_to_dsk,
};
use gdc::{
    build_spss, compare_base, count_kmers, emit_report, pareto_frontier, read_runs_csv, run_matrix,
    Archive, BenchError, Case, CodecKind, CodecRegistry, IndexError, Kmer, KmerDictionary,
    PipelineConfig, PipelineError, SuccinctDictionary,
};

#[derive(Parser)]
#[command(
    name = "gdc",
    version,
    about = "Compression workbench for genomic k-mer dictionaries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count canonical k-mers of a FASTA file into a dictionary file
    Count(CountArgs),
    /// Build a spectrum preserving string set from a dictionary
    Spss(SpssArgs),
    /// Compress a dictionary into an archive directory
    Compress(CompressArgs),
    /// Restore a dictionary from an archive directory
    Decompress(DecompressArgs),
    /// Look up a canonical k-mer in a succinct archive
    Query(QueryArgs),
    /// Run a configuration matrix on a FASTA file and write reports
    Bench(BenchArgs),
    /// Pareto frontier of a runs.csv file
    Pareto(ParetoArgs),
    /// Base-case ratios m/g and t1/t2
    CompareBase(CompareBaseArgs),
}

#[derive(Args)]
struct CountArgs {
    /// FASTA input, or a KMC text dump with --from-kmc3
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    out: PathBuf,
    /// Input is `<KMER> <COUNT>` lines canonical under A<C<G<T
    #[arg(long)]
    from_kmc3: bool,
}

#[derive(Args)]
struct SpssArgs {
    #[arg(long)]
    dict: PathBuf,
    /// Needed only when the dictionary file is empty
    #[arg(long)]
    k: Option<usize>,
    /// FASTA output
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompressArgs {
    #[arg(long)]
    dict: PathBuf,
    /// DP0, DP1, DP2, DP3, Explicit or Implicit
    #[arg(long)]
    case: Case,
    #[arg(long)]
    codec_d: String,
    #[arg(long)]
    codec_f: String,
    /// Store the sorted frequency stream as gaps (DP2 only)
    #[arg(long)]
    gaps: bool,
    /// Needed only when the dictionary file is empty
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecompressArgs {
    #[arg(long)]
    archive: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    /// Archive built with --case Explicit or Implicit
    #[arg(long)]
    index: PathBuf,
    #[arg(long)]
    kmer: String,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated list of k values
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<usize>,
    /// Comma-separated cases; all six by default
    #[arg(long, value_delimiter = ',')]
    cases: Vec<Case>,
    /// Codecs for D_k, S or the index; builtin textual codecs by default
    #[arg(long, value_delimiter = ',')]
    codec_d: Vec<String>,
    /// Codecs for F_k or the frequency map; all builtin codecs by default
    #[arg(long, value_delimiter = ',')]
    codec_f: Vec<String>,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Also run DP2 with gap files
    #[arg(long)]
    gaps: bool,
    /// Also run the base cases on the genome itself
    #[arg(long)]
    base: bool,
    /// Run configurations concurrently
    #[arg(long)]
    parallel: bool,
    #[arg(long)]
    log_x: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ParetoArgs {
    #[arg(long)]
    runs: PathBuf,
    /// Directory for frontier.csv and pareto.svg
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    log_x: bool,
}

#[derive(Args)]
struct CompareBaseArgs {
    /// Bytes of the dictionary artifact
    #[arg(long, requires_all = ["g", "t1", "t2"], conflicts_with = "runs")]
    m: Option<f64>,
    /// Bytes of the stored genome
    #[arg(long)]
    g: Option<f64>,
    /// Post-processing seconds of the dictionary case
    #[arg(long)]
    t1: Option<f64>,
    /// Seconds to decompress the genome and recount
    #[arg(long)]
    t2: Option<f64>,
    /// Derive every comparison from a runs.csv file instead
    #[arg(long, required_unless_present = "m")]
    runs: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_internal(&e) { 2 } else { 1 })
        }
    }
}

fn is_internal(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<PipelineError>()
            .is_some_and(PipelineError::is_internal)
            || c.downcast_ref::<BenchError>()
                .is_some_and(BenchError::is_internal)
            || c.downcast_ref::<IndexError>()
                .is_some_and(IndexError::is_internal)
    })
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Count(a) => count(a),
        Command::Spss(a) => spss(a),
        Command::Compress(a) => compress(a),
        Command::Decompress(a) => decompress(a),
        Command::Query(a) => query(a),
        Command::Bench(a) => bench(a),
        Command::Pareto(a) => pareto(a),
        Command::CompareBase(a) => compare(a),
    }
}

fn registry() -> Result<CodecRegistry> {
    CodecRegistry::from_env().context("loading codec configuration")
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

fn write_file(path: &Path, data: &[u8]) -> Result<()> {
    fs::write(path, data).with_context(|| format!("writing {}", path.display()))
}

/// Reads a dictionary file, taking k from the first entry unless given.
fn read_dictionary(path: &Path, k: Option<usize>) -> Result<KmerDictionary> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let first = text.lines().find(|l| !l.trim().is_empty());
    let k = match (k, first) {
        (Some(k), _) => k,
        (None, Some(line)) => line.split(' ').next().unwrap_or("").len(),
        (None, None) => bail!("{} is empty; pass --k", path.display()),
    };
    parse_dictionary(text.as_bytes(), k).with_context(|| format!("parsing {}", path.display()))
}

fn count(a: CountArgs) -> Result<()> {
    let d = if a.from_kmc3 {
        let pairs = parse_standard_pairs(open(&a.input)?, a.k)?;
        recanonicalize_standard_to_dsk(a.k, pairs)?
    } else {
        let records = parse_fasta(open(&a.input)?)
            .with_context(|| format!("reading {}", a.input.display()))?;
        let seqs: Vec<&[u8]> = records.iter().map(|r| r.seq.as_slice()).collect();
        count_kmers(&seqs, a.k).with_context(|| format!("counting {}", a.input.display()))?
    };
    write_file(&a.out, &d.to_text())
}

fn spss(a: SpssArgs) -> Result<()> {
    let d = read_dictionary(&a.dict, a.k)?;
    let s = build_spss(&d)?;
    let mut out = BufWriter::new(
        File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?,
    );
    s.write_fasta(&mut out)?;
    out.flush()?;
    Ok(())
}

fn compress(a: CompressArgs) -> Result<()> {
    let d = read_dictionary(&a.dict, a.k)?;
    let cfg = PipelineConfig::new(a.case, &a.codec_d, &a.codec_f).with_gaps(a.gaps);
    gdc::compress(&d, &cfg, &registry()?, &a.out)?;
    Ok(())
}

fn decompress(a: DecompressArgs) -> Result<()> {
    let archive = Archive::open(&a.archive)?;
    let d = gdc::decompress(&archive, &registry()?)?;
    write_file(&a.out, &d.to_text())
}

fn query(a: QueryArgs) -> Result<()> {
    let archive = Archive::open(&a.index)?;
    let sd = SuccinctDictionary::load(&archive, &registry()?)?;
    let q: Kmer = a.kmer.to_ascii_uppercase().parse()?;
    match sd.query(&q)? {
        Some(f) => println!("{f}"),
        None => println!("absent"),
    }
    Ok(())
}

fn bench(a: BenchArgs) -> Result<()> {
    let registry = registry()?;
    let dataset = Dataset::from_path(&a.input)?;
    let cases = if a.cases.is_empty() {
        Case::COMPRESSED
            .iter()
            .chain(&Case::SUCCINCT)
            .copied()
            .collect()
    } else {
        a.cases
    };
    let codecs_d = if a.codec_d.is_empty() {
        registry
            .ids_of_kind(CodecKind::Textual)
            .into_iter()
            .filter(|id| registry.is_available(id))
            .map(String::from)
            .collect()
    } else {
        a.codec_d
    };
    let codecs_f = if a.codec_f.is_empty() {
        registry
            .ids()
            .filter(|id| registry.is_available(id))
            .map(String::from)
            .collect()
    } else {
        a.codec_f
    };
    let spec = MatrixSpec {
        k_list: a.k,
        cases,
        codecs_d,
        codecs_f,
        with_gaps: a.gaps,
        with_base: a.base,
        repetitions: a.reps,
        parallel: a.parallel,
    };
    let run = run_matrix(&dataset, &spec, &registry)?;
    let files = emit_report(&run.records, None, &a.out, a.log_x)?;
    let ok = run
        .records
        .iter()
        .filter(|r| r.status == gdc::Status::Ok)
        .count();
    println!(
        "{} configurations, {ok} ok, {} skipped; reports in {}",
        run.records.len(),
        run.records.len() - ok,
        files.runs_csv.parent().unwrap_or(Path::new(".")).display()
    );
    Ok(())
}

fn pareto(a: ParetoArgs) -> Result<()> {
    let records =
        read_runs_csv(open(&a.runs)?).with_context(|| format!("reading {}", a.runs.display()))?;
    let points = points_from_records(&records);
    let frontier = pareto_frontier(&points)?;
    fs::create_dir_all(&a.out)?;
    write_frontier_csv(File::create(a.out.join("frontier.csv"))?, &frontier)?;
    write_file(
        &a.out.join("pareto.svg"),
        render_svg(&points, &frontier, a.log_x).as_bytes(),
    )?;
    for p in &frontier {
        println!("{}\t{}\t{}", p.bytes, p.time_s, p.label);
    }
    Ok(())
}

fn compare(a: CompareBaseArgs) -> Result<()> {
    if let Some(path) = a.runs {
        let records =
            read_runs_csv(open(&path)?).with_context(|| format!("reading {}", path.display()))?;
        let rows = base_case_rows(&records)?;
        if rows.is_empty() {
            bail!(
                "{} has no pair of dictionary and base records to compare",
                path.display()
            );
        }
        println!("k\tscenario\tcase\tbase\tm\tg\tratio_c\tverdict_c\tt1\tt2\tratio_t\tverdict_t");
        for r in rows {
            let c = r.result;
            println!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.k,
                r.scenario,
                r.case,
                r.base_label,
                c.m,
                c.g,
                c.ratio_c,
                c.verdict_c,
                c.t1,
                c.t2,
                c.ratio_t,
                c.verdict_t
            );
        }
        return Ok(());
    }
    let (Some(m), Some(g), Some(t1), Some(t2)) = (a.m, a.g, a.t1, a.t2) else {
        bail!("pass --m, --g, --t1 and --t2, or --runs");
    };
    let c = compare_base(m, g, t1, t2)?;
    println!("ratio_c\t{}\t{}", c.ratio_c, c.verdict_c);
    println!("ratio_t\t{}\t{}", c.ratio_t, c.verdict_t);
    Ok(())
}
