use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn gdc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gdc"))
        .args(args)
        .env_remove("GDC_CODEC_CONFIG")
        .output()
        .expect("run gdc")
}

fn gdc_env(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gdc"))
        .args(args)
        .env("GDC_CODEC_CONFIG", config)
        .output()
        .expect("run gdc")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, data: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, data).unwrap();
    p
}

fn genome(len: usize) -> String {
    let mut x = 0x1234_5678u64;
    let seq: String = (0..len)
        .map(|_| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            ['A', 'C', 'G', 'T'][(x % 4) as usize]
        })
        .collect();
    format!(">g\n{seq}\n")
}

#[test]
fn count_small_genome() {
    let dir = tempfile::tempdir().unwrap();
    let fa = write(dir.path(), "g.fa", ">x\nACGT\n");
    let out = dir.path().join("d.txt");
    let o = gdc(&["count", "--input", s(&fa), "--k", "2", "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&out).unwrap(), "AC 2\nCG 1\n");
}

#[test]
fn count_empty_and_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "e.fa", ">x\n\n");
    let out = dir.path().join("d.txt");
    let o = gdc(&["count", "--input", s(&empty), "--k", "4", "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&out).unwrap(), "");

    let bad = write(dir.path(), "b.fa", ">x\nACXT\n");
    let o = gdc(&["count", "--input", s(&bad), "--k", "2", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("invalid character"), "{}", stderr(&o));
}

#[test]
fn count_from_kmc3_dump() {
    let dir = tempfile::tempdir().unwrap();
    // GA is the A<C<G<T representative of {GA, TC}; under A<C<T<G it is TC
    let dump = write(dir.path(), "kmc.txt", "AC\t2\nGA\t3\n");
    let out = dir.path().join("d.txt");
    let o = gdc(&[
        "count",
        "--input",
        s(&dump),
        "--k",
        "2",
        "--out",
        s(&out),
        "--from-kmc3",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&out).unwrap(), "AC 2\nTC 3\n");
}

#[test]
fn dp0_round_trip_is_byte_exact() {
    let dir = tempfile::tempdir().unwrap();
    let dict = write(dir.path(), "d.txt", "AC 2\nCG 1\n");
    let arc = dir.path().join("a");
    let o = gdc(&[
        "compress",
        "--dict",
        s(&dict),
        "--case",
        "DP0",
        "--codec-d",
        "store",
        "--codec-f",
        "store",
        "--out",
        s(&arc),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let back = dir.path().join("r.txt");
    let o = gdc(&["decompress", "--archive", s(&arc), "--out", s(&back)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read(&back).unwrap(), fs::read(&dict).unwrap());
}

#[test]
fn dp3_round_trip_on_generated_genome() {
    let dir = tempfile::tempdir().unwrap();
    let fa = write(dir.path(), "g.fa", &genome(3000));
    let dict = dir.path().join("d.txt");
    assert!(
        gdc(&["count", "--input", s(&fa), "--k", "11", "--out", s(&dict)])
            .status
            .success()
    );
    let arc = dir.path().join("a");
    let o = gdc(&[
        "compress",
        "--dict",
        s(&dict),
        "--case",
        "DP3",
        "--codec-d",
        "twobit",
        "--codec-f",
        "varint",
        "--out",
        s(&arc),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let back = dir.path().join("r.txt");
    assert!(
        gdc(&["decompress", "--archive", s(&arc), "--out", s(&back)])
            .status
            .success()
    );
    assert_eq!(fs::read(&back).unwrap(), fs::read(&dict).unwrap());

    let spss = dir.path().join("s.fa");
    assert!(gdc(&["spss", "--dict", s(&dict), "--out", s(&spss)])
        .status
        .success());
    assert!(fs::read_to_string(&spss).unwrap().starts_with(">0\n"));
}

#[test]
fn unconfigured_external_codec_is_unavailable() {
    let dir = tempfile::tempdir().unwrap();
    let dict = write(dir.path(), "d.txt", "AC 2\nCG 1\n");
    let arc = dir.path().join("a");
    let o = gdc(&[
        "compress",
        "--dict",
        s(&dict),
        "--case",
        "DP0",
        "--codec-d",
        "zstd",
        "--codec-f",
        "store",
        "--out",
        s(&arc),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("codec unavailable"), "{}", stderr(&o));
}

#[test]
fn tampered_archive_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let dict = write(dir.path(), "d.txt", "AC 2\nCG 1\n");
    let arc = dir.path().join("a");
    gdc(&[
        "compress",
        "--dict",
        s(&dict),
        "--case",
        "DP1",
        "--codec-d",
        "store",
        "--codec-f",
        "store",
        "--out",
        s(&arc),
    ]);
    fs::write(arc.join("f.payload"), "9\n9\n").unwrap();
    let o = gdc(&[
        "decompress",
        "--archive",
        s(&arc),
        "--out",
        s(&dir.path().join("r.txt")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("checksum"), "{}", stderr(&o));
}

#[test]
fn query_implicit_index() {
    let dir = tempfile::tempdir().unwrap();
    let dict = write(dir.path(), "d.txt", "AC 2\nCG 1\n");
    let ix = dir.path().join("ix");
    let o = gdc(&[
        "compress",
        "--dict",
        s(&dict),
        "--case",
        "Implicit",
        "--codec-d",
        "store",
        "--codec-f",
        "store",
        "--out",
        s(&ix),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));

    let o = gdc(&["query", "--index", s(&ix), "--kmer", "AC"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "2\n");
    let o = gdc(&["query", "--index", s(&ix), "--kmer", "AA"]);
    assert_eq!(stdout(&o), "absent\n");
    let o = gdc(&["query", "--index", s(&ix), "--kmer", "GT"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("query must be canonical"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn compare_base_manual() {
    let o = gdc(&[
        "compare-base",
        "--m",
        "50",
        "--g",
        "100",
        "--t1",
        "2",
        "--t2",
        "4",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "ratio_c\t0.5\tY\nratio_t\t0.5\tY\n");
    let o = gdc(&[
        "compare-base",
        "--m",
        "100",
        "--g",
        "100",
        "--t1",
        "1",
        "--t2",
        "1",
    ]);
    assert_eq!(stdout(&o), "ratio_c\t1\tN\nratio_t\t1\tN\n");
    let o = gdc(&[
        "compare-base",
        "--m",
        "1",
        "--g",
        "0",
        "--t1",
        "1",
        "--t2",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bench_then_pareto_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let fa = write(dir.path(), "g.fa", &genome(2000));
    let rep = dir.path().join("rep");
    let o = gdc(&[
        "bench",
        "--input",
        s(&fa),
        "--k",
        "6,10",
        "--cases",
        "DP0,DP2,DP3,Implicit",
        "--codec-d",
        "store,twobit",
        "--codec-f",
        "store,varint,bic",
        "--reps",
        "1",
        "--gaps",
        "--base",
        "--out",
        s(&rep),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["runs.csv", "frontier.csv", "report.json", "pareto.svg"] {
        assert!(rep.join(f).exists(), "{f}");
    }
    let runs = fs::read_to_string(rep.join("runs.csv")).unwrap();
    // 2 k x (4 cases + 1 gap variant) x 2 x 3, plus 2 k x 2 codecs x 2 base scenarios
    assert_eq!(runs.lines().count(), 1 + 2 * 5 * 6 + 2 * 2 * 2);

    let par = dir.path().join("par");
    let o = gdc(&[
        "pareto",
        "--runs",
        s(&rep.join("runs.csv")),
        "--out",
        s(&par),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(fs::read_to_string(par.join("pareto.svg"))
        .unwrap()
        .contains("<polyline class=\"frontier\""));

    let o = gdc(&["compare-base", "--runs", s(&rep.join("runs.csv"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    // header plus 4 cases for each k
    assert_eq!(stdout(&o).lines().count(), 1 + 2 * 4);
}

#[test]
fn pareto_on_published_frontier() {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures/staph_aureus_k32_frontier.csv");
    let dir = tempfile::tempdir().unwrap();
    let o = gdc(&[
        "pareto",
        "--runs",
        s(&fixture),
        "--out",
        s(dir.path()),
        "--log-x",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let frontier = fs::read_to_string(dir.path().join("frontier.csv")).unwrap();
    assert_eq!(frontier.lines().count(), 1 + 10);
    assert!(frontier.starts_with("label,bytes,time_s\n"));
    assert!(frontier.contains("\"DP3(mfc(S), bzip2(Fk))\",683623,3.818"));
    let svg = fs::read_to_string(dir.path().join("pareto.svg")).unwrap();
    assert_eq!(svg.matches("<circle").count(), 10);
}

#[test]
fn external_codec_from_config() {
    let has = |p: &str| {
        std::env::var_os("PATH")
            .is_some_and(|path| std::env::split_paths(&path).any(|d| d.join(p).is_file()))
    };
    if !has("gzip") {
        eprintln!("gzip not installed; skipping");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "codecs.toml", "[codecs.gzip]\n");
    let dict = write(dir.path(), "d.txt", "AC 2\nCG 1\n");
    let arc = dir.path().join("a");
    let o = gdc_env(
        &[
            "compress",
            "--dict",
            s(&dict),
            "--case",
            "DP2",
            "--codec-d",
            "gzip",
            "--codec-f",
            "gzip",
            "--out",
            s(&arc),
        ],
        &cfg,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = fs::read_to_string(arc.join("manifest.json")).unwrap();
    assert!(manifest.contains("external_commands"));
    let back = dir.path().join("r.txt");
    assert!(gdc_env(
        &["decompress", "--archive", s(&arc), "--out", s(&back)],
        &cfg
    )
    .status
    .success());
    assert_eq!(fs::read(&back).unwrap(), fs::read(&dict).unwrap());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(gdc(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(gdc(&["count", "--k", "3"]).status.code(), Some(1));
    let o = gdc(&[
        "compress",
        "--dict",
        "x",
        "--case",
        "DP9",
        "--codec-d",
        "store",
        "--codec-f",
        "store",
        "--out",
        "y",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let help = gdc(&["compress", "--help"]);
    assert!(help.status.success());
    for flag in [
        "--dict",
        "--case",
        "--codec-d",
        "--codec-f",
        "--gaps",
        "--out",
    ] {
        assert!(stdout(&help).contains(flag), "{flag}");
    }
}
