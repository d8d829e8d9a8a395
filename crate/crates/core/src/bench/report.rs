use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::pareto::{pareto_frontier, points_from_records, BaseCaseResult, ParetoPoint};
use super::{base_case_rows, BenchError, RunRecord, Scenario};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseCaseRow {
    pub k: usize,
    pub scenario: Scenario,
    pub case: String,
    pub base_label: String,
    #[serde(flatten)]
    pub result: BaseCaseResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub records: Vec<RunRecord>,
    pub frontier: Vec<ParetoPoint>,
    pub base_case: Vec<BaseCaseRow>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportFiles {
    pub runs_csv: PathBuf,
    pub frontier_csv: PathBuf,
    pub report_json: PathBuf,
    pub pareto_svg: PathBuf,
}

pub fn write_runs_csv<W: std::io::Write>(out: W, records: &[RunRecord]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record([
            "dataset_id",
            "k",
            "scenario",
            "case",
            "codec_d",
            "codec_f",
            "use_gaps",
            "bytes_out",
            "pre_time_s",
            "post_time_s",
            "status",
            "reason",
        ])?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_runs_csv<R: Read>(input: R) -> Result<Vec<RunRecord>, BenchError> {
    let mut rd = csv::Reader::from_reader(input);
    Ok(rd.deserialize().collect::<Result<_, _>>()?)
}

/// Columns `label,bytes,time_s`.
pub fn write_frontier_csv<W: std::io::Write>(
    out: W,
    frontier: &[ParetoPoint],
) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    if frontier.is_empty() {
        w.write_record(["label", "bytes", "time_s"])?;
    }
    for p in frontier {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_frontier_csv<R: Read>(input: R) -> Result<Vec<ParetoPoint>, BenchError> {
    let mut rd = csv::Reader::from_reader(input);
    Ok(rd.deserialize().collect::<Result<_, _>>()?)
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Scatter of `points` (x = bytes, y = post time) with the frontier drawn
/// as red markers joined by one polyline.
pub fn render_svg(points: &[ParetoPoint], frontier: &[ParetoPoint], log_x: bool) -> String {
    let xv = |b: u64| {
        if log_x {
            (b.max(1) as f64).log10()
        } else {
            b as f64
        }
    };
    let (mut x0, mut x1) = points
        .iter()
        .map(|p| xv(p.bytes))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
            (a.min(x), b.max(x))
        });
    let mut y1 = points.iter().map(|p| p.time_s).fold(0.0f64, f64::max);
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= 0.0 {
        y1 = 1.0;
    }
    let px = |b: u64| MARGIN + (xv(b) - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |t: f64| HEIGHT - MARGIN - t / y1 * (HEIGHT - 2.0 * MARGIN);
    let on_frontier = |p: &ParetoPoint| frontier.iter().any(|f| f == p);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (l, r, b, t) = (MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, MARGIN);
    let _ = writeln!(
        s,
        r#"<line x1="{l}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{l}" y1="{b}" x2="{l}" y2="{t}" stroke="black"/>"#
    );
    let x_title = if log_x {
        "output bytes (log10)"
    } else {
        "output bytes"
    };
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_title}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">post-processing time (s)</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    let fmt_x = |x: f64| {
        if log_x {
            format!("1e{x:.1}")
        } else {
            format!("{x:.0}")
        }
    };
    let _ = writeln!(
        s,
        r#"<text x="{l}" y="{}" text-anchor="start">{}</text>"#,
        b + 18.0,
        fmt_x(x0)
    );
    let _ = writeln!(
        s,
        r#"<text x="{r}" y="{}" text-anchor="end">{}</text>"#,
        b + 18.0,
        fmt_x(x1)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{t}" text-anchor="end">{y1:.3}</text>"#,
        l - 5.0
    );

    let mut line: Vec<&ParetoPoint> = frontier.iter().collect();
    line.sort_by(|a, b| a.bytes.cmp(&b.bytes).then(a.time_s.total_cmp(&b.time_s)));
    let coords: Vec<String> = line
        .iter()
        .map(|p| format!("{:.2},{:.2}", px(p.bytes), py(p.time_s)))
        .collect();
    let _ = writeln!(
        s,
        r##"<polyline class="frontier" points="{}" fill="none" stroke="#d62728" stroke-width="1.5"/>"##,
        coords.join(" ")
    );
    for p in points {
        let (class, fill) = if on_frontier(p) {
            ("point frontier-point", "#d62728")
        } else {
            ("point", "#1f77b4")
        };
        let _ = writeln!(
            s,
            r#"<circle class="{class}" cx="{:.2}" cy="{:.2}" r="4" fill="{fill}"><title>{} ({} B, {} s)</title></circle>"#,
            px(p.bytes),
            py(p.time_s),
            escape(&p.label),
            p.bytes,
            p.time_s
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `runs.csv`, `frontier.csv`, `report.json` and `pareto.svg` under
/// `out_dir`. `frontier` defaults to the frontier of the ok records.
pub fn emit_report(
    records: &[RunRecord],
    frontier: Option<&[ParetoPoint]>,
    out_dir: &Path,
    log_x: bool,
) -> Result<ReportFiles, BenchError> {
    if records.is_empty() {
        return Err(BenchError::Empty("no run records to report"));
    }
    let points = points_from_records(records);
    let frontier = match frontier {
        Some(f) => f.to_vec(),
        None if points.is_empty() => Vec::new(),
        None => pareto_frontier(&points)?,
    };
    let report = Report {
        schema_version: REPORT_SCHEMA_VERSION,
        records: records.to_vec(),
        frontier: frontier.clone(),
        base_case: base_case_rows(records)?,
    };

    fs::create_dir_all(out_dir)?;
    let files = ReportFiles {
        runs_csv: out_dir.join("runs.csv"),
        frontier_csv: out_dir.join("frontier.csv"),
        report_json: out_dir.join("report.json"),
        pareto_svg: out_dir.join("pareto.svg"),
    };
    write_runs_csv(fs::File::create(&files.runs_csv)?, records)?;
    write_frontier_csv(fs::File::create(&files.frontier_csv)?, &frontier)?;
    fs::write(&files.report_json, serde_json::to_vec_pretty(&report)?)?;
    fs::write(&files.pareto_svg, render_svg(&points, &frontier, log_x))?;
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::Status;
    use crate::pipeline::Case;

    fn rec(case: Case, d: &str, bytes: u64, t: f64) -> RunRecord {
        RunRecord {
            dataset_id: "x".into(),
            k: 4,
            scenario: Scenario::Cd,
            case: Some(case),
            codec_d: d.into(),
            codec_f: "store".into(),
            use_gaps: false,
            bytes_out: Some(bytes),
            pre_time_s: Some(0.5),
            post_time_s: Some(t),
            status: Status::Ok,
            reason: String::new(),
        }
    }

    #[test]
    fn csv_round_trip_and_columns() {
        let mut skipped = rec(Case::Dp3, "zstd", 0, 0.0);
        skipped.bytes_out = None;
        skipped.pre_time_s = None;
        skipped.post_time_s = None;
        skipped.status = Status::Skipped;
        skipped.reason = "codec unavailable: zstd".into();
        let mut base = rec(Case::Dp0, "xz", 10, 0.1);
        base.scenario = Scenario::BaseCD;
        base.case = None;
        base.codec_f = "n/a".into();
        let records = vec![rec(Case::Dp0, "store", 100, 0.123456789), skipped, base];

        let mut buf = Vec::new();
        write_runs_csv(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "dataset_id,k,scenario,case,codec_d,codec_f,use_gaps,bytes_out,pre_time_s,post_time_s,status,reason\n"
        ));
        assert!(text.contains("x,4,BaseCD,n/a,xz,n/a,false,10,"));
        assert_eq!(read_runs_csv(&buf[..]).unwrap(), records);
    }

    #[test]
    fn svg_markers() {
        let pts = vec![
            ParetoPoint::new("a", 1, 2.0),
            ParetoPoint::new("b", 2, 1.0),
            ParetoPoint::new("c", 3, 3.0),
        ];
        let f = pareto_frontier(&pts).unwrap();
        let svg = render_svg(&pts, &f, true);
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("frontier-point").count(), 2);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(!svg.contains("<script"));
    }

    #[test]
    fn emit_writes_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let records = vec![
            rec(Case::Dp0, "store", 100, 1.0),
            rec(Case::Dp1, "store", 90, 2.0),
        ];
        let files = emit_report(&records, None, dir.path(), false).unwrap();
        let runs = read_runs_csv(fs::File::open(&files.runs_csv).unwrap()).unwrap();
        assert_eq!(runs, records);
        let frontier = read_frontier_csv(fs::File::open(&files.frontier_csv).unwrap()).unwrap();
        assert_eq!(frontier.len(), 2);
        let report: Report =
            serde_json::from_slice(&fs::read(&files.report_json).unwrap()).unwrap();
        assert_eq!(report.schema_version, REPORT_SCHEMA_VERSION);
        assert_eq!(report.records, records);

        let empty = dir.path().join("empty");
        assert!(matches!(
            emit_report(&[], None, &empty, false),
            Err(BenchError::Empty(_))
        ));
        assert!(!empty.exists());
    }
}
