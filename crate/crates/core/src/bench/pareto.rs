use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{BenchError, RunRecord, Status};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub label: String,
    pub bytes: u64,
    pub time_s: f64,
}

impl ParetoPoint {
    pub fn new(label: impl Into<String>, bytes: u64, time_s: f64) -> Self {
        ParetoPoint {
            label: label.into(),
            bytes,
            time_s,
        }
    }

    /// `self` is no worse on both axes and strictly better on one.
    pub fn dominates(&self, other: &ParetoPoint) -> bool {
        self.bytes <= other.bytes
            && self.time_s <= other.time_s
            && (self.bytes < other.bytes || self.time_s < other.time_s)
    }
}

/// Points of every `ok` dictionary record that has both a size and a post
/// time. Base records are references, not configurations, and are left out.
pub fn points_from_records(records: &[RunRecord]) -> Vec<ParetoPoint> {
    records
        .iter()
        .filter(|r| r.status == Status::Ok && !r.scenario.is_base())
        .filter_map(|r| Some(ParetoPoint::new(r.label(), r.bytes_out?, r.post_time_s?)))
        .collect()
}

/// The non-dominated subset, sorted by bytes then time then label. Points
/// equal to a retained point are retained too.
pub fn pareto_frontier(points: &[ParetoPoint]) -> Result<Vec<ParetoPoint>, BenchError> {
    if points.is_empty() {
        return Err(BenchError::Empty(
            "pareto_frontier needs at least one point",
        ));
    }
    if let Some(p) = points
        .iter()
        .find(|p| !p.time_s.is_finite() || p.time_s < 0.0)
    {
        return Err(BenchError::InvalidPoint(format!(
            "{}: time {}",
            p.label, p.time_s
        )));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| {
        a.bytes
            .cmp(&b.bytes)
            .then(a.time_s.total_cmp(&b.time_s))
            .then_with(|| a.label.cmp(&b.label))
    });

    let mut out = Vec::new();
    let mut best_time = f64::INFINITY;
    let mut i = 0;
    while i < sorted.len() {
        let bytes = sorted[i].bytes;
        let group_min = sorted[i].time_s;
        let mut j = i;
        while j < sorted.len() && sorted[j].bytes == bytes {
            if sorted[j].time_s == group_min && group_min < best_time {
                out.push(sorted[j].clone());
            }
            j += 1;
        }
        best_time = best_time.min(group_min);
        i = j;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Y,
    N,
}

impl Verdict {
    fn of(ratio: f64) -> Verdict {
        if ratio < 1.0 {
            Verdict::Y
        } else {
            Verdict::N
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Y => "Y",
            Verdict::N => "N",
        })
    }
}

/// Dictionary artifact (`m` bytes, `t1` seconds to recover) against the
/// stored genome (`g` bytes, `t2` seconds to decompress and recount).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseCaseResult {
    pub m: f64,
    pub g: f64,
    pub t1: f64,
    pub t2: f64,
    pub ratio_c: f64,
    pub ratio_t: f64,
    pub verdict_c: Verdict,
    pub verdict_t: Verdict,
}

pub fn compare_base(m: f64, g: f64, t1: f64, t2: f64) -> Result<BaseCaseResult, BenchError> {
    for (name, v) in [("m", m), ("t1", t1)] {
        if !v.is_finite() || v < 0.0 {
            return Err(BenchError::InvalidPoint(format!("{name} = {v}")));
        }
    }
    for (name, v) in [("g", g), ("t2", t2)] {
        if !v.is_finite() || v <= 0.0 {
            return Err(BenchError::NonPositive(format!("{name} = {v}")));
        }
    }
    let ratio_c = m / g;
    let ratio_t = t1 / t2;
    Ok(BaseCaseResult {
        m,
        g,
        t1,
        t2,
        ratio_c,
        ratio_t,
        verdict_c: Verdict::of(ratio_c),
        verdict_t: Verdict::of(ratio_t),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Bytes,
    Time,
}

fn objective_value(r: &RunRecord, objective: Objective) -> Option<f64> {
    match objective {
        Objective::Bytes => r.bytes_out.map(|b| b as f64),
        Objective::Time => r.post_time_s,
    }
}

/// Winner by `objective` (ties go to the smallest label) and the bracketed
/// loss of the best record from any other family, e.g. `[2.05E+00]`. A
/// family is the scenario and case of a record. With a single family the
/// bracket is `[1.00E+00]`.
pub fn best_by(
    records: &[RunRecord],
    objective: Objective,
) -> Result<(RunRecord, String), BenchError> {
    let ok: Vec<(&RunRecord, f64)> = records
        .iter()
        .filter(|r| r.status == Status::Ok)
        .filter_map(|r| Some((r, objective_value(r, objective)?)))
        .collect();
    let by_value = |a: &(&RunRecord, f64), b: &(&RunRecord, f64)| -> Ordering {
        a.1.total_cmp(&b.1)
            .then_with(|| a.0.label().cmp(&b.0.label()))
    };
    let winner = *ok
        .iter()
        .min_by(|a, b| by_value(a, b))
        .ok_or(BenchError::NoOkRecords)?;
    let runner_up = ok
        .iter()
        .filter(|(r, _)| r.family() != winner.0.family())
        .min_by(|a, b| by_value(a, b));
    let ratio = match runner_up {
        Some(&(_, v)) if winner.1 > 0.0 => v / winner.1,
        Some(&(_, v)) if v > 0.0 => f64::INFINITY,
        _ => 1.0,
    };
    Ok((winner.0.clone(), format!("[{}]", format_sci(ratio))))
}

/// Scientific notation with a two-digit signed exponent: `2.05E+00`.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.2E}");
    let (mantissa, exp) = s.split_once('E').expect("E in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}E{sign}{:02}", exp.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(label: &str, bytes: u64, t: f64) -> ParetoPoint {
        ParetoPoint::new(label, bytes, t)
    }

    fn oracle(points: &[ParetoPoint]) -> Vec<ParetoPoint> {
        points
            .iter()
            .filter(|q| !points.iter().any(|o| o.dominates(q)))
            .cloned()
            .collect()
    }

    #[test]
    fn frontier_examples() {
        let f = pareto_frontier(&[p("b", 2, 2.0), p("a", 1, 1.0)]).unwrap();
        assert_eq!(f, [p("a", 1, 1.0)]);
        let pts = [
            p("a", 1, 3.0),
            p("b", 2, 2.0),
            p("c", 2, 2.0),
            p("d", 3, 2.0),
            p("e", 1, 3.0),
        ];
        let labels: Vec<_> = pareto_frontier(&pts)
            .unwrap()
            .into_iter()
            .map(|q| q.label)
            .collect();
        assert_eq!(labels, ["a", "e", "b", "c"]);
        assert!(matches!(pareto_frontier(&[]), Err(BenchError::Empty(_))));
        assert!(pareto_frontier(&[p("x", 1, f64::NAN)]).is_err());
    }

    #[test]
    fn frontier_matches_oracle() {
        let mut x = 7u64;
        let mut next = || {
            x = x
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            x >> 33
        };
        for _ in 0..50 {
            let pts: Vec<_> = (0..60)
                .map(|i| p(&i.to_string(), next() % 20, (next() % 20) as f64))
                .collect();
            let mut got = pareto_frontier(&pts).unwrap();
            let mut want = oracle(&pts);
            got.sort_by(|a, b| a.label.cmp(&b.label));
            want.sort_by(|a, b| a.label.cmp(&b.label));
            assert_eq!(got, want);
        }
    }

    #[test]
    fn compare_base_examples() {
        let r = compare_base(50.0, 100.0, 2.0, 4.0).unwrap();
        assert_eq!((r.ratio_c, r.ratio_t), (0.5, 0.5));
        assert_eq!((r.verdict_c, r.verdict_t), (Verdict::Y, Verdict::Y));
        let r = compare_base(100.0, 100.0, 1.0, 1.0).unwrap();
        assert_eq!((r.verdict_c, r.verdict_t), (Verdict::N, Verdict::N));
        let below = 1.0 - f64::EPSILON;
        assert_eq!(
            compare_base(below, 1.0, below, 1.0).unwrap().verdict_c,
            Verdict::Y
        );
        assert!(matches!(
            compare_base(1.0, 0.0, 1.0, 1.0),
            Err(BenchError::NonPositive(_))
        ));
        assert!(matches!(
            compare_base(1.0, 1.0, 1.0, -1.0),
            Err(BenchError::NonPositive(_))
        ));
    }

    #[test]
    fn sci_format() {
        assert_eq!(format_sci(2.05), "2.05E+00");
        assert_eq!(format_sci(1.0), "1.00E+00");
        assert_eq!(format_sci(123456.0), "1.23E+05");
        assert_eq!(format_sci(0.00123), "1.23E-03");
    }
}
