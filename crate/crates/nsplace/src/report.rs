//! Text and CSV renderings of [`MetricsReport`].

use std::fmt::Write as _;

use nsplace_core::metrics::{percent_improvement, MetricsReport};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing metric {0}")]
    Missing(&'static str),
}

const RUNTIME_PREFIX: &str = "runtime_s.";

/// Scalar rows in display order.
fn rows(r: &MetricsReport) -> Vec<(String, f64)> {
    let mut out = vec![
        ("hpwl_total".to_string(), r.hpwl_total),
        ("ns_objective".to_string(), r.ns_objective),
        ("crossing_count".to_string(), r.crossing_count as f64),
        ("overlap_count".to_string(), r.overlap_count as f64),
        ("overlap_area".to_string(), r.overlap_area),
    ];
    out.extend(r.runtime.iter().map(|(stage, t)| (format!("{RUNTIME_PREFIX}{stage}"), *t)));
    out
}

/// `metric,value` rows behind a header line. Values use shortest
/// round-trip formatting.
pub fn to_csv(r: &MetricsReport) -> String {
    let mut s = String::from("metric,value\n");
    for (name, v) in rows(r) {
        let _ = writeln!(s, "{name},{v}");
    }
    s
}

pub fn parse_csv(text: &str) -> Result<MetricsReport, ReportError> {
    let mut report = MetricsReport::default();
    let mut seen = [false; 5];
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || (i == 0 && line == "metric,value") {
            continue;
        }
        let (name, value) = line.split_once(',').ok_or(ReportError::Syntax { line: line_no, msg: "expected metric,value".into() })?;
        let v: f64 = value.trim().parse().map_err(|_| ReportError::Syntax { line: line_no, msg: format!("bad value {value:?}") })?;
        let count = || -> Result<usize, ReportError> {
            (v >= 0.0 && v.fract() == 0.0).then_some(v as usize).ok_or(ReportError::Syntax { line: line_no, msg: format!("{name} must be a count") })
        };
        match name {
            "hpwl_total" => (report.hpwl_total, seen[0]) = (v, true),
            "ns_objective" => (report.ns_objective, seen[1]) = (v, true),
            "crossing_count" => (report.crossing_count, seen[2]) = (count()?, true),
            "overlap_count" => (report.overlap_count, seen[3]) = (count()?, true),
            "overlap_area" => (report.overlap_area, seen[4]) = (v, true),
            other => match other.strip_prefix(RUNTIME_PREFIX) {
                Some(stage) => report.runtime.push((stage.to_string(), v)),
                None => return Err(ReportError::Syntax { line: line_no, msg: format!("unknown metric {other}") }),
            },
        }
    }
    const NAMES: [&str; 5] = ["hpwl_total", "ns_objective", "crossing_count", "overlap_count", "overlap_area"];
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(ReportError::Missing(NAMES[k]));
    }
    Ok(report)
}

fn cell(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        format!("{v:.4}")
    }
}

/// Aligned table of `report`. With a baseline, a third column gives the
/// percent improvement `100 (base - new) / base` per metric.
pub fn format_table(report: &MetricsReport, baseline: Option<&MetricsReport>) -> String {
    let base: Vec<(String, f64)> = baseline.map(rows).unwrap_or_default();
    let mut lines: Vec<[String; 3]> = vec![["metric".into(), "value".into(), if baseline.is_some() { "improvement %".into() } else { String::new() }]];
    for (name, v) in rows(report) {
        let pct = base
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, b)| percent_improvement(*b, v).map_or("n/a".to_string(), |p| format!("{p:.1}")))
            .unwrap_or_default();
        lines.push([name, cell(v), pct]);
    }
    let w0 = lines.iter().map(|l| l[0].len()).max().unwrap_or(0);
    let w1 = lines.iter().map(|l| l[1].len()).max().unwrap_or(0);
    let mut s = String::new();
    for [a, b, c] in lines {
        let row = format!("{a:<w0$}  {b:>w1$}  {c}");
        let _ = writeln!(s, "{}", row.trim_end());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> MetricsReport {
        MetricsReport {
            hpwl_total: 123.456789,
            ns_objective: 0.1 + 0.2,
            crossing_count: 7,
            overlap_count: 0,
            overlap_area: 0.0,
            runtime: vec![("init".into(), 0.25), ("gp".into(), 1.0 / 3.0)],
        }
    }

    #[test]
    fn csv_reparses_to_equal_values() {
        let r = sample();
        assert_eq!(parse_csv(&to_csv(&r)).unwrap(), r);
    }

    #[test]
    fn csv_errors() {
        assert_eq!(parse_csv("metric,value\nhpwl_total,1\n"), Err(ReportError::Missing("ns_objective")));
        assert!(matches!(parse_csv("crossing_count,1.5\n"), Err(ReportError::Syntax { line: 1, .. })));
    }

    #[test]
    fn improvement_column() {
        let base = MetricsReport { hpwl_total: 200.0, crossing_count: 10, ..sample() };
        let new = MetricsReport { hpwl_total: 150.0, crossing_count: 12, ..sample() };
        let t = format_table(&new, Some(&base));
        let line = |m: &str| t.lines().find(|l| l.starts_with(m)).unwrap().split_whitespace().map(str::to_string).collect::<Vec<_>>();
        assert_eq!(line("hpwl_total"), ["hpwl_total", "150", "25.0"]);
        assert_eq!(line("crossing_count"), ["crossing_count", "12", "-20.0"]);
        assert_eq!(line("overlap_area"), ["overlap_area", "0", "n/a"]);
        assert!(!format_table(&new, None).contains('%'));
    }

    #[test]
    fn table_columns_align() {
        let t = format_table(&sample(), None);
        let starts: Vec<usize> = t.lines().skip(1).map(|l| l.find(|c: char| c.is_ascii_digit()).unwrap()).collect();
        let ends: Vec<usize> = t.lines().skip(1).map(str::len).collect();
        assert!(ends.windows(2).all(|w| w[0] == w[1]), "{t}");
        assert!(starts.iter().all(|&s| s > "crossing_count".len()));
    }
}
