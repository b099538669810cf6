//! Files written for an experiment batch.
//!
//! * `records.csv`: one row per (graph, n_a). Columns: `size, graph,
//!   graph_seed, n_a`, then for each strategy in the order optimal, degree,
//!   closeness, betweenness, combined: `<s>_set, <s>_wcai, <s>_gap,
//!   <s>_attack`. Sets are 1-based, dash-separated; gaps are percent. Only
//!   deterministic quantities go here, so equal inputs give equal bytes.
//! * `timings.csv`: the same keys with `<s>_time` (seconds), `<s>_time_gap`
//!   (percent, positive = faster than optimal) and `<s>_solves`.
//! * `summary.json`: quartiles per (size, n_a) cell and the failure list.
//! * `boxplot_n<size>_na<n_a>.svg`: gap distributions per strategy, whiskers
//!   at 1.5×IQR.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::allocation::Strategy;
use crate::error::{Error, Result};
use crate::experiment::{percentile, CellSummary, ExperimentRecord, ExperimentSummary, Failure};

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

pub fn records_header() -> Vec<String> {
    let mut h: Vec<String> = ["size", "graph", "graph_seed", "n_a"].map(String::from).to_vec();
    for s in Strategy::ALL {
        for col in ["set", "wcai", "gap", "attack"] {
            h.push(format!("{s}_{col}"));
        }
    }
    h
}

fn keys(r: &ExperimentRecord) -> Vec<String> {
    vec![
        r.size.to_string(),
        r.graph_index.to_string(),
        r.graph_seed.to_string(),
        r.n_a.to_string(),
    ]
}

pub fn write_records(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(records_header())?;
    for r in records {
        let mut row = keys(r);
        for s in Strategy::ALL {
            let o = r.outcome(s);
            row.extend([
                o.monitor_set.dashed(),
                o.wcai.to_string(),
                opt(o.wcai_gap),
                o.worst_attack.dashed(),
            ]);
        }
        w.write_record(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_timings(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header: Vec<String> = ["size", "graph", "graph_seed", "n_a"].map(String::from).to_vec();
    for s in Strategy::ALL {
        for col in ["time", "time_gap", "solves"] {
            header.push(format!("{s}_{col}"));
        }
    }
    w.write_record(header)?;
    for r in records {
        let mut row = keys(r);
        for s in Strategy::ALL {
            let o = r.outcome(s);
            row.extend([o.solve_time.to_string(), opt(o.time_gap), o.inner_solves.to_string()]);
        }
        w.write_record(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    #[serde(flatten)]
    summary: &'a ExperimentSummary,
    failures: &'a [Failure],
}

/// Five-number box of a sample with whiskers at the most extreme points
/// within 1.5×IQR of the quartiles.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxStats {
    pub p25: f64,
    pub median: f64,
    pub p75: f64,
    pub low: f64,
    pub high: f64,
    pub outliers: Vec<f64>,
}

impl BoxStats {
    pub fn of(values: &[f64]) -> Option<BoxStats> {
        let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
        v.sort_by(f64::total_cmp);
        let (p25, median, p75) = (percentile(&v, 0.25)?, percentile(&v, 0.5)?, percentile(&v, 0.75)?);
        let reach = 1.5 * (p75 - p25);
        let inside = |x: &f64| *x >= p25 - reach && *x <= p75 + reach;
        let low = v.iter().copied().find(inside).unwrap_or(p25);
        let high = v.iter().rev().copied().find(inside).unwrap_or(p75);
        let outliers = v.iter().copied().filter(|x| !inside(x)).collect();
        Some(BoxStats { p25, median, p75, low, high, outliers })
    }
}

const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 260.0;
const MARGIN: f64 = 56.0;

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn panel(svg: &mut String, x0: f64, title: &str, series: &[(Strategy, Vec<f64>)]) {
    let boxes: Vec<(Strategy, Option<BoxStats>)> = series.iter().map(|(s, v)| (*s, BoxStats::of(v))).collect();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for (_, b) in &boxes {
        if let Some(b) = b {
            for v in [b.low, b.high].iter().chain(&b.outliers) {
                lo = lo.min(*v);
                hi = hi.max(*v);
            }
        }
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let top = 40.0;
    let y = |v: f64| top + PANEL_H * (hi - v) / (hi - lo);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        x0 + PANEL_W / 2.0,
        esc(title)
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{x0:.1}" y="{top:.1}" width="{PANEL_W:.1}" height="{PANEL_H:.1}" fill="none" stroke="#888"/>"##
    );
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let yy = y(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.1}" y1="{yy:.1}" x2="{x0:.1}" y2="{yy:.1}" stroke="#888"/><text x="{:.1}" y="{:.1}" text-anchor="end" font-size="10">{v:.1}</text>"##,
            x0 - 4.0,
            x0 - 6.0,
            yy + 3.0
        );
    }
    if lo < 0.0 && hi > 0.0 {
        let _ = writeln!(
            svg,
            r##"<line x1="{x0:.1}" y1="{0:.1}" x2="{1:.1}" y2="{0:.1}" stroke="#ccc" stroke-dasharray="4 3"/>"##,
            y(0.0),
            x0 + PANEL_W
        );
    }
    let slot = PANEL_W / boxes.len() as f64;
    for (i, (s, b)) in boxes.iter().enumerate() {
        let cx = x0 + slot * (i as f64 + 0.5);
        let half = slot * 0.3;
        let _ = writeln!(
            svg,
            r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle" font-size="11">{}</text>"#,
            top + PANEL_H + 16.0,
            s.name()
        );
        let Some(b) = b else { continue };
        let _ = writeln!(
            svg,
            r##"<g class="box" data-strategy="{}"><line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}" stroke="#333"/><line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}" stroke="#333"/><rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="#9ecae1" stroke="#333"/><line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#c00" stroke-width="2"/>"##,
            s.name(),
            y(b.high),
            y(b.p75),
            y(b.p25),
            y(b.low),
            cx - half,
            y(b.p75),
            2.0 * half,
            (y(b.p25) - y(b.p75)).max(0.5),
            cx - half,
            y(b.median),
            cx + half,
            y(b.median)
        );
        for o in &b.outliers {
            let _ = writeln!(svg, r##"<circle cx="{cx:.1}" cy="{:.1}" r="2.5" fill="none" stroke="#333"/>"##, y(*o));
        }
        svg.push_str("</g>\n");
    }
}

/// Self-contained SVG with WCAI-gap and time-gap box plots for one cell.
pub fn boxplot_svg(cell: &CellSummary, records: &[ExperimentRecord]) -> String {
    let rows: Vec<&ExperimentRecord> = records.iter().filter(|r| r.size == cell.size && r.n_a == cell.n_a).collect();
    let series = |f: &dyn Fn(&ExperimentRecord, Strategy) -> Option<f64>| -> Vec<(Strategy, Vec<f64>)> {
        Strategy::ALL
            .into_iter()
            .map(|s| (s, rows.iter().filter_map(|r| f(r, s)).collect()))
            .collect()
    };
    let width = 2.0 * (PANEL_W + MARGIN) + MARGIN;
    let height = PANEL_H + 100.0;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(
        svg,
        r#"<desc>N={}, n_a={}, {} graphs; box = quartiles, red = median, whiskers = 1.5 IQR, circles = outliers</desc>"#,
        cell.size, cell.n_a, cell.graphs
    );
    panel(
        &mut svg,
        MARGIN,
        &format!("WCAI gap (%) — N={}, n_a={}", cell.size, cell.n_a),
        &series(&|r, s| r.outcome(s).wcai_gap),
    );
    panel(
        &mut svg,
        2.0 * MARGIN + PANEL_W,
        "solving-time gap (%)",
        &series(&|r, s| r.outcome(s).time_gap),
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="10">whiskers at 1.5×IQR; n = {}</text>"#,
        width / 2.0,
        height - 8.0,
        cell.graphs
    );
    svg.push_str("</svg>\n");
    svg
}

/// Writes all batch outputs into `out_dir`, creating it if needed, and
/// returns the paths written.
pub fn emit_outputs(
    records: &[ExperimentRecord],
    summary: &ExperimentSummary,
    failures: &[Failure],
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    let path = out_dir.join("records.csv");
    write_records(records, &path)?;
    written.push(path);
    let path = out_dir.join("timings.csv");
    write_timings(records, &path)?;
    written.push(path);
    let path = out_dir.join("summary.json");
    let text = serde_json::to_string_pretty(&SummaryFile { summary, failures })?;
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    written.push(path);
    for cell in &summary.cells {
        let path = out_dir.join(format!("boxplot_{}.svg", cell.label()));
        std::fs::write(&path, boxplot_svg(cell, records)).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{summarize, StrategyOutcome};
    use crate::sets::VertexSet;

    fn record(graph_index: usize, gaps: [f64; 5]) -> ExperimentRecord {
        let set = VertexSet::from_one_based(&[1], 3).unwrap();
        ExperimentRecord {
            size: 3,
            graph_index,
            graph_seed: 42 + graph_index as u64,
            n_a: 1,
            outcomes: Strategy::ALL
                .into_iter()
                .zip(gaps)
                .map(|(strategy, g)| StrategyOutcome {
                    strategy,
                    monitor_set: set.clone(),
                    wcai: 1.0 + g / 100.0,
                    worst_attack: set.clone(),
                    wcai_gap: Some(g),
                    solve_time: 0.5,
                    time_gap: Some(50.0),
                    inner_solves: 3,
                })
                .collect(),
        }
    }

    #[test]
    fn empty_batch_gives_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let summary = summarize(&[], &[]);
        emit_outputs(&[], &summary, &[], dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("records.csv")).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert_eq!(text.trim_end(), records_header().join(","));
    }

    #[test]
    fn single_record_draws_five_boxes() {
        let recs = [record(0, [0.0, 3.0, 2.0, 5.0, 2.0])];
        let summary = summarize(&recs, &[]);
        let svg = boxplot_svg(&summary.cells[0], &recs);
        // two panels of five strategies each
        assert_eq!(svg.matches(r#"class="box""#).count(), 10);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("href"));
    }

    #[test]
    fn outputs_are_byte_stable_and_parse_back() {
        let recs = [record(0, [0.0, 3.0, 2.0, 5.0, 2.0]), record(1, [0.0, 1.0, 4.0, 4.0, 1.0])];
        let summary = summarize(&recs, &[]);
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let written = emit_outputs(&recs, &summary, &[], a.path()).unwrap();
        assert_eq!(written.len(), 4);
        emit_outputs(&recs, &summary, &[], b.path()).unwrap();
        let read = |d: &Path| std::fs::read(d.join("records.csv")).unwrap();
        assert_eq!(read(a.path()), read(b.path()));

        let mut rdr = csv::Reader::from_path(a.path().join("records.csv")).unwrap();
        let col = rdr.headers().unwrap().iter().position(|h| h == "degree_gap").unwrap();
        let gaps: Vec<f64> = rdr.records().map(|r| r.unwrap()[col].parse().unwrap()).collect();
        assert_eq!(gaps, vec![3.0, 1.0]);
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(a.path().join("summary.json")).unwrap()).unwrap();
        assert_eq!(json["cells"][0]["strategies"][1]["wcai_gap"]["median"], 2.0);
    }

    #[test]
    fn whiskers_stop_at_one_and_a_half_iqr() {
        let b = BoxStats::of(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap();
        assert_eq!((b.p25, b.median, b.p75), (2.0, 3.0, 4.0));
        assert_eq!((b.low, b.high), (1.0, 4.0));
        assert_eq!(b.outliers, vec![100.0]);
        assert!(BoxStats::of(&[]).is_none());
    }

    #[test]
    fn unwritable_directory_names_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let err = emit_outputs(&[], &summarize(&[], &[]), &[], &blocker.join("sub")).unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
    }
}
