use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::DataPoint;
use crate::algebra::Relation;
use crate::calculus::Calculus;
use crate::error::{Error, Result};
use crate::subclasses::{in_c8, in_h8, in_np8, in_q8, SplitSetId};

const SWEEP_HEADER: [&str; 15] = [
    "model", "n", "d", "l", "count", "config", "p_sat", "undecided", "nodes_p50", "nodes_p70", "nodes_p99", "ms_p50",
    "ms_p70", "ms_p99", "hard_count",
];

pub fn sweep_csv(points: &[DataPoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::InvalidInput(e.to_string());
    if points.is_empty() {
        w.write_record(SWEEP_HEADER).map_err(err)?;
    }
    for p in points {
        w.serialize(p).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn write_sweep_csv(path: impl AsRef<Path>, points: &[DataPoint]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, sweep_csv(points)?).map_err(|e| Error::io(path, e))
}

pub fn read_sweep_csv(path: impl AsRef<Path>) -> Result<Vec<DataPoint>> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    rdr.deserialize()
        .enumerate()
        .map(|(k, row)| row.map_err(|e| Error::parse(k + 2, e.to_string()).context(path.display().to_string())))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotMetric {
    PSat,
    MedianNodes,
    MedianMillis,
}

impl PlotMetric {
    fn label(self) -> &'static str {
        match self {
            PlotMetric::PSat => "probability of satisfiability",
            PlotMetric::MedianNodes => "median visited nodes",
            PlotMetric::MedianMillis => "median time (ms)",
        }
    }

    fn value(self, p: &DataPoint) -> Option<f64> {
        match self {
            PlotMetric::PSat => p.p_sat,
            PlotMetric::MedianNodes => Some(p.nodes_p50 as f64),
            PlotMetric::MedianMillis => Some(p.ms_p50),
        }
    }
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Line chart of `metric` against `d`, one curve per `(n, config)`. `None`
/// when there is nothing to draw.
pub fn plot_svg(points: &[DataPoint], metric: PlotMetric) -> Option<String> {
    let mut curves: BTreeMap<(usize, String), Vec<(f64, f64)>> = BTreeMap::new();
    for p in points {
        if let Some(v) = metric.value(p) {
            curves.entry((p.n, p.config.clone())).or_default().push((p.d, v));
        }
    }
    if curves.is_empty() {
        return None;
    }
    let all = curves.values().flatten();
    let (mut x0, mut x1, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if metric == PlotMetric::PSat || y1 <= 0.0 {
        y1 = y1.max(1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    let (w, h, left, right, top, bottom) = (640.0, 400.0, 60.0, 180.0, 20.0, 50.0);
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (w - left - right);
    let py = |y: f64| h - bottom - y / y1 * (h - top - bottom);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let (ax0, ax1, ay0, ay1) = (px(x0), px(x1), py(0.0), py(y1));
    let _ = writeln!(s, r#"<path d="M{ax0} {ay1} V{ay0} H{ax1}" stroke="black" fill="none"/>"#);
    for k in 0..=4 {
        let xv = x0 + (x1 - x0) * f64::from(k) / 4.0;
        let yv = y1 * f64::from(k) / 4.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{xv:.2}</text>"#, px(xv), ay0 + 15.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, ax0 - 4.0, py(yv) + 4.0, trim(yv));
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">average degree d</text>"#, (ax0 + ax1) / 2.0, h - 10.0);
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#,
        (ay0 + ay1) / 2.0,
        (ay0 + ay1) / 2.0,
        metric.label()
    );
    for (k, ((n, cfg), mut pts)) in curves.into_iter().enumerate() {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let colour = PALETTE[k % PALETTE.len()];
        let path: Vec<String> = pts
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| format!("{}{:.1} {:.1}", if i == 0 { "M" } else { "L" }, px(x), py(y)))
            .collect();
        let _ = writeln!(s, r#"<path d="{}" stroke="{colour}" fill="none" stroke-width="1.5"/>"#, path.join(" "));
        let ly = top + 14.0 * k as f64 + 10.0;
        let _ = writeln!(s, r#"<rect x="{}" y="{:.1}" width="10" height="3" fill="{colour}"/>"#, w - right + 10.0, ly - 4.0);
        let _ = writeln!(s, r#"<text x="{}" y="{ly:.1}">n={n} {}</text>"#, w - right + 24.0, escape(&cfg));
    }
    s.push_str("</svg>\n");
    Some(s)
}

fn trim(v: f64) -> String {
    if v >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

/// Writes `sweep.csv` and, for non-empty input, three SVG charts.
pub fn write_report(dir: impl AsRef<Path>, points: &[DataPoint]) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_sweep_csv(dir.join("sweep.csv"), points)?;
    for (metric, name) in [
        (PlotMetric::PSat, "p_sat.svg"),
        (PlotMetric::MedianNodes, "nodes_p50.svg"),
        (PlotMetric::MedianMillis, "ms_p50.svg"),
    ] {
        if let Some(svg) = plot_svg(points, metric) {
            let path = dir.join(name);
            std::fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
        }
    }
    Ok(())
}

/// One row per relation: mask, fragment memberships and the decomposition
/// size under each split set.
pub fn subsets_csv(calculus: &Calculus) -> String {
    let mut s = String::from("relation,mask,np8,h8,c8,q8,bhat");
    for id in SplitSetId::ALL {
        let _ = write!(s, ",size_{id}");
    }
    s.push('\n');
    let bhat = calculus.split(SplitSetId::Bhat);
    for r in Relation::all() {
        let flag = |b: bool| u8::from(b);
        let non_empty = !r.is_empty();
        let _ = write!(
            s,
            "{r},{},{},{},{},{},{}",
            r.bits(),
            flag(non_empty && in_np8(r)),
            flag(non_empty && in_h8(r)),
            flag(non_empty && in_c8(r)),
            flag(non_empty && in_q8(r)),
            flag(bhat.contains(r))
        );
        for id in SplitSetId::ALL {
            let _ = write!(s, ",{}", calculus.split(id).decomposition_size(r));
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(n: usize, d: f64, p: Option<f64>) -> DataPoint {
        DataPoint {
            model: "H".into(),
            n,
            d,
            l: 4.0,
            count: 10,
            config: "H8/dynamic/local".into(),
            p_sat: p,
            undecided: usize::from(p.is_none()) * 10,
            nodes_p50: 3,
            nodes_p70: 5,
            nodes_p99: 17,
            ms_p50: 0.123456789,
            ms_p70: 1.5,
            ms_p99: 2.0 / 3.0,
            hard_count: 1,
        }
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let csv = sweep_csv(&[]).unwrap();
        assert_eq!(csv.trim_end(), SWEEP_HEADER.join(","));
        assert!(plot_svg(&[], PlotMetric::PSat).is_none());
        let dir = tempfile::tempdir().unwrap();
        write_report(dir.path(), &[]).unwrap();
        assert!(dir.path().join("sweep.csv").exists());
        assert!(!dir.path().join("p_sat.svg").exists());
    }

    #[test]
    fn sweep_csv_round_trips() {
        let pts = vec![point(30, 8.5, Some(0.7)), point(30, 9.0, None), point(50, 9.0, Some(1.0 / 3.0))];
        let csv = sweep_csv(&pts).unwrap();
        assert!(csv.starts_with(&SWEEP_HEADER.join(",")));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        write_sweep_csv(&path, &pts).unwrap();
        assert_eq!(read_sweep_csv(&path).unwrap(), pts);
    }

    #[test]
    fn plots_are_self_contained() {
        let pts = vec![point(30, 8.5, Some(0.7)), point(30, 9.0, Some(0.2)), point(50, 9.0, Some(0.4))];
        for metric in [PlotMetric::PSat, PlotMetric::MedianNodes, PlotMetric::MedianMillis] {
            let svg = plot_svg(&pts, metric).unwrap();
            assert!(svg.starts_with("<svg"));
            assert!(!svg.contains("href"));
            assert!(!svg.contains("url("));
            assert_eq!(svg.matches("stroke-width=\"1.5\"").count(), 2);
        }
    }

    #[test]
    fn subsets_dump_has_every_relation() {
        let csv = subsets_csv(Calculus::shared());
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 257);
        let np8: usize = lines[1..].iter().map(|l| l.split(',').nth(2).unwrap().parse::<usize>().unwrap()).sum();
        assert_eq!(np8, 76);
        assert!(lines[256].starts_with("*,255,0,1,1,1,1,"));
    }
}
