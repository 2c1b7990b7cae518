//! Experiment orchestration: phase-transition sweeps, percentile
//! aggregation, hard-instance collection and reports.

mod hard;
mod report;

pub use hard::{collect_hard, load_corpus, CorpusEntry, HardEntry, HardSet};
pub use report::{plot_svg, read_sweep_csv, subsets_csv, sweep_csv, write_report, write_sweep_csv, PlotMetric};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus::Calculus;
use crate::error::{Error, Result};
use crate::generator::{generate, GenSpec};
use crate::network::{Instance, Model};
use crate::portfolio::{default_plan, run_portfolio};
use crate::solver::{HeuristicConfig, SolveStatus, Solver};

/// What a sweep runs on every instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SweepEntry {
    Config(HeuristicConfig),
    /// The default four-heuristic plan for the instance size.
    Portfolio,
}

impl fmt::Display for SweepEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepEntry::Config(c) => c.fmt(f),
            SweepEntry::Portfolio => f.write_str("portfolio"),
        }
    }
}

impl FromStr for SweepEntry {
    type Err = Error;

    fn from_str(s: &str) -> Result<SweepEntry> {
        if s.eq_ignore_ascii_case("portfolio") {
            Ok(SweepEntry::Portfolio)
        } else {
            s.parse().map(SweepEntry::Config)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub model: Model,
    pub ns: Vec<usize>,
    pub d_start: f64,
    pub d_stop: f64,
    pub d_step: f64,
    pub l: f64,
    pub instances: usize,
    pub entries: Vec<SweepEntry>,
    pub cap: u64,
    pub seed: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.to_string()));
        if !(self.d_step > 0.0) {
            return bad("d step must be positive");
        }
        if self.d_stop < self.d_start {
            return bad("d range is empty");
        }
        if self.instances == 0 {
            return bad("need at least one instance per point");
        }
        if self.ns.is_empty() || self.entries.is_empty() {
            return bad("need at least one n and one configuration");
        }
        Ok(())
    }

    /// Degrees `start, start + step, …` up to `stop`, rounded to six
    /// decimals so grids do not drift.
    pub fn degrees(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut k = 0u32;
        loop {
            let d = ((self.d_start + f64::from(k) * self.d_step) * 1e6).round() / 1e6;
            if d > self.d_stop + 1e-9 {
                break;
            }
            out.push(d);
            k += 1;
        }
        out
    }

    pub fn spec(&self, n: usize, d: f64, index: usize) -> GenSpec {
        GenSpec::new(self.model, n, d, instance_seed(self.seed, self.model, n, d, index)).with_label_size(self.l)
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Stable seed of instance `index` at point `(n, d)`.
pub fn instance_seed(base: u64, model: Model, n: usize, d: f64, index: usize) -> u64 {
    let model_tag = match model {
        Model::A => 1,
        Model::H => 2,
        Model::Custom => 3,
    };
    [model_tag, n as u64, d.to_bits(), index as u64]
        .into_iter()
        .fold(splitmix(base), |h, x| splitmix(h ^ x))
}

/// 1-indexed element `ceil(p/100 · N)` of the ascending sort.
pub fn percentile<T: Copy + PartialOrd>(values: &[T], p: f64) -> Result<T> {
    if values.is_empty() {
        return Err(Error::InvalidInput("percentile of an empty list".into()));
    }
    if !(p > 0.0 && p <= 100.0) {
        return Err(Error::InvalidInput(format!("percentile {p} outside (0, 100]")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let rank = (p / 100.0 * sorted.len() as f64).ceil() as usize;
    Ok(sorted[rank.clamp(1, sorted.len()) - 1])
}

/// One `(n, d, entry)` row of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    pub model: String,
    pub n: usize,
    pub d: f64,
    pub l: f64,
    pub count: usize,
    pub config: String,
    /// Share of decided instances that are consistent; empty when none was
    /// decided.
    pub p_sat: Option<f64>,
    /// Instances this entry left undecided at the cap.
    pub undecided: usize,
    pub nodes_p50: u64,
    pub nodes_p70: u64,
    pub nodes_p99: u64,
    pub ms_p50: f64,
    pub ms_p70: f64,
    pub ms_p99: f64,
    /// Instances on which some entry of the sweep hit the cap.
    pub hard_count: usize,
}

impl DataPoint {
    /// Copy with the timing columns zeroed, for comparisons across runs.
    pub fn without_timing(&self) -> DataPoint {
        DataPoint {
            ms_p50: 0.0,
            ms_p70: 0.0,
            ms_p99: 0.0,
            ..self.clone()
        }
    }
}

/// Result of one entry on one instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measurement {
    pub status: SolveStatus,
    pub nodes: u64,
    pub millis: f64,
}

/// Solves `inst` with `entry` under `cap` nodes.
pub fn measure(calculus: &Calculus, inst: &Instance, entry: SweepEntry, cap: u64) -> Result<Measurement> {
    match entry {
        SweepEntry::Config(cfg) => {
            let out = Solver::new(calculus, cfg).solve(&inst.network, cap)?;
            Ok(Measurement {
                status: out.status,
                nodes: out.visited_nodes,
                millis: out.wall_time.as_secs_f64() * 1e3,
            })
        }
        SweepEntry::Portfolio => {
            let out = run_portfolio(calculus, &inst.network, &default_plan(inst.network.len()))?;
            Ok(Measurement {
                status: out.status,
                nodes: out.total_nodes,
                millis: out.wall_time.as_secs_f64() * 1e3,
            })
        }
    }
}

fn aggregate(cfg: &SweepConfig, n: usize, d: f64, entry: SweepEntry, runs: &[Measurement], hard_count: usize) -> Result<DataPoint> {
    let decided: Vec<_> = runs.iter().filter(|m| m.status.is_decisive()).collect();
    let sat = decided.iter().filter(|m| m.status == SolveStatus::Consistent).count();
    let nodes: Vec<u64> = runs.iter().map(|m| m.nodes).collect();
    let ms: Vec<f64> = runs.iter().map(|m| m.millis).collect();
    Ok(DataPoint {
        model: cfg.model.to_string(),
        n,
        d,
        l: cfg.l,
        count: runs.len(),
        config: entry.to_string(),
        p_sat: (!decided.is_empty()).then(|| sat as f64 / decided.len() as f64),
        undecided: runs.len() - decided.len(),
        nodes_p50: percentile(&nodes, 50.0)?,
        nodes_p70: percentile(&nodes, 70.0)?,
        nodes_p99: percentile(&nodes, 99.0)?,
        ms_p50: percentile(&ms, 50.0)?,
        ms_p70: percentile(&ms, 70.0)?,
        ms_p99: percentile(&ms, 99.0)?,
        hard_count,
    })
}

/// Generates and solves every instance of the sweep. Rows come out ordered
/// by `n`, then `d`, then entry; node counts do not depend on the thread
/// count.
pub fn sweep(calculus: &Calculus, cfg: &SweepConfig) -> Result<Vec<DataPoint>> {
    cfg.validate()?;
    let mut points = Vec::new();
    for &n in &cfg.ns {
        for d in cfg.degrees() {
            let per_instance: Vec<Vec<Measurement>> = (0..cfg.instances)
                .into_par_iter()
                .map(|index| {
                    let spec = cfg.spec(n, d, index);
                    let context = || format!("model {} n={n} d={d} instance {index} (seed {})", cfg.model, spec.seed);
                    let inst = generate(&spec).map_err(|e| e.context(context()))?;
                    cfg.entries
                        .iter()
                        .map(|&e| measure(calculus, &inst, e, cfg.cap))
                        .collect::<Result<Vec<_>>>()
                        .map_err(|e| e.context(context()))
                })
                .collect::<Result<_>>()?;
            let hard_count = per_instance
                .iter()
                .filter(|runs| runs.iter().any(|m| !m.status.is_decisive()))
                .count();
            for (k, &entry) in cfg.entries.iter().enumerate() {
                let runs: Vec<Measurement> = per_instance.iter().map(|r| r[k]).collect();
                points.push(aggregate(cfg, n, d, entry, &runs, hard_count)?);
            }
        }
    }
    Ok(points)
}

/// Smallest degree at which `p_sat` falls to 0.5 or below, linearly
/// interpolated between grid points. Rows must share one `n` and entry.
pub fn crossover(points: &[DataPoint]) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = points.iter().filter_map(|p| p.p_sat.map(|s| (p.d, s))).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.first()?.1 <= 0.5 {
        return Some(pts[0].0);
    }
    pts.windows(2).find(|w| w[1].1 <= 0.5).map(|w| {
        let ((d0, p0), (d1, p1)) = (w[0], w[1]);
        if p0 == p1 {
            d1
        } else {
            d0 + (p0 - 0.5) / (p0 - p1) * (d1 - d0)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentile_examples() {
        let v: Vec<u32> = (1..=100).collect();
        assert_eq!(percentile(&v, 50.0).unwrap(), 50);
        assert_eq!(percentile(&[5], 99.0).unwrap(), 5);
        assert_eq!(percentile(&[3, 1, 2], 50.0).unwrap(), 2);
        assert_eq!(percentile(&v, 99.0).unwrap(), 99);
        assert_eq!(percentile(&v, 100.0).unwrap(), 100);
        assert!(percentile::<u32>(&[], 50.0).is_err());
        assert!(percentile(&v, 0.0).is_err());
    }

    #[test]
    fn percentiles_are_monotone() {
        let v = [9.5, 0.1, 3.3, 3.3, 7.0, 1.0, 2.0];
        let ps: Vec<f64> = [50.0, 70.0, 99.0].iter().map(|&p| percentile(&v, p).unwrap()).collect();
        assert!(ps.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn degree_grid() {
        let cfg = SweepConfig {
            model: Model::A,
            ns: vec![10],
            d_start: 6.0,
            d_stop: 13.0,
            d_step: 0.5,
            l: 4.0,
            instances: 1,
            entries: vec![SweepEntry::Portfolio],
            cap: 10,
            seed: 0,
        };
        let ds = cfg.degrees();
        assert_eq!(ds.len(), 15);
        assert_eq!(ds[0], 6.0);
        assert_eq!(ds[14], 13.0);
        assert_eq!(SweepConfig { d_step: 0.1, d_stop: 6.3, ..cfg }.degrees(), vec![6.0, 6.1, 6.2, 6.3]);
    }

    #[test]
    fn seeds_are_stable_and_distinct() {
        let a = instance_seed(1, Model::A, 30, 8.5, 0);
        assert_eq!(a, instance_seed(1, Model::A, 30, 8.5, 0));
        assert_ne!(a, instance_seed(1, Model::A, 30, 8.5, 1));
        assert_ne!(a, instance_seed(1, Model::H, 30, 8.5, 0));
        assert_ne!(a, instance_seed(1, Model::A, 31, 8.5, 0));
        assert_ne!(a, instance_seed(1, Model::A, 30, 9.0, 0));
        assert_ne!(a, instance_seed(2, Model::A, 30, 8.5, 0));
    }

    #[test]
    fn entries_parse() {
        assert_eq!("portfolio".parse::<SweepEntry>().unwrap(), SweepEntry::Portfolio);
        let e: SweepEntry = "Q8/static/global".parse().unwrap();
        assert_eq!(e.to_string(), "Q8/static/global");
    }

    #[test]
    fn crossover_interpolates() {
        let mk = |d: f64, p: f64| DataPoint {
            model: "A".into(),
            n: 10,
            d,
            l: 4.0,
            count: 1,
            config: "x".into(),
            p_sat: Some(p),
            undecided: 0,
            nodes_p50: 0,
            nodes_p70: 0,
            nodes_p99: 0,
            ms_p50: 0.0,
            ms_p70: 0.0,
            ms_p99: 0.0,
            hard_count: 0,
        };
        let pts = [mk(8.0, 0.9), mk(9.0, 0.7), mk(10.0, 0.3)];
        assert!((crossover(&pts).unwrap() - 9.5).abs() < 1e-12);
        assert_eq!(crossover(&[mk(8.0, 0.9)]), None);
        assert_eq!(crossover(&[mk(8.0, 0.4)]), Some(8.0));
    }
}
