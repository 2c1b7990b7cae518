//! Running several heuristics on one instance under divided node budgets,
//! and choosing which heuristics to combine from recorded runs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::calculus::Calculus;
use crate::error::{Error, Result};
use crate::network::Network;
use crate::solver::{HeuristicConfig, Order, Scope, SolveOutcome, SolveStatus, Solver};
use crate::subclasses::SplitSetId;

/// Outcome of one configuration on one instance, as recorded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConfigRun {
    pub status: SolveStatus,
    pub visited_nodes: u64,
}

impl ConfigRun {
    /// True if a run limited to `budget` nodes would have decided the
    /// instance.
    pub fn solved_within(&self, budget: u64) -> bool {
        self.status.is_decisive() && self.visited_nodes <= budget
    }
}

/// All 20 configurations' results on one instance, at a common node cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunRecord {
    pub instance_id: String,
    pub cap: u64,
    /// Indexed by [`HeuristicConfig::id`].
    pub runs: Vec<ConfigRun>,
}

impl RunRecord {
    pub fn run(&self, cfg: HeuristicConfig) -> ConfigRun {
        self.runs[cfg.id()]
    }

    /// Smallest node count among decisive runs.
    pub fn fastest(&self) -> Option<u64> {
        self.runs
            .iter()
            .filter(|r| r.status.is_decisive())
            .map(|r| r.visited_nodes)
            .min()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RecordRow {
    instance_id: String,
    split: String,
    order: String,
    scope: String,
    status: String,
    visited_nodes: u64,
    cap: u64,
}

pub fn write_records(path: impl AsRef<Path>, records: &[RunRecord]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    // header even when there are no rows
    if records.is_empty() {
        w.write_record(["instance_id", "split", "order", "scope", "status", "visited_nodes", "cap"])
            .map_err(|e| csv_error(path, e))?;
    }
    for rec in records {
        for cfg in HeuristicConfig::all() {
            let run = rec.run(cfg);
            w.serialize(RecordRow {
                instance_id: rec.instance_id.clone(),
                split: cfg.split.to_string(),
                order: cfg.order.to_string(),
                scope: cfg.scope.to_string(),
                status: run.status.to_string(),
                visited_nodes: run.visited_nodes,
                cap: rec.cap,
            })
            .map_err(|e| csv_error(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a records CSV; every instance must list all 20 configurations
/// with one common cap.
pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut by_instance: BTreeMap<String, (u64, Vec<Option<ConfigRun>>)> = BTreeMap::new();
    let mut order = Vec::new();
    for (k, row) in rdr.deserialize::<RecordRow>().enumerate() {
        // header is line 1
        let line = k + 2;
        let row = row.map_err(|e| Error::parse(line, e.to_string()))?;
        let at = |e: Error| Error::parse(line, e.to_string());
        let cfg = HeuristicConfig::new(
            row.split.parse().map_err(at)?,
            row.order.parse().map_err(at)?,
            row.scope.parse().map_err(at)?,
        );
        let status: SolveStatus = row.status.parse().map_err(at)?;
        if row.visited_nodes > row.cap {
            return Err(Error::parse(line, "visited_nodes exceeds cap"));
        }
        let entry = by_instance.entry(row.instance_id.clone()).or_insert_with(|| {
            order.push(row.instance_id.clone());
            (row.cap, vec![None; 20])
        });
        if entry.0 != row.cap {
            return Err(Error::parse(line, format!("instance {} mixes caps", row.instance_id)));
        }
        if entry.1[cfg.id()].is_some() {
            return Err(Error::parse(line, format!("duplicate row for {} {cfg}", row.instance_id)));
        }
        entry.1[cfg.id()] = Some(ConfigRun {
            status,
            visited_nodes: row.visited_nodes,
        });
    }
    order
        .into_iter()
        .map(|id| {
            let (cap, runs) = by_instance.remove(&id).expect("every listed id has an entry");
            let runs = runs
                .into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::InvalidInput(format!("{}: instance {id} lacks some configurations", path.display())))?;
            Ok(RunRecord {
                instance_id: id,
                cap,
                runs,
            })
        })
        .collect()
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::InvalidInput(format!("{}: {e}", path.display()))
}

/// Configurations tried in sequence, each with its own node budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortfolioPlan {
    pub steps: Vec<(HeuristicConfig, u64)>,
}

impl PortfolioPlan {
    pub fn total_budget(&self) -> u64 {
        self.steps.iter().map(|s| s.1).sum()
    }

    /// Plan file: one `split order scope budget` line per step.
    pub fn parse(text: &str) -> Result<PortfolioPlan> {
        let mut steps = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |e: Error| Error::parse(k + 1, e.to_string());
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [split, order, scope, budget] = fields.as_slice() else {
                return Err(Error::parse(k + 1, "expected `split order scope budget`"));
            };
            let cfg = HeuristicConfig::new(split.parse().map_err(at)?, order.parse().map_err(at)?, scope.parse().map_err(at)?);
            let budget: u64 = budget
                .parse()
                .map_err(|_| Error::parse(k + 1, format!("bad budget `{budget}`")))?;
            steps.push((cfg, budget));
        }
        if steps.is_empty() {
            return Err(Error::InvalidInput("plan has no steps".into()));
        }
        Ok(PortfolioPlan { steps })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<PortfolioPlan> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| e.context(path.display().to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (cfg, budget) in &self.steps {
            let _ = writeln!(s, "{} {} {} {budget}", cfg.split, cfg.order, cfg.scope);
        }
        s
    }
}

/// The four-heuristic plan with `2n` nodes each.
pub fn default_plan(n: usize) -> PortfolioPlan {
    use {Order::*, Scope::*, SplitSetId::*};
    let budget = 2 * n as u64;
    PortfolioPlan {
        steps: vec![
            (HeuristicConfig::new(H8, Dynamic, Local), budget),
            (HeuristicConfig::new(H8, Static, Global), budget),
            (HeuristicConfig::new(C8, Dynamic, Local), budget),
            (HeuristicConfig::new(Bhat, Static, Local), budget),
        ],
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortfolioOutcome {
    pub status: SolveStatus,
    pub first_responder: Option<HeuristicConfig>,
    /// Nodes spent across every attempted step.
    pub total_nodes: u64,
    pub wall_time: Duration,
    pub attempts: Vec<SolveOutcome>,
}

/// Runs the plan's steps in order until one decides the instance.
pub fn run_portfolio(calculus: &Calculus, net: &Network, plan: &PortfolioPlan) -> Result<PortfolioOutcome> {
    let start = Instant::now();
    let mut attempts = Vec::new();
    let mut total_nodes = 0;
    for &(cfg, budget) in &plan.steps {
        let out = Solver::new(calculus, cfg).solve(net, budget)?;
        total_nodes += out.visited_nodes;
        attempts.push(out);
        if out.status.is_decisive() {
            return Ok(PortfolioOutcome {
                status: out.status,
                first_responder: Some(cfg),
                total_nodes,
                wall_time: start.elapsed(),
                attempts,
            });
        }
    }
    Ok(PortfolioOutcome {
        status: SolveStatus::BudgetExhausted,
        first_responder: None,
        total_nodes,
        wall_time: start.elapsed(),
        attempts,
    })
}

/// What a plan would do on a recorded instance, without solving anything.
pub fn replay_portfolio(record: &RunRecord, plan: &PortfolioPlan) -> Result<(SolveStatus, Option<HeuristicConfig>, u64)> {
    let mut total = 0;
    for &(cfg, budget) in &plan.steps {
        if budget > record.cap {
            return Err(Error::InvalidInput(format!(
                "budget {budget} exceeds the recorded cap {}",
                record.cap
            )));
        }
        let run = record.run(cfg);
        if run.solved_within(budget) {
            return Ok((run.status, Some(cfg), total + run.visited_nodes));
        }
        total += budget;
    }
    Ok((SolveStatus::BudgetExhausted, None, total))
}

/// Best subset of configurations for one total budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinationResult {
    pub budget: u64,
    pub solved: usize,
    pub combination: Vec<HeuristicConfig>,
}

impl CombinationResult {
    pub fn combination_label(&self) -> String {
        self.combination
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join("+")
    }
}

type Bits = Vec<u64>;

fn solved_bits(records: &[RunRecord], cfg: HeuristicConfig, budget: u64) -> Bits {
    let mut bits = vec![0u64; records.len().div_ceil(64)];
    for (k, rec) in records.iter().enumerate() {
        if rec.run(cfg).solved_within(budget) {
            bits[k / 64] |= 1 << (k % 64);
        }
    }
    bits
}

fn check_caps(records: &[RunRecord], budget: u64) -> Result<()> {
    if records.is_empty() {
        return Err(Error::InvalidInput("no run records".into()));
    }
    if let Some(r) = records.iter().find(|r| r.cap < budget) {
        return Err(Error::InvalidInput(format!(
            "instance {} was recorded with cap {} below the budget {budget}",
            r.instance_id, r.cap
        )));
    }
    Ok(())
}

/// Instances one configuration solves within `budget` nodes.
pub fn solved_by(records: &[RunRecord], cfg: HeuristicConfig, budget: u64) -> usize {
    records.iter().filter(|r| r.run(cfg).solved_within(budget)).count()
}

/// Instances a subset solves when each member gets `total_budget / |H|`
/// nodes.
pub fn solved_by_subset(records: &[RunRecord], subset: &[HeuristicConfig], total_budget: u64) -> usize {
    if subset.is_empty() {
        return 0;
    }
    let each = total_budget / subset.len() as u64;
    records
        .iter()
        .filter(|r| subset.iter().any(|&c| r.run(c).solved_within(each)))
        .count()
}

/// Searches all non-empty subsets of the 20 configurations for the one
/// solving most instances when the budget is split evenly among members.
/// Ties go to smaller subsets, then to lexicographically smaller id lists.
pub fn optimize_combination(records: &[RunRecord], total_budget: u64) -> Result<CombinationResult> {
    check_caps(records, total_budget)?;
    let configs = HeuristicConfig::all();
    let words = records.len().div_ceil(64);
    let mut best: Option<(usize, Vec<usize>)> = None;
    for k in 1..=configs.len() {
        let each = total_budget / k as u64;
        let bits: Vec<Bits> = configs.iter().map(|&c| solved_bits(records, c, each)).collect();
        let mut chosen = Vec::with_capacity(k);
        let mut acc = vec![vec![0u64; words]; k + 1];
        subsets(&bits, k, 0, &mut chosen, &mut acc, &mut best);
    }
    let (solved, ids) = best.expect("at least one subset exists");
    Ok(CombinationResult {
        budget: total_budget,
        solved,
        combination: ids.into_iter().map(|i| configs[i]).collect(),
    })
}

// Depth-first over subsets of size k in lexicographic order, keeping the
// running union of solved sets per depth.
fn subsets(
    bits: &[Bits],
    k: usize,
    from: usize,
    chosen: &mut Vec<usize>,
    acc: &mut [Bits],
    best: &mut Option<(usize, Vec<usize>)>,
) {
    let depth = chosen.len();
    if depth == k {
        let solved: usize = acc[depth].iter().map(|w| w.count_ones() as usize).sum();
        if best.as_ref().is_none_or(|b| solved > b.0) {
            *best = Some((solved, chosen.clone()));
        }
        return;
    }
    for c in from..=bits.len() - (k - depth) {
        let (lo, hi) = acc.split_at_mut(depth + 1);
        for (w, (a, b)) in hi[0].iter_mut().zip(lo[depth].iter().zip(&bits[c])) {
            *w = a | b;
        }
        chosen.push(c);
        subsets(bits, k, c + 1, chosen, acc, best);
        chosen.pop();
    }
}

/// Per-configuration share of instances solved within the cap, and share of
/// first responses among instances any configuration solved. Ties credit
/// every fastest configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FirstResponse {
    pub config: HeuristicConfig,
    pub solved_pct: f64,
    pub first_pct: f64,
}

pub fn first_response_table(records: &[RunRecord]) -> Result<Vec<FirstResponse>> {
    if records.is_empty() {
        return Err(Error::InvalidInput("no run records".into()));
    }
    let solved_any = records.iter().filter(|r| r.fastest().is_some()).count();
    Ok(HeuristicConfig::all()
        .into_iter()
        .map(|cfg| {
            let solved = records.iter().filter(|r| r.run(cfg).status.is_decisive()).count();
            let first = records
                .iter()
                .filter(|r| {
                    let run = r.run(cfg);
                    run.status.is_decisive() && Some(run.visited_nodes) == r.fastest()
                })
                .count();
            FirstResponse {
                config: cfg,
                solved_pct: 100.0 * solved as f64 / records.len() as f64,
                first_pct: if solved_any == 0 {
                    0.0
                } else {
                    100.0 * first as f64 / solved_any as f64
                },
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: &str, cap: u64, f: impl Fn(HeuristicConfig) -> ConfigRun) -> RunRecord {
        RunRecord {
            instance_id: id.into(),
            cap,
            runs: HeuristicConfig::all().into_iter().map(f).collect(),
        }
    }

    fn exhausted(cap: u64) -> ConfigRun {
        ConfigRun {
            status: SolveStatus::BudgetExhausted,
            visited_nodes: cap,
        }
    }

    fn solved(nodes: u64) -> ConfigRun {
        ConfigRun {
            status: SolveStatus::Consistent,
            visited_nodes: nodes,
        }
    }

    #[test]
    fn default_plan_budgets() {
        let plan = default_plan(500);
        assert!(plan.steps.iter().all(|s| s.1 == 1000));
        assert_eq!(plan.total_budget(), 4000);
        let plan = default_plan(2);
        assert!(plan.steps.iter().all(|s| s.1 == 4));
        let names: Vec<_> = plan.steps.iter().map(|s| s.0.to_string()).collect();
        assert_eq!(names, ["H8/dynamic/local", "H8/static/global", "C8/dynamic/local", "Bhat/static/local"]);
    }

    #[test]
    fn plan_text_round_trip() {
        let plan = default_plan(30);
        assert_eq!(PortfolioPlan::parse(&plan.to_text()).unwrap(), plan);
        assert!(PortfolioPlan::parse("H8 dynamic local\n").is_err());
        assert!(PortfolioPlan::parse("# nothing\n").is_err());
        assert!(matches!(PortfolioPlan::parse("\nH8 sideways local 5\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn synthetic_pair_beats_either_alone() {
        let a = HeuristicConfig::all()[0];
        let b = HeuristicConfig::all()[1];
        let recs: Vec<_> = (1..=3)
            .map(|k| {
                record(&k.to_string(), 100, |c| {
                    if (c == a && k <= 2) || (c == b && k == 3) {
                        solved(50)
                    } else {
                        exhausted(100)
                    }
                })
            })
            .collect();
        assert_eq!(solved_by_subset(&recs, &[a], 100), 2);
        assert_eq!(solved_by_subset(&recs, &[b], 100), 1);
        assert_eq!(solved_by_subset(&recs, &[a, b], 100), 3);
        let best = optimize_combination(&recs, 100).unwrap();
        assert_eq!(best.solved, 3);
        assert_eq!(best.combination, vec![a, b]);
        // at 99 each member only gets 49 nodes
        assert_eq!(optimize_combination(&recs, 99).unwrap().solved, 2);
    }

    #[test]
    fn optimizer_ties_prefer_small_then_lexicographic() {
        let recs = vec![record("x", 10, |_| solved(1))];
        let best = optimize_combination(&recs, 10).unwrap();
        assert_eq!(best.combination, vec![HeuristicConfig::all()[0]]);
    }

    #[test]
    fn optimizer_rejects_low_caps_and_empty_input() {
        let recs = vec![record("x", 10, |_| solved(1))];
        assert!(optimize_combination(&recs, 11).is_err());
        assert!(optimize_combination(&[], 10).is_err());
    }

    #[test]
    fn singletons_reproduce_per_config_counts() {
        let recs: Vec<_> = (0..40u64)
            .map(|k| record(&k.to_string(), 1000, |c| {
                let nodes = (k * 37 + c.id() as u64 * 101) % 1200;
                if nodes >= 1000 { exhausted(1000) } else { solved(nodes) }
            }))
            .collect();
        for cfg in HeuristicConfig::all() {
            assert_eq!(solved_by_subset(&recs, &[cfg], 700), solved_by(&recs, cfg, 700));
        }
        let all = HeuristicConfig::all();
        let by_any = recs
            .iter()
            .filter(|r| all.iter().any(|&c| r.run(c).solved_within(1000 / 20)))
            .count();
        assert_eq!(solved_by_subset(&recs, &all, 1000), by_any);
        let mut last = 0;
        for budget in [20, 50, 100, 200, 500, 1000] {
            let res = optimize_combination(&recs, budget).unwrap();
            assert!(res.solved >= last);
            assert_eq!(res.solved, solved_by_subset(&recs, &res.combination, budget));
            last = res.solved;
        }
    }

    #[test]
    fn first_response_credits_ties() {
        let a = HeuristicConfig::all()[3];
        let b = HeuristicConfig::all()[7];
        let recs: Vec<_> = (0..4)
            .map(|k| record(&k.to_string(), 100, |c| if c == a || c == b { solved(5) } else { solved(9) }))
            .collect();
        let table = first_response_table(&recs).unwrap();
        assert_eq!(table[a.id()].first_pct, 100.0);
        assert_eq!(table[b.id()].first_pct, 100.0);
        assert_eq!(table[0].first_pct, 0.0);
        assert_eq!(table[0].solved_pct, 100.0);
        assert!(first_response_table(&[]).is_err());
    }

    #[test]
    fn replay_matches_plan_semantics() {
        let plan = default_plan(5);
        let second = plan.steps[1].0;
        let rec = record("r", 100, |c| if c == second { solved(7) } else { exhausted(100) });
        let (status, who, total) = replay_portfolio(&rec, &plan).unwrap();
        assert_eq!(status, SolveStatus::Consistent);
        assert_eq!(who, Some(second));
        assert_eq!(total, 10 + 7);
        let rec = record("r", 100, |_| exhausted(100));
        assert_eq!(replay_portfolio(&rec, &plan).unwrap(), (SolveStatus::BudgetExhausted, None, 40));
    }

    #[test]
    fn records_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.csv");
        let recs: Vec<_> = (0..3)
            .map(|k| record(&format!("inst{k}"), 50, |c| if c.id() % 3 == k { solved(c.id() as u64) } else { exhausted(50) }))
            .collect();
        write_records(&path, &recs).unwrap();
        assert_eq!(read_records(&path).unwrap(), recs);

        let text = std::fs::read_to_string(&path).unwrap();
        let truncated: String = text.lines().take(10).map(|l| format!("{l}\n")).collect();
        std::fs::write(&path, truncated).unwrap();
        assert!(read_records(&path).is_err());
    }
}
