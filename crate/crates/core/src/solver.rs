//! Backtracking over split-set decompositions with path-consistency as
//! forward checking.

use std::cmp::Reverse;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::algebra::{Relation, WeightTable};
use crate::calculus::Calculus;
use crate::error::{Error, Result};
use crate::network::{Network, PathConsistency, QueueDiscipline};
use crate::subclasses::{SplitSet, SplitSetId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    /// Scores are computed once, on the network after the root PC run.
    Static,
    /// Scores are recomputed at every node.
    Dynamic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scope {
    /// Decomposition size, then weight of the edge itself.
    Local,
    /// Weight of the edge plus the weights of every path through it.
    Global,
}

impl Order {
    pub const ALL: [Order; 2] = [Order::Static, Order::Dynamic];

    pub fn name(self) -> &'static str {
        match self {
            Order::Static => "static",
            Order::Dynamic => "dynamic",
        }
    }
}

impl Scope {
    pub const ALL: [Scope; 2] = [Scope::Local, Scope::Global];

    pub fn name(self) -> &'static str {
        match self {
            Scope::Local => "local",
            Scope::Global => "global",
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Order> {
        Order::ALL
            .into_iter()
            .find(|o| o.name().eq_ignore_ascii_case(s) || o.name()[..1].eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown ordering `{s}`")))
    }
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Scope> {
        Scope::ALL
            .into_iter()
            .find(|o| o.name().eq_ignore_ascii_case(s) || o.name()[..1].eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown scope `{s}`")))
    }
}

/// One of the 20 search heuristics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HeuristicConfig {
    pub split: SplitSetId,
    pub order: Order,
    pub scope: Scope,
}

impl HeuristicConfig {
    pub const fn new(split: SplitSetId, order: Order, scope: Scope) -> HeuristicConfig {
        HeuristicConfig { split, order, scope }
    }

    /// All configurations, split set varying slowest.
    pub fn all() -> Vec<HeuristicConfig> {
        let mut out = Vec::with_capacity(20);
        for split in SplitSetId::ALL {
            for order in Order::ALL {
                for scope in Scope::ALL {
                    out.push(HeuristicConfig::new(split, order, scope));
                }
            }
        }
        out
    }

    /// Position in [`all`](Self::all).
    pub fn id(&self) -> usize {
        (self.split as usize) * 4 + (self.order as usize) * 2 + self.scope as usize
    }

    /// `split_order_scope`, as used in column names.
    pub fn column_name(&self) -> String {
        format!("{}_{}_{}", self.split, self.order, self.scope)
    }
}

impl fmt::Display for HeuristicConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.split, self.order, self.scope)
    }
}

impl FromStr for HeuristicConfig {
    type Err = Error;

    /// Accepts `H8/dynamic/local`, `H8-d-l` or `H8_dynamic_local`.
    fn from_str(s: &str) -> Result<HeuristicConfig> {
        let parts: Vec<&str> = s.split(['/', '-', '_']).collect();
        match parts.as_slice() {
            [split, order, scope] => Ok(HeuristicConfig::new(split.parse()?, order.parse()?, scope.parse()?)),
            _ => Err(Error::InvalidInput(format!("expected split/order/scope, got `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Consistent,
    Inconsistent,
    BudgetExhausted,
}

impl SolveStatus {
    pub fn name(self) -> &'static str {
        match self {
            SolveStatus::Consistent => "consistent",
            SolveStatus::Inconsistent => "inconsistent",
            SolveStatus::BudgetExhausted => "exhausted",
        }
    }

    /// Consistent or inconsistent.
    pub fn is_decisive(self) -> bool {
        self != SolveStatus::BudgetExhausted
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolveStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<SolveStatus> {
        match s {
            "consistent" => Ok(SolveStatus::Consistent),
            "inconsistent" => Ok(SolveStatus::Inconsistent),
            "exhausted" | "budget-exhausted" => Ok(SolveStatus::BudgetExhausted),
            _ => Err(Error::InvalidInput(format!("unknown status `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub visited_nodes: u64,
    pub wall_time: Duration,
    pub heuristic: HeuristicConfig,
    pub budget: u64,
}

/// How constrained an edge looks to the selection heuristics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstrainednessScore {
    pub edge: (usize, usize),
    pub decomposition_size: usize,
    pub weight: u8,
    /// Only computed for global scope.
    pub neighborhood_sum: Option<u32>,
}

pub fn local_score(net: &Network, edge: (usize, usize), split: &SplitSet, w: &WeightTable) -> ConstrainednessScore {
    let r = net.get(edge.0, edge.1);
    ConstrainednessScore {
        edge,
        decomposition_size: split.decomposition_size(r),
        weight: w.weight(r),
        neighborhood_sum: None,
    }
}

pub fn global_score(net: &Network, edge: (usize, usize), split: &SplitSet, w: &WeightTable) -> ConstrainednessScore {
    let (i, j) = edge;
    let r = net.get(i, j);
    let mut sum = u32::from(w.weight(r));
    for z in 0..net.len() {
        if z != i && z != j {
            sum += u32::from(w.weight(net.get(i, z))) + u32::from(w.weight(net.get(z, j)));
        }
    }
    ConstrainednessScore {
        edge,
        decomposition_size: split.decomposition_size(r),
        weight: w.weight(r),
        neighborhood_sum: Some(sum),
    }
}

// Per-edge row and column weight sums, so every neighbourhood sum is O(1).
fn line_sums(net: &Network, w: &WeightTable) -> (Vec<u32>, Vec<u32>) {
    let n = net.len();
    let mut rows = vec![0u32; n];
    let mut cols = vec![0u32; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let x = u32::from(w.weight(net.get(i, j)));
                rows[i] += x;
                cols[j] += x;
            }
        }
    }
    (rows, cols)
}

/// Sort key of an edge; smaller is selected first. Edges already in the
/// split set sort after all others.
fn score_key(
    net: &Network,
    i: usize,
    j: usize,
    scope: Scope,
    split: &SplitSet,
    w: &WeightTable,
    sums: Option<&(Vec<u32>, Vec<u32>)>,
) -> (bool, u32, u8) {
    let r = net.get(i, j);
    let size = split.decomposition_size(r);
    let weight = w.weight(r);
    match scope {
        Scope::Local => (size <= 1, size as u32, weight),
        Scope::Global => {
            let (rows, cols) = sums.expect("global scope needs line sums");
            // rows[i] and cols[j] both count M_ij once
            (size <= 1, rows[i] + cols[j] - u32::from(weight), 0)
        }
    }
}

/// The frozen edge order used by static configurations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StaticOrder {
    edges: Vec<(u16, u16)>,
}

impl StaticOrder {
    pub fn compute(net: &Network, scope: Scope, split: &SplitSet, w: &WeightTable) -> StaticOrder {
        let sums = (scope == Scope::Global).then(|| line_sums(net, w));
        let mut keyed: Vec<_> = net
            .edges()
            .map(|(i, j, _)| (score_key(net, i, j, scope, split, w, sums.as_ref()), i, j))
            .collect();
        keyed.sort_unstable();
        StaticOrder {
            edges: keyed.into_iter().map(|(_, i, j)| (i as u16, j as u16)).collect(),
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(|&(i, j)| (usize::from(i), usize::from(j)))
    }
}

/// Picks the next edge to branch on, or `None` when every edge lies in the
/// split set. Static configurations need the order frozen at the root.
pub fn select_constraint(
    net: &Network,
    cfg: &HeuristicConfig,
    calculus: &Calculus,
    order_cache: Option<&StaticOrder>,
) -> Option<(usize, usize)> {
    let split = calculus.split(cfg.split);
    let w = calculus.exact_weights();
    match cfg.order {
        Order::Static => {
            let order = order_cache.expect("static ordering needs a precomputed order");
            order.edges().find(|&(i, j)| !split.contains(net.get(i, j)))
        }
        Order::Dynamic => {
            let sums = (cfg.scope == Scope::Global).then(|| line_sums(net, w));
            let mut best: Option<((bool, u32, u8), usize, usize)> = None;
            for (i, j, r) in net.edges() {
                if split.contains(r) {
                    continue;
                }
                let key = score_key(net, i, j, cfg.scope, split, w, sums.as_ref());
                if best.is_none_or(|b| key < b.0) {
                    best = Some((key, i, j));
                }
            }
            best.map(|(_, i, j)| (i, j))
        }
    }
}

struct Frame<'c> {
    net: Network,
    edge: (usize, usize),
    parts: &'c [Relation],
    next: usize,
}

/// Backtracking solver for one heuristic configuration. Keeps its
/// path-consistency scratch space between solves.
pub struct Solver<'c> {
    calculus: &'c Calculus,
    cfg: HeuristicConfig,
    pc: PathConsistency<'c>,
}

impl<'c> Solver<'c> {
    pub fn new(calculus: &'c Calculus, cfg: HeuristicConfig) -> Solver<'c> {
        Solver {
            calculus,
            cfg,
            pc: PathConsistency::new(calculus, QueueDiscipline::ExactWeighted),
        }
    }

    pub fn config(&self) -> HeuristicConfig {
        self.cfg
    }

    /// Decides `net` visiting at most `budget` nodes. The root counts as
    /// the first node.
    pub fn solve(&mut self, net: &Network, budget: u64) -> Result<SolveOutcome> {
        net.validate()?;
        let start = Instant::now();
        let (status, visited_nodes) = self.search(net, budget);
        Ok(SolveOutcome {
            status,
            visited_nodes,
            wall_time: start.elapsed(),
            heuristic: self.cfg,
            budget,
        })
    }

    fn search(&mut self, input: &Network, budget: u64) -> (SolveStatus, u64) {
        if budget == 0 {
            return (SolveStatus::BudgetExhausted, 0);
        }
        let calculus = self.calculus;
        let cfg = self.cfg;
        let split = calculus.split(cfg.split);
        let mut visited = 1;
        let mut root = input.clone();
        if self.pc.run(&mut root).is_fail() {
            return (SolveStatus::Inconsistent, visited);
        }
        let order = (cfg.order == Order::Static)
            .then(|| StaticOrder::compute(&root, cfg.scope, split, calculus.exact_weights()));
        let Some(edge) = select_constraint(&root, &cfg, calculus, order.as_ref()) else {
            return (SolveStatus::Consistent, visited);
        };
        let parts = split.decompose(root.get(edge.0, edge.1));
        let mut stack = vec![Frame {
            net: root,
            edge,
            parts,
            next: 0,
        }];
        while let Some(top) = stack.last_mut() {
            if top.next == top.parts.len() {
                stack.pop();
                continue;
            }
            let part = top.parts[top.next];
            top.next += 1;
            if visited == budget {
                return (SolveStatus::BudgetExhausted, visited);
            }
            visited += 1;
            let (i, j) = top.edge;
            let mut child = top.net.clone();
            child.set(i, j, part);
            if self.pc.run_from_edge(&mut child, i, j).is_fail() {
                continue;
            }
            match select_constraint(&child, &cfg, calculus, order.as_ref()) {
                None => return (SolveStatus::Consistent, visited),
                Some(edge) => {
                    let parts = split.decompose(child.get(edge.0, edge.1));
                    stack.push(Frame {
                        net: child,
                        edge,
                        parts,
                        next: 0,
                    });
                }
            }
        }
        (SolveStatus::Inconsistent, visited)
    }
}

/// Solves with the shared calculus.
pub fn consistency(net: &Network, cfg: HeuristicConfig, budget: u64) -> Result<SolveOutcome> {
    Solver::new(Calculus::shared(), cfg).solve(net, budget)
}

/// Sorts parts least restricting first; the order decompositions are
/// stored in.
pub fn branch_order(parts: &mut [Relation], w: &WeightTable) {
    parts.sort_by_key(|&r| (Reverse(w.weight(r)), r.bits()));
}
