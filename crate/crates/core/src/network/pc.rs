use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use super::{Network, MAX_REGIONS};
use crate::algebra::{FullTable, Relation, WeightTable, MAX_WEIGHT};
use crate::calculus::Calculus;
use crate::error::Error;

/// How the path queue orders its entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QueueDiscipline {
    /// First in, first out.
    Unweighted,
    /// Lowest `w(M_pr) + w(M_rq)` first, with approximate weights.
    ApproxWeighted,
    /// Lowest `w(M_pr) + w(M_rq)` first, with exact weights.
    ExactWeighted,
}

impl QueueDiscipline {
    pub const ALL: [QueueDiscipline; 3] = [
        QueueDiscipline::Unweighted,
        QueueDiscipline::ApproxWeighted,
        QueueDiscipline::ExactWeighted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QueueDiscipline::Unweighted => "unweighted",
            QueueDiscipline::ApproxWeighted => "approx",
            QueueDiscipline::ExactWeighted => "exact",
        }
    }
}

impl fmt::Display for QueueDiscipline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QueueDiscipline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        QueueDiscipline::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown queue discipline `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PcStatus {
    /// No entry became empty; the network is path-consistent.
    PathConsistent,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PcResult {
    pub status: PcStatus,
    /// REVISE calls that shrank an entry.
    pub revisions: u64,
    /// Pushes plus live pops.
    pub queue_ops: u64,
}

impl PcResult {
    pub fn is_fail(&self) -> bool {
        self.status == PcStatus::Fail
    }
}

/// `M_ij := M_ij ∩ (M_ik ∘ M_kj)`, also writing the converse entry.
/// Returns true if `M_ij` changed.
#[inline]
pub fn revise(net: &mut Network, full: &FullTable, i: usize, k: usize, j: usize) -> bool {
    debug_assert!(i != j && k != i && k != j);
    let n = net.n;
    let old = net.cells[i * n + j];
    let new = old & full.compose(net.cells[i * n + k], net.cells[k * n + j]);
    if new == old {
        return false;
    }
    net.cells[i * n + j] = new;
    net.cells[j * n + i] = new.converse();
    true
}

const BUCKETS: usize = 2 * MAX_WEIGHT as usize + 1;

/// Reusable path-consistency engine. Scratch space grows to `n³` bytes for
/// the largest network seen and is reused across runs, so a solver keeps
/// one engine for a whole search.
pub struct PathConsistency<'a> {
    full: &'a FullTable,
    weights: Option<&'a WeightTable>,
    discipline: QueueDiscipline,
    n: usize,
    // 0 when a path is not queued, otherwise the priority it is queued at
    queued: Vec<u8>,
    fifo: VecDeque<u32>,
    buckets: Vec<VecDeque<u32>>,
    lowest: usize,
    ops: u64,
}

impl<'a> PathConsistency<'a> {
    pub fn new(calculus: &'a Calculus, discipline: QueueDiscipline) -> PathConsistency<'a> {
        let weights = match discipline {
            QueueDiscipline::Unweighted => None,
            QueueDiscipline::ApproxWeighted => Some(calculus.approx_weights()),
            QueueDiscipline::ExactWeighted => Some(calculus.exact_weights()),
        };
        PathConsistency {
            full: calculus.full(),
            weights,
            discipline,
            n: 0,
            queued: Vec::new(),
            fifo: VecDeque::new(),
            buckets: (0..BUCKETS).map(|_| VecDeque::new()).collect(),
            lowest: BUCKETS,
            ops: 0,
        }
    }

    pub fn discipline(&self) -> QueueDiscipline {
        self.discipline
    }

    /// Full path-consistency from the initial queue of every path.
    pub fn run(&mut self, net: &mut Network) -> PcResult {
        if net.is_failed() {
            return PcResult {
                status: PcStatus::Fail,
                revisions: 0,
                queue_ops: 0,
            };
        }
        self.prepare(net.len());
        let n = net.len();
        // Initial queue {(i, j, k), (k, i, j) | i < j}, i.e. every path
        // (p, r, q) with p < r or r < q. Paths with a universal leg are
        // left out by push anyway, so walk only the constrained neighbours
        // of each middle region.
        let mut neighbours: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, j, rel) in net.edges() {
            if rel != Relation::UNIVERSAL {
                neighbours[i].push(j);
                neighbours[j].push(i);
            }
        }
        for (r, around) in neighbours.iter().enumerate() {
            for &p in around {
                for &q in around {
                    if p != q && (p < r || r < q) {
                        self.push(net, p, r, q);
                    }
                }
            }
        }
        self.drain(net)
    }

    /// Propagates a change to `M_ij` on a network that was path-consistent
    /// before it. Only paths through the changed edge are queued.
    pub fn run_from_edge(&mut self, net: &mut Network, i: usize, j: usize) -> PcResult {
        if net.get(i, j).is_empty() {
            return PcResult {
                status: PcStatus::Fail,
                revisions: 0,
                queue_ops: 0,
            };
        }
        self.prepare(net.len());
        self.push_around(net, i, j);
        self.drain(net)
    }

    fn prepare(&mut self, n: usize) {
        assert!(n <= MAX_REGIONS, "networks are limited to {MAX_REGIONS} regions");
        if n != self.n {
            self.n = n;
            self.queued.clear();
            self.queued.resize(n * n * n, 0);
        }
        self.ops = 0;
    }

    fn drain(&mut self, net: &mut Network) -> PcResult {
        let n = self.n;
        let mut revisions = 0;
        while let Some(id) = self.pop() {
            let id = id as usize;
            let (p, r, q) = (id / (n * n), id / n % n, id % n);
            if revise(net, self.full, p, r, q) {
                revisions += 1;
                if net.get(p, q).is_empty() {
                    self.clear();
                    return PcResult {
                        status: PcStatus::Fail,
                        revisions,
                        queue_ops: self.ops,
                    };
                }
                self.push_around(net, p, q);
            }
        }
        PcResult {
            status: PcStatus::PathConsistent,
            revisions,
            queue_ops: self.ops,
        }
    }

    // Q := Q ∪ {(p, q, s), (s, p, q) | s ≠ p, s ≠ q}
    #[inline]
    fn push_around(&mut self, net: &Network, p: usize, q: usize) {
        for s in 0..self.n {
            if s != p && s != q {
                self.push(net, p, q, s);
                self.push(net, s, p, q);
            }
        }
    }

    #[inline]
    fn push(&mut self, net: &Network, p: usize, r: usize, q: usize) {
        let n = self.n;
        let (a, b) = (net.cells[p * n + r], net.cells[r * n + q]);
        if a == Relation::UNIVERSAL || b == Relation::UNIVERSAL {
            return;
        }
        let id = p * n * n + r * n + q;
        match self.weights {
            None => {
                if self.queued[id] == 0 {
                    self.queued[id] = 1;
                    self.fifo.push_back(id as u32);
                    self.ops += 1;
                }
            }
            Some(w) => {
                let prio = w.weight(a) + w.weight(b);
                let current = self.queued[id];
                // a lower priority supersedes the queued entry, which is
                // then skipped as stale when it surfaces
                if current == 0 || prio < current {
                    self.queued[id] = prio;
                    self.buckets[prio as usize].push_back(id as u32);
                    self.lowest = self.lowest.min(prio as usize);
                    self.ops += 1;
                }
            }
        }
    }

    #[inline]
    fn pop(&mut self) -> Option<u32> {
        if self.weights.is_none() {
            let id = self.fifo.pop_front()?;
            self.queued[id as usize] = 0;
            self.ops += 1;
            return Some(id);
        }
        while self.lowest < BUCKETS {
            match self.buckets[self.lowest].pop_front() {
                Some(id) => {
                    if usize::from(self.queued[id as usize]) == self.lowest {
                        self.queued[id as usize] = 0;
                        self.ops += 1;
                        return Some(id);
                    }
                }
                None => self.lowest += 1,
            }
        }
        None
    }

    fn clear(&mut self) {
        for id in self.fifo.drain(..) {
            self.queued[id as usize] = 0;
        }
        for bucket in &mut self.buckets {
            for id in bucket.drain(..) {
                self.queued[id as usize] = 0;
            }
        }
        self.lowest = BUCKETS;
    }
}

/// Convenience wrapper running full path-consistency once.
pub fn path_consistency(calculus: &Calculus, net: &mut Network, discipline: QueueDiscipline) -> PcResult {
    PathConsistency::new(calculus, discipline).run(net)
}
