//! Reference decision procedure that does not share code with the
//! path-consistency engine or the solver.
//!
//! It searches for an atomic refinement (one base relation per pair) that
//! satisfies every triangle, reading only base-pair entries of the
//! composition table. For RCC-8 such a scenario exists exactly when the
//! network has a model.

use crate::algebra::{BaseRelation, CompositionTable, Relation};
use crate::network::Network;

pub struct Oracle<'a> {
    table: &'a CompositionTable,
}

impl<'a> Oracle<'a> {
    pub fn new(table: &'a CompositionTable) -> Oracle<'a> {
        Oracle { table }
    }

    pub fn is_consistent(&self, net: &Network) -> bool {
        self.scenario(net).is_some()
    }

    /// An atomic refinement of `net` that is closed under composition, if
    /// one exists.
    pub fn scenario(&self, net: &Network) -> Option<Network> {
        let mut work = net.clone();
        if self.search(&mut work) {
            Some(work)
        } else {
            None
        }
    }

    fn compose(&self, a: Relation, b: Relation) -> Relation {
        self.table.entry(single(a), single(b))
    }

    fn search(&self, net: &mut Network) -> bool {
        let mut pick: Option<(usize, usize, u32)> = None;
        for (i, j, r) in net.edges() {
            let size = r.len();
            if size == 0 {
                return false;
            }
            if size > 1 && pick.is_none_or(|(_, _, s)| size < s) {
                pick = Some((i, j, size));
            }
        }
        let Some((i, j, _)) = pick else {
            return self.is_closed(net);
        };
        for b in net.get(i, j).bases() {
            let mut child = net.clone();
            child.set(i, j, b.into());
            if self.forward_check(&mut child, i, j) && self.search(&mut child) {
                *net = child;
                return true;
            }
        }
        false
    }

    /// Prunes the third side of every triangle through `(i, j)` whose other
    /// side is already a single base relation.
    fn forward_check(&self, net: &mut Network, i: usize, j: usize) -> bool {
        let b = net.get(i, j);
        for k in 0..net.len() {
            if k == i || k == j {
                continue;
            }
            let ik = net.get(i, k);
            if ik.len() == 1 {
                let allowed = self.compose(b.converse(), ik);
                if net.refine(j, k, allowed) && net.get(j, k).is_empty() {
                    return false;
                }
            }
            let jk = net.get(j, k);
            if jk.len() == 1 {
                let allowed = self.compose(b, jk);
                if net.refine(i, k, allowed) && net.get(i, k).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    fn is_closed(&self, net: &Network) -> bool {
        let n = net.len();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    if !net.get(i, k).is_subset(self.compose(net.get(i, j), net.get(j, k))) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn single(r: Relation) -> BaseRelation {
    debug_assert_eq!(r.len(), 1);
    BaseRelation::from_index(r.bits().trailing_zeros() as usize)
}

/// Shorthand for [`Oracle::is_consistent`].
pub fn brute_force_consistent(table: &CompositionTable, net: &Network) -> bool {
    Oracle::new(table).is_consistent(net)
}
