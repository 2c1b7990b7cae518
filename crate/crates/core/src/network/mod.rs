//! Constraint networks over RCC-8 and the path-consistency engine.

mod io;
mod pc;

use std::fmt;

pub use io::{Instance, InstanceMeta, Model};
pub use pc::{path_consistency, revise, PathConsistency, PcResult, PcStatus, QueueDiscipline};

use crate::algebra::Relation;
use crate::error::{Error, Result};

/// Largest supported region count; path ids must fit in 32 bits.
pub const MAX_REGIONS: usize = 1600;

/// An `n × n` matrix of relations with `{EQ}` on the diagonal and
/// `M[j][i] = M[i][j]⌣` everywhere.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Network {
    n: usize,
    cells: Vec<Relation>,
}

impl Network {
    /// All-universal network on `n` regions.
    pub fn new(n: usize) -> Network {
        assert!(n <= MAX_REGIONS, "networks are limited to {MAX_REGIONS} regions");
        let mut cells = vec![Relation::UNIVERSAL; n * n];
        for i in 0..n {
            cells[i * n + i] = Relation::EQ;
        }
        Network { n, cells }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Relation {
        self.cells[i * self.n + j]
    }

    /// Sets `M[i][j]` and its converse entry `M[j][i]`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, r: Relation) {
        self.cells[i * self.n + j] = r;
        self.cells[j * self.n + i] = r.converse();
    }

    /// Intersects `M[i][j]` with `r`, keeping the converse in step. Returns
    /// true if the entry shrank.
    pub fn refine(&mut self, i: usize, j: usize, r: Relation) -> bool {
        let old = self.get(i, j);
        let new = old & r;
        if new == old {
            return false;
        }
        self.set(i, j, new);
        true
    }

    /// True when some entry is empty.
    pub fn is_failed(&self) -> bool {
        self.cells.iter().any(|r| r.is_empty())
    }

    /// Entries above the diagonal as `(i, j, M[i][j])`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Relation)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| (i, j, self.get(i, j))))
    }

    /// Checks the diagonal and converse-symmetry invariants.
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.n {
            if self.get(i, i) != Relation::EQ {
                return Err(Error::InvalidNetwork(format!(
                    "diagonal entry {i} is {} instead of EQ",
                    self.get(i, i)
                )));
            }
            for j in i + 1..self.n {
                if self.get(j, i) != self.get(i, j).converse() {
                    return Err(Error::InvalidNetwork(format!(
                        "entries ({i},{j}) and ({j},{i}) are not converses"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Raw row-major cells.
    pub fn cells(&self) -> &[Relation] {
        &self.cells
    }

    /// Mutable raw cells; writes bypass the converse bookkeeping.
    #[cfg(test)]
    pub(crate) fn cells_mut(&mut self) -> &mut [Relation] {
        &mut self.cells
    }
}

impl fmt::Debug for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Network(n={})", self.n)?;
        for (i, j, r) in self.edges().filter(|e| e.2 != Relation::UNIVERSAL) {
            writeln!(f, "  {i} {j} : {r}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BaseRelation::*;

    #[test]
    fn new_network_invariants() {
        let net = Network::new(5);
        net.validate().unwrap();
        assert!(!net.is_failed());
        assert_eq!(net.edges().count(), 10);
    }

    #[test]
    fn set_keeps_converse() {
        let mut net = Network::new(3);
        net.set(0, 2, Relation::of(&[TPP, DC]));
        assert_eq!(net.get(2, 0), Relation::of(&[TPPi, DC]));
        net.validate().unwrap();
        assert!(net.refine(2, 0, Relation::of(&[TPPi])));
        assert_eq!(net.get(0, 2), Relation::of(&[TPP]));
        assert!(!net.refine(2, 0, Relation::UNIVERSAL));
    }

    #[test]
    fn validate_catches_broken_diagonal() {
        let mut net = Network::new(2);
        net.cells[0] = Relation::UNIVERSAL;
        assert!(net.validate().is_err());
    }
}
