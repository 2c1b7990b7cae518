use std::sync::OnceLock;

use crate::algebra::{CompositionTable, FullTable, WeightTable};
use crate::error::Result;
use crate::subclasses::{SplitSet, SplitSetId};

/// Every immutable table the solver consults: the base and lifted
/// composition tables, both weight tables and the five split sets with
/// their decompositions (built from the exact weights).
#[derive(Clone, Debug)]
pub struct Calculus {
    table: CompositionTable,
    full: FullTable,
    exact: WeightTable,
    approx: WeightTable,
    splits: Vec<SplitSet>,
}

impl Calculus {
    pub fn new(table: CompositionTable) -> Result<Calculus> {
        let full = FullTable::new(&table);
        let exact = WeightTable::exact(&full);
        let approx = WeightTable::approximate(&full);
        let splits = SplitSetId::ALL
            .iter()
            .map(|&id| SplitSet::new(id, &full, &exact))
            .collect::<Result<Vec<_>>>()?;
        Ok(Calculus {
            table,
            full,
            exact,
            approx,
            splits,
        })
    }

    /// The calculus built from the bundled table, constructed once per
    /// process.
    pub fn shared() -> &'static Calculus {
        static SHARED: OnceLock<Calculus> = OnceLock::new();
        SHARED.get_or_init(|| {
            Calculus::new(CompositionTable::standard()).expect("bundled tables are consistent")
        })
    }

    pub fn table(&self) -> &CompositionTable {
        &self.table
    }

    pub fn full(&self) -> &FullTable {
        &self.full
    }

    pub fn exact_weights(&self) -> &WeightTable {
        &self.exact
    }

    pub fn approx_weights(&self) -> &WeightTable {
        &self.approx
    }

    pub fn split(&self, id: SplitSetId) -> &SplitSet {
        &self.splits[id as usize]
    }
}
