use super::{BaseRelation, FullTable, Relation};

pub const MIN_WEIGHT: u8 = 1;
pub const MAX_WEIGHT: u8 = 16;

/// Restrictiveness of each relation, scaled to `1..=16`.
///
/// A low weight marks a relation that restricts its neighbourhood strongly
/// (`{EQ}` gets 1), a high one a relation that barely restricts it (the
/// universal relation gets 16). The empty relation has no weight; its slot
/// holds 0 and is never consulted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightTable {
    weights: [u8; 256],
    raw: [u32; 256],
}

impl WeightTable {
    /// Exact restrictiveness: the raw score of `R` is the summed cardinality
    /// of `R ∘ S` over every non-empty `S`.
    pub fn exact(full: &FullTable) -> WeightTable {
        let mut raw = [0u32; 256];
        for r in Relation::non_empty() {
            raw[r.index()] = Relation::non_empty().map(|s| full.compose(r, s).len()).sum();
        }
        Self::from_raw(raw)
    }

    /// Approximate restrictiveness: each base relation is scored as in
    /// [`exact`](Self::exact), and a disjunction sums the scores of its bases.
    pub fn approximate(full: &FullTable) -> WeightTable {
        let base_score = |b: BaseRelation| -> u32 {
            Relation::non_empty().map(|s| full.compose(b.into(), s).len()).sum()
        };
        let scores: Vec<u32> = BaseRelation::ALL.iter().map(|&b| base_score(b)).collect();
        let mut raw = [0u32; 256];
        for r in Relation::non_empty() {
            raw[r.index()] = r.bases().map(|b| scores[b.index()]).sum();
        }
        Self::from_raw(raw)
    }

    /// Scales raw scores of the non-empty relations affinely onto `1..=16`,
    /// rounding half up.
    pub fn from_raw(raw: [u32; 256]) -> WeightTable {
        let (lo, hi) = Relation::non_empty()
            .map(|r| raw[r.index()])
            .fold((u32::MAX, 0), |(lo, hi), x| (lo.min(x), hi.max(x)));
        let span = u64::from(hi - lo);
        let mut weights = [0u8; 256];
        for r in Relation::non_empty() {
            let w = if span == 0 {
                MIN_WEIGHT
            } else {
                // 1 + floor(15 * (x - lo) / span + 1/2)
                let num = 30 * u64::from(raw[r.index()] - lo) + span;
                MIN_WEIGHT + (num / (2 * span)) as u8
            };
            weights[r.index()] = w;
        }
        WeightTable { weights, raw }
    }

    #[inline]
    pub fn weight(&self, r: Relation) -> u8 {
        debug_assert!(!r.is_empty(), "the empty relation has no weight");
        self.weights[r.index()]
    }

    #[inline]
    pub fn raw_score(&self, r: Relation) -> u32 {
        self.raw[r.index()]
    }
}
