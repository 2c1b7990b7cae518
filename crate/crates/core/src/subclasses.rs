//! The NP-complete fragment NP8, the maximal tractable subsets Ĥ8, C8 and
//! Q8, and the split sets used to decompose relations during search.
//!
//! Membership predicates are defined on all 256 relations. The empty
//! relation is outside NP8 and passes every exclusion clause, so it counts as
//! a member of Ĥ8, C8, Q8 and of the closure of the base relations.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::algebra::{BaseRelation, FullTable, Relation, WeightTable};
use crate::error::{Error, Result};

use BaseRelation::*;

/// A set of relations as a 256-bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct RelationSet([u64; 4]);

impl RelationSet {
    pub const fn new() -> RelationSet {
        RelationSet([0; 4])
    }

    pub fn from_predicate(pred: impl Fn(Relation) -> bool) -> RelationSet {
        let mut s = RelationSet::new();
        for r in Relation::all().filter(|&r| pred(r)) {
            s.insert(r);
        }
        s
    }

    #[inline]
    pub fn contains(&self, r: Relation) -> bool {
        self.0[r.index() >> 6] >> (r.index() & 63) & 1 == 1
    }

    /// Returns true if `r` was not present.
    #[inline]
    pub fn insert(&mut self, r: Relation) -> bool {
        let fresh = !self.contains(r);
        self.0[r.index() >> 6] |= 1 << (r.index() & 63);
        fresh
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0 == [0; 4]
    }

    pub fn iter(&self) -> impl Iterator<Item = Relation> + '_ {
        Relation::all().filter(move |&r| self.contains(r))
    }

    pub fn union(&self, other: &RelationSet) -> RelationSet {
        RelationSet(std::array::from_fn(|i| self.0[i] | other.0[i]))
    }

    pub fn intersection(&self, other: &RelationSet) -> RelationSet {
        RelationSet(std::array::from_fn(|i| self.0[i] & other.0[i]))
    }

    pub fn is_subset(&self, other: &RelationSet) -> bool {
        (0..4).all(|i| self.0[i] & !other.0[i] == 0)
    }
}

impl fmt::Debug for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<Relation> for RelationSet {
    fn from_iter<I: IntoIterator<Item = Relation>>(iter: I) -> Self {
        let mut s = RelationSet::new();
        for r in iter {
            s.insert(r);
        }
        s
    }
}

fn has(r: Relation, bases: &[BaseRelation]) -> bool {
    bases.iter().all(|&b| r.contains(b))
}

/// Membership in NP8, the 76 relations that make reasoning NP-complete when
/// added to the base relations.
pub fn in_np8(r: Relation) -> bool {
    let comprehension = !r.contains(PO)
        && (r.contains(NTPP) || r.contains(TPP))
        && (r.contains(NTPPi) || r.contains(TPPi));
    comprehension
        || r == Relation::of(&[EC, NTPP, EQ])
        || r == Relation::of(&[DC, EC, NTPP, EQ])
        || r == Relation::of(&[EC, NTPPi, EQ])
        || r == Relation::of(&[DC, EC, NTPPi, EQ])
}

pub fn in_h8(r: Relation) -> bool {
    let excluded = (has(r, &[EQ, NTPP]) && !r.contains(TPP))
        || (has(r, &[EQ, NTPPi]) && !r.contains(TPPi));
    !in_np8(r) && !excluded
}

pub fn in_c8(r: Relation) -> bool {
    let ec = Relation::base(EC);
    let excluded = ec.is_subset(r)
        && r != ec
        && !r.contains(PO)
        && !(r & Relation::of(&[TPP, NTPP, TPPi, NTPPi, EQ])).is_empty();
    !in_np8(r) && !excluded
}

pub fn in_q8(r: Relation) -> bool {
    let eq = Relation::EQ;
    let excluded = eq.is_subset(r)
        && r != eq
        && !r.contains(PO)
        && !(r & Relation::of(&[TPP, NTPP, TPPi, NTPPi])).is_empty();
    !in_np8(r) && !excluded
}

/// Least superset of `seed` closed under composition, intersection and
/// converse.
pub fn closure(seed: &RelationSet, full: &FullTable) -> RelationSet {
    let mut set = *seed;
    let mut members: Vec<Relation> = set.iter().collect();
    let mut done = 0;
    // every new member is combined with everything before it, both ways
    while done < members.len() {
        let a = members[done];
        let mut fresh = vec![a.converse()];
        for &b in &members[..=done] {
            fresh.push(a & b);
            fresh.push(full.compose(a, b));
            fresh.push(full.compose(b, a));
        }
        for r in fresh {
            if set.insert(r) {
                members.push(r);
            }
        }
        done += 1;
    }
    set
}

/// The split sets offered to the backtracking search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SplitSetId {
    /// The eight base relations.
    B,
    /// Closure of the base relations.
    Bhat,
    H8,
    C8,
    Q8,
}

impl SplitSetId {
    pub const ALL: [SplitSetId; 5] = [
        SplitSetId::B,
        SplitSetId::Bhat,
        SplitSetId::H8,
        SplitSetId::C8,
        SplitSetId::Q8,
    ];

    pub const fn name(self) -> &'static str {
        match self {
            SplitSetId::B => "B",
            SplitSetId::Bhat => "Bhat",
            SplitSetId::H8 => "H8",
            SplitSetId::C8 => "C8",
            SplitSetId::Q8 => "Q8",
        }
    }

    pub fn members(self, full: &FullTable) -> RelationSet {
        match self {
            SplitSetId::B => BaseRelation::ALL.iter().map(|&b| Relation::base(b)).collect(),
            SplitSetId::Bhat => closure(&SplitSetId::B.members(full), full),
            SplitSetId::H8 => RelationSet::from_predicate(in_h8),
            SplitSetId::C8 => RelationSet::from_predicate(in_c8),
            SplitSetId::Q8 => RelationSet::from_predicate(in_q8),
        }
    }
}

impl fmt::Display for SplitSetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SplitSetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SplitSetId::ALL
            .iter()
            .copied()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown split set `{s}`")))
    }
}

/// A split set together with the decomposition of every relation into its
/// members.
#[derive(Clone, Debug)]
pub struct SplitSet {
    id: SplitSetId,
    members: RelationSet,
    decomposition: Vec<Vec<Relation>>,
}

impl SplitSet {
    pub fn new(id: SplitSetId, full: &FullTable, weights: &WeightTable) -> Result<SplitSet> {
        let members = id.members(full);
        let decomposition = build_decomposition(&members, weights)
            .map_err(|e| e.context(format!("split set {id}")))?;
        Ok(SplitSet {
            id,
            members,
            decomposition,
        })
    }

    pub fn id(&self) -> SplitSetId {
        self.id
    }

    pub fn members(&self) -> &RelationSet {
        &self.members
    }

    #[inline]
    pub fn contains(&self, r: Relation) -> bool {
        self.members.contains(r)
    }

    /// Parts of `r`, least restricting first.
    #[inline]
    pub fn decompose(&self, r: Relation) -> &[Relation] {
        &self.decomposition[r.index()]
    }

    #[inline]
    pub fn decomposition_size(&self, r: Relation) -> usize {
        self.decomposition[r.index()].len()
    }

    /// Mean decomposition size over all 256 relations.
    pub fn avg_branching_factor(&self) -> Ratio<u32> {
        let total: usize = self.decomposition.iter().map(Vec::len).sum();
        Ratio::new(total as u32, 256)
    }
}

/// Smallest decomposition of each relation into members that are subsets of
/// it, preferring the largest total weight and then the lexicographically
/// smallest sequence of masks. Parts are ordered by descending weight.
pub fn build_decomposition(
    members: &RelationSet,
    weights: &WeightTable,
) -> Result<Vec<Vec<Relation>>> {
    let mut out = Vec::with_capacity(256);
    for r in Relation::all() {
        if members.contains(r) {
            out.push(vec![r]);
            continue;
        }
        if r.is_empty() {
            out.push(Vec::new());
            continue;
        }
        let candidates: Vec<Relation> = members
            .iter()
            .filter(|&m| !m.is_empty() && m.is_subset(r))
            .collect();
        let reachable = candidates.iter().fold(Relation::EMPTY, |acc, &m| acc | m);
        if reachable != r {
            return Err(Error::InvalidInput(format!("relation {r} has no cover")));
        }
        let mut parts = (1..=8)
            .find_map(|k| best_cover(r, &candidates, k, weights))
            .expect("a cover exists once the candidates reach every base");
        parts.sort_by(|a, b| {
            weights
                .weight(*b)
                .cmp(&weights.weight(*a))
                .then(a.bits().cmp(&b.bits()))
        });
        out.push(parts);
    }
    Ok(out)
}

fn best_cover(
    target: Relation,
    candidates: &[Relation],
    k: usize,
    weights: &WeightTable,
) -> Option<Vec<Relation>> {
    struct Search<'a> {
        target: Relation,
        candidates: &'a [Relation],
        weights: &'a WeightTable,
        stack: Vec<Relation>,
        best: Option<(u32, Vec<Relation>)>,
    }

    impl Search<'_> {
        fn go(&mut self, start: usize, left: usize, acc: Relation, weight: u32) {
            if left == 0 {
                // candidates are visited in ascending order, so the first cover
                // of a given weight is the lexicographically smallest one
                if acc == self.target && self.best.as_ref().is_none_or(|(w, _)| weight > *w) {
                    self.best = Some((weight, self.stack.clone()));
                }
                return;
            }
            for i in start..=self.candidates.len() - left {
                let c = self.candidates[i];
                self.stack.push(c);
                self.go(i + 1, left - 1, acc | c, weight + u32::from(self.weights.weight(c)));
                self.stack.pop();
            }
        }
    }

    if candidates.len() < k {
        return None;
    }
    let mut search = Search {
        target,
        candidates,
        weights,
        stack: Vec::with_capacity(k),
        best: None,
    };
    search.go(0, k, Relation::EMPTY, 0);
    search.best.map(|(_, parts)| parts)
}

/// Cardinalities of the fragments, and whether Ĥ8 ∪ C8 is exactly the
/// complement of NP8 among the non-empty relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetReport {
    pub np8_size: usize,
    pub h8_size: usize,
    pub c8_size: usize,
    pub q8_size: usize,
    pub bhat_size: usize,
    pub union_complement_ok: bool,
}

impl SubsetReport {
    pub fn compute(full: &FullTable) -> SubsetReport {
        let np8 = RelationSet::from_predicate(in_np8);
        let h8 = SplitSetId::H8.members(full);
        let c8 = SplitSetId::C8.members(full);
        let q8 = SplitSetId::Q8.members(full);
        let bhat = SplitSetId::Bhat.members(full);
        let union_complement_ok =
            Relation::non_empty().all(|r| (h8.contains(r) || c8.contains(r)) != np8.contains(r));
        SubsetReport {
            np8_size: np8.len(),
            h8_size: h8.len(),
            c8_size: c8.len(),
            q8_size: q8.len(),
            bhat_size: bhat.len(),
            union_complement_ok,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::CompositionTable;

    fn tables() -> (FullTable, WeightTable) {
        let full = FullTable::new(&CompositionTable::standard());
        let w = WeightTable::exact(&full);
        (full, w)
    }

    // direct bit tests on the mask, written independently of `in_np8`
    fn np8_bits(m: u8) -> bool {
        let (ec, po, tpp, ntpp, tppi, ntppi, eq) = (2, 4, 8, 16, 32, 64, 128);
        let comp = m & po == 0 && m & (tpp | ntpp) != 0 && m & (tppi | ntppi) != 0;
        comp || [ec | ntpp | eq, 1 | ec | ntpp | eq, ec | ntppi | eq, 1 | ec | ntppi | eq].contains(&m)
    }

    #[test]
    fn np8_examples() {
        assert!(in_np8(Relation::of(&[TPP, NTPPi])));
        assert!(in_np8(Relation::of(&[EC, NTPP, EQ])));
        assert!(!in_np8(Relation::of(&[DC])));
        for r in Relation::all() {
            assert_eq!(in_np8(r), np8_bits(r.bits()), "{r}");
        }
    }

    #[test]
    fn h8_examples() {
        assert!(!in_h8(Relation::of(&[EQ, NTPP])));
        assert!(in_h8(Relation::of(&[EQ, TPP, NTPP])));
        assert!(in_h8(Relation::UNIVERSAL));
    }

    #[test]
    fn cardinalities() {
        let (full, _) = tables();
        let report = SubsetReport::compute(&full);
        assert_eq!(report.np8_size, 76);
        assert_eq!(report.h8_size, 148);
        assert_eq!(report.c8_size, 158);
        assert_eq!(report.q8_size, 160);
        assert!(report.union_complement_ok);
    }

    #[test]
    fn fragment_relationships() {
        let (full, _) = tables();
        let np8 = RelationSet::from_predicate(in_np8);
        let [h8, c8, q8] = [SplitSetId::H8, SplitSetId::C8, SplitSetId::Q8].map(|id| id.members(&full));
        for r in Relation::non_empty() {
            assert!(h8.contains(r) || c8.contains(r) || np8.contains(r));
        }
        assert!(h8.intersection(&np8).is_empty());
        assert!(c8.intersection(&np8).is_empty());
        assert!(q8.intersection(&np8).is_empty());
        assert!(q8.is_subset(&h8.union(&c8)));
        for id in SplitSetId::ALL {
            let m = id.members(&full);
            for b in BaseRelation::ALL {
                assert!(m.contains(b.into()), "{id} lacks {b}");
            }
        }
    }

    #[test]
    fn closure_examples() {
        let (full, _) = tables();
        let universal: RelationSet = [Relation::UNIVERSAL].into_iter().collect();
        assert_eq!(closure(&universal, &full), universal);

        let h8 = SplitSetId::H8.members(&full);
        assert_eq!(closure(&h8, &full), h8);
        for id in [SplitSetId::C8, SplitSetId::Q8] {
            let m = id.members(&full);
            assert_eq!(closure(&m, &full), m, "{id}");
        }

        let bhat = SplitSetId::Bhat.members(&full);
        assert!(bhat.is_subset(&h8));
        // 37 non-empty relations plus the empty one
        assert_eq!(bhat.len(), 38);
    }

    #[test]
    fn members_decompose_to_themselves() {
        let (full, w) = tables();
        for id in SplitSetId::ALL {
            let s = SplitSet::new(id, &full, &w).unwrap();
            for r in s.members().iter() {
                assert_eq!(s.decompose(r), &[r]);
            }
            for r in Relation::all() {
                let parts = s.decompose(r);
                let union = parts.iter().fold(Relation::EMPTY, |a, &p| a | p);
                assert_eq!(union, r);
                assert!(parts.iter().all(|&p| s.contains(p) && p.is_subset(r)));
                for pair in parts.windows(2) {
                    assert!(w.weight(pair[0]) >= w.weight(pair[1]));
                }
            }
        }
    }

    #[test]
    fn branching_factors() {
        let (full, w) = tables();
        let avg = |id| SplitSet::new(id, &full, &w).unwrap().avg_branching_factor();
        assert_eq!(avg(SplitSetId::B), Ratio::new(4, 1));
        assert_eq!(avg(SplitSetId::H8), Ratio::new(368, 256));
        let close = |r: Ratio<u32>, x: f64, tol: f64| {
            (f64::from(*r.numer()) / f64::from(*r.denom()) - x).abs() <= tol
        };
        assert!(close(avg(SplitSetId::Q8), 1.516, 0.002));
        assert!(close(avg(SplitSetId::C8), 1.523, 0.002));
        assert!(close(avg(SplitSetId::Bhat), 2.50, 0.01));
    }

    #[test]
    fn decompositions_are_minimal() {
        use rand::{Rng, SeedableRng};
        let (full, w) = tables();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for id in SplitSetId::ALL {
            let s = SplitSet::new(id, &full, &w).unwrap();
            let subs: Vec<Relation> = s.members().iter().filter(|m| !m.is_empty()).collect();
            for _ in 0..100 {
                let r = Relation::from_bits(rng.gen_range(1..=255));
                let size = s.decomposition_size(r);
                let mine: Vec<Relation> = subs.iter().copied().filter(|m| m.is_subset(r)).collect();
                // no cover of any smaller size exists
                for k in 1..size {
                    assert!(!covers_with(r, &mine, k), "{id}: {r} coverable with {k}");
                }
            }
        }
    }

    fn covers_with(r: Relation, cands: &[Relation], k: usize) -> bool {
        fn go(r: Relation, c: &[Relation], k: usize, acc: Relation) -> bool {
            if k == 0 {
                return acc == r;
            }
            (0..c.len()).any(|i| go(r, &c[i + 1..], k - 1, acc | c[i]))
        }
        go(r, cands, k, Relation::EMPTY)
    }

    #[test]
    fn split_set_names_parse() {
        for id in SplitSetId::ALL {
            assert_eq!(id.name().parse::<SplitSetId>().unwrap(), id);
        }
        assert!("X8".parse::<SplitSetId>().is_err());
    }
}
