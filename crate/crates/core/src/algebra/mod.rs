//! The RCC-8 relation algebra.
//!
//! A [`Relation`] is a set of base relations packed into one byte, with bit
//! `i` standing for [`BaseRelation::ALL`]`[i]`. Union, intersection and
//! converse are bit operations; composition goes through a
//! [`CompositionTable`] and, for speed, its lifted 256×256 form
//! [`FullTable`].

mod table;
mod weights;

use std::fmt;
use std::str::FromStr;

pub use table::{CompositionTable, FullTable};
pub use weights::{WeightTable, MAX_WEIGHT, MIN_WEIGHT};

use crate::error::Error;

/// One of the eight jointly exhaustive, pairwise disjoint base relations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum BaseRelation {
    DC = 0,
    EC = 1,
    PO = 2,
    TPP = 3,
    NTPP = 4,
    TPPi = 5,
    NTPPi = 6,
    EQ = 7,
}

impl BaseRelation {
    /// All base relations in canonical bit order.
    pub const ALL: [BaseRelation; 8] = [
        BaseRelation::DC,
        BaseRelation::EC,
        BaseRelation::PO,
        BaseRelation::TPP,
        BaseRelation::NTPP,
        BaseRelation::TPPi,
        BaseRelation::NTPPi,
        BaseRelation::EQ,
    ];

    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub const fn from_index(i: usize) -> BaseRelation {
        Self::ALL[i]
    }

    pub const fn converse(self) -> BaseRelation {
        match self {
            BaseRelation::TPP => BaseRelation::TPPi,
            BaseRelation::TPPi => BaseRelation::TPP,
            BaseRelation::NTPP => BaseRelation::NTPPi,
            BaseRelation::NTPPi => BaseRelation::NTPP,
            b => b,
        }
    }

    pub const fn symbol(self) -> &'static str {
        match self {
            BaseRelation::DC => "DC",
            BaseRelation::EC => "EC",
            BaseRelation::PO => "PO",
            BaseRelation::TPP => "TPP",
            BaseRelation::NTPP => "NTPP",
            BaseRelation::TPPi => "TPPi",
            BaseRelation::NTPPi => "NTPPi",
            BaseRelation::EQ => "EQ",
        }
    }
}

impl fmt::Display for BaseRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for BaseRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BaseRelation::ALL
            .iter()
            .copied()
            .find(|b| b.symbol() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown base relation `{s}`")))
    }
}

/// A disjunction of base relations. The empty relation only ever signals
/// inconsistency.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Relation(u8);

impl Relation {
    pub const EMPTY: Relation = Relation(0);
    pub const UNIVERSAL: Relation = Relation(0xff);
    pub const EQ: Relation = Relation::base(BaseRelation::EQ);

    #[inline]
    pub const fn from_bits(bits: u8) -> Relation {
        Relation(bits)
    }

    #[inline]
    pub const fn bits(self) -> u8 {
        self.0
    }

    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub const fn base(b: BaseRelation) -> Relation {
        Relation(1 << b as u8)
    }

    pub fn of(bases: &[BaseRelation]) -> Relation {
        bases.iter().fold(Relation::EMPTY, |r, &b| r | Relation::base(b))
    }

    /// Iterates over all 256 relations in bit-mask order.
    pub fn all() -> impl Iterator<Item = Relation> + Clone {
        (0..=255u8).map(Relation)
    }

    /// Iterates over the 255 non-empty relations.
    pub fn non_empty() -> impl Iterator<Item = Relation> + Clone {
        (1..=255u8).map(Relation)
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub const fn len(self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub const fn contains(self, b: BaseRelation) -> bool {
        self.0 & (1 << b as u8) != 0
    }

    #[inline]
    pub const fn is_subset(self, other: Relation) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub const fn union(self, other: Relation) -> Relation {
        Relation(self.0 | other.0)
    }

    #[inline]
    pub const fn intersect(self, other: Relation) -> Relation {
        Relation(self.0 & other.0)
    }

    /// Swaps TPP with TPPi and NTPP with NTPPi.
    #[inline]
    pub const fn converse(self) -> Relation {
        let b = self.0;
        // DC, EC, PO, EQ stay; bits 3,4 <-> 5,6
        Relation((b & 0b1000_0111) | ((b & 0b0001_1000) << 2) | ((b & 0b0110_0000) >> 2))
    }

    pub fn bases(self) -> impl Iterator<Item = BaseRelation> {
        BaseRelation::ALL.into_iter().filter(move |&b| self.contains(b))
    }
}

impl std::ops::BitOr for Relation {
    type Output = Relation;
    fn bitor(self, rhs: Relation) -> Relation {
        self.union(rhs)
    }
}

impl std::ops::BitAnd for Relation {
    type Output = Relation;
    fn bitand(self, rhs: Relation) -> Relation {
        self.intersect(rhs)
    }
}

impl From<BaseRelation> for Relation {
    fn from(b: BaseRelation) -> Relation {
        Relation::base(b)
    }
}

/// Formats as `DC|EC`, `*` for the universal relation and `{}` for the
/// empty relation.
impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Relation::UNIVERSAL {
            return f.write_str("*");
        }
        if self.is_empty() {
            return f.write_str("{}");
        }
        let mut first = true;
        for b in self.bases() {
            if !first {
                f.write_str("|")?;
            }
            first = false;
            f.write_str(b.symbol())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "*" => Ok(Relation::UNIVERSAL),
            "{}" => Ok(Relation::EMPTY),
            _ => s
                .split('|')
                .map(|tok| tok.trim().parse::<BaseRelation>().map(Relation::base))
                .try_fold(Relation::EMPTY, |acc, r| r.map(|r| acc | r)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use BaseRelation::*;

    #[test]
    fn union_examples() {
        assert_eq!(Relation::of(&[DC]) | Relation::of(&[EC]), Relation::of(&[DC, EC]));
        assert_eq!(
            Relation::of(&[TPP, NTPP]) | Relation::of(&[NTPP, EQ]),
            Relation::of(&[TPP, NTPP, EQ])
        );
        for r in Relation::all() {
            assert_eq!(r | Relation::EMPTY, r);
        }
    }

    #[test]
    fn intersect_examples() {
        assert_eq!(Relation::of(&[DC, EC]) & Relation::of(&[EC, PO]), Relation::of(&[EC]));
        assert!((Relation::of(&[TPP]) & Relation::of(&[NTPP])).is_empty());
        for r in Relation::all() {
            assert_eq!(r & Relation::UNIVERSAL, r);
        }
    }

    #[test]
    fn converse_examples() {
        assert_eq!(Relation::of(&[TPP]).converse(), Relation::of(&[TPPi]));
        let sym = Relation::of(&[DC, EC, PO, EQ]);
        assert_eq!(sym.converse(), sym);
        for r in Relation::all() {
            assert_eq!(r.converse().converse(), r);
            let by_base = r.bases().fold(Relation::EMPTY, |acc, b| acc | b.converse().into());
            assert_eq!(r.converse(), by_base);
        }
    }

    #[test]
    fn base_converse_pairs() {
        for b in BaseRelation::ALL {
            assert_eq!(b.converse().converse(), b);
        }
        assert_eq!(TPP.converse(), TPPi);
        assert_eq!(NTPP.converse(), NTPPi);
        for b in [DC, EC, PO, EQ] {
            assert_eq!(b.converse(), b);
        }
    }

    #[test]
    fn converse_distributes_over_base_pairs() {
        for a in BaseRelation::ALL {
            for b in BaseRelation::ALL {
                let (a, b) = (Relation::base(a), Relation::base(b));
                assert_eq!((a | b).converse(), a.converse() | b.converse());
                assert_eq!((a & b).converse(), a.converse() & b.converse());
            }
        }
    }

    #[test]
    fn display_round_trip() {
        for r in Relation::all() {
            assert_eq!(r.to_string().parse::<Relation>().unwrap(), r);
        }
        assert_eq!(Relation::of(&[DC, NTPPi]).to_string(), "DC|NTPPi");
        assert!("DC|XX".parse::<Relation>().is_err());
    }

    #[test]
    fn there_are_256_relations() {
        let v: std::collections::BTreeSet<_> = Relation::all().collect();
        assert_eq!(v.len(), 256);
    }
}
