use std::path::Path;

use super::{BaseRelation, Relation};
use crate::error::{Error, Result};

const STANDARD_TABLE: &str = include_str!("../../data/rcc8.table");

/// Composition of base relations: `entry(a, b)` holds between `x` and `y`
/// whenever `x a z` and `z b y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionTable {
    entries: [[Relation; 8]; 8],
}

impl CompositionTable {
    /// The table shipped with the crate.
    pub fn standard() -> CompositionTable {
        Self::parse(STANDARD_TABLE).expect("bundled composition table is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<CompositionTable> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Parses the `BASE BASE : B1|B2|...` text format and validates it.
    /// Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<CompositionTable> {
        let mut entries = [[Relation::EMPTY; 8]; 8];
        let mut line_of = [[0usize; 8]; 8];
        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (lhs, rhs) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, "expected `BASE BASE : RELATION`"))?;
            let mut names = lhs.split_whitespace();
            let (a, b) = match (names.next(), names.next(), names.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => return Err(Error::parse(lineno, "expected two base relations before `:`")),
            };
            let a: BaseRelation = a.parse().map_err(|e: Error| Error::parse(lineno, e.to_string()))?;
            let b: BaseRelation = b.parse().map_err(|e: Error| Error::parse(lineno, e.to_string()))?;
            let r: Relation = rhs.parse().map_err(|e: Error| Error::parse(lineno, e.to_string()))?;
            if line_of[a.index()][b.index()] != 0 {
                return Err(Error::parse(
                    lineno,
                    format!("duplicate entry {a} {b} (first on line {})", line_of[a.index()][b.index()]),
                ));
            }
            if r.is_empty() {
                return Err(Error::parse(lineno, format!("entry {a} {b} is empty")));
            }
            entries[a.index()][b.index()] = r;
            line_of[a.index()][b.index()] = lineno;
        }
        for a in BaseRelation::ALL {
            for b in BaseRelation::ALL {
                if line_of[a.index()][b.index()] == 0 {
                    return Err(Error::InvalidTable(format!("missing entry {a} {b}")));
                }
            }
        }
        let table = CompositionTable { entries };
        table.validate().map_err(|(a, b, msg)| {
            Error::parse(line_of[a.index()][b.index()], format!("entry {a} {b}: {msg}"))
        })?;
        Ok(table)
    }

    /// Builds a table from raw entries, running the same validation as the
    /// loader.
    pub fn from_entries(entries: [[Relation; 8]; 8]) -> Result<CompositionTable> {
        let table = CompositionTable { entries };
        table
            .validate()
            .map_err(|(a, b, msg)| Error::InvalidTable(format!("entry {a} {b}: {msg}")))?;
        Ok(table)
    }

    // identity law for EQ, non-empty entries, and (a∘b)⌣ = b⌣∘a⌣
    fn validate(&self) -> std::result::Result<(), (BaseRelation, BaseRelation, String)> {
        use BaseRelation::EQ;
        for a in BaseRelation::ALL {
            for b in BaseRelation::ALL {
                let e = self.entry(a, b);
                if e.is_empty() {
                    return Err((a, b, "empty composition".into()));
                }
                if a == EQ && e != Relation::base(b) {
                    return Err((a, b, format!("EQ composed with {b} must be {b}, got {e}")));
                }
                if b == EQ && e != Relation::base(a) {
                    return Err((a, b, format!("{a} composed with EQ must be {a}, got {e}")));
                }
            }
        }
        for a in BaseRelation::ALL {
            for b in BaseRelation::ALL {
                let e = self.entry(a, b);
                let mirrored = self.entry(b.converse(), a.converse());
                if e.converse() != mirrored {
                    return Err((
                        a,
                        b,
                        format!(
                            "converse law violated: ({e})⌣ = {} but {} {} gives {mirrored}",
                            e.converse(),
                            b.converse(),
                            a.converse()
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn entry(&self, a: BaseRelation, b: BaseRelation) -> Relation {
        self.entries[a.index()][b.index()]
    }

    /// Composition of disjunctive relations as the union of base entries.
    pub fn compose(&self, a: Relation, b: Relation) -> Relation {
        let mut out = Relation::EMPTY;
        for p in a.bases() {
            for q in b.bases() {
                out = out | self.entry(p, q);
            }
        }
        out
    }

    /// Renders the table in the same format [`parse`](Self::parse) accepts.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for a in BaseRelation::ALL {
            for b in BaseRelation::ALL {
                s.push_str(&format!("{a} {b} : {}\n", self.entry(a, b)));
            }
        }
        s
    }
}

/// Precomputed composition of every pair of relations.
#[derive(Clone)]
pub struct FullTable {
    cells: Box<[Relation]>,
}

impl FullTable {
    pub fn new(table: &CompositionTable) -> FullTable {
        let mut cells = vec![Relation::EMPTY; 256 * 256].into_boxed_slice();
        // compose(a, b) = compose(a without lowest base, b) ∪ compose(lowest base, b)
        let mut by_base = [[Relation::EMPTY; 256]; 8];
        for p in BaseRelation::ALL {
            for b in Relation::all() {
                by_base[p.index()][b.index()] = table.compose(Relation::base(p), b);
            }
        }
        for a in 1..256usize {
            let low = a.trailing_zeros() as usize;
            let rest = a & (a - 1);
            for b in 0..256usize {
                cells[a * 256 + b] = cells[rest * 256 + b] | by_base[low][b];
            }
        }
        FullTable { cells }
    }

    #[inline]
    pub fn compose(&self, a: Relation, b: Relation) -> Relation {
        self.cells[a.index() << 8 | b.index()]
    }
}

impl std::fmt::Debug for FullTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FullTable").finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use BaseRelation::*;

    fn naive(t: &CompositionTable, a: Relation, b: Relation) -> Relation {
        let mut out = Relation::EMPTY;
        for i in 0..8 {
            for j in 0..8 {
                if a.bits() >> i & 1 == 1 && b.bits() >> j & 1 == 1 {
                    out = out | t.entries[i][j];
                }
            }
        }
        out
    }

    #[test]
    fn standard_table_loads() {
        let t = CompositionTable::standard();
        assert_eq!(t.entry(TPP, TPP), Relation::of(&[TPP, NTPP]));
        assert_eq!(t.entry(DC, DC), Relation::UNIVERSAL);
        assert_eq!(t.entry(NTPP, NTPPi), Relation::UNIVERSAL);
    }

    #[test]
    fn converse_law_and_identity() {
        let t = CompositionTable::standard();
        for a in BaseRelation::ALL {
            for b in BaseRelation::ALL {
                assert_eq!(t.entry(a, b).converse(), t.entry(b.converse(), a.converse()));
                assert!(!t.entry(a, b).is_empty());
            }
            assert_eq!(t.entry(EQ, a), Relation::base(a));
            assert_eq!(t.entry(a, EQ), Relation::base(a));
        }
    }

    #[test]
    fn text_round_trip() {
        let t = CompositionTable::standard();
        assert_eq!(CompositionTable::parse(&t.to_text()).unwrap(), t);
    }

    #[test]
    fn loader_rejects_converse_violation_with_line_number() {
        let t = CompositionTable::standard();
        let text = t.to_text().replace("TPP TPP : TPP|NTPP", "TPP TPP : TPP");
        let err = CompositionTable::parse(&text).unwrap_err();
        match err {
            // TPP is row 3, column 3 -> line 28, or its mirror TPPi TPPi on line 46
            Error::Parse { line, .. } => assert!(line == 28 || line == 46, "line {line}"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn loader_rejects_identity_violation() {
        let t = CompositionTable::standard();
        let text = t.to_text().replace("EQ DC : DC\n", "EQ DC : DC|EC\n");
        let err = CompositionTable::parse(&text).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 57, .. }), "{err}");
    }

    #[test]
    fn loader_rejects_missing_and_garbage() {
        let t = CompositionTable::standard();
        let text: String = t.to_text().lines().skip(1).map(|l| format!("{l}\n")).collect();
        assert!(matches!(CompositionTable::parse(&text), Err(Error::InvalidTable(_))));
        assert!(matches!(
            CompositionTable::parse("DC DC DC : *"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            CompositionTable::parse("\n\nDC FOO : *"),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn full_table_examples() {
        let t = CompositionTable::standard();
        let full = FullTable::new(&t);
        for r in Relation::all() {
            assert_eq!(full.compose(Relation::EQ, r), r);
            assert_eq!(full.compose(r, Relation::EQ), r);
            assert_eq!(full.compose(Relation::EMPTY, r), Relation::EMPTY);
        }
        assert_eq!(full.compose(Relation::UNIVERSAL, Relation::UNIVERSAL), Relation::UNIVERSAL);
        assert_eq!(full.compose(TPP.into(), TPP.into()), Relation::of(&[TPP, NTPP]));
        assert_eq!(full.compose(DC.into(), DC.into()), Relation::UNIVERSAL);
    }

    #[test]
    fn monotonicity_sampled() {
        use rand::{Rng, SeedableRng};
        let t = CompositionTable::standard();
        let full = FullTable::new(&t);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let a = Relation::from_bits(rng.gen());
            let b = Relation::from_bits(rng.gen());
            let a2 = a | Relation::from_bits(rng.gen());
            let b2 = b | Relation::from_bits(rng.gen());
            assert!(full.compose(a, b).is_subset(full.compose(a2, b2)));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn full_table_matches_naive_double_loop(a in any::<u8>(), b in any::<u8>()) {
            let t = CompositionTable::standard();
            let full = FullTable::new(&t);
            let (a, b) = (Relation::from_bits(a), Relation::from_bits(b));
            prop_assert_eq!(full.compose(a, b), naive(&t, a, b));
            prop_assert_eq!(t.compose(a, b), naive(&t, a, b));
        }

        #[test]
        fn converse_distributes(a in any::<u8>(), b in any::<u8>()) {
            let (a, b) = (Relation::from_bits(a), Relation::from_bits(b));
            prop_assert_eq!((a | b).converse(), a.converse() | b.converse());
            prop_assert_eq!((a & b).converse(), a.converse() & b.converse());
        }
    }
}
