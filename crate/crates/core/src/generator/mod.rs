//! Random instance models and the analysis of their flaws.

mod flaws;

pub use flaws::{expected_connected_triples, solve_degree_threshold, FlawAnalysis, RegionCount};

use num_rational::Ratio;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{FullTable, Relation};
use crate::error::{Error, Result};
use crate::network::{Instance, InstanceMeta, Model, Network, MAX_REGIONS};
use crate::subclasses::in_np8;

/// Name of the random source, written into instance headers.
pub const RNG_NAME: &str = "chacha8";

/// Parameters of one random instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenSpec {
    pub model: Model,
    pub n: usize,
    /// Average degree.
    pub d: f64,
    /// Average label size.
    pub l: f64,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(model: Model, n: usize, d: f64, seed: u64) -> GenSpec {
        GenSpec {
            model,
            n,
            d,
            l: 4.0,
            seed,
        }
    }

    pub fn with_label_size(mut self, l: f64) -> GenSpec {
        self.l = l;
        self
    }

    /// `round(n·d/2)`, ties to even.
    pub fn edge_count(&self) -> usize {
        (self.n as f64 * self.d / 2.0).round_ties_even() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.model == Model::Custom {
            return bad("model must be A or H".into());
        }
        if self.n < 2 || self.n > MAX_REGIONS {
            return bad(format!("n={} outside 2..={MAX_REGIONS}", self.n));
        }
        if !(self.d > 0.0 && self.d <= (self.n - 1) as f64) {
            return bad(format!("d={} outside (0, n-1]", self.d));
        }
        if !(1.0..=8.0).contains(&self.l) {
            return bad(format!("l={} outside [1, 8]", self.l));
        }
        let pairs = self.n * (self.n - 1) / 2;
        if self.edge_count() > pairs {
            return bad(format!("{} edges exceed the {pairs} pairs", self.edge_count()));
        }
        Ok(())
    }
}

/// One label before any rejection: a uniformly chosen base plus each other
/// base with probability `(l-1)/7`.
pub fn sample_raw_label<R: Rng + ?Sized>(rng: &mut R, l: f64) -> Relation {
    let first = rng.gen_range(0..8u8);
    let p = (l - 1.0) / 7.0;
    let mut bits = 1u8 << first;
    for b in 0..8u8 {
        if b != first && rng.gen_bool(p) {
            bits |= 1 << b;
        }
    }
    Relation::from_bits(bits)
}

/// Samples labels until one is allowed under `model`. The universal
/// relation is never allowed.
pub fn sample_label<R: Rng + ?Sized>(rng: &mut R, model: Model, l: f64) -> Relation {
    loop {
        let r = sample_raw_label(rng, l);
        if r == Relation::UNIVERSAL {
            continue;
        }
        if model == Model::H && !in_np8(r) {
            continue;
        }
        return r;
    }
}

/// The `k`-th pair `(i, j)`, `i < j`, in row-major order.
fn pair_at(n: usize, mut k: usize) -> (usize, usize) {
    for i in 0..n {
        let row = n - 1 - i;
        if k < row {
            return (i, i + 1 + k);
        }
        k -= row;
    }
    unreachable!("pair index out of range")
}

pub fn generate(spec: &GenSpec) -> Result<Instance> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let edges = index::sample(&mut rng, n * (n - 1) / 2, spec.edge_count());
    let mut net = Network::new(n);
    for k in edges.iter() {
        let (i, j) = pair_at(n, k);
        net.set(i, j, sample_label(&mut rng, spec.model, spec.l));
    }
    let meta = InstanceMeta {
        model: spec.model,
        d: spec.d,
        l: spec.l,
        seed: spec.seed,
        rng: Some(RNG_NAME.to_string()),
    };
    Ok(Instance::new(meta, net))
}

/// Network on `n` regions in which each pair is constrained, with
/// probability `density`, by a relation drawn uniformly from `labels`.
pub fn sample_over<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64, labels: &[Relation]) -> Network {
    assert!(!labels.is_empty(), "label pool is empty");
    let mut net = Network::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                net.set(i, j, labels[rng.gen_range(0..labels.len())]);
            }
        }
    }
    net
}

/// Outcome of the exhaustive census over ordered triples of non-empty
/// relations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TripleCensus {
    pub inconsistent: u64,
    pub total: u64,
}

impl TripleCensus {
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.inconsistent, self.total)
    }

    pub fn probability(&self) -> f64 {
        self.inconsistent as f64 / self.total as f64
    }
}

/// Counts the triples `(R12, R13, R23)` for which the three-region network
/// `x R12 y, x R13 z, y R23 z` is inconsistent, i.e. `R13 ∩ (R12 ∘ R23)` is
/// empty.
pub fn count_inconsistent_triples(full: &FullTable) -> TripleCensus {
    let inconsistent = (1..=255u8)
        .into_par_iter()
        .map(|a| {
            let a = Relation::from_bits(a);
            let mut count = 0u64;
            for c in Relation::non_empty() {
                let ac = full.compose(a, c);
                for b in Relation::non_empty() {
                    if (b & ac).is_empty() {
                        count += 1;
                    }
                }
            }
            count
        })
        .sum();
    TripleCensus {
        inconsistent,
        total: 255 * 255 * 255,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::Calculus;

    #[test]
    fn pair_indexing_is_row_major() {
        let n = 5;
        let pairs: Vec<_> = (0..10).map(|k| pair_at(n, k)).collect();
        assert_eq!(pairs[0], (0, 1));
        assert_eq!(pairs[3], (0, 4));
        assert_eq!(pairs[4], (1, 2));
        assert_eq!(pairs[9], (3, 4));
    }

    #[test]
    fn edge_count_rounds_half_to_even() {
        assert_eq!(GenSpec::new(Model::A, 10, 3.0, 0).edge_count(), 15);
        // 5 * 4.5 / 2 = 11.25, 3 * 1.0 / 2 = 1.5, 5 * 1.0 / 2 = 2.5
        assert_eq!(GenSpec::new(Model::A, 5, 4.5, 0).edge_count(), 11);
        assert_eq!(GenSpec::new(Model::A, 3, 1.0, 0).edge_count(), 2);
        assert_eq!(GenSpec::new(Model::A, 5, 1.0, 0).edge_count(), 2);
    }

    #[test]
    fn generate_exact_degree() {
        let inst = generate(&GenSpec::new(Model::A, 10, 3.0, 42)).unwrap();
        let labelled = inst.network.edges().filter(|e| e.2 != Relation::UNIVERSAL).count();
        assert_eq!(labelled, 15);
        inst.network.validate().unwrap();
    }

    #[test]
    fn generate_is_deterministic() {
        let spec = GenSpec::new(Model::H, 30, 9.5, 1234);
        let a = generate(&spec).unwrap().to_text();
        let b = generate(&spec).unwrap().to_text();
        assert_eq!(a, b);
        let c = generate(&GenSpec { seed: 1235, ..spec }).unwrap().to_text();
        assert_ne!(a, c);
    }

    #[test]
    fn model_h_uses_np8_only() {
        let inst = generate(&GenSpec::new(Model::H, 40, 12.0, 9)).unwrap();
        for (_, _, r) in inst.network.edges() {
            assert!(r == Relation::UNIVERSAL || in_np8(r), "{r}");
        }
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(generate(&GenSpec::new(Model::A, 10, 9.5, 0)).is_err());
        assert!(generate(&GenSpec::new(Model::A, 10, 0.0, 0)).is_err());
        assert!(generate(&GenSpec::new(Model::Custom, 10, 3.0, 0)).is_err());
        assert!(generate(&GenSpec::new(Model::A, 10, 3.0, 0).with_label_size(9.0)).is_err());
        assert!(generate(&GenSpec::new(Model::A, 10, 9.0, 0)).is_ok());
    }

    #[test]
    fn label_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let samples = 100_000;
        let mut per_base = [0u32; 8];
        let mut universal = 0u32;
        for _ in 0..samples {
            let r = sample_raw_label(&mut rng, 4.0);
            universal += u32::from(r == Relation::UNIVERSAL);
            for b in r.bases() {
                per_base[b.index()] += 1;
            }
        }
        for count in per_base {
            let freq = f64::from(count) / samples as f64;
            assert!((freq - 0.5).abs() < 0.01, "{freq}");
        }
        // resampled labels: (3/7)^7 ≈ 0.266%
        let rate = f64::from(universal) / samples as f64;
        assert!((rate - (3.0f64 / 7.0).powi(7)).abs() < 0.0006, "{rate}");
        let total: u64 = (0..samples)
            .map(|_| sample_label(&mut rng, Model::A, 4.0).len() as u64)
            .sum();
        let mean = total as f64 / samples as f64;
        assert!((mean - 4.0).abs() < 0.05, "{mean}");
    }

    #[test]
    fn census_count() {
        let census = count_inconsistent_triples(Calculus::shared().full());
        assert_eq!(census.inconsistent, 58_989);
        assert_eq!(census.total, 16_581_375);
    }
}
