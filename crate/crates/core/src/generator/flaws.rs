use num_rational::Ratio;
use num_traits::Float;

use crate::network::Model;

/// Region count for the triple expectations; `Infinite` takes the limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionCount {
    Finite(u64),
    Infinite,
}

impl std::fmt::Display for RegionCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegionCount::Finite(n) => write!(f, "{n}"),
            RegionCount::Infinite => f.write_str("inf"),
        }
    }
}

fn lit<T: Float>(x: f64) -> T {
    T::from(x).expect("literal fits the float type")
}

// x(x-1)(x-2)/6, defined for real x
fn choose3<T: Float>(x: T) -> T {
    x * (x - T::one()) * (x - lit(2.0)) / lit(6.0)
}

/// Expected number of connected triples, `C(n,3)·C(nd/2,3) / C(n(n-1)/2,3)`,
/// or `d³/6` in the limit.
pub fn expected_connected_triples<T: Float>(n: RegionCount, d: T) -> T {
    match n {
        RegionCount::Infinite => d * d * d / lit(6.0),
        RegionCount::Finite(n) => {
            let n: T = lit(n as f64);
            let e = n * d / lit(2.0);
            let pairs = n * (n - T::one()) / lit(2.0);
            // ratio of falling factorials first to keep magnitudes tame
            let frac = (e / pairs) * ((e - T::one()) / (pairs - T::one())) * ((e - lit(2.0)) / (pairs - lit(2.0)));
            choose3(n) * frac
        }
    }
}

/// The degree at which `E_CT(n, d) · p` reaches `target`, found by bisection.
/// `None` if no degree in the admissible range reaches it.
pub fn solve_degree_threshold<T: Float>(n: RegionCount, p: T, target: T) -> Option<T> {
    if !(target > T::zero()) || !(p > T::zero()) {
        return None;
    }
    let f = |d: T| expected_connected_triples(n, d) * p - target;
    let (mut lo, mut hi) = match n {
        RegionCount::Finite(n) if n >= 3 => {
            let n: T = lit(n as f64);
            // at least three edges
            (lit::<T>(6.0) / n, n - T::one())
        }
        RegionCount::Finite(_) => return None,
        RegionCount::Infinite => {
            let mut hi: T = T::one();
            while f(hi) < T::zero() {
                hi = hi * lit(2.0);
                if hi > lit(1e12) {
                    return None;
                }
            }
            (T::zero(), hi)
        }
    };
    if f(hi) < T::zero() {
        return None;
    }
    for _ in 0..200 {
        let mid = (lo + hi) / lit(2.0);
        if f(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((lo + hi) / lit(2.0))
}

/// Local-inconsistency expectations for one random model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlawAnalysis<T> {
    /// Probability that a connected triple is inconsistent on its own.
    pub p_inconsistent: Ratio<u64>,
    p: T,
}

impl<T: Float> FlawAnalysis<T> {
    pub fn new(p_inconsistent: Ratio<u64>) -> FlawAnalysis<T> {
        let p = lit::<T>(*p_inconsistent.numer() as f64) / lit(*p_inconsistent.denom() as f64);
        FlawAnalysis { p_inconsistent, p }
    }

    /// Model A draws from all relations, so triples fail with the census
    /// probability. Model H labels never form an inconsistent triple.
    pub fn for_model(model: Model, census_ratio: Ratio<u64>) -> FlawAnalysis<T> {
        match model {
            Model::H => FlawAnalysis::new(Ratio::from_integer(0)),
            _ => FlawAnalysis::new(census_ratio),
        }
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn e_ct(&self, n: RegionCount, d: T) -> T {
        expected_connected_triples(n, d)
    }

    pub fn e_it(&self, n: RegionCount, d: T) -> T {
        self.e_ct(n, d) * self.p
    }

    pub fn d_for_eit(&self, n: RegionCount, target: T) -> Option<T> {
        solve_degree_threshold(n, self.p, target)
    }
}
