//! Consistency checking for RCC-8 constraint networks.
//!
//! The crate covers the relation algebra and its tractable fragments,
//! path-consistency with weighted queues, a backtracking solver over
//! split-set decompositions, random instance models and the experiment
//! harness built on top of them.
//!
//! ```
//! use rcc8::{consistency, HeuristicConfig, Network, Relation, SolveStatus};
//!
//! let mut net = Network::new(3);
//! net.set(0, 1, "TPP".parse::<Relation>().unwrap());
//! net.set(1, 2, "TPP".parse().unwrap());
//! net.set(0, 2, "DC".parse().unwrap());
//! let cfg = "H8/dynamic/local".parse::<HeuristicConfig>().unwrap();
//! let out = consistency(&net, cfg, 1000).unwrap();
//! assert_eq!(out.status, SolveStatus::Inconsistent);
//! ```

pub mod algebra;
pub mod calculus;
pub mod error;
pub mod generator;
pub mod harness;
pub mod network;
pub mod oracle;
pub mod portfolio;
pub mod solver;
pub mod subclasses;

pub use algebra::{BaseRelation, CompositionTable, FullTable, Relation, WeightTable};
pub use calculus::Calculus;
pub use error::{Error, Result};
pub use generator::{generate, GenSpec};
pub use network::{Instance, Model, Network, PathConsistency, PcResult, PcStatus, QueueDiscipline};
pub use solver::{consistency, HeuristicConfig, Order, Scope, SolveOutcome, SolveStatus, Solver};
pub use subclasses::{SplitSet, SplitSetId};

/// Threshold analysis in double precision.
pub type FlawReport = generator::FlawAnalysis<f64>;

/// Average branching factor of a split set, as an exact fraction.
pub type BranchingFactor = num_rational::Ratio<u32>;
