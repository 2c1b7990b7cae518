use std::path::PathBuf;

use rcc8::oracle::Oracle;
use rcc8::*;

fn witness() -> Instance {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/witness.rcc8");
    Instance::load(path).unwrap()
}

#[test]
fn witness_is_a_generated_h_instance() {
    let w = witness();
    assert_eq!(w.meta.model, Model::H);
    let spec = GenSpec::new(Model::H, w.network.len(), w.meta.d, w.meta.seed).with_label_size(w.meta.l);
    assert_eq!(generate(&spec).unwrap(), w);
}

#[test]
fn pc_accepts_what_search_refutes() {
    let calculus = Calculus::shared();
    let w = witness();
    for discipline in QueueDiscipline::ALL {
        let mut net = w.network.clone();
        let r = PathConsistency::new(calculus, discipline).run(&mut net);
        assert_eq!(r.status, PcStatus::PathConsistent, "{discipline}");
    }
    assert!(!Oracle::new(calculus.table()).is_consistent(&w.network));
    for cfg in HeuristicConfig::all() {
        assert_eq!(consistency(&w.network, cfg, 100_000).unwrap().status, SolveStatus::Inconsistent, "{cfg}");
    }
}

/// Scans small H instances in a fixed order and returns the first one PC
/// accepts but the oracle refutes.
fn first_witness(max_n: usize, seeds: u64) -> Option<Instance> {
    let calculus = Calculus::shared();
    let oracle = Oracle::new(calculus.table());
    let mut pc = PathConsistency::new(calculus, QueueDiscipline::Unweighted);
    for n in 4..=max_n {
        for d2 in 4..=2 * (n - 1) {
            for seed in 0..seeds {
                let inst = generate(&GenSpec::new(Model::H, n, d2 as f64 / 2.0, seed)).unwrap();
                let mut net = inst.network.clone();
                if !pc.run(&mut net).is_fail() && !oracle.is_consistent(&net) {
                    return Some(inst);
                }
            }
        }
    }
    None
}

#[test]
fn search_rediscovers_the_stored_witness() {
    assert_eq!(first_witness(6, 3000), Some(witness()));
}
