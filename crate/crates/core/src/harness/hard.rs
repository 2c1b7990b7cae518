use std::path::Path;

use rayon::prelude::*;

use crate::calculus::Calculus;
use crate::error::{Error, Result};
use crate::network::Instance;
use crate::portfolio::{write_records, ConfigRun, RunRecord};
use crate::solver::{HeuristicConfig, Solver};

/// A named instance of a corpus.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusEntry {
    pub name: String,
    pub instance: Instance,
}

/// Reads every `*.rcc8` file of `dir`, sorted by file name.
pub fn load_corpus(dir: impl AsRef<Path>) -> Result<Vec<CorpusEntry>> {
    let dir = dir.as_ref();
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().is_some_and(|x| x == "rcc8") {
            paths.push(path);
        }
    }
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            Ok(CorpusEntry {
                name: p.file_name().unwrap_or_default().to_string_lossy().into_owned(),
                instance: Instance::load(&p)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct HardEntry {
    pub name: String,
    pub instance: Instance,
    /// Indexed by [`HeuristicConfig::id`].
    pub runs: Vec<ConfigRun>,
}

/// Instances on which at least one configuration hit the node cap.
#[derive(Clone, Debug, PartialEq)]
pub struct HardSet {
    pub threshold: u64,
    pub entries: Vec<HardEntry>,
}

impl HardSet {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn records(&self) -> Vec<RunRecord> {
        self.entries
            .iter()
            .map(|e| RunRecord {
                instance_id: e.name.clone(),
                cap: self.threshold,
                runs: e.runs.clone(),
            })
            .collect()
    }

    pub fn manifest_csv(&self) -> String {
        let mut header = vec!["instance_file".to_string(), "n".into(), "d".into(), "seed".into()];
        header.extend(HeuristicConfig::all().iter().map(|c| format!("nodes_{}", c.column_name())));
        let mut out = header.join(",");
        out.push('\n');
        for e in &self.entries {
            let mut row = vec![
                e.name.clone(),
                e.instance.network.len().to_string(),
                e.instance.meta.d.to_string(),
                e.instance.meta.seed.to_string(),
            ];
            row.extend(e.runs.iter().map(|r| r.visited_nodes.to_string()));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Writes the instance files, `manifest.csv` and `records.csv` into
    /// `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for e in &self.entries {
            e.instance.save(dir.join(&e.name))?;
        }
        let manifest = dir.join("manifest.csv");
        std::fs::write(&manifest, self.manifest_csv()).map_err(|e| Error::io(&manifest, e))?;
        write_records(dir.join("records.csv"), &self.records())
    }
}

/// Runs every configuration on every corpus instance with `cap` nodes and
/// keeps the instances some configuration could not decide.
pub fn collect_hard(calculus: &Calculus, corpus: &[CorpusEntry], cap: u64) -> Result<HardSet> {
    let configs = HeuristicConfig::all();
    let runs: Vec<Vec<ConfigRun>> = corpus
        .par_iter()
        .map(|entry| {
            configs
                .iter()
                .map(|&cfg| {
                    let out = Solver::new(calculus, cfg)
                        .solve(&entry.instance.network, cap)
                        .map_err(|e| e.context(entry.name.clone()))?;
                    Ok(ConfigRun {
                        status: out.status,
                        visited_nodes: out.visited_nodes,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let entries = corpus
        .iter()
        .zip(runs)
        .filter(|(_, runs)| runs.iter().any(|r| !r.status.is_decisive()))
        .map(|(entry, runs)| HardEntry {
            name: entry.name.clone(),
            instance: entry.instance.clone(),
            runs,
        })
        .collect();
    Ok(HardSet {
        threshold: cap,
        entries,
    })
}
