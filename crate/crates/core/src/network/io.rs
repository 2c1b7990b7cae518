use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::Network;
use crate::algebra::Relation;
use crate::error::{Error, Result};

/// Which random model produced an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    /// Labels drawn from all relations.
    A,
    /// Labels drawn from NP8 only.
    H,
    Custom,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::A => "A",
            Model::H => "H",
            Model::Custom => "custom",
        })
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Model> {
        match s {
            "A" | "a" => Ok(Model::A),
            "H" | "h" => Ok(Model::H),
            "custom" => Ok(Model::Custom),
            _ => Err(Error::InvalidInput(format!("unknown model `{s}`"))),
        }
    }
}

/// Header fields of an instance file.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceMeta {
    pub model: Model,
    pub d: f64,
    pub l: f64,
    pub seed: u64,
    /// Name of the generator's random number source, if recorded.
    pub rng: Option<String>,
}

impl Default for InstanceMeta {
    fn default() -> Self {
        InstanceMeta {
            model: Model::Custom,
            d: 0.0,
            l: 0.0,
            seed: 0,
            rng: None,
        }
    }
}

/// A network plus the parameters it was generated with.
///
/// Text format:
///
/// ```text
/// rcc8 n=4 model=A d=1.5 l=4 seed=17 rng=chacha8
/// # comment
/// 0 1 : DC|EC
/// 1 3 : TPP
/// ```
///
/// Edges use 0-based indices with `i < j`; unlisted edges are universal.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub meta: InstanceMeta,
    pub network: Network,
}

impl Instance {
    pub fn new(meta: InstanceMeta, network: Network) -> Instance {
        Instance { meta, network }
    }

    pub fn custom(network: Network) -> Instance {
        Instance::new(InstanceMeta::default(), network)
    }

    pub fn to_text(&self) -> String {
        let m = &self.meta;
        let mut s = format!(
            "rcc8 n={} model={} d={} l={} seed={}",
            self.network.len(),
            m.model,
            m.d,
            m.l,
            m.seed
        );
        if let Some(rng) = &m.rng {
            let _ = write!(s, " rng={rng}");
        }
        s.push('\n');
        for (i, j, r) in self.network.edges() {
            if r != Relation::UNIVERSAL {
                let _ = writeln!(s, "{i} {j} : {r}");
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Instance> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let mut tokens = header.split_whitespace();
        if tokens.next() != Some("rcc8") {
            return Err(Error::parse(hline, "header must start with `rcc8`"));
        }
        let mut n = None;
        let mut meta = InstanceMeta::default();
        for tok in tokens {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| Error::parse(hline, format!("expected key=value, got `{tok}`")))?;
            let bad = |what: &str| Error::parse(hline, format!("bad {what} `{value}`"));
            match key {
                "n" => n = Some(value.parse::<usize>().map_err(|_| bad("n"))?),
                "model" => meta.model = value.parse().map_err(|_| bad("model"))?,
                "d" => meta.d = value.parse().map_err(|_| bad("d"))?,
                "l" => meta.l = value.parse().map_err(|_| bad("l"))?,
                "seed" => meta.seed = value.parse().map_err(|_| bad("seed"))?,
                "rng" => meta.rng = Some(value.to_string()),
                _ => return Err(Error::parse(hline, format!("unknown header key `{key}`"))),
            }
        }
        let n = n.ok_or_else(|| Error::parse(hline, "header lacks n="))?;
        if n > super::MAX_REGIONS {
            return Err(Error::parse(hline, format!("n={n} is too large")));
        }

        let mut network = Network::new(n);
        let mut seen = std::collections::HashSet::new();
        for (lineno, line) in lines {
            let (lhs, rhs) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, "expected `i j : RELATION`"))?;
            let mut idx = lhs.split_whitespace().map(str::parse::<usize>);
            let (i, j) = match (idx.next(), idx.next(), idx.next()) {
                (Some(Ok(i)), Some(Ok(j)), None) => (i, j),
                _ => return Err(Error::parse(lineno, "expected two region indices before `:`")),
            };
            if i >= j || j >= n {
                return Err(Error::parse(
                    lineno,
                    format!("edge ({i},{j}) needs 0 <= i < j < {n}"),
                ));
            }
            if !seen.insert((i, j)) {
                return Err(Error::parse(lineno, format!("duplicate edge ({i},{j})")));
            }
            let r: Relation = rhs.parse().map_err(|e: Error| Error::parse(lineno, e.to_string()))?;
            network.set(i, j, r);
        }
        Ok(Instance { meta, network })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Instance> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| e.context(path.display().to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}
