//! Run configuration: built-in defaults, then an optional `key = value` file,
//! then command-line flags. Keys are the long flag names; `-` and `_` are
//! interchangeable.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bridgeness::verify::Suite;
use bridgeness::{TrainConfig, WeightVariant};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    GraphGd,
    GraphWgd,
    Bridgeness,
    Degree,
    Ppr,
    Greedy,
}

impl Method {
    pub const ALL: [Method; 6] =
        [Method::GraphGd, Method::GraphWgd, Method::Bridgeness, Method::Degree, Method::Ppr, Method::Greedy];

    pub fn name(self) -> &'static str {
        match self {
            Method::GraphGd => "graph_gd",
            Method::GraphWgd => "graph_wgd",
            Method::Bridgeness => "bridgeness",
            Method::Degree => "degree",
            Method::Ppr => "ppr",
            Method::Greedy => "greedy",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim().to_ascii_lowercase().replace('-', "_");
        Method::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
            format!("unknown method {s:?}; expected one of {}", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Deepwalk,
    Line,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Spearman,
    Ni,
    Pc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub graph: Option<PathBuf>,
    pub weighted: bool,
    pub labels: Option<PathBuf>,
    pub embedding: Option<PathBuf>,
    pub model: Model,
    pub train: TrainConfig,
    pub methods: Vec<Method>,
    pub variant: WeightVariant,
    pub q: usize,
    pub psi: usize,
    pub alpha: f64,
    pub k: usize,
    pub seeds: Vec<u64>,
    pub z: Vec<f64>,
    pub metrics: Option<Vec<Metric>>,
    pub m: Option<usize>,
    pub suites: Vec<Suite>,
    pub instances: Option<usize>,
    pub perturb: Option<String>,
    /// Output directory; the working directory when unset.
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            graph: None,
            weighted: false,
            labels: None,
            embedding: None,
            model: Model::Deepwalk,
            train: TrainConfig::default(),
            methods: vec![Method::GraphWgd],
            variant: WeightVariant::Base,
            q: 10,
            psi: 100,
            alpha: 0.5,
            k: 2,
            seeds: vec![0],
            z: vec![3.0, 5.0, 7.0],
            metrics: None,
            m: None,
            suites: Vec::new(),
            instances: None,
            perturb: None,
            out: None,
        }
    }
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| format!("{key}: bad value {s:?}: {e}")))
        .collect()
}

fn one<T: FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    value.trim().parse::<T>().map_err(|e| format!("{key}: bad value {value:?}: {e}"))
}

fn flag(key: &str, value: &str) -> Result<bool, String> {
    match value.trim().to_ascii_lowercase().as_str() {
        "" | "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(format!("{key}: expected true or false, got {value:?}")),
    }
}

impl RunConfig {
    /// Set one key. Unknown keys are errors so typos in config files surface.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let key = key.trim().to_ascii_lowercase().replace('-', "_");
        let k = key.as_str();
        match k {
            "graph" => self.graph = Some(PathBuf::from(value.trim())),
            "weighted" => self.weighted = flag(k, value)?,
            "labels" => self.labels = Some(PathBuf::from(value.trim())),
            "embedding" => self.embedding = Some(PathBuf::from(value.trim())),
            "model" => {
                self.model = match value.trim().to_ascii_lowercase().as_str() {
                    "deepwalk" => Model::Deepwalk,
                    "line" => Model::Line,
                    other => return Err(format!("model: expected deepwalk or line, got {other:?}")),
                }
            }
            "dim" => self.train.dim = one(k, value)?,
            "window" => self.train.window = one(k, value)?,
            "walks" => self.train.walks_per_node = one(k, value)?,
            "walk_length" => self.train.walk_length = one(k, value)?,
            "negatives" => self.train.negatives = one(k, value)?,
            "learning_rate" | "lr" => self.train.learning_rate = one(k, value)?,
            "epochs" => self.train.epochs = one(k, value)?,
            "hogwild" => self.train.parallel = flag(k, value)?,
            "method" | "methods" => self.methods = list(k, value)?,
            "variant" => self.variant = one(k, value)?,
            "q" => self.q = one(k, value)?,
            "psi" => self.psi = one(k, value)?,
            "alpha" => self.alpha = one(k, value)?,
            "k" => self.k = one(k, value)?,
            "seed" | "seeds" => self.seeds = list(k, value)?,
            "z" => self.z = list(k, value)?,
            "metrics" => {
                let names: Vec<String> = list(k, value)?;
                let parsed = names
                    .iter()
                    .map(|s| match s.to_ascii_lowercase().as_str() {
                        "spearman" => Ok(Metric::Spearman),
                        "ni" => Ok(Metric::Ni),
                        "pc" => Ok(Metric::Pc),
                        other => Err(format!("metrics: unknown metric {other:?}")),
                    })
                    .collect::<Result<_, _>>()?;
                self.metrics = Some(parsed);
            }
            "m" => self.m = Some(one(k, value)?),
            "suite" | "suites" => self.suites = list(k, value)?,
            "instances" => self.instances = Some(one(k, value)?),
            "perturb" => self.perturb = Some(value.trim().to_string()),
            "out" => self.out = Some(PathBuf::from(value.trim())),
            _ => return Err(format!("unknown configuration key {key:?}")),
        }
        Ok(())
    }

    /// Apply a `key = value` file. Blank lines and lines starting with `#`
    /// are skipped.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("{}:{}: expected key = value", path.display(), i + 1)))?;
            self.set(key, value).map_err(|e| CliError::Usage(format!("{}:{}: {e}", path.display(), i + 1)))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        self.train.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if self.methods.is_empty() {
            return bad("at least one method is required".into());
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha must be in (0, 1], got {}", self.alpha));
        }
        if let Some(z) = self.z.iter().find(|z| !(**z > 0.0 && **z <= 100.0)) {
            return bad(format!("z must be in (0, 100], got {z}"));
        }
        if self.z.is_empty() {
            return bad("at least one z value is required".into());
        }
        if self.psi == 0 || self.q == 0 || self.k == 0 {
            return bad("psi, q and k must be at least 1".into());
        }
        if self.instances == Some(0) {
            return bad("instances must be at least 1".into());
        }
        Ok(())
    }

    /// The configuration as a `key = value` file that [`RunConfig::apply_file`]
    /// reads back to the same configuration.
    pub fn to_kv(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        let mut lines = Vec::new();
        let mut push = |k: &str, v: String| lines.push(format!("{k} = {v}"));
        if let Some(g) = &self.graph {
            push("graph", g.display().to_string());
        }
        push("weighted", self.weighted.to_string());
        if let Some(l) = &self.labels {
            push("labels", l.display().to_string());
        }
        if let Some(e) = &self.embedding {
            push("embedding", e.display().to_string());
        }
        push("model", if self.model == Model::Line { "line" } else { "deepwalk" }.into());
        let t = &self.train;
        push("dim", t.dim.to_string());
        push("window", t.window.to_string());
        push("walks", t.walks_per_node.to_string());
        push("walk-length", t.walk_length.to_string());
        push("negatives", t.negatives.to_string());
        push("learning-rate", format!("{:?}", t.learning_rate));
        push("epochs", t.epochs.to_string());
        push("hogwild", t.parallel.to_string());
        push("method", join(self.methods.iter().map(|m| m.to_string()).collect()));
        push("variant", self.variant.to_string());
        push("q", self.q.to_string());
        push("psi", self.psi.to_string());
        push("alpha", format!("{:?}", self.alpha));
        push("k", self.k.to_string());
        push("seeds", join(self.seeds.iter().map(|s| s.to_string()).collect()));
        push("z", join(self.z.iter().map(|z| format!("{z:?}")).collect()));
        if let Some(ms) = &self.metrics {
            let names = ms.iter().map(|m| match m {
                Metric::Spearman => "spearman".to_string(),
                Metric::Ni => "ni".to_string(),
                Metric::Pc => "pc".to_string(),
            });
            push("metrics", join(names.collect()));
        }
        if let Some(m) = self.m {
            push("m", m.to_string());
        }
        if !self.suites.is_empty() {
            push("suites", join(self.suites.iter().map(|s| s.to_string()).collect()));
        }
        if let Some(n) = self.instances {
            push("instances", n.to_string());
        }
        if let Some(p) = &self.perturb {
            push("perturb", p.clone());
        }
        if let Some(o) = &self.out {
            push("out", o.display().to_string());
        }
        lines.join("\n") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::default();
        assert_eq!(c.psi, 100);
        assert_eq!(c.alpha, 0.5);
        assert_eq!(c.z, vec![3.0, 5.0, 7.0]);
        c.validate().unwrap();
    }

    #[test]
    fn keys_accept_both_spellings() {
        let mut c = RunConfig::default();
        c.set("walk-length", "7").unwrap();
        c.set("WALK_LENGTH", "9").unwrap();
        c.set("methods", "graph_gd, degree").unwrap();
        c.set("variant", "angular:45").unwrap();
        assert_eq!(c.train.walk_length, 9);
        assert_eq!(c.methods, vec![Method::GraphGd, Method::Degree]);
        assert_eq!(c.variant, WeightVariant::Angular(45.0));
        assert!(c.set("colour", "blue").is_err());
        assert!(c.set("psi", "many").is_err());
    }

    #[test]
    fn kv_round_trip() {
        let mut c = RunConfig::default();
        c.set("seeds", "1,2,3").unwrap();
        c.set("alpha", "0.1").unwrap();
        c.set("graph", "g.txt").unwrap();
        c.set("metrics", "ni,pc").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, c.to_kv()).unwrap();
        let mut back = RunConfig::default();
        back.apply_file(&path).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn validation() {
        assert!(RunConfig { z: vec![0.0], ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig { alpha: 1.5, ..RunConfig::default() }.validate().is_err());
    }
}
