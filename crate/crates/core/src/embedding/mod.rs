//! Skip-gram node embeddings trained with negative sampling.
//!
//! [`train_deepwalk`] runs SGNS over truncated random walks; [`train_line`]
//! samples edges directly (first-order proximity). Both share the update in
//! [`sgns`], which is written once against a small parameter-table trait so
//! the same code drives the deterministic single-threaded path and the
//! hogwild path (unsynchronized `AtomicU64` cells) behind `TrainConfig::parallel`.

mod line;
mod sgns;
mod walks;

pub use line::train_line;
pub use sgns::train_deepwalk;
pub use walks::{generate_walks, generate_walks_with, WalkCorpus};

use std::io::Write;
use std::path::Path;

use ndarray::{Array2, ArrayView1};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Any entry above this magnitude after an epoch counts as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub dim: usize,
    pub walk_length: usize,
    pub walks_per_node: usize,
    pub window: usize,
    pub negatives: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Hogwild updates across threads. Non-deterministic; off by default.
    pub parallel: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            dim: 8,
            walk_length: 5,
            walks_per_node: 10,
            window: 5,
            negatives: 5,
            learning_rate: 0.025,
            epochs: 1,
            seed: 0,
            parallel: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("dim", self.dim),
            ("walk_length", self.walk_length),
            ("walks_per_node", self.walks_per_node),
            ("window", self.window),
            ("negatives", self.negatives),
            ("epochs", self.epochs),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::invalid(format!("{name} must be at least 1")));
            }
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}

/// Node vectors `W` (target side) and the output-side context vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    target: Array2<f64>,
    context: Array2<f64>,
}

impl EmbeddingMatrix {
    pub fn new(target: Array2<f64>, context: Array2<f64>) -> Result<Self> {
        if target.dim() != context.dim() {
            return Err(Error::invalid(format!(
                "target {:?} and context {:?} shapes differ",
                target.dim(),
                context.dim()
            )));
        }
        Ok(Self { target, context })
    }

    /// Embedding with zero context vectors, e.g. a spectral embedding `U`.
    pub fn from_target(target: Array2<f64>) -> Self {
        let context = Array2::zeros(target.dim());
        Self { target, context }
    }

    /// Standard Skip-gram initialization: targets uniform in `[-0.5/k, 0.5/k]`,
    /// contexts zero.
    pub fn init(rows: usize, dim: usize, seed: u64) -> Self {
        let mut rng = seed::rng(seed);
        let half = 0.5 / dim as f64;
        let target = Array2::from_shape_simple_fn((rows, dim), || rng.random_range(-half..=half));
        Self::from_target(target)
    }

    pub fn rows(&self) -> usize {
        self.target.nrows()
    }

    pub fn dim(&self) -> usize {
        self.target.ncols()
    }

    pub fn target(&self) -> &Array2<f64> {
        &self.target
    }

    pub fn context(&self) -> &Array2<f64> {
        &self.context
    }

    pub fn vector(&self, v: usize) -> ArrayView1<'_, f64> {
        self.target.row(v)
    }

    pub fn is_finite(&self) -> bool {
        self.target.iter().chain(self.context.iter()).all(|x| x.is_finite())
    }

    pub(crate) fn max_abs(&self) -> f64 {
        self.target.iter().chain(self.context.iter()).fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Write `node,dim0,..` rows of the target vectors with 17 significant digits.
    pub fn write_csv(&self, path: impl AsRef<Path>, labels: Option<&[String]>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        let mut header = String::from("node");
        for d in 0..self.dim() {
            header.push_str(&format!(",dim{d}"));
        }
        let mut write = || -> std::io::Result<()> {
            writeln!(w, "{header}")?;
            for (v, row) in self.target.outer_iter().enumerate() {
                match labels {
                    Some(l) => write!(w, "{}", l[v])?,
                    None => write!(w, "{v}")?,
                }
                for x in row {
                    write!(w, ",{x:.16e}")?;
                }
                writeln!(w)?;
            }
            w.flush()
        };
        write().map_err(|e| Error::io(path, e))
    }

    /// Read a file written by [`EmbeddingMatrix::write_csv`]. Returns the
    /// matrix (zero context vectors) and the node column.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<(Self, Vec<String>)> {
        let path = path.as_ref();
        let mut r = csv::Reader::from_path(path)?;
        let dim = r.headers()?.len().saturating_sub(1);
        let mut nodes = Vec::new();
        let mut data = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            if rec.len() != dim + 1 {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    line: i + 2,
                    msg: format!("expected {} fields, found {}", dim + 1, rec.len()),
                });
            }
            nodes.push(rec[0].to_string());
            for f in rec.iter().skip(1) {
                let x: f64 = f.trim().parse().map_err(|_| Error::Parse {
                    path: path.display().to_string(),
                    line: i + 2,
                    msg: format!("not a number: {f:?}"),
                })?;
                data.push(x);
            }
        }
        let target = Array2::from_shape_vec((nodes.len(), dim), data)
            .map_err(|e| Error::invalid(e.to_string()))?;
        Ok((Self::from_target(target), nodes))
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Gradient of the positive-pair loss `-log sigma(w_i . w_b)` with respect to
/// `w_i`: `(sigma(w_i . w_b) - 1) w_b`.
pub fn ns_gradient(w_b: &[f64], w_i: &[f64]) -> Vec<f64> {
    assert_eq!(w_b.len(), w_i.len(), "ns_gradient: dimension mismatch");
    let s = sigmoid(crate::linalg::dot(w_i, w_b)) - 1.0;
    w_b.iter().map(|x| s * x).collect()
}
