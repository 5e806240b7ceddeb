//! Skip-gram node embeddings and their global, node-level explanations.
//!
//! The crate trains DeepWalk and first-order LINE embeddings with negative
//! sampling, scores every node by how strongly it bridges clusters of the
//! learned embedding, and ranks nodes with two gradient-based explainers:
//!
//! * **GRAPH-GD**: the mean magnitude of the positive-pair Skip-gram gradient
//!   over a node's (sampled) neighbours.
//! * **GRAPH-wGD**: the same mean with each gradient weighted by
//!   `1 + max(0, cos(w_b - w_i, -grad))`, which up-weights *support* neighbours.
//!
//! Alongside the explainers sit the pieces needed to check them: a
//! degree/volume-preserving cluster-aware perturbation, spectral clustering
//! with a Lanczos eigensolver (and a Jacobi reference solver), the normalized
//! association objective, the NetMF factorization, evaluation measures
//! (Spearman, node importance, prediction change) and executable property
//! suites in [`verify`].
//!
//! Data-parallel loops (per-node scoring, random walks, k-means assignment,
//! suite instances) run on rayon when the default `parallel` feature is on and
//! fall back to plain iterators otherwise. See [`par`].

pub mod clusters;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod explain;
pub mod graph;
pub mod linalg;
pub mod par;
pub mod seed;
pub mod spectral;
pub mod verify;

pub use clusters::ClusterAssignment;
pub use embedding::{EmbeddingMatrix, TrainConfig, WalkCorpus};
pub use error::{Error, Result};
pub use explain::{ScoreVector, WeightVariant};
pub use graph::{Graph, PerturbationRecord};
pub use par::Execution;
