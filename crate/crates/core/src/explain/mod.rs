//! Node-level global explanations of an embedding.
//!
//! * [`bridgeness`]: inter-cluster degree, the reference notion of importance.
//! * [`imp`] / [`imp_hat`]: how much an embedding moves after a perturbation.
//! * [`graph_gd`] / [`graph_wgd`]: gradient-based scores that need no retraining.
//! * [`ppr_scores`] / [`degree_scores`]: baselines.

mod baselines;
mod gradient;
mod metrics;

pub use baselines::{degree_scores, ppr_scores, ppr_scores_with, PageRankOptions};
pub use gradient::{
    cosine, directional_weight, graph_gd, graph_gd_scores, graph_wgd, graph_wgd_scores, is_good_embedding,
    is_support_node, GoodEmbedding, GOOD_EMBEDDING_EXHAUSTIVE_LIMIT,
};
pub use metrics::{
    bridgeness, bridgeness_scores, default_m, dnec, euclidean_cut, imp, imp_hat, imp_hat_edge_weighted,
    nearest_neighbors, pairwise_spread,
};

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-node scores with a deterministic ranking.
///
/// The ranking sorts by descending score with ties broken by ascending node
/// id. Nodes marked *unranked* (isolated nodes for the gradient explainers)
/// are placed after every other node, in id order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    method: String,
    scores: Vec<f64>,
    unranked: Vec<bool>,
    ranking: Vec<usize>,
}

impl ScoreVector {
    pub fn new(method: impl Into<String>, scores: Vec<f64>) -> Self {
        let n = scores.len();
        Self::with_unranked(method, scores, vec![false; n])
    }

    pub fn with_unranked(method: impl Into<String>, scores: Vec<f64>, unranked: Vec<bool>) -> Self {
        assert_eq!(scores.len(), unranked.len(), "one flag per score");
        let mut ranking: Vec<usize> = (0..scores.len()).collect();
        ranking.sort_by(|&a, &b| {
            unranked[a]
                .cmp(&unranked[b])
                .then_with(|| scores[b].total_cmp(&scores[a]))
                .then_with(|| a.cmp(&b))
        });
        Self { method: method.into(), scores, unranked, ranking }
    }

    pub fn method(&self) -> &str {
        &self.method
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn score(&self, v: usize) -> f64 {
        self.scores[v]
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    pub fn is_unranked(&self, v: usize) -> bool {
        self.unranked[v]
    }

    /// 1-based position of `v` in the ranking.
    pub fn rank_of(&self, v: usize) -> usize {
        self.ranking.iter().position(|&x| x == v).map_or(0, |p| p + 1)
    }

    /// The first `q` nodes of the ranking (all of them if `q` exceeds the size).
    pub fn top_q(&self, q: usize) -> Vec<usize> {
        self.ranking[..q.min(self.len())].to_vec()
    }

    /// Write `node,score,rank` rows in node order.
    pub fn write_csv(&self, path: impl AsRef<Path>, labels: Option<&[String]>) -> Result<()> {
        let path = path.as_ref();
        let mut rank = vec![0; self.len()];
        for (pos, &v) in self.ranking.iter().enumerate() {
            rank[v] = pos + 1;
        }
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["node", "score", "rank"])?;
        for v in 0..self.len() {
            let node = labels.map_or_else(|| v.to_string(), |l| l[v].clone());
            w.write_record([node, self.scores[v].to_string(), rank[v].to_string()])?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

/// Weight functions for GRAPH-wGD. `Base` is the clamped cosine; the others
/// are ablations.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum WeightVariant {
    #[default]
    Base,
    PlusMinus,
    Abs,
    Sigmoid,
    Tanh,
    /// Cosine weight only inside a cone of half-angle `theta` degrees.
    Angular(f64),
}

impl WeightVariant {
    pub fn angular(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= 90.0) {
            return Err(Error::invalid(format!("angular theta must be in (0, 90], got {theta}")));
        }
        Ok(WeightVariant::Angular(theta))
    }

    /// The ablation set: every fixed variant plus a 30 degree cone.
    pub fn all() -> Vec<WeightVariant> {
        use WeightVariant::*;
        vec![Base, PlusMinus, Abs, Sigmoid, Tanh, Angular(30.0)]
    }
}

impl fmt::Display for WeightVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightVariant::Base => f.write_str("base"),
            WeightVariant::PlusMinus => f.write_str("plus_minus"),
            WeightVariant::Abs => f.write_str("abs"),
            WeightVariant::Sigmoid => f.write_str("sigmoid"),
            WeightVariant::Tanh => f.write_str("tanh"),
            WeightVariant::Angular(t) => write!(f, "angular:{t}"),
        }
    }
}

impl FromStr for WeightVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Ok(match s.as_str() {
            "base" => WeightVariant::Base,
            "plus_minus" | "plusminus" | "+-" => WeightVariant::PlusMinus,
            "abs" => WeightVariant::Abs,
            "sigmoid" => WeightVariant::Sigmoid,
            "tanh" => WeightVariant::Tanh,
            other => {
                let theta = other
                    .strip_prefix("angular:")
                    .or_else(|| other.strip_prefix("angular(").and_then(|r| r.strip_suffix(')')))
                    .and_then(|t| t.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::invalid(format!("unknown weight variant {other:?}")))?;
                WeightVariant::angular(theta)?
            }
        })
    }
}

impl TryFrom<String> for WeightVariant {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<WeightVariant> for String {
    fn from(v: WeightVariant) -> String {
        v.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn top_q_examples() {
        let s = ScoreVector::new("x", vec![3.0, 1.0, 2.0]);
        assert_eq!(s.top_q(2), vec![0, 2]);
        assert_eq!(s.top_q(3), vec![0, 2, 1]);
        let flat = ScoreVector::new("x", vec![1.0; 4]);
        assert_eq!(flat.top_q(2), vec![0, 1]);
        assert_eq!(s.rank_of(1), 3);
    }

    #[test]
    fn unranked_go_last() {
        let s = ScoreVector::with_unranked("x", vec![0.0, 0.5, 0.0], vec![true, false, false]);
        assert_eq!(s.ranking(), &[1, 2, 0]);
    }

    #[test]
    fn variant_parsing() {
        for v in WeightVariant::all() {
            assert_eq!(v.to_string().parse::<WeightVariant>().unwrap(), v);
        }
        assert_eq!("angular(45)".parse::<WeightVariant>().unwrap(), WeightVariant::Angular(45.0));
        assert!("angular:0".parse::<WeightVariant>().is_err());
        assert!("angular:91".parse::<WeightVariant>().is_err());
        assert!("cubic".parse::<WeightVariant>().is_err());
    }

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        ScoreVector::new("x", vec![0.5, 2.0]).write_csv(&p, None).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "node,score,rank\n0,0.5,2\n1,2,1\n");
    }
}
