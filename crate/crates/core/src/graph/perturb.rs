use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::clusters::ClusterAssignment;
use crate::error::{Error, Result};
use crate::seed;

/// `(neighbour, weight)` of an edge removed from the pivot.
pub type RemovedEdge = (usize, f64);

/// What [`perturb`] did, in enough detail to replay it.
///
/// Serialized as `{"pivot": .., "alpha": .., "seed": .., "removed": [[node, weight], ..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationRecord {
    pub pivot: usize,
    pub alpha: f64,
    #[serde(rename = "seed")]
    pub rng_seed: u64,
    #[serde(rename = "removed")]
    pub removed_edges: Vec<RemovedEdge>,
}

impl PerturbationRecord {
    pub fn is_empty(&self) -> bool {
        self.removed_edges.is_empty()
    }

    /// Re-apply the recorded removals to `g`. Each edge must still be present
    /// with exactly the recorded weight.
    pub fn apply(&self, g: &Graph) -> Result<Graph> {
        if self.pivot >= g.num_nodes() {
            return Err(Error::invalid(format!(
                "record pivot {} outside graph of {} nodes",
                self.pivot,
                g.num_nodes()
            )));
        }
        for &(q, w) in &self.removed_edges {
            let have = if q < g.num_nodes() { g.weight(self.pivot, q) } else { 0.0 };
            if have.to_bits() != w.to_bits() || q == self.pivot {
                return Err(Error::invalid(format!(
                    "record edge ({}, {q}) with weight {w} does not match graph weight {have}",
                    self.pivot
                )));
            }
        }
        Ok(move_to_self_loops(g, self.pivot, &self.removed_edges))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Degree/volume-preserving cluster-aware perturbation around `pivot`.
///
/// Candidates are the pivot's neighbours in clusters other than its own. A
/// uniform sample of `round(alpha * |candidates|)` of them (half rounds up) has
/// its edge to the pivot removed, with the edge weight added to the self-loop
/// of both endpoints. A pivot without inter-cluster edges yields the input
/// graph and an empty record.
pub fn perturb(
    g: &Graph,
    pivot: usize,
    alpha: f64,
    clusters: &ClusterAssignment,
    seed: u64,
) -> Result<(Graph, PerturbationRecord)> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!("alpha must be in (0, 1], got {alpha}")));
    }
    if pivot >= g.num_nodes() {
        return Err(Error::invalid(format!(
            "pivot {pivot} outside graph of {} nodes",
            g.num_nodes()
        )));
    }
    if clusters.len() != g.num_nodes() {
        return Err(Error::invalid(format!(
            "cluster assignment covers {} nodes, graph has {}",
            clusters.len(),
            g.num_nodes()
        )));
    }
    let home = clusters.cluster_of(pivot);
    let candidates: Vec<RemovedEdge> = g
        .row(pivot)
        .filter(|&(q, w)| q != pivot && w > 0.0 && clusters.cluster_of(q) != home)
        .collect();
    let take = (alpha * candidates.len() as f64 + 0.5).floor() as usize;
    let take = take.min(candidates.len());

    let mut record = PerturbationRecord { pivot, alpha, rng_seed: seed, removed_edges: Vec::new() };
    if take == 0 {
        return Ok((g.clone(), record));
    }
    let mut rng = seed::rng(seed);
    let mut picked: Vec<usize> = index::sample(&mut rng, candidates.len(), take).into_vec();
    picked.sort_unstable();
    record.removed_edges = picked.into_iter().map(|i| candidates[i]).collect();
    let out = move_to_self_loops(g, pivot, &record.removed_edges);
    Ok((out, record))
}

/// Perturb each node of `pivots` in turn (ascending id order), always against
/// the original `clusters`. Node `v` uses the seed `derive(seed, v)`.
pub fn perturb_sequence(
    g: &Graph,
    pivots: &[usize],
    alpha: f64,
    clusters: &ClusterAssignment,
    seed: u64,
) -> Result<(Graph, Vec<PerturbationRecord>)> {
    let mut order = pivots.to_vec();
    order.sort_unstable();
    order.dedup();
    let mut current = g.clone();
    let mut records = Vec::with_capacity(order.len());
    for v in order {
        let (next, rec) = perturb(&current, v, alpha, clusters, seed::derive(seed, v as u64))?;
        current = next;
        records.push(rec);
    }
    Ok((current, records))
}

fn move_to_self_loops(g: &Graph, pivot: usize, removed: &[RemovedEdge]) -> Graph {
    if removed.is_empty() {
        return g.clone();
    }
    let mut rows = g.rows();
    for &(q, w) in removed {
        rows[pivot].retain(|&(c, _)| c != q);
        rows[q].retain(|&(c, _)| c != pivot);
        add_self_loop(&mut rows[q], q, w);
        add_self_loop(&mut rows[pivot], pivot, w);
    }
    Graph::from_rows(rows).with_labels_of(g)
}

fn add_self_loop(row: &mut Vec<(usize, f64)>, v: usize, w: f64) {
    match row.iter_mut().find(|(c, _)| *c == v) {
        Some(entry) => entry.1 += w,
        None => row.push((v, w)),
    }
}

impl Graph {
    pub(crate) fn with_labels_of(mut self, other: &Graph) -> Graph {
        self.labels = other.labels.clone();
        self
    }
}
