//! Undirected weighted graphs in compressed sparse row form.

mod generators;
mod io;
mod perturb;
mod power;

pub use generators::*;
pub use io::{load_edge_list, parse_edge_list};
pub use perturb::{perturb, perturb_sequence, PerturbationRecord, RemovedEdge};
pub use power::{weighted_power_graph, DENSE_LIMIT};

use std::collections::{BTreeMap, HashMap};

use rand::seq::index;

use crate::error::{Error, Result};
use crate::seed;

/// An undirected graph with non-negative edge weights.
///
/// Adjacency is stored symmetrically: an edge `{u, v}` with `u != v` appears
/// in both rows, a self-loop `{v, v}` appears once on the diagonal. Degrees are
/// row sums of the adjacency (so a self-loop of weight `w` adds `w`) and the
/// volume is the sum of all degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
    volume: f64,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Build from an edge iterator. Duplicate edges (in either orientation)
    /// have their weights summed.
    pub fn from_edges<I>(num_nodes: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, w) in edges {
            if u >= num_nodes || v >= num_nodes {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) out of range for {num_nodes} nodes"
                )));
            }
            if w.is_nan() || w < 0.0 || !w.is_finite() {
                return Err(Error::invalid(format!("edge ({u}, {v}) has weight {w}")));
            }
            *merged.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); num_nodes];
        for ((u, v), w) in merged {
            if w == 0.0 {
                continue;
            }
            rows[u].push((v, w));
            if u != v {
                rows[v].push((u, w));
            }
        }
        Ok(Self::from_rows(rows))
    }

    /// Unit-weight graph.
    pub fn from_unweighted<I>(num_nodes: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges(num_nodes, edges.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    /// Rows must already be symmetric; they are sorted by column here.
    pub(crate) fn from_rows(mut rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let nnz = rows.iter().map(Vec::len).sum();
        let mut cols = Vec::with_capacity(nnz);
        let mut weights = Vec::with_capacity(nnz);
        let mut degrees = Vec::with_capacity(n);
        offsets.push(0);
        for row in rows.iter_mut() {
            row.sort_by_key(|&(c, _)| c);
            let mut d = 0.0;
            for &(c, w) in row.iter() {
                cols.push(c);
                weights.push(w);
                d += w;
            }
            degrees.push(d);
            offsets.push(cols.len());
        }
        let volume = degrees.iter().sum();
        Graph { offsets, cols, weights, degrees, volume, labels: None }
    }

    pub(crate) fn rows(&self) -> Vec<Vec<(usize, f64)>> {
        (0..self.num_nodes()).map(|v| self.row(v).collect()).collect()
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.num_nodes() {
            return Err(Error::invalid(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.num_nodes()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn num_nodes(&self) -> usize {
        self.degrees.len()
    }

    /// Number of undirected edges, self-loops included.
    pub fn num_edges(&self) -> usize {
        (0..self.num_nodes())
            .map(|v| self.row(v).filter(|&(u, _)| u >= v).count())
            .sum()
    }

    pub fn degree(&self, v: usize) -> f64 {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// `(neighbour, weight)` pairs of `v` in ascending neighbour order,
    /// including a self-loop if present.
    pub fn row(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[v]..self.offsets[v + 1];
        self.cols[r.clone()].iter().copied().zip(self.weights[r].iter().copied())
    }

    pub fn row_slices(&self, v: usize) -> (&[usize], &[f64]) {
        let r = self.offsets[v]..self.offsets[v + 1];
        (&self.cols[r.clone()], &self.weights[r])
    }

    /// Neighbours of `v` other than `v` itself.
    pub fn adjacent(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(v).map(|(u, _)| u).filter(move |&u| u != v)
    }

    pub fn neighbor_count(&self, v: usize) -> usize {
        self.adjacent(v).count()
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        let (cols, ws) = self.row_slices(u);
        cols.binary_search(&v).map(|i| ws[i]).unwrap_or(0.0)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// External id of `v`, or its index when the graph has no labels.
    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        match &self.labels {
            Some(l) => l.iter().position(|x| x == label),
            None => label.parse().ok().filter(|&v: &usize| v < self.num_nodes()),
        }
    }

    pub fn label_index(&self) -> HashMap<String, usize> {
        (0..self.num_nodes()).map(|v| (self.label(v), v)).collect()
    }

    /// Undirected edges `(u, v, w)` with `u <= v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.num_nodes()).flat_map(move |u| {
            self.row(u).filter(move |&(v, _)| v >= u).map(move |(v, w)| (u, v, w))
        })
    }

    pub fn isolated_nodes(&self) -> Vec<usize> {
        (0..self.num_nodes()).filter(|&v| self.degrees[v] == 0.0).collect()
    }

    /// Raw bytes of the adjacency, for byte-identity checks.
    pub fn adjacency_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 * (self.offsets.len() + 2 * self.cols.len()));
        for &o in &self.offsets {
            out.extend_from_slice(&(o as u64).to_le_bytes());
        }
        for &c in &self.cols {
            out.extend_from_slice(&(c as u64).to_le_bytes());
        }
        for &w in &self.weights {
            out.extend_from_slice(&w.to_bits().to_le_bytes());
        }
        out
    }

    pub fn to_dense(&self) -> Result<ndarray::Array2<f64>> {
        power::check_dense("graph", self.num_nodes())?;
        let n = self.num_nodes();
        let mut a = ndarray::Array2::zeros((n, n));
        for u in 0..n {
            for (v, w) in self.row(u) {
                a[[u, v]] = w;
            }
        }
        Ok(a)
    }
}

/// Sample up to `psi` neighbours of `v` (self-loops excluded), uniformly
/// without replacement, in ascending id order. Every neighbour is returned
/// when there are at most `psi` of them.
pub fn neighbors(g: &Graph, v: usize, psi: usize, seed: u64) -> Vec<usize> {
    let all: Vec<usize> = g.adjacent(v).collect();
    if all.len() <= psi {
        return all;
    }
    let mut rng = seed::rng(seed);
    let mut picked: Vec<usize> = index::sample(&mut rng, all.len(), psi)
        .into_iter()
        .map(|i| all[i])
        .collect();
    picked.sort_unstable();
    picked
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph_degrees() {
        let g = Graph::from_unweighted(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.degrees(), &[1.0, 2.0, 1.0]);
        assert_eq!(g.volume(), 4.0);
        assert_eq!(g.num_edges(), 2);
    }

    #[test]
    fn duplicates_merge_and_self_loops_count_once() {
        let g = Graph::from_edges(2, [(0, 1, 1.0), (1, 0, 2.0), (1, 1, 0.5)]).unwrap();
        assert_eq!(g.weight(0, 1), 3.0);
        assert_eq!(g.weight(1, 0), 3.0);
        assert_eq!(g.degree(1), 3.5);
        assert_eq!(g.volume(), 6.5);
    }

    #[test]
    fn negative_weight_rejected() {
        assert!(matches!(
            Graph::from_edges(2, [(0, 1, -1.0)]),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn neighbor_sampling() {
        let tri = Graph::from_unweighted(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(neighbors(&tri, 0, 100, 1), vec![1, 2, 3]);

        let lonely = Graph::from_unweighted(2, []).unwrap();
        assert!(neighbors(&lonely, 0, 100, 1).is_empty());

        let star = star(201).unwrap();
        let a = neighbors(&star, 0, 100, 42);
        assert_eq!(a.len(), 100);
        let mut dedup = a.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), 100);
        assert_eq!(a, neighbors(&star, 0, 100, 42));
        assert_ne!(a, neighbors(&star, 0, 100, 43));
    }

    #[test]
    fn self_loop_is_not_a_neighbor() {
        let g = Graph::from_unweighted(2, [(0, 0), (0, 1)]).unwrap();
        assert_eq!(neighbors(&g, 0, 10, 0), vec![1]);
        assert_eq!(g.neighbor_count(0), 1);
    }
}
