use std::path::Path;

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

/// A partition of nodes into `k` non-empty clusters.
///
/// `centroids` is `k x dim` when the assignment came from clustering points
/// (k-means on an embedding) and `k x 0` when it was given directly.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAssignment {
    assignment: Vec<usize>,
    k: usize,
    centroids: Array2<f64>,
}

impl ClusterAssignment {
    pub fn from_labels(assignment: Vec<usize>, k: usize) -> Result<Self> {
        validate(&assignment, k)?;
        Ok(Self { assignment, k, centroids: Array2::zeros((k, 0)) })
    }

    /// Assignment of the rows of `points`, with centroids set to cluster means.
    pub fn from_points(points: ArrayView2<'_, f64>, assignment: Vec<usize>, k: usize) -> Result<Self> {
        if points.nrows() != assignment.len() {
            return Err(Error::invalid(format!(
                "{} points for {} assignments",
                points.nrows(),
                assignment.len()
            )));
        }
        validate(&assignment, k)?;
        let centroids = centroids_of(points, &assignment, k);
        Ok(Self { assignment, k, centroids })
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cluster_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn centroids(&self) -> &Array2<f64> {
        &self.centroids
    }

    pub fn members(&self, c: usize) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.assignment[v] == c).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &c in &self.assignment {
            s[c] += 1;
        }
        s
    }

    /// Sum of squared distances from each point to its cluster centroid.
    pub fn inertia(&self, points: ArrayView2<'_, f64>) -> f64 {
        let c = centroids_of(points, &self.assignment, self.k);
        points
            .outer_iter()
            .zip(&self.assignment)
            .map(|(p, &a)| p.iter().zip(c.row(a)).map(|(x, y)| (x - y) * (x - y)).sum::<f64>())
            .sum()
    }

    /// Write `node,cluster` rows; `labels` replaces node indices when given.
    pub fn write_csv(&self, path: impl AsRef<Path>, labels: Option<&[String]>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["node", "cluster"])?;
        for (v, &c) in self.assignment.iter().enumerate() {
            let node = labels.map(|l| l[v].clone()).unwrap_or_else(|| v.to_string());
            w.write_record([node, c.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    /// Read `node,cluster` rows in file order. `k` is one more than the largest id.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut r = csv::Reader::from_path(path.as_ref())?;
        let mut assignment = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let c: usize = rec
                .get(1)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::invalid(format!("bad cluster row {rec:?}")))?;
            assignment.push(c);
        }
        let k = assignment.iter().max().map_or(0, |m| m + 1);
        Self::from_labels(assignment, k)
    }
}

fn validate(assignment: &[usize], k: usize) -> Result<()> {
    let mut seen = vec![false; k];
    for (v, &c) in assignment.iter().enumerate() {
        if c >= k {
            return Err(Error::invalid(format!("node {v} assigned to cluster {c} >= k = {k}")));
        }
        seen[c] = true;
    }
    if let Some(empty) = seen.iter().position(|s| !s) {
        return Err(Error::invalid(format!("cluster {empty} is empty")));
    }
    Ok(())
}

pub(crate) fn centroids_of(points: ArrayView2<'_, f64>, assignment: &[usize], k: usize) -> Array2<f64> {
    let d = points.ncols();
    let mut c = Array2::<f64>::zeros((k, d));
    let mut counts = vec![0usize; k];
    for (p, &a) in points.outer_iter().zip(assignment) {
        counts[a] += 1;
        let mut row = c.row_mut(a);
        row += &p;
    }
    for (a, &n) in counts.iter().enumerate() {
        if n > 0 {
            c.row_mut(a).mapv_inplace(|x| x / n as f64);
        }
    }
    c
}
