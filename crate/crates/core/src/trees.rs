//! Finite edge-weighted trees under the path metric.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Mode, SemiMetricSpace};

/// A tree on `vertex_count` vertices, edges `(u, v, weight)` with 0-based indices.
///
/// Tree JSON: `{"n":4,"edges":[[0,1,1.0],[1,2,2.0],[1,3,1.0]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedTree {
    #[serde(rename = "n")]
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl WeightedTree {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let tree = WeightedTree { vertex_count, edges };
        tree.validate()?;
        Ok(tree)
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Checks weights, edge count, and connectivity, reporting the first problem.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertex_count;
        if n == 0 {
            return Err(Error::NotATree("no vertices".into()));
        }
        for &(u, v, w) in &self.edges {
            if u >= n || v >= n {
                return Err(Error::NotATree(format!("edge ({u}, {v}) names a missing vertex")));
            }
            if u == v {
                return Err(Error::NotATree(format!("self-loop at {u}")));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::NonpositiveWeight { u, v });
            }
        }
        // Union-find: the first edge joining two already-connected vertices closes a cycle.
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(u, v, _) in &self.edges {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                return Err(Error::NotATree(format!("edge ({u}, {v}) closes a cycle")));
            }
            parent[ru] = rv;
        }
        if self.edges.len() != n - 1 {
            return Err(Error::NotATree(format!(
                "disconnected: {} edges for {n} vertices",
                self.edges.len()
            )));
        }
        Ok(())
    }

    fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(u, v, w) in &self.edges {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        adj
    }
}

/// Path metric of a tree, one traversal per root.
pub fn tree_metric(tree: &WeightedTree) -> Result<SemiMetricSpace> {
    tree.validate()?;
    let n = tree.vertex_count;
    let adj = tree.adjacency();
    let mut d = DMatrix::zeros(n, n);
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for root in 0..n {
        seen.iter_mut().for_each(|s| *s = false);
        seen[root] = true;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            for &(v, w) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    d[(root, v)] = d[(root, u)] + w;
                    queue.push_back(v);
                }
            }
        }
    }
    // Summation order differs between the two traversals; keep the matrix exactly symmetric.
    for i in 0..n {
        for j in (i + 1)..n {
            d[(j, i)] = d[(i, j)];
        }
    }
    SemiMetricSpace::from_matrix(d, Mode::Metric)
}

/// The 1-negative type gap of a tree: `(Σ_e 1/|e|)^{-1}`.
pub fn tree_one_gap(tree: &WeightedTree) -> Result<f64> {
    tree.validate()?;
    if tree.vertex_count < 2 {
        return Err(Error::TooFewPoints { n: tree.vertex_count, min: 2 });
    }
    Ok(1.0 / tree.edges.iter().map(|&(_, _, w)| 1.0 / w).sum::<f64>())
}
