use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::seed::rng_from_seed;

use super::tree::{sample_tree, TreeState};

/// Multigraph on vertices `1..=n` with oriented edges `(tail, head)`,
/// `tail >= head`; `tail == head` is a loop and adds 2 to the degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergedMultigraph {
    n: usize,
    m: Option<usize>,
    edges: Vec<(u32, u32)>,
    degrees: Vec<u64>,
}

impl MergedMultigraph {
    /// Builds a graph from an arbitrary edge list on `1..=n`.
    ///
    /// Edges are stored with the larger endpoint as tail. `m` is the merge
    /// width when known.
    pub fn from_edges(n: usize, m: Option<usize>, edges: &[(usize, usize)]) -> Result<Self> {
        let mut degrees = vec![0u64; n];
        let mut stored = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == 0 || b == 0 || a > n || b > n {
                return Err(Error::Parameter(format!(
                    "edge ({a}, {b}) out of range for {n} vertices"
                )));
            }
            degrees[a - 1] += 1;
            degrees[b - 1] += 1;
            stored.push((a.max(b) as u32, a.min(b) as u32));
        }
        Ok(Self {
            n,
            m,
            edges: stored,
            degrees,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn merge_width(&self) -> Option<usize> {
        self.m
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges `(tail, head)` in insertion order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(|&(a, b)| (a as usize, b as usize))
    }

    pub fn degree(&self, v: usize) -> u64 {
        self.degrees[v - 1]
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|(a, b)| a == b).count()
    }

    /// Copy of the graph with every loop removed.
    pub fn without_loops(&self) -> Self {
        let kept: Vec<_> = self.edges().filter(|(a, b)| a != b).collect();
        Self::from_edges(self.n, self.m, &kept).expect("edges already validated")
    }
}

/// Merges consecutive groups of `m` tree vertices: tree vertex `a` becomes
/// vertex `ceil(a / m)`.
pub fn merge(tree: &TreeState, m: usize) -> Result<MergedMultigraph> {
    let vertices = tree.vertex_count();
    if m == 0 || !vertices.is_multiple_of(m) {
        return Err(Error::MergeArity { m, vertices });
    }
    let n = vertices / m;
    let group = |v: usize| ((v - 1) / m + 1) as u32;
    let mut degrees = vec![0u64; n];
    let mut edges = Vec::with_capacity(tree.edge_count());
    for (tail, head) in tree.edges() {
        let (a, b) = (group(tail), group(head));
        degrees[a as usize - 1] += 1;
        degrees[b as usize - 1] += 1;
        edges.push((a, b));
    }
    Ok(MergedMultigraph {
        n,
        m: Some(m),
        edges,
        degrees,
    })
}

/// Samples the merged graph: grow `n * m` tree vertices from `seed`, then
/// merge with width `m`.
pub fn generate(params: &ModelParams, seed: u64) -> Result<MergedMultigraph> {
    params.validate()?;
    let mut rng = rng_from_seed(seed);
    let tree = sample_tree(params.tree_size(), params.beta, &mut rng)?;
    merge(&tree, params.m)
}
