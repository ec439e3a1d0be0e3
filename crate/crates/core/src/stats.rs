//! Triangle, adjacent-pair and clustering statistics on merged multigraphs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::process::MergedMultigraph;

/// Per-vertex neighbour lists with multiplicities, loops held apart.
struct Adjacency {
    offsets: Vec<usize>,
    // (neighbour, multiplicity), sorted by neighbour, loops excluded
    runs: Vec<(u32, u64)>,
    loops: Vec<u64>,
}

impl Adjacency {
    fn build(g: &MergedMultigraph) -> Self {
        let n = g.vertex_count();
        let mut counts = vec![0usize; n + 1];
        let mut loops = vec![0u64; n];
        for (a, b) in g.edges() {
            if a == b {
                loops[a - 1] += 1;
            } else {
                counts[a] += 1;
                counts[b] += 1;
            }
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + counts[v + 1];
        }
        let mut fill = offsets.clone();
        let mut flat = vec![0u32; offsets[n]];
        for (a, b) in g.edges() {
            if a != b {
                flat[fill[a - 1]] = b as u32;
                fill[a - 1] += 1;
                flat[fill[b - 1]] = a as u32;
                fill[b - 1] += 1;
            }
        }
        let mut run_offsets = vec![0usize; n + 1];
        let mut runs = Vec::with_capacity(flat.len());
        for v in 0..n {
            let list = &mut flat[offsets[v]..offsets[v + 1]];
            list.sort_unstable();
            let start = runs.len();
            for &u in list.iter() {
                match runs[start..].last_mut() {
                    Some((w, k)) if *w == u => *k += 1,
                    _ => runs.push((u, 1)),
                }
            }
            run_offsets[v + 1] = runs.len();
        }
        Self {
            offsets: run_offsets,
            runs,
            loops,
        }
    }

    fn neighbours(&self, v: usize) -> &[(u32, u64)] {
        &self.runs[self.offsets[v - 1]..self.offsets[v]]
    }

    fn lower_neighbours(&self, v: usize) -> &[(u32, u64)] {
        let all = self.neighbours(v);
        let cut = all.partition_point(|&(u, _)| (u as usize) < v);
        &all[..cut]
    }

    fn multiplicity(&self, a: usize, b: usize) -> u64 {
        let list = self.neighbours(a);
        match list.binary_search_by_key(&(b as u32), |&(u, _)| u) {
            Ok(pos) => list[pos].1,
            Err(_) => 0,
        }
    }

    /// Triples `a < b < c` are found from `c`: pairs of its lower neighbours
    /// closed by an edge between them.
    fn triangles(&self) -> u128 {
        let n = self.loops.len();
        let mut total = 0u128;
        for c in 1..=n {
            let lower = self.lower_neighbours(c);
            for (x, &(a, mult_ca)) in lower.iter().enumerate() {
                for &(b, mult_cb) in &lower[x + 1..] {
                    let mult_ab = self.multiplicity(b as usize, a as usize);
                    if mult_ab > 0 {
                        total += (mult_ca * mult_cb * mult_ab) as u128;
                    }
                }
            }
        }
        total
    }

    fn degenerate_pairs(&self, degrees: &[u64]) -> u128 {
        let mut total = 0u128;
        for (v0, &d) in degrees.iter().enumerate() {
            let runs = self.neighbours(v0 + 1);
            let s: u128 = runs.iter().map(|&(_, k)| k as u128).sum();
            let sq: u128 = runs.iter().map(|&(_, k)| (k as u128) * (k as u128)).sum();
            let non_degenerate = (s * s - sq) / 2;
            total += choose2(d) - non_degenerate;
        }
        total
    }
}

fn choose2(d: u64) -> u128 {
    let d = d as u128;
    d * d.saturating_sub(1) / 2
}

/// Summary of one graph instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: Option<usize>,
    pub beta: Option<f64>,
    pub seed: Option<u64>,
    pub triangles: u128,
    pub adjacent_pairs: u128,
    pub degenerate_pairs: u128,
    /// `3N / D`, `None` when `D = 0`.
    pub clustering: Option<f64>,
    pub max_degree: u64,
}

impl GraphStats {
    pub fn with_provenance(mut self, beta: f64, seed: u64) -> Self {
        self.beta = Some(beta);
        self.seed = Some(seed);
        self
    }

    pub fn clustering_defined(&self) -> bool {
        self.clustering.is_some()
    }

    pub const CSV_HEADER: &'static str =
        "n,m,beta,seed,triangles,adjacent_pairs,degenerate_pairs,clustering,max_degree";

    pub fn csv_row(&self) -> String {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            opt(self.m),
            opt(self.beta),
            opt(self.seed),
            self.triangles,
            self.adjacent_pairs,
            self.degenerate_pairs,
            opt(self.clustering),
            self.max_degree
        )
    }
}

/// Number of triangles, each counted with the product of its three edge
/// multiplicities. Loops never contribute.
pub fn triangle_count(g: &MergedMultigraph) -> u128 {
    Adjacency::build(g).triangles()
}

/// `D = sum_v C(d(v), 2)`, the number of pairs of half-edges sharing an endpoint.
pub fn adjacent_pair_count(g: &MergedMultigraph) -> u128 {
    g.degrees().iter().map(|&d| choose2(d)).sum()
}

/// Adjacent half-edge pairs that do not lead to two distinct other vertices.
pub fn degenerate_pair_count(g: &MergedMultigraph) -> u128 {
    Adjacency::build(g).degenerate_pairs(g.degrees())
}

pub fn clustering_coefficient(g: &MergedMultigraph) -> Result<f64> {
    let d = adjacent_pair_count(g);
    if d == 0 {
        return Err(Error::UndefinedClustering);
    }
    Ok(3.0 * triangle_count(g) as f64 / d as f64)
}

pub fn compute_stats(g: &MergedMultigraph) -> GraphStats {
    let adj = Adjacency::build(g);
    let triangles = adj.triangles();
    let adjacent_pairs = adjacent_pair_count(g);
    let degenerate_pairs = adj.degenerate_pairs(g.degrees());
    let clustering = (adjacent_pairs > 0).then(|| 3.0 * triangles as f64 / adjacent_pairs as f64);
    GraphStats {
        n: g.vertex_count(),
        m: g.merge_width(),
        beta: None,
        seed: None,
        triangles,
        adjacent_pairs,
        degenerate_pairs,
        clustering,
        max_degree: g.degrees().iter().copied().max().unwrap_or(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{generate, ModelParams};
    use proptest::prelude::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> MergedMultigraph {
        MergedMultigraph::from_edges(n, None, edges).unwrap()
    }

    fn multi_triangle(m: usize) -> MergedMultigraph {
        let mut edges = Vec::new();
        for _ in 0..m {
            edges.extend([(2, 1), (3, 1), (3, 2)]);
        }
        graph(3, &edges)
    }

    // Brute-force references over a dense multiplicity matrix.
    fn matrix(g: &MergedMultigraph) -> Vec<Vec<u64>> {
        let n = g.vertex_count();
        let mut mat = vec![vec![0u64; n + 1]; n + 1];
        for (a, b) in g.edges() {
            if a != b {
                mat[a][b] += 1;
                mat[b][a] += 1;
            }
        }
        mat
    }

    fn brute_triangles(g: &MergedMultigraph) -> u128 {
        let n = g.vertex_count();
        let mat = matrix(g);
        let mut total = 0u128;
        for a in 1..=n {
            for b in a + 1..=n {
                for c in b + 1..=n {
                    total += (mat[a][b] * mat[b][c] * mat[a][c]) as u128;
                }
            }
        }
        total
    }

    // Lists every half-edge as (vertex, other endpoint, edge id) and checks
    // each pair directly.
    fn brute_pairs(g: &MergedMultigraph) -> (u128, u128) {
        let mut half_edges = Vec::new();
        for (id, (a, b)) in g.edges().enumerate() {
            half_edges.push((a, b, id));
            half_edges.push((b, a, id));
        }
        let (mut all, mut degenerate) = (0u128, 0u128);
        for x in 0..half_edges.len() {
            for y in x + 1..half_edges.len() {
                let (v1, u1, _) = half_edges[x];
                let (v2, u2, _) = half_edges[y];
                if v1 != v2 {
                    continue;
                }
                all += 1;
                if u1 == v1 || u2 == v1 || u1 == u2 {
                    degenerate += 1;
                }
            }
        }
        (all, degenerate)
    }

    #[test]
    fn simple_triangle() {
        let g = graph(3, &[(2, 1), (3, 1), (3, 2)]);
        assert_eq!(triangle_count(&g), 1);
        assert_eq!(degenerate_pair_count(&g), 0);
        assert_eq!(clustering_coefficient(&g).unwrap(), 1.0);
    }

    #[test]
    fn multi_triangle_matches_closed_form() {
        for m in 1..=6u64 {
            let g = multi_triangle(m as usize);
            assert_eq!(triangle_count(&g), (m * m * m) as u128);
            let c = clustering_coefficient(&g).unwrap();
            let expected = (m * m) as f64 / (2 * m - 1) as f64;
            assert!((c - expected).abs() < 1e-12);
        }
        let g = multi_triangle(2);
        assert_eq!(adjacent_pair_count(&g), 18);
        assert!((clustering_coefficient(&g).unwrap() - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn trees_have_no_triangles() {
        let g = graph(5, &[(2, 1), (3, 1), (4, 2), (5, 2)]);
        assert_eq!(triangle_count(&g), 0);
        assert_eq!(clustering_coefficient(&g).unwrap(), 0.0);
    }

    #[test]
    fn pair_counts() {
        let loop_graph = graph(1, &[(1, 1)]);
        assert_eq!(adjacent_pair_count(&loop_graph), 1);
        assert_eq!(degenerate_pair_count(&loop_graph), 1);

        let path = graph(3, &[(2, 1), (3, 2)]);
        assert_eq!(adjacent_pair_count(&path), 1);

        let parallel = graph(2, &[(2, 1), (2, 1)]);
        assert_eq!(degenerate_pair_count(&parallel), 2);
    }

    #[test]
    fn undefined_clustering() {
        let g = graph(2, &[(2, 1)]);
        assert_eq!(clustering_coefficient(&g), Err(Error::UndefinedClustering));
        assert_eq!(compute_stats(&g).clustering, None);
        let single = graph(1, &[]);
        assert_eq!(compute_stats(&single).clustering, None);
    }

    #[test]
    fn compute_stats_examples() {
        let g = generate(&ModelParams::new(1, 2, 1.0).unwrap(), 5).unwrap();
        let s = compute_stats(&g);
        assert_eq!(
            (s.triangles, s.adjacent_pairs, s.clustering, s.max_degree),
            (0, 1, Some(0.0), 2)
        );

        let star = graph(3, &[(2, 1), (3, 1)]);
        let s = compute_stats(&star);
        assert_eq!((s.triangles, s.adjacent_pairs, s.degenerate_pairs), (0, 1, 0));
    }

    #[test]
    fn generated_graphs_match_brute_force() {
        for seed in 0..40u64 {
            let m = 1 + (seed % 4) as usize;
            let beta = [0.3, 1.0, 2.5][(seed % 3) as usize];
            let g = generate(&ModelParams::new(30, m, beta).unwrap(), seed).unwrap();
            let s = compute_stats(&g);
            assert_eq!(s.triangles, brute_triangles(&g));
            assert_eq!((s.adjacent_pairs, s.degenerate_pairs), brute_pairs(&g));
            assert!(3 * s.triangles <= m as u128 * s.adjacent_pairs);
        }
    }

    proptest! {
        #[test]
        fn arbitrary_multigraphs_match_brute_force(
            n in 1usize..12,
            raw in proptest::collection::vec((1usize..12, 1usize..12), 0..40),
        ) {
            let edges: Vec<_> = raw.into_iter().map(|(a, b)| (1 + (a - 1) % n, 1 + (b - 1) % n)).collect();
            let g = graph(n, &edges);
            let s = compute_stats(&g);
            prop_assert_eq!(s.triangles, brute_triangles(&g));
            prop_assert_eq!((s.adjacent_pairs, s.degenerate_pairs), brute_pairs(&g));
            prop_assert!(s.degenerate_pairs <= s.adjacent_pairs);
            prop_assert_eq!(triangle_count(&g.without_loops()), s.triangles);
            prop_assert_eq!(compute_stats(&g), s);
        }
    }
}
