//! Possible forests: the labelled subgraphs the tree process can contain.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::process::TreeState;

/// Directed forest with edges `(tail, head)`, `tail > head`, at most one
/// out-edge per vertex, and no isolated vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PossibleForest {
    // tail -> head
    heads: BTreeMap<usize, usize>,
}

impl PossibleForest {
    pub fn new(edges: &[(usize, usize)]) -> Result<Self> {
        let mut heads = BTreeMap::new();
        for &(tail, head) in edges {
            if head == 0 {
                return Err(Error::InvalidForest("vertex indices are 1-based".into()));
            }
            if tail <= head {
                return Err(Error::InvalidForest(format!(
                    "edge {tail}>{head} must go from a higher to a lower index"
                )));
            }
            if heads.insert(tail, head).is_some() {
                return Err(Error::InvalidForest(format!(
                    "vertex {tail} has more than one out-edge"
                )));
            }
        }
        Ok(Self { heads })
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.heads.iter().map(|(&t, &h)| (t, h))
    }

    pub fn edge_count(&self) -> usize {
        self.heads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heads.is_empty()
    }

    /// Sorted vertex set `s_1 < ... < s_k`.
    pub fn vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.heads.iter().flat_map(|(&t, &h)| [t, h]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Largest vertex index `s_k`, 0 for the empty forest.
    pub fn max_vertex(&self) -> usize {
        self.heads.keys().next_back().copied().unwrap_or(0)
    }

    pub fn head_of(&self, tail: usize) -> Option<usize> {
        self.heads.get(&tail).copied()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.heads.values().filter(|&&h| h == v).count()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        usize::from(self.heads.contains_key(&v))
    }

    /// Vertices with at least one incoming edge.
    pub fn v_minus(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.heads.values().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Vertices with an outgoing edge.
    pub fn v_plus(&self) -> Vec<usize> {
        self.heads.keys().copied().collect()
    }

    /// In-edges of `v_i` whose tails arrive after time `t`.
    pub fn arrivals_after(&self, t: usize, i: usize) -> usize {
        self.heads.iter().filter(|(&j, &h)| h == i && j > t).count()
    }

    /// Edges from `{v_i, v_{i+1}, ...}` to `{v_1, ..., v_{i-1}}`.
    pub fn crossing_count(&self, i: usize) -> usize {
        self.heads.iter().filter(|(&j, &h)| j >= i && h < i).count()
    }

    /// `crossing_count(i)` for every `i` in `0..=max_vertex`.
    pub fn crossing_counts(&self) -> Vec<usize> {
        let top = self.max_vertex();
        let mut diff = vec![0isize; top + 2];
        for (&tail, &head) in &self.heads {
            diff[head + 1] += 1;
            diff[tail + 1] -= 1;
        }
        let mut acc = 0isize;
        diff.iter()
            .take(top + 1)
            .map(|d| {
                acc += d;
                acc as usize
            })
            .collect()
    }

    /// Labelled containment: every edge `(i, j)` is edge `e_i` of the tree.
    pub fn contained_in(&self, tree: &TreeState) -> bool {
        self.max_vertex() <= tree.vertex_count()
            && self.heads.iter().all(|(&t, &h)| tree.head(t) == h)
    }

    /// Every non-empty possible forest on vertices within `1..=max_vertex`.
    pub fn catalog(max_vertex: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut choice = vec![0usize; max_vertex + 1];
        loop {
            let edges: Vec<_> = (2..=max_vertex)
                .filter(|&i| choice[i] > 0)
                .map(|i| (i, choice[i]))
                .collect();
            if !edges.is_empty() {
                out.push(Self::new(&edges).expect("catalog edges are valid"));
            }
            // odometer: vertex i chooses head 0 (none) or 1..i-1
            let mut i = 2;
            loop {
                if i > max_vertex {
                    return out;
                }
                choice[i] += 1;
                if choice[i] < i {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }
}

impl fmt::Display for PossibleForest {
    /// Compact form `3>1,2>1` (tails descending).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .heads
            .iter()
            .rev()
            .map(|(t, h)| format!("{t}>{h}"))
            .collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for PossibleForest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (a, b) = part
                .split_once('>')
                .ok_or_else(|| Error::InvalidForest(format!("expected 'tail>head', got '{part}'")))?;
            let parse = |x: &str| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidForest(format!("bad vertex index in '{part}'")))
            };
            edges.push((parse(a)?, parse(b)?));
        }
        Self::new(&edges)
    }
}

impl Serialize for PossibleForest {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}
