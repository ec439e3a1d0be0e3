use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::check_beta;
use crate::seed::{rng_from_seed, ProcessRng};

/// One element of the per-step outcome space.
///
/// `Uniform(i)` picks vertex `i` directly; `CopyHead(i)` and `CopyTail(i)`
/// copy the corresponding endpoint of edge `e_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OutcomeKind {
    Uniform(usize),
    CopyHead(usize),
    CopyTail(usize),
}

impl OutcomeKind {
    pub fn index(&self) -> usize {
        match *self {
            OutcomeKind::Uniform(i) | OutcomeKind::CopyHead(i) | OutcomeKind::CopyTail(i) => i,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            OutcomeKind::Uniform(_) => "uniform",
            OutcomeKind::CopyHead(_) => "head",
            OutcomeKind::CopyTail(_) => "tail",
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, OutcomeKind::Uniform(_))
    }
}

/// An outcome together with the step `t + 1` (index of the new vertex) it
/// was drawn for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Outcome {
    pub kind: OutcomeKind,
    pub step: usize,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.step, self.kind.label(), self.kind.index())
    }
}

/// The tree process with one out-edge per vertex.
///
/// Vertices are 1-based. Edge `e_i` (for `i >= 2`) has tail `i`; its head is
/// stored in `heads[i - 2]`. Half-edge `2(i - 2)` is the tail end of `e_i`
/// and half-edge `2(i - 2) + 1` its head end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeState {
    heads: Vec<u32>,
    degrees: Vec<u32>,
}

impl Default for TreeState {
    fn default() -> Self {
        Self::new()
    }
}

impl TreeState {
    /// The single-vertex tree at time 1.
    pub fn new() -> Self {
        Self {
            heads: Vec::new(),
            degrees: vec![0],
        }
    }

    pub fn with_capacity(vertices: usize) -> Self {
        let heads = Vec::with_capacity(vertices.saturating_sub(1));
        let mut degrees = Vec::with_capacity(vertices.max(1));
        degrees.push(0);
        Self { heads, degrees }
    }

    pub fn vertex_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn edge_count(&self) -> usize {
        self.heads.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v - 1] as usize
    }

    pub fn degrees(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.degrees.iter().map(|&d| d as usize)
    }

    /// Head of edge `e_i`, `2 <= i <= vertex_count`.
    pub fn head(&self, i: usize) -> usize {
        self.heads[i - 2] as usize
    }

    /// Edges `(tail, head)` in insertion order `e_2, e_3, ...`.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.heads
            .iter()
            .enumerate()
            .map(|(k, &h)| (k + 2, h as usize))
    }

    pub fn half_edge_count(&self) -> usize {
        2 * self.heads.len()
    }

    /// Vertex the half-edge with id `k` is attached to.
    pub fn half_edge_endpoint(&self, k: usize) -> usize {
        let i = k / 2 + 2;
        if k.is_multiple_of(2) {
            i
        } else {
            self.heads[k / 2] as usize
        }
    }

    pub(crate) fn check_outcome(&self, kind: OutcomeKind) -> Result<()> {
        let t = self.vertex_count();
        let ok = match kind {
            OutcomeKind::Uniform(i) => (1..=t).contains(&i),
            OutcomeKind::CopyHead(i) | OutcomeKind::CopyTail(i) => (2..=t).contains(&i),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidOutcome {
                outcome: format!("{} {}", kind.label(), kind.index()),
                vertices: t,
            })
        }
    }

    /// Target vertex selected by `kind` in the current tree.
    pub fn resolve_target(&self, kind: OutcomeKind) -> Result<usize> {
        self.check_outcome(kind)?;
        Ok(match kind {
            OutcomeKind::Uniform(i) | OutcomeKind::CopyTail(i) => i,
            OutcomeKind::CopyHead(i) => self.head(i),
        })
    }

    /// Draws the outcome for the next step.
    ///
    /// A single uniform draw over total weight `beta * t + 2(t - 1)` selects
    /// either a vertex (weight `beta` each) or a half-edge (weight 1 each).
    pub fn sample_outcome<R: Rng + ?Sized>(&self, beta: f64, rng: &mut R) -> Outcome {
        let t = self.vertex_count();
        let half_edges = self.half_edge_count();
        let uniform_weight = beta * t as f64;
        let x = rng.random::<f64>() * (uniform_weight + half_edges as f64);
        let kind = if x < uniform_weight || half_edges == 0 {
            let i = ((x / beta) as usize).min(t - 1) + 1;
            OutcomeKind::Uniform(i)
        } else {
            let k = ((x - uniform_weight) as usize).min(half_edges - 1);
            let i = k / 2 + 2;
            if k.is_multiple_of(2) {
                OutcomeKind::CopyTail(i)
            } else {
                OutcomeKind::CopyHead(i)
            }
        };
        Outcome { kind, step: t + 1 }
    }

    /// Adds vertex `t + 1` with its edge to the target chosen by `kind`.
    /// Returns the target.
    pub fn step(&mut self, kind: OutcomeKind) -> Result<usize> {
        let target = self.resolve_target(kind)?;
        self.push_edge(target);
        Ok(target)
    }

    pub(crate) fn push_edge(&mut self, target: usize) {
        self.degrees[target - 1] += 1;
        self.degrees.push(1);
        self.heads.push(target as u32);
    }

    /// Removes the most recent vertex and its edge.
    pub fn undo_step(&mut self) {
        if let Some(h) = self.heads.pop() {
            self.degrees.pop();
            self.degrees[h as usize - 1] -= 1;
        }
    }

    /// Applies a recorded outcome sequence to the single-vertex tree.
    pub fn replay(outcomes: &[Outcome]) -> Result<Self> {
        let mut state = Self::with_capacity(outcomes.len() + 1);
        for o in outcomes {
            if o.step != state.vertex_count() + 1 {
                return Err(Error::InvalidOutcome {
                    outcome: o.to_string(),
                    vertices: state.vertex_count(),
                });
            }
            state.step(o.kind)?;
        }
        Ok(state)
    }
}

/// Pure form of [`TreeState::step`].
pub fn step_tree(state: &TreeState, outcome: Outcome) -> Result<TreeState> {
    let mut next = state.clone();
    next.step(outcome.kind)?;
    Ok(next)
}

/// Grows a tree with `vertices` vertices from the single-vertex start.
pub fn sample_tree(vertices: usize, beta: f64, rng: &mut ProcessRng) -> Result<TreeState> {
    check_beta(beta)?;
    if vertices == 0 {
        return Err(Error::Parameter("tree size must be at least 1".into()));
    }
    let mut state = TreeState::with_capacity(vertices);
    while state.vertex_count() < vertices {
        let o = state.sample_outcome(beta, rng);
        let target = state
            .resolve_target(o.kind)
            .expect("sampled outcomes are valid");
        state.push_edge(target);
    }
    Ok(state)
}

/// Grows a tree and records every outcome, so the run can be replayed.
pub fn generate_tree(vertices: usize, beta: f64, seed: u64) -> Result<(TreeState, Vec<Outcome>)> {
    check_beta(beta)?;
    if vertices == 0 {
        return Err(Error::Parameter("tree size must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut state = TreeState::with_capacity(vertices);
    let mut log = Vec::with_capacity(vertices - 1);
    while state.vertex_count() < vertices {
        let o = state.sample_outcome(beta, &mut rng);
        state.step(o.kind)?;
        log.push(o);
    }
    Ok((state, log))
}
