//! Block-partition instrumentation of the half-edges at a merged vertex.
//!
//! From the anchor time on, each half-edge already at the owner is its own
//! block and block 0 (the base block) starts empty. A new half-edge at the
//! owner joins the block of the half-edge it copied, or the base block when
//! the owner was chosen uniformly.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::seed::{rng_from_seed, ProcessRng};

use super::tree::{OutcomeKind, TreeState};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockPartition {
    pub owner_vertex: usize,
    pub anchor_time: usize,
    /// Half-edge ids per block; `blocks[0]` is the base block.
    pub blocks: Vec<Vec<usize>>,
}

impl BlockPartition {
    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn total(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }
}

/// Follows the partitions of several owners through one run of the tree.
#[derive(Debug, Clone)]
pub struct BlockTracker {
    m: usize,
    partitions: Vec<BlockPartition>,
    // half-edge id -> (partition slot, block index)
    membership: HashMap<usize, (usize, usize)>,
}

impl BlockTracker {
    /// Starts tracking `owners` in the current tree, whose size is the anchor.
    pub fn new(tree: &TreeState, m: usize, owners: &[usize]) -> Result<Self> {
        let anchor = tree.vertex_count();
        let mut partitions = Vec::with_capacity(owners.len());
        for (slot, &owner) in owners.iter().enumerate() {
            if owner == 0 || owner * m > anchor {
                return Err(Error::Instrumentation(format!(
                    "owner {owner} is not fully merged by time {anchor} (m = {m})"
                )));
            }
            if owners[..slot].contains(&owner) {
                return Err(Error::Instrumentation(format!("owner {owner} listed twice")));
            }
            partitions.push(BlockPartition {
                owner_vertex: owner,
                anchor_time: anchor,
                blocks: vec![Vec::new()],
            });
        }
        let group = |v: usize| (v - 1) / m + 1;
        let mut membership = HashMap::new();
        for k in 0..tree.half_edge_count() {
            let owner = group(tree.half_edge_endpoint(k));
            if let Some(slot) = owners.iter().position(|&o| o == owner) {
                let p = &mut partitions[slot];
                membership.insert(k, (slot, p.blocks.len()));
                p.blocks.push(vec![k]);
            }
        }
        Ok(Self {
            m,
            partitions,
            membership,
        })
    }

    /// Applies one step of the process, updating the partitions.
    pub fn step(&mut self, tree: &mut TreeState, kind: OutcomeKind) -> Result<usize> {
        let t = tree.vertex_count();
        let target = tree.step(kind)?;
        let owner = (target - 1) / self.m + 1;
        let Some(slot) = self.partitions.iter().position(|p| p.owner_vertex == owner) else {
            return Ok(target);
        };
        // head half-edge of the new edge e_{t+1}
        let new_half_edge = 2 * (t - 1) + 1;
        let block = match kind {
            OutcomeKind::Uniform(_) => 0,
            OutcomeKind::CopyTail(i) => self.membership[&(2 * (i - 2))].1,
            OutcomeKind::CopyHead(i) => self.membership[&(2 * (i - 2) + 1)].1,
        };
        self.partitions[slot].blocks[block].push(new_half_edge);
        self.membership.insert(new_half_edge, (slot, block));
        Ok(target)
    }

    pub fn partitions(&self) -> &[BlockPartition] {
        &self.partitions
    }

    pub fn into_partitions(self) -> Vec<BlockPartition> {
        self.partitions
    }
}

/// Runs the process from `seed` and tracks several owners from `anchor` to
/// `horizon` (both in tree steps, i.e. tree vertex counts).
pub fn track_blocks_many(
    params: &ModelParams,
    seed: u64,
    owners: &[usize],
    anchor: usize,
    horizon: usize,
) -> Result<Vec<BlockPartition>> {
    params.validate()?;
    if anchor > horizon || horizon > params.tree_size() {
        return Err(Error::Instrumentation(format!(
            "need anchor <= horizon <= n*m, got anchor {anchor}, horizon {horizon}, n*m {}",
            params.tree_size()
        )));
    }
    let mut rng = rng_from_seed(seed);
    track_with_rng(params, &mut rng, owners, anchor, horizon)
}

fn track_with_rng(
    params: &ModelParams,
    rng: &mut ProcessRng,
    owners: &[usize],
    anchor: usize,
    horizon: usize,
) -> Result<Vec<BlockPartition>> {
    let mut tree = TreeState::with_capacity(horizon);
    while tree.vertex_count() < anchor {
        let o = tree.sample_outcome(params.beta, rng);
        tree.step(o.kind)?;
    }
    let mut tracker = BlockTracker::new(&tree, params.m, owners)?;
    while tree.vertex_count() < horizon {
        let o = tree.sample_outcome(params.beta, rng);
        tracker.step(&mut tree, o.kind)?;
    }
    Ok(tracker.into_partitions())
}

/// Partition of `owner`'s half-edges at `horizon`, anchored at `anchor`.
pub fn track_blocks(
    params: &ModelParams,
    seed: u64,
    owner: usize,
    anchor: usize,
    horizon: usize,
) -> Result<BlockPartition> {
    let mut parts = track_blocks_many(params, seed, &[owner], anchor, horizon)?;
    Ok(parts.remove(0))
}
