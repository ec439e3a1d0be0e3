//! The tree process, its merged multigraph and block instrumentation.

mod blocks;
mod io;
mod merge;
mod tree;

pub use crate::params::ModelParams;
pub use blocks::{track_blocks, track_blocks_many, BlockPartition, BlockTracker};
pub use io::{
    parse_edge_list, parse_outcome_log, render_edge_list, render_outcome_log, write_edge_list,
    EdgeListHeader, ParsedEdgeList,
};
pub use merge::{generate, merge, MergedMultigraph};
pub use tree::{generate_tree, sample_tree, step_tree, Outcome, OutcomeKind, TreeState};
