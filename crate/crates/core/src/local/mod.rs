//! Forward-backward neighborhoods: ball extraction, canonical signatures,
//! censuses, and the branching-process limit.

mod ball;
mod bp;
mod census;
mod signature;

pub use ball::{extract_ball, RootedBall};
pub use bp::{simulate_limit_census, BranchingProcess, Growth, MAX_TREE_NODES};
pub use census::{census, census_split, tv_distance, Census, CensusEntry, Population, Sample};
pub use signature::{
    canonical_signature, saturated_signature, BallSignature, EXACT_CAP, LEAF_BUDGET,
};
