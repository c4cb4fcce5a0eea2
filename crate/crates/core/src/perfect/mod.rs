//! Exact sampling when the small set is the whole space.

mod multigamma;
mod random_map;

pub use multigamma::{corollary1_exact, multigamma_sample, residual_matrix, Corollary1};
pub use random_map::{
    exact_block_law, BlockDraw, BlockEstimate, BlockLaw, Detector, RandomMapModel, ReadOnceStream, ThresholdMap,
    DEFAULT_BLOCK_CAP,
};
