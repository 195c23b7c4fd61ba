//! One-dimensional constructions: almost periodic density partitions,
//! bounded transfer functions and smooth minorants of ball systems.
//!
//! Functions live on a uniform node grid; intervals and balls are snapped
//! to nodes so that cell means and the transfer function at breakpoints
//! are exact finite sums.

mod minorant;
mod partition;

pub use minorant::{
    bump, measure_bump_constants, smooth_minorant, BumpConstants, DerivativeCheck, MinorantOptions, MinorantReport,
    SmoothMinorant, BUMP,
};
pub use partition::{
    build_partition, random_density, transfer_function, AlmostPeriodicPartition, BallSystem, SampledFunction,
    TransferFunction,
};
