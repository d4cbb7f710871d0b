//! Graph growth by monad and n-ad increments.
//!
//! Randomness comes from [`ChaCha8Rng`](rand_chacha::ChaCha8Rng) seeded with
//! `seed_from_u64`, so a seed reproduces the same edge list on every
//! platform. One run uses one stream; independent replications use the seeds
//! `seed, seed + 1, ...`.

mod engine;
mod graph;
mod layers;

pub use engine::{empirical_vdd, grow, rng_from_seed, GrowthProcess, GrowthRng, GrowthStats, Interrupted};
pub use graph::MultiGraph;
pub use layers::{LayerIndex, SelectionStrategy, TargetSampler, TREE_THRESHOLD};
