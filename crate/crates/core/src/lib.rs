//! Growing random graphs under nonlinear preferential attachment with
//! community (clique) increments.
//!
//! The crate has three cooperating halves:
//!
//! * [`growth`] grows a multigraph step by step. Each step adds either a
//!   *monad* (one vertex with a random number of free edges) or, with
//!   probability `gamma`, an *n-ad*: a complete graph on `n` new vertices
//!   whose free edges attach to the existing graph, `mu` of them per vertex
//!   bundled onto a shared target.
//! * [`stationary`] computes the stationary vertex degree distribution of
//!   that process from the layer-balance recurrence, solving the implicit
//!   mean-preference fixed point.
//! * [`calibrate`] inverts the recurrence: given a target degree
//!   distribution it recovers a preference function that realizes it.
//!
//! [`analysis`] compares distributions and counts triangles, and [`io`]
//! reads and writes the plain-text formats used by the command line tool.

// `!(x > 0.0)` also rejects NaN, which is the point.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod calibrate;
pub mod error;
pub mod growth;
pub mod io;
pub mod model;
pub mod stationary;

pub use error::{Error, Result};
pub use model::{mean_degree_of, DegreeDistribution, ModelParams, PreferenceFunction, Tail};
