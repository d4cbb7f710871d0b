//! Distributions, preference functions and model parameters.

mod distribution;
mod params;
mod preference;

pub(crate) use distribution::compensated_sum;
pub use distribution::{mean_degree_of, DegreeDistribution, NORMALIZATION_TOLERANCE};
pub use params::ModelParams;
pub use preference::{PreferenceFunction, Tail};
