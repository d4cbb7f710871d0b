use super::distribution::{DegreeDistribution, NORMALIZATION_TOLERANCE};
use crate::error::{Error, Result};

/// Parameters of the growth process.
///
/// Each step adds an n-ad with probability `gamma`, otherwise a monad. A
/// monad's free-edge count is drawn from `r1`; each n-ad vertex draws its own
/// free-edge count from `rn`, and `mu` of each vertex's free ends go into the
/// shared bundles.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub gamma: f64,
    pub n: u32,
    pub mu: u32,
    pub r1: DegreeDistribution,
    pub rn: DegreeDistribution,
}

impl ModelParams {
    /// Builds and validates.
    pub fn new(gamma: f64, n: u32, mu: u32, r1: DegreeDistribution, rn: DegreeDistribution) -> Result<Self> {
        ModelParams { gamma, n, mu, r1, rn }.validate()
    }

    /// Returns `self` unchanged if every constraint holds, else the first
    /// violated one.
    pub fn validate(self) -> Result<Self> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::GammaOutOfRange(self.gamma));
        }
        if self.n < 2 {
            return Err(Error::CliqueTooSmall(self.n));
        }
        if self.rn.support_min() < self.mu {
            return Err(Error::BundlesExceedFreeEdges {
                mu: self.mu,
                support_min: self.rn.support_min(),
            });
        }
        for d in [&self.r1, &self.rn] {
            let sum = d.total_mass();
            if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(Error::Unnormalized { sum });
            }
        }
        Ok(self)
    }

    /// Mean free edges of a monad.
    pub fn m1(&self) -> f64 {
        self.r1.mean()
    }

    /// Mean free edges of one n-ad vertex.
    pub fn mn(&self) -> f64 {
        self.rn.mean()
    }

    /// `1 + (n - 1) * gamma`.
    pub fn expected_vertices_per_step(&self) -> f64 {
        1.0 + (self.n as f64 - 1.0) * self.gamma
    }

    /// `gamma * (n * m_n + n(n-1)/2) + (1 - gamma) * m_1`.
    pub fn expected_edges_per_step(&self) -> f64 {
        let n = self.n as f64;
        self.gamma * (n * self.mn() + n * (n - 1.0) / 2.0) + (1.0 - self.gamma) * self.m1()
    }

    /// Mean number of single (unbundled) free ends per step:
    /// `m_1 (1 - gamma) + gamma n m_n - gamma n mu`.
    pub fn single_edge_rate(&self) -> f64 {
        let n = self.n as f64;
        self.m1() * (1.0 - self.gamma) + self.gamma * n * self.mn() - self.gamma * n * self.mu as f64
    }

    /// Mean number of bundles per step, `gamma * mu`.
    pub fn bundle_rate(&self) -> f64 {
        self.gamma * self.mu as f64
    }

    /// `a = m_1 (1 - gamma) + gamma n m_n - gamma (n - 1) mu`: the total rate
    /// at which a layer loses members to attachment, per unit of `P_k`.
    pub fn normalizer(&self) -> f64 {
        self.single_edge_rate() + self.bundle_rate()
    }

    /// Expected number of new vertices per step that arrive with degree `k`:
    /// `r1[k] (1 - gamma) + gamma n rn[k + 1 - n]`.
    pub fn arrival_rate(&self, k: i64) -> f64 {
        self.r1.prob_at(k) * (1.0 - self.gamma) + self.gamma * self.n as f64 * self.rn.prob_at(k + 1 - self.n as i64)
    }

    /// Largest degree a newly created vertex can have.
    pub fn max_arrival_degree(&self) -> u32 {
        let mut hi = 0;
        if self.gamma < 1.0 {
            hi = self.r1.support_max();
        }
        if self.gamma > 0.0 {
            hi = hi.max(self.rn.support_max() + self.n - 1);
        }
        hi
    }
}
