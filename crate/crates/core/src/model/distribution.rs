use crate::error::{Error, Result};

/// Accepted deviation of a distribution's total mass from 1.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// A probability mass function over non-negative integer degrees.
///
/// Stored densely between the smallest and largest degree carrying mass;
/// degrees inside that window may have zero probability.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeDistribution {
    min: u32,
    probs: Vec<f64>,
}

impl DegreeDistribution {
    /// Builds a distribution from `(degree, probability)` pairs in any order.
    ///
    /// Fails on negative or non-finite probabilities, repeated degrees, or a
    /// total that differs from 1 by more than [`NORMALIZATION_TOLERANCE`].
    pub fn new(pairs: impl IntoIterator<Item = (u32, f64)>) -> Result<Self> {
        let d = Self::from_pairs(pairs)?;
        let sum = d.total_mass();
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::Unnormalized { sum });
        }
        Ok(d)
    }

    /// Like [`new`](Self::new) but rescales the total to 1 when it is off by
    /// at most `tolerance`. Totals already within [`NORMALIZATION_TOLERANCE`]
    /// are stored exactly as given.
    pub fn new_renormalized(pairs: impl IntoIterator<Item = (u32, f64)>, tolerance: f64) -> Result<Self> {
        let mut d = Self::from_pairs(pairs)?;
        let sum = d.total_mass();
        let off = (sum - 1.0).abs();
        if off > tolerance {
            return Err(Error::Unnormalized { sum });
        }
        if off > NORMALIZATION_TOLERANCE {
            d.probs.iter_mut().for_each(|p| *p /= sum);
        }
        Ok(d)
    }

    /// All mass on a single degree.
    pub fn point(k: u32) -> Self {
        DegreeDistribution {
            min: k,
            probs: vec![1.0],
        }
    }

    /// Exact frequencies from a degree histogram (`counts[k]` vertices of degree `k`).
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyDistribution);
        }
        let total = total as f64;
        Self::from_pairs(
            counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(k, &c)| (k as u32, c as f64 / total)),
        )
    }

    /// A possibly sub-normalized table indexed from degree 0, as produced by a
    /// truncated stationary solution. Entries must be non-negative.
    pub(crate) fn from_dense_table(table: &[f64]) -> Result<Self> {
        Self::from_pairs(table.iter().enumerate().map(|(k, &p)| (k as u32, p)))
    }

    fn from_pairs(pairs: impl IntoIterator<Item = (u32, f64)>) -> Result<Self> {
        let mut entries: Vec<(u32, f64)> = Vec::new();
        for (k, p) in pairs {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidProbability { k, value: p });
            }
            entries.push((k, p));
        }
        entries.sort_by_key(|&(k, _)| k);
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateDegree(w[0].0));
        }
        entries.retain(|&(_, p)| p > 0.0);
        let (min, max) = match (entries.first(), entries.last()) {
            (Some(&(lo, _)), Some(&(hi, _))) => (lo, hi),
            _ => return Err(Error::EmptyDistribution),
        };
        let mut probs = vec![0.0; (max - min) as usize + 1];
        for (k, p) in entries {
            probs[(k - min) as usize] = p;
        }
        Ok(DegreeDistribution { min, probs })
    }

    pub fn support_min(&self) -> u32 {
        self.min
    }

    pub fn support_max(&self) -> u32 {
        self.min + self.probs.len() as u32 - 1
    }

    /// Probability of degree `k`; zero outside the support.
    pub fn prob(&self, k: u32) -> f64 {
        k.checked_sub(self.min)
            .and_then(|i| self.probs.get(i as usize))
            .copied()
            .unwrap_or(0.0)
    }

    /// Same as [`prob`](Self::prob) for a signed index, so recurrences can
    /// look below degree 0 without special-casing.
    pub fn prob_at(&self, k: i64) -> f64 {
        if k < 0 || k > u32::MAX as i64 {
            0.0
        } else {
            self.prob(k as u32)
        }
    }

    /// `(degree, probability)` pairs with positive probability, ascending.
    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(move |(i, &p)| (self.min + i as u32, p))
    }

    pub fn total_mass(&self) -> f64 {
        compensated_sum(self.probs.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        mean_degree_of(self)
    }

    /// Cumulative probability of degrees `<= k`.
    pub fn cdf(&self, k: u32) -> f64 {
        if k < self.min {
            return 0.0;
        }
        let end = ((k - self.min) as usize + 1).min(self.probs.len());
        self.probs[..end].iter().sum()
    }

    /// The mixture `alpha * self + (1 - alpha) * other`.
    pub fn mixture(&self, other: &DegreeDistribution, alpha: f64) -> Result<Self> {
        let lo = self.min.min(other.min);
        let hi = self.support_max().max(other.support_max());
        Self::new((lo..=hi).map(|k| (k, alpha * self.prob(k) + (1.0 - alpha) * other.prob(k))))
    }
}

/// Mean degree `sum_k k * d[k]`.
pub fn mean_degree_of(d: &DegreeDistribution) -> f64 {
    compensated_sum(d.iter().map(|(k, p)| k as f64 * p))
}

/// Neumaier-compensated sum; long probability tables lose digits otherwise.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}
