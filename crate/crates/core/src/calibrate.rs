//! Recovering a preference function from a target degree distribution.
//!
//! The stationary recurrence is linear in the preference weights once the
//! target `Q` is fixed, so it can be solved for `f(k)` degree by degree.
//! Preference functions are only defined up to a positive factor; fixing
//! `<f> = a` (the normalizer of [`ModelParams::normalizer`]) gives
//!
//! ```text
//! f(k) = (S_k - (1 + gamma(n-1)) Q_k) / Q_k
//!      + (B f(k-1) Q_{k-1} + gamma mu f(k-n) Q_{k-n}) / (a Q_k)
//! ```

use crate::error::{Error, Result};
use crate::model::{compensated_sum, DegreeDistribution, ModelParams, PreferenceFunction};

/// Weights at or below this fraction of the largest weight count as zero.
pub const ZERO_TOLERANCE: f64 = 1e-9;
/// Rounding allowance, in units of machine epsilon, per degree of carried flux.
///
/// The carried flux `a f(k) Q_k` is a running difference of sums of order the
/// growth rate, so its absolute error grows with the number of degrees
/// summed. Dividing by `a Q_k` turns that into an error in `f(k)` of roughly
/// `eps * growth * (k - k_min + 1) * (1 + 1/a) / Q_k`, which swamps the
/// weights deep in a fast-decaying tail.
pub const ROUNDING_ULPS: f64 = 64.0;
/// Largest accepted relative gap between `sum_k f(k) Q_k` and `a`.
pub const MEAN_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct CalibrationResult {
    /// Raw recurrence output for every degree of the target support.
    pub weights: Vec<(u32, f64)>,
    /// The recovered preference function when feasible.
    pub f: Option<PreferenceFunction>,
    pub a: f64,
    pub feasible: bool,
    pub first_infeasible_k: Option<u32>,
    /// `sum_k f(k) Q_k` for the recovered weights, or for the raw weights
    /// when infeasible.
    pub mean_preference: f64,
}

/// `a = m_1 (1 - gamma) + gamma n m_n - gamma (n - 1) mu`.
pub fn normalizer_a(p: &ModelParams) -> f64 {
    p.normalizer()
}

fn check_target(target: &DegreeDistribution) -> Result<()> {
    (target.support_min()..=target.support_max())
        .find(|&k| target.prob(k) <= 0.0)
        .map_or(Ok(()), |k| Err(Error::ZeroTargetMass(k)))
}

/// Solves for preference weights that make `target` stationary.
///
/// Runs of zero weights are allowed at both ends of the support: at the
/// bottom they are degrees below the first attachable one, at the top the
/// saturated layers that vertices only enter by jumping past the last
/// attachable degree. A negative weight, or a zero weight between positive
/// ones, makes the target infeasible for these parameters, and the first such
/// degree is reported. Weights within the rounding band of their degree (see
/// [`ROUNDING_ULPS`]) count as zero.
///
/// The recurrence assumes `<f> = a` but does not enforce it: summing it over
/// all degrees leaves `sum_k f(k) Q_k` free. A target whose recovered weights
/// miss `a` by more than [`MEAN_TOLERANCE`] (relative) is not stationary for
/// any preference and is reported infeasible with no particular degree.
pub fn calibrate(target: &DegreeDistribution, p: &ModelParams) -> Result<CalibrationResult> {
    let a = normalizer_a(p);
    if !(a > 0.0) {
        return Err(Error::NonPositiveNormalizer(a));
    }
    check_target(target)?;
    let lo = target.support_min();
    let hi = target.support_max();
    let growth = p.expected_vertices_per_step();
    let single = p.single_edge_rate();
    let bundle = p.bundle_rate();
    let n = p.n as i64;

    let mut raw: Vec<f64> = Vec::with_capacity((hi - lo) as usize + 1);
    let carried = |raw: &[f64], j: i64| -> f64 {
        if j < lo as i64 || j > hi as i64 {
            0.0
        } else {
            raw[(j - lo as i64) as usize] * target.prob(j as u32)
        }
    };
    for k in lo..=hi {
        let ki = k as i64;
        let q = target.prob(k);
        let fk = (p.arrival_rate(ki) - growth * q) / q
            + (single * carried(&raw, ki - 1) + bundle * carried(&raw, ki - n)) / (a * q);
        raw.push(fk);
    }
    let weights: Vec<(u32, f64)> = (lo..=hi).zip(raw.iter().copied()).collect();

    // Arrivals outside the target support cannot be matched by any preference.
    let stray_arrival = (0..=p.max_arrival_degree()).find(|&k| (k < lo || k > hi) && p.arrival_rate(k as i64) > 0.0);

    let noise = |k: u32| {
        ROUNDING_ULPS * f64::EPSILON * growth.max(1.0) * (1.0 + 1.0 / a) * f64::from(k - lo + 1) / target.prob(k)
    };
    let scale = weights
        .iter()
        .filter(|&&(k, w)| w > noise(k))
        .fold(0.0, |m: f64, &(_, w)| m.max(w));
    let floor = ZERO_TOLERANCE * scale;
    // Weights inside their rounding band are indeterminate: they neither
    // start nor end the attachable range, but inside it they must be positive.
    let band = |k: u32| floor.max(noise(k));
    let mut first_bad = weights.iter().find(|&&(k, w)| w < -band(k)).map(|&(k, _)| k);
    let first_positive = weights.iter().find(|&&(k, w)| w > band(k)).map(|&(k, _)| k);
    let last_positive = weights.iter().rev().find(|&&(k, w)| w > band(k)).map(|&(k, _)| k);
    match (first_positive, last_positive) {
        (Some(bottom), Some(top)) => {
            let gap = weights.iter().find(|&&(k, w)| k > bottom && k < top && w <= floor);
            if let Some(&(k, _)) = gap {
                first_bad = Some(first_bad.map_or(k, |b| b.min(k)));
            }
        }
        _ => first_bad = first_bad.or(Some(lo)),
    }
    if let Some(k) = stray_arrival {
        first_bad = Some(first_bad.map_or(k, |b| b.min(k)));
    }

    let mut result = CalibrationResult {
        f: None,
        a,
        feasible: false,
        first_infeasible_k: first_bad,
        mean_preference: compensated_sum(weights.iter().map(|&(k, w)| w * target.prob(k))),
        weights,
    };
    if first_bad.is_none() {
        let (bottom, top) = (
            first_positive.expect("checked above"),
            last_positive.expect("checked above"),
        );
        let table: Vec<f64> = raw[(bottom - lo) as usize..=(top - lo) as usize].to_vec();
        let f = PreferenceFunction::tabulated(bottom, table)?;
        result.mean_preference = compensated_sum(target.iter().map(|(k, q)| f.weight(k) * q));
        if (result.mean_preference - a).abs() <= MEAN_TOLERANCE * a {
            result.f = Some(f);
            result.feasible = true;
        }
    }
    Ok(result)
}

/// The same recurrence with an explicit mean preference in place of `a`:
///
/// ```text
/// f(k) = (r1[k](1-gamma) + gamma n rn[k+1-n] - (1 + gamma(n-1)) Q_k) / Q_k
///      + ((m1(1-gamma) + gamma n mn - gamma n mu) f(k-1) Q_{k-1}
///         + gamma mu f(k-n) Q_{k-n}) / (<f> Q_k)
/// ```
///
/// With `<f> = a` it must agree with [`calibrate`]; kept as an independent
/// transcription to cross-check it. No feasibility analysis is done.
pub fn preference_with_mean(target: &DegreeDistribution, p: &ModelParams, mean_f: f64) -> Result<Vec<(u32, f64)>> {
    if !(mean_f.is_finite() && mean_f > 0.0) {
        return Err(Error::InvalidMeanPreference(mean_f));
    }
    check_target(target)?;
    let gamma = p.gamma;
    let n = p.n as f64;
    let mu = p.mu as f64;
    let m1 = p.r1.mean();
    let mn = p.rn.mean();
    let lo = target.support_min() as i64;
    let hi = target.support_max() as i64;
    let mut out: Vec<(u32, f64)> = Vec::new();
    let f_times_q = |out: &[(u32, f64)], j: i64| -> f64 {
        if j < lo || j > hi {
            0.0
        } else {
            out[(j - lo) as usize].1 * target.prob_at(j)
        }
    };
    for k in lo..=hi {
        let q = target.prob_at(k);
        let sources = p.r1.prob_at(k) * (1.0 - gamma) + gamma * n * p.rn.prob_at(k + 1 - p.n as i64);
        let first = (sources - (1.0 + gamma * (n - 1.0)) * q) / q;
        let second = ((m1 * (1.0 - gamma) + gamma * n * mn - gamma * n * mu) * f_times_q(&out, k - 1)
            + gamma * mu * f_times_q(&out, k - p.n as i64))
            / (mean_f * q);
        out.push((k as u32, first + second));
    }
    Ok(out)
}
