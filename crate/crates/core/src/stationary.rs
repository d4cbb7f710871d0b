//! Stationary vertex degree distribution.
//!
//! In the long-run limit the fraction `Q_k` of vertices with degree `k`
//! satisfies a layer balance: per step the layer gains arriving vertices and
//! vertices pushed up from below, and loses members that receive edges. With
//! `P_k = f(k) Q_k / <f>` and `<f> = sum_l f(l) Q_l` this gives, for each `k`,
//!
//! ```text
//! Q_k = ( S_k <f> + B f(k-1) Q_{k-1} + gamma mu f(k-n) Q_{k-n} )
//!       / ( <f> (1 + gamma (n-1)) + a f(k) )
//! ```
//!
//! where `S_k = r1[k] (1-gamma) + gamma n rn[k+1-n]` is the arrival rate,
//! `B` the single-edge rate and `a = B + gamma mu` (see [`ModelParams`]).
//! The recurrence is explicit once `<f>` is known; [`solve_stationary`] finds
//! the `<f>` that reproduces itself.

use crate::error::{Error, Result};
use crate::model::{compensated_sum, DegreeDistribution, ModelParams, PreferenceFunction, Tail};

/// Largest table the solver builds when no `k_max` is given.
pub const K_MAX_CAP: u32 = 1_000_000;
/// Tail mass below which the default table stops.
pub const TAIL_TARGET: f64 = 1e-12;
/// A fixed point `<f>` below this fraction of the largest tabulated weight is
/// the drained state, not a stationary one.
pub const COLLAPSE_FRACTION: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Relative tolerance on `|sum_k f(k) Q_k - <f>| / <f>`.
    pub tol: f64,
    /// Last degree of the returned table. `None` picks the smallest degree
    /// whose tail mass is below [`TAIL_TARGET`], capped at [`K_MAX_CAP`].
    pub k_max: Option<u32>,
    /// Damping `beta` of the iteration `x <- (1 - beta) x + beta F(x)`.
    pub damping: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-12,
            k_max: None,
            damping: 0.5,
            max_iterations: 500,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixedPointMethod {
    DampedIteration,
    Bisection,
}

#[derive(Clone, Debug)]
pub struct StationarySolution {
    /// `Q_k` for `k <= k_max`; sums to `1 - tail_mass_bound`.
    pub q: DegreeDistribution,
    /// Converged `<f>` in the caller's preference scale.
    pub mean_f: f64,
    /// Largest absolute violation of the layer balance over the table.
    pub balance_residual: f64,
    /// Exact stationary mass above `k_max`.
    pub tail_mass_bound: f64,
    pub iterations: usize,
    pub method: FixedPointMethod,
}

impl StationarySolution {
    pub fn k_max(&self) -> u32 {
        self.q.support_max()
    }
}

/// Constants of the recurrence for one parameter set.
struct Recurrence<'a> {
    p: &'a ModelParams,
    f: &'a PreferenceFunction,
    n: i64,
    growth: f64,
    single: f64,
    bundle: f64,
    drain: f64,
}

/// Preference mass and probability mass of a table plus its exact tail.
struct Totals {
    pref: f64,
    mass: f64,
}

impl<'a> Recurrence<'a> {
    fn new(p: &'a ModelParams, f: &'a PreferenceFunction) -> Self {
        Recurrence {
            p,
            f,
            n: p.n as i64,
            growth: p.expected_vertices_per_step(),
            single: p.single_edge_rate(),
            bundle: p.bundle_rate(),
            drain: p.normalizer(),
        }
    }

    fn next(&self, q: &[f64], k: i64, x: f64) -> f64 {
        let below = |j: i64| {
            if j < 0 {
                0.0
            } else {
                self.f.weight_at(j) * q[j as usize]
            }
        };
        let num = self.p.arrival_rate(k) * x + self.single * below(k - 1) + self.bundle * below(k - self.n);
        let den = x + x * self.p.gamma * (self.n - 1) as f64 + self.f.weight_at(k) * self.drain;
        num / den
    }

    fn extend(&self, q: &mut Vec<f64>, k_end: u32, x: f64) -> Result<()> {
        for k in q.len() as i64..=k_end as i64 {
            let v = self.next(q, k, x);
            if !(v >= 0.0) {
                return Err(Error::NegativeMass { k: k as u32, value: v });
            }
            q.push(v);
        }
        Ok(())
    }

    /// First degree `K` at which the closed tail sums are exact: no arrivals
    /// above `K` and the preference follows its tail rule above `K`.
    fn tail_start(&self) -> u32 {
        self.p
            .max_arrival_degree()
            .max(self.f.table_end().saturating_sub(1))
            .max(self.f.min_degree())
    }

    /// Smallest `<f>` for which the first moment of the tail is finite.
    fn domain_floor(&self) -> f64 {
        match self.f.tail() {
            Tail::Affine { slope, .. } if slope > 0.0 => {
                slope * (self.single + self.bundle * self.n as f64) / self.growth
            }
            _ => 0.0,
        }
    }

    /// Mass and preference mass strictly above `K = q.len() - 1`.
    ///
    /// Summing the balance over `k > K` telescopes: the mass above `K` is the
    /// flux leaving the top `n` layers, and for an affine tail
    /// `f(k) = c0 + c1 k` the first moment closes in the same way, leaving a
    /// linear equation for the tail's preference mass.
    fn tail(&self, q: &[f64], x: f64) -> (f64, f64) {
        let top = q.len() as i64 - 1;
        let flux = |j: i64| {
            if j < 0 {
                0.0
            } else {
                self.f.weight_at(j) * q[j as usize] / x
            }
        };
        let window = (top - self.n + 1).max(0)..=top;
        let w1 = self.single * flux(top) + self.bundle * window.clone().map(flux).sum::<f64>();
        let w2 = self.single * (top + 1) as f64 * flux(top)
            + self.bundle * window.map(|j| (j + self.n) as f64 * flux(j)).sum::<f64>();
        let tail_mass = w1 / self.growth;
        let tail_pref = match self.f.tail() {
            Tail::Zero => 0.0,
            Tail::Affine { intercept, slope } => {
                let reach = self.single + self.bundle * self.n as f64;
                let denom = 1.0 - slope * reach / (self.growth * x);
                if denom <= 0.0 {
                    f64::INFINITY
                } else {
                    (intercept * w1 + slope * w2) / (self.growth * denom)
                }
            }
        };
        (tail_mass, tail_pref)
    }

    fn totals(&self, x: f64, k_end: u32) -> Result<Totals> {
        let mut q = Vec::with_capacity(k_end as usize + 1);
        self.extend(&mut q, k_end, x)?;
        let (tail_mass, tail_pref) = self.tail(&q, x);
        let pref = compensated_sum(q.iter().enumerate().map(|(k, v)| self.f.weight(k as u32) * v)) + tail_pref;
        let mass = compensated_sum(q.iter().copied()) + tail_mass;
        Ok(Totals { pref, mass })
    }
}

fn check_mean(mean_f: f64) -> Result<()> {
    if mean_f.is_finite() && mean_f > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidMeanPreference(mean_f))
    }
}

/// Evaluates the recurrence for `k = 0..=k_max` at a given `<f>`.
///
/// Returns the unnormalized table indexed by degree. Degrees below the
/// preference window are included: vertices that arrive there never gain
/// edges, and the recurrence handles them with `f = 0`.
pub fn q_from_recurrence(p: &ModelParams, f: &PreferenceFunction, mean_f: f64, k_max: u32) -> Result<Vec<f64>> {
    check_mean(mean_f)?;
    let required = p.max_arrival_degree();
    if k_max < required {
        return Err(Error::KMaxTooSmall { k_max, required });
    }
    let rec = Recurrence::new(p, f);
    let mut q = Vec::with_capacity(k_max as usize + 1);
    rec.extend(&mut q, k_max, mean_f)?;
    Ok(q)
}

/// The monad-only special case
/// `Q_k = (r_k <f> + m f(k-1) Q_{k-1}) / (<f> + m f(k))`.
pub fn q_gamma0(r1: &DegreeDistribution, f: &PreferenceFunction, mean_f: f64, k_max: u32) -> Result<Vec<f64>> {
    check_mean(mean_f)?;
    let m = r1.mean();
    let mut q: Vec<f64> = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        let prev = if k == 0 {
            0.0
        } else {
            f.weight(k - 1) * q[k as usize - 1]
        };
        let v = (r1.prob(k) * mean_f + m * prev) / (mean_f + m * f.weight(k));
        if !(v >= 0.0) {
            return Err(Error::NegativeMass { k, value: v });
        }
        q.push(v);
    }
    Ok(q)
}

/// The dyad-only special case (`gamma = 1`, `n = 2`):
///
/// ```text
/// Q_k = (2 r_{k-1} <f> + (2 m - 2 mu) f(k-1) Q_{k-1} + mu f(k-2) Q_{k-2})
///       / (2 <f> + 2 f(k) m - f(k) mu)
/// ```
pub fn q_dyad(rn: &DegreeDistribution, f: &PreferenceFunction, mu: u32, mean_f: f64, k_max: u32) -> Result<Vec<f64>> {
    check_mean(mean_f)?;
    let m = rn.mean();
    let mu = mu as f64;
    let mut q: Vec<f64> = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max as usize {
        let lag = |d: usize| {
            if k < d {
                0.0
            } else {
                f.weight((k - d) as u32) * q[k - d]
            }
        };
        let arrivals = if k == 0 { 0.0 } else { rn.prob(k as u32 - 1) };
        let fk = f.weight(k as u32);
        let v = (2.0 * arrivals * mean_f + (2.0 * m - 2.0 * mu) * lag(1) + mu * lag(2))
            / (2.0 * mean_f + 2.0 * fk * m - fk * mu);
        if !(v >= 0.0) {
            return Err(Error::NegativeMass { k: k as u32, value: v });
        }
        q.push(v);
    }
    Ok(q)
}

/// Largest absolute violation, over the support of `q`, of the per-step
/// layer balance
/// `(1 + gamma(n-1)) Q_k = S_k + B (P_{k-1} - P_k) + gamma mu (P_{k-n} - P_k)`.
pub fn balance_residual(p: &ModelParams, f: &PreferenceFunction, q: &DegreeDistribution, mean_f: f64) -> f64 {
    let n = p.n as i64;
    let growth = p.expected_vertices_per_step();
    let single = p.single_edge_rate();
    let bundle = p.bundle_rate();
    let layer = |k: i64| {
        if k < 0 {
            0.0
        } else {
            f.weight_at(k) * q.prob_at(k) / mean_f
        }
    };
    (0..=q.support_max() as i64)
        .map(|k| {
            let inflow = p.arrival_rate(k) + single * (layer(k - 1) - layer(k)) + bundle * (layer(k - n) - layer(k));
            (growth * q.prob_at(k) - inflow).abs()
        })
        .fold(0.0, f64::max)
}

/// Solves for the stationary distribution and its mean preference.
///
/// The fixed point `x = sum_k f(k) Q_k(x) / sum_k Q_k(x)` is found by damped
/// iteration started at the normalizer `a` (or at twice the smallest
/// admissible `x` when `a` lies outside the admissible range), falling back
/// to bisection when the iteration does not settle. Sums include the exact
/// contribution of degrees above the table, so an unbounded affine
/// preference is handled without truncation error.
pub fn solve_stationary(p: &ModelParams, f: &PreferenceFunction, opts: &SolverOptions) -> Result<StationarySolution> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidMeanPreference(opts.tol));
    }
    let required = p.max_arrival_degree();
    if let Some(k_max) = opts.k_max {
        if k_max < required {
            return Err(Error::KMaxTooSmall { k_max, required });
        }
    }
    let scale = f.weight(f.min_degree());
    let unit = f.scaled(1.0 / scale)?;
    let rec = Recurrence::new(p, &unit);
    let k_solve = rec.tail_start();
    let floor = rec.domain_floor();

    let residual = |x: f64| -> Result<f64> {
        let t = rec.totals(x, k_solve)?;
        Ok(t.pref - x * t.mass)
    };

    let mut x = rec.drain;
    if !(x > floor * (1.0 + 1e-9)) {
        x = if floor > 0.0 { 2.0 * floor } else { 1.0 };
    }
    let mut iterations = 0;
    let mut method = FixedPointMethod::DampedIteration;
    let mut converged = false;
    let mut last;
    while iterations < opts.max_iterations {
        iterations += 1;
        let t = rec.totals(x, k_solve)?;
        last = t.pref - x * t.mass;
        if last.abs() < opts.tol * x {
            converged = true;
            break;
        }
        let next = (1.0 - opts.damping) * x + opts.damping * t.pref / t.mass;
        if !next.is_finite() || next <= floor {
            break;
        }
        x = next;
    }

    if !converged {
        method = FixedPointMethod::Bisection;
        let (root, extra, res) = bisect(&residual, floor, x, opts.tol)?;
        iterations += extra;
        x = root;
        last = res;
        if last.abs() >= opts.tol * x {
            return Err(Error::NonConvergence {
                iterations,
                residual: last,
            });
        }
    }

    let peak = match unit.tail() {
        // A growing tail keeps x above a positive domain floor.
        Tail::Affine { intercept, slope } => {
            if slope == 0.0 {
                intercept
            } else {
                0.0
            }
        }
        Tail::Zero => 0.0,
    };
    let peak = unit.table().iter().copied().fold(peak, f64::max);
    if x < COLLAPSE_FRACTION * peak {
        return Err(Error::NoFixedPoint);
    }

    let mut table = Vec::new();
    let (k_end, tail_mass) = match opts.k_max {
        Some(k_max) => {
            let k_full = k_max.max(k_solve);
            rec.extend(&mut table, k_full, x)?;
            let (tail_mass, _) = rec.tail(&table, x);
            let cut = compensated_sum(table[k_max as usize + 1..].iter().copied());
            (k_max, tail_mass + cut)
        }
        None => match unit.tail() {
            Tail::Zero => {
                let k_end = k_solve.max(unit.table_end() - 1 + p.n);
                rec.extend(&mut table, k_end, x)?;
                (k_end, rec.tail(&table, x).0)
            }
            Tail::Affine { .. } => {
                rec.extend(&mut table, k_solve, x)?;
                let mut k_end = k_solve;
                let mut tail_mass = rec.tail(&table, x).0;
                while tail_mass >= TAIL_TARGET && k_end < K_MAX_CAP {
                    k_end += 1;
                    rec.extend(&mut table, k_end, x)?;
                    tail_mass = rec.tail(&table, x).0;
                }
                (k_end, tail_mass)
            }
        },
    };
    table.truncate(k_end as usize + 1);
    let q = DegreeDistribution::from_dense_table(&table)?;
    let mean_f = x * scale;
    let balance = balance_residual(p, f, &q, mean_f);
    let mass = q.total_mass();
    if (mass + tail_mass - 1.0).abs() > opts.tol.max(1e-9) {
        return Err(Error::NonConvergence {
            iterations,
            residual: mass + tail_mass - 1.0,
        });
    }
    Ok(StationarySolution {
        q,
        mean_f,
        balance_residual: balance,
        tail_mass_bound: tail_mass,
        iterations,
        method,
    })
}

/// Brackets a sign change of `h` above `floor` around `start` and bisects it.
fn bisect(h: &dyn Fn(f64) -> Result<f64>, floor: f64, start: f64, tol: f64) -> Result<(f64, usize, f64)> {
    let mut evals = 0;
    let mut eval = |x: f64| -> Result<f64> {
        evals += 1;
        let v = h(x)?;
        Ok(if v.is_nan() { f64::INFINITY } else { v })
    };
    let mut hi = start.max(floor * 2.0).max(1e-6);
    let mut h_hi = eval(hi)?;
    while h_hi >= 0.0 {
        hi *= 2.0;
        if hi > 1e15 {
            return Err(Error::NonConvergence {
                iterations: evals,
                residual: h_hi,
            });
        }
        h_hi = eval(hi)?;
    }
    let mut lo = hi;
    let mut h_lo = h_hi;
    while h_lo < 0.0 {
        lo /= 2.0;
        if lo <= floor * (1.0 + 1e-12) || lo < 1e-15 {
            if floor == 0.0 {
                return Err(Error::NoFixedPoint);
            }
            lo = floor * (1.0 + 1e-12);
            h_lo = eval(lo)?;
            if h_lo < 0.0 {
                return Err(Error::NoFixedPoint);
            }
            break;
        }
        h_lo = eval(lo)?;
        if h_lo < 0.0 {
            hi = lo;
        }
    }
    let mut best = (hi, h_hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let h_mid = eval(mid)?;
        if h_mid.abs() < best.1.abs() {
            best = (mid, h_mid);
        }
        if h_mid.abs() < tol * 1e-3 * mid {
            break;
        }
        if h_mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((best.0, evals, best.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DegreeDistribution as D;

    fn ba(m: u32) -> ModelParams {
        ModelParams::new(0.0, 2, 0, D::point(m), D::point(0)).unwrap()
    }

    /// Closed form of the linear-preference monad law,
    /// `Q_k = 2m(m+1) / (k(k+1)(k+2))` for `k >= m`.
    fn ba_law(m: u32, k: u32) -> f64 {
        if k < m {
            return 0.0;
        }
        let (m, k) = (m as f64, k as f64);
        2.0 * m * (m + 1.0) / (k * (k + 1.0) * (k + 2.0))
    }

    #[test]
    fn linear_monad_law() {
        for m in [1, 2, 3] {
            let sol = solve_stationary(
                &ba(m),
                &PreferenceFunction::linear(1).unwrap(),
                &SolverOptions::default(),
            )
            .unwrap();
            assert!((sol.mean_f - 2.0 * m as f64).abs() < 1e-10, "m={m}: {}", sol.mean_f);
            assert!((sol.q.prob(m) - 2.0 / (m as f64 + 2.0)).abs() < 1e-12);
            for k in m..=500 {
                let exact = ba_law(m, k);
                assert!(((sol.q.prob(k) - exact) / exact).abs() < 1e-10, "m={m} k={k}");
            }
            assert!(sol.balance_residual < 1e-14);
            assert!(sol.tail_mass_bound > 0.0 && sol.tail_mass_bound < 1e-10);
            let defect = sol.q.total_mass() + sol.tail_mass_bound - 1.0;
            assert!(defect.abs() < 1e-12, "m={m}: {defect:e}");
        }
    }

    #[test]
    fn constant_preference_halves_each_layer() {
        // With f = 1 and one edge per monad: Q_1 = 1/2 and Q_k = Q_{k-1} / 2.
        let p = ba(1);
        let f = PreferenceFunction::constant(1, 1.0).unwrap();
        let sol = solve_stationary(&p, &f, &SolverOptions::default()).unwrap();
        assert!((sol.mean_f - 1.0).abs() < 1e-12);
        for k in 1..=30 {
            assert!((sol.q.prob(k) - 0.5f64.powi(k as i32)).abs() < 1e-15);
        }
        assert!(sol.tail_mass_bound < TAIL_TARGET);
    }

    #[test]
    fn printed_monad_formula_first_layer() {
        let q = q_gamma0(&D::point(1), &PreferenceFunction::constant(1, 1.0).unwrap(), 1.0, 3).unwrap();
        assert_eq!(q[0], 0.0);
        assert_eq!(q[1], 0.5);
    }

    #[test]
    fn three_layer_unrolling() {
        // gamma = 1/2, n = 2, mu = 1, f = 1 on k >= 1, r1 = rn = {1: 1}, <f> = 1.
        // B = 1/2, a = 1, growth = 3/2. Worked by hand:
        //   Q_1 = (1/2) / (5/2)                 = 1/5
        //   Q_2 = (1 + (1/2)(1/5)) / (5/2)      = 11/25
        //   Q_3 = ((1/2)(11/25) + (1/2)(1/5)) / (5/2) = 16/125
        let p = ModelParams::new(0.5, 2, 1, D::point(1), D::point(1)).unwrap();
        let f = PreferenceFunction::constant(1, 1.0).unwrap();
        let q = q_from_recurrence(&p, &f, 1.0, 3).unwrap();
        let expected = [0.0, 1.0 / 5.0, 11.0 / 25.0, 16.0 / 125.0];
        for (got, want) in q.iter().zip(expected) {
            assert!((got - want).abs() < 1e-15, "{q:?}");
        }
    }

    #[test]
    fn dyad_formula_matches_general_recurrence() {
        let f = PreferenceFunction::constant(1, 1.0).unwrap();
        for mu in [0, 1] {
            let p = ModelParams::new(1.0, 2, mu, D::point(1), D::point(1)).unwrap();
            let general = q_from_recurrence(&p, &f, 1.7, 40).unwrap();
            let dyad = q_dyad(&p.rn, &f, mu, 1.7, 40).unwrap();
            for (a, b) in general.iter().zip(&dyad) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn isolated_vertices_keep_their_mass() {
        let p = ModelParams::new(0.0, 2, 0, D::new([(0, 0.25), (2, 0.75)]).unwrap(), D::point(0)).unwrap();
        let sol = solve_stationary(&p, &PreferenceFunction::linear(1).unwrap(), &SolverOptions::default()).unwrap();
        assert!((sol.q.prob(0) - 0.25).abs() < 1e-15);
        // Mean degree is twice the edge rate: 2 * 1.5.
        let mean_degree: f64 = sol.q.iter().map(|(k, v)| k as f64 * v).sum();
        assert!((mean_degree - 3.0).abs() < 1e-4);
        assert!((sol.mean_f - 3.0).abs() < 1e-9);
    }

    #[test]
    fn finite_window_has_finite_support() {
        let p = ModelParams::new(
            0.3,
            3,
            1,
            D::new([(1, 0.5), (2, 0.5)]).unwrap(),
            D::new([(1, 0.6), (2, 0.4)]).unwrap(),
        )
        .unwrap();
        let f = PreferenceFunction::from_fn(1, 40, |k| k as f64).unwrap();
        let sol = solve_stationary(&p, &f, &SolverOptions::default()).unwrap();
        assert_eq!(sol.k_max(), 43);
        assert_eq!(sol.tail_mass_bound, 0.0);
        assert!((sol.q.total_mass() - 1.0).abs() < 1e-12);
        let mean_pref: f64 = sol.q.iter().map(|(k, v)| f.weight(k) * v).sum();
        assert!((mean_pref - sol.mean_f).abs() < 1e-10);
        assert!(sol.balance_residual < 1e-14);
    }

    #[test]
    fn scaling_preference_scales_only_the_mean() {
        let p = ModelParams::new(
            0.2,
            3,
            1,
            D::new([(1, 0.5), (3, 0.5)]).unwrap(),
            D::new([(1, 0.6), (2, 0.4)]).unwrap(),
        )
        .unwrap();
        let f = PreferenceFunction::from_fn(1, 80, |k| (k as f64).powf(0.8)).unwrap();
        let base = solve_stationary(&p, &f, &SolverOptions::default()).unwrap();
        for c in [0.25, 3.0, 1e4] {
            let scaled = solve_stationary(&p, &f.scaled(c).unwrap(), &SolverOptions::default()).unwrap();
            assert!((scaled.mean_f / base.mean_f - c).abs() < 1e-12 * c);
            for k in 0..=base.k_max() {
                assert!((scaled.q.prob(k) - base.q.prob(k)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn explicit_k_max_reports_cut_mass() {
        let sol = solve_stationary(
            &ba(2),
            &PreferenceFunction::linear(1).unwrap(),
            &SolverOptions {
                k_max: Some(100),
                ..SolverOptions::default()
            },
        )
        .unwrap();
        assert_eq!(sol.k_max(), 100);
        let exact_tail: f64 = 1.0 - (2..=100).map(|k| ba_law(2, k)).sum::<f64>();
        assert!((sol.tail_mass_bound - exact_tail).abs() < 1e-12);
        let err = solve_stationary(
            &ba(2),
            &PreferenceFunction::linear(1).unwrap(),
            &SolverOptions {
                k_max: Some(1),
                ..SolverOptions::default()
            },
        );
        assert!(matches!(err, Err(Error::KMaxTooSmall { .. })));
    }

    #[test]
    fn bisection_fallback_reaches_the_same_root() {
        let p = ModelParams::new(
            0.1,
            4,
            1,
            D::new([(1, 0.3), (2, 0.7)]).unwrap(),
            D::new([(1, 0.5), (2, 0.5)]).unwrap(),
        )
        .unwrap();
        let f = PreferenceFunction::linear(1).unwrap();
        let iterated = solve_stationary(&p, &f, &SolverOptions::default()).unwrap();
        assert_eq!(iterated.method, FixedPointMethod::DampedIteration);
        let bisected = solve_stationary(
            &p,
            &f,
            &SolverOptions {
                max_iterations: 1,
                ..SolverOptions::default()
            },
        )
        .unwrap();
        assert_eq!(bisected.method, FixedPointMethod::Bisection);
        assert!((iterated.mean_f - bisected.mean_f).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_positive_mean() {
        assert!(q_from_recurrence(&ba(2), &PreferenceFunction::linear(1).unwrap(), 0.0, 10).is_err());
        assert!(q_gamma0(&D::point(2), &PreferenceFunction::linear(1).unwrap(), -1.0, 10).is_err());
    }

    #[test]
    fn draining_attachable_layers_have_no_fixed_point() {
        // Most vertices arrive above the last attachable degree and each step
        // spends several edges on the few that do not.
        let r1 = D::new([(1, 0.05), (2, 0.05), (3, 0.1), (4, 0.8)]).unwrap();
        let p = ModelParams::new(0.0, 2, 0, r1, D::point(0)).unwrap();
        let f = PreferenceFunction::tabulated(0, vec![0.2, 0.2, 0.2]).unwrap();
        let r = solve_stationary(&p, &f, &SolverOptions::default());
        assert!(matches!(r, Err(Error::NoFixedPoint)), "{:?}", r.map(|s| s.mean_f));
    }

    #[test]
    fn exactly_balanced_drain_is_not_stationary() {
        // Four vertices arrive at degree 4 per step and four edges leave to
        // attach there; the attachable layer empties in the limit.
        let p = ModelParams::new(1.0, 4, 0, D::point(0), D::point(1)).unwrap();
        let f = PreferenceFunction::tabulated(1, vec![0.2, 0.2, 0.2, 3.87]).unwrap();
        let r = solve_stationary(&p, &f, &SolverOptions::default());
        assert!(matches!(r, Err(Error::NoFixedPoint)), "{:?}", r.map(|s| s.mean_f));
    }
}
