//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any failed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use cliquegraph::analysis::{compare, triangle_count};
use cliquegraph::calibrate::calibrate;
use cliquegraph::growth::{empirical_vdd, grow, LayerIndex, MultiGraph, SelectionStrategy};
use cliquegraph::io::write_edge_list;
use cliquegraph::stationary::{q_dyad, q_from_recurrence, q_gamma0, solve_stationary, SolverOptions};
use cliquegraph::{DegreeDistribution as D, ModelParams, PreferenceFunction};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn pentad_params() -> ModelParams {
    // Increment table of the pentad experiment; entries round to the
    // printed values and reproduce the printed mean 3.254552.
    let rn = D::new([
        (1, 0.390908),
        (2, 0.04),
        (3, 0.08),
        (4, 0.12),
        (5, 0.16),
        (6, 0.2),
        (7, 0.009092),
    ])
    .unwrap();
    let r1 = D::new([(1, 0.049737), (2, 0.950263)]).unwrap();
    ModelParams::new(0.01, 5, 1, r1, rn).unwrap()
}

fn triad_params() -> ModelParams {
    let r1 = D::new([(1, 0.5), (2, 0.3), (3, 0.2)]).unwrap();
    let rn = D::new([(1, 0.6), (2, 0.4)]).unwrap();
    ModelParams::new(0.25, 3, 1, r1, rn).unwrap()
}

fn ba_oracle() -> Check {
    let m = 2.0;
    let p = ok(ModelParams::new(0.0, 2, 0, D::point(2), D::point(0)))?;
    let f = ok(PreferenceFunction::linear(1))?;
    let sol = ok(solve_stationary(&p, &f, &SolverOptions::default()))?;
    let mut worst: f64 = 0.0;
    for k in 2..=500u32 {
        let kf = k as f64;
        let exact = 2.0 * m * (m + 1.0) / (kf * (kf + 1.0) * (kf + 2.0));
        worst = worst.max((sol.q.prob(k) / exact - 1.0).abs());
    }
    ensure(worst < 1e-8, || format!("max relative error {worst:e}"))?;
    let gap = (sol.mean_f - 2.0 * m).abs();
    ensure(gap <= 1e-8, || format!("<f> = {} off by {gap:e}", sol.mean_f))?;
    Ok(format!("max rel err {worst:.1e}, <f> = {}", sol.mean_f))
}

fn random_dist(rng: &mut ChaCha8Rng, lo: u32, len: u32) -> D {
    let w: Vec<f64> = (0..len).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    D::new_renormalized(w.iter().enumerate().map(|(i, &x)| (lo + i as u32, x / s)), 1e-6).unwrap()
}

fn random_pref(rng: &mut ChaCha8Rng) -> PreferenceFunction {
    let g = rng.gen_range(0..3);
    let len = rng.gen_range(1..40);
    let table: Vec<f64> = (0..len).map(|_| rng.gen_range(0.1..10.0)).collect();
    if rng.gen_bool(0.5) {
        PreferenceFunction::tabulated(g, table).unwrap()
    } else {
        let slope = rng.gen_range(0.0..2.0);
        let tail = cliquegraph::Tail::Affine { intercept: 1.0, slope };
        PreferenceFunction::with_tail(g, table, tail).unwrap()
    }
}

fn special_cases() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let draws = 100;
    for i in 0..draws {
        let f = random_pref(&mut rng);
        let mean_f = rng.gen_range(0.2..20.0);
        let k_max = rng.gen_range(20..150);
        let (general, special) = if i % 2 == 0 {
            let (lo, len) = (rng.gen_range(0..4), rng.gen_range(1..6));
            let r1 = random_dist(&mut rng, lo, len);
            let p = ok(ModelParams::new(0.0, 2, 0, r1.clone(), D::point(0)))?;
            (
                ok(q_from_recurrence(&p, &f, mean_f, k_max))?,
                ok(q_gamma0(&r1, &f, mean_f, k_max))?,
            )
        } else {
            let mu = rng.gen_range(0..3);
            let (lo, len) = (mu + rng.gen_range(0..3), rng.gen_range(1..6));
            let rn = random_dist(&mut rng, lo, len);
            let p = ok(ModelParams::new(1.0, 2, mu, D::point(1), rn.clone()))?;
            (
                ok(q_from_recurrence(&p, &f, mean_f, k_max))?,
                ok(q_dyad(&rn, &f, mu, mean_f, k_max))?,
            )
        };
        ensure(general.len() == special.len(), || format!("draw {i}: length mismatch"))?;
        for (a, b) in general.iter().zip(&special) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("max elementwise gap {worst:e}"))?;
    Ok(format!("{draws} draws, max gap {worst:.1e}"))
}

fn theory_vs_simulation() -> Check {
    let p = pentad_params();
    let f = ok(PreferenceFunction::linear(1))?;
    let q = ok(solve_stationary(&p, &f, &SolverOptions::default()))?.q;
    let seed_graph = ok(MultiGraph::complete(4))?;
    let mut tvs = Vec::new();
    for seed in 0..10 {
        let mut g = seed_graph.clone();
        ok(grow(&mut g, &p, &f, 50_000, seed))?;
        tvs.push(compare(&ok(empirical_vdd(&g))?, &q).tv_distance);
    }
    let mean = tvs.iter().sum::<f64>() / tvs.len() as f64;
    ensure(mean < 0.02, || format!("mean TV {mean:.4}"))?;
    let max = tvs.iter().copied().fold(0.0, f64::max);
    Ok(format!("mean TV {mean:.4} (max {max:.4}) over 10 seeds"))
}

fn calibration_round_trip() -> Check {
    let p = pentad_params();
    let f = ok(PreferenceFunction::from_fn(1, 300, |k| k as f64))?;
    let q = ok(solve_stationary(&p, &f, &SolverOptions::default()))?.q;
    let res = ok(calibrate(&q, &p))?;
    let g = res
        .f
        .ok_or_else(|| format!("infeasible at {:?}", res.first_infeasible_k))?;
    ensure(g.max_degree() == Some(300), || {
        format!("recovered support ends at {:?}", g.max_degree())
    })?;
    let ratio = g.weight(1) / f.weight(1);
    let mut worst: f64 = 0.0;
    for k in 1..=300 {
        worst = worst.max((g.weight(k) / (ratio * f.weight(k)) - 1.0).abs());
    }
    ensure(worst < 1e-6, || format!("proportionality error {worst:e}"))?;
    let gap = (res.mean_preference - res.a).abs();
    ensure(gap < 1e-8, || format!("sum f Q - a = {gap:e}"))?;

    let mut graph = ok(MultiGraph::complete(4))?;
    ok(grow(&mut graph, &p, &g, 100_000, 7))?;
    let tv = compare(&ok(empirical_vdd(&graph))?, &q).tv_distance;
    ensure(tv < 0.03, || format!("grown TV {tv:.4}"))?;
    Ok(format!(
        "proportional to {worst:.1e}, |sum fQ - a| = {gap:.1e}, grown TV {tv:.4}"
    ))
}

fn random_graph(rng: &mut ChaCha8Rng) -> MultiGraph {
    let n = rng.gen_range(5..=200u32);
    let edges = rng.gen_range(0..3 * n);
    let pairs: Vec<(u32, u32)> = (0..edges)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
        .filter(|(u, v)| u != v)
        .collect();
    MultiGraph::from_edges(n, pairs).unwrap()
}

fn sampler_exactness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let draws = 100_000;
    let mut min_p: f64 = 1.0;
    let mut graphs = 0;
    while graphs < 50 {
        let g = random_graph(&mut rng);
        let max_deg = g.max_degree();
        let m = rng.gen_range(1..=max_deg.max(1) + 1);
        let table: Vec<f64> = (0..=m).map(|_| rng.gen_range(0.1..5.0)).collect();
        let f = ok(PreferenceFunction::tabulated(rng.gen_range(0..2), table))?;
        let weights: Vec<f64> = g.degrees().iter().map(|&d| f.weight(d)).collect();
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            continue;
        }
        let strategy = if graphs % 2 == 0 {
            SelectionStrategy::Linear
        } else {
            SelectionStrategy::Tree
        };
        let index = LayerIndex::build_with(&g, f, strategy);
        let mut counts = vec![0u64; g.vertex_count()];
        for _ in 0..draws {
            counts[ok(index.sample_target(&mut rng))? as usize] += 1;
        }
        // Vertices with zero weight must never be drawn; small cells are pooled.
        let (mut stat, mut cells) = (0.0, 0usize);
        let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
        for (v, &w) in weights.iter().enumerate() {
            let observed = counts[v] as f64;
            if w == 0.0 {
                ensure(counts[v] == 0, || format!("zero-weight vertex {v} drawn"))?;
                continue;
            }
            let expected = draws as f64 * w / total;
            if expected < 5.0 {
                pooled_obs += observed;
                pooled_exp += expected;
            } else {
                stat += (observed - expected).powi(2) / expected;
                cells += 1;
            }
        }
        if pooled_exp > 0.0 {
            stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
            cells += 1;
        }
        if cells >= 2 {
            let pval = ChiSquared::new((cells - 1) as f64).unwrap().sf(stat);
            ensure(pval > 0.001, || format!("graph {graphs}: chi-square p = {pval:e}"))?;
            min_p = min_p.min(pval);
        }
        graphs += 1;
    }
    Ok(format!("50 graphs, smallest p = {min_p:.4}"))
}

#[allow(clippy::needless_range_loop)]
fn brute_triangles(g: &MultiGraph) -> u64 {
    let n = g.vertex_count();
    let mut a = vec![vec![false; n]; n];
    for &(u, v) in g.edges() {
        a[u as usize][v as usize] = true;
        a[v as usize][u as usize] = true;
    }
    let mut t = 0;
    for i in 0..n {
        for j in i + 1..n {
            if !a[i][j] {
                continue;
            }
            for k in j + 1..n {
                if a[i][k] && a[j][k] {
                    t += 1;
                }
            }
        }
    }
    t
}

fn structural_floor() -> Check {
    let r1 = D::point(1);
    let rn = D::new([(0, 0.3), (1, 0.4), (2, 0.3)]).unwrap();
    let p = ok(ModelParams::new(1.0, 5, 0, r1, rn))?;
    let f = ok(PreferenceFunction::linear(1))?;
    let mut runs = 0;
    for steps in [1u64, 2, 5, 10, 100, 1000, 5000] {
        for seed in 0..5 {
            let mut g = ok(MultiGraph::complete(4))?;
            let stats = ok(grow(&mut g, &p, &f, steps, seed))?;
            let t = triangle_count(&g);
            ensure(stats.nad_steps == steps, || "gamma = 1 run took a monad step".into())?;
            ensure(t >= 10 * steps, || format!("{steps} steps, seed {seed}: {t} triangles"))?;
            if g.vertex_count() <= 60 {
                ensure(t == brute_triangles(&g), || format!("oracle mismatch on {steps} steps"))?;
            }
            runs += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut oracle_graphs = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=60u32);
        let edges = rng.gen_range(0..4 * n);
        let pairs: Vec<(u32, u32)> = (0..edges)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
            .filter(|(u, v)| u != v)
            .collect();
        let g = ok(MultiGraph::from_edges(n, pairs))?;
        ensure(triangle_count(&g) == brute_triangles(&g), || {
            format!("oracle mismatch on random graph {oracle_graphs}")
        })?;
        oracle_graphs += 1;
    }
    let tri = triad_params();
    let lin = ok(PreferenceFunction::linear(1))?;
    for seed in 0..50 {
        let mut g = ok(MultiGraph::complete(3))?;
        ok(grow(&mut g, &tri, &lin, 20, seed))?;
        if g.vertex_count() <= 60 {
            ensure(triangle_count(&g) == brute_triangles(&g), || {
                format!("oracle mismatch on grown graph {seed}")
            })?;
            oracle_graphs += 1;
        }
    }
    Ok(format!(
        "{runs} pentad runs above the floor, {oracle_graphs} graphs match the oracle"
    ))
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn rate_bookkeeping() -> Check {
    let p = triad_params();
    let f = ok(PreferenceFunction::linear(1))?;
    let steps = 10_000u64;
    let (mut vs, mut es) = (Vec::new(), Vec::new());
    for seed in 0..30 {
        let mut g = ok(MultiGraph::complete(4))?;
        let stats = ok(grow(&mut g, &p, &f, steps, 1000 + seed))?;
        vs.push(stats.realized_vertices as f64 / steps as f64);
        es.push(stats.realized_edges as f64 / steps as f64);
    }
    let (vm, vse) = mean_and_se(&vs);
    let (em, ese) = mean_and_se(&es);
    let ev = p.expected_vertices_per_step();
    let ee = p.expected_edges_per_step();
    ensure((ev - 1.5).abs() < 1e-15, || format!("expected vertices/step {ev}"))?;
    ensure((vm - ev).abs() <= 3.0 * vse, || {
        format!("vertices/step {vm} vs {ev} (se {vse:e})")
    })?;
    ensure((em - ee).abs() <= 3.0 * ese, || {
        format!("edges/step {em} vs {ee} (se {ese:e})")
    })?;
    Ok(format!(
        "vertices/step {vm:.4} vs {ev} ({:.1} se), edges/step {em:.4} vs {ee} ({:.1} se)",
        (vm - ev).abs() / vse,
        (em - ee).abs() / ese
    ))
}

fn determinism() -> Check {
    let p = triad_params();
    let f = ok(PreferenceFunction::linear(1))?;
    let render = |seed: u64| -> Result<Vec<u8>, String> {
        let mut g = ok(MultiGraph::complete(4))?;
        ok(grow(&mut g, &p, &f, 20_000, seed))?;
        let mut buf = Vec::new();
        ok(write_edge_list(&mut buf, &g, &[format!("rng_seed = {seed}")]))?;
        Ok(buf)
    };
    let a = render(11)?;
    let b = render(11)?;
    ensure(a == b, || "repeated runs differ".into())?;
    ensure(render(12)? != a, || "different seeds gave identical output".into())?;
    Ok(format!("{} identical bytes", a.len()))
}

type Criterion = (u32, &'static str, fn() -> Check, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (1, "BA oracle", ba_oracle, Duration::from_secs(1)),
        (2, "special-case reductions", special_cases, Duration::from_secs(5)),
        (
            3,
            "theory-simulation agreement",
            theory_vs_simulation,
            Duration::from_secs(60),
        ),
        (
            4,
            "calibration round trip",
            calibration_round_trip,
            Duration::from_secs(90),
        ),
        (5, "sampler exactness", sampler_exactness, Duration::from_secs(30)),
        (6, "structural floor", structural_floor, Duration::MAX),
        (7, "rate bookkeeping", rate_bookkeeping, Duration::MAX),
        (8, "determinism", determinism, Duration::MAX),
    ];
    let mut failed = 0;
    for (id, name, check, limit) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let timing = if limit == Duration::MAX {
            format!("{:.2} s", elapsed.as_secs_f64())
        } else {
            format!("{:.2} s of {} s", elapsed.as_secs_f64(), limit.as_secs())
        };
        let (pass, detail) = match outcome {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; too slow")),
            Err(e) => (false, e),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} [{id}] {name}: {detail} ({timing})",
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
