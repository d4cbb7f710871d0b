use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;

use cliquegraph::analysis::{compare, global_clustering, loglog_slope, triangle_count};
use cliquegraph::calibrate::{calibrate, CalibrationResult};
use cliquegraph::growth::{empirical_vdd, grow, GrowthStats, Interrupted, MultiGraph};
use cliquegraph::io;
use cliquegraph::stationary::{solve_stationary, SolverOptions, StationarySolution};
use cliquegraph::{DegreeDistribution, ModelParams, PreferenceFunction};

use crate::config::{DistSource, RunConfig};

pub const DEFAULT_TV_THRESHOLD: f64 = 0.03;
pub const DEFAULT_FORWARD_TOL: f64 = 1e-8;

/// A run that finished but whose model-level outcome is a failure
/// (infeasible target, tolerance not met, interrupted growth).
#[derive(Debug)]
pub struct ModelFailure(pub String);

impl fmt::Display for ModelFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ModelFailure {}

fn describe(src: &Option<DistSource>) -> Option<String> {
    src.as_ref().map(|s| match s {
        DistSource::Path(p) => p.display().to_string(),
        DistSource::Inline(map) => {
            let items: Vec<String> = map.iter().map(|(k, v)| format!("{k}:{v}")).collect();
            format!("{{{}}}", items.join(", "))
        }
    })
}

/// Version and full parameter echo written at the top of every output.
pub fn header(cfg: &RunConfig, command: &str) -> Vec<String> {
    let mut lines = vec![
        format!("cliquegraph {}", env!("CARGO_PKG_VERSION")),
        format!("command = {command}"),
    ];
    let mut push = |key: &str, value: Option<String>| {
        if let Some(v) = value {
            lines.push(format!("{key} = {v}"));
        }
    };
    push("gamma", cfg.gamma.map(|v| v.to_string()));
    push("n", cfg.n.map(|v| v.to_string()));
    push("mu", cfg.mu.map(|v| v.to_string()));
    push("r1", describe(&cfg.r1));
    push("rn", describe(&cfg.rn));
    push("preference", cfg.preference.clone());
    push("target_vdd", describe(&cfg.target_vdd));
    push("seed_size", cfg.seed_size.map(|v| v.to_string()));
    push("steps", cfg.steps.map(|v| v.to_string()));
    push("rng_seed", Some(cfg.rng_seed().to_string()));
    push("replications", Some(cfg.replications().to_string()));
    push("tol", cfg.tol.map(|v| v.to_string()));
    push("k_max", cfg.k_max.map(|v| v.to_string()));
    push("tv_threshold", cfg.tv_threshold.map(|v| v.to_string()));
    push("forward_tol", cfg.forward_tol.map(|v| v.to_string()));
    push("slope_window", cfg.slope_window.map(|[a, b]| format!("{a}..{b}")));
    lines
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> cliquegraph::Result<()>) -> Result<()> {
    let mut w = create(path)?;
    body(&mut w).with_context(|| format!("writing {}", path.display()))?;
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn solver_options(cfg: &RunConfig) -> SolverOptions {
    let mut opts = SolverOptions::default();
    if let Some(tol) = cfg.tol {
        opts.tol = tol;
    }
    opts.k_max = cfg.k_max;
    opts
}

fn replication_dir(out: &Path, i: u32, total: u32) -> PathBuf {
    if total == 1 {
        out.to_path_buf()
    } else {
        out.join(format!("rep-{i:03}"))
    }
}

struct Run {
    seed: u64,
    graph: MultiGraph,
    outcome: std::result::Result<GrowthStats, Interrupted>,
}

impl Run {
    fn stats(&self) -> &GrowthStats {
        match &self.outcome {
            Ok(s) => s,
            Err(e) => &e.stats,
        }
    }
}

/// Grows `replications` graphs in parallel; replication `i` uses seed `base + i`.
fn grow_replications(
    params: &ModelParams,
    pref: &PreferenceFunction,
    seed_size: u32,
    steps: u64,
    base: u64,
    replications: u32,
) -> Result<Vec<Run>> {
    let seed_graph = MultiGraph::complete(seed_size).context("seed graph")?;
    Ok((0..replications)
        .into_par_iter()
        .map(|i| {
            let seed = base.wrapping_add(i as u64);
            let mut graph = seed_graph.clone();
            let outcome = grow(&mut graph, params, pref, steps, seed);
            Run { seed, graph, outcome }
        })
        .collect())
}

fn write_vdd_csv(w: &mut impl Write, graph: &MultiGraph, header: &[String]) -> cliquegraph::Result<()> {
    for line in header {
        writeln!(w, "# {line}")?;
    }
    writeln!(w, "k,count,fraction")?;
    let mut counts = vec![0u64; graph.max_degree() as usize + 1];
    for &d in graph.degrees() {
        counts[d as usize] += 1;
    }
    let total = graph.vertex_count() as f64;
    for (k, &c) in counts.iter().enumerate().filter(|(_, &c)| c > 0) {
        writeln!(w, "{k},{c},{}", c as f64 / total)?;
    }
    Ok(())
}

fn write_run(dir: &Path, run: &Run, header: &[String], replication: u32) -> Result<()> {
    let mut header = header.to_vec();
    header.push(format!("replication = {replication}"));
    header.push(format!("replication_seed = {}", run.seed));
    write_file(&dir.join("edges.tsv"), |w| io::write_edge_list(w, &run.graph, &header))?;
    write_file(&dir.join("vdd.csv"), |w| write_vdd_csv(w, &run.graph, &header))?;
    let mut extra = vec![
        ("vertices", run.graph.vertex_count().to_string()),
        ("edges", run.graph.edge_count().to_string()),
        ("complete", run.outcome.is_ok().to_string()),
    ];
    if let Err(e) = &run.outcome {
        extra.push(("error", e.error.to_string()));
    }
    write_file(&dir.join("stats.txt"), |w| {
        for line in &header {
            writeln!(w, "# {line}")?;
        }
        io::write_stats(w, run.stats(), &extra)
    })
}

pub fn cmd_generate(cfg: &RunConfig) -> Result<()> {
    let params = cfg.params()?;
    let pref = cfg.preference()?;
    let (seed_size, steps, reps) = (cfg.seed_size()?, cfg.steps()?, cfg.replications());
    let out = cfg.output_dir();
    let header = header(cfg, "generate");
    let runs = grow_replications(&params, &pref, seed_size, steps, cfg.rng_seed(), reps)?;
    for (i, run) in runs.iter().enumerate() {
        let dir = replication_dir(&out, i as u32, reps);
        write_run(&dir, run, &header, i as u32)?;
        let s = run.stats();
        println!(
            "{}: {} steps, {} vertices, {} edges",
            dir.display(),
            s.steps,
            run.graph.vertex_count(),
            run.graph.edge_count()
        );
    }
    if let Some((i, run)) = runs.iter().enumerate().find(|(_, r)| r.outcome.is_err()) {
        let err = run.outcome.as_ref().unwrap_err();
        return Err(ModelFailure(err.to_string()))
            .with_context(|| format!("replication {i} (seed {}), partial output written", run.seed));
    }
    Ok(())
}

fn solve(cfg: &RunConfig, params: &ModelParams, pref: &PreferenceFunction) -> Result<StationarySolution> {
    solve_stationary(params, pref, &solver_options(cfg)).context("stationary solver failed")
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<()> {
    let params = cfg.params()?;
    let pref = cfg.preference()?;
    let sol = solve(cfg, &params, &pref)?;
    let path = cfg.output_dir().join("solution.csv");
    write_file(&path, |w| io::write_solution(w, &sol, &header(cfg, "solve")))?;
    println!(
        "{}: k_max={} mean_f={} residual={:e} tail={:e}",
        path.display(),
        sol.k_max(),
        sol.mean_f,
        sol.balance_residual,
        sol.tail_mass_bound
    );
    Ok(())
}

struct CalibrationOutcome {
    result: CalibrationResult,
    forward: Option<(StationarySolution, f64)>,
}

fn run_calibration(cfg: &RunConfig, params: &ModelParams, target: &DegreeDistribution) -> Result<CalibrationOutcome> {
    let result = calibrate(target, params).context("calibration failed")?;
    let forward = match &result.f {
        Some(f) => {
            let sol = solve(cfg, params, f).context("forward check")?;
            let tv = compare(&sol.q, target).tv_distance;
            Some((sol, tv))
        }
        None => None,
    };
    Ok(CalibrationOutcome { result, forward })
}

fn calibration_lines(c: &CalibrationOutcome) -> Vec<(&'static str, String)> {
    let r = &c.result;
    let mut lines = vec![
        ("feasible", r.feasible.to_string()),
        ("a", r.a.to_string()),
        (
            "first_infeasible_k",
            r.first_infeasible_k.map_or_else(|| "none".into(), |k| k.to_string()),
        ),
    ];
    lines.push(("mean_preference", r.mean_preference.to_string()));
    if let Some(f) = &r.f {
        lines.push(("support", format!("{}..{}", f.min_degree(), f.table_end() - 1)));
    }
    if let Some((sol, tv)) = &c.forward {
        lines.push(("forward_tv", tv.to_string()));
        lines.push(("forward_mean_f", sol.mean_f.to_string()));
    }
    lines
}

fn write_key_values(path: &Path, header: &[String], lines: &[(&str, String)]) -> Result<()> {
    write_file(path, |w| {
        for line in header {
            writeln!(w, "# {line}")?;
        }
        for (k, v) in lines {
            writeln!(w, "{k}={v}")?;
        }
        Ok(())
    })
}

fn write_calibration(out: &Path, header: &[String], c: &CalibrationOutcome) -> Result<()> {
    write_key_values(&out.join("calibration.txt"), header, &calibration_lines(c))?;
    write_file(&out.join("raw_weights.tsv"), |w| {
        for line in header {
            writeln!(w, "# {line}")?;
        }
        for (k, v) in &c.result.weights {
            writeln!(w, "{k}\t{v}")?;
        }
        Ok(())
    })?;
    let path = out.join("preference.tsv");
    match &c.result.f {
        Some(f) => write_file(&path, |w| io::write_preference(w, f, header)),
        // A preference left by an earlier run would read as this run's result.
        None => match fs::remove_file(&path) {
            Err(e) if e.kind() != std::io::ErrorKind::NotFound => {
                Err(e).with_context(|| format!("removing {}", path.display()))
            }
            _ => Ok(()),
        },
    }
}

fn infeasible(r: &CalibrationResult) -> ModelFailure {
    ModelFailure(match r.first_infeasible_k {
        Some(k) => format!("target is infeasible for these parameters (first infeasible degree {k})"),
        None => format!(
            "target is infeasible for these parameters (sum f Q = {} but a = {})",
            r.mean_preference, r.a
        ),
    })
}

pub fn cmd_calibrate(cfg: &RunConfig) -> Result<()> {
    let params = cfg.params()?;
    let target = cfg.target()?;
    let out = cfg.output_dir();
    let c = run_calibration(cfg, &params, &target)?;
    write_calibration(&out, &header(cfg, "calibrate"), &c)?;
    for (k, v) in calibration_lines(&c) {
        println!("{k}={v}");
    }
    if !c.result.feasible {
        return Err(infeasible(&c.result).into());
    }
    let tol = cfg.forward_tol.unwrap_or(DEFAULT_FORWARD_TOL);
    let (_, tv) = c.forward.as_ref().expect("feasible result has a forward check");
    if !(*tv <= tol) {
        return Err(ModelFailure(format!("forward check TV {tv:e} exceeds {tol:e}")).into());
    }
    Ok(())
}

fn summary(
    graph: &MultiGraph,
    emp: &DegreeDistribution,
    theory: &DegreeDistribution,
    window: [u32; 2],
) -> Vec<(&'static str, String)> {
    let fmt_slope = |d: &DegreeDistribution| {
        loglog_slope(d, window[0], window[1]).map_or_else(|e| format!("undefined ({e})"), |s| s.to_string())
    };
    vec![
        ("slope_window", format!("{}..{}", window[0], window[1])),
        ("slope_empirical", fmt_slope(emp)),
        ("slope_theoretical", fmt_slope(theory)),
        ("triangles", triangle_count(graph).to_string()),
        (
            "clustering",
            global_clustering(graph).map_or_else(|e| format!("undefined ({e})"), |c| c.to_string()),
        ),
        ("vertices", graph.vertex_count().to_string()),
        ("edges", graph.edge_count().to_string()),
    ]
}

fn default_window(cfg: &RunConfig, emp: &DegreeDistribution) -> [u32; 2] {
    cfg.slope_window
        .unwrap_or([emp.support_min().max(1), emp.support_max()])
}

pub fn cmd_analyze(cfg: &RunConfig) -> Result<()> {
    let edges = cfg.edges_path();
    let graph = io::read_edge_list(&edges).with_context(|| format!("reading {}", edges.display()))?;
    let emp = empirical_vdd(&graph)?;
    let theory = if cfg.preference.is_some() {
        solve(cfg, &cfg.params()?, &cfg.preference()?)?.q
    } else {
        cfg.target()
            .context("analyze needs `preference` or `target_vdd` to compare against")?
    };
    let report = compare(&emp, &theory);
    let lines = summary(&graph, &emp, &theory, default_window(cfg, &emp));
    let path = cfg.output_dir().join("report.csv");
    write_file(&path, |w| {
        io::write_report(w, &emp, &theory, &report, &lines, &header(cfg, "analyze"))
    })?;
    println!("tv={}", report.tv_distance);
    println!("ks={}", report.ks_statistic);
    for (k, v) in &lines {
        println!("{k}={v}");
    }
    Ok(())
}

fn verdict(pass: bool) -> String {
    if pass { "pass" } else { "fail" }.to_string()
}

pub fn cmd_roundtrip(cfg: &RunConfig) -> Result<()> {
    let params = cfg.params()?;
    let target = cfg.target()?;
    let (seed_size, steps, reps) = (cfg.seed_size()?, cfg.steps()?, cfg.replications());
    let out = cfg.output_dir();
    let header = header(cfg, "roundtrip");
    let mut lines: Vec<(&str, String)> = Vec::new();

    let c = run_calibration(cfg, &params, &target).context("stage calibrate")?;
    write_calibration(&out, &header, &c)?;
    lines.extend(calibration_lines(&c));
    let Some(f) = c.result.f.clone() else {
        lines.push(("calibrate", verdict(false)));
        write_key_values(&out.join("roundtrip.txt"), &header, &lines)?;
        return Err(anyhow::Error::new(infeasible(&c.result)).context("stage calibrate"));
    };
    lines.push(("calibrate", verdict(true)));

    let forward_tol = cfg.forward_tol.unwrap_or(DEFAULT_FORWARD_TOL);
    let (sol, forward_tv) = c.forward.as_ref().expect("feasible result has a forward check");
    let solve_pass = *forward_tv <= forward_tol;
    lines.push(("forward_tol", forward_tol.to_string()));
    lines.push(("solve", verdict(solve_pass)));

    let runs = grow_replications(&params, &f, seed_size, steps, cfg.rng_seed(), reps).context("stage grow")?;
    if let Some(err) = runs.iter().find_map(|r| r.outcome.as_ref().err()) {
        lines.push(("grow", verdict(false)));
        write_key_values(&out.join("roundtrip.txt"), &header, &lines)?;
        return Err(ModelFailure(err.to_string())).context("stage grow");
    }
    lines.push(("grow", verdict(true)));

    let tvs = runs
        .iter()
        .map(|r| Ok(compare(&empirical_vdd(&r.graph)?, &sol.q).tv_distance))
        .collect::<cliquegraph::Result<Vec<f64>>>()
        .context("stage analyze")?;
    let mean_tv = tvs.iter().sum::<f64>() / tvs.len() as f64;
    let threshold = cfg.tv_threshold.unwrap_or(DEFAULT_TV_THRESHOLD);
    let analyze_pass = mean_tv < threshold;
    lines.push(("mean_tv", mean_tv.to_string()));
    lines.push(("max_tv", tvs.iter().copied().fold(0.0, f64::max).to_string()));
    lines.push(("tv_threshold", threshold.to_string()));
    lines.push(("analyze", verdict(analyze_pass)));

    let first = &runs[0];
    let emp = empirical_vdd(&first.graph)?;
    let report = compare(&emp, &sol.q);
    let extra = summary(&first.graph, &emp, &sol.q, default_window(cfg, &emp));
    write_file(&out.join("report.csv"), |w| {
        io::write_report(w, &emp, &sol.q, &report, &extra, &header)
    })?;
    write_file(&out.join("edges.tsv"), |w| {
        io::write_edge_list(w, &first.graph, &header)
    })?;

    let pass = solve_pass && analyze_pass;
    lines.push(("overall", verdict(pass)));
    write_key_values(&out.join("roundtrip.txt"), &header, &lines)?;
    for (k, v) in &lines {
        println!("{k}={v}");
    }
    if !pass {
        let stage = if solve_pass { "analyze" } else { "solve" };
        return Err(ModelFailure("tolerance not met".into())).with_context(|| format!("stage {stage}"));
    }
    Ok(())
}
