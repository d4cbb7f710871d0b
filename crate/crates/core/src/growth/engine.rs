use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::graph::MultiGraph;
use super::layers::{LayerIndex, SelectionStrategy};
use crate::error::{Error, Result};
use crate::model::{DegreeDistribution, ModelParams, PreferenceFunction};

/// Generator behind every growth run.
pub type GrowthRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> GrowthRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Default spacing, in increments, of layer-index consistency checks.
pub const DEFAULT_CHECK_INTERVAL: u64 = 1024;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GrowthStats {
    pub steps: u64,
    pub monad_steps: u64,
    pub nad_steps: u64,
    /// Vertices added by the increments (seed excluded).
    pub realized_vertices: u64,
    /// Edges added by the increments (seed excluded).
    pub realized_edges: u64,
    pub rng_seed: u64,
}

/// A run that stopped early. The graph keeps every increment completed
/// before the failure.
#[derive(Debug, thiserror::Error)]
#[error("growth stopped after {} of the requested steps: {error}", stats.steps)]
pub struct Interrupted {
    pub stats: GrowthStats,
    #[source]
    pub error: Error,
}

#[derive(Clone, Debug)]
struct DegreeSampler {
    offset: u32,
    index: WeightedIndex<f64>,
}

impl DegreeSampler {
    fn new(d: &DegreeDistribution) -> Self {
        let offset = d.support_min();
        let weights: Vec<f64> = (offset..=d.support_max()).map(|k| d.prob(k)).collect();
        let index = WeightedIndex::new(weights).expect("validated distribution has positive mass");
        DegreeSampler { offset, index }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        self.offset + self.index.sample(rng) as u32
    }
}

/// A graph being grown together with its layer index.
///
/// All attachment targets of one increment are drawn against the weights
/// in force before that increment; degrees and layers are updated only
/// after every target is known. New vertices are therefore never targets of
/// their own increment.
#[derive(Clone, Debug)]
pub struct GrowthProcess {
    graph: MultiGraph,
    index: LayerIndex,
    params: ModelParams,
    monad_edges: DegreeSampler,
    nad_edges: DegreeSampler,
    stats: GrowthStats,
    check_interval: Option<u64>,
    increments: u64,
}

impl GrowthProcess {
    pub fn new(graph: MultiGraph, params: ModelParams, pref: PreferenceFunction) -> Result<Self> {
        Self::with_strategy(graph, params, pref, SelectionStrategy::Auto)
    }

    pub fn with_strategy(
        graph: MultiGraph,
        params: ModelParams,
        pref: PreferenceFunction,
        strategy: SelectionStrategy,
    ) -> Result<Self> {
        if graph.vertex_count() == 0 {
            return Err(Error::EmptyGraph);
        }
        let index = LayerIndex::build_with(&graph, pref, strategy);
        Ok(GrowthProcess {
            monad_edges: DegreeSampler::new(&params.r1),
            nad_edges: DegreeSampler::new(&params.rn),
            graph,
            index,
            params,
            stats: GrowthStats::default(),
            check_interval: Some(DEFAULT_CHECK_INTERVAL),
            increments: 0,
        })
    }

    /// Rebuild-and-compare the layer index every `interval` increments
    /// (`None` disables the check).
    pub fn set_check_interval(&mut self, interval: Option<u64>) {
        self.check_interval = interval.filter(|&i| i > 0);
    }

    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    pub fn index(&self) -> &LayerIndex {
        &self.index
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn stats(&self) -> &GrowthStats {
        &self.stats
    }

    pub fn into_parts(self) -> (MultiGraph, GrowthStats) {
        (self.graph, self.stats)
    }

    /// One increment: an n-ad with probability `gamma`, otherwise a monad.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        if rng.gen_bool(self.params.gamma) {
            self.apply_nad(rng)
        } else {
            self.apply_monad(rng)
        }
    }

    /// Runs `steps` increments, stopping at the first failure.
    pub fn run<R: Rng + ?Sized>(&mut self, steps: u64, rng: &mut R) -> Result<()> {
        for _ in 0..steps {
            self.step(rng)?;
        }
        Ok(())
    }

    /// Adds a monad whose free-edge count is drawn from `r1`.
    pub fn apply_monad<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        let j = self.monad_edges.sample(rng);
        self.apply_monad_with(j, rng)
    }

    /// Adds a monad with exactly `j` free edges.
    pub fn apply_monad_with<R: Rng + ?Sized>(&mut self, j: u32, rng: &mut R) -> Result<()> {
        let targets = if j > 0 {
            let sampler = self.index.sampler()?;
            (0..j).map(|_| sampler.sample(rng)).collect()
        } else {
            Vec::new()
        };
        let edges_before = self.graph.edge_count();
        let v = self.graph.push_vertex();
        for &t in &targets {
            self.graph.push_edge(v, t);
        }
        self.settle_targets(targets);
        self.index.insert(v, j);

        self.stats.steps += 1;
        self.stats.monad_steps += 1;
        self.stats.realized_vertices += 1;
        self.stats.realized_edges += (self.graph.edge_count() - edges_before) as u64;
        self.after_increment();
        Ok(())
    }

    /// Adds an n-ad whose vertices draw their free-edge counts independently
    /// from `rn`.
    pub fn apply_nad<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        let free: Vec<u32> = (0..self.params.n).map(|_| self.nad_edges.sample(rng)).collect();
        self.apply_nad_with(&free, rng)
    }

    /// Adds an n-ad whose vertex `i` has `free[i]` free edges.
    ///
    /// The `n` new vertices form a clique. `mu` bundle targets are drawn, and
    /// every new vertex sends one edge to each of them, so a bundle target's
    /// degree rises by `n`. The remaining `free[i] - mu` ends of each vertex
    /// attach to independently drawn targets.
    pub fn apply_nad_with<R: Rng + ?Sized>(&mut self, free: &[u32], rng: &mut R) -> Result<()> {
        let n = self.params.n;
        let mu = self.params.mu;
        assert_eq!(free.len(), n as usize, "one free-edge count per n-ad vertex");
        assert!(
            free.iter().all(|&j| j >= mu),
            "every n-ad vertex needs at least mu free edges"
        );

        let singles: u32 = free.iter().map(|&j| j - mu).sum();
        let (bundles, single_targets) = if mu + singles > 0 {
            let sampler = self.index.sampler()?;
            let bundles: Vec<u32> = (0..mu).map(|_| sampler.sample(rng)).collect();
            let single_targets: Vec<Vec<u32>> = free
                .iter()
                .map(|&j| (0..j - mu).map(|_| sampler.sample(rng)).collect())
                .collect();
            (bundles, single_targets)
        } else {
            (Vec::new(), vec![Vec::new(); n as usize])
        };

        let edges_before = self.graph.edge_count();
        let first = self.graph.vertex_count() as u32;
        for _ in 0..n {
            self.graph.push_vertex();
        }
        let members = first..first + n;
        for u in members.clone() {
            for v in u + 1..first + n {
                self.graph.push_edge(u, v);
            }
        }
        let mut touched = Vec::with_capacity((mu * n + singles) as usize);
        for &t in &bundles {
            for v in members.clone() {
                self.graph.push_edge(v, t);
                touched.push(t);
            }
        }
        for (v, targets) in members.clone().zip(&single_targets) {
            for &t in targets {
                self.graph.push_edge(v, t);
                touched.push(t);
            }
        }
        self.settle_targets(touched);
        for (v, &j) in members.zip(free) {
            debug_assert_eq!(self.graph.degree(v), j + n - 1);
            self.index.insert(v, j + n - 1);
        }

        self.stats.steps += 1;
        self.stats.nad_steps += 1;
        self.stats.realized_vertices += n as u64;
        self.stats.realized_edges += (self.graph.edge_count() - edges_before) as u64;
        self.after_increment();
        Ok(())
    }

    /// Moves every existing vertex that received edges to its new layer.
    /// `targets` lists one entry per received edge end.
    fn settle_targets(&mut self, mut targets: Vec<u32>) {
        targets.sort_unstable();
        for run in targets.chunk_by(|a, b| a == b) {
            let t = run[0];
            let now = self.graph.degree(t);
            self.index.relocate(t, now - run.len() as u32, now);
        }
    }

    fn after_increment(&mut self) {
        self.increments += 1;
        if let Some(interval) = self.check_interval {
            if self.increments.is_multiple_of(interval) {
                if let Err(msg) = self.index.check_consistent(&self.graph) {
                    panic!(
                        "layer index diverged from graph after {} increments: {msg}",
                        self.increments
                    );
                }
                self.index.resync();
            }
        }
    }
}

/// Grows `graph` by `steps` increments from a fresh generator seeded with
/// `rng_seed`. On failure the graph keeps the completed increments and the
/// partial statistics come back inside the error.
pub fn grow(
    graph: &mut MultiGraph,
    params: &ModelParams,
    pref: &PreferenceFunction,
    steps: u64,
    rng_seed: u64,
) -> std::result::Result<GrowthStats, Interrupted> {
    let stats = GrowthStats {
        rng_seed,
        ..GrowthStats::default()
    };
    if graph.vertex_count() == 0 {
        return Err(Interrupted {
            stats,
            error: Error::EmptyGraph,
        });
    }
    let mut process = GrowthProcess::new(std::mem::take(graph), params.clone(), pref.clone()).expect("non-empty graph");
    let mut rng = rng_from_seed(rng_seed);
    let outcome = process.run(steps, &mut rng);
    let (grown, mut stats) = process.into_parts();
    *graph = grown;
    stats.rng_seed = rng_seed;
    match outcome {
        Ok(()) => Ok(stats),
        Err(error) => Err(Interrupted { stats, error }),
    }
}

/// Fraction of vertices at each degree.
pub fn empirical_vdd(graph: &MultiGraph) -> Result<DegreeDistribution> {
    if graph.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut counts = vec![0u64; graph.max_degree() as usize + 1];
    for &d in graph.degrees() {
        counts[d as usize] += 1;
    }
    DegreeDistribution::from_counts(&counts)
}
