use rand::Rng;

use super::graph::MultiGraph;
use crate::error::{Error, Result};
use crate::model::PreferenceFunction;

/// Number of occupied layers above which [`SelectionStrategy::Auto`]
/// switches from a linear scan to a prefix-sum tree.
pub const TREE_THRESHOLD: usize = 4096;

/// How the layer of the next attachment target is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SelectionStrategy {
    /// Linear scan until more than [`TREE_THRESHOLD`] layers are occupied.
    #[default]
    Auto,
    Linear,
    Tree,
}

/// Vertices grouped into layers by degree.
///
/// Attachment weight depends on degree only, so choosing a target is a
/// two-stage draw: a layer `k` with probability `f(k)|A_k| / sum_l f(l)|A_l|`,
/// then a uniform member of that layer.
#[derive(Clone, Debug)]
pub struct LayerIndex {
    pref: PreferenceFunction,
    members: Vec<Vec<u32>>,
    slot: Vec<u32>,
    occupied: Vec<u32>,
    occupied_pos: Vec<usize>,
    total_weight: f64,
    strategy: SelectionStrategy,
    tree: Option<Fenwick>,
}

const VACANT: usize = usize::MAX;

impl LayerIndex {
    pub fn build(graph: &MultiGraph, pref: PreferenceFunction) -> Self {
        Self::build_with(graph, pref, SelectionStrategy::Auto)
    }

    pub fn build_with(graph: &MultiGraph, pref: PreferenceFunction, strategy: SelectionStrategy) -> Self {
        let mut idx = LayerIndex {
            pref,
            members: Vec::new(),
            slot: Vec::with_capacity(graph.vertex_count()),
            occupied: Vec::new(),
            occupied_pos: Vec::new(),
            total_weight: 0.0,
            strategy,
            tree: None,
        };
        for (v, &k) in graph.degrees().iter().enumerate() {
            idx.insert(v as u32, k);
        }
        idx.resync();
        idx
    }

    pub fn preference(&self) -> &PreferenceFunction {
        &self.pref
    }

    /// `|A_k|`.
    pub fn layer_size(&self, k: u32) -> usize {
        self.members.get(k as usize).map_or(0, Vec::len)
    }

    /// Members of `A_k` in internal order.
    pub fn layer(&self, k: u32) -> &[u32] {
        self.members.get(k as usize).map_or(&[], Vec::as_slice)
    }

    /// `f(k) |A_k|`.
    pub fn layer_weight(&self, k: u32) -> f64 {
        self.pref.weight(k) * self.layer_size(k) as f64
    }

    /// Incrementally maintained `sum_l f(l) |A_l|`.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// `sum_l f(l) |A_l|` recomputed from the layer sizes.
    pub fn exact_total_weight(&self) -> f64 {
        let mut degrees = self.occupied.clone();
        degrees.sort_unstable();
        degrees.iter().map(|&k| self.layer_weight(k)).sum()
    }

    /// Degrees of the non-empty layers, ascending.
    pub fn occupied_layers(&self) -> Vec<u32> {
        let mut degrees = self.occupied.clone();
        degrees.sort_unstable();
        degrees
    }

    fn uses_tree(&self) -> bool {
        self.tree.is_some()
    }

    fn ensure_layer(&mut self, k: u32) {
        let k = k as usize;
        if k >= self.members.len() {
            self.members.resize_with(k + 1, Vec::new);
            self.occupied_pos.resize(k + 1, VACANT);
            if let Some(tree) = &mut self.tree {
                if k >= tree.len() {
                    *tree = Fenwick::new((k + 1).next_power_of_two());
                    let weights: Vec<(usize, f64)> = self
                        .occupied
                        .iter()
                        .map(|&d| (d as usize, self.pref.weight(d) * self.members[d as usize].len() as f64))
                        .collect();
                    for (d, w) in weights {
                        tree.add(d, w);
                    }
                }
            }
        }
    }

    /// Adds a new vertex `v` (the next id) to layer `k`.
    pub(crate) fn insert(&mut self, v: u32, k: u32) {
        debug_assert_eq!(v as usize, self.slot.len());
        self.ensure_layer(k);
        self.slot.push(0);
        self.push_member(v, k);
    }

    /// Moves `v` from layer `from` to layer `to`.
    pub(crate) fn relocate(&mut self, v: u32, from: u32, to: u32) {
        if from == to {
            return;
        }
        self.ensure_layer(to);
        let layer = &mut self.members[from as usize];
        let pos = self.slot[v as usize] as usize;
        debug_assert_eq!(layer[pos], v);
        layer.swap_remove(pos);
        if let Some(&moved) = layer.get(pos) {
            self.slot[moved as usize] = pos as u32;
        }
        let emptied = layer.is_empty();
        self.adjust_weight(from, -1.0);
        if emptied {
            let at = self.occupied_pos[from as usize];
            self.occupied.swap_remove(at);
            if let Some(&d) = self.occupied.get(at) {
                self.occupied_pos[d as usize] = at;
            }
            self.occupied_pos[from as usize] = VACANT;
        }
        self.push_member(v, to);
    }

    fn push_member(&mut self, v: u32, k: u32) {
        let layer = &mut self.members[k as usize];
        self.slot[v as usize] = layer.len() as u32;
        layer.push(v);
        let opened = layer.len() == 1;
        if opened {
            self.occupied_pos[k as usize] = self.occupied.len();
            self.occupied.push(k);
        }
        self.adjust_weight(k, 1.0);
        if opened
            && self.tree.is_none()
            && self.strategy == SelectionStrategy::Auto
            && self.occupied.len() > TREE_THRESHOLD
        {
            self.enable_tree();
        }
    }

    fn adjust_weight(&mut self, k: u32, sign: f64) {
        let w = self.pref.weight(k);
        if w == 0.0 {
            return;
        }
        self.total_weight += sign * w;
        if let Some(tree) = &mut self.tree {
            tree.add(k as usize, sign * w);
        }
    }

    fn enable_tree(&mut self) {
        self.tree = Some(Fenwick::new(self.members.len().max(1).next_power_of_two()));
        self.resync();
    }

    /// Recomputes the running total and the prefix tree from the layer sizes,
    /// discarding accumulated rounding.
    pub fn resync(&mut self) {
        if self.strategy == SelectionStrategy::Tree && self.tree.is_none() {
            self.tree = Some(Fenwick::new(self.members.len().max(1).next_power_of_two()));
        }
        self.total_weight = self.exact_total_weight();
        if let Some(tree) = &mut self.tree {
            let len = tree.len();
            *tree = Fenwick::new(len);
            for &k in &self.occupied {
                tree.add(k as usize, self.pref.weight(k) * self.members[k as usize].len() as f64);
            }
        }
    }

    /// Compares against an index rebuilt from scratch for `graph`.
    pub fn check_consistent(&self, graph: &MultiGraph) -> std::result::Result<(), String> {
        if self.slot.len() != graph.vertex_count() {
            return Err(format!(
                "index holds {} vertices, graph {}",
                self.slot.len(),
                graph.vertex_count()
            ));
        }
        let fresh = LayerIndex::build_with(graph, self.pref.clone(), SelectionStrategy::Linear);
        let top = self.members.len().max(fresh.members.len());
        for k in 0..top as u32 {
            let (a, b) = (self.layer_size(k), fresh.layer_size(k));
            if a != b {
                return Err(format!("layer {k}: {a} members, expected {b}"));
            }
        }
        for (v, &k) in graph.degrees().iter().enumerate() {
            let pos = self.slot[v] as usize;
            if self.layer(k).get(pos) != Some(&(v as u32)) {
                return Err(format!("vertex {v} missing from layer {k}"));
            }
        }
        let exact = fresh.exact_total_weight();
        if (self.total_weight - exact).abs() > 1e-6 * exact.abs().max(1.0) {
            return Err(format!("total weight {} drifted from {}", self.total_weight, exact));
        }
        Ok(())
    }

    /// A sampler over the current state. All draws from one sampler see the
    /// same weights, which is how the targets of one increment are chosen.
    pub fn sampler(&self) -> Result<TargetSampler<'_>> {
        if self.uses_tree() {
            let total = self.tree.as_ref().map_or(0.0, Fenwick::total);
            if total > 0.0 {
                return Ok(TargetSampler {
                    index: self,
                    cumulative: None,
                    total,
                });
            }
            return Err(Error::Saturated);
        }
        let mut degrees = self.occupied.clone();
        degrees.sort_unstable();
        let mut cumulative = Vec::with_capacity(degrees.len());
        let mut total = 0.0;
        for k in degrees {
            let w = self.layer_weight(k);
            if w > 0.0 {
                total += w;
                cumulative.push((k, total));
            }
        }
        if cumulative.is_empty() {
            return Err(Error::Saturated);
        }
        Ok(TargetSampler {
            index: self,
            cumulative: Some(cumulative),
            total,
        })
    }

    /// One vertex drawn with probability `f(k_i) / sum_j f(k_j)`.
    pub fn sample_target<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<u32> {
        Ok(self.sampler()?.sample(rng))
    }
}

/// Frozen view of a [`LayerIndex`] for drawing attachment targets.
pub struct TargetSampler<'a> {
    index: &'a LayerIndex,
    cumulative: Option<Vec<(u32, f64)>>,
    total: f64,
}

impl TargetSampler<'_> {
    pub fn total_weight(&self) -> f64 {
        self.total
    }

    fn pick_layer<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u = rng.gen::<f64>() * self.total;
        match &self.cumulative {
            Some(cum) => {
                let i = cum.partition_point(|&(_, c)| c <= u).min(cum.len() - 1);
                cum[i].0
            }
            None => {
                let tree = self.index.tree.as_ref().expect("tree sampler without tree");
                let k = tree.find(u) as u32;
                if self.index.layer_weight(k) > 0.0 {
                    k
                } else {
                    // u fell past the last positive layer through rounding.
                    self.index
                        .occupied_layers()
                        .into_iter()
                        .rev()
                        .find(|&d| self.index.layer_weight(d) > 0.0)
                        .expect("positive total with no positive layer")
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let k = self.pick_layer(rng);
        let layer = self.index.layer(k);
        layer[rng.gen_range(0..layer.len())]
    }
}

/// Binary indexed tree of layer weights.
#[derive(Clone, Debug)]
struct Fenwick {
    tree: Vec<f64>,
}

impl Fenwick {
    fn new(len: usize) -> Self {
        Fenwick {
            tree: vec![0.0; len + 1],
        }
    }

    fn len(&self) -> usize {
        self.tree.len() - 1
    }

    fn add(&mut self, i: usize, delta: f64) {
        let mut i = i + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    fn total(&self) -> f64 {
        let mut i = self.len();
        let mut s = 0.0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }

    /// Smallest index whose inclusive prefix sum exceeds `u`.
    fn find(&self, mut u: f64) -> usize {
        let n = self.len();
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= u {
                pos = next;
                u -= self.tree[next];
            }
            step >>= 1;
        }
        pos.min(n - 1)
    }
}
