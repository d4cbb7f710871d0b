//! Run configuration: a TOML document plus command-line overrides.
//!
//! Relative paths inside the document are resolved against the directory of
//! the config file, so a config and its inputs can be archived together.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use cliquegraph::io::{read_distribution, read_preference, RENORMALIZE_TOLERANCE};
use cliquegraph::{DegreeDistribution, ModelParams, PreferenceFunction};
use serde::Deserialize;

/// A distribution given either as a file path or inline as `{ "1" = 0.5, ... }`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum DistSource {
    Path(PathBuf),
    Inline(BTreeMap<String, f64>),
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub gamma: Option<f64>,
    pub n: Option<u32>,
    pub mu: Option<u32>,
    pub r1: Option<DistSource>,
    pub rn: Option<DistSource>,
    /// Path to a preference table, or `builtin:linear[:g[:M]]`,
    /// `builtin:constant[:g[:c]]`.
    pub preference: Option<String>,
    pub target_vdd: Option<DistSource>,
    /// Size of the complete seed graph.
    pub seed_size: Option<u32>,
    pub steps: Option<u64>,
    pub rng_seed: Option<u64>,
    pub tol: Option<f64>,
    pub k_max: Option<u32>,
    pub output_dir: Option<PathBuf>,
    pub replications: Option<u32>,
    /// Largest acceptable mean TV distance between grown and stationary VDDs.
    pub tv_threshold: Option<f64>,
    /// Largest acceptable TV distance between a calibrated model's
    /// stationary VDD and its target.
    pub forward_tol: Option<f64>,
    /// Edge list read by `analyze`.
    pub edges: Option<PathBuf>,
    /// Degree window of the log-log slope fit.
    pub slope_window: Option<[u32; 2]>,

    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Command-line values that take precedence over the document.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub steps: Option<u64>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub k_max: Option<u32>,
    pub replications: Option<u32>,
    pub edges: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let mut cfg = match path {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let mut cfg = Self::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
                cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
                cfg
            }
            None => RunConfig::default(),
        };
        cfg.apply(overrides);
        cfg.check_knobs()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn apply(&mut self, o: &Overrides) {
        self.rng_seed = o.seed.or(self.rng_seed);
        self.steps = o.steps.or(self.steps);
        self.tol = o.tol.or(self.tol);
        self.k_max = o.k_max.or(self.k_max);
        self.replications = o.replications.or(self.replications);
        // Paths given on the command line are relative to the working directory.
        if let Some(out) = &o.out {
            self.output_dir = Some(std::path::absolute(out).unwrap_or_else(|_| out.clone()));
        }
        if let Some(edges) = &o.edges {
            self.edges = Some(std::path::absolute(edges).unwrap_or_else(|_| edges.clone()));
        }
    }

    fn check_knobs(&self) -> Result<()> {
        let positive = [
            ("tol", self.tol),
            ("tv_threshold", self.tv_threshold),
            ("forward_tol", self.forward_tol),
        ];
        for (name, value) in positive {
            if let Some(v) = value {
                if !(v.is_finite() && v > 0.0) {
                    bail!("{name} must be positive, got {v}");
                }
            }
        }
        if self.replications == Some(0) {
            bail!("replications must be at least 1");
        }
        if self.k_max == Some(0) {
            bail!("k_max must be positive");
        }
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn require<T: Clone>(value: &Option<T>, key: &str) -> Result<T> {
        value.clone().ok_or_else(|| anyhow!("missing config key `{key}`"))
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed.unwrap_or(0)
    }

    pub fn replications(&self) -> u32 {
        self.replications.unwrap_or(1)
    }

    pub fn seed_size(&self) -> Result<u32> {
        Self::require(&self.seed_size, "seed_size")
    }

    pub fn steps(&self) -> Result<u64> {
        Self::require(&self.steps, "steps")
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(self.output_dir.as_deref().unwrap_or(Path::new("out")))
    }

    pub fn edges_path(&self) -> PathBuf {
        match &self.edges {
            Some(p) => self.resolve(p),
            None => self.output_dir().join("edges.tsv"),
        }
    }

    fn distribution(&self, src: &DistSource, key: &str) -> Result<DegreeDistribution> {
        match src {
            DistSource::Path(p) => {
                let path = self.resolve(p);
                read_distribution(&path).with_context(|| format!("reading `{key}` from {}", path.display()))
            }
            DistSource::Inline(map) => {
                let pairs = map
                    .iter()
                    .map(|(k, v)| {
                        Ok((
                            k.trim()
                                .parse::<u32>()
                                .with_context(|| format!("`{key}` degree {k:?}"))?,
                            *v,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                DegreeDistribution::new_renormalized(pairs, RENORMALIZE_TOLERANCE).with_context(|| format!("`{key}`"))
            }
        }
    }

    pub fn params(&self) -> Result<ModelParams> {
        let gamma = Self::require(&self.gamma, "gamma")?;
        let n = Self::require(&self.n, "n")?;
        let mu = self.mu.unwrap_or(0);
        let r1 = self.distribution(&Self::require(&self.r1, "r1")?, "r1")?;
        let rn = match &self.rn {
            Some(src) => self.distribution(src, "rn")?,
            None if gamma == 0.0 => DegreeDistribution::point(mu),
            None => bail!("missing config key `rn`"),
        };
        ModelParams::new(gamma, n, mu, r1, rn).context("invalid model parameters")
    }

    pub fn target(&self) -> Result<DegreeDistribution> {
        self.distribution(&Self::require(&self.target_vdd, "target_vdd")?, "target_vdd")
    }

    pub fn preference(&self) -> Result<PreferenceFunction> {
        let spec = Self::require(&self.preference, "preference")?;
        match spec.strip_prefix("builtin:") {
            Some(builtin) => parse_builtin(builtin).with_context(|| format!("preference {spec:?}")),
            None => {
                let path = self.resolve(Path::new(&spec));
                read_preference(&path).with_context(|| format!("reading preference from {}", path.display()))
            }
        }
    }
}

fn parse_builtin(s: &str) -> Result<PreferenceFunction> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |i: usize, default: &'static str| -> &str { parts.get(i).copied().unwrap_or(default) };
    let f = match parts[0] {
        "linear" => {
            let g: u32 = num(1, "1").parse()?;
            match parts.get(2) {
                None | Some(&"inf") => PreferenceFunction::linear(g)?,
                Some(m) => PreferenceFunction::from_fn(g, m.parse()?, |k| k as f64)?,
            }
        }
        "constant" => PreferenceFunction::constant(num(1, "1").parse()?, num(2, "1").parse()?)?,
        other => bail!("unknown builtin preference {other:?}"),
    };
    Ok(f)
}
