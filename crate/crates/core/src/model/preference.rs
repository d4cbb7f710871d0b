use crate::error::{Error, Result};

/// Behaviour of a [`PreferenceFunction`] past the end of its table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tail {
    /// Weight is zero after the table: the largest attachable degree is finite.
    Zero,
    /// Weight continues as `intercept + slope * k` for every larger degree.
    Affine { intercept: f64, slope: f64 },
}

/// Attachment weights `f(k)` by vertex degree.
///
/// Positive on `[g, M]` and zero elsewhere, where `M` is either the last
/// tabulated degree ([`Tail::Zero`]) or unbounded ([`Tail::Affine`]).
/// Multiplying all weights by a positive constant leaves the attachment
/// probabilities unchanged.
#[derive(Clone, Debug, PartialEq)]
pub struct PreferenceFunction {
    g: u32,
    table: Vec<f64>,
    tail: Tail,
}

impl PreferenceFunction {
    /// Tabulated weights for degrees `g, g + 1, ...`, zero afterwards.
    pub fn tabulated(g: u32, weights: Vec<f64>) -> Result<Self> {
        Self::with_tail(g, weights, Tail::Zero)
    }

    /// Tabulated weights followed by an explicit tail rule.
    pub fn with_tail(g: u32, table: Vec<f64>, tail: Tail) -> Result<Self> {
        if table.is_empty() && tail == Tail::Zero {
            return Err(Error::InvalidPreference("empty support".into()));
        }
        if (g as u64) + table.len() as u64 > u32::MAX as u64 {
            return Err(Error::InvalidPreference("table exceeds the degree range".into()));
        }
        for (i, &w) in table.iter().enumerate() {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::InvalidWeight {
                    k: g + i as u32,
                    value: w,
                });
            }
        }
        if let Tail::Affine { intercept, slope } = tail {
            let first = g + table.len() as u32;
            let w = intercept + slope * first as f64;
            if !intercept.is_finite() || !slope.is_finite() || slope < 0.0 || w <= 0.0 {
                return Err(Error::InvalidPreference(format!(
                    "affine tail {intercept} + {slope}*k must be non-decreasing and positive from degree {first}"
                )));
            }
        }
        Ok(PreferenceFunction { g, table, tail })
    }

    /// `f(k) = k` for every `k >= g` (`g >= 1`), with no upper cutoff.
    pub fn linear(g: u32) -> Result<Self> {
        if g == 0 {
            return Err(Error::InvalidWeight { k: 0, value: 0.0 });
        }
        Self::with_tail(
            g,
            Vec::new(),
            Tail::Affine {
                intercept: 0.0,
                slope: 1.0,
            },
        )
    }

    /// `f(k) = c` for every `k >= g`, with no upper cutoff.
    pub fn constant(g: u32, c: f64) -> Result<Self> {
        Self::with_tail(
            g,
            Vec::new(),
            Tail::Affine {
                intercept: c,
                slope: 0.0,
            },
        )
    }

    /// Tabulates `f` on `[g, max]`, zero beyond.
    pub fn from_fn(g: u32, max: u32, f: impl Fn(u32) -> f64) -> Result<Self> {
        if max < g {
            return Err(Error::InvalidPreference(format!("max {max} below g {g}")));
        }
        Self::tabulated(g, (g..=max).map(f).collect())
    }

    pub fn weight(&self, k: u32) -> f64 {
        if k < self.g {
            return 0.0;
        }
        let i = (k - self.g) as usize;
        if let Some(&w) = self.table.get(i) {
            return w;
        }
        match self.tail {
            Tail::Zero => 0.0,
            Tail::Affine { intercept, slope } => intercept + slope * k as f64,
        }
    }

    /// [`weight`](Self::weight) for a signed index; zero below degree 0.
    pub fn weight_at(&self, k: i64) -> f64 {
        if k < 0 || k > u32::MAX as i64 {
            0.0
        } else {
            self.weight(k as u32)
        }
    }

    /// Smallest degree with positive weight.
    pub fn min_degree(&self) -> u32 {
        self.g
    }

    /// Largest degree with positive weight; `None` when unbounded.
    pub fn max_degree(&self) -> Option<u32> {
        match self.tail {
            Tail::Zero => Some(self.g + self.table.len() as u32 - 1),
            Tail::Affine { .. } => None,
        }
    }

    /// First degree whose weight comes from the tail rule.
    pub fn table_end(&self) -> u32 {
        self.g + self.table.len() as u32
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// The same function multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidPreference(format!("scale factor {c} must be positive")));
        }
        let tail = match self.tail {
            Tail::Zero => Tail::Zero,
            Tail::Affine { intercept, slope } => Tail::Affine {
                intercept: c * intercept,
                slope: c * slope,
            },
        };
        Self::with_tail(self.g, self.table.iter().map(|w| c * w).collect(), tail)
    }
}
