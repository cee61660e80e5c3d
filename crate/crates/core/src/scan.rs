//! Region scan: classifies random bipartite spectra by which criteria detect
//! them, as (purity, λ_min, class) rows.

use std::fmt;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chull::{builtin_sets, hull_membership, ConvexSetDescriptor};
use crate::criteria::{ch_facet, gurvits_barnum, reduction_min_max};
use crate::error::{Error, Result};
use crate::falsify::sample_seed;
use crate::spectrum::{Spectrum, SystemDims};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionClass {
    BallOnly,
    SimplexOnly,
    Both,
    HullOnly,
    Undetected,
}

impl RegionClass {
    pub const ALL: [RegionClass; 5] = [Self::BallOnly, Self::SimplexOnly, Self::Both, Self::HullOnly, Self::Undetected];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::BallOnly => "ball-only",
            Self::SimplexOnly => "simplex-only",
            Self::Both => "both",
            Self::HullOnly => "hull-only",
            Self::Undetected => "undetected",
        }
    }
}

impl fmt::Display for RegionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub purity: f64,
    pub lambda_min: f64,
    pub class: RegionClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    /// Rows per sample: one per mixing stratum.
    pub grid: usize,
    pub samples: u64,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { grid: 10, samples: 10_000, seed: 0, tol: crate::chull::DEFAULT_TOL, max_iter: crate::chull::DEFAULT_MAX_ITER }
    }
}

/// Largest purity of any point of the hull: the purity of an `α = 2` simplex
/// vertex, `(D+8)/(D+2)²`, or of the ball and `α = −1` vertices, `1/(D−1)`.
pub fn hull_purity_bound(dim: usize) -> f64 {
    let d = dim as f64;
    ((d + 8.0) / ((d + 2.0) * (d + 2.0))).max(1.0 / (d - 1.0))
}

pub struct Classifier {
    dims: SystemDims,
    sets: Vec<Box<dyn ConvexSetDescriptor>>,
    purity_bound: f64,
    tol: f64,
    max_iter: usize,
}

impl Classifier {
    pub fn new(dims: &SystemDims, tol: f64, max_iter: usize) -> Result<Self> {
        if !matches!(dims, SystemDims::Bipartite { .. }) {
            return Err(Error::UnsupportedDims("region scans need bipartite dims".into()));
        }
        Ok(Self {
            dims: *dims,
            sets: builtin_sets(dims)?,
            purity_bound: hull_purity_bound(dims.total_dim()),
            tol,
            max_iter,
        })
    }

    pub fn classify(&self, s: &Spectrum) -> Result<RegionClass> {
        let ball = gurvits_barnum(s, &self.dims)?.passed;
        let (min, max) = reduction_min_max(s, &self.dims)?;
        let simplex = min.passed || max.passed;
        Ok(match (ball, simplex) {
            (true, true) => RegionClass::Both,
            (true, false) => RegionClass::BallOnly,
            (false, true) => RegionClass::SimplexOnly,
            (false, false) => {
                if s.purity() > self.purity_bound {
                    RegionClass::Undetected
                } else if ch_facet(s, &self.dims)?.passed {
                    RegionClass::HullOnly
                } else {
                    match hull_membership(s, &self.sets, self.tol, self.max_iter) {
                        Ok(o) if o.is_feasible() => RegionClass::HullOnly,
                        Ok(_) | Err(Error::IterationBudgetExhausted { .. }) => RegionClass::Undetected,
                        Err(e) => return Err(e),
                    }
                }
            }
        })
    }
}

/// Uniform (Dirichlet(1)) point of the probability simplex.
fn dirichlet_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);
    x
}

/// Each sample draws a uniform spectrum `x` and emits `grid` rows
/// `p·x + (1−p)·1/D`, one per stratum `p ∈ ((j−1)/grid, j/grid]`, with a
/// per-sample jitter inside the stratum.
pub fn region_scan(dims: &SystemDims, cfg: &ScanConfig) -> Result<Vec<ScanRow>> {
    if cfg.grid == 0 {
        return Err(Error::PreconditionUnmet("grid resolution must be >= 1".into()));
    }
    let classifier = Classifier::new(dims, cfg.tol, cfg.max_iter)?;
    let dim = dims.total_dim();
    let per_sample: Vec<Vec<ScanRow>> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(cfg.seed, i));
            let x = dirichlet_point(&mut rng, dim);
            let jitter: f64 = rng.random();
            (1..=cfg.grid)
                .map(|j| {
                    let p = (j as f64 - jitter) / cfg.grid as f64;
                    let raw: Vec<f64> = x.iter().map(|v| p * v + (1.0 - p) / dim as f64).collect();
                    let s = Spectrum::new(&raw)?;
                    Ok(ScanRow { purity: s.purity(), lambda_min: s.min(), class: classifier.classify(&s)? })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_sample.into_iter().flatten().collect())
}

/// CSV with header `purity,lambda_min,class`.
pub fn write_csv<W: Write>(rows: &[ScanRow], mut out: W) -> Result<()> {
    writeln!(out, "purity,lambda_min,class")?;
    for r in rows {
        writeln!(out, "{:.12},{:.12},{}", r.purity, r.lambda_min, r.class)?;
    }
    Ok(())
}

/// Row count per class, in [`RegionClass::ALL`] order.
pub fn class_counts(rows: &[ScanRow]) -> [(RegionClass, usize); 5] {
    RegionClass::ALL.map(|c| (c, rows.iter().filter(|r| r.class == c).count()))
}
