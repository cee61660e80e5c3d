//! Randomized search for NPT witnesses: Haar-random unitaries applied to a
//! fixed spectrum, looking for a negative partial-transpose eigenvalue.
//!
//! A failed search means "no witness at this budget", never a positivity proof.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{hermitian_eigenvalues, hermitize, partial_transpose_matrix, CMatrix};
use crate::spectrum::{Spectrum, SystemDims};
use crate::symmetric::SymmetricPt;

/// Minimum PT eigenvalue below which a sample counts as a witness.
pub const NEG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsifyOutcome {
    pub samples_run: u64,
    pub best_min_pt_eig: f64,
    /// Seed that regenerates the best unitary via [`haar_unitary`], set when a witness was found.
    pub witness_unitary_seed: Option<u64>,
    pub witness_found: bool,
    /// Sample index of the best unitary.
    pub best_sample: u64,
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sample `index` under `master`; independent of execution order.
pub fn sample_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index)
}

/// Haar-random `dim × dim` unitary: QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary(dim: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re * scale, im * scale)
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { Complex64::from(1.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `U · diag(λ) · U†`.
pub fn rotate_spectrum(s: &[f64], u: &CMatrix) -> CMatrix {
    let mut scaled = u.clone();
    for (j, &l) in s.iter().enumerate() {
        scaled.column_mut(j).scale_mut(l);
    }
    let mut m = scaled * u.adjoint();
    hermitize(&mut m);
    m
}

/// Subsystem sets to transpose: every `S` with `1 ≤ |S| ≤ N/2`, skipping
/// complements already listed.
fn bipartition_masks(n_factors: usize) -> Vec<Vec<usize>> {
    let mut masks = Vec::new();
    for bits in 1u32..(1 << n_factors) {
        let size = bits.count_ones() as usize;
        if size > n_factors / 2 {
            continue;
        }
        // for |S| = N/2 keep only the half containing factor 0
        if 2 * size == n_factors && bits & 1 == 0 {
            continue;
        }
        masks.push((0..n_factors).filter(|f| bits >> f & 1 == 1).collect());
    }
    masks
}

struct ApProblem {
    factors: Vec<usize>,
    masks: Vec<Vec<usize>>,
}

impl ApProblem {
    fn new(dims: &SystemDims, len: usize) -> Result<Self> {
        let factors = dims
            .factors()
            .ok_or_else(|| Error::UnsupportedDims("use the symmetric falsifier for symmetric dims".into()))?;
        if dims.total_dim() != len {
            return Err(Error::LengthMismatch { expected: dims.total_dim(), actual: len });
        }
        let masks = bipartition_masks(factors.len());
        Ok(Self { factors, masks })
    }

    fn min_pt(&self, rho: &CMatrix) -> Result<f64> {
        self.masks.iter().try_fold(f64::INFINITY, |acc, mask| {
            let pt = partial_transpose_matrix(rho, &self.factors, mask);
            Ok(acc.min(hermitian_eigenvalues(&pt)?[0]))
        })
    }
}

fn search(samples: u64, seed: u64, eval: impl Fn(u64) -> Result<f64> + Sync) -> Result<FalsifyOutcome> {
    let (best, index) = (0..samples)
        .into_par_iter()
        .map(|i| eval(sample_seed(seed, i)).map(|v| (v, i)))
        .try_reduce(
            || (f64::INFINITY, u64::MAX),
            |a, b| Ok(if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a }),
        )?;
    let witness_found = best < -NEG_TOL;
    Ok(FalsifyOutcome {
        samples_run: samples,
        best_min_pt_eig: best,
        witness_unitary_seed: witness_found.then(|| sample_seed(seed, index)),
        witness_found,
        best_sample: index,
    })
}

/// Searches `samples` Haar unitaries for one making `U·diag(s)·U†` NPT across
/// some cut (the `A|B` cut for bipartite dims; every cut for multiqudit dims).
pub fn falsify_ap(s: &Spectrum, dims: &SystemDims, samples: u64, seed: u64) -> Result<FalsifyOutcome> {
    let problem = ApProblem::new(dims, s.len())?;
    search(samples, seed, |sd| problem.min_pt(&rotate_spectrum(s.values(), &haar_unitary(s.len(), sd))))
}

/// Minimum PT eigenvalue reached by the unitary regenerated from `unitary_seed`.
pub fn reverify_ap(s: &Spectrum, dims: &SystemDims, unitary_seed: u64) -> Result<f64> {
    let problem = ApProblem::new(dims, s.len())?;
    problem.min_pt(&rotate_spectrum(s.values(), &haar_unitary(s.len(), unitary_seed)))
}

/// Symmetric analogue of [`falsify_ap`]: unitaries act on the symmetric
/// subspace, and every cut `k ≤ N/2` is checked after embedding.
pub fn falsify_sap(s: &Spectrum, d: usize, n: usize, samples: u64, seed: u64) -> Result<FalsifyOutcome> {
    let ctx = sym_context(s, d, n)?;
    search(samples, seed, |sd| sym_min_pt(&ctx, s, sd))
}

/// Minimum PT eigenvalue reached by the symmetric unitary regenerated from `unitary_seed`.
pub fn reverify_sap(s: &Spectrum, d: usize, n: usize, unitary_seed: u64) -> Result<f64> {
    let ctx = sym_context(s, d, n)?;
    sym_min_pt(&ctx, s, unitary_seed)
}

fn sym_context(s: &Spectrum, d: usize, n: usize) -> Result<SymmetricPt> {
    let dims = SystemDims::symmetric(d, n)?;
    if dims.total_dim() != s.len() {
        return Err(Error::LengthMismatch { expected: dims.total_dim(), actual: s.len() });
    }
    SymmetricPt::new(d, n)
}

fn sym_min_pt(ctx: &SymmetricPt, s: &Spectrum, unitary_seed: u64) -> Result<f64> {
    let rho = rotate_spectrum(s.values(), &haar_unitary(s.len(), unitary_seed));
    Ok(ctx
        .min_pt_eigenvalues(&rho)?
        .into_iter()
        .fold(f64::INFINITY, |acc, (_, v)| acc.min(v)))
}

/// Witness unitary as `{"re": [[…]], "im": [[…]]}`, rows first.
pub fn unitary_json(u: &CMatrix) -> serde_json::Value {
    let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
        (0..u.nrows()).map(|i| (0..u.ncols()).map(|j| f(&u[(i, j)])).collect()).collect()
    };
    serde_json::json!({ "re": rows(|z| z.re), "im": rows(|z| z.im) })
}

/// `|Tr U|²`, whose Haar average is 1.
pub fn trace_moment(u: &CMatrix) -> f64 {
    u.trace().norm_sqr()
}
