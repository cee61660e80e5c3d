//! Convex-hull membership in eigenvalue space.
//!
//! A spectrum `s` lies in the hull of sets `S_1, …, S_k` iff `s = Σ p_j` with
//! each `p_j` in the cone generated by `S_j`. Every built-in set is invariant
//! under unitary conjugation and stable under dephasing in the eigenbasis of
//! the state, so a matrix decomposition exists iff a diagonal one does and the
//! search runs on vectors in `R^D`.
//!
//! The solver minimizes `‖s − Σ p_j‖²` by cyclic block-coordinate descent:
//! each block update is an exact Euclidean projection onto one cone.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::criteria::{multipartite_alpha_bounds, multipartite_ball_param, symmetric_alpha_bounds, AlphaBounds};
use crate::error::{Error, Result};
use crate::maps::{hermitian_spectrum, DensityMatrix};
use crate::spectrum::{Spectrum, SystemDims};

/// Tolerance on membership slack for projected points.
pub const PROJ_TOL: f64 = 1e-10;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 100_000;
const STALL_WINDOW: usize = 50;
const STALL_RATIO: f64 = 1e-9;
/// Relative gap required of a separating hyperplane, absorbing rounding.
const SEPARATION_MARGIN: f64 = 1e-12;

/// A convex set of unit-trace spectra, handled through the cone it generates.
pub trait ConvexSetDescriptor: fmt::Debug + Send + Sync {
    fn id(&self) -> &str;

    fn dim(&self) -> usize;

    /// Signed, homogeneous slack: `≥ 0` iff `x` is in the cone.
    fn membership(&self, x: &[f64]) -> f64;

    /// Nearest point with entries summing to `trace` (`trace ≥ 0`).
    fn project(&self, point: &[f64], trace: f64) -> Vec<f64>;

    /// Nearest point of the cone.
    fn project_cone(&self, point: &[f64]) -> Vec<f64>;

    /// `min w·x` over unit-trace members.
    fn support_min(&self, w: &[f64]) -> f64;

    /// Whether the defining constraint survives dephasing in the eigenbasis.
    /// The vector-space reduction is only valid when it does.
    fn dephasing_stable(&self) -> bool {
        true
    }
}

/// `{x : x_i ≥ m·Σx}`: states with `λ_min ≥ m`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinEigenvalueSimplex {
    dim: usize,
    threshold: f64,
}

/// `{x : x_i ≤ M·Σx}`: states with `λ_max ≤ M`. Nonnegativity follows from
/// the upper bounds when `M ≤ 1/(D−1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxEigenvalueSimplex {
    dim: usize,
    threshold: f64,
}

/// `{x : ‖x‖² ≤ q·(Σx)², Σx ≥ 0}`: states with purity at most `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct PurityBall {
    dim: usize,
    purity: f64,
}

impl MinEigenvalueSimplex {
    /// Requires `0 < threshold < 1/D`.
    pub fn new(dim: usize, threshold: f64) -> Result<Self> {
        if dim < 2 || !(threshold > 0.0 && threshold * (dim as f64) < 1.0) {
            return Err(Error::InvalidDims(format!("min-eigenvalue threshold {threshold} invalid for D = {dim}")));
        }
        Ok(Self { dim, threshold })
    }

    pub fn from_alpha(dim: usize, alpha_plus: f64) -> Result<Self> {
        Self::new(dim, 1.0 / (dim as f64 + alpha_plus))
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

impl MaxEigenvalueSimplex {
    /// Requires `1/D < threshold ≤ 1/(D−1)`.
    pub fn new(dim: usize, threshold: f64) -> Result<Self> {
        let d = dim as f64;
        if dim < 2 || !(threshold * d > 1.0 && threshold * (d - 1.0) <= 1.0 + 1e-15) {
            return Err(Error::InvalidDims(format!("max-eigenvalue threshold {threshold} invalid for D = {dim}")));
        }
        Ok(Self { dim, threshold })
    }

    pub fn from_alpha(dim: usize, alpha_minus: f64) -> Result<Self> {
        Self::new(dim, 1.0 / (dim as f64 - alpha_minus.abs()))
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

impl PurityBall {
    /// Requires `1/D < purity ≤ 1/(D−1)`, so the ball stays inside the simplex.
    pub fn new(dim: usize, purity: f64) -> Result<Self> {
        let d = dim as f64;
        if dim < 2 || !(purity * d > 1.0 && purity * (d - 1.0) <= 1.0 + 1e-15) {
            return Err(Error::InvalidDims(format!("purity bound {purity} invalid for D = {dim}")));
        }
        Ok(Self { dim, purity })
    }

    /// Ball `Tr ρ² ≤ 1/(D − A)`.
    pub fn from_a(dim: usize, a: f64) -> Result<Self> {
        Self::new(dim, 1.0 / (dim as f64 - a))
    }

    pub fn purity(&self) -> f64 {
        self.purity
    }

    /// Cone aperture: `‖z‖ ≤ κ·τ` with `τ` the component along `1/√D`.
    fn kappa(&self) -> f64 {
        (self.dim as f64 * self.purity - 1.0).sqrt()
    }
}

fn sum(x: &[f64]) -> f64 {
    x.iter().sum()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Root of a continuous, nondecreasing, piecewise-linear `h` on `[lo, ∞)` with
/// `h(lo) ≤ 0`, given the abscissae of its kinks.
fn piecewise_linear_root(h: impl Fn(f64) -> f64, mut kinks: Vec<f64>, lo: f64) -> f64 {
    let h_lo = h(lo);
    if h_lo >= 0.0 {
        return lo;
    }
    kinks.retain(|&k| k > lo);
    kinks.sort_by(f64::total_cmp);
    kinks.dedup();
    // first kink with h ≥ 0
    let idx = kinks.partition_point(|&k| h(k) < 0.0);
    let (a, ha) = if idx == 0 { (lo, h_lo) } else { (kinks[idx - 1], h(kinks[idx - 1])) };
    if idx < kinks.len() {
        let b = kinks[idx];
        let hb = h(b);
        if hb == ha {
            return b;
        }
        return a - ha * (b - a) / (hb - ha);
    }
    let slope = h(a + 1.0) - ha;
    a - ha / slope
}

fn project_hyperplane_threshold(point: &[f64], trace: f64, bound: f64, lower: bool) -> Vec<f64> {
    // x_i = clamp_one_side(y_i + ρ, bound) with Σx = trace; g(ρ) is nondecreasing.
    let clamp = |v: f64| if lower { v.max(bound) } else { v.min(bound) };
    let g = |rho: f64| point.iter().map(|&y| clamp(y + rho)).sum::<f64>() - trace;
    let kinks: Vec<f64> = point.iter().map(|&y| bound - y).collect();
    let span = point.iter().fold(0.0_f64, |m, &y| m.max(y.abs())) + trace.abs() + bound.abs();
    let lo = kinks.iter().copied().fold(f64::INFINITY, f64::min).min(0.0) - span - 1.0;
    let rho = piecewise_linear_root(g, kinks, lo);
    point.iter().map(|&y| clamp(y + rho)).collect()
}

impl ConvexSetDescriptor for MinEigenvalueSimplex {
    fn id(&self) -> &str {
        "min_simplex"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn membership(&self, x: &[f64]) -> f64 {
        x.iter().copied().fold(f64::INFINITY, f64::min) - self.threshold * sum(x)
    }

    fn project(&self, point: &[f64], trace: f64) -> Vec<f64> {
        project_hyperplane_threshold(point, trace, self.threshold * trace, true)
    }

    fn project_cone(&self, y: &[f64]) -> Vec<f64> {
        if self.membership(y) >= 0.0 {
            return y.to_vec();
        }
        // x_i = max(y_i − σ, m·T), T = Y + a·σ/m, a = 1 − D·m; h(σ) decreasing.
        let m = self.threshold;
        let total = sum(y);
        let a = 1.0 - self.dim as f64 * m;
        let h = |s: f64| -> f64 {
            let floor = m * total + a * s;
            -(y.iter().map(|&v| (v - s).max(floor)).sum::<f64>() - total - a * s / m)
        };
        let kinks = y.iter().map(|&v| (v - m * total) / (1.0 + a)).collect();
        let s = piecewise_linear_root(h, kinks, 0.0);
        let floor = m * total + a * s;
        y.iter().map(|&v| (v - s).max(floor)).collect()
    }

    fn support_min(&self, w: &[f64]) -> f64 {
        let m = self.threshold;
        let lowest = w.iter().copied().fold(f64::INFINITY, f64::min);
        m * sum(w) + (1.0 - self.dim as f64 * m) * lowest
    }
}

impl ConvexSetDescriptor for MaxEigenvalueSimplex {
    fn id(&self) -> &str {
        "max_simplex"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn membership(&self, x: &[f64]) -> f64 {
        self.threshold * sum(x) - x.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    fn project(&self, point: &[f64], trace: f64) -> Vec<f64> {
        project_hyperplane_threshold(point, trace, self.threshold * trace, false)
    }

    fn project_cone(&self, y: &[f64]) -> Vec<f64> {
        if self.membership(y) >= 0.0 {
            return y.to_vec();
        }
        // x_i = min(y_i + ρ, M·T), T = Y + b·ρ/M, b = D·M − 1; h(ρ) increasing.
        let mm = self.threshold;
        let total = sum(y);
        let b = self.dim as f64 * mm - 1.0;
        let h = |r: f64| -> f64 {
            let cap = mm * total + b * r;
            y.iter().map(|&v| (v + r).min(cap)).sum::<f64>() - total - b * r / mm
        };
        let kinks = y.iter().map(|&v| (mm * total - v) / (1.0 - b)).collect();
        let r = piecewise_linear_root(h, kinks, 0.0);
        let cap = mm * total + b * r;
        y.iter().map(|&v| (v + r).min(cap)).collect()
    }

    fn support_min(&self, w: &[f64]) -> f64 {
        // x = M·1 − u with u ≥ 0, Σu = D·M − 1, all of u on the largest weight
        let mm = self.threshold;
        let highest = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        mm * sum(w) - (self.dim as f64 * mm - 1.0) * highest
    }
}

impl ConvexSetDescriptor for PurityBall {
    fn id(&self) -> &str {
        "gb_ball"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn membership(&self, x: &[f64]) -> f64 {
        self.purity.sqrt() * sum(x) - norm(x)
    }

    fn project(&self, point: &[f64], trace: f64) -> Vec<f64> {
        let d = self.dim as f64;
        let mean = sum(point) / d;
        let centre = trace / d;
        let mut z: Vec<f64> = point.iter().map(|&y| y - mean).collect();
        let radius = trace.max(0.0) * (self.purity - 1.0 / d).sqrt();
        let len = norm(&z);
        if len > radius {
            let scale = if len > 0.0 { radius / len } else { 0.0 };
            z.iter_mut().for_each(|v| *v *= scale);
        }
        z.iter().map(|v| centre + v).collect()
    }

    fn project_cone(&self, y: &[f64]) -> Vec<f64> {
        let d = self.dim as f64;
        let tau = sum(y) / d.sqrt();
        let mean = sum(y) / d;
        let z: Vec<f64> = y.iter().map(|&v| v - mean).collect();
        let len = norm(&z);
        let kappa = self.kappa();
        if len <= kappa * tau {
            return y.to_vec();
        }
        if kappa * len <= -tau {
            return vec![0.0; y.len()];
        }
        let tau_new = (tau + kappa * len) / (1.0 + kappa * kappa);
        let scale = kappa * tau_new / len;
        let centre = tau_new / d.sqrt();
        z.iter().map(|v| centre + scale * v).collect()
    }

    fn support_min(&self, w: &[f64]) -> f64 {
        let d = self.dim as f64;
        let mean = sum(w) / d;
        let spread = w.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>().sqrt();
        mean - (self.purity - 1.0 / d).sqrt() * spread
    }
}

/// One summand of a decomposition: an unnormalized spectrum in the cone of `set`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificatePart {
    pub set: String,
    /// Weight in the convex combination (the trace of `vector`).
    pub trace: f64,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionCertificate {
    pub feasible: bool,
    pub residual: f64,
    #[serde(default)]
    pub iterations: usize,
    pub parts: Vec<CertificatePart>,
}

impl DecompositionCertificate {
    /// Recombines the parts and re-checks every membership.
    pub fn verify(&self, s: &Spectrum, sets: &[Box<dyn ConvexSetDescriptor>], tol: f64) -> bool {
        if !self.feasible {
            return false;
        }
        let mut total = vec![0.0; s.len()];
        for part in &self.parts {
            let Some(set) = sets.iter().find(|d| d.id() == part.set) else {
                return false;
            };
            if part.vector.len() != s.len() || set.membership(&part.vector) < -PROJ_TOL {
                return false;
            }
            total.iter_mut().zip(&part.vector).for_each(|(t, v)| *t += v);
        }
        let diff: Vec<f64> = s.values().iter().zip(&total).map(|(a, b)| a - b).collect();
        norm(&diff) <= tol
    }
}

/// Why no decomposition was returned. Not evidence of entanglement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfeasibleReport {
    pub best_residual: f64,
    pub iterations: usize,
    /// A hyperplane strictly separating the spectrum from every set was found;
    /// otherwise the search stopped because the residual stalled.
    #[serde(default)]
    pub separated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HullOutcome {
    Feasible(DecompositionCertificate),
    Infeasible(InfeasibleReport),
}

impl HullOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible(_))
    }

    /// Certificate view; infeasible outcomes carry no parts.
    pub fn certificate(&self) -> DecompositionCertificate {
        match self {
            Self::Feasible(c) => c.clone(),
            Self::Infeasible(r) => DecompositionCertificate {
                feasible: false,
                residual: r.best_residual,
                iterations: r.iterations,
                parts: Vec::new(),
            },
        }
    }
}

fn single_set_certificate(s: &Spectrum, sets: &[Box<dyn ConvexSetDescriptor>], k: usize) -> DecompositionCertificate {
    let parts = sets
        .iter()
        .enumerate()
        .map(|(j, set)| CertificatePart {
            set: set.id().to_string(),
            trace: if j == k { 1.0 } else { 0.0 },
            vector: if j == k { s.values().to_vec() } else { vec![0.0; s.len()] },
        })
        .collect();
    DecompositionCertificate { feasible: true, residual: 0.0, iterations: 0, parts }
}

/// Whether `w = Σp − s` strictly separates `s` from every set, which proves
/// `s` lies outside the hull.
fn separates(target: &[f64], total: &[f64], sets: &[Box<dyn ConvexSetDescriptor>]) -> bool {
    let w: Vec<f64> = total.iter().zip(target).map(|(p, s)| p - s).collect();
    let at_target: f64 = w.iter().zip(target).map(|(a, b)| a * b).sum();
    let scale = norm(&w);
    let bound = sets.iter().map(|set| set.support_min(&w)).fold(f64::INFINITY, f64::min);
    bound - at_target > SEPARATION_MARGIN * scale
}

/// Searches for `s = Σ_j t_j·σ_j` with `σ_j ∈ sets[j]`, `t_j ≥ 0`.
pub fn hull_membership(
    s: &Spectrum,
    sets: &[Box<dyn ConvexSetDescriptor>],
    tol: f64,
    max_iter: usize,
) -> Result<HullOutcome> {
    if sets.is_empty() {
        return Err(Error::PreconditionUnmet("no convex sets given".into()));
    }
    if tol.is_nan() || tol < 1e-10 {
        return Err(Error::PreconditionUnmet(format!("tolerance {tol} is below 1e-10")));
    }
    for set in sets {
        if set.dim() != s.len() {
            return Err(Error::LengthMismatch { expected: set.dim(), actual: s.len() });
        }
        if !set.dephasing_stable() {
            return Err(Error::UnstableDescriptor(set.id().to_string()));
        }
    }
    let target = s.values();
    if let Some(k) = sets.iter().position(|set| set.membership(target) >= 0.0) {
        return Ok(HullOutcome::Feasible(single_set_certificate(s, sets, k)));
    }

    let d = target.len();
    let mut parts = vec![vec![0.0; d]; sets.len()];
    let mut total = vec![0.0; d];
    let mut best = f64::INFINITY;
    let mut checkpoint = f64::INFINITY;
    let mut y = vec![0.0; d];
    for iter in 1..=max_iter {
        for (set, part) in sets.iter().zip(parts.iter_mut()) {
            for i in 0..d {
                y[i] = target[i] - (total[i] - part[i]);
            }
            let next = set.project_cone(&y);
            for i in 0..d {
                total[i] += next[i] - part[i];
            }
            *part = next;
        }
        total.iter_mut().enumerate().for_each(|(i, t)| *t = parts.iter().map(|p| p[i]).sum());
        let residual = target.iter().zip(&total).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        best = best.min(residual);
        if residual <= tol {
            let parts = sets
                .iter()
                .zip(parts)
                .map(|(set, vector)| CertificatePart { set: set.id().to_string(), trace: sum(&vector), vector })
                .collect();
            return Ok(HullOutcome::Feasible(DecompositionCertificate { feasible: true, residual, iterations: iter, parts }));
        }
        if separates(target, &total, sets) {
            return Ok(HullOutcome::Infeasible(InfeasibleReport { best_residual: best, iterations: iter, separated: true }));
        }
        if iter % STALL_WINDOW == 0 {
            if checkpoint.is_finite() && checkpoint - residual <= STALL_RATIO * checkpoint {
                return Ok(HullOutcome::Infeasible(InfeasibleReport { best_residual: best, iterations: iter, separated: false }));
            }
            checkpoint = residual;
        }
    }
    Err(Error::IterationBudgetExhausted { residual: best, iterations: max_iter })
}

/// Descriptors for the built-in criteria on `dims`: min- and max-eigenvalue
/// simplexes, plus the purity ball where one is known (not on the symmetric subspace).
pub fn builtin_sets(dims: &SystemDims) -> Result<Vec<Box<dyn ConvexSetDescriptor>>> {
    let dim = dims.total_dim();
    let simplexes = |b: AlphaBounds| -> Result<Vec<Box<dyn ConvexSetDescriptor>>> {
        Ok(vec![
            Box::new(MinEigenvalueSimplex::from_alpha(dim, b.alpha_plus)?),
            Box::new(MaxEigenvalueSimplex::from_alpha(dim, b.alpha_minus)?),
        ])
    };
    match *dims {
        SystemDims::Bipartite { .. } => {
            let mut sets = simplexes(AlphaBounds::bipartite())?;
            sets.push(Box::new(PurityBall::from_a(dim, 1.0)?));
            Ok(sets)
        }
        SystemDims::Multiqudit { d, n } => {
            let mut sets = simplexes(multipartite_alpha_bounds(d, n))?;
            sets.push(Box::new(PurityBall::from_a(dim, multipartite_ball_param(d, n).a)?));
            Ok(sets)
        }
        SystemDims::Symmetric { d, n } => simplexes(symmetric_alpha_bounds(d, n)),
    }
}

/// Reduces a state to its spectrum, the only input the hull search needs.
pub fn diagonal_reduction(rho: &DensityMatrix) -> Result<Spectrum> {
    hermitian_spectrum(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::new(v).unwrap()
    }

    fn two_simplexes(dim: usize) -> Vec<Box<dyn ConvexSetDescriptor>> {
        vec![
            Box::new(MinEigenvalueSimplex::from_alpha(dim, 2.0).unwrap()),
            Box::new(MaxEigenvalueSimplex::from_alpha(dim, -1.0).unwrap()),
        ]
    }

    #[test]
    fn already_in_first_set() {
        let s = spec(&[1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 0.5]);
        let sets: Vec<Box<dyn ConvexSetDescriptor>> = vec![
            Box::new(MinEigenvalueSimplex::from_alpha(4, 2.0).unwrap()),
            Box::new(PurityBall::from_a(4, 1.0).unwrap()),
        ];
        let HullOutcome::Feasible(c) = hull_membership(&s, &sets, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap() else {
            panic!("expected feasible");
        };
        assert_eq!(c.parts[0].trace, 1.0);
        assert_eq!(c.parts[1].trace, 0.0);
        assert!(c.verify(&s, &sets, 2.0 * DEFAULT_TOL));
    }

    #[test]
    fn midpoint_of_two_vertices() {
        let s = spec(&[1.0 / 12.0, 0.25, 0.25, 5.0 / 12.0]);
        let sets = two_simplexes(4);
        assert!(sets.iter().all(|set| set.membership(s.values()) < 0.0));
        let out = hull_membership(&s, &sets, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let HullOutcome::Feasible(c) = out else { panic!("{out:?}") };
        assert!(c.verify(&s, &sets, 2.0 * DEFAULT_TOL));
        let weights: f64 = c.parts.iter().map(|p| p.trace).sum();
        assert_abs_diff_eq!(weights, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn ball_example_inside_ball() {
        let s = spec(&[0.05, 0.28, 0.32, 0.35]);
        assert!((s.purity() - 0.3058).abs() < 1e-12);
        let sets: Vec<Box<dyn ConvexSetDescriptor>> = vec![
            Box::new(MinEigenvalueSimplex::from_alpha(4, 2.0).unwrap()),
            Box::new(PurityBall::from_a(4, 1.0).unwrap()),
        ];
        assert!(sets[0].membership(s.values()) < 0.0);
        let out = hull_membership(&s, &sets, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let HullOutcome::Feasible(c) = out else { panic!() };
        assert!(c.verify(&s, &sets, 2.0 * DEFAULT_TOL));
    }

    #[test]
    fn pure_state_is_infeasible() {
        let s = spec(&[0.0, 0.0, 0.0, 1.0]);
        let sets = builtin_sets(&SystemDims::bipartite(2, 2).unwrap()).unwrap();
        let out = hull_membership(&s, &sets, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let HullOutcome::Infeasible(r) = out else { panic!() };
        assert!(r.best_residual > 0.1);
    }

    #[test]
    fn builtin_thresholds() {
        let sets = builtin_sets(&SystemDims::bipartite(2, 2).unwrap()).unwrap();
        let ids: Vec<&str> = sets.iter().map(|s| s.id()).collect();
        assert_eq!(ids, ["min_simplex", "max_simplex", "gb_ball"]);
        let check = |sets: &[Box<dyn ConvexSetDescriptor>], dim: usize, lmin: f64, lmax: f64| {
            let mut at_min = vec![lmin; dim];
            at_min[dim - 1] = 1.0 - (dim - 1) as f64 * lmin;
            assert_abs_diff_eq!(sets[0].membership(&at_min), 0.0, epsilon = 1e-15);
            let mut at_max = vec![lmax; dim];
            at_max[0] = 1.0 - (dim - 1) as f64 * lmax;
            assert_abs_diff_eq!(sets[1].membership(&at_max), 0.0, epsilon = 1e-15);
        };
        check(&sets, 4, 1.0 / 6.0, 1.0 / 3.0);
        let ball = PurityBall::from_a(4, 1.0).unwrap();
        assert_abs_diff_eq!(ball.purity(), 1.0 / 3.0, epsilon = 1e-15);

        let sets = builtin_sets(&SystemDims::bipartite(3, 3).unwrap()).unwrap();
        check(&sets, 9, 1.0 / 11.0, 1.0 / 8.0);
        assert_abs_diff_eq!(PurityBall::from_a(9, 1.0).unwrap().purity(), 1.0 / 8.0, epsilon = 1e-15);

        let sets = builtin_sets(&SystemDims::symmetric(2, 2).unwrap()).unwrap();
        assert_eq!(sets.len(), 2);
        check(&sets, 3, 0.25, 4.0 / 9.0);
    }

    #[test]
    fn cone_projections_land_in_cone() {
        let sets: Vec<Box<dyn ConvexSetDescriptor>> = vec![
            Box::new(MinEigenvalueSimplex::from_alpha(5, 2.0).unwrap()),
            Box::new(MaxEigenvalueSimplex::from_alpha(5, -1.0).unwrap()),
            Box::new(PurityBall::from_a(5, 1.0).unwrap()),
        ];
        let points = [
            vec![0.3, -0.2, 0.5, 0.1, 0.9],
            vec![-1.0, -2.0, -0.5, -0.1, -0.3],
            vec![1.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.2; 5],
            vec![-0.1, 0.1, -0.1, 0.1, 0.0],
        ];
        for set in &sets {
            for p in &points {
                let x = set.project_cone(p);
                assert!(set.membership(&x) >= -PROJ_TOL, "{} {p:?} → {x:?}", set.id());
                let again = set.project_cone(&x);
                for (a, b) in again.iter().zip(&x) {
                    assert_abs_diff_eq!(a, b, epsilon = 1e-12);
                }
                // obtuse-angle test against a sample of cone points
                for q in &points {
                    let c = set.project_cone(q);
                    let dot: f64 = (0..5).map(|i| (p[i] - x[i]) * (c[i] - x[i])).sum();
                    assert!(dot <= 1e-12, "{} not a projection: {dot}", set.id());
                }
            }
        }
    }

    #[test]
    fn slice_projections() {
        let sets: Vec<Box<dyn ConvexSetDescriptor>> = vec![
            Box::new(MinEigenvalueSimplex::from_alpha(4, 2.0).unwrap()),
            Box::new(MaxEigenvalueSimplex::from_alpha(4, -1.0).unwrap()),
            Box::new(PurityBall::from_a(4, 1.0).unwrap()),
        ];
        for set in &sets {
            for t in [0.0, 0.3, 1.0] {
                let x = set.project(&[0.9, -0.4, 0.2, 0.1], t);
                assert_abs_diff_eq!(sum(&x), t, epsilon = 1e-12);
                assert!(set.membership(&x) >= -PROJ_TOL);
                let again = set.project(&x, t);
                for (a, b) in again.iter().zip(&x) {
                    assert_abs_diff_eq!(a, b, epsilon = 1e-12);
                }
            }
        }
    }

    /// Vertices of `{x ≥ m}` and `{x ≤ M}` on the trace-one slice.
    fn simplex_vertices_f64(dim: usize, value: f64) -> Vec<Vec<f64>> {
        (0..dim)
            .map(|k| {
                let mut v = vec![value; dim];
                v[k] = 1.0 - (dim as f64 - 1.0) * value;
                v
            })
            .collect()
    }

    #[test]
    fn support_functions_match_vertices() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dim in [3, 4, 9] {
            let min = MinEigenvalueSimplex::from_alpha(dim, 2.0).unwrap();
            let max = MaxEigenvalueSimplex::from_alpha(dim, -1.0).unwrap();
            let ball = PurityBall::from_a(dim, 1.0).unwrap();
            for _ in 0..50 {
                let w: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                let dot = |x: &[f64]| x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
                let best = |vs: Vec<Vec<f64>>| vs.iter().map(|v| dot(v)).fold(f64::INFINITY, f64::min);
                assert_abs_diff_eq!(min.support_min(&w), best(simplex_vertices_f64(dim, min.threshold())), epsilon = 1e-12);
                assert_abs_diff_eq!(max.support_min(&w), best(simplex_vertices_f64(dim, max.threshold())), epsilon = 1e-12);
                // the ball minimizer sits at the centre minus radius along the centred w
                let far: Vec<f64> = w.iter().map(|v| 1.0 / dim as f64 - 10.0 * v).collect();
                let x = ball.project(&far, 1.0);
                assert_abs_diff_eq!(ball.support_min(&w), dot(&x), epsilon = 1e-12);
                for _ in 0..5 {
                    let y: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                    assert!(dot(&ball.project(&y, 1.0)) >= ball.support_min(&w) - 1e-12);
                }
            }
        }
    }

    #[test]
    fn far_points_are_separated() {
        let s = Spectrum::new(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        let out = hull_membership(&s, &two_simplexes(4), 1e-9, 1000).unwrap();
        let HullOutcome::Infeasible(r) = out else { panic!("pure state in the hull") };
        assert!(r.separated);
    }

    #[derive(Debug)]
    struct Unstable;

    impl ConvexSetDescriptor for Unstable {
        fn id(&self) -> &str {
            "unstable"
        }
        fn dim(&self) -> usize {
            4
        }
        fn membership(&self, _: &[f64]) -> f64 {
            0.0
        }
        fn project(&self, p: &[f64], _: f64) -> Vec<f64> {
            p.to_vec()
        }
        fn project_cone(&self, p: &[f64]) -> Vec<f64> {
            p.to_vec()
        }
        fn support_min(&self, _: &[f64]) -> f64 {
            0.0
        }
        fn dephasing_stable(&self) -> bool {
            false
        }
    }

    #[test]
    fn rejects_bad_input() {
        let s = Spectrum::maximally_mixed(4);
        let sets: Vec<Box<dyn ConvexSetDescriptor>> = vec![Box::new(Unstable)];
        assert!(matches!(hull_membership(&s, &sets, 1e-9, 10), Err(Error::UnstableDescriptor(_))));
        let sets = two_simplexes(6);
        assert!(matches!(hull_membership(&s, &sets, 1e-9, 10), Err(Error::LengthMismatch { .. })));
        let sets = two_simplexes(4);
        assert!(matches!(hull_membership(&s, &sets, 1e-12, 10), Err(Error::PreconditionUnmet(_))));
    }

    #[test]
    fn diagonal_reduction_of_diagonal_state() {
        let rho = DensityMatrix::from_eigen(&[0.4, 0.1, 0.2, 0.3], &crate::maps::CMatrix::identity(4, 4), vec![2, 2]).unwrap();
        let s = diagonal_reduction(&rho).unwrap();
        for (a, b) in s.values().iter().zip([0.1, 0.2, 0.3, 0.4]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }
}
