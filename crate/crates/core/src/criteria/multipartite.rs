use serde::{Deserialize, Serialize};

use super::{AlphaBounds, Certifies, CriterionId, CriterionVerdict};
use crate::error::{Error, Result};
use crate::maps::{hermitian_eigenvalues, partial_trace, DensityMatrix};
use crate::spectrum::Spectrum;

/// Improved constant for the qubit purity ball.
pub const QUBIT_BETA: f64 = 54.0 / 17.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BallSource {
    GenericQudit,
    QubitImproved,
}

/// The `A` in the fully separable purity ball `Tr ρ² ≤ 1/(D − A)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultipartiteBallParam {
    pub a: f64,
    pub source: BallSource,
}

/// `A = 2^{2−N}` in general; `A = β·2^N/(β + 3^N)` for three or more qubits.
///
/// The qubit value is not used at `N = 2`, where it would exceed the tight
/// two-qubit ball `A = 1`.
pub fn multipartite_ball_param(d: usize, n: usize) -> MultipartiteBallParam {
    if d == 2 && n >= 3 {
        let two_n = 2f64.powi(n as i32);
        let three_n = 3f64.powi(n as i32);
        MultipartiteBallParam {
            a: QUBIT_BETA * two_n / (QUBIT_BETA + three_n),
            source: BallSource::QubitImproved,
        }
    } else {
        MultipartiteBallParam {
            a: 2f64.powi(2 - n as i32),
            source: BallSource::GenericQudit,
        }
    }
}

/// Roots `α_± = (A ± √(A(D−1)(D−A)))/(D−A−1)`, `D = d^N`.
///
/// At both roots the normalized image `(1 + α|ψ⟩⟨ψ|)/(D+α)` of a pure state
/// lies exactly on the purity sphere `Tr σ² = 1/(D−A)`.
pub fn multipartite_alpha_bounds(d: usize, n: usize) -> AlphaBounds {
    let a = multipartite_ball_param(d, n).a;
    let dim = (d as f64).powi(n as i32);
    let root = (a * (dim - 1.0) * (dim - a)).sqrt();
    let denom = dim - a - 1.0;
    AlphaBounds::analytic((a - root) / denom, (a + root) / denom)
}

/// Purity of the normalized image of a pure state under `Λ_α` on dimension `dim`.
pub fn mapped_pure_purity(dim: f64, alpha: f64) -> f64 {
    (dim + alpha * (alpha + 2.0)) / ((dim + alpha) * (dim + alpha))
}

fn qudit_dim(d: usize, n: usize) -> Result<usize> {
    if d < 2 || n < 2 {
        return Err(Error::InvalidDims(format!("d = {d}, N = {n}: both must be >= 2")));
    }
    Ok(d.pow(n as u32))
}

/// `λ_min ≥ 1/(d^N + α_+)` and `λ_max ≤ 1/(d^N − |α_−|)`; each certifies full separability.
pub fn multipartite_min_max(s: &Spectrum, d: usize, n: usize) -> Result<(CriterionVerdict, CriterionVerdict)> {
    let dim = qudit_dim(d, n)?;
    if s.len() != dim {
        return Err(Error::LengthMismatch { expected: dim, actual: s.len() });
    }
    let bounds = multipartite_alpha_bounds(d, n);
    let min = CriterionVerdict::new(
        CriterionId::MultiMin,
        Certifies::FullySeparable,
        s.min() - bounds.min_threshold(dim),
        vec![0],
    );
    let max = CriterionVerdict::new(
        CriterionId::MultiMax,
        Certifies::FullySeparable,
        bounds.max_threshold(dim) - s.max(),
        vec![dim - 1],
    );
    Ok((min, max))
}

/// For an `N`-qudit state with `λ_min ≥ 1/(d^N+2)`, checks that tracing out
/// `k` qudits leaves `λ_min ≥ d^k/(d^N+2)`, which implies the reduced state
/// passes its own minimum-eigenvalue condition `λ_min ≥ 1/(d^{N−k}+2)`.
pub fn reduced_state_bound_check(rho: &DensityMatrix, d: usize, n: usize, k: usize) -> Result<bool> {
    const SLOP: f64 = 1e-12;
    let dim = qudit_dim(d, n)?;
    if rho.factors() != vec![d; n].as_slice() {
        return Err(Error::DimsMismatch(format!("expected {n} factors of dimension {d}, got {:?}", rho.factors())));
    }
    if k == 0 || k >= n {
        return Err(Error::PreconditionUnmet(format!("k = {k} must satisfy 1 <= k < N = {n}")));
    }
    let threshold = 1.0 / (dim as f64 + 2.0);
    let lmin = hermitian_eigenvalues(rho.matrix())?[0];
    if lmin < threshold - SLOP {
        return Err(Error::PreconditionUnmet(format!("λ_min = {lmin} is below 1/(d^N+2) = {threshold}")));
    }
    let traced: Vec<usize> = (0..k).collect();
    let reduced = partial_trace(rho, &traced)?;
    let reduced_min = hermitian_eigenvalues(reduced.matrix())?[0];
    Ok(reduced_min >= (d as f64).powi(k as i32) * threshold - SLOP)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_parameters() {
        let p = multipartite_ball_param(3, 3);
        assert_eq!(p.source, BallSource::GenericQudit);
        assert_eq!(p.a, 0.5);

        let p = multipartite_ball_param(2, 3);
        assert_eq!(p.source, BallSource::QubitImproved);
        assert!((p.a - 16.0 / 19.0).abs() < 1e-15);

        let p = multipartite_ball_param(2, 2);
        assert_eq!(p.source, BallSource::GenericQudit);
        assert_eq!(p.a, 1.0);

        for (d, n) in [(2, 3), (2, 6), (3, 2), (5, 4)] {
            let a = multipartite_ball_param(d, n).a;
            let dim = (d as f64).powi(n as i32);
            assert!(0.0 < a && a < dim - 1.0);
        }
    }

    #[test]
    fn alpha_roots() {
        let b = multipartite_alpha_bounds(2, 3);
        assert!((b.alpha_plus - 1.1915).abs() < 1e-3, "{}", b.alpha_plus);
        assert!((b.alpha_minus + 0.918).abs() < 1e-3, "{}", b.alpha_minus);

        let b = multipartite_alpha_bounds(3, 2);
        assert!((b.alpha_plus - 9.0 / 7.0).abs() < 1e-14);
        assert!((b.alpha_minus + 1.0).abs() < 1e-14);
    }

    #[test]
    fn endpoints_saturate_ball() {
        for (d, n) in [(2, 3), (2, 4), (3, 2), (3, 3), (2, 2)] {
            let b = multipartite_alpha_bounds(d, n);
            let dim = (d as f64).powi(n as i32);
            let a = multipartite_ball_param(d, n).a;
            for alpha in [b.alpha_minus, b.alpha_plus] {
                let residual = mapped_pure_purity(dim, alpha) - 1.0 / (dim - a);
                assert!(residual.abs() < 1e-10, "({d},{n}) α={alpha}: {residual}");
            }
        }
    }

    #[test]
    fn min_max_examples() {
        let b = multipartite_alpha_bounds(2, 3);
        let lmin = 0.1089;
        let mut raw = vec![lmin; 7];
        raw.push(1.0 - 7.0 * lmin);
        let s = Spectrum::new(&raw).unwrap();
        let (min, _) = multipartite_min_max(&s, 2, 3).unwrap();
        assert!(min.passed, "threshold {}", b.min_threshold(8));

        let (min, max) = multipartite_min_max(&Spectrum::maximally_mixed(8), 2, 3).unwrap();
        assert!(min.passed && max.passed);

        assert!((b.max_threshold(8) - 0.1412).abs() < 1e-4);
        // 1/7 ≈ 0.1429 sits above the threshold
        let mut raw = vec![0.0];
        raw.extend([1.0 / 7.0; 7]);
        let (_, max) = multipartite_min_max(&Spectrum::new(&raw).unwrap(), 2, 3).unwrap();
        assert!(!max.passed);
        let mut raw = vec![1.0 - 7.0 * 0.141];
        raw.extend([0.141; 7]);
        let (_, max) = multipartite_min_max(&Spectrum::new(&raw).unwrap(), 2, 3).unwrap();
        assert!(max.passed);

        assert!(multipartite_min_max(&Spectrum::maximally_mixed(4), 2, 3).is_err());
    }

    #[test]
    fn reduced_state_examples() {
        let mms = DensityMatrix::maximally_mixed(vec![2, 2, 2]);
        assert!(reduced_state_bound_check(&mms, 2, 3, 1).unwrap());
        assert!(reduced_state_bound_check(&mms, 2, 3, 2).unwrap());

        let mut psi = vec![num_complex::Complex64::new(0.0, 0.0); 8];
        psi[0] = 1.0.into();
        let pure = DensityMatrix::pure(&psi, vec![2, 2, 2]).unwrap();
        assert!(matches!(reduced_state_bound_check(&pure, 2, 3, 1), Err(Error::PreconditionUnmet(_))));
        assert!(matches!(reduced_state_bound_check(&mms, 2, 3, 3), Err(Error::PreconditionUnmet(_))));
    }
}
