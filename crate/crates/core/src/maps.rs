//! Matrix-level operators: reduction-like maps, partial transpose, partial trace,
//! and Hermitian eigen-decomposition.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectrum::{Spectrum, SystemDims};

pub type CMatrix = DMatrix<Complex64>;

/// Max `|A − A†|` entry accepted as Hermitian, relative to the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-10;

const TRACE_TOL: f64 = 1e-9;

/// A Hermitian operator on a tensor-product space with known local dimensions.
///
/// States have unit trace. Outputs of the trace-scaling reduction maps carry
/// `normalized == false` instead of being silently rescaled.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    factors: Vec<usize>,
    normalized: bool,
}

fn hermitian_deviation(m: &CMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimsMismatch(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    let scale = m.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
    let deviation = hermitian_deviation(m);
    if deviation > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

impl DensityMatrix {
    /// A unit-trace Hermitian matrix on the given tensor factors.
    pub fn new(matrix: CMatrix, factors: Vec<usize>) -> Result<Self> {
        let op = Self::operator(matrix, factors)?;
        let tr = op.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceError { sum: tr });
        }
        Ok(Self { normalized: true, ..op })
    }

    /// A Hermitian matrix with no trace requirement.
    pub fn operator(matrix: CMatrix, factors: Vec<usize>) -> Result<Self> {
        check_hermitian(&matrix)?;
        let dim: usize = factors.iter().product();
        if factors.is_empty() || dim != matrix.nrows() {
            return Err(Error::DimsMismatch(format!("factors {factors:?} do not multiply to {}", matrix.nrows())));
        }
        let normalized = (matrix.trace().re - 1.0).abs() <= TRACE_TOL;
        Ok(Self { matrix, factors, normalized })
    }

    /// Builds a matrix on the factors of `dims` (a single factor for the symmetric subspace).
    pub fn with_dims(matrix: CMatrix, dims: &SystemDims) -> Result<Self> {
        let factors = dims.factors().unwrap_or_else(|| vec![dims.total_dim()]);
        Self::new(matrix, factors)
    }

    pub fn maximally_mixed(factors: Vec<usize>) -> Self {
        let dim: usize = factors.iter().product();
        let matrix = CMatrix::identity(dim, dim) * Complex64::from(1.0 / dim as f64);
        Self { matrix, factors, normalized: true }
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector `psi`.
    pub fn pure(psi: &[Complex64], factors: Vec<usize>) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(psi);
        Self::new(&v * v.adjoint(), factors)
    }

    /// `U · diag(λ) · U†`.
    pub fn from_eigen(eigenvalues: &[f64], unitary: &CMatrix, factors: Vec<usize>) -> Result<Self> {
        let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            eigenvalues.len(),
            eigenvalues.iter().map(|&l| Complex64::from(l)),
        ));
        let mut m = unitary * diag * unitary.adjoint();
        hermitize(&mut m);
        Self::new(m, factors)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// `U ρ U†`, keeping the factor layout.
    pub fn conjugate(&self, unitary: &CMatrix) -> Self {
        let mut m = unitary * &self.matrix * unitary.adjoint();
        hermitize(&mut m);
        Self { matrix: m, factors: self.factors.clone(), normalized: self.normalized }
    }

    fn unnormalized(matrix: CMatrix, factors: Vec<usize>) -> Self {
        Self { matrix, factors, normalized: false }
    }
}

/// Replaces `m` by `(m + m†)/2`.
pub fn hermitize(m: &mut CMatrix) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// `Λ_α(ρ) = Tr(ρ)·1 + α·ρ`.
pub fn reduction_map(rho: &DensityMatrix, alpha: f64) -> DensityMatrix {
    let d = rho.dim();
    let m = CMatrix::identity(d, d) * Complex64::from(rho.trace()) + &rho.matrix * Complex64::from(alpha);
    DensityMatrix::unnormalized(m, rho.factors.clone())
}

/// `Λ_α⁻¹(σ) = (σ − Tr(σ)·1/(D+α))/α`.
pub fn inverse_reduction_map(sigma: &DensityMatrix, alpha: f64) -> Result<DensityMatrix> {
    if alpha == 0.0 {
        return Err(Error::AlphaZero);
    }
    let d = sigma.dim();
    let shift = sigma.trace() / (d as f64 + alpha);
    let m = (&sigma.matrix - CMatrix::identity(d, d) * Complex64::from(shift)) * Complex64::from(1.0 / alpha);
    Ok(DensityMatrix::unnormalized(m, sigma.factors.clone()))
}

/// Eigenvalues of `Λ_α` applied to a state with spectrum `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedSpectrum {
    /// Ascending.
    pub values: Vec<f64>,
    pub normalized: bool,
    /// Some eigenvalue is negative (possible for `α < −1`).
    pub signed: bool,
}

impl MappedSpectrum {
    pub fn into_spectrum(self) -> Result<Spectrum> {
        Spectrum::new(&self.values)
    }
}

/// Action of `Λ_α` on eigenvalues: `λ ↦ 1 + αλ`, divided by `D + α` when normalizing.
pub fn spectrum_level_map(s: &Spectrum, alpha: f64, normalize: bool) -> MappedSpectrum {
    let d = s.len() as f64;
    let scale = if normalize { 1.0 / (d + alpha) } else { 1.0 };
    let mut values: Vec<f64> = s.values().iter().map(|&l| (1.0 + alpha * l) * scale).collect();
    values.sort_by(f64::total_cmp);
    let signed = values[0] < 0.0;
    MappedSpectrum { values, normalized: normalize, signed }
}

fn validate_mask(mask: &[usize], n_factors: usize) -> Result<()> {
    let mut seen = vec![false; n_factors];
    for &f in mask {
        if f >= n_factors {
            return Err(Error::MaskInvalid(format!("factor {f} out of range (have {n_factors})")));
        }
        if std::mem::replace(&mut seen[f], true) {
            return Err(Error::MaskInvalid(format!("factor {f} listed twice")));
        }
    }
    Ok(())
}

/// Row-major strides of a tensor index with the given factors.
fn strides(factors: &[usize]) -> Vec<usize> {
    let mut s = vec![1; factors.len()];
    for f in (0..factors.len().saturating_sub(1)).rev() {
        s[f] = s[f + 1] * factors[f + 1];
    }
    s
}

/// The component of every flat index that lives on the masked factors.
fn masked_offsets(factors: &[usize], mask: &[usize]) -> Vec<usize> {
    let dim: usize = factors.iter().product();
    let st = strides(factors);
    (0..dim)
        .map(|idx| mask.iter().map(|&f| (idx / st[f]) % factors[f] * st[f]).sum())
        .collect()
}

/// Transposes the factors in `mask`: `⟨i_A j_B|ρ^{T_A}|k_A l_B⟩ = ⟨k_A j_B|ρ|i_A l_B⟩`.
///
/// A pure index permutation, so the result is exact.
pub fn partial_transpose(rho: &DensityMatrix, mask: &[usize]) -> Result<DensityMatrix> {
    validate_mask(mask, rho.factors.len())?;
    Ok(DensityMatrix {
        matrix: partial_transpose_matrix(&rho.matrix, &rho.factors, mask),
        factors: rho.factors.clone(),
        normalized: rho.normalized,
    })
}

/// [`partial_transpose`] on a bare matrix; `mask` must already be valid.
pub(crate) fn partial_transpose_matrix(m: &CMatrix, factors: &[usize], mask: &[usize]) -> CMatrix {
    let dim = m.nrows();
    let off = masked_offsets(factors, mask);
    CMatrix::from_fn(dim, dim, |i, j| {
        let src_row = i - off[i] + off[j];
        let src_col = j - off[j] + off[i];
        m[(src_row, src_col)]
    })
}

/// Traces out the factors listed in `traced`.
pub fn partial_trace(rho: &DensityMatrix, traced: &[usize]) -> Result<DensityMatrix> {
    validate_mask(traced, rho.factors.len())?;
    let st = strides(&rho.factors);
    let kept: Vec<usize> = (0..rho.factors.len()).filter(|f| !traced.contains(f)).collect();

    let offsets = |group: &[usize]| -> Vec<usize> {
        let mut out = vec![0usize];
        for &f in group {
            out = out
                .iter()
                .flat_map(|&base| {
                    let step = st[f];
                    (0..rho.factors[f]).map(move |x| base + x * step)
                })
                .collect();
        }
        out
    };
    let kept_off = offsets(&kept);
    let traced_off = offsets(traced);

    let n = kept_off.len();
    let m = CMatrix::from_fn(n, n, |a, b| {
        traced_off
            .iter()
            .map(|&t| rho.matrix[(kept_off[a] + t, kept_off[b] + t)])
            .sum()
    });
    let factors: Vec<usize> = if kept.is_empty() { vec![1] } else { kept.iter().map(|&f| rho.factors[f]).collect() };
    Ok(DensityMatrix { matrix: m, factors, normalized: rho.normalized })
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let mut values: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Ascending eigenvalues with matching eigenvectors as columns.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    check_hermitian(m)?;
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Spectrum of a state.
pub fn hermitian_spectrum(rho: &DensityMatrix) -> Result<Spectrum> {
    Spectrum::new(&hermitian_eigenvalues(&rho.matrix)?)
}

/// Smallest eigenvalue of `ρ^{T_A}`.
pub fn min_pt_eigenvalue(rho: &DensityMatrix, mask: &[usize]) -> Result<f64> {
    let pt = partial_transpose(rho, mask)?;
    Ok(hermitian_eigenvalues(&pt.matrix)?[0])
}
