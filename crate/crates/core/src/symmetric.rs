//! Symmetric-subspace machinery: Dicke basis, embedding into `(C^d)^{⊗N}`, and
//! partial transposes of symmetric operators.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{hermitian_eigenvalues, partial_transpose_matrix, CMatrix, DensityMatrix};
use crate::spectrum::binomial;

/// Largest `d^N` for which a basis is built.
pub const MAX_FULL_DIM: usize = 1 << 20;
/// Largest `d^N` for routines that need dense eigensolves in the full space.
pub const MAX_EIGEN_DIM: usize = 1024;

/// Orthonormal basis of the symmetric subspace, one state per occupation vector.
///
/// Column `c` is `(1/√K) Σ |i_1 … i_N⟩` over the `K` strings whose digit counts
/// equal `occupations[c]`. Occupations are ordered lexicographically descending,
/// so for qubits column 0 is `|0…0⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeBasis {
    d: usize,
    n: usize,
    occupations: Vec<Vec<usize>>,
    /// Dicke column of every computational-basis index.
    column_of: Vec<usize>,
    /// `1/√K` per column.
    amplitude: Vec<f64>,
}

fn full_dim(d: usize, n: usize, limit: usize) -> Result<usize> {
    let mut dim: usize = 1;
    for _ in 0..n {
        dim = dim.checked_mul(d).filter(|&v| v <= limit).ok_or(Error::DimensionTooLarge {
            dim: (d as f64).powi(n as i32) as usize,
            limit,
        })?;
    }
    Ok(dim)
}

/// Occupation vectors of `n` particles in `d` modes, descending lexicographically.
fn occupation_vectors(d: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(d: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == d - 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=left).rev() {
            prefix.push(k);
            rec(d, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, n, &mut Vec::new(), &mut out);
    out
}

fn multinomial(occ: &[usize]) -> f64 {
    let mut left = occ.iter().sum::<usize>() as u64;
    let mut total = 1.0;
    for &k in occ {
        total *= binomial(left, k as u64) as f64;
        left -= k as u64;
    }
    total
}

impl DickeBasis {
    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    /// `binomial(N+d−1, d−1)`.
    pub fn sym_dim(&self) -> usize {
        self.occupations.len()
    }

    pub fn full_dim(&self) -> usize {
        self.column_of.len()
    }

    pub fn occupations(&self) -> &[Vec<usize>] {
        &self.occupations
    }

    /// The `d^N × D_S` isometry as a dense matrix.
    pub fn isometry(&self) -> CMatrix {
        let mut v = CMatrix::zeros(self.full_dim(), self.sym_dim());
        for (idx, &c) in self.column_of.iter().enumerate() {
            v[(idx, c)] = Complex64::from(self.amplitude[c]);
        }
        v
    }
}

/// Builds the Dicke basis of `N` qudits of dimension `d`.
pub fn build_dicke_basis(d: usize, n: usize) -> Result<DickeBasis> {
    if d < 2 || n < 1 {
        return Err(Error::InvalidDims(format!("d = {d}, N = {n}")));
    }
    let dim = full_dim(d, n, MAX_FULL_DIM)?;
    let occupations = occupation_vectors(d, n);
    let amplitude = occupations.iter().map(|o| 1.0 / multinomial(o).sqrt()).collect();
    let mut column_of = Vec::with_capacity(dim);
    let mut counts = vec![0usize; d];
    for idx in 0..dim {
        counts.iter_mut().for_each(|c| *c = 0);
        let mut rest = idx;
        for _ in 0..n {
            counts[rest % d] += 1;
            rest /= d;
        }
        let col = occupations.iter().position(|o| *o == counts).expect("every string has an occupation vector");
        column_of.push(col);
    }
    Ok(DickeBasis { d, n, occupations, column_of, amplitude })
}

/// `V ρ_S V†`: the symmetric operator in the full tensor space.
pub fn embed(rho_s: &DensityMatrix, basis: &DickeBasis) -> Result<DensityMatrix> {
    if rho_s.dim() != basis.sym_dim() {
        return Err(Error::DimsMismatch(format!(
            "operator has dimension {}, symmetric subspace has {}",
            rho_s.dim(),
            basis.sym_dim()
        )));
    }
    let m = embed_matrix(rho_s.matrix(), basis);
    let factors = vec![basis.d; basis.n];
    if rho_s.is_normalized() {
        DensityMatrix::new(m, factors)
    } else {
        DensityMatrix::operator(m, factors)
    }
}

fn embed_matrix(m: &CMatrix, basis: &DickeBasis) -> CMatrix {
    let dim = basis.full_dim();
    CMatrix::from_fn(dim, dim, |i, j| {
        let (ci, cj) = (basis.column_of[i], basis.column_of[j]);
        m[(ci, cj)] * (basis.amplitude[ci] * basis.amplitude[cj])
    })
}

/// Isometry onto `Sym(k) ⊗ Sym(N−k)`, the support of the partial transpose
/// over the first `k` qudits of any symmetric operator.
fn split_isometry(d: usize, n: usize, k: usize) -> Result<CMatrix> {
    let left = build_dicke_basis(d, k)?.isometry();
    let right = build_dicke_basis(d, n - k)?.isometry();
    Ok(left.kronecker(&right))
}

/// Context for repeated partial-transpose checks on one `(d, N)`.
#[derive(Debug, Clone)]
pub struct SymmetricPt {
    basis: DickeBasis,
    /// `(k, W_k)` for `k = 1..=⌊N/2⌋`.
    splits: Vec<(usize, CMatrix)>,
}

impl SymmetricPt {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDims(format!("N = {n} must be >= 2")));
        }
        full_dim(d, n, MAX_EIGEN_DIM)?;
        let basis = build_dicke_basis(d, n)?;
        let splits = (1..=n / 2).map(|k| Ok((k, split_isometry(d, n, k)?))).collect::<Result<_>>()?;
        Ok(Self { basis, splits })
    }

    pub fn basis(&self) -> &DickeBasis {
        &self.basis
    }

    /// Smallest eigenvalue of `(VρV†)^{T_k}` on its support, for each `k ≤ ⌊N/2⌋`.
    ///
    /// Outside `Sym(k) ⊗ Sym(N−k)` the partial transpose vanishes, so the
    /// restriction loses no negative eigenvalues.
    pub fn min_pt_eigenvalues(&self, rho_s: &CMatrix) -> Result<Vec<(usize, f64)>> {
        let full = embed_matrix(rho_s, &self.basis);
        let factors = vec![self.basis.d; self.basis.n];
        self.splits
            .iter()
            .map(|(k, w)| {
                let mask: Vec<usize> = (0..*k).collect();
                let pt = partial_transpose_matrix(&full, &factors, &mask);
                let reduced = w.adjoint() * pt * w;
                Ok((*k, hermitian_eigenvalues(&hermitize_copy(reduced))?[0]))
            })
            .collect()
    }
}

fn hermitize_copy(mut m: CMatrix) -> CMatrix {
    crate::maps::hermitize(&mut m);
    m
}

/// `λ_min` of the partial transpose, over the first `k` qudits, of the
/// projector onto the symmetric subspace; expected `1/binomial(N, k)`.
pub fn symmetric_identity_pt_min_eig(d: usize, n: usize, k: usize) -> Result<f64> {
    if k == 0 || k > n / 2 {
        return Err(Error::PreconditionUnmet(format!("k = {k} must satisfy 1 <= k <= N/2 = {}", n / 2)));
    }
    full_dim(d, n, MAX_EIGEN_DIM)?;
    let basis = build_dicke_basis(d, n)?;
    let projector = embed_matrix(&DMatrix::identity(basis.sym_dim(), basis.sym_dim()), &basis);
    let mask: Vec<usize> = (0..k).collect();
    let pt = partial_transpose_matrix(&projector, &vec![d; n], &mask);
    let w = split_isometry(d, n, k)?;
    Ok(hermitian_eigenvalues(&hermitize_copy(w.adjoint() * pt * w))?[0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SapReport {
    /// `(k, λ_min(ρ^{T_k}))` for `k = 1..=⌊N/2⌋`.
    pub min_pt_eig: Vec<(usize, f64)>,
    /// All minima `≥ −1e-10`.
    pub ppt: bool,
}

/// PPT check of a symmetric state across every cut, after embedding.
pub fn sap_check_via_embedding(rho_s: &DensityMatrix, d: usize, n: usize) -> Result<SapReport> {
    let ctx = SymmetricPt::new(d, n)?;
    if rho_s.dim() != ctx.basis.sym_dim() {
        return Err(Error::DimsMismatch(format!(
            "state has dimension {}, symmetric subspace has {}",
            rho_s.dim(),
            ctx.basis.sym_dim()
        )));
    }
    let min_pt_eig = ctx.min_pt_eigenvalues(rho_s.matrix())?;
    let ppt = min_pt_eig.iter().all(|(_, v)| *v >= -1e-10);
    Ok(SapReport { min_pt_eig, ppt })
}
