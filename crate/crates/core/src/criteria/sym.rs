use super::{linear_form, nonzero_indices, AlphaBounds, Certifies, CriterionId, CriterionVerdict, Provenance};
use crate::error::{Error, Result};
use crate::spectrum::{binomial, Spectrum, SystemDims};

/// `binomial(N, ⌊N/2⌋)`: the inverse of the smallest eigenvalue of the
/// partially transposed symmetric projector over the largest cut.
pub fn central_binomial(n: usize) -> u64 {
    binomial(n as u64, (n / 2) as u64)
}

/// Reduction-map range on the symmetric subspace of `N` qudits.
///
/// Generic: `[−1/C, 2/C]` with `C = binomial(N, ⌊N/2⌋)`. Sharper values are
/// known for a few small systems and override the generic range.
pub fn symmetric_alpha_bounds(d: usize, n: usize) -> AlphaBounds {
    use Provenance::*;
    let (alpha_minus, alpha_plus, lower, upper) = match (d, n) {
        (2, 2) => (-0.75, 1.0, Analytic, Analytic),
        (2, 3) => (-2.0 / 3.0, 2.0 / 3.0, NumericalEvidence, Analytic),
        (3, 2) => (-2.0 / 3.0, 1.0, Analytic, Analytic),
        (4, 2) => (-0.625, 1.0, Conjectured, Analytic),
        _ => {
            let c = central_binomial(n) as f64;
            (-1.0 / c, 2.0 / c, Analytic, Analytic)
        }
    };
    AlphaBounds { alpha_minus, alpha_plus, lower, upper }
}

/// Whether the criteria on this symmetric system are proven to certify SAS
/// rather than only SAP.
pub fn certifies_sas(d: usize, n: usize) -> bool {
    d == 2 && (n == 2 || n == 3)
}

fn sym_certifies(d: usize, n: usize) -> Certifies {
    if certifies_sas(d, n) {
        Certifies::Sas
    } else {
        Certifies::Sap
    }
}

fn sym_dim(s: &Spectrum, d: usize, n: usize) -> Result<usize> {
    let dims = SystemDims::symmetric(d, n)?;
    let dim = dims.total_dim();
    if s.len() != dim {
        return Err(Error::LengthMismatch { expected: dim, actual: s.len() });
    }
    Ok(dim)
}

/// `λ_min ≥ 1/(D_S + α_+)` and `λ_max ≤ 1/(D_S − |α_−|)` on the symmetric subspace.
///
/// Thresholds use the symmetric dimension `D_S = binomial(N+d−1, d−1)`.
pub fn symmetric_min_max(s: &Spectrum, d: usize, n: usize) -> Result<(CriterionVerdict, CriterionVerdict)> {
    let dim = sym_dim(s, d, n)?;
    let bounds = symmetric_alpha_bounds(d, n);
    let certifies = sym_certifies(d, n);
    let min = CriterionVerdict::new(CriterionId::SymMin, certifies, s.min() - bounds.min_threshold(dim), vec![0])
        .with_provenance(bounds.upper);
    let max = CriterionVerdict::new(CriterionId::SymMax, certifies, bounds.max_threshold(dim) - s.max(), vec![dim - 1])
        .with_provenance(bounds.lower);
    Ok((min, max))
}

/// Coefficients and right-hand side of the `N`-qubit symmetric hull facet
/// under the generic bounds, on the `N+1` ascending eigenvalues.
pub fn sap_coefficients(n: usize) -> (Vec<i64>, i64) {
    let c = central_binomial(n) as i64;
    let pivot = (n + 1) / 3;
    let mut coeffs = vec![0i64; n + 1];
    coeffs[..pivot].iter_mut().for_each(|x| *x = 3 * c);
    coeffs[pivot] = c * (n as i64 + 1 - 3 * pivot as i64) + 2;
    (coeffs, c)
}

/// Closed-form hull facets for systems with sharper bounds: `(d, N, coefficients, rhs)`.
const TIGHT_FACETS: &[(usize, usize, &[i64], i64)] = &[
    (2, 2, &[7, 5, 0], 3),
    (2, 3, &[6, 6, 2, 0], 3),
    (3, 2, &[5, 5, 4, 0, 0, 0], 2),
    (4, 2, &[13, 13, 13, 13, 3, 0, 0, 0, 0, 0], 5),
];

/// Facet inequality `Σ c_i λ_i ≥ rhs` for a symmetric system, if one is known in closed form.
///
/// With `use_tight` the sharper tables are used where available; otherwise
/// qubit systems fall back to the generic closed form.
pub fn symmetric_facet_coefficients(d: usize, n: usize, use_tight: bool) -> Result<(Vec<i64>, i64, Provenance)> {
    if use_tight {
        if let Some((_, _, coeffs, rhs)) = TIGHT_FACETS.iter().find(|(fd, fn_, _, _)| *fd == d && *fn_ == n) {
            return Ok((coeffs.to_vec(), *rhs, symmetric_alpha_bounds(d, n).provenance()));
        }
    }
    if d == 2 {
        let (coeffs, rhs) = sap_coefficients(n);
        return Ok((coeffs, rhs, Provenance::Analytic));
    }
    Err(Error::UnsupportedDims(format!(
        "no closed-form symmetric facet for d = {d}, N = {n}; use the polytope module"
    )))
}

/// Evaluates the symmetric hull facet for `(d, N)`.
pub fn symmetric_ch_facet(s: &Spectrum, d: usize, n: usize, use_tight: bool) -> Result<CriterionVerdict> {
    sym_dim(s, d, n)?;
    let (coeffs, rhs, provenance) = symmetric_facet_coefficients(d, n, use_tight)?;
    let c: Vec<f64> = coeffs.iter().map(|&x| x as f64).collect();
    let slack = linear_form(&c, s.values()) - rhs as f64;
    Ok(CriterionVerdict::new(CriterionId::SymFacet, sym_certifies(d, n), slack, nonzero_indices(&c)).with_provenance(provenance))
}
