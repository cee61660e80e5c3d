use super::{linear_form, nonzero_indices, AlphaBounds, Certifies, CriterionId, CriterionVerdict};
use crate::error::{Error, Result};
use crate::spectrum::{Spectrum, SystemDims};

fn check_len(s: &Spectrum, dims: &SystemDims) -> Result<usize> {
    let d = dims.total_dim();
    if s.len() != d {
        return Err(Error::LengthMismatch { expected: d, actual: s.len() });
    }
    Ok(d)
}

/// Dimension of a tensor-product layout; the symmetric subspace is rejected.
fn product_dim(s: &Spectrum, dims: &SystemDims) -> Result<usize> {
    if dims.is_symmetric() {
        return Err(Error::UnsupportedDims(format!("{dims}: criterion needs a tensor-product space")));
    }
    check_len(s, dims)
}

/// Purity ball `Σλ² ≤ 1/(D − A)`.
///
/// `A = 1` on a bipartite space (certifies AS). On `N` qudits `A` comes from
/// [`multipartite_ball_param`](super::multipartite_ball_param) and the verdict
/// certifies full separability.
pub fn gurvits_barnum(s: &Spectrum, dims: &SystemDims) -> Result<CriterionVerdict> {
    let dim = check_len(s, dims)?;
    let (a, id, certifies) = match *dims {
        SystemDims::Bipartite { .. } => (1.0, CriterionId::GbBall, Certifies::As),
        SystemDims::Multiqudit { d, n } => (super::multipartite_ball_param(d, n).a, CriterionId::MultiBall, Certifies::FullySeparable),
        SystemDims::Symmetric { .. } => return Err(Error::SymmetricDimsUnsupported),
    };
    let slack = 1.0 / (dim as f64 - a) - s.purity();
    Ok(CriterionVerdict::new(id, certifies, slack, (0..dim).collect()))
}

/// `λ_min ≥ 1/(D+2)` and `λ_max ≤ 1/(D−1)`; either branch passing certifies AS.
pub fn reduction_min_max(s: &Spectrum, dims: &SystemDims) -> Result<(CriterionVerdict, CriterionVerdict)> {
    let dim = product_dim(s, dims)?;
    let bounds = AlphaBounds::bipartite();
    let min = CriterionVerdict::new(CriterionId::ReductionMin, Certifies::As, s.min() - bounds.min_threshold(dim), vec![0]);
    let max = CriterionVerdict::new(
        CriterionId::ReductionMax,
        Certifies::As,
        bounds.max_threshold(dim) - s.max(),
        vec![dim - 1],
    );
    Ok((min, max))
}

/// Necessary condition for absolute PPT: the block
/// `[[2λ_0, λ_1 − λ_{D−1}], [λ_1 − λ_{D−1}, 2λ_2]]` must be positive semidefinite.
///
/// The verdict's `certifies` is [`Certifies::NotAp`]: a *failure* proves the
/// spectrum is not absolutely PPT, and hence not absolutely separable.
pub fn ap_necessary_2x2(s: &Spectrum) -> Result<CriterionVerdict> {
    let l = s.values();
    if l.len() < 4 {
        return Err(Error::LengthMismatch { expected: 4, actual: l.len() });
    }
    let off = l[1] - l[l.len() - 1];
    let slack = 4.0 * l[0] * l[2] - off * off;
    Ok(CriterionVerdict::new(CriterionId::Ap2x2, Certifies::NotAp, slack, vec![0, 1, 2, l.len() - 1]))
}

/// Index `⌊(D+1)/3⌋` of the partially weighted eigenvalue in the two-simplex facet.
pub fn facet_pivot(dim: usize) -> usize {
    (dim + 1) / 3
}

/// Integer coefficients of the two-simplex hull facet `Σ c_i λ_i ≥ 1` on
/// ascending eigenvalues: weight 3 on the first `c` entries, `D + 2 − 3c` on
/// entry `c`, zero elsewhere, where `c = ⌊(D+1)/3⌋`.
pub fn two_simplex_coefficients(dim: usize) -> Vec<i64> {
    hierarchy_coefficients(dim, 0).expect("level 0 always exists")
}

/// Coefficients of hierarchy level `kappa`: level 0 is the two-simplex facet,
/// each further level moves the weight of the last used eigenvalue onto the
/// next smaller one. The top level is `(D+2)·λ_0 ≥ 1`.
pub fn hierarchy_coefficients(dim: usize, kappa: usize) -> Result<Vec<i64>> {
    let c = facet_pivot(dim);
    if kappa > c {
        return Err(Error::KappaOutOfRange { kappa, max: c });
    }
    let last = c - kappa;
    let mut coeffs = vec![0i64; dim];
    coeffs[..last].iter_mut().for_each(|x| *x = 3);
    coeffs[last] = dim as i64 + 2 - 3 * last as i64;
    Ok(coeffs)
}

fn facet_verdict(s: &Spectrum, coeffs: &[i64], rhs: f64, id: CriterionId, certifies: Certifies) -> CriterionVerdict {
    let c: Vec<f64> = coeffs.iter().map(|&x| x as f64).collect();
    let slack = linear_form(&c, s.values()) - rhs;
    CriterionVerdict::new(id, certifies, slack, nonzero_indices(&c))
}

/// Facet of the convex hull of the `α = 2` and `α = −1` simplexes on the ordered sector.
pub fn ch_facet(s: &Spectrum, dims: &SystemDims) -> Result<CriterionVerdict> {
    let dim = product_dim(s, dims)?;
    Ok(facet_verdict(s, &two_simplex_coefficients(dim), 1.0, CriterionId::ChFacet, Certifies::As))
}

/// Level `kappa` of the hierarchy of weaker facet conditions using fewer eigenvalues.
pub fn hierarchy(s: &Spectrum, dims: &SystemDims, kappa: usize) -> Result<CriterionVerdict> {
    let dim = product_dim(s, dims)?;
    let coeffs = hierarchy_coefficients(dim, kappa)?;
    Ok(facet_verdict(s, &coeffs, 1.0, CriterionId::Hierarchy, Certifies::As).with_level(kappa))
}

/// `(D−1)·λ_1 + 3·λ_0 ≥ 1`, which still contains all `2D` simplex vertices.
pub fn two_smallest(s: &Spectrum, dims: &SystemDims) -> Result<CriterionVerdict> {
    let dim = product_dim(s, dims)?;
    let mut coeffs = vec![0i64; dim];
    coeffs[0] = 3;
    coeffs[1] = dim as i64 - 1;
    Ok(facet_verdict(s, &coeffs, 1.0, CriterionId::TwoSmallest, Certifies::As))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIXTH: f64 = 1.0 / 6.0;
    const THIRD: f64 = 1.0 / 3.0;

    fn two_by_two() -> SystemDims {
        SystemDims::bipartite(2, 2).unwrap()
    }

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::new(v).unwrap()
    }

    fn werner_boundary() -> Spectrum {
        spec(&[SIXTH, SIXTH, SIXTH, 0.5])
    }

    #[test]
    fn gb_ball_examples() {
        let v = gurvits_barnum(&Spectrum::maximally_mixed(4), &two_by_two()).unwrap();
        assert!(v.passed);
        assert!((v.slack - (THIRD - 0.25)).abs() < 1e-15);

        let v = gurvits_barnum(&werner_boundary(), &two_by_two()).unwrap();
        assert!(v.passed);
        assert_eq!(v.slack, 0.0);

        let v = gurvits_barnum(&spec(&[0.0, 0.0, 0.0, 1.0]), &two_by_two()).unwrap();
        assert!(!v.passed);
        assert!((v.slack - (THIRD - 1.0)).abs() < 1e-15);

        let sym = SystemDims::symmetric(2, 2).unwrap();
        assert_eq!(gurvits_barnum(&Spectrum::maximally_mixed(3), &sym), Err(Error::SymmetricDimsUnsupported));
    }

    #[test]
    fn reduction_examples() {
        let (min, _) = reduction_min_max(&werner_boundary(), &two_by_two()).unwrap();
        assert!(min.passed);
        assert_eq!(min.slack, 0.0);

        let (_, max) = reduction_min_max(&spec(&[0.0, THIRD, THIRD, THIRD]), &two_by_two()).unwrap();
        assert!(max.passed);
        assert_eq!(max.slack, 0.0);

        let (min, max) = reduction_min_max(&spec(&[0.1, 0.2, 0.3, 0.4]), &two_by_two()).unwrap();
        assert!(!min.passed && !max.passed);
    }

    #[test]
    fn ap_block_examples() {
        let v = ap_necessary_2x2(&werner_boundary()).unwrap();
        assert!(v.passed);
        assert_eq!(v.slack, 0.0);

        let sev = 1.0 / 7.0;
        let v = ap_necessary_2x2(&spec(&[sev, sev, sev, 4.0 * sev])).unwrap();
        assert!(!v.passed);
        assert!((v.slack - (4.0 / 49.0 - 9.0 / 49.0)).abs() < 1e-15);

        for d in [4, 6, 9] {
            assert!(ap_necessary_2x2(&Spectrum::maximally_mixed(d)).unwrap().passed);
        }
        assert_eq!(v.inputs_used, vec![0, 1, 2, 3]);
    }

    #[test]
    fn facet_coefficients() {
        assert_eq!(two_simplex_coefficients(3), vec![3, 2, 0]);
        assert_eq!(two_simplex_coefficients(4), vec![3, 3, 0, 0]);
        assert_eq!(two_simplex_coefficients(9), vec![3, 3, 3, 2, 0, 0, 0, 0, 0]);
        assert_eq!(hierarchy_coefficients(4, 1).unwrap(), vec![6, 0, 0, 0]);
        assert_eq!(hierarchy_coefficients(9, 1).unwrap(), vec![3, 3, 5, 0, 0, 0, 0, 0, 0]);
        assert_eq!(hierarchy_coefficients(9, 3).unwrap()[0], 11);
        assert!(matches!(hierarchy_coefficients(9, 4), Err(Error::KappaOutOfRange { kappa: 4, max: 3 })));
        // Every level sums to D + 2.
        for d in 3..40 {
            for k in 0..=facet_pivot(d) {
                assert_eq!(hierarchy_coefficients(d, k).unwrap().iter().sum::<i64>(), d as i64 + 2);
            }
        }
    }

    #[test]
    fn ch_facet_examples() {
        let v = ch_facet(&werner_boundary(), &two_by_two()).unwrap();
        assert_eq!((v.passed, v.slack), (true, 0.0));
        assert_eq!(v.inputs_used, vec![0, 1]);

        let v = ch_facet(&spec(&[0.0, THIRD, THIRD, THIRD]), &two_by_two()).unwrap();
        assert_eq!((v.passed, v.slack), (true, 0.0));

        let mid = spec(&[1.0 / 12.0, 0.25, 0.25, 5.0 / 12.0]);
        let v = ch_facet(&mid, &two_by_two()).unwrap();
        assert_eq!((v.passed, v.slack), (true, 0.0));
    }

    #[test]
    fn hierarchy_examples() {
        let v = hierarchy(&werner_boundary(), &two_by_two(), 1).unwrap();
        assert_eq!((v.passed, v.slack), (true, 0.0));
        assert_eq!(v.level, Some(1));

        let nine = SystemDims::bipartite(3, 3).unwrap();
        assert!(hierarchy(&Spectrum::maximally_mixed(9), &nine, 0).unwrap().passed);

        let mut raw = vec![0.09, 0.12];
        raw.extend(std::iter::repeat_n((1.0 - 0.21) / 7.0, 7));
        let v = hierarchy(&spec(&raw), &nine, 3).unwrap();
        assert!(!v.passed);
        assert!((v.slack - (11.0 * 0.09 - 1.0)).abs() < 1e-14);
        assert_eq!(v.inputs_used, vec![0]);

        assert!(hierarchy(&Spectrum::maximally_mixed(9), &nine, 4).is_err());
    }

    #[test]
    fn two_smallest_examples() {
        let v = two_smallest(&werner_boundary(), &two_by_two()).unwrap();
        assert_eq!((v.passed, v.slack), (true, 0.0));
        let v = two_smallest(&spec(&[0.0, THIRD, THIRD, THIRD]), &two_by_two()).unwrap();
        assert_eq!((v.passed, v.slack), (true, 0.0));
        let v = two_smallest(&spec(&[0.0, 0.25, 0.25, 0.5]), &two_by_two()).unwrap();
        assert!(!v.passed);
        assert!((v.slack + 0.25).abs() < 1e-15);
    }
}
