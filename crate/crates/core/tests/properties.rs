use absep::chull::{
    builtin_sets, hull_membership, ConvexSetDescriptor, MaxEigenvalueSimplex, MinEigenvalueSimplex, PurityBall,
};
use absep::criteria::{ch_facet, symmetric_ch_facet, symmetric_min_max, Certifies};
use absep::falsify::{falsify_ap, haar_unitary, reverify_ap};
use absep::maps::{hermitian_eigenvalues, partial_trace, partial_transpose, DensityMatrix};
use absep::report::{check_spectrum, Aggregate, CertificateReport, CheckOptions};
use absep::spectrum::{majorizes_vec, MajorizationRelation};
use absep::symmetric::{build_dicke_basis, embed};
use absep::{Spectrum, SystemDims};
use proptest::prelude::*;

/// Unit-trace vectors of length `dim` with entries drawn from `[0, 1)`.
fn raw_spectrum(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, dim).prop_filter_map("all zero", |v| {
        let total: f64 = v.iter().sum();
        (total > 1e-3).then(|| v.iter().map(|x| x / total).collect())
    })
}

/// Spectra pulled toward the maximally mixed state by a random amount.
fn mixed_spectrum(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    (raw_spectrum(dim), 0.0f64..1.0)
        .prop_map(move |(v, p)| v.iter().map(|x| p * x + (1.0 - p) / dim as f64).collect())
}

fn bipartite_case() -> impl Strategy<Value = (SystemDims, Vec<f64>)> {
    prop::sample::select(vec![(2, 2), (2, 3), (3, 3), (2, 4)])
        .prop_flat_map(|(n, m)| (Just(SystemDims::bipartite(n, m).unwrap()), mixed_spectrum(n * m)))
}

fn sets_for(dim: usize) -> Vec<Box<dyn ConvexSetDescriptor>> {
    vec![
        Box::new(MinEigenvalueSimplex::from_alpha(dim, 2.0).unwrap()),
        Box::new(MaxEigenvalueSimplex::from_alpha(dim, -1.0).unwrap()),
        Box::new(PurityBall::from_a(dim, 1.0).unwrap()),
    ]
}

proptest! {
    #[test]
    fn spectra_are_sorted_and_permutation_invariant(raw in raw_spectrum(6), seed in any::<u64>()) {
        let s = Spectrum::new(&raw).unwrap();
        prop_assert!(s.values().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!((s.values().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let mut shuffled = raw.clone();
        let k = (seed % 6) as usize;
        shuffled.rotate_left(k);
        prop_assert_eq!(Spectrum::new(&shuffled).unwrap(), s);
    }

    #[test]
    fn maximally_mixed_is_majorized_by_everything(raw in raw_spectrum(5)) {
        let rel = majorizes_vec(&[0.2; 5], &raw, 1e-12).unwrap();
        prop_assert!(matches!(rel, MajorizationRelation::XMajorizedByY | MajorizationRelation::Equal));
    }

    #[test]
    fn projections_land_in_their_sets(point in prop::collection::vec(-1.0f64..1.0, 6), trace in 0.0f64..2.0) {
        for set in sets_for(6) {
            let x = set.project(&point, trace);
            prop_assert!(set.membership(&x) >= -1e-10, "{} slack {}", set.id(), set.membership(&x));
            prop_assert!((x.iter().sum::<f64>() - trace).abs() < 1e-9);
            let again = set.project(&x, trace);
            prop_assert!(x.iter().zip(&again).all(|(a, b)| (a - b).abs() < 1e-9), "{} not idempotent", set.id());
            let cone = set.project_cone(&point);
            prop_assert!(set.membership(&cone) >= -1e-10);
        }
    }

    #[test]
    fn certificates_reverify((dims, raw) in bipartite_case()) {
        let s = Spectrum::new(&raw).unwrap();
        let sets = builtin_sets(&dims).unwrap();
        if let Ok(outcome) = hull_membership(&s, &sets, 1e-9, 100_000) {
            let cert = outcome.certificate();
            if cert.feasible {
                prop_assert!(cert.verify(&s, &sets, 2e-9));
                let total: f64 = cert.parts.iter().map(|p| p.trace).sum();
                prop_assert!((total - 1.0).abs() < 1e-8);
                prop_assert!(cert.parts.iter().all(|p| p.trace >= -1e-12));
            }
        }
    }

    #[test]
    fn adding_a_set_keeps_feasibility((dims, raw) in bipartite_case()) {
        let s = Spectrum::new(&raw).unwrap();
        let dim = dims.total_dim();
        let all = sets_for(dim);
        let two: Vec<Box<dyn ConvexSetDescriptor>> = all.iter().take(2).map(|d| -> Box<dyn ConvexSetDescriptor> {
            match d.id() {
                "min_simplex" => Box::new(MinEigenvalueSimplex::from_alpha(dim, 2.0).unwrap()),
                _ => Box::new(MaxEigenvalueSimplex::from_alpha(dim, -1.0).unwrap()),
            }
        }).collect();
        let small = hull_membership(&s, &two, 1e-9, 100_000).map(|o| o.is_feasible());
        let large = hull_membership(&s, &all, 1e-9, 100_000).map(|o| o.is_feasible());
        if let (Ok(true), Ok(large)) = (small, large) {
            prop_assert!(large);
        }
    }

    #[test]
    fn hull_points_pass_the_facet(weights in prop::collection::vec(0.0f64..1.0, 8)) {
        // convex combinations of permuted simplex vertices for D = 4
        let total: f64 = weights.iter().sum();
        prop_assume!(total > 1e-6);
        let mut point = [0.0; 4];
        for (k, w) in weights.iter().enumerate() {
            let (alpha, pos) = if k < 4 { (2.0, k) } else { (-1.0, k - 4) };
            for (i, p) in point.iter_mut().enumerate() {
                let v = if i == pos { (1.0 + alpha) / (4.0 + alpha) } else { 1.0 / (4.0 + alpha) };
                *p += w / total * v;
            }
        }
        let s = Spectrum::new(&point).unwrap();
        prop_assert!(ch_facet(&s, &SystemDims::bipartite(2, 2).unwrap()).unwrap().slack >= -1e-12);
    }

    #[test]
    fn report_json_round_trips((dims, raw) in bipartite_case()) {
        let s = Spectrum::new(&raw).unwrap();
        let report = check_spectrum(&s, &dims, &CheckOptions::default()).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: CertificateReport = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(&back, &report);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), json);
        let last = report.to_text().lines().last().unwrap().to_string();
        prop_assert_eq!(last, format!("aggregate: {}", report.aggregate));
    }

    #[test]
    fn symmetric_verdicts_are_consistent(raw in mixed_spectrum(4)) {
        let s = Spectrum::new(&raw).unwrap();
        let (min, max) = symmetric_min_max(&s, 2, 3).unwrap();
        let facet = symmetric_ch_facet(&s, 2, 3, true).unwrap();
        prop_assert!(!(min.passed || max.passed) || facet.passed);
        prop_assert_eq!(facet.certifies, Certifies::Sas);
    }

    #[test]
    fn partial_operations_preserve_structure(raw in raw_spectrum(6), seed in any::<u64>()) {
        let rho = DensityMatrix::from_eigen(&raw, &haar_unitary(6, seed), vec![2, 3]).unwrap();
        let pt = partial_transpose(&rho, &[1]).unwrap();
        prop_assert!((pt.trace() - 1.0).abs() < 1e-12);
        let back = partial_transpose(&pt, &[1]).unwrap();
        prop_assert!((back.matrix() - rho.matrix()).iter().all(|z| z.norm() < 1e-14));
        let reduced = partial_trace(&rho, &[0]).unwrap();
        prop_assert!((reduced.trace() - 1.0).abs() < 1e-12);
        prop_assert!(hermitian_eigenvalues(reduced.matrix()).unwrap()[0] >= -1e-12);
    }

    #[test]
    fn embedding_keeps_the_spectrum(raw in raw_spectrum(4), seed in any::<u64>()) {
        let basis = build_dicke_basis(2, 3).unwrap();
        let rho = DensityMatrix::from_eigen(&raw, &haar_unitary(4, seed), vec![4]).unwrap();
        let full = embed(&rho, &basis).unwrap();
        let eig = hermitian_eigenvalues(full.matrix()).unwrap();
        let s = Spectrum::new(&raw).unwrap();
        prop_assert!(eig[..4].iter().all(|v| v.abs() < 1e-12));
        prop_assert!(eig[4..].iter().zip(s.values()).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn falsifier_is_reproducible_and_sound(raw in raw_spectrum(4), seed in any::<u64>()) {
        let dims = SystemDims::bipartite(2, 2).unwrap();
        let s = Spectrum::new(&raw).unwrap();
        let a = falsify_ap(&s, &dims, 200, seed).unwrap();
        prop_assert_eq!(&a, &falsify_ap(&s, &dims, 200, seed).unwrap());
        if let Some(w) = a.witness_unitary_seed {
            prop_assert!(a.witness_found);
            prop_assert!(reverify_ap(&s, &dims, w).unwrap() < -1e-10);
        }
    }

    #[test]
    fn certified_spectra_have_no_witness((dims, raw) in bipartite_case(), seed in any::<u64>()) {
        let s = Spectrum::new(&raw).unwrap();
        let report = check_spectrum(&s, &dims, &CheckOptions::default()).unwrap();
        if report.aggregate == Aggregate::AsCertified {
            prop_assert!(!falsify_ap(&s, &dims, 300, seed).unwrap().witness_found);
        }
    }
}
