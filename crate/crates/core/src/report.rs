//! Runs every applicable criterion on a spectrum and combines the verdicts.

use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::chull::{builtin_sets, hull_membership, DecompositionCertificate, HullOutcome, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::criteria::{
    ap_necessary_2x2, certifies_sas, ch_facet, facet_pivot, gurvits_barnum, hierarchy, multipartite_min_max,
    reduction_min_max, symmetric_alpha_bounds, symmetric_ch_facet, symmetric_min_max, two_smallest, Certifies,
    CriterionId, CriterionVerdict, Provenance,
};
use crate::error::{Error, Result};
use crate::polytope::{ordered_sector_facet, Rational};
use crate::spectrum::{Spectrum, SystemDims};

/// Largest symmetric dimension for which a missing closed-form facet is
/// derived on the fly from the polytope module.
pub const MAX_DERIVED_FACET_DIM: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Aggregate {
    AsCertified,
    FullySepCertified,
    SasCertified,
    SapCertified,
    NotAp,
    Inconclusive,
}

impl Aggregate {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::AsCertified => "AS_CERTIFIED",
            Self::FullySepCertified => "FULLY_SEP_CERTIFIED",
            Self::SasCertified => "SAS_CERTIFIED",
            Self::SapCertified => "SAP_CERTIFIED",
            Self::NotAp => "NOT_AP",
            Self::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub spectrum: Vec<f64>,
    pub dims: SystemDims,
    pub verdicts: Vec<CriterionVerdict>,
    pub hull_certificate: Option<DecompositionCertificate>,
    pub aggregate: Aggregate,
    pub provenance_notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub run_hull: bool,
    /// Use the sharper symmetric bounds where known.
    pub use_tight: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, max_iter: DEFAULT_MAX_ITER, run_hull: true, use_tight: true }
    }
}

fn bipartite_verdicts(s: &Spectrum, dims: &SystemDims) -> Result<Vec<CriterionVerdict>> {
    let mut v = vec![gurvits_barnum(s, dims)?];
    let (min, max) = reduction_min_max(s, dims)?;
    v.extend([min, max, ch_facet(s, dims)?]);
    for kappa in 1..=facet_pivot(s.len()) {
        v.push(hierarchy(s, dims, kappa)?);
    }
    v.push(two_smallest(s, dims)?);
    v.push(ap_necessary_2x2(s)?);
    Ok(v)
}

fn multiqudit_verdicts(s: &Spectrum, dims: &SystemDims, d: usize, n: usize) -> Result<Vec<CriterionVerdict>> {
    let mut v = vec![gurvits_barnum(s, dims)?];
    let (min, max) = multipartite_min_max(s, d, n)?;
    v.extend([min, max, ap_necessary_2x2(s)?]);
    Ok(v)
}

/// Symmetric hull facet; falls back to deriving it from the generic bounds.
fn symmetric_facet(s: &Spectrum, d: usize, n: usize, use_tight: bool, notes: &mut Vec<String>) -> Result<Option<CriterionVerdict>> {
    match symmetric_ch_facet(s, d, n, use_tight) {
        Ok(v) => Ok(Some(v)),
        Err(Error::UnsupportedDims(_)) if s.len() <= MAX_DERIVED_FACET_DIM => {
            let c = crate::criteria::central_binomial(n);
            // systems without a closed form use the generic bounds −1/C and 2/C
            let lo = Rational::new(BigInt::from(-1), BigInt::from(c));
            let hi = Rational::new(BigInt::from(2), BigInt::from(c));
            let facet = ordered_sector_facet(s.len(), &lo, &hi)?;
            let slack = facet.slack(s.values());
            let inputs = facet.normal.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, _)| i).collect();
            let certifies = if certifies_sas(d, n) { Certifies::Sas } else { Certifies::Sap };
            notes.push(format!("sym_facet derived exactly from the polytope: {}", facet.display_inequality()));
            Ok(Some(CriterionVerdict::new(CriterionId::SymFacet, certifies, slack, inputs)))
        }
        Err(Error::UnsupportedDims(msg)) => {
            notes.push(format!("sym_facet skipped: {msg}"));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// Runs all applicable criteria, then the hull search, and aggregates.
///
/// Returns [`Error::Inconsistent`] if a sufficient criterion and the
/// necessary AP condition disagree, which no valid input should produce.
pub fn check_spectrum(s: &Spectrum, dims: &SystemDims, opts: &CheckOptions) -> Result<CertificateReport> {
    if s.len() != dims.total_dim() {
        return Err(Error::LengthMismatch { expected: dims.total_dim(), actual: s.len() });
    }
    let mut notes = Vec::new();
    let verdicts = match *dims {
        SystemDims::Bipartite { .. } => bipartite_verdicts(s, dims)?,
        SystemDims::Multiqudit { d, n } => multiqudit_verdicts(s, dims, d, n)?,
        SystemDims::Symmetric { d, n } => {
            let (min, max) = symmetric_min_max(s, d, n)?;
            let mut v = vec![min, max];
            v.extend(symmetric_facet(s, d, n, opts.use_tight, &mut notes)?);
            v
        }
    };

    let hull = if opts.run_hull {
        let sets = builtin_sets(dims)?;
        match hull_membership(s, &sets, opts.tol, opts.max_iter) {
            Ok(outcome) => Some(outcome.certificate()),
            Err(Error::IterationBudgetExhausted { residual, iterations }) => {
                notes.push(format!("hull search stopped after {iterations} sweeps at residual {residual:e}"));
                Some(HullOutcome::Infeasible(crate::chull::InfeasibleReport { best_residual: residual, iterations, separated: false }).certificate())
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    for v in verdicts.iter().filter(|v| v.passed && v.provenance != Provenance::Analytic) {
        notes.push(format!("{} passed using a bound with {:?} provenance", v.criterion_id.as_str(), v.provenance));
    }
    if let SystemDims::Symmetric { d, n } = *dims {
        let bounds = symmetric_alpha_bounds(d, n);
        if bounds.provenance() != Provenance::Analytic && hull.as_ref().is_some_and(|h| h.feasible) {
            notes.push(format!("hull sets use bounds with {:?} provenance", bounds.provenance()));
        }
    }

    let certified = verdicts.iter().any(|v| v.certifies != Certifies::NotAp && v.passed)
        || hull.as_ref().is_some_and(|h| h.feasible);
    let not_ap = verdicts.iter().any(|v| v.certifies == Certifies::NotAp && !v.passed);
    if certified && not_ap {
        return Err(Error::Inconsistent(format!(
            "spectrum {:?} is certified separable yet fails the necessary AP condition",
            s.values()
        )));
    }
    let aggregate = if certified {
        match *dims {
            SystemDims::Bipartite { .. } => Aggregate::AsCertified,
            SystemDims::Multiqudit { .. } => Aggregate::FullySepCertified,
            SystemDims::Symmetric { d, n } if certifies_sas(d, n) => Aggregate::SasCertified,
            SystemDims::Symmetric { .. } => Aggregate::SapCertified,
        }
    } else if not_ap {
        Aggregate::NotAp
    } else {
        Aggregate::Inconclusive
    };

    Ok(CertificateReport {
        spectrum: s.values().to_vec(),
        dims: *dims,
        verdicts,
        hull_certificate: hull,
        aggregate,
        provenance_notes: notes,
    })
}

impl CertificateReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dims: {}", self.dims);
        let spectrum: Vec<String> = self.spectrum.iter().map(|v| format!("{v:.6}")).collect();
        let _ = writeln!(out, "spectrum: [{}]", spectrum.join(", "));
        for v in &self.verdicts {
            let name = match v.level {
                Some(k) => format!("{}[{k}]", v.criterion_id.as_str()),
                None => v.criterion_id.as_str().to_string(),
            };
            let status = if v.passed { "pass" } else { "fail" };
            let certifies = serde_json::to_value(v.certifies).ok().and_then(|x| x.as_str().map(String::from)).unwrap_or_default();
            let _ = writeln!(out, "{name:<16} {certifies:<15} {status}  slack={:+.3e}", v.slack);
        }
        if let Some(h) = &self.hull_certificate {
            if h.feasible {
                let parts: Vec<String> = h.parts.iter().map(|p| format!("{}={:.6}", p.set, p.trace)).collect();
                let _ = writeln!(out, "hull: feasible (residual {:.2e}; {})", h.residual, parts.join(", "));
            } else {
                let _ = writeln!(out, "hull: no decomposition found (best residual {:.2e})", h.residual);
            }
        }
        for note in &self.provenance_notes {
            let _ = writeln!(out, "note: {note}");
        }
        let _ = writeln!(out, "aggregate: {}", self.aggregate);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(raw: &[f64], dims: SystemDims) -> CertificateReport {
        check_spectrum(&Spectrum::new(raw).unwrap(), &dims, &CheckOptions::default()).unwrap()
    }

    #[test]
    fn werner_boundary() {
        let r = run(&[1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 0.5], SystemDims::bipartite(2, 2).unwrap());
        assert_eq!(r.aggregate, Aggregate::AsCertified);
        let min = r.verdicts.iter().find(|v| v.criterion_id == CriterionId::ReductionMin).unwrap();
        assert!(min.passed);
    }

    #[test]
    fn pure_is_not_ap() {
        let r = run(&[0.0, 0.0, 0.0, 1.0], SystemDims::bipartite(2, 2).unwrap());
        assert_eq!(r.aggregate, Aggregate::NotAp);
        assert!(!r.hull_certificate.unwrap().feasible);
    }

    #[test]
    fn symmetric_aggregates() {
        let r = run(&[0.1, 0.3, 0.3, 0.3], SystemDims::symmetric(2, 3).unwrap());
        assert_eq!(r.aggregate, Aggregate::SasCertified);
        assert!(!r.provenance_notes.is_empty());
        let r = run(&[1.0 / 6.0; 6], SystemDims::symmetric(3, 2).unwrap());
        assert_eq!(r.aggregate, Aggregate::SapCertified);
    }

    #[test]
    fn derived_symmetric_facet() {
        let r = run(&[0.1; 10], SystemDims::symmetric(3, 3).unwrap());
        assert!(r.verdicts.iter().any(|v| v.criterion_id == CriterionId::SymFacet));
        assert_eq!(r.aggregate, Aggregate::SapCertified);
    }

    #[test]
    fn multiqudit_mms() {
        let r = run(&[0.125; 8], SystemDims::multiqudit(2, 3).unwrap());
        assert_eq!(r.aggregate, Aggregate::FullySepCertified);
    }

    #[test]
    fn json_round_trip() {
        let r = run(&[0.05, 0.28, 0.32, 0.35], SystemDims::bipartite(2, 2).unwrap());
        let json = serde_json::to_string(&r).unwrap();
        let back: CertificateReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
        assert!(r.to_text().contains(r.aggregate.as_str()));
    }
}
