//! Closed-form eigenvalue criteria.
//!
//! Every criterion returns a [`CriterionVerdict`] carrying the signed margin of
//! its inequality (`slack >= 0` iff it passed). Margins within
//! [`Tolerances::verdict`](crate::spectrum::Tolerances) of zero are reported as
//! exactly zero, so boundary spectra pass.

mod bipartite;
mod multipartite;
mod sym;

pub use bipartite::*;
pub use multipartite::*;
pub use sym::*;

use serde::{Deserialize, Serialize};

use crate::spectrum::Tolerances;

/// Stable identifiers used in report JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CriterionId {
    #[serde(rename = "gb_ball")]
    GbBall,
    #[serde(rename = "reduction_min")]
    ReductionMin,
    #[serde(rename = "reduction_max")]
    ReductionMax,
    #[serde(rename = "ch_facet")]
    ChFacet,
    #[serde(rename = "hierarchy_k")]
    Hierarchy,
    #[serde(rename = "two_smallest")]
    TwoSmallest,
    #[serde(rename = "ap_2x2")]
    Ap2x2,
    #[serde(rename = "multi_ball")]
    MultiBall,
    #[serde(rename = "multi_min")]
    MultiMin,
    #[serde(rename = "multi_max")]
    MultiMax,
    #[serde(rename = "sym_min")]
    SymMin,
    #[serde(rename = "sym_max")]
    SymMax,
    #[serde(rename = "sym_facet")]
    SymFacet,
}

impl CriterionId {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::GbBall => "gb_ball",
            Self::ReductionMin => "reduction_min",
            Self::ReductionMax => "reduction_max",
            Self::ChFacet => "ch_facet",
            Self::Hierarchy => "hierarchy_k",
            Self::TwoSmallest => "two_smallest",
            Self::Ap2x2 => "ap_2x2",
            Self::MultiBall => "multi_ball",
            Self::MultiMin => "multi_min",
            Self::MultiMax => "multi_max",
            Self::SymMin => "sym_min",
            Self::SymMax => "sym_max",
            Self::SymFacet => "sym_facet",
        }
    }
}

/// What a passing verdict certifies. `NotAp` is certified by a *failing* verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Certifies {
    #[serde(rename = "AS")]
    As,
    #[serde(rename = "AP")]
    Ap,
    #[serde(rename = "SAS")]
    Sas,
    #[serde(rename = "SAP")]
    Sap,
    FullySeparable,
    #[serde(rename = "NotAP")]
    NotAp,
}

/// How firmly a bound is established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Provenance {
    Analytic,
    NumericalEvidence,
    Conjectured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub criterion_id: CriterionId,
    pub certifies: Certifies,
    pub passed: bool,
    pub slack: f64,
    pub inputs_used: Vec<usize>,
    /// Hierarchy level for `hierarchy_k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    /// Weakest provenance of the bounds the verdict relies on.
    pub provenance: Provenance,
}

impl CriterionVerdict {
    pub(crate) fn new(criterion_id: CriterionId, certifies: Certifies, slack: f64, inputs_used: Vec<usize>) -> Self {
        let slack = if slack.abs() <= Tolerances::default().verdict { 0.0 } else { slack };
        Self {
            criterion_id,
            certifies,
            passed: slack >= 0.0,
            slack,
            inputs_used,
            level: None,
            provenance: Provenance::Analytic,
        }
    }

    pub(crate) fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub(crate) fn with_level(mut self, level: usize) -> Self {
        self.level = Some(level);
        self
    }
}

/// Admissible range of the reduction-map parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaBounds {
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    pub lower: Provenance,
    pub upper: Provenance,
}

impl AlphaBounds {
    pub(crate) fn analytic(alpha_minus: f64, alpha_plus: f64) -> Self {
        debug_assert!(alpha_minus < 0.0 && 0.0 < alpha_plus);
        Self {
            alpha_minus,
            alpha_plus,
            lower: Provenance::Analytic,
            upper: Provenance::Analytic,
        }
    }

    /// Bounds of the bipartite reduction map.
    pub fn bipartite() -> Self {
        Self::analytic(-1.0, 2.0)
    }

    /// Weakest of the two provenances.
    pub fn provenance(&self) -> Provenance {
        self.lower.max(self.upper)
    }

    /// `λ_min` threshold `1/(D + α_+)`.
    pub fn min_threshold(&self, dim: usize) -> f64 {
        1.0 / (dim as f64 + self.alpha_plus)
    }

    /// `λ_max` threshold `1/(D − |α_−|)`.
    pub fn max_threshold(&self, dim: usize) -> f64 {
        1.0 / (dim as f64 - self.alpha_minus.abs())
    }
}

/// Weighted sum `Σ c_i λ_i` over the leading entries of an ascending spectrum.
pub(crate) fn linear_form(coefficients: &[f64], sorted: &[f64]) -> f64 {
    coefficients.iter().zip(sorted).map(|(c, l)| c * l).sum()
}

pub(crate) fn nonzero_indices(coefficients: &[f64]) -> Vec<usize> {
    coefficients
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(i, _)| i)
        .collect()
}
