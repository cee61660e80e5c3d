//! Spectra, dimension layouts, and majorization.
//!
//! All eigenvalue vectors are kept in ascending order, so `values()[0]` is the
//! smallest eigenvalue and `values()[len - 1]` the largest.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances shared by validation and the verdict logic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Entries in `[-positivity, 0)` are clamped to zero; anything lower is rejected.
    pub positivity: f64,
    /// Allowed deviation of the eigenvalue sum from one.
    pub trace: f64,
    /// Central finite-difference step for the Schur-convexity probe.
    pub fd_step: f64,
    /// Allowed negative margin in the Schur-convexity probe.
    pub fd_margin: f64,
    /// Inequality margins with magnitude below this are reported as exactly zero.
    pub verdict: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            positivity: 1e-12,
            trace: 1e-9,
            fd_step: 1e-6,
            fd_margin: 1e-7,
            verdict: 1e-12,
        }
    }
}

/// `n` choose `k`, exact for the sizes used here.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Layout of the Hilbert space a spectrum lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SystemDims {
    /// `C^n ⊗ C^m`.
    Bipartite { n: usize, m: usize },
    /// `n` qudits of local dimension `d`.
    Multiqudit { d: usize, n: usize },
    /// Symmetric subspace of `n` qudits of local dimension `d`.
    Symmetric { d: usize, n: usize },
}

impl SystemDims {
    pub fn bipartite(n: usize, m: usize) -> Result<Self> {
        Self::Bipartite { n, m }.checked()
    }

    pub fn multiqudit(d: usize, n: usize) -> Result<Self> {
        Self::Multiqudit { d, n }.checked()
    }

    pub fn symmetric(d: usize, n: usize) -> Result<Self> {
        Self::Symmetric { d, n }.checked()
    }

    /// Returns `self` if every parameter is at least 2 and the total dimension fits in memory.
    pub fn checked(self) -> Result<Self> {
        let (a, b) = match self {
            Self::Bipartite { n, m } => (n, m),
            Self::Multiqudit { d, n } | Self::Symmetric { d, n } => (d, n),
        };
        if a < 2 || b < 2 {
            return Err(Error::InvalidDims(format!("{self}: every parameter must be >= 2")));
        }
        match self {
            Self::Multiqudit { d, n } => {
                if (d as f64).powi(n as i32) > (1u64 << 40) as f64 {
                    return Err(Error::InvalidDims(format!("{self} is too large")));
                }
            }
            Self::Symmetric { d, n } => {
                if (binomial((n + d - 1) as u64, (d - 1) as u64) as f64) > (1u64 << 40) as f64 {
                    return Err(Error::InvalidDims(format!("{self} is too large")));
                }
            }
            Self::Bipartite { .. } => {}
        }
        Ok(self)
    }

    pub fn total_dim(&self) -> usize {
        match *self {
            Self::Bipartite { n, m } => n * m,
            Self::Multiqudit { d, n } => d.pow(n as u32),
            Self::Symmetric { d, n } => binomial((n + d - 1) as u64, (d - 1) as u64) as usize,
        }
    }

    /// Tensor factors of the space, or `None` for the symmetric subspace.
    pub fn factors(&self) -> Option<Vec<usize>> {
        match *self {
            Self::Bipartite { n, m } => Some(vec![n, m]),
            Self::Multiqudit { d, n } => Some(vec![d; n]),
            Self::Symmetric { .. } => None,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(self, Self::Symmetric { .. })
    }
}

impl fmt::Display for SystemDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bipartite { n, m } => write!(f, "{n}x{m}"),
            Self::Multiqudit { d, n } => write!(f, "{d}^{n}"),
            Self::Symmetric { d, n } => write!(f, "Sym({d}^{n})"),
        }
    }
}

impl FromStr for SystemDims {
    type Err = Error;

    /// Parses `NxM` as a bipartite layout.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected dims of the form NxM, got '{s}'"));
        let (a, b) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
        let n = a.trim().parse().map_err(|_| bad())?;
        let m = b.trim().parse().map_err(|_| bad())?;
        Self::bipartite(n, m)
    }
}

/// A validated eigenvalue vector: nonnegative, unit trace, sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Validates `raw` without checking it against a dimension layout.
    pub fn new(raw: &[f64]) -> Result<Self> {
        Self::with_tolerances(raw, &Tolerances::default())
    }

    pub fn with_tolerances(raw: &[f64], tol: &Tolerances) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::LengthMismatch { expected: 2, actual: raw.len() });
        }
        let mut values = Vec::with_capacity(raw.len());
        for (index, &value) in raw.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::Parse(format!("eigenvalue {index} is not finite")));
            }
            if value < -tol.positivity {
                return Err(Error::NegativeEigenvalue { index, value });
            }
            values.push(value.max(0.0));
        }
        // summing in sorted order keeps the result independent of input order
        values.sort_by(f64::total_cmp);
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > tol.trace {
            return Err(Error::TraceError { sum });
        }
        values.iter_mut().for_each(|v| *v /= sum);
        Ok(Self { values })
    }

    /// The maximally mixed spectrum of length `dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        assert!(dim >= 2, "spectrum needs at least two entries");
        Self { values: vec![1.0 / dim as f64; dim] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// `Σ λ_i²`.
    pub fn purity(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }
}

impl<'de> Deserialize<'de> for Spectrum {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<f64>::deserialize(deserializer)?;
        Spectrum::new(&raw).map_err(serde::de::Error::custom)
    }
}

/// Validates `raw` and checks that its length matches `dims`.
pub fn validate_spectrum(raw: &[f64], dims: &SystemDims) -> Result<Spectrum> {
    validate_spectrum_with(raw, dims, &Tolerances::default())
}

pub fn validate_spectrum_with(raw: &[f64], dims: &SystemDims, tol: &Tolerances) -> Result<Spectrum> {
    let expected = dims.total_dim();
    if raw.len() != expected {
        return Err(Error::LengthMismatch { expected, actual: raw.len() });
    }
    Spectrum::with_tolerances(raw, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MajorizationRelation {
    XMajorizedByY,
    YMajorizedByX,
    Equal,
    Incomparable,
}

/// Majorization between two spectra of equal length.
pub fn majorizes(x: &Spectrum, y: &Spectrum) -> Result<MajorizationRelation> {
    majorizes_vec(x.values(), y.values(), Tolerances::default().trace)
}

/// Majorization between arbitrary real vectors (sorted internally).
///
/// `x ≺ y` iff the sums agree and every ascending prefix sum of `x` is at
/// least the matching prefix sum of `y`.
pub fn majorizes_vec(x: &[f64], y: &[f64], eps: f64) -> Result<MajorizationRelation> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), actual: y.len() });
    }
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);

    if xs.iter().zip(&ys).all(|(a, b)| (a - b).abs() <= eps) {
        return Ok(MajorizationRelation::Equal);
    }
    let (sx, sy): (f64, f64) = (xs.iter().sum(), ys.iter().sum());
    if (sx - sy).abs() > eps {
        return Ok(MajorizationRelation::Incomparable);
    }
    let (mut px, mut py) = (0.0, 0.0);
    let (mut x_below, mut y_below) = (true, true);
    for (a, b) in xs.iter().zip(&ys).take(xs.len() - 1) {
        px += a;
        py += b;
        if px < py - eps {
            x_below = false;
        }
        if py < px - eps {
            y_below = false;
        }
    }
    Ok(match (x_below, y_below) {
        (true, true) => MajorizationRelation::Equal,
        (true, false) => MajorizationRelation::XMajorizedByY,
        (false, true) => MajorizationRelation::YMajorizedByX,
        (false, false) => MajorizationRelation::Incomparable,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchurProbeReport {
    /// Samples on which at least one check failed.
    pub violations: usize,
    /// Samples whose value changed under a random permutation.
    pub symmetry_violations: usize,
    /// Smallest `(x_i - x_j)(∂_i f - ∂_j f)` seen, or the most negative symmetry defect.
    pub worst_margin: f64,
    pub samples: usize,
}

/// Randomized check of the Schur-convexity conditions for `f` on `R^dim`.
///
/// Each sample is a random nonnegative vector with well-separated entries.
/// The sample counts as a violation when `f` changes under a random
/// permutation or when `(x_i - x_j)(∂_i f - ∂_j f) < -fd_margin` for some pair,
/// with derivatives taken by central differences.
pub fn schur_convex_probe<F>(f: F, dim: usize, samples: usize, seed: u64, tol: &Tolerances) -> SchurProbeReport
where
    F: Fn(&[f64]) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = tol.fd_step;
    let mut report = SchurProbeReport {
        violations: 0,
        symmetry_violations: 0,
        worst_margin: f64::INFINITY,
        samples,
    };

    let mut x = vec![0.0; dim];
    let mut grad = vec![0.0; dim];
    for _ in 0..samples {
        // Kinks of piecewise functions sit on x_i = x_j; keep away from them.
        loop {
            x.iter_mut().for_each(|v| *v = rng.random::<f64>());
            let mut sorted = x.clone();
            sorted.sort_by(f64::total_cmp);
            if sorted.windows(2).all(|w| w[1] - w[0] > 100.0 * h) {
                break;
            }
        }

        let fx = f(&x);
        let mut permuted = x.clone();
        permuted.shuffle(&mut rng);
        let defect = (f(&permuted) - fx).abs();
        let symmetric = defect <= 1e-12 * fx.abs().max(1.0);

        let mut probe = x.clone();
        for i in 0..dim {
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            grad[i] = (up - down) / (2.0 * h);
        }
        let mut worst = f64::INFINITY;
        for i in 0..dim {
            for j in (i + 1)..dim {
                worst = worst.min((x[i] - x[j]) * (grad[i] - grad[j]));
            }
        }

        if !symmetric {
            report.symmetry_violations += 1;
            report.worst_margin = report.worst_margin.min(-defect);
        }
        report.worst_margin = report.worst_margin.min(worst);
        if !symmetric || worst < -tol.fd_margin {
            report.violations += 1;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::new(v).unwrap()
    }

    #[test]
    fn accepts_maximally_mixed() {
        let dims = SystemDims::bipartite(2, 2).unwrap();
        let s = validate_spectrum(&[0.25; 4], &dims).unwrap();
        assert_eq!(s.values(), &[0.25; 4]);
    }

    #[test]
    fn rejects_bad_trace() {
        let dims = SystemDims::bipartite(2, 2).unwrap();
        let err = validate_spectrum(&[0.5, 0.25, 0.25, 0.25], &dims).unwrap_err();
        assert!(matches!(err, Error::TraceError { sum } if (sum - 1.25).abs() < 1e-15));
    }

    #[test]
    fn sorts_ascending() {
        let dims = SystemDims::bipartite(2, 2).unwrap();
        let s = validate_spectrum(&[0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0], &dims).unwrap();
        assert!((s.max() - 0.5).abs() < 1e-15);
        assert!(s.values().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn length_and_sign_errors() {
        let dims = SystemDims::bipartite(2, 3).unwrap();
        assert!(matches!(
            validate_spectrum(&[0.25; 4], &dims),
            Err(Error::LengthMismatch { expected: 6, actual: 4 })
        ));
        assert!(matches!(
            Spectrum::new(&[-1e-6, 0.5, 0.500001]),
            Err(Error::NegativeEigenvalue { index: 0, .. })
        ));
        // Tiny negatives are clamped.
        let s = Spectrum::new(&[-1e-13, 0.5, 0.5]).unwrap();
        assert_eq!(s.min(), 0.0);
    }

    #[test]
    fn total_dims() {
        assert_eq!(SystemDims::Bipartite { n: 2, m: 3 }.total_dim(), 6);
        assert_eq!(SystemDims::Multiqudit { d: 3, n: 3 }.total_dim(), 27);
        assert_eq!(SystemDims::Symmetric { d: 2, n: 3 }.total_dim(), 4);
        assert_eq!(SystemDims::Symmetric { d: 3, n: 2 }.total_dim(), 6);
        assert_eq!(SystemDims::Symmetric { d: 4, n: 2 }.total_dim(), 10);
        assert!(SystemDims::bipartite(1, 3).is_err());
        assert_eq!("3x3".parse::<SystemDims>().unwrap(), SystemDims::Bipartite { n: 3, m: 3 });
    }

    #[test]
    fn dims_json_schema() {
        let d: SystemDims = serde_json::from_str(r#"{"type":"bipartite","n":2,"m":3}"#).unwrap();
        assert_eq!(d, SystemDims::Bipartite { n: 2, m: 3 });
        let d: SystemDims = serde_json::from_str(r#"{"type":"symmetric","d":2,"n":3}"#).unwrap();
        assert_eq!(d.total_dim(), 4);
    }

    #[test]
    fn majorization_examples() {
        let mms = Spectrum::maximally_mixed(4);
        let pure = spec(&[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(majorizes(&mms, &pure).unwrap(), MajorizationRelation::XMajorizedByY);
        assert_eq!(majorizes(&pure, &mms).unwrap(), MajorizationRelation::YMajorizedByX);

        let x = spec(&[1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 0.5]);
        let y = spec(&[0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
        assert_eq!(majorizes(&x, &y).unwrap(), MajorizationRelation::Incomparable);

        let z = spec(&[0.1, 0.2, 0.3, 0.4]);
        assert_eq!(majorizes(&z, &z).unwrap(), MajorizationRelation::Equal);

        let short = Spectrum::maximally_mixed(3);
        assert!(majorizes(&short, &z).is_err());
    }

    #[test]
    fn probe_sum_is_clean() {
        let r = schur_convex_probe(|x| x.iter().sum(), 5, 200, 1, &Tolerances::default());
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn probe_flags_asymmetric_function() {
        let r = schur_convex_probe(|x| x[0], 4, 50, 2, &Tolerances::default());
        assert!(r.symmetry_violations > 0);
        assert!(r.violations > 0);
    }

    #[test]
    fn probe_sum_of_squares_is_schur_convex() {
        let r = schur_convex_probe(|x| x.iter().map(|v| v * v).sum(), 6, 300, 3, &Tolerances::default());
        assert_eq!(r.violations, 0);
        // and its negation is not
        let r = schur_convex_probe(|x| -x.iter().map(|v| v * v).sum::<f64>(), 6, 50, 3, &Tolerances::default());
        assert_eq!(r.violations, 50);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(11, 3), 165);
        assert_eq!(binomial(3, 5), 0);
    }
}
