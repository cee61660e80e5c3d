//! Exact eigenvalue-space geometry of simplex unions.
//!
//! Vertices and facets are exact rationals. Facets `c·x ≥ b` live in the
//! trace-one hyperplane, so `c` is only defined up to adding multiples of the
//! all-ones vector; the normal form shifts `c` until its smallest entry is zero
//! and scales `(c, b)` to coprime integers.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Exact point of eigenvalue space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector(pub Vec<Rational>);

impl RationalVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> Rational {
        self.0.iter().fold(Rational::zero(), |acc, v| acc + v)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

/// Inequality `normal·x ≥ offset` in normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub normal: Vec<BigInt>,
    pub offset: BigInt,
    /// Indices of the vertices (in the input order) lying on the facet.
    pub saturating: Vec<usize>,
}

impl Facet {
    /// `normal·x − offset`, exact.
    pub fn slack_exact(&self, x: &RationalVector) -> Rational {
        dot_int(&self.normal, &x.0) - Rational::from_integer(self.offset.clone())
    }

    /// `normal·x − offset` in floating point.
    pub fn slack(&self, x: &[f64]) -> f64 {
        let lhs: f64 = self.normal.iter().zip(x).map(|(c, v)| c.to_f64().unwrap_or(f64::NAN) * v).sum();
        lhs - self.offset.to_f64().unwrap_or(f64::NAN)
    }

    /// Coefficients as machine integers, when they fit.
    pub fn normal_i64(&self) -> Option<Vec<i64>> {
        self.normal.iter().map(|c| c.to_i64()).collect()
    }

    /// `"3λ_0 + 3λ_1 ≥ 1"`.
    pub fn display_inequality(&self) -> String {
        let terms: Vec<String> = self
            .normal
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| if c.is_one() { format!("λ_{i}") } else { format!("{c}λ_{i}") })
            .collect();
        let lhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        format!("{lhs} ≥ {}", self.offset)
    }
}

impl Serialize for Facet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let normal: Vec<serde_json::Value> = self
            .normal
            .iter()
            .map(|c| match c.to_i64() {
                Some(v) => serde_json::Value::from(v),
                None => serde_json::Value::from(c.to_string()),
            })
            .collect();
        let mut st = serializer.serialize_struct("Facet", 3)?;
        st.serialize_field("normal", &normal)?;
        st.serialize_field("offset", &self.offset.to_string())?;
        st.serialize_field("saturating_vertices", &self.saturating.len())?;
        st.end()
    }
}

fn dot_int(c: &[BigInt], x: &[Rational]) -> Rational {
    c.iter()
        .zip(x)
        .fold(Rational::zero(), |acc, (ci, xi)| acc + xi * Rational::from_integer(ci.clone()))
}

/// Parses `"2"`, `"-3/4"` or a finite decimal such as `"0.625"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().map_err(|_| bad())?;
    let scale = num_traits::pow(BigInt::from(10), frac_part.len() + 1);
    let value = Rational::new(digits, scale);
    Ok(if neg { -value } else { value })
}

/// The `D` permutations of `(1 − (D−1)/(D+α), 1/(D+α), …, 1/(D+α))`, the
/// images of pure states under the normalized reduction-like map.
///
/// Vertex `j` carries the distinguished entry at position `j`.
pub fn simplex_vertices(dim: usize, alpha: &Rational) -> Result<Vec<RationalVector>> {
    let d = Rational::from_integer(BigInt::from(dim));
    if dim < 2 {
        return Err(Error::InvalidDims(format!("D = {dim} must be >= 2")));
    }
    if (&d + alpha) <= Rational::zero() {
        return Err(Error::PreconditionUnmet(format!("D + α = {} must be positive", &d + alpha)));
    }
    let small = (&d + alpha).recip();
    let big = Rational::one() - (&d - Rational::one()) * &small;
    Ok((0..dim)
        .map(|j| RationalVector((0..dim).map(|i| if i == j { big.clone() } else { small.clone() }).collect()))
        .collect())
}

/// Vertices of both simplexes: first the `α_+` family, then the `α_−` family.
pub fn two_simplex_vertices(dim: usize, alpha_minus: &Rational, alpha_plus: &Rational) -> Result<Vec<RationalVector>> {
    let mut v = simplex_vertices(dim, alpha_plus)?;
    v.extend(simplex_vertices(dim, alpha_minus)?);
    Ok(v)
}

/// Null space of `rows` (each of width `w`), by exact Gauss–Jordan elimination.
fn null_space(mut rows: Vec<Vec<Rational>>, w: usize) -> Vec<Vec<Rational>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..w {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row[col..w].iter_mut().zip(&pivot[col..w]) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..w).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); w];
            v[f] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[row][f].clone();
            }
            v
        })
        .collect()
}

fn rank(rows: &[Vec<Rational>], w: usize) -> usize {
    w - null_space(rows.to_vec(), w).len()
}

/// Scales `(c, b)` to coprime integers after shifting `c` so `min c = 0`.
fn normalize(mut c: Vec<Rational>, mut b: Rational) -> (Vec<BigInt>, BigInt) {
    let shift = c.iter().min().cloned().unwrap_or_else(Rational::zero);
    for v in c.iter_mut() {
        *v -= &shift;
    }
    b -= &shift;
    let lcm = c.iter().chain(std::iter::once(&b)).fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let scaled: Vec<BigInt> = c.iter().map(|v| (v * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let offset = (b * Rational::from_integer(lcm)).to_integer();
    let g = scaled.iter().chain(std::iter::once(&offset)).fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() || g.is_one() {
        return (scaled, offset);
    }
    (scaled.iter().map(|v| v / &g).collect(), offset / g)
}

/// Hyperplane through `points` within the trace-one slice, or `None` if they
/// do not pin one down. Uses the gauge `c·1 = 0`; returns `(c, b)` with `c·p = b`.
fn hyperplane_through(points: &[&RationalVector], dim: usize) -> Option<(Vec<Rational>, Rational)> {
    // unknowns (c_0..c_{D−1}, b): rows [p | −1] and the gauge row [1 … 1 | 0]
    let mut rows: Vec<Vec<Rational>> = points
        .iter()
        .map(|p| p.0.iter().cloned().chain(std::iter::once(-Rational::one())).collect())
        .collect();
    rows.push((0..dim).map(|_| Rational::one()).chain(std::iter::once(Rational::zero())).collect());
    let ns = null_space(rows, dim + 1);
    if ns.len() != 1 {
        return None;
    }
    let v = ns.into_iter().next()?;
    let b = v[dim].clone();
    let c = v[..dim].to_vec();
    if c.iter().all(Zero::is_zero) {
        return None;
    }
    Some((c, b))
}

/// Orients `c·x = b` so every vertex satisfies `c·x ≥ b`, returning the normal
/// form, or `None` if vertices lie strictly on both sides.
fn supporting_facet(c: Vec<Rational>, b: Rational, vertices: &[RationalVector]) -> Option<Facet> {
    let slacks: Vec<Rational> = vertices
        .iter()
        .map(|v| v.0.iter().zip(&c).fold(Rational::zero(), |acc, (x, ci)| acc + x * ci) - &b)
        .collect();
    let any_pos = slacks.iter().any(Signed::is_positive);
    let any_neg = slacks.iter().any(Signed::is_negative);
    let (c, b) = match (any_pos, any_neg) {
        (true, true) => return None,
        (_, true) => (c.into_iter().map(|v| -v).collect(), -b),
        _ => (c, b),
    };
    let (normal, offset) = normalize(c, b);
    let mut facet = Facet { normal, offset, saturating: Vec::new() };
    facet.saturating = vertices
        .iter()
        .enumerate()
        .filter(|(_, v)| facet.slack_exact(v).is_zero())
        .map(|(i, _)| i)
        .collect();
    Some(facet)
}

fn check_span(vertices: &[RationalVector]) -> Result<usize> {
    let dim = vertices.first().map(RationalVector::len).ok_or(Error::DegenerateInput)?;
    if vertices.iter().any(|v| v.len() != dim) {
        return Err(Error::DimsMismatch("vertices of unequal length".into()));
    }
    if vertices.iter().any(|v| !v.sum().is_one()) {
        return Err(Error::PreconditionUnmet("vertices must have unit trace".into()));
    }
    let rows: Vec<Vec<Rational>> = vertices.iter().map(|v| v.0.clone()).collect();
    if dim < 2 || rank(&rows, dim) < dim {
        return Err(Error::DegenerateInput);
    }
    Ok(dim)
}

/// Visits every `k`-subset of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            break;
        };
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}

/// All facets of `conv(vertices)` within the trace-one hyperplane, by testing
/// the hyperplane through every `(D−1)`-subset of vertices.
///
/// Cost grows as `binomial(V, D−1)`; intended for `D ≤ 7`. Output is sorted by
/// normal form, so it does not depend on scheduling.
pub fn brute_force_facets(vertices: &[RationalVector]) -> Result<Vec<Facet>> {
    let dim = check_span(vertices)?;
    let subsets = combinations(vertices.len(), dim - 1);
    let found: BTreeSet<(Vec<BigInt>, BigInt)> = subsets
        .par_iter()
        .filter_map(|subset| {
            let pts: Vec<&RationalVector> = subset.iter().map(|&i| &vertices[i]).collect();
            let (c, b) = hyperplane_through(&pts, dim)?;
            supporting_facet(c, b, vertices).map(|f| (f.normal, f.offset))
        })
        .collect();
    Ok(found
        .into_iter()
        .map(|(normal, offset)| {
            let mut f = Facet { normal, offset, saturating: Vec::new() };
            f.saturating = (0..vertices.len()).filter(|&i| f.slack_exact(&vertices[i]).is_zero()).collect();
            f
        })
        .collect())
}

/// Whether a facet is the active representative on the sorted sector
/// `λ_0 ≤ … ≤ λ_{D−1}`: its normal is non-increasing and the centroid of its
/// saturating vertices is sorted ascending.
pub fn binds_on_sorted_sector(facet: &Facet, vertices: &[RationalVector]) -> bool {
    if facet.normal.windows(2).any(|w| w[0] < w[1]) || facet.saturating.is_empty() {
        return false;
    }
    let dim = facet.normal.len();
    let centroid: Vec<Rational> = (0..dim)
        .map(|i| facet.saturating.iter().fold(Rational::zero(), |acc, &v| acc + &vertices[v].0[i]))
        .collect();
    centroid.windows(2).all(|w| w[0] <= w[1])
}

/// Facets from a list that bind on the sorted sector.
pub fn sector_binding_facets(facets: &[Facet], vertices: &[RationalVector]) -> Vec<Facet> {
    facets.iter().filter(|f| binds_on_sorted_sector(f, vertices)).cloned().collect()
}

/// The facet of the two-simplex hull that bounds the sorted sector.
///
/// A non-increasing normal is minimized over the `α_+` family at the vertices
/// whose big entry sits where the normal is smallest (a suffix of indices),
/// and over the `α_−` family where it is largest (a prefix). A facet needs
/// `D−1` independent saturating vertices, so the normal takes its maximum on
/// a prefix of length `p`, its minimum on a suffix of length `q`, and
/// `p + q ≥ D−1`. Only those `O(D²)` candidate vertex sets are tried.
pub fn ordered_sector_facet(dim: usize, alpha_minus: &Rational, alpha_plus: &Rational) -> Result<Facet> {
    let vertices = two_simplex_vertices(dim, alpha_minus, alpha_plus)?;
    check_span(&vertices)?;
    let mut found: BTreeSet<(Vec<BigInt>, BigInt)> = BTreeSet::new();
    for p in 0..=dim {
        for q in 0..=(dim - p) {
            if p + q + 1 < dim {
                continue;
            }
            // α_− vertices 0..p, α_+ vertices D−q..D
            let pts: Vec<&RationalVector> = (0..p)
                .map(|j| &vertices[dim + j])
                .chain((dim - q..dim).map(|j| &vertices[j]))
                .collect();
            let Some((c, b)) = hyperplane_through(&pts, dim) else {
                continue;
            };
            if let Some(f) = supporting_facet(c, b, &vertices) {
                if binds_on_sorted_sector(&f, &vertices) {
                    found.insert((f.normal, f.offset));
                }
            }
        }
    }
    let mut facets: Vec<Facet> = found
        .into_iter()
        .map(|(normal, offset)| {
            let mut f = Facet { normal, offset, saturating: Vec::new() };
            f.saturating = (0..vertices.len()).filter(|&i| f.slack_exact(&vertices[i]).is_zero()).collect();
            f
        })
        .collect();
    match facets.len() {
        0 => Err(Error::DegenerateInput),
        1 => Ok(facets.remove(0)),
        _ => Err(Error::SectorAmbiguous(facets)),
    }
}

/// Applies a coordinate permutation to a facet (`perm[i]` is the new index of coordinate `i`).
pub fn permute_facet(facet: &Facet, perm: &[usize]) -> (Vec<BigInt>, BigInt) {
    let mut normal = vec![BigInt::zero(); facet.normal.len()];
    for (i, c) in facet.normal.iter().enumerate() {
        normal[perm[i]] = c.clone();
    }
    (normal, facet.offset.clone())
}
