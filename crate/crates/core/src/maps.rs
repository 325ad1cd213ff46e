//! Set-valued maps `F: R^d → CC(R^d)` with a declared negative relaxed
//! one-sided Lipschitz (ROSL) constant `ell`, and sampled checks of that
//! declaration.
//!
//! A map is ROSL with constant `ell` when for all `x, x2` and every
//! `y ∈ F(x)` some `y2 ∈ F(x2)` satisfies `⟨y2 − y, x2 − x⟩ ≤ ell·‖x2 − x‖²`.
//! With `u = x2 − x`, the worst `y` against the best response `y2` is
//! `σ_{F(x)}(−u) − σ_{F(x2)}(−u)`, so every check here runs on support
//! functions and never enumerates best responses.

use std::fmt;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, GeometryError, Polytope, Vector, EPS_GEOM};

#[derive(Debug, Error)]
pub enum MapError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("ROSL constant must be finite and negative, got {0}")]
    NonNegativeEll(f64),
    #[error("matrix M must be {dim}x{dim}")]
    MatrixShape { dim: usize },
    #[error("matrix M is not symmetric (entry ({row},{col}))")]
    NotSymmetric { row: usize, col: usize },
    #[error("matrix M is not positive definite (smallest eigenvalue {0})")]
    NotPositiveDefinite(f64),
    #[error("invalid piecewise map: {0}")]
    InvalidPiecewise(String),
    #[error("evaluation failed at x = {x}: {reason}")]
    Evaluation { x: Vector, reason: String },
    #[error("need at least two distinct sample points")]
    TooFewSamples,
    #[error("map file: {0}")]
    File(String),
}

pub type Result<T, E = MapError> = std::result::Result<T, E>;

/// `F(x) = b − M x + P` with `M` symmetric positive definite. Such a map is
/// ROSL with constant `−λ_min(M)`.
#[derive(Clone, Debug)]
pub struct AffinePolytope {
    b: Vector,
    m: DMatrix<f64>,
    p: Polytope,
    lambda_min: f64,
}

impl AffinePolytope {
    pub fn new(b: Vector, m: Vec<Vec<f64>>, p: Polytope) -> Result<Self> {
        let dim = b.dim();
        p.vertices()[0].ensure_dim(dim)?;
        if m.len() != dim || m.iter().any(|row| row.len() != dim) {
            return Err(MapError::MatrixShape { dim });
        }
        let m = DMatrix::from_fn(dim, dim, |r, c| m[r][c]);
        if let Some(&bad) = m.iter().find(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite(bad).into());
        }
        for r in 0..dim {
            for c in 0..r {
                let scale = m[(r, c)].abs().max(m[(c, r)].abs()).max(1.0);
                if (m[(r, c)] - m[(c, r)]).abs() > EPS_GEOM * scale {
                    return Err(MapError::NotSymmetric { row: r, col: c });
                }
            }
        }
        let lambda_min = SymmetricEigen::new(m.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if lambda_min <= 0.0 {
            return Err(MapError::NotPositiveDefinite(lambda_min));
        }
        Ok(Self {
            b,
            m,
            p,
            lambda_min,
        })
    }

    pub fn dim(&self) -> usize {
        self.b.dim()
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    /// The ROSL constant certified by the spectrum of `M`.
    pub fn certified_ell(&self) -> f64 {
        -self.lambda_min
    }

    pub fn polytope(&self) -> &Polytope {
        &self.p
    }

    fn eval(&self, x: &Vector) -> Result<Polytope> {
        let shift: Vec<f64> = (0..self.dim())
            .map(|r| {
                let mx: f64 = (0..self.dim()).map(|c| self.m[(r, c)] * x.coords()[c]).sum();
                self.b.coords()[r] - mx
            })
            .collect();
        Ok(self.p.translate(&Vector::new(shift)?)?)
    }
}

/// One piece of a [`Piecewise1D`] map: on the open interval `(lo, hi)`, or
/// the single point `lo` when `lo == hi`, the value is
/// `[lower[0] + lower[1]·x, upper[0] + upper[1]·x]`. `None` is unbounded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Branch {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub lower: [f64; 2],
    pub upper: [f64; 2],
}

impl Branch {
    fn is_point(&self) -> bool {
        matches!((self.lo, self.hi), (Some(a), Some(b)) if a == b)
    }

    fn covers(&self, x: f64) -> bool {
        if self.is_point() {
            return self.lo == Some(x);
        }
        self.lo.is_none_or(|lo| lo < x) && self.hi.is_none_or(|hi| x < hi)
    }

    fn bounds_at(&self, x: f64) -> (f64, f64) {
        (
            self.lower[0] + self.lower[1] * x,
            self.upper[0] + self.upper[1] * x,
        )
    }
}

/// Interval-valued map on R^1, affine on each piece of a partition of the
/// line into open intervals and breakpoints.
#[derive(Clone, Debug)]
pub struct Piecewise1D {
    branches: Vec<Branch>,
    usc: bool,
}

impl Piecewise1D {
    /// Branches must be listed left to right: an open piece, then the point
    /// branch at its right end, then the next open piece, and so on.
    pub fn new(branches: Vec<Branch>) -> Result<Self> {
        let bad = |msg: String| Err(MapError::InvalidPiecewise(msg));
        if branches.is_empty() {
            return bad("no branches".into());
        }
        for br in &branches {
            for v in br.lower.iter().chain(&br.upper).chain(br.lo.iter()).chain(br.hi.iter()) {
                if !v.is_finite() {
                    return bad(format!("non-finite value {v}"));
                }
            }
        }
        if branches[0].lo.is_some() || branches[branches.len() - 1].hi.is_some() {
            return bad("the first branch must start at -inf and the last end at +inf".into());
        }
        for (i, br) in branches.iter().enumerate() {
            let expect_point = i % 2 == 1;
            if br.is_point() != expect_point {
                return bad(format!("branch {i}: expected alternating open pieces and breakpoints"));
            }
            if let (Some(lo), Some(hi)) = (br.lo, br.hi) {
                if lo > hi {
                    return bad(format!("branch {i}: lo > hi"));
                }
            }
            if i > 0 && branches[i - 1].hi != br.lo {
                return bad(format!("branch {i} does not start where branch {} ends", i - 1));
            }
            // Affine bounds: lower ≤ upper on the whole piece iff at both ends
            // (or in the limit towards an unbounded end).
            let ends = [br.lo, br.hi];
            for (k, end) in ends.iter().enumerate() {
                match end {
                    Some(t) => {
                        let (l, u) = br.bounds_at(*t);
                        if l > u + EPS_GEOM {
                            return bad(format!("branch {i}: lower bound exceeds upper bound at {t}"));
                        }
                    }
                    None => {
                        let slope_gap = br.lower[1] - br.upper[1];
                        let ok = match (k, ends[1 - k]) {
                            (0, Some(_)) => slope_gap >= 0.0,
                            (1, Some(_)) => slope_gap <= 0.0,
                            _ => slope_gap == 0.0 && br.lower[0] <= br.upper[0],
                        };
                        if !ok {
                            return bad(format!("branch {i}: bounds cross on an unbounded piece"));
                        }
                    }
                }
            }
        }
        let usc = branches
            .chunks(2)
            .zip(branches.iter().skip(2).step_by(2))
            .all(|(pair, right)| {
                let (left, point) = (&pair[0], &pair[1]);
                let t = point.lo.expect("point branch");
                let (pl, pu) = point.bounds_at(t);
                [left, right].iter().all(|b| {
                    let (l, u) = b.bounds_at(t);
                    l >= pl - EPS_GEOM && u <= pu + EPS_GEOM
                })
            });
        Ok(Self { branches, usc })
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Whether every breakpoint value contains the one-sided limits.
    pub fn is_usc(&self) -> bool {
        self.usc
    }

    fn eval(&self, x: &Vector) -> Result<Polytope> {
        let t = x.coords()[0];
        let br = self
            .branches
            .iter()
            .find(|b| b.covers(t))
            .ok_or_else(|| MapError::Evaluation {
                x: x.clone(),
                reason: "no branch covers x".into(),
            })?;
        let (l, u) = br.bounds_at(t);
        if l > u {
            // Within EPS_GEOM of touching; collapse to the midpoint.
            let mid = 0.5 * (l + u);
            return Ok(Polytope::interval(mid, mid));
        }
        Ok(Polytope::interval(l, u))
    }
}

#[derive(Clone, Debug)]
pub enum MapFamily {
    /// `[1,2] − x` for `x < 0`, `[−2,2]` at `0`, `[−2,−1] − x` for `x > 0`;
    /// upper semicontinuous and ROSL with constant −1.
    Example34,
    AffinePolytope(AffinePolytope),
    Piecewise1D(Piecewise1D),
}

impl MapFamily {
    pub fn dim(&self) -> usize {
        match self {
            MapFamily::Example34 | MapFamily::Piecewise1D(_) => 1,
            MapFamily::AffinePolytope(a) => a.dim(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MapFamily::Example34 => "example34",
            MapFamily::AffinePolytope(_) => "affine_polytope",
            MapFamily::Piecewise1D(_) => "piecewise1d",
        }
    }
}

/// A set-valued map with its declared ROSL constant.
///
/// `usc` records declared upper semicontinuity; it is not verified except for
/// the breakpoint check of piecewise maps.
#[derive(Clone, Debug)]
pub struct SetValuedMap {
    id: String,
    ell: f64,
    usc: bool,
    family: MapFamily,
}

impl SetValuedMap {
    pub fn new(id: impl Into<String>, family: MapFamily, ell: f64) -> Result<Self> {
        if !(ell.is_finite() && ell < 0.0) {
            return Err(MapError::NonNegativeEll(ell));
        }
        let usc = match &family {
            MapFamily::Piecewise1D(p) => p.is_usc(),
            _ => true,
        };
        Ok(Self {
            id: id.into(),
            ell,
            usc,
            family,
        })
    }

    pub fn example34() -> Self {
        Self::new("example34", MapFamily::Example34, -1.0).expect("valid constant")
    }

    /// Affine map declared with its certified constant `−λ_min(M)`.
    pub fn affine(id: impl Into<String>, map: AffinePolytope) -> Self {
        let ell = map.certified_ell();
        Self::new(id, MapFamily::AffinePolytope(map), ell).expect("λ_min > 0")
    }

    pub fn with_ell(mut self, ell: f64) -> Result<Self> {
        if !(ell.is_finite() && ell < 0.0) {
            return Err(MapError::NonNegativeEll(ell));
        }
        self.ell = ell;
        Ok(self)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn usc(&self) -> bool {
        self.usc
    }

    pub fn family(&self) -> &MapFamily {
        &self.family
    }

    pub fn eval(&self, x: &Vector) -> Result<Polytope> {
        x.ensure_dim(self.dim())?;
        match &self.family {
            MapFamily::Example34 => {
                let t = x.coords()[0];
                Ok(if t < 0.0 {
                    Polytope::interval(1.0 - t, 2.0 - t)
                } else if t == 0.0 {
                    Polytope::interval(-2.0, 2.0)
                } else {
                    Polytope::interval(-2.0 - t, -1.0 - t)
                })
            }
            MapFamily::AffinePolytope(a) => a.eval(x),
            MapFamily::Piecewise1D(p) => p.eval(x),
        }
    }
}

/// `σ_{F(x)}(−u) − σ_{F(x2)}(−u)` with `u = x2 − x`: the worst `⟨y2 − y, u⟩`
/// over `y ∈ F(x)` against the best response `y2 ∈ F(x2)`.
fn worst_pairing(fx: &Polytope, fx2: &Polytope, u: &Vector) -> f64 {
    let neg = -u;
    fx.support_unchecked(&neg) - fx2.support_unchecked(&neg)
}

/// ROSL defect of the ordered pair `(x, x2)`; non-positive iff the inequality
/// holds for every `y ∈ F(x)`. Zero for `x == x2`.
pub fn rosl_gap(map: &SetValuedMap, x: &Vector, x2: &Vector) -> Result<f64> {
    x.ensure_dim(map.dim())?;
    x2.ensure_dim(map.dim())?;
    if x == x2 {
        return Ok(0.0);
    }
    let u = x2 - x;
    Ok(worst_pairing(&map.eval(x)?, &map.eval(x2)?, &u) - map.ell() * u.norm_sq())
}

#[derive(Clone, Debug)]
pub struct RoslReport {
    pub holds: bool,
    pub worst_gap: f64,
    pub worst_pair: (Vector, Vector),
    pub pairs_checked: usize,
    pub ell: f64,
}

impl fmt::Display for RoslReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "declared_ell={}", self.ell)?;
        writeln!(f, "pairs_checked={}", self.pairs_checked)?;
        writeln!(f, "holds={}", self.holds)?;
        writeln!(
            f,
            "verdict={}",
            if self.holds {
                "not refuted (sampled check, not a proof)"
            } else {
                "refuted"
            }
        )?;
        writeln!(f, "worst_gap={}", self.worst_gap)?;
        write!(f, "worst_pair={};{}", self.worst_pair.0, self.worst_pair.1)
    }
}

fn evaluate_samples(map: &SetValuedMap, samples: &[Vector]) -> Result<Vec<Polytope>> {
    let distinct = samples
        .iter()
        .enumerate()
        .any(|(i, a)| samples[..i].iter().any(|b| b != a));
    if !distinct {
        return Err(MapError::TooFewSamples);
    }
    samples.iter().map(|s| map.eval(s)).collect()
}

/// Sampled falsification of the ROSL declaration over all ordered pairs.
/// `holds == true` only means no sampled pair refutes it.
pub fn check_rosl(map: &SetValuedMap, samples: &[Vector]) -> Result<RoslReport> {
    let images = evaluate_samples(map, samples)?;
    let mut worst: Option<(f64, usize, usize)> = None;
    let mut pairs = 0;
    for (i, xi) in samples.iter().enumerate() {
        for (j, xj) in samples.iter().enumerate() {
            if xi == xj {
                continue;
            }
            let u = xj - xi;
            let gap = worst_pairing(&images[i], &images[j], &u) - map.ell() * u.norm_sq();
            pairs += 1;
            if worst.is_none_or(|(g, _, _)| gap > g) {
                worst = Some((gap, i, j));
            }
        }
    }
    let (worst_gap, i, j) = worst.expect("at least one distinct pair");
    Ok(RoslReport {
        holds: worst_gap <= EPS_GEOM,
        worst_gap,
        worst_pair: (samples[i].clone(), samples[j].clone()),
        pairs_checked: pairs,
        ell: map.ell(),
    })
}

/// Smallest constant consistent with every sampled ordered pair: the maximum
/// of `(σ_{F(x)}(−u) − σ_{F(x2)}(−u)) / ‖u‖²`.
pub fn estimate_ell(map: &SetValuedMap, samples: &[Vector]) -> Result<f64> {
    let images = evaluate_samples(map, samples)?;
    let mut best = f64::NEG_INFINITY;
    for (i, xi) in samples.iter().enumerate() {
        for (j, xj) in samples.iter().enumerate() {
            if xi == xj {
                continue;
            }
            let u = xj - xi;
            best = best.max(worst_pairing(&images[i], &images[j], &u) / u.norm_sq());
        }
    }
    Ok(best)
}

/// Excess `sup_{y2 ∈ F(x2)} dist(y2, F(x))`, the one-sided Hausdorff distance
/// of `F(x2)` from `F(x)`.
pub fn usc_excess(map: &SetValuedMap, x: &Vector, x2: &Vector) -> Result<f64> {
    let fx = map.eval(x)?;
    let fx2 = map.eval(x2)?;
    let mut worst: f64 = 0.0;
    for v in fx2.vertices() {
        worst = worst.max(geometry::project_onto(&fx, v)?.dist);
    }
    Ok(worst)
}

#[derive(Clone, Debug)]
pub struct UscDiagnostic {
    pub pairs_checked: usize,
    pub violations: Vec<(Vector, Vector, f64)>,
}

/// Sampled look at upper semicontinuity: flags ordered pairs at distance at
/// most `delta` whose excess exceeds `eps`. Diagnostic only.
pub fn usc_diagnostic(
    map: &SetValuedMap,
    samples: &[Vector],
    delta: f64,
    eps: f64,
) -> Result<UscDiagnostic> {
    let mut out = UscDiagnostic {
        pairs_checked: 0,
        violations: Vec::new(),
    };
    for x in samples {
        for x2 in samples {
            if x == x2 || x.distance(x2) > delta {
                continue;
            }
            out.pairs_checked += 1;
            let e = usc_excess(map, x, x2)?;
            if e > eps {
                out.violations.push((x.clone(), x2.clone(), e));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    Example34,
    AffinePolytope,
    #[serde(rename = "piecewise1d")]
    Piecewise1D,
}

/// On-disk map definition (JSON).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub dim: usize,
    pub ell: f64,
    pub family: FamilyTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<Vec<f64>>>,
    #[serde(rename = "P_vertices", default, skip_serializing_if = "Option::is_none")]
    pub p_vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branches: Option<Vec<Branch>>,
}

impl MapFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| MapError::File(e.to_string()))
    }

    pub fn into_map(self, id: impl Into<String>) -> Result<SetValuedMap> {
        let file_err = |msg: &str| Err(MapError::File(msg.to_string()));
        let family = match self.family {
            FamilyTag::Example34 => {
                if self.b.is_some() || self.m.is_some() || self.p_vertices.is_some() || self.branches.is_some() {
                    return file_err("example34 takes no payload fields");
                }
                MapFamily::Example34
            }
            FamilyTag::AffinePolytope => {
                if self.branches.is_some() {
                    return file_err("affine_polytope does not accept \"branches\"");
                }
                let (Some(b), Some(m), Some(pv)) = (self.b, self.m, self.p_vertices) else {
                    return file_err("affine_polytope requires \"b\", \"M\" and \"P_vertices\"");
                };
                let verts = pv
                    .into_iter()
                    .map(Vector::new)
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                let p = Polytope::from_points(&verts, EPS_GEOM)?;
                MapFamily::AffinePolytope(AffinePolytope::new(Vector::new(b)?, m, p)?)
            }
            FamilyTag::Piecewise1D => {
                if self.b.is_some() || self.m.is_some() || self.p_vertices.is_some() {
                    return file_err("piecewise1d only accepts \"branches\"");
                }
                let Some(branches) = self.branches else {
                    return file_err("piecewise1d requires \"branches\"");
                };
                MapFamily::Piecewise1D(Piecewise1D::new(branches)?)
            }
        };
        if family.dim() != self.dim {
            return Err(MapError::File(format!(
                "declared dim {} but the {} payload has dimension {}",
                self.dim,
                family.name(),
                family.dim()
            )));
        }
        SetValuedMap::new(id, family, self.ell)
    }
}

/// Loads a map definition; the map id is the file stem.
pub fn load_map(path: &Path) -> Result<SetValuedMap> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| MapError::File(format!("{}: {e}", path.display())))?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "map".to_string());
    MapFile::parse(&text)?.into_map(id)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: f64) -> Vector {
        Vector::scalar(x)
    }

    fn unit_square() -> Polytope {
        Polytope::from_points(
            &[
                Vector::from_slice(&[0.0, 0.0]),
                Vector::from_slice(&[1.0, 0.0]),
                Vector::from_slice(&[0.0, 1.0]),
                Vector::from_slice(&[1.0, 1.0]),
            ],
            EPS_GEOM,
        )
        .unwrap()
    }

    /// F(x) = −x + [0, 1] on R^1, ROSL with constant −1 and tight.
    fn shifted_identity() -> SetValuedMap {
        let a = AffinePolytope::new(s(0.0), vec![vec![1.0]], Polytope::interval(0.0, 1.0)).unwrap();
        SetValuedMap::affine("shifted", a)
    }

    #[test]
    fn example34_values() {
        let f = SetValuedMap::example34();
        assert_eq!(f.eval(&s(-1.0)).unwrap(), Polytope::interval(2.0, 3.0));
        assert_eq!(f.eval(&s(0.0)).unwrap(), Polytope::interval(-2.0, 2.0));
        assert_eq!(f.eval(&s(0.5)).unwrap(), Polytope::interval(-2.5, -1.5));
        assert!(f.eval(&Vector::from_slice(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn affine_identity_at_origin_is_p() {
        let a = AffinePolytope::new(
            Vector::from_slice(&[0.0, 0.0]),
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            unit_square(),
        )
        .unwrap();
        let f = SetValuedMap::affine("id", a);
        assert_eq!(f.eval(&Vector::from_slice(&[0.0, 0.0])).unwrap(), unit_square());
        assert_eq!(f.ell(), -1.0);
    }

    #[test]
    fn affine_rejects_bad_matrices() {
        let b = Vector::from_slice(&[0.0, 0.0]);
        assert!(matches!(
            AffinePolytope::new(b.clone(), vec![vec![1.0, 2.0], vec![0.0, 1.0]], unit_square()),
            Err(MapError::NotSymmetric { .. })
        ));
        assert!(matches!(
            AffinePolytope::new(b.clone(), vec![vec![1.0, 2.0], vec![2.0, 1.0]], unit_square()),
            Err(MapError::NotPositiveDefinite(_))
        ));
        assert!(matches!(
            AffinePolytope::new(b, vec![vec![1.0]], unit_square()),
            Err(MapError::MatrixShape { .. })
        ));
    }

    #[test]
    fn ell_must_be_negative() {
        assert!(SetValuedMap::new("f", MapFamily::Example34, 0.0).is_err());
        assert!(SetValuedMap::example34().with_ell(1.0).is_err());
    }

    #[test]
    fn rosl_gap_examples() {
        let f = SetValuedMap::example34();
        assert_eq!(rosl_gap(&f, &s(-1.0), &s(1.0)).unwrap(), -6.0);
        assert_eq!(rosl_gap(&f, &s(0.7), &s(0.7)).unwrap(), 0.0);
        let g = shifted_identity();
        for (x, x2) in [(-1.0, 2.0), (0.25, -3.0), (5.0, 4.5)] {
            assert!(rosl_gap(&g, &s(x), &s(x2)).unwrap().abs() < 1e-12);
        }
        assert!(rosl_gap(&f, &s(0.0), &Vector::from_slice(&[0.0, 1.0])).is_err());
    }

    #[test]
    fn check_rosl_example34() {
        let f = SetValuedMap::example34();
        let samples: Vec<Vector> = [-2.0, -1.0, 0.0, 1.0, 2.0].map(s).to_vec();
        let report = check_rosl(&f, &samples).unwrap();
        assert!(report.holds);
        assert_eq!(report.pairs_checked, 20);
        assert!(report.to_string().contains("not refuted"));

        let tightened = f.with_ell(-1.5).unwrap();
        let report = check_rosl(&tightened, &samples).unwrap();
        assert!(!report.holds);
        // Pair (0, 2): σ_{[−2,2]}(−2) − σ_{[−4,−3]}(−2) = 4 − 8, plus 1.5·4.
        assert_eq!(report.worst_gap, 2.0);
    }

    #[test]
    fn check_rosl_needs_two_distinct_samples() {
        let f = SetValuedMap::example34();
        assert!(matches!(check_rosl(&f, &[s(1.0)]), Err(MapError::TooFewSamples)));
        assert!(matches!(estimate_ell(&f, &[s(1.0), s(1.0)]), Err(MapError::TooFewSamples)));
    }

    #[test]
    fn estimate_ell_examples() {
        let g = shifted_identity();
        let est = estimate_ell(&g, &[s(-1.0), s(0.0), s(1.0)]).unwrap();
        assert!((est + 1.0).abs() < 1e-12);

        // Pair (1, 2) has ratio −1; cross pairs are more negative.
        let f = SetValuedMap::example34();
        let est = estimate_ell(&f, &[-2.0, -1.0, 1.0, 2.0].map(s)).unwrap();
        assert_eq!(est, -1.0);
    }

    #[test]
    fn piecewise_reproduces_example34() {
        let branches = vec![
            Branch { lo: None, hi: Some(0.0), lower: [1.0, -1.0], upper: [2.0, -1.0] },
            Branch { lo: Some(0.0), hi: Some(0.0), lower: [-2.0, 0.0], upper: [2.0, 0.0] },
            Branch { lo: Some(0.0), hi: None, lower: [-2.0, -1.0], upper: [-1.0, -1.0] },
        ];
        let pw = Piecewise1D::new(branches).unwrap();
        assert!(pw.is_usc());
        let f = SetValuedMap::new("pw", MapFamily::Piecewise1D(pw), -1.0).unwrap();
        let e = SetValuedMap::example34();
        for x in [-2.5, -0.1, 0.0, 0.1, 3.0] {
            assert_eq!(f.eval(&s(x)).unwrap(), e.eval(&s(x)).unwrap());
        }
    }

    #[test]
    fn piecewise_validation() {
        let open = |lo, hi| Branch { lo, hi, lower: [0.0, 0.0], upper: [1.0, 0.0] };
        assert!(Piecewise1D::new(vec![open(None, None)]).is_ok());
        assert!(Piecewise1D::new(vec![open(None, Some(0.0)), open(Some(0.0), None)]).is_err());
        assert!(Piecewise1D::new(vec![open(Some(0.0), None)]).is_err());
        // Crossing bounds on an unbounded piece.
        let crossing = Branch { lo: None, hi: None, lower: [0.0, 1.0], upper: [1.0, 0.0] };
        assert!(Piecewise1D::new(vec![crossing]).is_err());
        // Breakpoint value missing the left limit: not USC.
        let pw = Piecewise1D::new(vec![
            Branch { lo: None, hi: Some(0.0), lower: [5.0, 0.0], upper: [6.0, 0.0] },
            Branch { lo: Some(0.0), hi: Some(0.0), lower: [0.0, 0.0], upper: [1.0, 0.0] },
            open(Some(0.0), None),
        ])
        .unwrap();
        assert!(!pw.is_usc());
    }

    #[test]
    fn usc_diagnostic_flags_jump() {
        let f = SetValuedMap::example34();
        let samples = [-0.01, 0.0, 0.01].map(s);
        // F(±0.01) ⊂ B_0.02(F(0)), but F(0) ⊄ B_eps(F(0.01)).
        let d = usc_diagnostic(&f, &samples, 0.05, 0.02).unwrap();
        assert!(d.violations.iter().all(|(x, _, _)| x != &s(0.0)));
        assert!(!d.violations.is_empty());
    }

    #[test]
    fn map_file_parsing() {
        let f = MapFile::parse(r#"{"dim": 1, "ell": -1.0, "family": "example34"}"#)
            .unwrap()
            .into_map("e")
            .unwrap();
        assert!(matches!(f.family(), MapFamily::Example34));

        let text = r#"{"dim": 2, "ell": -0.5, "family": "affine_polytope",
            "b": [0, 0], "M": [[1, 0], [0, 0.5]],
            "P_vertices": [[0,0],[1,0],[0,1],[1,1],[0.5,0.5]]}"#;
        let f = MapFile::parse(text).unwrap().into_map("a").unwrap();
        assert_eq!(f.dim(), 2);
        match f.family() {
            MapFamily::AffinePolytope(a) => {
                assert!((a.lambda_min() - 0.5).abs() < 1e-12);
                assert_eq!(a.polytope().len(), 4);
            }
            _ => panic!("wrong family"),
        }

        assert!(MapFile::parse(r#"{"dim": 1, "ell": -1, "family": "example34", "extra": 1}"#).is_err());
        assert!(MapFile::parse(r#"{"dim": 1, "ell": -1, "family": "example34", "b": [1]}"#)
            .unwrap()
            .into_map("x")
            .is_err());
        assert!(MapFile::parse(r#"{"dim": 2, "ell": -1, "family": "example34"}"#)
            .unwrap()
            .into_map("x")
            .is_err());
        assert!(MapFile::parse(r#"{"dim": 1, "ell": -1, "family": "affine_polytope"}"#)
            .unwrap()
            .into_map("x")
            .is_err());
        assert!(MapFile::parse(r#"{"dim": 1, "ell": 1, "family": "example34"}"#)
            .unwrap()
            .into_map("x")
            .is_err());
    }
}
