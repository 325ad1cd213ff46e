//! Euclidean primitives: vectors, closed balls and convex polytopes in vertex
//! representation.
//!
//! Polytopes are always stored canonically: only extreme points are kept and
//! they are sorted lexicographically, so two polytopes describing the same set
//! (at the same tolerance) compare equal as plain lists.
//!
//! Exact hulls are supported for dimensions 1, 2 and 3. Every other operation
//! (support function, projection, membership) works for any dimension.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Default tolerance for collinearity, coincidence and membership decisions
/// on unit-scale data.
pub const EPS_GEOM: f64 = 1e-9;

/// Largest dimension for which [`convex_hull`] is implemented.
pub const MAX_HULL_DIM: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("empty point set")]
    EmptyPointSet,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension unsupported: {0} (hulls are implemented for d <= {MAX_HULL_DIM})")]
    UnsupportedDimension(usize),
    #[error("vector must have at least one coordinate")]
    ZeroDimension,
    #[error("non-finite coordinate {0}")]
    NonFinite(f64),
    #[error("invalid radius {0}")]
    InvalidRadius(f64),
    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),
    #[error("projection failed: no convergence after {iterations} iterations (residual {residual:e})")]
    ProjectionFailed { iterations: usize, residual: f64 },
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;

/// A point of R^d with finite coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(GeometryError::ZeroDimension);
        }
        if let Some(&bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(GeometryError::NonFinite(bad));
        }
        Ok(Self(coords))
    }

    /// One-dimensional vector. Panics on a non-finite value.
    pub fn scalar(value: f64) -> Self {
        assert!(value.is_finite(), "non-finite scalar {value}");
        Self(vec![value])
    }

    /// Panics on non-finite or empty input; meant for literals in code and tests.
    pub fn from_slice(coords: &[f64]) -> Self {
        Self::new(coords.to_vec()).expect("invalid vector literal")
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0);
        Self(vec![0.0; dim])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    #[inline]
    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// `self + s * other`
    pub fn add_scaled(&self, s: f64, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
    }

    pub fn lex_cmp(&self, other: &Vector) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.dim().cmp(&other.dim())
    }

    pub fn ensure_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(GeometryError::DimensionMismatch {
                expected,
                found: self.dim(),
            })
        }
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, s: f64) -> Vector {
        Vector(self.0.iter().map(|a| a * s).collect())
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector(self.0.iter().map(|a| -a).collect())
    }
}

/// Closed Euclidean ball. Radius zero is the singleton `{center}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vector,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vector, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(GeometryError::InvalidRadius(radius));
        }
        Ok(Self { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// `‖z − center‖ ≤ radius + tol`
    pub fn contains(&self, z: &Vector, tol: f64) -> Result<bool> {
        z.ensure_dim(self.dim())?;
        Ok(self.center.distance(z) <= self.radius + tol)
    }
}

pub fn ball_contains(ball: &Ball, z: &Vector, tol: f64) -> Result<bool> {
    ball.contains(z, tol)
}

/// Nonempty convex compact set `conv(vertices)`, stored canonically.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope {
    vertices: Vec<Vector>,
}

/// Nearest point of a polytope to a query point.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub point: Vector,
    pub dist: f64,
}

impl Polytope {
    /// Convex hull of `points`; see [`convex_hull`].
    pub fn from_points(points: &[Vector], tol: f64) -> Result<Self> {
        convex_hull(points, tol)
    }

    pub fn point(p: Vector) -> Self {
        Self { vertices: vec![p] }
    }

    /// The interval `[min(a, b), max(a, b)]` of R^1.
    pub fn interval(a: f64, b: f64) -> Self {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if lo == hi {
            Self::point(Vector::scalar(lo))
        } else {
            Self {
                vertices: vec![Vector::scalar(lo), Vector::scalar(hi)],
            }
        }
    }

    /// Build from points already known to be the extreme points; only sorts.
    pub(crate) fn from_extreme_unchecked(mut vertices: Vec<Vector>) -> Self {
        debug_assert!(!vertices.is_empty());
        vertices.sort_by(|a, b| a.lex_cmp(b));
        Self { vertices }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    #[inline]
    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Translation by `shift`. Translating preserves both extremality and the
    /// lexicographic order, so no re-canonicalization is needed.
    pub fn translate(&self, shift: &Vector) -> Result<Polytope> {
        shift.ensure_dim(self.dim())?;
        Ok(Polytope {
            vertices: self.vertices.iter().map(|v| v + shift).collect(),
        })
    }

    pub fn support(&self, u: &Vector) -> Result<f64> {
        u.ensure_dim(self.dim())?;
        Ok(self.support_unchecked(u))
    }

    #[inline]
    pub(crate) fn support_unchecked(&self, u: &Vector) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dot(u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn project(&self, z: &Vector) -> Result<Projection> {
        project_onto(self, z)
    }

    pub fn contains(&self, z: &Vector, tol: f64) -> Result<bool> {
        contains(self, z, tol)
    }
}

/// Extreme points of the convex hull of `points`, canonicalized.
///
/// Points closer than `tol` to the hull of the remaining ones are dropped.
/// Returned vertices are members of the input list.
pub fn convex_hull(points: &[Vector], tol: f64) -> Result<Polytope> {
    let first = points.first().ok_or(GeometryError::EmptyPointSet)?;
    let dim = first.dim();
    for p in points {
        p.ensure_dim(dim)?;
    }
    if dim > MAX_HULL_DIM {
        return Err(GeometryError::UnsupportedDimension(dim));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(GeometryError::InvalidTolerance(tol));
    }

    // Sorting first makes every tie-break below independent of input order.
    let mut sorted: Vec<&Vector> = points.iter().collect();
    sorted.sort_by(|a, b| a.lex_cmp(b));

    let keep = hull_indices(&sorted, tol)?;
    Ok(Polytope::from_extreme_unchecked(
        keep.into_iter().map(|i| sorted[i].clone()).collect(),
    ))
}

pub fn extreme_points(polytope: &Polytope) -> Vec<Vector> {
    polytope.vertices.clone()
}

pub fn support(polytope: &Polytope, u: &Vector) -> Result<f64> {
    polytope.support(u)
}

/// `dist(z, P) ≤ tol`, decided through [`project_onto`].
pub fn contains(polytope: &Polytope, z: &Vector, tol: f64) -> Result<bool> {
    Ok(project_onto(polytope, z)?.dist <= tol)
}

/// Affine frame of a point cloud: the points' affine dimension (up to `tol`)
/// and an orthonormal basis anchored at `points[0]`.
struct Frame {
    origin: Vector,
    basis: Vec<Vector>,
    anchors: Vec<usize>,
}

impl Frame {
    fn coords(&self, p: &Vector) -> Vec<f64> {
        let rel = p - &self.origin;
        self.basis.iter().map(|e| e.dot(&rel)).collect()
    }
}

/// Component of `v` orthogonal to the span of the orthonormal `basis`.
fn reject(v: &Vector, basis: &[Vector]) -> Vector {
    basis.iter().fold(v.clone(), |acc, e| acc.add_scaled(-e.dot(v), e))
}

fn affine_frame(points: &[&Vector], tol: f64) -> Frame {
    let origin = points[0].clone();
    let mut basis: Vec<Vector> = Vec::new();
    let mut anchors = vec![0];
    while basis.len() < origin.dim() {
        let (idx, off) = points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, reject(&(*p - &origin), &basis)))
            .map(|(i, r)| (i, r.norm()))
            .fold((0, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
        if off <= tol {
            break;
        }
        let r = reject(&(points[idx] - &origin), &basis);
        // Re-orthogonalize once; keeps the basis clean for nearly dependent points.
        let r = reject(&r, &basis);
        let n = r.norm();
        basis.push(&r * (1.0 / n));
        anchors.push(idx);
    }
    Frame {
        origin,
        basis,
        anchors,
    }
}

fn hull_indices(points: &[&Vector], tol: f64) -> Result<Vec<usize>> {
    let frame = affine_frame(points, tol);
    match frame.basis.len() {
        0 => Ok(vec![0]),
        1 => {
            let t: Vec<f64> = points.iter().map(|p| frame.coords(p)[0]).collect();
            let (mut lo, mut hi) = (0, 0);
            for (i, &ti) in t.iter().enumerate() {
                if ti < t[lo] {
                    lo = i;
                }
                if ti > t[hi] {
                    hi = i;
                }
            }
            Ok(vec![lo, hi])
        }
        2 => {
            let planar: Vec<[f64; 2]> = points
                .iter()
                .map(|p| {
                    let c = frame.coords(p);
                    [c[0], c[1]]
                })
                .collect();
            Ok(monotone_chain(&planar, tol))
        }
        _ => {
            let candidates = incremental_hull_3d(points, &frame.anchors, tol);
            prune_non_extreme(points, candidates, tol)
        }
    }
}

#[inline]
fn cross2(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

#[inline]
fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Andrew's monotone chain over planar coordinates. A point survives only if
/// it lies more than `tol` outside the chord joining its hull neighbours.
fn monotone_chain(pts: &[[f64; 2]], tol: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&i, &j| {
        pts[i][0]
            .total_cmp(&pts[j][0])
            .then(pts[i][1].total_cmp(&pts[j][1]))
    });
    let mut uniq: Vec<usize> = Vec::with_capacity(order.len());
    for i in order {
        if uniq.iter().all(|&j| dist2(pts[i], pts[j]) > tol) {
            uniq.push(i);
        }
    }
    if uniq.len() <= 2 {
        return uniq;
    }

    // `a` is kept between `o` and `p` only when it is strictly right of o→p
    // by more than tol (the chain turns counter-clockwise).
    let keeps = |o: usize, a: usize, p: usize| {
        let len = dist2(pts[o], pts[p]);
        len > 0.0 && -cross2(pts[o], pts[p], pts[a]) / len > tol
    };
    let build = |seq: &mut dyn Iterator<Item = usize>| {
        let mut chain: Vec<usize> = Vec::new();
        for p in seq {
            while chain.len() >= 2 && !keeps(chain[chain.len() - 2], chain[chain.len() - 1], p) {
                chain.pop();
            }
            chain.push(p);
        }
        chain
    };
    let mut lower = build(&mut uniq.iter().copied());
    let mut upper = build(&mut uniq.iter().rev().copied());
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

struct Face {
    v: [usize; 3],
    normal: Vector,
    offset: f64,
}

impl Face {
    fn new(points: &[&Vector], v: [usize; 3], interior: &Vector) -> Option<Face> {
        let (a, b, c) = (points[v[0]], points[v[1]], points[v[2]]);
        let ab = b - a;
        let ac = c - a;
        let (x, y) = (ab.coords(), ac.coords());
        let n = Vector(vec![
            x[1] * y[2] - x[2] * y[1],
            x[2] * y[0] - x[0] * y[2],
            x[0] * y[1] - x[1] * y[0],
        ]);
        let len = n.norm();
        if len == 0.0 {
            return None;
        }
        let mut normal = &n * (1.0 / len);
        let mut verts = v;
        if normal.dot(&(interior - a)) > 0.0 {
            normal = -&normal;
            verts.swap(1, 2);
        }
        let offset = normal.dot(a);
        Some(Face {
            v: verts,
            normal,
            offset,
        })
    }

    #[inline]
    fn height(&self, p: &Vector) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// Incremental 3D hull seeded with the four frame anchors. Returns indices of
/// all face vertices; coplanar leftovers are pruned by the caller.
fn incremental_hull_3d(points: &[&Vector], anchors: &[usize], tol: f64) -> Vec<usize> {
    let seed = [anchors[0], anchors[1], anchors[2], anchors[3]];
    let interior = &seed
        .iter()
        .fold(Vector::zeros(3), |acc, &i| &acc + points[i])
        * 0.25;

    let mut faces: Vec<Face> = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
        .iter()
        .filter_map(|t| Face::new(points, [seed[t[0]], seed[t[1]], seed[t[2]]], &interior))
        .collect();

    for (p_idx, p) in points.iter().enumerate() {
        if seed.contains(&p_idx) {
            continue;
        }
        let visible: Vec<bool> = faces.iter().map(|f| f.height(p) > tol).collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for (f, _) in faces.iter().zip(&visible).filter(|(_, &vis)| vis) {
            for k in 0..3 {
                edges.push((f.v[k], f.v[(k + 1) % 3]));
            }
        }
        let horizon: Vec<(usize, usize)> = edges
            .iter()
            .copied()
            .filter(|&(a, b)| !edges.contains(&(b, a)))
            .collect();
        let mut kept: Vec<Face> = faces
            .into_iter()
            .zip(visible)
            .filter(|(_, vis)| !vis)
            .map(|(f, _)| f)
            .collect();
        for (a, b) in horizon {
            if let Some(face) = Face::new(points, [a, b, p_idx], &interior) {
                kept.push(face);
            }
        }
        faces = kept;
    }

    let mut verts: Vec<usize> = faces.iter().flat_map(|f| f.v).collect();
    verts.sort_unstable();
    verts.dedup();
    verts
}

/// Drops candidates lying within `tol` of the hull of the other survivors.
fn prune_non_extreme(points: &[&Vector], candidates: Vec<usize>, tol: f64) -> Result<Vec<usize>> {
    let mut kept = candidates;
    let mut i = 0;
    while i < kept.len() {
        let others: Vec<Vector> = kept
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &k)| points[k].clone())
            .collect();
        if others.is_empty() {
            break;
        }
        let rest = Polytope { vertices: others };
        if project_onto(&rest, points[kept[i]])?.dist <= tol {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(kept)
}

/// Nearest point of `conv(P.vertices)` to `z`, by Wolfe's minimum-norm-point
/// iteration on the shifted vertices `v − z`.
///
/// Stops once the variational-inequality residual
/// `max_v ⟨z − p, v − p⟩` drops below `EPS_GEOM · max(1, R²)`, with `R` the
/// largest vertex distance from `z`. Fails after `10·(n + d)²` iterations.
pub fn project_onto(polytope: &Polytope, z: &Vector) -> Result<Projection> {
    z.ensure_dim(polytope.dim())?;
    let verts = polytope.vertices();
    if verts.len() == 1 {
        return Ok(Projection {
            dist: verts[0].distance(z),
            point: verts[0].clone(),
        });
    }
    if polytope.dim() == 1 {
        let lo = verts[0].coords()[0];
        let hi = verts[verts.len() - 1].coords()[0];
        let p = z.coords()[0].clamp(lo, hi);
        return Ok(Projection {
            point: Vector::scalar(p),
            dist: (z.coords()[0] - p).abs(),
        });
    }
    let shifted: Vec<Vector> = verts.iter().map(|v| v - z).collect();
    let max_iter = 10 * (verts.len() + polytope.dim()).pow(2);
    let x = min_norm_point(&shifted, EPS_GEOM, max_iter)?;
    Ok(Projection {
        dist: x.norm(),
        point: z + &x,
    })
}

/// Affine minimizer of ‖Σ αᵢ qᵢ‖ subject to Σ αᵢ = 1 over the corral.
fn affine_minimizer(q: &[Vector], corral: &[usize]) -> Vec<f64> {
    let m = corral.len();
    if m == 1 {
        return vec![1.0];
    }
    let d = q[0].dim();
    let base = &q[corral[0]];
    let diffs = DMatrix::from_fn(d, m - 1, |r, c| {
        q[corral[c + 1]].coords()[r] - base.coords()[r]
    });
    let rhs = -DVector::from_column_slice(base.coords());
    let beta = diffs
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .expect("SVD computed with both factors");
    let mut alpha = Vec::with_capacity(m);
    alpha.push(1.0 - beta.sum());
    alpha.extend(beta.iter().copied());
    alpha
}

fn combine(q: &[Vector], corral: &[usize], weights: &[f64]) -> Vector {
    corral
        .iter()
        .zip(weights)
        .fold(Vector::zeros(q[0].dim()), |acc, (&i, &w)| acc.add_scaled(w, &q[i]))
}

fn min_norm_point(q: &[Vector], eps: f64, max_iter: usize) -> Result<Vector> {
    const WEIGHT_TOL: f64 = 1e-12;
    let scale = q.iter().map(Vector::norm_sq).fold(1.0, f64::max);
    let threshold = eps * scale;

    let start = (0..q.len())
        .min_by(|&a, &b| q[a].norm_sq().total_cmp(&q[b].norm_sq()))
        .expect("nonempty");
    let mut corral = vec![start];
    let mut lambda = vec![1.0];
    let mut x = q[start].clone();
    let mut iterations = 0;

    loop {
        let xx = x.norm_sq();
        let (j, min_dot) = q
            .iter()
            .enumerate()
            .map(|(i, qi)| (i, x.dot(qi)))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        let residual = xx - min_dot;
        if residual <= threshold {
            return Ok(x);
        }
        iterations += 1;
        if iterations > max_iter || corral.contains(&j) {
            return Err(GeometryError::ProjectionFailed {
                iterations,
                residual,
            });
        }
        corral.push(j);
        lambda.push(0.0);

        loop {
            iterations += 1;
            if iterations > max_iter {
                return Err(GeometryError::ProjectionFailed {
                    iterations,
                    residual,
                });
            }
            let alpha = affine_minimizer(q, &corral);
            if alpha.iter().all(|&a| a > WEIGHT_TOL) {
                x = combine(q, &corral, &alpha);
                lambda = alpha;
                break;
            }
            let theta = lambda
                .iter()
                .zip(&alpha)
                .filter(|(_, &a)| a <= WEIGHT_TOL)
                .map(|(&l, &a)| if l - a > 0.0 { l / (l - a) } else { 0.0 })
                .fold(1.0, f64::min);
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l = theta * a + (1.0 - theta) * *l;
            }
            // Drop at least the coordinate that hit zero first.
            let worst = lambda
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
                .expect("nonempty corral");
            let keep: Vec<bool> = lambda
                .iter()
                .enumerate()
                .map(|(i, &l)| i != worst && l > WEIGHT_TOL)
                .collect();
            let mut flags = keep.iter();
            corral.retain(|_| *flags.next().expect("same length"));
            let mut flags = keep.iter();
            lambda.retain(|_| *flags.next().expect("same length"));
            if corral.is_empty() {
                return Err(GeometryError::ProjectionFailed {
                    iterations,
                    residual,
                });
            }
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::from_slice(c)
    }

    fn square() -> Polytope {
        convex_hull(
            &[v(&[1.0, 1.0]), v(&[1.0, -1.0]), v(&[-1.0, 1.0]), v(&[-1.0, -1.0])],
            EPS_GEOM,
        )
        .unwrap()
    }

    #[test]
    fn vector_rejects_bad_input() {
        assert_eq!(Vector::new(vec![]), Err(GeometryError::ZeroDimension));
        assert!(matches!(
            Vector::new(vec![1.0, f64::NAN]),
            Err(GeometryError::NonFinite(_))
        ));
    }

    #[test]
    fn hull_1d_interval() {
        let p = convex_hull(&[v(&[0.0]), v(&[1.0]), v(&[0.5])], EPS_GEOM).unwrap();
        assert_eq!(p.vertices(), &[v(&[0.0]), v(&[1.0])]);
    }

    #[test]
    fn hull_drops_interior_point() {
        let p = convex_hull(
            &[
                v(&[1.0, 1.0]),
                v(&[0.0, 0.0]),
                v(&[1.0, -1.0]),
                v(&[-1.0, 1.0]),
                v(&[-1.0, -1.0]),
            ],
            EPS_GEOM,
        )
        .unwrap();
        assert_eq!(p, square());
        assert_eq!(
            p.vertices(),
            &[v(&[-1.0, -1.0]), v(&[-1.0, 1.0]), v(&[1.0, -1.0]), v(&[1.0, 1.0])]
        );
    }

    #[test]
    fn hull_drops_point_on_segment_interior() {
        // (1,0) = ½(0,1) + ½(0,−1) weighted against (3,0): weights (1/3, 1/3, 1/3).
        let p = convex_hull(
            &[
                v(&[1.0, 0.0]),
                v(&[-1.0, 0.0]),
                v(&[0.0, 1.0]),
                v(&[0.0, -1.0]),
                v(&[3.0, 0.0]),
            ],
            EPS_GEOM,
        )
        .unwrap();
        assert_eq!(
            p.vertices(),
            &[v(&[-1.0, 0.0]), v(&[0.0, -1.0]), v(&[0.0, 1.0]), v(&[3.0, 0.0])]
        );
    }

    #[test]
    fn hull_degenerate_inputs() {
        let single = convex_hull(&[v(&[2.0, 3.0]), v(&[2.0, 3.0])], EPS_GEOM).unwrap();
        assert_eq!(single.vertices(), &[v(&[2.0, 3.0])]);

        let collinear = convex_hull(
            &[v(&[0.0, 0.0]), v(&[2.0, 2.0]), v(&[1.0, 1.0]), v(&[-1.0, -1.0])],
            EPS_GEOM,
        )
        .unwrap();
        assert_eq!(collinear.vertices(), &[v(&[-1.0, -1.0]), v(&[2.0, 2.0])]);

        // Planar set embedded in R^3.
        let planar = convex_hull(
            &[
                v(&[0.0, 0.0, 1.0]),
                v(&[1.0, 0.0, 1.0]),
                v(&[0.0, 1.0, 1.0]),
                v(&[1.0, 1.0, 1.0]),
                v(&[0.5, 0.5, 1.0]),
            ],
            EPS_GEOM,
        )
        .unwrap();
        assert_eq!(planar.len(), 4);
    }

    #[test]
    fn hull_3d_cube_with_face_and_body_points() {
        let mut pts = Vec::new();
        for x in [0.0, 1.0] {
            for y in [0.0, 1.0] {
                for z in [0.0, 1.0] {
                    pts.push(v(&[x, y, z]));
                }
            }
        }
        pts.push(v(&[0.5, 0.5, 0.5]));
        pts.push(v(&[0.5, 0.5, 1.0]));
        pts.push(v(&[1.0, 0.5, 0.5]));
        pts.push(v(&[0.5, 0.0, 0.0]));
        let hull = convex_hull(&pts, EPS_GEOM).unwrap();
        assert_eq!(hull.len(), 8);
        assert!(hull.vertices().iter().all(|p| p.coords().iter().all(|&c| c == 0.0 || c == 1.0)));
    }

    #[test]
    fn hull_errors() {
        assert_eq!(convex_hull(&[], EPS_GEOM), Err(GeometryError::EmptyPointSet));
        assert!(matches!(
            convex_hull(&[v(&[0.0]), v(&[0.0, 1.0])], EPS_GEOM),
            Err(GeometryError::DimensionMismatch { .. })
        ));
        assert_eq!(
            convex_hull(&[v(&[0.0; 4])], EPS_GEOM),
            Err(GeometryError::UnsupportedDimension(4))
        );
        assert!(matches!(
            convex_hull(&[v(&[0.0])], 0.0),
            Err(GeometryError::InvalidTolerance(_))
        ));
    }

    #[test]
    fn extreme_points_examples() {
        assert_eq!(extreme_points(&Polytope::point(v(&[2.0, 3.0]))), vec![v(&[2.0, 3.0])]);
        assert_eq!(
            extreme_points(&Polytope::interval(-2.0, 2.0)),
            vec![v(&[-2.0]), v(&[2.0])]
        );
        assert_eq!(extreme_points(&square()).len(), 4);
    }

    #[test]
    fn support_examples() {
        assert_eq!(square().support(&v(&[1.0, 0.0])).unwrap(), 1.0);
        assert_eq!(Polytope::interval(2.0, 3.0).support(&v(&[-2.0])).unwrap(), -4.0);
        assert_eq!(square().support(&v(&[0.0, 0.0])).unwrap(), 0.0);
        assert!(square().support(&v(&[1.0])).is_err());
    }

    #[test]
    fn contains_examples() {
        assert!(contains(&Polytope::interval(-2.0, 2.0), &v(&[0.0]), EPS_GEOM).unwrap());
        assert!(!contains(&Polytope::interval(-3.0, -2.0), &v(&[0.0]), EPS_GEOM).unwrap());
        let sq = square();
        assert!(contains(&sq, &sq.vertices()[0].clone(), 0.0).unwrap());
        assert!(contains(&sq, &v(&[0.0]), 0.0).is_err());
    }

    #[test]
    fn ball_contains_examples() {
        let b = Ball::new(v(&[0.0, 0.0]), 2.0).unwrap();
        assert!(ball_contains(&b, &v(&[0.0, 2.0]), EPS_GEOM).unwrap());
        assert!(!ball_contains(&b, &v(&[0.0, 2.0 + 10.0 * EPS_GEOM]), EPS_GEOM).unwrap());
        let x = v(&[0.3, -0.7]);
        let degenerate = Ball::new(x.clone(), 0.0).unwrap();
        assert!(ball_contains(&degenerate, &x, 0.0).unwrap());
        assert!(Ball::new(x, -1.0).is_err());
    }

    #[test]
    fn projection_examples() {
        let pr = project_onto(&Polytope::interval(-3.0, -2.0), &v(&[0.0])).unwrap();
        assert_eq!(pr.point, v(&[-2.0]));
        assert_eq!(pr.dist, 2.0);

        let pr = project_onto(&square(), &v(&[3.0, 0.0])).unwrap();
        assert!(pr.point.distance(&v(&[1.0, 0.0])) < 1e-12);
        assert!((pr.dist - 2.0).abs() < 1e-12);

        let inside = v(&[0.25, -0.5]);
        let pr = project_onto(&square(), &inside).unwrap();
        assert!(pr.point.distance(&inside) < 1e-12);
        assert!(pr.dist < 1e-12);
    }

    #[test]
    fn projection_onto_3d_simplex_face() {
        let tet = convex_hull(
            &[v(&[0.0, 0.0, 0.0]), v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0]), v(&[0.0, 0.0, 1.0])],
            EPS_GEOM,
        )
        .unwrap();
        let pr = project_onto(&tet, &v(&[1.0, 1.0, 1.0])).unwrap();
        let third = 1.0 / 3.0;
        assert!(pr.point.distance(&v(&[third, third, third])) < 1e-12);
    }
}
