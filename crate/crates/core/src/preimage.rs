//! Grid approximations of preimages `F⁻¹(ȳ)` of ROSL maps with negative
//! constant `ell`.
//!
//! For a base point `x` the cover
//!
//! ```text
//! G_F(x, ȳ) = ⋃_{y ∈ F(x)} B(x + (ȳ − y)/(2ℓ), ‖ȳ − y‖/(2|ℓ|))
//! ```
//!
//! contains the whole preimage, and intersecting the covers over all base
//! points recovers it exactly for upper semicontinuous maps. Every ball has
//! `x` on its boundary. Only the vertices of `F(x)` that stay extreme after
//! adjoining `ȳ` are needed to generate the union.
//!
//! Tolerances act on the target: membership "within `tol`" means membership
//! in the cover of some `ȳ'` with `‖ȳ' − ȳ‖ ≤ tol`. The brute-force oracle
//! uses the same convention (`dist(ȳ, F(z)) ≤ tol`), which keeps every oracle
//! node inside every outer mask. On top of that every ball is widened by
//! [`EPS_GEOM`] in position, so rounding in node coordinates cannot push a
//! node off a ball it touches.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{self, Ball, GeometryError, Polytope, Vector, EPS_GEOM};
use crate::maps::{MapError, SetValuedMap};

#[derive(Debug, Error)]
pub enum PreimageError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("no base points")]
    EmptyBase,
    #[error("vertex index {index} out of range ({count} vertices)")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("z in preimage: no base point can exclude it")]
    InPreimage,
}

pub type Result<T, E = PreimageError> = std::result::Result<T, E>;

/// Scale trials used by [`witness_excluding_base`].
pub const MAX_DELTA_TRIALS: usize = 64;

/// Axis-aligned box sampled with `nodes_per_axis` nodes on every axis.
/// Node indices run with axis 0 fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    lower: Vector,
    upper: Vector,
    nodes_per_axis: usize,
}

impl GridSpec {
    pub fn new(lower: Vector, upper: Vector, nodes_per_axis: usize) -> Result<Self> {
        upper.ensure_dim(lower.dim())?;
        if nodes_per_axis < 2 {
            return Err(PreimageError::InvalidGrid("need at least 2 nodes per axis".into()));
        }
        if lower.coords().iter().zip(upper.coords()).any(|(l, u)| l >= u) {
            return Err(PreimageError::InvalidGrid("lower must be < upper on every axis".into()));
        }
        let count = (nodes_per_axis as u128).checked_pow(lower.dim() as u32);
        if count.is_none_or(|c| c > u32::MAX as u128) {
            return Err(PreimageError::InvalidGrid("too many nodes".into()));
        }
        Ok(Self {
            lower,
            upper,
            nodes_per_axis,
        })
    }

    /// Same interval `[lo, hi]` on each of `dim` axes.
    pub fn cube(dim: usize, lo: f64, hi: f64, nodes_per_axis: usize) -> Result<Self> {
        Self::new(Vector::new(vec![lo; dim])?, Vector::new(vec![hi; dim])?, nodes_per_axis)
    }

    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    pub fn lower(&self) -> &Vector {
        &self.lower
    }

    pub fn upper(&self) -> &Vector {
        &self.upper
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes_per_axis
    }

    pub fn node_count(&self) -> usize {
        self.nodes_per_axis.pow(self.dim() as u32)
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.upper.coords()[axis] - self.lower.coords()[axis]) / (self.nodes_per_axis - 1) as f64
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).fold(f64::INFINITY, f64::min)
    }

    pub fn max_spacing(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).fold(0.0, f64::max)
    }

    /// Membership slack for grid sweeps: half the smallest spacing.
    pub fn tol_grid(&self) -> f64 {
        0.5 * self.min_spacing()
    }

    pub fn multi_index(&self, mut index: usize) -> Vec<usize> {
        (0..self.dim())
            .map(|_| {
                let i = index % self.nodes_per_axis;
                index /= self.nodes_per_axis;
                i
            })
            .collect()
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .rev()
            .fold(0, |acc, &i| acc * self.nodes_per_axis + i)
    }

    fn coord(&self, axis: usize, i: usize) -> f64 {
        let (lo, hi) = (self.lower.coords()[axis], self.upper.coords()[axis]);
        let last = self.nodes_per_axis - 1;
        if i == last {
            hi
        } else {
            lo + (hi - lo) * i as f64 / last as f64
        }
    }

    pub fn node(&self, index: usize) -> Vector {
        let multi = self.multi_index(index);
        Vector::new(
            multi
                .iter()
                .enumerate()
                .map(|(axis, &i)| self.coord(axis, i))
                .collect(),
        )
        .expect("finite grid coordinates")
    }

    pub fn nodes(&self) -> Vec<Vector> {
        (0..self.node_count()).map(|i| self.node(i)).collect()
    }
}

impl std::fmt::Display for GridSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "lower={} upper={} nodes={}", self.lower, self.upper, self.nodes_per_axis)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaskMeta {
    pub map_id: String,
    pub ybar: Vector,
    /// Base-point description, or `"oracle"`.
    pub base: String,
    pub tol: f64,
}

/// Boolean membership per grid node.
#[derive(Clone, Debug, PartialEq)]
pub struct GridMask {
    pub grid: GridSpec,
    pub member: Vec<bool>,
    pub meta: MaskMeta,
}

impl GridMask {
    pub fn count(&self) -> usize {
        self.member.iter().filter(|&&m| m).count()
    }

    pub fn member_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.member
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| i)
    }

    pub fn member_nodes(&self) -> Vec<Vector> {
        self.member_indices().map(|i| self.grid.node(i)).collect()
    }

    fn source(&self) -> &'static str {
        if self.meta.base == "oracle" {
            "oracle"
        } else {
            "outer"
        }
    }

    /// CSV export: one comment header line, then `coords...,0|1` per node.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.member.len() * 16);
        let _ = writeln!(
            out,
            "# dim={} lower={} upper={} nodes={} ybar={} source={}",
            self.grid.dim(),
            self.grid.lower,
            self.grid.upper,
            self.grid.nodes_per_axis,
            self.meta.ybar,
            self.source()
        );
        for (i, &m) in self.member.iter().enumerate() {
            let _ = writeln!(out, "{},{}", self.grid.node(i), u8::from(m));
        }
        out
    }

    /// Plain PGM (P2) for 2D masks: axis 0 left to right, axis 1 bottom to
    /// top (the first image row is the largest axis-1 coordinate).
    pub fn to_pgm(&self) -> Option<String> {
        if self.grid.dim() != 2 {
            return None;
        }
        let n = self.grid.nodes_per_axis;
        let mut out = format!("P2\n{n} {n}\n255\n");
        for row in (0..n).rev() {
            let line: Vec<&str> = (0..n)
                .map(|col| if self.member[row * n + col] { "255" } else { "0" })
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        Some(out)
    }
}

/// Node-wise comparison of an outer mask against the oracle mask.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskComparison {
    pub outer_members: usize,
    pub oracle_members: usize,
    /// In the outer mask but not in the oracle.
    pub outer_only: usize,
    /// In the oracle but excluded by the outer mask.
    pub oracle_only: usize,
    /// Largest distance from a disagreeing node to the nearest oracle node of
    /// the opposite class (the oracle's boundary). Zero without disagreement.
    pub max_band_distance: f64,
    pub spacing: f64,
}

impl MaskComparison {
    /// All disagreement lies within `k` grid spacings of the oracle boundary.
    pub fn within_band(&self, k: f64) -> bool {
        self.max_band_distance <= k * self.spacing * (1.0 + 1e-9)
    }

    pub fn to_report(&self) -> String {
        format!(
            "outer_members={}\noracle_members={}\nouter_only={}\noracle_only={}\nmax_band_distance={}\nband_limit={}\nwithin_band={}",
            self.outer_members,
            self.oracle_members,
            self.outer_only,
            self.oracle_only,
            self.max_band_distance,
            2.0 * self.spacing,
            self.within_band(2.0)
        )
    }
}

/// Distance from node `index` to the nearest node whose oracle membership is
/// `target`, by ring search in index space.
fn nearest_with(mask: &GridMask, index: usize, target: bool) -> f64 {
    let grid = &mask.grid;
    let n = grid.nodes_per_axis as i64;
    let dim = grid.dim();
    let here = grid.multi_index(index);
    let z = grid.node(index);
    let h_min = grid.min_spacing();
    let mut best = f64::INFINITY;
    for r in 1..n {
        if (r as f64 - 1.0) * h_min > best {
            break;
        }
        let side = (2 * r + 1) as usize;
        for k in 0..side.pow(dim as u32) {
            let mut rem = k;
            let mut offset = Vec::with_capacity(dim);
            for _ in 0..dim {
                offset.push((rem % side) as i64 - r);
                rem /= side;
            }
            if offset.iter().map(|o| o.abs()).max() != Some(r) {
                continue;
            }
            let mut multi = Vec::with_capacity(dim);
            let mut inside = true;
            for (axis, o) in offset.iter().enumerate() {
                let c = here[axis] as i64 + o;
                if c < 0 || c >= n {
                    inside = false;
                    break;
                }
                multi.push(c as usize);
            }
            if !inside {
                continue;
            }
            let j = grid.flat_index(&multi);
            if mask.member[j] == target {
                best = best.min(z.distance(&grid.node(j)));
            }
        }
    }
    best
}

pub fn compare_masks(outer: &GridMask, oracle: &GridMask) -> MaskComparison {
    assert_eq!(outer.grid, oracle.grid, "masks must share a grid");
    let disagreements: Vec<usize> = (0..outer.member.len())
        .filter(|&i| outer.member[i] != oracle.member[i])
        .collect();
    let outer_only = disagreements.iter().filter(|&&i| outer.member[i]).count();
    let max_band_distance = disagreements
        .par_iter()
        .map(|&i| nearest_with(oracle, i, !oracle.member[i]))
        .reduce(|| 0.0, f64::max);
    MaskComparison {
        outer_members: outer.count(),
        oracle_members: oracle.count(),
        outer_only,
        oracle_only: disagreements.len() - outer_only,
        max_band_distance,
        spacing: outer.grid.max_spacing(),
    }
}

fn check_ell(map: &SetValuedMap) -> Result<f64> {
    let ell = map.ell();
    if ell.is_nan() || ell >= 0.0 {
        return Err(MapError::NonNegativeEll(ell).into());
    }
    Ok(ell)
}

fn ball_for(x: &Vector, ybar: &Vector, y: &Vector, ell: f64) -> Ball {
    let diff = ybar - y;
    let center = x.add_scaled(1.0 / (2.0 * ell), &diff);
    let radius = diff.norm() / (2.0 * ell.abs());
    Ball::new(center, radius).expect("finite radius")
}

/// Balls generating `G_F(x, ȳ)`: one per vertex of `F(x)`, or, when
/// `filtered`, one per vertex kept by [`gf_extreme_filter`].
pub fn gf_balls(map: &SetValuedMap, x: &Vector, ybar: &Vector, filtered: bool) -> Result<Vec<Ball>> {
    let ell = check_ell(map)?;
    ybar.ensure_dim(map.dim())?;
    let fx = map.eval(x)?;
    let ys = if filtered {
        gf_extreme_filter(&fx, ybar)?
    } else {
        fx.vertices().to_vec()
    };
    Ok(ys.iter().map(|y| ball_for(x, ybar, y, ell)).collect())
}

/// Vertices of `Fx` that remain extreme in `conv(Fx ∪ {ȳ})`.
pub fn gf_extreme_filter(fx: &Polytope, ybar: &Vector) -> Result<Vec<Vector>> {
    ybar.ensure_dim(fx.dim())?;
    let mut pts = fx.vertices().to_vec();
    pts.push(ybar.clone());
    let hull = geometry::convex_hull(&pts, EPS_GEOM)?;
    let kept: Vec<Vector> = fx
        .vertices()
        .iter()
        .filter(|y| hull.vertices().iter().any(|h| h.distance(y) <= EPS_GEOM))
        .cloned()
        .collect();
    debug_assert!(!kept.is_empty());
    Ok(kept)
}

/// Precomputed generators of `G_F(x, ȳ)` for repeated membership queries.
#[derive(Clone, Debug)]
pub struct GfCover {
    x: Vector,
    ybar: Vector,
    ell: f64,
    generators: Vec<Vector>,
    /// Row-major `(ȳ − y)/ℓ` per generator.
    rows: Vec<f64>,
    /// `2ε·r_y + ε²` per generator.
    offsets: Vec<f64>,
}

impl GfCover {
    pub fn new(map: &SetValuedMap, x: &Vector, ybar: &Vector, filtered: bool) -> Result<Self> {
        let ell = check_ell(map)?;
        ybar.ensure_dim(map.dim())?;
        let fx = map.eval(x)?;
        Self::from_image(x.clone(), ybar.clone(), ell, &fx, filtered)
    }

    pub fn from_image(
        x: Vector,
        ybar: Vector,
        ell: f64,
        fx: &Polytope,
        filtered: bool,
    ) -> Result<Self> {
        x.ensure_dim(fx.dim())?;
        let generators = if filtered {
            gf_extreme_filter(fx, &ybar)?
        } else {
            fx.vertices().to_vec()
        };
        let mut rows = Vec::with_capacity(generators.len() * x.dim());
        let mut offsets = Vec::with_capacity(generators.len());
        for y in &generators {
            let diff = &ybar - y;
            rows.extend(diff.coords().iter().map(|c| c / ell));
            let radius = diff.norm() / (2.0 * ell.abs());
            offsets.push(2.0 * EPS_GEOM * radius + EPS_GEOM * EPS_GEOM);
        }
        Ok(Self {
            x,
            ybar,
            ell,
            generators,
            rows,
            offsets,
        })
    }

    pub fn base(&self) -> &Vector {
        &self.x
    }

    pub fn generators(&self) -> &[Vector] {
        &self.generators
    }

    /// Support-style test with `w = z − x`: for some generator `y`,
    /// `‖w‖² ≤ ⟨w, ȳ − y⟩/ℓ + tol·‖w‖/|ℓ| + 2ε·r_y + ε²` where `r_y` is the
    /// ball radius and `ε = EPS_GEOM`. With `tol = ε = 0` this is
    /// `‖w‖² ≤ (⟨w, ȳ⟩ − σ_{F(x)}(w))/ℓ`.
    pub fn contains(&self, z: &Vector, tol: f64) -> bool {
        let d = self.x.dim();
        let (zc, xc) = (z.coords(), self.x.coords());
        let mut w = [0.0f64; 4];
        let w: &mut [f64] = if d <= 4 { &mut w[..d] } else { return self.contains_slow(z, tol) };
        let mut ww = 0.0;
        for k in 0..d {
            w[k] = zc[k] - xc[k];
            ww += w[k] * w[k];
        }
        if ww == 0.0 {
            return true;
        }
        let need = ww - tol * ww.sqrt() / self.ell.abs();
        self.rows
            .chunks_exact(d)
            .zip(&self.offsets)
            .any(|(row, off)| row.iter().zip(w.iter()).map(|(a, b)| a * b).sum::<f64>() + off >= need)
    }

    fn contains_slow(&self, z: &Vector, tol: f64) -> bool {
        let w = z - &self.x;
        let ww = w.norm_sq();
        if ww == 0.0 {
            return true;
        }
        let need = ww - tol * ww.sqrt() / self.ell.abs();
        self.rows
            .chunks_exact(w.dim())
            .zip(&self.offsets)
            .any(|(row, off)| row.iter().zip(w.coords()).map(|(a, b)| a * b).sum::<f64>() + off >= need)
    }

    pub fn balls(&self) -> Vec<Ball> {
        self.generators
            .iter()
            .map(|y| ball_for(&self.x, &self.ybar, y, self.ell))
            .collect()
    }
}

/// Support-function test for `z ∈ G_F(x, ȳ)` within `tol`.
pub fn gf_membership(
    map: &SetValuedMap,
    x: &Vector,
    ybar: &Vector,
    z: &Vector,
    tol: f64,
) -> Result<bool> {
    z.ensure_dim(map.dim())?;
    Ok(GfCover::new(map, x, ybar, false)?.contains(z, tol))
}

/// Explicit ball-union test for `z ∈ G_F(x, ȳ)` within `tol`: a ball of
/// radius `r` around `c` admits `z` iff
/// `‖z − c‖² ≤ (r + ε)² + tol·‖z − x‖/|ℓ|` with `ε = EPS_GEOM`.
pub fn gf_membership_balls(balls: &[Ball], x: &Vector, ell: f64, z: &Vector, tol: f64) -> bool {
    let slack = tol * z.distance(x) / ell.abs();
    balls.iter().any(|b| {
        let d = b.center.distance(z);
        let r = b.radius + EPS_GEOM;
        d * d <= r * r + slack
    })
}

fn describe_points(points: &[Vector]) -> String {
    let parts: Vec<String> = points.iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", parts.join(";"))
}

/// Deterministic shuffle so that sweeps hit an excluding base point early.
fn shuffled<T>(mut items: Vec<T>) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    items.shuffle(&mut rng);
    items
}

fn sweep(
    grid: &GridSpec,
    covers: &[GfCover],
    tol: f64,
    prior: Option<&[bool]>,
) -> Vec<bool> {
    (0..grid.node_count())
        .into_par_iter()
        .map(|i| {
            if prior.is_some_and(|p| !p[i]) {
                return false;
            }
            let z = grid.node(i);
            covers.iter().all(|c| c.contains(&z, tol))
        })
        .collect()
}

fn build_covers(
    map: &SetValuedMap,
    ybar: &Vector,
    base_points: &[Vector],
    filtered: bool,
) -> Result<Vec<GfCover>> {
    let covers = base_points
        .par_iter()
        .map(|x| GfCover::new(map, x, ybar, filtered))
        .collect::<Result<Vec<_>>>()?;
    Ok(shuffled(covers))
}

fn validate_inputs(map: &SetValuedMap, ybar: &Vector, grid: &GridSpec) -> Result<()> {
    ybar.ensure_dim(map.dim())?;
    if grid.dim() != map.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: map.dim(),
            found: grid.dim(),
        }
        .into());
    }
    Ok(())
}

/// Outer approximation of `F⁻¹(ȳ)`: nodes lying in the cover of every base
/// point, at tolerance `grid.tol_grid()`.
pub fn preimage_outer(
    map: &SetValuedMap,
    ybar: &Vector,
    grid: &GridSpec,
    base_points: &[Vector],
    filtered: bool,
) -> Result<GridMask> {
    preimage_outer_tol(map, ybar, grid, base_points, filtered, grid.tol_grid())
}

pub fn preimage_outer_tol(
    map: &SetValuedMap,
    ybar: &Vector,
    grid: &GridSpec,
    base_points: &[Vector],
    filtered: bool,
    tol: f64,
) -> Result<GridMask> {
    validate_inputs(map, ybar, grid)?;
    if base_points.is_empty() {
        return Err(PreimageError::EmptyBase);
    }
    for x in base_points {
        x.ensure_dim(map.dim())?;
    }
    let covers = build_covers(map, ybar, base_points, filtered)?;
    Ok(GridMask {
        grid: grid.clone(),
        member: sweep(grid, &covers, tol, None),
        meta: MaskMeta {
            map_id: map.id().to_string(),
            ybar: ybar.clone(),
            base: describe_points(base_points),
            tol,
        },
    })
}

/// Where base points come from.
#[derive(Clone, Debug, PartialEq)]
pub enum BaseSource {
    Explicit(Vec<Vector>),
    /// Every grid node.
    Grid,
    /// Start from a coarse 5-per-axis sub-lattice, then repeatedly use all
    /// nodes within `eps` of the current mask as base points.
    Inflate { eps: f64, iters: usize },
}

impl BaseSource {
    pub fn describe(&self) -> String {
        match self {
            BaseSource::Explicit(points) => describe_points(points),
            BaseSource::Grid => "grid".into(),
            BaseSource::Inflate { eps, iters } => format!("inflate:{eps},{iters}"),
        }
    }
}

/// Grid nodes within `eps` of some member node.
pub fn dilate(mask: &GridMask, eps: f64) -> Vec<Vector> {
    let grid = &mask.grid;
    let members = mask.member_nodes();
    (0..grid.node_count())
        .into_par_iter()
        .filter_map(|i| {
            let z = grid.node(i);
            members
                .iter()
                .any(|m| m.distance(&z) <= eps * (1.0 + 1e-12))
                .then_some(z)
        })
        .collect()
}

fn coarse_lattice(grid: &GridSpec) -> Vec<Vector> {
    let per = grid.nodes_per_axis().min(5);
    let last = grid.nodes_per_axis() - 1;
    let picks: Vec<usize> = (0..per).map(|k| (k * last + (per - 1) / 2) / (per - 1)).collect();
    let count = per.pow(grid.dim() as u32);
    (0..count)
        .map(|mut k| {
            let multi: Vec<usize> = (0..grid.dim())
                .map(|_| {
                    let p = picks[k % per];
                    k /= per;
                    p
                })
                .collect();
            grid.node(grid.flat_index(&multi))
        })
        .collect()
}

/// [`preimage_outer`] with a base-point generator.
pub fn preimage_outer_from(
    map: &SetValuedMap,
    ybar: &Vector,
    grid: &GridSpec,
    base: &BaseSource,
    filtered: bool,
    tol: f64,
) -> Result<GridMask> {
    let mut mask = match base {
        BaseSource::Explicit(points) => {
            preimage_outer_tol(map, ybar, grid, points, filtered, tol)?
        }
        BaseSource::Grid => preimage_outer_tol(map, ybar, grid, &grid.nodes(), filtered, tol)?,
        BaseSource::Inflate { eps, iters } => {
            let mut mask = preimage_outer_tol(map, ybar, grid, &coarse_lattice(grid), filtered, tol)?;
            for _ in 0..*iters {
                let base_points = dilate(&mask, *eps);
                if base_points.is_empty() {
                    break;
                }
                let covers = build_covers(map, ybar, &base_points, filtered)?;
                mask.member = sweep(grid, &covers, tol, Some(&mask.member));
            }
            mask
        }
    };
    mask.meta.base = base.describe();
    Ok(mask)
}

/// Brute-force preimage: node `z` is a member iff `dist(ȳ, F(z)) ≤ tol_grid`.
pub fn preimage_oracle(map: &SetValuedMap, ybar: &Vector, grid: &GridSpec) -> Result<GridMask> {
    preimage_oracle_tol(map, ybar, grid, grid.tol_grid())
}

pub fn preimage_oracle_tol(
    map: &SetValuedMap,
    ybar: &Vector,
    grid: &GridSpec,
    tol: f64,
) -> Result<GridMask> {
    validate_inputs(map, ybar, grid)?;
    let member = (0..grid.node_count())
        .into_par_iter()
        .map(|i| -> Result<bool> {
            let fz = map.eval(&grid.node(i))?;
            Ok(geometry::contains(&fz, ybar, tol)?)
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(GridMask {
        grid: grid.clone(),
        member,
        meta: MaskMeta {
            map_id: map.id().to_string(),
            ybar: ybar.clone(),
            base: "oracle".into(),
            tol,
        },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolvabilityReport {
    pub holds: bool,
    /// The localization ball (not inflated).
    pub ball: Ball,
    pub inflation: f64,
    /// Distance from the ball center to the closest oracle member, if any.
    pub nearest_member_distance: Option<f64>,
}

/// Checks that the localization ball `B(x + (ȳ − y)/(2ℓ), ‖ȳ − y‖/(2|ℓ|))`,
/// inflated by one grid spacing, holds an oracle member node. `y` is vertex
/// `y_index` of `F(x)`.
pub fn solvability_check(
    map: &SetValuedMap,
    x: &Vector,
    y_index: usize,
    ybar: &Vector,
    oracle: &GridMask,
) -> Result<SolvabilityReport> {
    let ell = check_ell(map)?;
    ybar.ensure_dim(map.dim())?;
    let fx = map.eval(x)?;
    let y = fx.vertices().get(y_index).ok_or(PreimageError::IndexOutOfRange {
        index: y_index,
        count: fx.len(),
    })?;
    let ball = ball_for(x, ybar, y, ell);
    let inflation = oracle.grid.max_spacing();
    let nearest = oracle
        .member_indices()
        .map(|i| oracle.grid.node(i).distance(&ball.center))
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.min(d))));
    Ok(SolvabilityReport {
        holds: nearest.is_some_and(|d| d <= ball.radius + inflation),
        ball,
        inflation,
        nearest_member_distance: nearest,
    })
}

/// Finds a base point `x = z + δv` whose cover excludes `z`, where `v` points
/// from `ȳ` towards its projection onto `F(z)`. Scales tried:
/// `δ₀·2^k` for `k = 0, −1, 1, −2, 2, …` with `δ₀ = dist(ȳ, F(z))/(2|ℓ|)`.
pub fn witness_excluding_base(
    map: &SetValuedMap,
    ybar: &Vector,
    z: &Vector,
) -> Result<Option<Vector>> {
    let ell = check_ell(map)?;
    ybar.ensure_dim(map.dim())?;
    let fz = map.eval(z)?;
    let proj = geometry::project_onto(&fz, ybar)?;
    if proj.dist <= EPS_GEOM {
        return Err(PreimageError::InPreimage);
    }
    let v = &(&proj.point - ybar) * (1.0 / proj.dist);
    let delta0 = proj.dist / (2.0 * ell.abs());
    for trial in 0..MAX_DELTA_TRIALS {
        let k = if trial % 2 == 0 {
            (trial / 2) as i32
        } else {
            -(trial.div_ceil(2) as i32)
        };
        let x = z.add_scaled(delta0 * 2f64.powi(k), &v);
        if !gf_membership(map, &x, ybar, z, EPS_GEOM)? {
            return Ok(Some(x));
        }
    }
    Ok(None)
}
