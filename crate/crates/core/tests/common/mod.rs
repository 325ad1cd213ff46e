#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rosl_preimage::geometry::{Polytope, Vector, EPS_GEOM};
use rosl_preimage::maps::{AffinePolytope, SetValuedMap};

pub fn v2(x: f64, y: f64) -> Vector {
    Vector::from_slice(&[x, y])
}

pub fn uniform_point(rng: &mut ChaCha8Rng, dim: usize, half_width: f64) -> Vector {
    Vector::from_slice(
        &(0..dim)
            .map(|_| rng.gen_range(-half_width..half_width))
            .collect::<Vec<_>>(),
    )
}

/// Polygon with `n` vertices at jittered angles around a random centre.
pub fn random_polygon(rng: &mut ChaCha8Rng, n: usize) -> Polytope {
    let r = rng.gen_range(0.6..1.2);
    let c = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
    let pts: Vec<Vector> = (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * (k as f64 + rng.gen_range(-0.25..0.25)) / n as f64;
            v2(c[0] + r * t.cos(), c[1] + r * t.sin())
        })
        .collect();
    Polytope::from_points(&pts, EPS_GEOM).unwrap()
}

/// Rotated `diag(l1, l2)`.
pub fn spd2(l1: f64, l2: f64, theta: f64) -> Vec<Vec<f64>> {
    let (c, s) = (theta.cos(), theta.sin());
    vec![
        vec![l1 * c * c + l2 * s * s, (l1 - l2) * c * s],
        vec![(l1 - l2) * c * s, l1 * s * s + l2 * c * c],
    ]
}

/// `F(x) = b − Mx + P` with P a 4–8-gon, `λ_min(M) ∈ [0.5, 2]` and
/// `λ_max(M) ≤ 1.25 λ_min(M)`.
pub fn random_affine(rng: &mut ChaCha8Rng) -> SetValuedMap {
    let n = rng.gen_range(4..=8);
    let p = random_polygon(rng, n);
    let l1 = rng.gen_range(0.5..2.0);
    let l2 = l1 * rng.gen_range(1.0..1.25);
    let theta = rng.gen_range(0.0..std::f64::consts::PI);
    let b = v2(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
    SetValuedMap::affine("random_affine", AffinePolytope::new(b, spd2(l1, l2, theta), p).unwrap())
}

pub fn unit_square_map() -> SetValuedMap {
    let p = Polytope::from_points(
        &[v2(0.0, 0.0), v2(1.0, 0.0), v2(1.0, 1.0), v2(0.0, 1.0)],
        EPS_GEOM,
    )
    .unwrap();
    SetValuedMap::affine(
        "affine_square",
        AffinePolytope::new(Vector::zeros(2), spd2(1.0, 1.0, 0.0), p).unwrap(),
    )
}
