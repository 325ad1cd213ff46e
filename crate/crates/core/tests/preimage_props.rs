mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rosl_preimage::geometry::{Polytope, Vector, EPS_GEOM};
use rosl_preimage::maps::{AffinePolytope, SetValuedMap};
use rosl_preimage::preimage::{
    compare_masks, gf_balls, gf_membership, gf_membership_balls, preimage_oracle, preimage_outer,
    preimage_outer_from, witness_excluding_base, BaseSource, GfCover, GridSpec,
};

fn random_query(rng: &mut ChaCha8Rng, map: &SetValuedMap) -> (Vector, Vector, Vector) {
    let d = map.dim();
    let x = common::uniform_point(rng, d, 3.0);
    let ybar = common::uniform_point(rng, d, 4.0);
    let z = x.add_scaled(1.0, &common::uniform_point(rng, d, 4.0));
    (x, ybar, z)
}

fn families(rng: &mut ChaCha8Rng) -> Vec<SetValuedMap> {
    vec![SetValuedMap::example34(), common::random_affine(rng), common::unit_square_map()]
}

#[test]
fn fast_path_agrees_with_balls() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut queries = 0;
    for round in 0..300 {
        for map in families(&mut rng) {
            for _ in 0..12 {
                let (x, ybar, z) = random_query(&mut rng, &map);
                let tol = [0.0, 1e-3, 0.05][round % 3];
                let balls = gf_balls(&map, &x, &ybar, false).unwrap();
                assert_eq!(
                    gf_membership(&map, &x, &ybar, &z, tol).unwrap(),
                    gf_membership_balls(&balls, &x, map.ell(), &z, tol),
                    "x={x} ybar={ybar} z={z} tol={tol}"
                );
                queries += 1;
            }
        }
    }
    assert!(queries >= 10_000);
}

#[test]
fn filtered_cover_agrees_with_unfiltered() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut queries = 0;
    for _ in 0..300 {
        for map in families(&mut rng) {
            let (x, ybar, _) = random_query(&mut rng, &map);
            let full = GfCover::new(&map, &x, &ybar, false).unwrap();
            let kept = GfCover::new(&map, &x, &ybar, true).unwrap();
            assert!(kept.generators().len() <= full.generators().len());
            assert!(!kept.generators().is_empty());
            for _ in 0..12 {
                let z = x.add_scaled(1.0, &common::uniform_point(&mut rng, map.dim(), 4.0));
                assert_eq!(full.contains(&z, EPS_GEOM), kept.contains(&z, EPS_GEOM), "z={z}");
                queries += 1;
            }
        }
    }
    assert!(queries >= 10_000);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn base_point_is_always_covered(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for map in families(&mut rng) {
            let (x, ybar, _) = random_query(&mut rng, &map);
            prop_assert!(gf_membership(&map, &x, &ybar, &x, 0.0).unwrap());
            prop_assert!(GfCover::new(&map, &x, &ybar, true).unwrap().contains(&x, 0.0));
        }
    }

    #[test]
    fn witnesses_exclude_their_point(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for map in families(&mut rng) {
            let d = map.dim();
            let ybar = common::uniform_point(&mut rng, d, 2.0);
            let z = common::uniform_point(&mut rng, d, 3.0);
            if map.eval(&z).unwrap().contains(&ybar, EPS_GEOM).unwrap() {
                prop_assert!(witness_excluding_base(&map, &ybar, &z).is_err());
                continue;
            }
            let x = witness_excluding_base(&map, &ybar, &z).unwrap();
            let x = x.expect("a witness");
            prop_assert!(!gf_membership(&map, &x, &ybar, &z, EPS_GEOM).unwrap());
        }
    }
}

fn random_bases(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> Vec<Vector> {
    (0..n).map(|_| common::uniform_point(rng, dim, 3.0)).collect()
}

#[test]
fn outer_masks_contain_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for round in 0..40 {
        let map = match round % 3 {
            0 => SetValuedMap::example34(),
            1 => common::unit_square_map(),
            _ => common::random_affine(&mut rng),
        };
        let d = map.dim();
        let grid = GridSpec::cube(d, -3.0, 3.0, if d == 1 { 301 } else { 61 }).unwrap();
        let ybar = common::uniform_point(&mut rng, d, 0.5);
        let oracle = preimage_oracle(&map, &ybar, &grid).unwrap();
        let n = rng.gen_range(1..20);
        let outer = preimage_outer(&map, &ybar, &grid, &random_bases(&mut rng, d, n), round % 2 == 0)
            .unwrap();
        assert_eq!(compare_masks(&outer, &oracle).oracle_only, 0, "round {round}");
    }
}

#[test]
fn more_base_points_never_grow_the_mask() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for round in 0..20 {
        let map = if round % 2 == 0 { SetValuedMap::example34() } else { common::random_affine(&mut rng) };
        let d = map.dim();
        let grid = GridSpec::cube(d, -3.0, 3.0, if d == 1 { 301 } else { 41 }).unwrap();
        let ybar = common::uniform_point(&mut rng, d, 0.5);
        let small = random_bases(&mut rng, d, 3);
        let mut large = small.clone();
        large.extend(random_bases(&mut rng, d, 5));
        let a = preimage_outer(&map, &ybar, &grid, &small, false).unwrap();
        let b = preimage_outer(&map, &ybar, &grid, &large, false).unwrap();
        for i in 0..grid.node_count() {
            assert!(!b.member[i] || a.member[i], "node {i} round {round}");
        }
    }
}

#[test]
fn full_grid_bases_match_oracle_within_band() {
    let grid = GridSpec::cube(1, -3.0, 3.0, 601).unwrap();
    let map = SetValuedMap::example34();
    for ybar in [0.0, 0.7, -1.3, 2.5] {
        let ybar = Vector::scalar(ybar);
        let outer = preimage_outer(&map, &ybar, &grid, &grid.nodes(), false).unwrap();
        let cmp = compare_masks(&outer, &preimage_oracle(&map, &ybar, &grid).unwrap());
        assert_eq!(cmp.oracle_only, 0);
        assert!(cmp.within_band(2.0), "{cmp:?}");
    }

    let grid = GridSpec::cube(2, -3.0, 3.0, 61).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for map in [common::unit_square_map(), common::random_affine(&mut rng)] {
        let ybar = Vector::zeros(2);
        let outer = preimage_outer(&map, &ybar, &grid, &grid.nodes(), true).unwrap();
        let cmp = compare_masks(&outer, &preimage_oracle(&map, &ybar, &grid).unwrap());
        assert_eq!(cmp.oracle_only, 0);
        assert!(cmp.within_band(2.0), "{cmp:?}");
    }
}

#[test]
fn unit_square_preimage_is_exact() {
    let grid = GridSpec::cube(2, -1.0, 2.0, 31).unwrap();
    let map = common::unit_square_map();
    let ybar = Vector::zeros(2);
    let oracle = preimage_oracle(&map, &ybar, &grid).unwrap();
    for (i, z) in grid.nodes().iter().enumerate() {
        let c = z.coords();
        let inside = (0..2).all(|k| (-1e-9..=1.0 + 1e-9).contains(&c[k]));
        assert_eq!(oracle.member[i], inside, "{z}");
    }
    let outer = preimage_outer(&map, &ybar, &grid, &grid.nodes(), false).unwrap();
    assert_eq!(outer.member, oracle.member);
}

#[test]
fn three_dimensional_cube_preimage() {
    let mut corners = Vec::new();
    for i in 0..8 {
        corners.push(Vector::from_slice(&[
            (i & 1) as f64,
            ((i >> 1) & 1) as f64,
            ((i >> 2) & 1) as f64,
        ]));
    }
    let cube = Polytope::from_points(&corners, EPS_GEOM).unwrap();
    let m = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
    let map = SetValuedMap::affine("cube", AffinePolytope::new(Vector::zeros(3), m, cube).unwrap());
    let grid = GridSpec::cube(3, -1.0, 2.0, 13).unwrap();
    let ybar = Vector::zeros(3);
    let oracle = preimage_oracle(&map, &ybar, &grid).unwrap();
    assert_eq!(oracle.count(), 5 * 5 * 5);
    let outer = preimage_outer(&map, &ybar, &grid, &grid.nodes(), true).unwrap();
    let cmp = compare_masks(&outer, &oracle);
    assert_eq!(cmp.oracle_only, 0);
    assert!(cmp.within_band(2.0), "{cmp:?}");
}

#[test]
fn inflation_generator_is_an_outer_approximation() {
    let grid = GridSpec::cube(1, -3.0, 3.0, 601).unwrap();
    let map = SetValuedMap::example34();
    let ybar = Vector::scalar(0.0);
    let oracle = preimage_oracle(&map, &ybar, &grid).unwrap();
    let mask = preimage_outer_from(
        &map,
        &ybar,
        &grid,
        &BaseSource::Inflate { eps: 0.25, iters: 3 },
        false,
        grid.tol_grid(),
    )
    .unwrap();
    let cmp = compare_masks(&mask, &oracle);
    assert_eq!(cmp.oracle_only, 0);
    assert!(cmp.within_band(2.0), "{cmp:?}");
    assert_eq!(mask.meta.base, "inflate:0.25,3");
}
