mod common;

use proptest::prelude::*;
use rand::Rng;
use rbgame::numerics::{seeded_rng, DenseMatrix};
use rbgame::poly::{convex_hull, Polyhedron};

use common::{in_vertex_hull, polytope_vertices, random_piece};

fn pieces(seed: u64, d: usize, k: usize) -> Vec<Polyhedron> {
    let mut rng = seeded_rng(seed);
    (0..k).map(|_| random_piece(&mut rng, d)).collect()
}

fn point_piece(x: &[f64]) -> Polyhedron {
    Polyhedron::new(
        DenseMatrix::zeros(0, x.len()),
        vec![],
        x.to_vec(),
        x.to_vec(),
    )
    .unwrap()
}

/// Random convex combination of the pieces' vertices.
fn hull_sample(rng: &mut impl Rng, vertices: &[Vec<f64>]) -> Vec<f64> {
    let w: Vec<f64> = vertices
        .iter()
        .map(|_| rng.random_range(0.0..1.0))
        .collect();
    let total: f64 = w.iter().sum();
    let mut x = vec![0.0; vertices[0].len()];
    for (wk, v) in w.iter().zip(vertices) {
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi += wk / total * vi;
        }
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn piece_points_are_members(seed in 0u64..100_000, d in 1usize..=3, k in 1usize..=3) {
        let ps = pieces(seed, d, k);
        let hull = convex_hull(&ps).unwrap();
        let mut rng = seeded_rng(seed ^ 0x5eed);
        for p in &ps {
            let vs = polytope_vertices(p);
            for _ in 0..5 {
                let x = hull_sample(&mut rng, &vs);
                prop_assert!(p.contains(&x, 1e-9));
                prop_assert!(hull.contains(&x, 1e-9).unwrap());
            }
        }
    }

    #[test]
    fn adding_inner_points_keeps_the_hull(seed in 0u64..100_000, d in 1usize..=3, k in 1usize..=2) {
        let ps = pieces(seed, d, k);
        let hull = convex_hull(&ps).unwrap();
        let vertices: Vec<Vec<f64>> = ps.iter().flat_map(polytope_vertices).collect();
        let mut rng = seeded_rng(seed ^ 0xabc);
        let mut more = ps.clone();
        for _ in 0..2 {
            more.push(point_piece(&hull_sample(&mut rng, &vertices)));
        }
        let again = convex_hull(&more).unwrap();
        for _ in 0..20 {
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-2..=10) as f64 / 2.0).collect();
            prop_assert_eq!(hull.contains(&x, 1e-9).unwrap(), again.contains(&x, 1e-9).unwrap());
        }
    }

    #[test]
    fn decomposition_reconstructs(seed in 0u64..100_000, d in 1usize..=3, k in 1usize..=3) {
        let ps = pieces(seed, d, k);
        let hull = convex_hull(&ps).unwrap();
        let vertices: Vec<Vec<f64>> = ps.iter().flat_map(polytope_vertices).collect();
        let mut rng = seeded_rng(seed ^ 0xdec);
        let x = hull_sample(&mut rng, &vertices);
        let parts = hull.decompose(&x, 1e-7, 1e-9).unwrap();
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        prop_assert!((total - 1.0).abs() <= 1e-9);
        for j in 0..d {
            let back: f64 = parts.iter().map(|(w, p)| w * p[j]).sum();
            prop_assert!((back - x[j]).abs() <= 1e-7);
        }
        for (_, p) in &parts {
            prop_assert!(ps.iter().any(|q| q.contains(p, 1e-7)));
        }
    }

    #[test]
    fn membership_matches_vertex_oracle(seed in 0u64..100_000, d in 1usize..=3, k in 1usize..=3) {
        let ps = pieces(seed, d, k);
        let hull = convex_hull(&ps).unwrap();
        let vertices: Vec<Vec<f64>> = ps.iter().flat_map(polytope_vertices).collect();
        let mut rng = seeded_rng(seed ^ 0x0a);
        for _ in 0..20 {
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-2..=10) as f64 / 2.0).collect();
            prop_assert_eq!(hull.contains(&x, 1e-9).unwrap(), in_vertex_hull(&vertices, &x, 1e-9), "{:?}", x);
        }
    }
}
