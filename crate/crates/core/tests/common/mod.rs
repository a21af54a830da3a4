#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rigiscope::{Convention, Framework, GeometrySpec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in the open ball of the given radius, by rejection.
pub fn point_in_ball(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    loop {
        let p: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        if p.iter().map(|x| x * x).sum::<f64>() < 1.0 {
            return p.into_iter().map(|x| x * radius).collect();
        }
    }
}

pub fn random_edges(rng: &mut ChaCha8Rng, v: usize, p: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 0..v {
        for j in i + 1..v {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Euclidean framework in model coordinates: n ∈ {2,3}, 3 ≤ v ≤ 12,
/// edge probability 0.5, vertices in the ball of radius 0.9.
pub fn random_euclidean(rng: &mut ChaCha8Rng) -> Framework {
    let n = rng.random_range(2..=3);
    let v = rng.random_range(3..=12);
    let points = (0..v).map(|_| point_in_ball(rng, n, 0.9)).collect();
    let edges = random_edges(rng, v, 0.5);
    Framework::new(GeometrySpec::euclidean(n), Convention::Model, points, edges).unwrap()
}

/// Complete graph on n + 2 vertices: one more edge than an isostatic
/// framework needs, so generic placements carry a self-stress.
pub fn random_stressed(rng: &mut ChaCha8Rng, n: usize) -> Framework {
    let v = n + 2;
    let points = (0..v).map(|_| point_in_ball(rng, n, 0.9)).collect();
    let edges = (0..v)
        .flat_map(|i| (i + 1..v).map(move |j| (i, j)))
        .collect();
    Framework::new(GeometrySpec::euclidean(n), Convention::Model, points, edges).unwrap()
}

/// Same model coordinates read in another projective model.
pub fn reinterpret(fw: &Framework, geometry: GeometrySpec) -> Framework {
    let mut out = Framework::new(
        geometry,
        Convention::Model,
        fw.points.clone(),
        fw.graph.edges.clone(),
    )
    .unwrap();
    out.member_kinds = fw.member_kinds.clone();
    out
}

/// Spherical framework in ambient coordinates, all vertices in the open
/// upper hemisphere.
pub fn random_spherical(rng: &mut ChaCha8Rng) -> Framework {
    let n = rng.random_range(2..=3);
    let v = rng.random_range(3..=10);
    let points = (0..v)
        .map(|_| {
            let mut x = point_in_ball(rng, n, 2.0);
            x.push(1.0);
            let r = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            x.into_iter().map(|a| a / r).collect()
        })
        .collect();
    let edges = random_edges(rng, v, 0.5);
    Framework::new(GeometrySpec::sphere(n), Convention::Ambient, points, edges).unwrap()
}
