//! Canonical test frameworks: convex triangulated polytopes, which are
//! first-order rigid in every geometry, and a few known flexible frameworks.
//!
//! Polytopes are generated in Euclidean coordinates centered at the origin
//! with circumradius 1, scaled, and then moved into the requested geometry
//! with [`crate::transfer::transfer_framework`].

use serde::Serialize;

use crate::error::{Result, RigidityError};
use crate::framework::{Convention, Framework};
use crate::geometry::{dot, GeometrySpec, Model};
use crate::rigidity::Verdict;
use crate::transfer;
use crate::Tolerance;

pub const POLYTOPE_NAMES: &[&str] = &[
    "simplex(n)",
    "octahedron",
    "icosahedron",
    "bipyramid(m)",
    "triangulated-prism",
];
pub const FLEXIBLE_NAMES: &[&str] = &[
    "square-4-cycle",
    "double-banana-3d",
    "degenerate-collinear-triangle",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Polytope {
    Simplex(usize),
    Octahedron,
    Icosahedron,
    Bipyramid(usize),
    TriangulatedPrism,
}

fn parametrized(name: &str, prefix: &str) -> Option<usize> {
    name.strip_prefix(prefix)?
        .strip_prefix('(')?
        .strip_suffix(')')?
        .trim()
        .parse()
        .ok()
}

impl Polytope {
    fn parse(name: &str) -> Result<Polytope> {
        let name = name.trim();
        let p = match name {
            "octahedron" => Polytope::Octahedron,
            "icosahedron" => Polytope::Icosahedron,
            "triangulated-prism" => Polytope::TriangulatedPrism,
            _ => {
                if let Some(n) = parametrized(name, "simplex") {
                    if n == 0 {
                        return Err(RigidityError::UnknownExample(format!(
                            "{name}: dimension must be at least 1"
                        )));
                    }
                    Polytope::Simplex(n)
                } else if let Some(m) = parametrized(name, "bipyramid") {
                    if m < 3 {
                        return Err(RigidityError::UnknownExample(format!(
                            "{name}: ring needs at least 3 vertices"
                        )));
                    }
                    Polytope::Bipyramid(m)
                } else {
                    return Err(RigidityError::UnknownExample(name.to_string()));
                }
            }
        };
        Ok(p)
    }

    fn dimension(self) -> usize {
        match self {
            Polytope::Simplex(n) => n,
            _ => 3,
        }
    }

    /// Vertices with circumradius 1 and the edges of a triangulated boundary.
    fn skeleton(self) -> (Vec<Vec<f64>>, Vec<(usize, usize)>) {
        match self {
            Polytope::Simplex(n) => {
                let pts = regular_simplex(n);
                let edges = all_pairs(n + 1);
                (pts, edges)
            }
            Polytope::Octahedron => {
                let mut pts = Vec::new();
                for axis in 0..3 {
                    for s in [1.0, -1.0] {
                        let mut p = vec![0.0; 3];
                        p[axis] = s;
                        pts.push(p);
                    }
                }
                let edges = all_pairs(6)
                    .into_iter()
                    .filter(|&(i, j)| i / 2 != j / 2)
                    .collect();
                (pts, edges)
            }
            Polytope::Icosahedron => {
                let phi = (1.0 + 5f64.sqrt()) / 2.0;
                let r = (1.0 + phi * phi).sqrt();
                let mut pts = Vec::new();
                for shift in 0..3 {
                    for a in [1.0, -1.0] {
                        for b in [phi, -phi] {
                            let base = [0.0, a / r, b / r];
                            pts.push((0..3).map(|k| base[(k + 3 - shift) % 3]).collect());
                        }
                    }
                }
                let edges = shortest_pairs(&pts);
                (pts, edges)
            }
            Polytope::Bipyramid(m) => {
                let mut pts: Vec<Vec<f64>> = (0..m)
                    .map(|k| {
                        let t = std::f64::consts::TAU * k as f64 / m as f64;
                        vec![t.cos(), t.sin(), 0.0]
                    })
                    .collect();
                pts.push(vec![0.0, 0.0, 1.0]);
                pts.push(vec![0.0, 0.0, -1.0]);
                let mut edges: Vec<(usize, usize)> = (0..m).map(|k| (k, (k + 1) % m)).collect();
                for k in 0..m {
                    edges.push((k, m));
                    edges.push((k, m + 1));
                }
                (pts, edges)
            }
            Polytope::TriangulatedPrism => {
                let c = std::f64::consts::FRAC_1_SQRT_2;
                let mut pts = Vec::new();
                for z in [c, -c] {
                    for k in 0..3 {
                        let t = std::f64::consts::TAU * k as f64 / 3.0;
                        pts.push(vec![c * t.cos(), c * t.sin(), z]);
                    }
                }
                let mut edges = vec![(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)];
                for k in 0..3 {
                    edges.push((k, k + 3));
                    edges.push((k, (k + 1) % 3 + 3));
                }
                (pts, edges)
            }
        }
    }
}

fn all_pairs(v: usize) -> Vec<(usize, usize)> {
    (0..v)
        .flat_map(|i| (i + 1..v).map(move |j| (i, j)))
        .collect()
}

fn shortest_pairs(pts: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let d = |i: usize, j: usize| -> f64 {
        pts[i]
            .iter()
            .zip(&pts[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    };
    let pairs = all_pairs(pts.len());
    let min = pairs
        .iter()
        .map(|&(i, j)| d(i, j))
        .fold(f64::INFINITY, f64::min);
    pairs
        .into_iter()
        .filter(|&(i, j)| d(i, j) <= min * (1.0 + 1e-9))
        .collect()
}

/// Regular simplex in `R^n` centered at the origin with circumradius 1:
/// the centered standard basis of `R^{n+1}` written in an orthonormal basis
/// of the hyperplane `Σ x_i = 0`.
fn regular_simplex(n: usize) -> Vec<Vec<f64>> {
    let m = n + 1;
    // Helmert basis: h_k = (1,…,1,-k,0,…)/√(k(k+1)), k = 1..n.
    let basis: Vec<Vec<f64>> = (1..m)
        .map(|k| {
            let norm = ((k * (k + 1)) as f64).sqrt();
            (0..m)
                .map(|i| match i.cmp(&k) {
                    std::cmp::Ordering::Less => 1.0 / norm,
                    std::cmp::Ordering::Equal => -(k as f64) / norm,
                    std::cmp::Ordering::Greater => 0.0,
                })
                .collect()
        })
        .collect();
    let radius = (n as f64 / m as f64).sqrt();
    (0..m)
        .map(|v| {
            let x: Vec<f64> = (0..m)
                .map(|i| if i == v { 1.0 } else { 0.0 } - 1.0 / m as f64)
                .collect();
            basis.iter().map(|h| dot(h, &x) / radius).collect()
        })
        .collect()
}

/// Vertex-edge framework of a convex triangulated polytope, scaled by
/// `scale` and placed in `geometry`. For the hyperbolic model the scaled
/// polytope must lie inside the open unit ball.
pub fn canonical_polytope(
    name: &str,
    geometry: &GeometrySpec,
    scale: f64,
    tol: &Tolerance,
) -> Result<Framework> {
    let polytope = Polytope::parse(name)?;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(RigidityError::NumericDomain {
            function: "canonical_polytope scale",
            value: scale,
        });
    }
    if geometry.dimension != polytope.dimension() {
        return Err(RigidityError::DimensionMismatch {
            expected: polytope.dimension(),
            got: geometry.dimension,
        });
    }
    let (pts, edges) = polytope.skeleton();
    let pts: Vec<Vec<f64>> = pts
        .into_iter()
        .map(|p| p.into_iter().map(|x| x * scale).collect())
        .collect();
    if geometry.model == Model::ProjHyperbolic {
        for (vertex, p) in pts.iter().enumerate() {
            let w = dot(p, p) - 1.0;
            if w >= -tol.abs {
                return Err(RigidityError::Absolute { vertex, value: w });
            }
        }
    }
    let euclid = Framework::new(
        GeometrySpec::euclidean(polytope.dimension()),
        Convention::Model,
        pts,
        edges,
    )?;
    if geometry.model == Model::Euclidean {
        return Ok(euclid);
    }
    transfer::transfer_framework(&euclid, geometry, tol)
}

/// Known flexible Euclidean frameworks, in model coordinates.
pub fn flexible_example(name: &str) -> Result<Framework> {
    let (n, pts, edges): (usize, Vec<Vec<f64>>, Vec<(usize, usize)>) = match name.trim() {
        "square-4-cycle" => (
            2,
            vec![
                vec![0.5, 0.5],
                vec![-0.5, 0.5],
                vec![-0.5, -0.5],
                vec![0.5, -0.5],
            ],
            vec![(0, 1), (1, 2), (2, 3), (0, 3)],
        ),
        "degenerate-collinear-triangle" => (
            2,
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]],
            vec![(0, 1), (1, 2), (0, 2)],
        ),
        "double-banana-3d" => {
            // Two triangular bipyramids hinged on the shared poles 0 and 1.
            let pts = vec![
                vec![0.05, 0.0, 0.7],
                vec![-0.05, 0.0, -0.7],
                vec![0.3, 0.2, 0.1],
                vec![0.6, -0.1, 0.0],
                vec![0.4, 0.05, -0.2],
                vec![-0.3, 0.1, 0.15],
                vec![-0.55, -0.2, 0.0],
                vec![-0.35, 0.2, -0.2],
            ];
            let mut edges = Vec::new();
            for ring in [[2, 3, 4], [5, 6, 7]] {
                edges.extend([(ring[0], ring[1]), (ring[1], ring[2]), (ring[0], ring[2])]);
                for &r in &ring {
                    edges.push((0, r));
                    edges.push((1, r));
                }
            }
            (3, pts, edges)
        }
        other => return Err(RigidityError::UnknownExample(other.to_string())),
    };
    Framework::new(GeometrySpec::euclidean(n), Convention::Model, pts, edges)
}

/// Expected behavior of a named example, from theory rather than computation:
/// Cauchy-Dehn for polytopes, the documented flex count for the controls.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExampleDescriptor {
    pub name: String,
    pub dimension: usize,
    pub vertices: usize,
    pub edges: usize,
    pub expected_verdict: Verdict,
    pub expected_rank: usize,
    pub internal_flexes: usize,
    pub geometries: Vec<Model>,
}

pub fn describe(name: &str) -> Result<ExampleDescriptor> {
    let (fw, flexes, geometries) = match Polytope::parse(name) {
        Ok(p) => {
            let (pts, edges) = p.skeleton();
            let fw = Framework::new(
                GeometrySpec::euclidean(p.dimension()),
                Convention::Model,
                pts,
                edges,
            )?;
            (
                fw,
                0,
                vec![
                    Model::Euclidean,
                    Model::SphereAmbient,
                    Model::ProjSphere,
                    Model::ProjHyperbolic,
                ],
            )
        }
        Err(RigidityError::UnknownExample(_)) => {
            (flexible_example(name)?, 1, vec![Model::Euclidean])
        }
        Err(e) => return Err(e),
    };
    let n = fw.dimension();
    let v = fw.vertex_count();
    // Trivial motions restricted to the vertices: full n(n+1)/2 once the
    // vertices affinely span R^n, which all examples except the collinear one do.
    let trivial = if name.trim() == "degenerate-collinear-triangle" {
        3
    } else {
        let d = v.min(n + 1) - 1;
        n * (n + 1) / 2 - (n - d) * (n - d + 1) / 2
    };
    Ok(ExampleDescriptor {
        name: name.trim().to_string(),
        dimension: n,
        vertices: v,
        edges: fw.edge_count(),
        expected_verdict: if flexes == 0 {
            Verdict::Rigid
        } else {
            Verdict::Flexible
        },
        expected_rank: n * v - trivial - flexes,
        internal_flexes: flexes,
        geometries,
    })
}
