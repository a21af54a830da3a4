//! Hyperplanes of `H^n` as poles in exterior hyperbolic space `D^n`.
//!
//! A point `p` with `<p,p>_1 > 0` determines the hyperplane
//! `{x ∈ H^n : <p,x>_1 = 0}`, and two hyperplanes meet at angle
//! `arccos(<p,q>_1)` of their normalized poles. Fixing those angles and
//! linearizing gives exactly the first-order constraints of a bar framework
//! on the poles, so a system of hyperplanes is *stiff* when that pole
//! framework is first-order rigid.
//!
//! The constraint matrix and the Lorentz generators here are assembled
//! independently of [`crate::rigidity`], so that the two can be checked
//! against each other.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RigidityError};
use crate::framework::{Convention, Framework};
use crate::geometry::{check_len, involution_j, signature_form, GeometrySpec};
use crate::linalg;
use crate::Tolerance;

fn lorentz(x: &[f64], y: &[f64]) -> f64 {
    signature_form(1, x, y).expect("equal lengths")
}

/// A hyperplane of `H^n`, stored as its pole normalized to `<p,p>_1 = 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperplaneH {
    pole: Vec<f64>,
}

/// Polar hyperplane of an exterior point. The pole is rescaled to
/// `<p,p>_1 = 1` and its sign fixed so that the last coordinate is `≥ 0`.
pub fn polar_hyperplane(p: &[f64], tol: &Tolerance) -> Result<HyperplaneH> {
    if p.len() < 2 {
        return Err(RigidityError::DimensionMismatch {
            expected: 2,
            got: p.len(),
        });
    }
    let q = lorentz(p, p);
    if q <= tol.abs {
        return Err(RigidityError::NotExterior { index: 0, value: q });
    }
    let sign = if *p.last().unwrap() < 0.0 { -1.0 } else { 1.0 };
    // Leave already-normalized poles untouched so that re-reading a pole is exact.
    let scale = if (q - 1.0).abs() <= 4.0 * f64::EPSILON {
        sign
    } else {
        sign / q.sqrt()
    };
    Ok(HyperplaneH {
        pole: p.iter().map(|x| x * scale).collect(),
    })
}

impl HyperplaneH {
    pub fn pole(&self) -> &[f64] {
        &self.pole
    }

    pub fn dimension(&self) -> usize {
        self.pole.len() - 1
    }

    /// Whether a point of `H^n` lies on the hyperplane.
    pub fn contains(&self, x: &[f64], tol: &Tolerance) -> bool {
        x.len() == self.pole.len() && lorentz(&self.pole, x).abs() <= tol.abs
    }

    /// `n` affinely independent points of `H^n` on the hyperplane.
    pub fn sample_points(&self) -> Vec<Vec<f64>> {
        let w = self.pole.len();
        let p = &self.pole;
        // Timelike vector in p^⊥: e + p_{n+1} p, since <e,p>_1 = -p_{n+1}.
        let mut t: Vec<f64> = p.iter().map(|x| x * p[w - 1]).collect();
        t[w - 1] += 1.0;
        let tn = (-lorentz(&t, &t)).sqrt();
        let t: Vec<f64> = t.iter().map(|x| x / tn).collect();

        // Spacelike directions orthogonal (in the form) to p and t.
        let mut frame = vec![p.clone(), t.clone()];
        let mut spacelike = Vec::new();
        for i in 0..w {
            let mut v = vec![0.0; w];
            v[i] = 1.0;
            for f in &frame {
                let ff = lorentz(f, f);
                let c = lorentz(&v, f) / ff;
                for (vk, fk) in v.iter_mut().zip(f) {
                    *vk -= c * fk;
                }
            }
            let vv = lorentz(&v, &v);
            if vv > 1e-8 {
                let v: Vec<f64> = v.iter().map(|x| x / vv.sqrt()).collect();
                frame.push(v.clone());
                spacelike.push(v);
            }
            if spacelike.len() == w - 2 {
                break;
            }
        }
        let mut out = vec![t.clone()];
        for s in spacelike {
            let x: Vec<f64> = t.iter().zip(&s).map(|(a, b)| a + 0.5 * b).collect();
            let r = (-lorentz(&x, &x)).sqrt();
            out.push(x.iter().map(|v| v / r).collect());
        }
        out
    }
}

/// The hyperplane through `n` points of `H^n`, recovered as the form-orthogonal
/// complement of their span.
pub fn hyperplane_through(points: &[Vec<f64>], tol: &Tolerance) -> Result<HyperplaneH> {
    let w = points.first().map_or(0, Vec::len);
    if w < 2 || points.len() + 1 != w {
        return Err(RigidityError::Unsupported(format!(
            "need n points of length n+1, got {} of length {w}",
            points.len()
        )));
    }
    let rows = DMatrix::from_fn(points.len(), w, |r, c| {
        involution_j(1, &points[r]).unwrap()[c]
    });
    let (kernel, _) = linalg::kernel_basis(&rows, tol)?;
    if kernel.ncols() != 1 {
        return Err(RigidityError::Unsupported(
            "points do not span a hyperplane".into(),
        ));
    }
    let p: Vec<f64> = kernel.column(0).iter().copied().collect();
    polar_hyperplane(&p, tol)
}

/// Angle `arccos(<p,q>_1)` between two hyperplanes.
pub fn hyperplane_angle(a: &HyperplaneH, b: &HyperplaneH, tol: &Tolerance) -> Result<f64> {
    check_len(b.pole(), a.pole().len())?;
    let c = lorentz(a.pole(), b.pole());
    if c.abs() > 1.0 + tol.abs {
        return Err(RigidityError::Ultraparallel {
            i: 0,
            j: 1,
            value: c,
        });
    }
    Ok(c.clamp(-1.0, 1.0).acos())
}

/// Hyperplanes of `H^n` with angle constraints between some pairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngleSystem {
    pub hyperplanes: Vec<HyperplaneH>,
    pub edges: Vec<(usize, usize)>,
    /// Target angle per edge; `None` for formal constraints between
    /// ultraparallel hyperplanes.
    pub angles: Vec<Option<f64>>,
}

impl AngleSystem {
    /// Builds the system from raw poles. Ultraparallel pairs are rejected
    /// unless `formal` is set, in which case their constraint is kept without an angle.
    pub fn new(
        poles: &[Vec<f64>],
        edges: Vec<(usize, usize)>,
        formal: bool,
        tol: &Tolerance,
    ) -> Result<Self> {
        let width = poles.first().map_or(0, Vec::len);
        let hyperplanes = poles
            .iter()
            .enumerate()
            .map(|(index, p)| {
                check_len(p, width)?;
                polar_hyperplane(p, tol).map_err(|e| match e {
                    RigidityError::NotExterior { value, .. } => {
                        RigidityError::NotExterior { index, value }
                    }
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut angles = Vec::with_capacity(edges.len());
        for &(i, j) in &edges {
            if i >= hyperplanes.len() || j >= hyperplanes.len() || i == j {
                return Err(RigidityError::InvalidFramework(format!(
                    "angle edge ({i},{j}) is not a pair of distinct hyperplanes"
                )));
            }
            match hyperplane_angle(&hyperplanes[i], &hyperplanes[j], tol) {
                Ok(a) => angles.push(Some(a)),
                Err(RigidityError::Ultraparallel { value, .. }) if formal => {
                    let _ = value;
                    angles.push(None);
                }
                Err(RigidityError::Ultraparallel { value, .. }) => {
                    return Err(RigidityError::Ultraparallel { i, j, value })
                }
                Err(e) => return Err(e),
            }
        }
        Ok(AngleSystem {
            hyperplanes,
            edges,
            angles,
        })
    }

    pub fn dimension(&self) -> usize {
        self.hyperplanes.first().map_or(0, HyperplaneH::dimension)
    }

    /// The pole framework in `D^n` (ambient coordinates, `<p,p>_1 = 1`).
    pub fn polar_framework(&self) -> Result<Framework> {
        let points = self.hyperplanes.iter().map(|h| h.pole.clone()).collect();
        Framework::new(
            GeometrySpec::de_sitter(self.dimension()),
            Convention::Ambient,
            points,
            self.edges.clone(),
        )
    }

    /// Angle system of a `D^n` framework given in ambient or exterior-model coordinates.
    pub fn from_framework(fw: &Framework, formal: bool, tol: &Tolerance) -> Result<Self> {
        let poles: Vec<Vec<f64>> = (0..fw.vertex_count())
            .map(|v| fw.ambient_point(v))
            .collect();
        AngleSystem::new(&poles, fw.graph.edges.clone(), formal, tol)
    }

    /// Linearized angle and normalization constraints on the poles:
    /// `<p_i,u_j>_1 + <p_j,u_i>_1 = 0` per edge, `<p_i,u_i>_1 = 0` per plane.
    pub fn constraint_matrix(&self) -> DMatrix<f64> {
        let w = self.dimension() + 1;
        let v = self.hyperplanes.len();
        let e = self.edges.len();
        let mut m = DMatrix::zeros(e + v, w * v);
        let grad: Vec<Vec<f64>> = self
            .hyperplanes
            .iter()
            .map(|h| involution_j(1, &h.pole).unwrap())
            .collect();
        for (r, &(i, j)) in self.edges.iter().enumerate() {
            for c in 0..w {
                m[(r, i * w + c)] += grad[j][c];
                m[(r, j * w + c)] += grad[i][c];
            }
        }
        for (i, g) in grad.iter().enumerate() {
            for c in 0..w {
                m[(e + i, i * w + c)] = g[c];
            }
        }
        m
    }

    /// Velocities of the poles under every infinitesimal Lorentz transformation:
    /// rotations among the spatial axes and boosts along each of them.
    pub fn isometry_motions(&self) -> DMatrix<f64> {
        let w = self.dimension() + 1;
        let v = self.hyperplanes.len();
        let mut generators: Vec<DMatrix<f64>> = Vec::new();
        for a in 0..w - 1 {
            for b in a + 1..w - 1 {
                let mut g = DMatrix::zeros(w, w);
                g[(a, b)] = 1.0;
                g[(b, a)] = -1.0;
                generators.push(g);
            }
            let mut boost = DMatrix::zeros(w, w);
            boost[(a, w - 1)] = 1.0;
            boost[(w - 1, a)] = 1.0;
            generators.push(boost);
        }
        let mut m = DMatrix::zeros(w * v, generators.len());
        for (c, g) in generators.iter().enumerate() {
            for (i, h) in self.hyperplanes.iter().enumerate() {
                let x = nalgebra::DVector::from_column_slice(&h.pole);
                let gx = g * x;
                for k in 0..w {
                    m[(i * w + k, c)] = gx[k];
                }
            }
        }
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Stiffness {
    Stiff,
    NotStiff,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StiffnessReport {
    pub verdict: Stiffness,
    pub dimension: usize,
    pub hyperplanes: usize,
    pub angle_constraints: usize,
    pub formal_constraints: usize,
    pub rank: usize,
    pub motion_dim: usize,
    pub trivial_dim: usize,
    pub internal_dim: usize,
}

/// STIFF iff every first-order motion of the planes comes from an
/// infinitesimal isometry of `H^n`.
pub fn stiffness_verdict(sys: &AngleSystem, tol: &Tolerance) -> Result<StiffnessReport> {
    let m = sys.constraint_matrix();
    let rank = linalg::numeric_rank(&m, tol)?.rank;
    let motion_dim = m.ncols() - rank;
    let trivial_dim = linalg::numeric_rank(&sys.isometry_motions(), tol)?.rank;
    Ok(StiffnessReport {
        verdict: if motion_dim == trivial_dim {
            Stiffness::Stiff
        } else {
            Stiffness::NotStiff
        },
        dimension: sys.dimension(),
        hyperplanes: sys.hyperplanes.len(),
        angle_constraints: sys.edges.len(),
        formal_constraints: sys.angles.iter().filter(|a| a.is_none()).count(),
        rank,
        motion_dim,
        trivial_dim,
        internal_dim: motion_dim.saturating_sub(trivial_dim),
    })
}

/// On-disk angle-system document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleSystemDocument {
    pub hyperplanes: Vec<Vec<f64>>,
    pub angle_edges: Vec<[usize; 2]>,
}

impl AngleSystemDocument {
    pub fn from_system(sys: &AngleSystem) -> Self {
        AngleSystemDocument {
            hyperplanes: sys.hyperplanes.iter().map(|h| h.pole.clone()).collect(),
            angle_edges: sys.edges.iter().map(|&(i, j)| [i, j]).collect(),
        }
    }

    pub fn to_system(&self, formal: bool, tol: &Tolerance) -> Result<AngleSystem> {
        let edges = self.angle_edges.iter().map(|e| (e[0], e[1])).collect();
        AngleSystem::new(&self.hyperplanes, edges, formal, tol)
    }
}

/// Facet poles of the cube `[-s, s]^3` in the Klein model of `H^3`, with
/// angle constraints between adjacent facets. The poles form an octahedron
/// outside the unit ball.
pub fn cube_facet_system(s: f64, tol: &Tolerance) -> Result<AngleSystem> {
    let mut poles = Vec::new();
    for axis in 0..3 {
        for sign in [1.0, -1.0] {
            // Facet x_axis = sign·s, i.e. sign·x_axis − s·x_4 = 0.
            let mut p = vec![0.0, 0.0, 0.0, s];
            p[axis] = sign;
            poles.push(p);
        }
    }
    let edges = (0..6)
        .flat_map(|i| (i + 1..6).map(move |j| (i, j)))
        .filter(|&(i, j)| i / 2 != j / 2)
        .collect();
    AngleSystem::new(&poles, edges, false, tol)
}
