//! Moving frameworks and first-order motions between geometries.
//!
//! Two mechanisms relate the geometries. Between projective models the
//! block-diagonal matrix `T_K(G,p)` with blocks `T_p = I + K p pᵀ`
//! satisfies `R_X · T_K = R_E`, so `T_K` carries Euclidean motions to
//! `X`-motions and leaves row dependencies untouched. Between ambient
//! surfaces the velocity maps of [`crate::geometry`] do the same job.
//! [`transfer_motion`] routes through Euclidean model coordinates using
//! whichever mechanism applies at each step.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Result, RigidityError};
use crate::framework::{Convention, Framework, MemberKind};
use crate::geometry::{self, dot, Curvature, GeometrySpec, Model};
use crate::linalg;
use crate::rigidity::{self, at_vertex};
use crate::Tolerance;

/// `T_p = I + K p pᵀ` for one vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferBlock {
    pub vertex: usize,
    pub matrix: DMatrix<f64>,
    /// `1 + K p·p`, the block's determinant in closed form.
    pub determinant: f64,
}

pub fn transfer_block(p: &[f64], k: Curvature) -> TransferBlock {
    let n = p.len();
    let ks = k.sign();
    let matrix = DMatrix::from_fn(n, n, |r, c| {
        let id = if r == c { 1.0 } else { 0.0 };
        id + ks * p[r] * p[c]
    });
    TransferBlock {
        vertex: 0,
        matrix,
        determinant: 1.0 + ks * dot(p, p),
    }
}

impl TransferBlock {
    /// `T_p⁻¹ = I − K p pᵀ / (1 + K p·p)`, or `None` when singular.
    pub fn inverse(&self, p: &[f64], k: Curvature, tol: &Tolerance) -> Option<DMatrix<f64>> {
        if self.determinant.abs() <= tol.abs {
            return None;
        }
        let n = p.len();
        let ks = k.sign();
        Some(DMatrix::from_fn(n, n, |r, c| {
            let id = if r == c { 1.0 } else { 0.0 };
            id - ks * p[r] * p[c] / self.determinant
        }))
    }
}

/// The block-diagonal `T_K(G,p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix {
    pub curvature: Curvature,
    pub blocks: Vec<TransferBlock>,
}

impl TransferMatrix {
    pub fn determinant(&self) -> f64 {
        self.blocks.iter().map(|b| b.determinant).product()
    }

    /// Vertices whose block is singular (`|1 + K p·p| ≤ tol`).
    pub fn singular_vertices(&self, tol: &Tolerance) -> Vec<usize> {
        self.blocks
            .iter()
            .filter(|b| b.determinant.abs() <= tol.abs)
            .map(|b| b.vertex)
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.blocks.first().map_or(0, |b| b.matrix.nrows());
        let size = n * self.blocks.len();
        let mut m = DMatrix::zeros(size, size);
        for (v, b) in self.blocks.iter().enumerate() {
            m.view_mut((v * n, v * n), (n, n)).copy_from(&b.matrix);
        }
        m
    }

    /// Applies `T_K` blockwise to a stacked motion vector.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(u.len());
        let n = self.blocks.first().map_or(0, |b| b.matrix.nrows());
        for (v, b) in self.blocks.iter().enumerate() {
            let x = DVector::from_column_slice(&u[v * n..(v + 1) * n]);
            out.extend((&b.matrix * x).iter());
        }
        out
    }
}

/// `T_K(G,p)` for a model-convention framework. Singular blocks are reported,
/// not rejected.
pub fn transfer_matrix(fw: &Framework, k: Curvature) -> Result<TransferMatrix> {
    if fw.convention != Convention::Model {
        return Err(RigidityError::ConventionMismatch {
            expected: "model",
            got: fw.convention.name(),
        });
    }
    let blocks = fw
        .points
        .iter()
        .enumerate()
        .map(|(vertex, p)| TransferBlock {
            vertex,
            ..transfer_block(p, k)
        })
        .collect();
    Ok(TransferMatrix {
        curvature: k,
        blocks,
    })
}

/// Residual of `R_X · T_K − R_E` together with the ranks on both sides.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorizationReport {
    pub curvature: i32,
    pub max_residual: f64,
    #[serde(rename = "rank_E")]
    pub rank_e: usize,
    #[serde(rename = "rank_X")]
    pub rank_x: usize,
    #[serde(rename = "det_T")]
    pub det_t: f64,
    pub pass: bool,
}

/// Builds `R_X`, `T_K` and `R_E` independently and compares `R_X T_K` with `R_E`.
/// PASS requires the residual within `tol.abs` and equal ranks.
pub fn verify_factorization(
    fw: &Framework,
    k: Curvature,
    tol: &Tolerance,
) -> Result<FactorizationReport> {
    let rx = rigidity::rigidity_matrix_projective(fw, k, tol)?;
    let re = rigidity::rigidity_matrix_euclidean(fw)?;
    let t = transfer_matrix(fw, k)?;
    let residual = &rx.matrix * t.to_dense() - &re.matrix;
    let max_residual = linalg::max_abs(&residual);
    let rank_e = re.rank(tol)?.rank;
    let rank_x = rx.rank(tol)?.rank;
    Ok(FactorizationReport {
        curvature: k.sign() as i32,
        max_residual,
        rank_e,
        rank_x,
        det_t: t.determinant(),
        pass: max_residual <= tol.abs && rank_e == rank_x,
    })
}

/// Comparison of the left kernels of `R_X` and `R_E`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StressComparison {
    pub curvature: i32,
    pub stress_dim_e: usize,
    pub stress_dim_x: usize,
    /// Largest principal angle between the two stress spaces (radians);
    /// `None` if the dimensions differ.
    pub max_principal_angle: Option<f64>,
}

pub fn compare_stresses(fw: &Framework, k: Curvature, tol: &Tolerance) -> Result<StressComparison> {
    let rx = rigidity::rigidity_matrix_projective(fw, k, tol)?;
    let re = rigidity::rigidity_matrix_euclidean(fw)?;
    let se = rigidity::stress_space(&re, tol)?;
    let sx = rigidity::stress_space(&rx, tol)?;
    Ok(StressComparison {
        curvature: k.sign() as i32,
        stress_dim_e: se.dimension,
        stress_dim_x: sx.dimension,
        max_principal_angle: linalg::max_principal_angle(&se.basis, &sx.basis),
    })
}

/// Largest principal angle between `ker R_X` and `T_K · ker R_E`, or `None`
/// when their dimensions differ.
pub fn compare_motions(fw: &Framework, k: Curvature, tol: &Tolerance) -> Result<Option<f64>> {
    let rx = rigidity::rigidity_matrix_projective(fw, k, tol)?;
    let re = rigidity::rigidity_matrix_euclidean(fw)?;
    let (kx, _) = linalg::kernel_basis(&rx.matrix, tol)?;
    let (ke, _) = linalg::kernel_basis(&re.matrix, tol)?;
    let t = transfer_matrix(fw, k)?.to_dense();
    let (image, _) = linalg::column_span(&(t * ke), tol)?;
    Ok(linalg::max_principal_angle(&kx, &image))
}

/// Factorization, rank and stress comparison for both curvature signs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub dimension: usize,
    pub vertices: usize,
    pub edges: usize,
    pub factorization: Vec<FactorizationReport>,
    pub stresses: Vec<StressComparison>,
    /// Largest principal angle between `ker R_X` and `T_K ker R_E`, per curvature.
    pub motion_angles: Vec<Option<f64>>,
    pub pass: bool,
}

/// Runs [`verify_factorization`], [`compare_stresses`] and [`compare_motions`]
/// for `K = +1` and `K = -1` on the model coordinates of `fw`. Ambient
/// frameworks are first carried to Euclidean model coordinates.
/// Subspace angles pass within `10 · tol.abs`.
pub fn verify_equivalence(fw: &Framework, tol: &Tolerance) -> Result<EquivalenceReport> {
    let fw = match fw.convention {
        Convention::Model => fw.clone(),
        Convention::Ambient => transfer_framework_to(
            fw,
            &GeometrySpec::euclidean(fw.dimension()),
            Convention::Model,
            tol,
        )?,
    };
    let angle_tol = 10.0 * tol.abs;
    let mut report = EquivalenceReport {
        dimension: fw.dimension(),
        vertices: fw.vertex_count(),
        edges: fw.edge_count(),
        factorization: Vec::new(),
        stresses: Vec::new(),
        motion_angles: Vec::new(),
        pass: true,
    };
    for k in [Curvature::Positive, Curvature::Negative] {
        let f = verify_factorization(&fw, k, tol)?;
        let s = compare_stresses(&fw, k, tol)?;
        let m = compare_motions(&fw, k, tol)?;
        report.pass &= f.pass
            && s.stress_dim_e == s.stress_dim_x
            && s.max_principal_angle.is_none_or(|a| a <= angle_tol)
            && m.is_some_and(|a| a <= angle_tol);
        report.factorization.push(f);
        report.stresses.push(s);
        report.motion_angles.push(m);
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Framework transfer

fn natural_convention(model: Model) -> Convention {
    Convention::allowed_for(model)[Convention::allowed_for(model).len() - 1]
}

/// Ray representative in `R^{n+1}` with positive last coordinate.
fn ray(fw: &Framework, vertex: usize) -> Vec<f64> {
    fw.ambient_point(vertex)
}

fn place_on(
    target: &GeometrySpec,
    convention: Convention,
    x: &[f64],
    tol: &Tolerance,
) -> Result<Vec<f64>> {
    let n = target.dimension;
    match (target.model, convention) {
        (Model::SphereAmbient | Model::AmbientForm, _) => {
            geometry::normalize_to_surface(target, x, tol)
        }
        (Model::Euclidean, Convention::Ambient) => geometry::gnomic_project(x, tol),
        (_, _) => {
            let q = geometry::gnomic_project(x, tol)?;
            let p = q[..n].to_vec();
            let w = dot(&p, &p) - 1.0;
            match target.model {
                Model::ProjHyperbolic | Model::ProjExteriorHyperbolic if w.abs() <= tol.abs => {
                    Err(RigidityError::Absolute {
                        vertex: 0,
                        value: w,
                    })
                }
                Model::ProjHyperbolic if w > 0.0 => Err(RigidityError::InvalidPoint {
                    vertex: 0,
                    model: target.model.name(),
                    reason: "outside the unit ball".into(),
                }),
                Model::ProjExteriorHyperbolic if w < 0.0 => Err(RigidityError::InvalidPoint {
                    vertex: 0,
                    model: target.model.name(),
                    reason: "inside the unit ball".into(),
                }),
                _ => Ok(p),
            }
        }
    }
}

/// Moves a framework into `target`, keeping the graph. Points travel along
/// their ray through the origin: gnomic projection onto `x_{n+1} = 1` for
/// Euclidean and projective targets, radial normalization for surfaces.
/// The target uses its natural convention (model coordinates for
/// Euclidean and projective models).
pub fn transfer_framework(
    fw: &Framework,
    target: &GeometrySpec,
    tol: &Tolerance,
) -> Result<Framework> {
    transfer_framework_to(fw, target, natural_convention(target.model), tol)
}

pub fn transfer_framework_to(
    fw: &Framework,
    target: &GeometrySpec,
    convention: Convention,
    tol: &Tolerance,
) -> Result<Framework> {
    fw.check_structure()?;
    if target.dimension != fw.dimension() {
        return Err(RigidityError::DimensionMismatch {
            expected: fw.dimension(),
            got: target.dimension,
        });
    }
    let points = (0..fw.vertex_count())
        .map(|v| place_on(target, convention, &ray(fw, v), tol).map_err(|e| at_vertex(e, v)))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Framework::new(target.clone(), convention, points, fw.graph.edges.clone())?;
    out.member_kinds = fw.member_kinds.clone();
    Ok(out)
}

// ---------------------------------------------------------------------------
// Motion transfer

fn split(u: &[f64], width: usize, vertices: usize) -> Result<Vec<&[f64]>> {
    if u.len() != width * vertices {
        return Err(RigidityError::DimensionMismatch {
            expected: width * vertices,
            got: u.len(),
        });
    }
    Ok(u.chunks(width).collect())
}

fn block_inverse(p: &[f64], k: Curvature, vertex: usize, tol: &Tolerance) -> Result<DMatrix<f64>> {
    let b = transfer_block(p, k);
    b.inverse(p, k, tol).ok_or(RigidityError::Absolute {
        vertex,
        value: b.determinant,
    })
}

/// Per-vertex Euclidean model velocities at the gnomic images of `fw`'s points.
fn to_euclidean_model(fw: &Framework, u: &[f64], tol: &Tolerance) -> Result<Vec<Vec<f64>>> {
    let n = fw.dimension();
    let parts = split(u, fw.width(), fw.vertex_count())?;
    let mut out = Vec::with_capacity(parts.len());
    for (v, ui) in parts.into_iter().enumerate() {
        let p = &fw.points[v];
        let w = match (fw.model(), fw.convention) {
            (Model::Euclidean, Convention::Model) => ui.to_vec(),
            (Model::Euclidean, Convention::Ambient) => ui[..n].to_vec(),
            (Model::SphereAmbient, _) => {
                let e =
                    geometry::motion_sphere_to_euclid(p, ui, tol).map_err(|e| at_vertex(e, v))?;
                e[..n].to_vec()
            }
            (Model::AmbientForm, _) => {
                let a = &fw.geometry.form_coefficients;
                let on_sphere = geometry::motion_form_to_sphere(a, p, ui)?;
                let norm = dot(p, p).sqrt();
                let p_hat: Vec<f64> = p.iter().map(|x| x / norm).collect();
                let e = geometry::motion_sphere_to_euclid(&p_hat, &on_sphere, tol)
                    .map_err(|e| at_vertex(e, v))?;
                e[..n].to_vec()
            }
            (_, _) => {
                let k = fw.geometry.curvature().expect("projective model");
                let inv = block_inverse(p, k, v, tol)?;
                (inv * DVector::from_column_slice(ui))
                    .iter()
                    .copied()
                    .collect()
            }
        };
        out.push(w);
    }
    Ok(out)
}

fn from_euclidean_model(
    target: &Framework,
    euclid_points: &[Vec<f64>],
    w: &[Vec<f64>],
    tol: &Tolerance,
) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (v, wi) in w.iter().enumerate() {
        let q = geometry::homogenize(&euclid_points[v]);
        let mut w_amb = wi.clone();
        w_amb.push(0.0);
        let p = &target.points[v];
        let ui = match (target.model(), target.convention) {
            (Model::Euclidean, Convention::Model) => wi.clone(),
            (Model::Euclidean, Convention::Ambient) => w_amb,
            (Model::SphereAmbient, _) => geometry::motion_euclid_to_sphere(&q, &w_amb, tol)?,
            (Model::AmbientForm, _) => {
                let on_sphere = geometry::motion_euclid_to_sphere(&q, &w_amb, tol)?;
                geometry::motion_sphere_to_form(&target.geometry.form_coefficients, p, &on_sphere)?
            }
            (_, _) => {
                let k = target.geometry.curvature().expect("projective model");
                let b = transfer_block(p, k);
                (b.matrix * DVector::from_column_slice(wi))
                    .iter()
                    .copied()
                    .collect()
            }
        };
        out.extend(ui);
    }
    Ok(out)
}

/// Carries a first-order motion `u` of `fw` (stacked per vertex in `fw`'s
/// convention) to the framework [`transfer_framework_to`] produces for
/// `target`. Returns the transferred framework and the stacked image motion.
pub fn transfer_motion(
    fw: &Framework,
    u: &[f64],
    target: &GeometrySpec,
    convention: Convention,
    tol: &Tolerance,
) -> Result<(Framework, Vec<f64>)> {
    let image_fw = transfer_framework_to(fw, target, convention, tol)?;
    let euclid = transfer_framework_to(
        fw,
        &GeometrySpec::euclidean(fw.dimension()),
        Convention::Model,
        tol,
    )?;
    let w = to_euclidean_model(fw, u, tol)?;
    let image = from_euclidean_model(&image_fw, &euclid.points, &w, tol)?;
    Ok((image_fw, image))
}

/// Differential of the central projection applied to an ambient motion:
/// the velocity of the projective-model image of each moving vertex.
pub fn project_ambient_motion(fw: &Framework, u: &[f64], tol: &Tolerance) -> Result<Vec<f64>> {
    if fw.convention != Convention::Ambient {
        return Err(RigidityError::ConventionMismatch {
            expected: "ambient",
            got: fw.convention.name(),
        });
    }
    let parts = split(u, fw.width(), fw.vertex_count())?;
    let mut out = Vec::new();
    for (v, ui) in parts.into_iter().enumerate() {
        out.extend(
            geometry::project_velocity(&fw.points[v], ui, tol).map_err(|e| at_vertex(e, v))?,
        );
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Coning

/// Cone over a spherical framework: the ambient points become points of
/// `E^{n+1}` and a new last vertex at the origin is joined to every vertex.
pub fn cone_framework(fw: &Framework) -> Result<Framework> {
    if fw.model() != Model::SphereAmbient {
        return Err(RigidityError::Unsupported(format!(
            "coning needs a sphere_ambient framework, got {}",
            fw.model()
        )));
    }
    fw.check_structure()?;
    let n1 = fw.dimension() + 1;
    let v = fw.vertex_count();
    let mut points = fw.points.clone();
    points.push(vec![0.0; n1]);
    let mut edges = fw.graph.edges.clone();
    edges.extend((0..v).map(|i| (i, v)));
    let mut cone = Framework::new(
        GeometrySpec::euclidean(n1),
        Convention::Model,
        points,
        edges,
    )?;
    if let Some(kinds) = &fw.member_kinds {
        let mut kinds = kinds.clone();
        kinds.extend(std::iter::repeat_n(MemberKind::Bar, v));
        cone.member_kinds = Some(kinds);
    }
    Ok(cone)
}

// ---------------------------------------------------------------------------
// Projective maps

/// An invertible `(n+1) × (n+1)` matrix acting on homogeneous model coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveMap {
    pub matrix: DMatrix<f64>,
}

impl ProjectiveMap {
    pub fn new(matrix: DMatrix<f64>, tol: &Tolerance) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() < 2 {
            return Err(RigidityError::Unsupported(
                "projective map must be square".into(),
            ));
        }
        let rank = linalg::numeric_rank(&matrix, tol)?;
        if rank.rank < matrix.nrows() {
            return Err(RigidityError::SingularMap);
        }
        Ok(ProjectiveMap { matrix })
    }

    pub fn identity(n: usize) -> Self {
        ProjectiveMap {
            matrix: DMatrix::identity(n + 1, n + 1),
        }
    }

    /// `x ↦ dehomogenize(M (x, 1))`.
    pub fn apply(&self, p: &[f64], tol: &Tolerance) -> Result<Vec<f64>> {
        let n = self.matrix.nrows() - 1;
        geometry::check_len(p, n)?;
        let y = &self.matrix * DVector::from_vec(geometry::homogenize(p));
        let w = y[n];
        if w.abs() < tol.abs {
            return Err(RigidityError::PointAtInfinity {
                vertex: 0,
                value: w,
            });
        }
        Ok((0..n).map(|i| y[i] / w).collect())
    }
}

/// Applies a projective map to every vertex of a model-convention framework.
pub fn apply_projective_transform(
    fw: &Framework,
    map: &ProjectiveMap,
    tol: &Tolerance,
) -> Result<Framework> {
    if fw.convention != Convention::Model {
        return Err(RigidityError::ConventionMismatch {
            expected: "model",
            got: fw.convention.name(),
        });
    }
    let points = fw
        .points
        .iter()
        .enumerate()
        .map(|(v, p)| {
            map.apply(p, tol).map_err(|e| match e {
                RigidityError::PointAtInfinity { value, .. } => {
                    RigidityError::PointAtInfinity { vertex: v, value }
                }
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(fw.with_points(points))
}
