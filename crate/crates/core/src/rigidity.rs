//! Rigidity matrices, first-order motions, trivial motions, self-stresses
//! and first-order rigidity verdicts.
//!
//! Two matrix conventions are supported:
//!
//! - **ambient**: `(n + 1)` columns per vertex, one row per edge and one
//!   tangency row per vertex. Non-Euclidean rows come from the diagonal form
//!   `<x,y> = Σ a_i x_i y_i`: edge `{i,j}` puts `D p_j` in block `i` and
//!   `D p_i` in block `j`; tangency row `k` puts `D p_k` in block `k`.
//! - **model**: `n` columns per vertex, one row per edge. Euclidean rows are
//!   `p_i − p_j | p_j − p_i`; projective-model rows are `k_ij | k_ji` with
//!   `k_ij = ((1 + K p_i·p_j) / (1 + K p_i·p_i)) p_i − p_j`.
//!
//! Trivial motions are generated by linear maps `u(x) = A x` with
//! `AᵀD + DA = 0` (Euclidean: infinitesimal rotations plus translations),
//! restricted to the vertices and, in model coordinates, pushed through the
//! differential of the central projection.

use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Result, RigidityError};
use crate::framework::{Convention, Framework};
use crate::geometry::{self, dot, Curvature, GeometrySpec, Model};
use crate::linalg::{self, RankInfo};
use crate::Tolerance;

pub use crate::linalg::numeric_rank;

/// What a row of a rigidity matrix constrains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RowLabel {
    Edge { edge: usize, i: usize, j: usize },
    Tangency { vertex: usize },
}

impl fmt::Display for RowLabel {
    /// Report labels use 1-based vertex numbers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RowLabel::Edge { i, j, .. } => write!(f, "{{{},{}}}", i + 1, j + 1),
            RowLabel::Tangency { vertex } => write!(f, "<p{0},u{0}>", vertex + 1),
        }
    }
}

/// A labeled rigidity matrix together with the configuration it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct RigidityMatrix {
    pub matrix: DMatrix<f64>,
    pub rows: Vec<RowLabel>,
    pub convention: Convention,
    /// The geometry whose constraints the rows encode.
    pub geometry: GeometrySpec,
    /// Vertex coordinates in `convention`.
    pub points: Vec<Vec<f64>>,
    /// Rows of edges with coincident endpoints. They are kept (as zero rows)
    /// so that row indices stay aligned with the edge list.
    pub degenerate_rows: Vec<usize>,
}

impl RigidityMatrix {
    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    pub fn block_width(&self) -> usize {
        match self.convention {
            Convention::Ambient => self.geometry.dimension + 1,
            Convention::Model => self.geometry.dimension,
        }
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Column labels `p<vertex>_x<coord>`, both 1-based.
    pub fn column_labels(&self) -> Vec<String> {
        let w = self.block_width();
        (0..self.vertex_count())
            .flat_map(|v| (0..w).map(move |c| format!("p{}_x{}", v + 1, c + 1)))
            .collect()
    }

    /// Column-labeled CSV: a header row, then one row per constraint led by its label.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["row".to_string()];
        header.extend(self.column_labels());
        writer.write_record(&header).expect("in-memory write");
        for (r, label) in self.rows.iter().enumerate() {
            let mut record = vec![label.to_string()];
            record.extend(self.matrix.row(r).iter().map(|x| format!("{}", x + 0.0)));
            writer.write_record(&record).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn rank(&self, tol: &Tolerance) -> Result<RankInfo> {
        numeric_rank(&self.matrix, tol)
    }
}

fn require(fw: &Framework, convention: Convention) -> Result<()> {
    if fw.convention != convention {
        return Err(RigidityError::ConventionMismatch {
            expected: convention.name(),
            got: fw.convention.name(),
        });
    }
    fw.check_structure()
}

fn edge_rows(fw: &Framework) -> Vec<RowLabel> {
    fw.graph
        .edges
        .iter()
        .enumerate()
        .map(|(edge, &(i, j))| RowLabel::Edge { edge, i, j })
        .collect()
}

fn set_block(m: &mut DMatrix<f64>, row: usize, vertex: usize, width: usize, values: &[f64]) {
    for (c, &x) in values.iter().enumerate() {
        m[(row, vertex * width + c)] = x;
    }
}

fn degenerate(fw: &Framework) -> Vec<usize> {
    fw.graph
        .edges
        .iter()
        .enumerate()
        .filter(|(_, &(i, j))| fw.points[i] == fw.points[j])
        .map(|(e, _)| e)
        .collect()
}

/// `R_E(G,p)`: rows `p_i − p_j | p_j − p_i` on raw model coordinates.
///
/// Any model-convention framework is accepted and read as points of `R^n`.
pub fn rigidity_matrix_euclidean(fw: &Framework) -> Result<RigidityMatrix> {
    require(fw, Convention::Model)?;
    let n = fw.dimension();
    let mut m = DMatrix::zeros(fw.edge_count(), n * fw.vertex_count());
    for (r, &(i, j)) in fw.graph.edges.iter().enumerate() {
        let d: Vec<f64> = fw.points[i]
            .iter()
            .zip(&fw.points[j])
            .map(|(a, b)| a - b)
            .collect();
        let neg: Vec<f64> = d.iter().map(|x| -x).collect();
        set_block(&mut m, r, i, n, &d);
        set_block(&mut m, r, j, n, &neg);
    }
    Ok(RigidityMatrix {
        matrix: m,
        rows: edge_rows(fw),
        convention: Convention::Model,
        geometry: GeometrySpec::euclidean(n),
        points: fw.points.clone(),
        degenerate_rows: degenerate(fw),
    })
}

/// `k_ij = ((1 + K p_i·p_j) / (1 + K p_i·p_i)) p_i − p_j`.
pub fn k_vector(p_i: &[f64], p_j: &[f64], k: Curvature) -> Vec<f64> {
    let ks = k.sign();
    let scale = (1.0 + ks * dot(p_i, p_j)) / (1.0 + ks * dot(p_i, p_i));
    p_i.iter().zip(p_j).map(|(a, b)| scale * a - b).collect()
}

/// `R_X(G,p)` for the projective model with curvature sign `K`.
///
/// Fails with [`RigidityError::Absolute`] if some vertex has `1 + K p·p`
/// within tolerance of zero.
pub fn rigidity_matrix_projective(
    fw: &Framework,
    k: Curvature,
    tol: &Tolerance,
) -> Result<RigidityMatrix> {
    require(fw, Convention::Model)?;
    let n = fw.dimension();
    for (vertex, p) in fw.points.iter().enumerate() {
        let w = 1.0 + k.sign() * dot(p, p);
        if w.abs() <= tol.abs {
            return Err(RigidityError::Absolute { vertex, value: w });
        }
    }
    let mut m = DMatrix::zeros(fw.edge_count(), n * fw.vertex_count());
    for (r, &(i, j)) in fw.graph.edges.iter().enumerate() {
        set_block(&mut m, r, i, n, &k_vector(&fw.points[i], &fw.points[j], k));
        set_block(&mut m, r, j, n, &k_vector(&fw.points[j], &fw.points[i], k));
    }
    let geometry = match (k, fw.model()) {
        (Curvature::Positive, _) => GeometrySpec::proj_sphere(n),
        (Curvature::Negative, Model::ProjExteriorHyperbolic) => {
            GeometrySpec::proj_exterior_hyperbolic(n)
        }
        (Curvature::Negative, _) => GeometrySpec::proj_hyperbolic(n),
    };
    Ok(RigidityMatrix {
        matrix: m,
        rows: edge_rows(fw),
        convention: Convention::Model,
        geometry,
        points: fw.points.clone(),
        degenerate_rows: degenerate(fw),
    })
}

/// The `(|E| + v) × (n+1)v` ambient matrix: edge rows followed by tangency rows.
pub fn rigidity_matrix_ambient(fw: &Framework) -> Result<RigidityMatrix> {
    require(fw, Convention::Ambient)?;
    let w = fw.dimension() + 1;
    let v = fw.vertex_count();
    let e = fw.edge_count();
    let a = &fw.geometry.form_coefficients;
    let euclidean = fw.model() == Model::Euclidean;
    let scaled = |p: &[f64]| -> Vec<f64> { a.iter().zip(p).map(|(a, x)| a * x).collect() };

    let mut m = DMatrix::zeros(e + v, w * v);
    for (r, &(i, j)) in fw.graph.edges.iter().enumerate() {
        let (pi, pj) = (&fw.points[i], &fw.points[j]);
        if euclidean {
            let d: Vec<f64> = pi.iter().zip(pj).map(|(a, b)| a - b).collect();
            let neg: Vec<f64> = d.iter().map(|x| -x).collect();
            set_block(&mut m, r, i, w, &d);
            set_block(&mut m, r, j, w, &neg);
        } else {
            set_block(&mut m, r, i, w, &scaled(pj));
            set_block(&mut m, r, j, w, &scaled(pi));
        }
    }
    let mut rows = edge_rows(fw);
    for k in 0..v {
        let row = if euclidean {
            let mut e = vec![0.0; w];
            e[w - 1] = 1.0;
            e
        } else {
            scaled(&fw.points[k])
        };
        set_block(&mut m, e + k, k, w, &row);
        rows.push(RowLabel::Tangency { vertex: k });
    }
    Ok(RigidityMatrix {
        matrix: m,
        rows,
        convention: Convention::Ambient,
        geometry: fw.geometry.clone(),
        points: fw.points.clone(),
        degenerate_rows: degenerate(fw),
    })
}

/// The matrix whose kernel is the framework's first-order motions in its own geometry.
pub fn rigidity_matrix(fw: &Framework, tol: &Tolerance) -> Result<RigidityMatrix> {
    match (fw.convention, fw.geometry.curvature()) {
        (Convention::Ambient, _) => rigidity_matrix_ambient(fw),
        (Convention::Model, None) => rigidity_matrix_euclidean(fw),
        (Convention::Model, Some(k)) => rigidity_matrix_projective(fw, k, tol),
    }
}

// ---------------------------------------------------------------------------
// Trivial motions

/// A linear infinitesimal isometry `u(x) = A x` of the ambient space.
#[derive(Clone, Debug, PartialEq)]
pub struct TrivialMotionGenerator {
    pub matrix: DMatrix<f64>,
}

impl TrivialMotionGenerator {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let a = &self.matrix;
        (0..a.nrows())
            .map(|r| (0..a.ncols()).map(|c| a[(r, c)] * x[c]).sum())
            .collect()
    }

    /// How far the generator is from preserving the geometry's form:
    /// `max |AᵀD + DA|` for nondegenerate forms; for Euclidean space the
    /// larger of the last row and the skew defect of the linear block.
    pub fn residual(&self, geometry: &GeometrySpec) -> f64 {
        let a = &self.matrix;
        let w = a.nrows();
        if geometry.model == Model::Euclidean {
            let last = (0..w).map(|c| a[(w - 1, c)].abs()).fold(0.0, f64::max);
            let lin = a.view((0, 0), (w - 1, w - 1));
            let skew = linalg::max_abs(&(lin + lin.transpose()));
            return last.max(skew);
        }
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(
            &geometry.form_coefficients,
        ));
        linalg::max_abs(&(a.transpose() * &d + &d * a))
    }
}

/// Basis of the generator space: `n(n+1)/2` matrices.
///
/// Nondegenerate forms use `A = D⁻¹ W` for the elementary skew matrices `W`;
/// Euclidean space uses skew blocks plus translations into the last column.
pub fn trivial_generators(geometry: &GeometrySpec) -> Vec<TrivialMotionGenerator> {
    let w = geometry.dimension + 1;
    let mut out = Vec::with_capacity(w * (w - 1) / 2);
    if geometry.model == Model::Euclidean {
        let n = geometry.dimension;
        for i in 0..n {
            for j in i + 1..n {
                let mut a = DMatrix::zeros(w, w);
                a[(i, j)] = -1.0;
                a[(j, i)] = 1.0;
                out.push(TrivialMotionGenerator { matrix: a });
            }
        }
        for i in 0..n {
            let mut a = DMatrix::zeros(w, w);
            a[(i, n)] = 1.0;
            out.push(TrivialMotionGenerator { matrix: a });
        }
        return out;
    }
    let a = &geometry.form_coefficients;
    for i in 0..w {
        for j in i + 1..w {
            let mut m = DMatrix::zeros(w, w);
            m[(i, j)] = -1.0 / a[i];
            m[(j, i)] = 1.0 / a[j];
            out.push(TrivialMotionGenerator { matrix: m });
        }
    }
    out
}

/// Trivial motions restricted to a configuration.
#[derive(Clone, Debug)]
pub struct TrivialSpace {
    /// Orthonormal basis, one restricted motion per column.
    pub basis: DMatrix<f64>,
    /// Dimension of the generator space, `n(n+1)/2`.
    pub generator_dimension: usize,
    /// Dimension after restriction to the vertices.
    pub restricted_dimension: usize,
    pub rank: RankInfo,
}

impl TrivialSpace {
    /// Whether restriction to the vertices loses no trivial motion.
    pub fn is_injective(&self) -> bool {
        self.restricted_dimension == self.generator_dimension
    }
}

/// Restriction of one generator to the vertices, in the given convention.
fn restrict(
    generator: &TrivialMotionGenerator,
    convention: Convention,
    points: &[Vec<f64>],
    tol: &Tolerance,
) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (vertex, p) in points.iter().enumerate() {
        match convention {
            Convention::Ambient => out.extend(generator.apply(p)),
            Convention::Model => {
                let x = geometry::homogenize(p);
                let v = geometry::project_velocity(&x, &generator.apply(&x), tol)
                    .map_err(|e| at_vertex(e, vertex))?;
                out.extend(v);
            }
        }
    }
    Ok(out)
}

pub(crate) fn at_vertex(err: RigidityError, vertex: usize) -> RigidityError {
    match err {
        RigidityError::Equator { value, .. } => RigidityError::Equator { vertex, value },
        RigidityError::Absolute { value, .. } => RigidityError::Absolute { vertex, value },
        RigidityError::InvalidPoint { model, reason, .. } => RigidityError::InvalidPoint {
            vertex,
            model,
            reason,
        },
        other => other,
    }
}

/// Restricted trivial motions of `points` in `geometry`, expressed in `convention`.
pub fn trivial_space(
    geometry: &GeometrySpec,
    convention: Convention,
    points: &[Vec<f64>],
    tol: &Tolerance,
) -> Result<TrivialSpace> {
    let generators = trivial_generators(geometry);
    let width = match convention {
        Convention::Ambient => geometry.dimension + 1,
        Convention::Model => geometry.dimension,
    };
    let mut m = DMatrix::zeros(width * points.len(), generators.len());
    for (c, g) in generators.iter().enumerate() {
        let col = restrict(g, convention, points, tol)?;
        m.column_mut(c).copy_from_slice(&col);
    }
    let (basis, rank) = linalg::column_span(&m, tol)?;
    Ok(TrivialSpace {
        restricted_dimension: rank.rank,
        generator_dimension: generators.len(),
        basis,
        rank,
    })
}

/// Trivial motions of a framework in its own geometry and convention.
pub fn trivial_motion_space(fw: &Framework, tol: &Tolerance) -> Result<TrivialSpace> {
    fw.check_structure()?;
    trivial_space(&fw.geometry, fw.convention, &fw.points, tol)
}

// ---------------------------------------------------------------------------
// Motion and stress spaces

/// Kernel of a rigidity matrix with its trivial/internal split.
#[derive(Clone, Debug)]
pub struct MotionSpace {
    /// Orthonormal kernel basis, one motion per column.
    pub basis: DMatrix<f64>,
    pub dimension: usize,
    pub trivial: TrivialSpace,
    pub trivial_dimension: usize,
    pub internal_dimension: usize,
    pub rank: RankInfo,
}

impl MotionSpace {
    /// Orthonormal basis of the kernel's orthogonal complement to the trivial motions.
    pub fn internal_flexes(&self) -> DMatrix<f64> {
        let k = self.internal_dimension;
        let rows = self.basis.nrows();
        if k == 0 {
            return DMatrix::zeros(rows, 0);
        }
        let t = &self.trivial.basis;
        let projected = &self.basis - t * (t.transpose() * &self.basis);
        let svd = projected.svd(true, false);
        let u = svd.u.expect("requested U");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        DMatrix::from_fn(rows, k, |r, c| u[(r, order[c])])
    }
}

/// First-order motions: the kernel of `m`, split against the restricted trivial motions.
pub fn motion_space(m: &RigidityMatrix, tol: &Tolerance) -> Result<MotionSpace> {
    let (basis, rank) = linalg::kernel_basis(&m.matrix, tol)?;
    let trivial = trivial_space(&m.geometry, m.convention, &m.points, tol)?;
    let dimension = basis.ncols();
    let trivial_dimension = trivial.restricted_dimension;
    Ok(MotionSpace {
        basis,
        dimension,
        trivial_dimension,
        internal_dimension: dimension.saturating_sub(trivial_dimension),
        trivial,
        rank,
    })
}

/// Self-stresses: the left kernel of a rigidity matrix.
#[derive(Clone, Debug)]
pub struct StressSpace {
    /// Orthonormal basis, one stress per column, indexed like `rows`.
    pub basis: DMatrix<f64>,
    pub dimension: usize,
    pub rows: Vec<RowLabel>,
}

pub fn stress_space(m: &RigidityMatrix, tol: &Tolerance) -> Result<StressSpace> {
    let (basis, _) = linalg::left_kernel_basis(&m.matrix, tol)?;
    Ok(StressSpace {
        dimension: basis.ncols(),
        basis,
        rows: m.rows.clone(),
    })
}

// ---------------------------------------------------------------------------
// Verdicts

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Rigid,
    Flexible,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Rigid => "RIGID",
            Verdict::Flexible => "FLEXIBLE",
        })
    }
}

/// Advisory comparison of the rank with `n·v − n(n+1)/2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsostaticCheck {
    /// Rank of the model-convention constraint rows (tangency rows removed).
    pub model_rank: usize,
    pub expected_rank: usize,
    pub independent_rows: bool,
    pub isostatic: bool,
}

/// Everything the `analyze` command reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerdictReport {
    pub verdict: Verdict,
    pub model: Model,
    pub convention: Convention,
    pub vertices: usize,
    pub edges: usize,
    pub rows: usize,
    pub columns: usize,
    pub rank: usize,
    pub motion_dim: usize,
    pub trivial_dim: usize,
    pub generator_dim: usize,
    pub internal_dim: usize,
    pub stress_dim: usize,
    pub singular_values: Vec<f64>,
    pub rank_threshold: f64,
    pub singular_value_gap: Option<f64>,
    pub degenerate_edges: Vec<usize>,
    pub isostatic: Option<IsostaticCheck>,
}

impl VerdictReport {
    pub fn is_rigid(&self) -> bool {
        self.verdict == Verdict::Rigid
    }
}

fn spans_affinely(fw: &Framework, tol: &Tolerance) -> Result<bool> {
    let w = fw.dimension() + 1;
    if fw.vertex_count() < w {
        return Ok(false);
    }
    let lifts = DMatrix::from_fn(w, fw.vertex_count(), |r, c| fw.ambient_point(c)[r]);
    Ok(numeric_rank(&lifts, tol)?.rank == w)
}

/// Verdict from an already-built matrix of `fw`.
pub fn verdict_from_matrix(
    fw: &Framework,
    m: &RigidityMatrix,
    tol: &Tolerance,
) -> Result<VerdictReport> {
    let motions = motion_space(m, tol)?;
    let stresses = stress_space(m, tol)?;
    let rank = motions.rank.rank;
    let n = fw.dimension();
    let v = fw.vertex_count();
    let isostatic = if spans_affinely(fw, tol)? {
        let model_rank = match m.convention {
            Convention::Ambient => rank.saturating_sub(v),
            Convention::Model => rank,
        };
        let expected_rank = n * v - n * (n + 1) / 2;
        let independent_rows = model_rank == fw.edge_count();
        Some(IsostaticCheck {
            model_rank,
            expected_rank,
            independent_rows,
            isostatic: model_rank == expected_rank && independent_rows,
        })
    } else {
        None
    };
    let verdict = if motions.dimension == motions.trivial_dimension {
        Verdict::Rigid
    } else {
        Verdict::Flexible
    };
    Ok(VerdictReport {
        verdict,
        model: m.geometry.model,
        convention: m.convention,
        vertices: v,
        edges: fw.edge_count(),
        rows: m.nrows(),
        columns: m.ncols(),
        rank,
        motion_dim: motions.dimension,
        trivial_dim: motions.trivial_dimension,
        generator_dim: motions.trivial.generator_dimension,
        internal_dim: motions.internal_dimension,
        stress_dim: stresses.dimension,
        singular_value_gap: motions.rank.gap(),
        rank_threshold: motions.rank.threshold,
        singular_values: motions.rank.singular_values,
        degenerate_edges: m.degenerate_rows.clone(),
        isostatic,
    })
}

/// First-order rigidity of a validated framework in its own geometry:
/// RIGID iff every first-order motion is a restricted trivial motion.
pub fn rigidity_verdict(fw: &Framework, tol: &Tolerance) -> Result<VerdictReport> {
    fw.check(tol)?;
    let m = rigidity_matrix(fw, tol)?;
    verdict_from_matrix(fw, &m, tol)
}
