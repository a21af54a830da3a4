//! Graphs, configurations, validation and the framework file format.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RigidityError};
use crate::geometry::{self, bilinear_form, dot, GeometrySpec, Model};
use crate::Tolerance;

/// A finite simple graph on vertices `0..vertex_count`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Self {
        Graph {
            vertex_count,
            edges,
        }
    }

    pub fn complete(vertex_count: usize) -> Self {
        let edges = (0..vertex_count)
            .flat_map(|i| (i + 1..vertex_count).map(move |j| (i, j)))
            .collect();
        Graph::new(vertex_count, edges)
    }

    pub fn cycle(vertex_count: usize) -> Self {
        let edges = (0..vertex_count)
            .map(|i| (i, (i + 1) % vertex_count))
            .collect();
        Graph::new(vertex_count, edges)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemberKind {
    #[default]
    Bar,
    Cable,
    Strut,
}

/// Whether vertices carry ambient (`n + 1`) or projective-model (`n`) coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    Ambient,
    Model,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::Ambient => "ambient",
            Convention::Model => "model",
        }
    }

    /// Conventions a model may be stored in.
    pub fn allowed_for(model: Model) -> &'static [Convention] {
        match model {
            Model::Euclidean => &[Convention::Ambient, Convention::Model],
            Model::SphereAmbient | Model::AmbientForm => &[Convention::Ambient],
            Model::ProjSphere | Model::ProjHyperbolic | Model::ProjExteriorHyperbolic => {
                &[Convention::Model]
            }
        }
    }
}

/// A graph with a configuration `p: V → X`, tagged with its geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct Framework {
    pub graph: Graph,
    pub geometry: GeometrySpec,
    pub convention: Convention,
    pub points: Vec<Vec<f64>>,
    /// Per-edge member kinds. They annotate reports only; no computation reads them.
    pub member_kinds: Option<Vec<MemberKind>>,
}

impl Framework {
    /// Builds a framework after checking the coordinate convention and the
    /// number of coordinates per point. Graph and membership problems are
    /// left to [`Framework::validate`].
    pub fn new(
        geometry: GeometrySpec,
        convention: Convention,
        points: Vec<Vec<f64>>,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        if !Convention::allowed_for(geometry.model).contains(&convention) {
            return Err(RigidityError::ConventionMismatch {
                expected: Convention::allowed_for(geometry.model)[0].name(),
                got: convention.name(),
            });
        }
        let width = match convention {
            Convention::Ambient => geometry.dimension + 1,
            Convention::Model => geometry.dimension,
        };
        for (vertex, p) in points.iter().enumerate() {
            if p.len() != width {
                return Err(RigidityError::InvalidPoint {
                    vertex,
                    model: geometry.model.name(),
                    reason: format!("expected {width} coordinates, got {}", p.len()),
                });
            }
        }
        Ok(Framework {
            graph: Graph::new(points.len(), edges),
            geometry,
            convention,
            points,
            member_kinds: None,
        })
    }

    pub fn with_member_kinds(mut self, kinds: Vec<MemberKind>) -> Self {
        self.member_kinds = Some(kinds);
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edges.len()
    }

    pub fn dimension(&self) -> usize {
        self.geometry.dimension
    }

    pub fn model(&self) -> Model {
        self.geometry.model
    }

    /// Coordinates stored per vertex.
    pub fn width(&self) -> usize {
        match self.convention {
            Convention::Ambient => self.dimension() + 1,
            Convention::Model => self.dimension(),
        }
    }

    /// Ambient representative of vertex `i`; model points are lifted to `(p, 1)`.
    pub fn ambient_point(&self, i: usize) -> Vec<f64> {
        match self.convention {
            Convention::Ambient => self.points[i].clone(),
            Convention::Model => geometry::homogenize(&self.points[i]),
        }
    }

    pub fn member_kind(&self, edge: usize) -> MemberKind {
        self.member_kinds
            .as_ref()
            .and_then(|k| k.get(edge).copied())
            .unwrap_or_default()
    }

    /// Same geometry and convention, new points and edges.
    pub fn with_points(&self, points: Vec<Vec<f64>>) -> Framework {
        Framework {
            graph: Graph::new(points.len(), self.graph.edges.clone()),
            points,
            ..self.clone()
        }
    }

    /// Structural checks needed before any matrix can be assembled:
    /// point widths, edge indices, loops and duplicate edges.
    pub fn check_structure(&self) -> Result<()> {
        let report = self.validate(&Tolerance::default());
        match report.violations.into_iter().find(|v| v.is_structural()) {
            Some(v) => Err(RigidityError::InvalidFramework(v.to_string())),
            None => Ok(()),
        }
    }

    /// Full validation; returns the first violation as an error.
    pub fn check(&self, tol: &Tolerance) -> Result<()> {
        let report = self.validate(tol);
        match report.violations.into_iter().next() {
            None => Ok(()),
            Some(Issue::OnAbsolute { vertex, value }) => {
                Err(RigidityError::Absolute { vertex, value })
            }
            Some(Issue::BelowEquator { vertex, value }) => {
                Err(RigidityError::Equator { vertex, value })
            }
            Some(v @ (Issue::OffSurface { .. } | Issue::WrongRegion { .. })) => {
                Err(RigidityError::InvalidPoint {
                    vertex: v.vertex().unwrap_or(0),
                    model: self.model().name(),
                    reason: v.to_string(),
                })
            }
            Some(v) => Err(RigidityError::InvalidFramework(v.to_string())),
        }
    }

    /// Lists every problem with the framework without modifying it.
    pub fn validate(&self, tol: &Tolerance) -> ValidationReport {
        let mut report = ValidationReport::default();
        let v = self.graph.vertex_count;
        if self.points.len() != v {
            report.violations.push(Issue::VertexCount {
                vertices: v,
                points: self.points.len(),
            });
        }
        let width = self.width();
        let mut shapes_ok = true;
        for (vertex, p) in self.points.iter().enumerate() {
            if p.len() != width {
                shapes_ok = false;
                report.violations.push(Issue::PointLength {
                    vertex,
                    expected: width,
                    got: p.len(),
                });
            } else if p.iter().any(|x| !x.is_finite()) {
                shapes_ok = false;
                report.violations.push(Issue::NonFinite { vertex });
            }
        }

        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        for (edge, &(i, j)) in self.graph.edges.iter().enumerate() {
            if i >= v || j >= v {
                report.violations.push(Issue::EdgeOutOfRange { edge, i, j });
                continue;
            }
            if i == j {
                report.violations.push(Issue::Loop { edge, vertex: i });
                continue;
            }
            let key = (i.min(j), i.max(j));
            if let Some(&first) = seen.get(&key) {
                report
                    .violations
                    .push(Issue::DuplicateEdge { edge, first, i, j });
                continue;
            }
            seen.insert(key, edge);
            if shapes_ok && i < self.points.len() && j < self.points.len() {
                let d: f64 = self.points[i]
                    .iter()
                    .zip(&self.points[j])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if d <= tol.abs {
                    report.notes.push(Issue::DegenerateEdge { edge, i, j });
                }
            }
        }
        if let Some(kinds) = &self.member_kinds {
            if kinds.len() != self.graph.edges.len() {
                report.violations.push(Issue::MemberKindsLength {
                    edges: self.graph.edges.len(),
                    kinds: kinds.len(),
                });
            }
        }

        if shapes_ok {
            for (vertex, p) in self.points.iter().enumerate() {
                self.check_membership(vertex, p, tol, &mut report);
            }
        }
        report
    }

    fn check_membership(
        &self,
        vertex: usize,
        p: &[f64],
        tol: &Tolerance,
        report: &mut ValidationReport,
    ) {
        let n = self.dimension();
        match (self.model(), self.convention) {
            (Model::Euclidean, Convention::Model) | (Model::ProjSphere, _) => {}
            (Model::Euclidean, Convention::Ambient) => {
                let residual = p[n] - 1.0;
                if residual.abs() > tol.abs {
                    report
                        .violations
                        .push(Issue::OffSurface { vertex, residual });
                }
            }
            (Model::SphereAmbient, _) => {
                if p[n] <= tol.abs {
                    report.violations.push(Issue::BelowEquator {
                        vertex,
                        value: p[n],
                    });
                }
                let residual = dot(p, p) - 1.0;
                if residual.abs() > tol.abs {
                    report
                        .violations
                        .push(Issue::OffSurface { vertex, residual });
                }
            }
            (Model::ProjHyperbolic, _) => {
                let w = 1.0 - dot(p, p);
                if w.abs() <= tol.abs {
                    report
                        .violations
                        .push(Issue::OnAbsolute { vertex, value: w });
                } else if w < 0.0 {
                    report.violations.push(Issue::WrongRegion {
                        vertex,
                        expected: "inside the unit ball",
                    });
                }
            }
            (Model::ProjExteriorHyperbolic, _) => {
                let w = dot(p, p) - 1.0;
                if w.abs() <= tol.abs {
                    report
                        .violations
                        .push(Issue::OnAbsolute { vertex, value: w });
                } else if w < 0.0 {
                    report.violations.push(Issue::WrongRegion {
                        vertex,
                        expected: "outside the unit ball",
                    });
                }
            }
            (Model::AmbientForm, _) => {
                if p[n] <= tol.abs {
                    report.violations.push(Issue::BelowEquator {
                        vertex,
                        value: p[n],
                    });
                }
                let q = bilinear_form(&self.geometry, p, p).unwrap_or(f64::NAN);
                if q.abs() <= tol.abs {
                    report
                        .violations
                        .push(Issue::OnAbsolute { vertex, value: q });
                } else if (q - self.geometry.level).abs() > tol.abs {
                    report.notes.push(Issue::FormalVertex { vertex, value: q });
                }
            }
        }
    }
}

/// One finding of [`Framework::validate`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Issue {
    VertexCount {
        vertices: usize,
        points: usize,
    },
    PointLength {
        vertex: usize,
        expected: usize,
        got: usize,
    },
    NonFinite {
        vertex: usize,
    },
    EdgeOutOfRange {
        edge: usize,
        i: usize,
        j: usize,
    },
    Loop {
        edge: usize,
        vertex: usize,
    },
    DuplicateEdge {
        edge: usize,
        first: usize,
        i: usize,
        j: usize,
    },
    MemberKindsLength {
        edges: usize,
        kinds: usize,
    },
    OffSurface {
        vertex: usize,
        residual: f64,
    },
    BelowEquator {
        vertex: usize,
        value: f64,
    },
    OnAbsolute {
        vertex: usize,
        value: f64,
    },
    WrongRegion {
        vertex: usize,
        expected: &'static str,
    },
    /// Edge with coincident endpoints; its matrix row is zero.
    DegenerateEdge {
        edge: usize,
        i: usize,
        j: usize,
    },
    /// Vertex off the level surface but not on the absolute; kept as a formal constraint.
    FormalVertex {
        vertex: usize,
        value: f64,
    },
}

impl Issue {
    fn is_structural(&self) -> bool {
        matches!(
            self,
            Issue::VertexCount { .. }
                | Issue::PointLength { .. }
                | Issue::NonFinite { .. }
                | Issue::EdgeOutOfRange { .. }
                | Issue::Loop { .. }
                | Issue::DuplicateEdge { .. }
                | Issue::MemberKindsLength { .. }
        )
    }

    pub fn vertex(&self) -> Option<usize> {
        match *self {
            Issue::PointLength { vertex, .. }
            | Issue::NonFinite { vertex }
            | Issue::Loop { vertex, .. }
            | Issue::OffSurface { vertex, .. }
            | Issue::BelowEquator { vertex, .. }
            | Issue::OnAbsolute { vertex, .. }
            | Issue::WrongRegion { vertex, .. }
            | Issue::FormalVertex { vertex, .. } => Some(vertex),
            _ => None,
        }
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::VertexCount { vertices, points } => {
                write!(
                    f,
                    "graph has {vertices} vertices but {points} points were given"
                )
            }
            Issue::PointLength {
                vertex,
                expected,
                got,
            } => {
                write!(
                    f,
                    "vertex {vertex}: expected {expected} coordinates, got {got}"
                )
            }
            Issue::NonFinite { vertex } => write!(f, "vertex {vertex}: non-finite coordinate"),
            Issue::EdgeOutOfRange { edge, i, j } => {
                write!(f, "edge {edge} ({i},{j}): vertex index out of range")
            }
            Issue::Loop { edge, vertex } => write!(f, "edge {edge}: loop at vertex {vertex}"),
            Issue::DuplicateEdge { edge, first, i, j } => {
                write!(f, "edge {edge} ({i},{j}) duplicates edge {first}")
            }
            Issue::MemberKindsLength { edges, kinds } => {
                write!(f, "member_kinds has {kinds} entries for {edges} edges")
            }
            Issue::OffSurface { vertex, residual } => {
                write!(
                    f,
                    "vertex {vertex}: off the model surface (residual {residual:e})"
                )
            }
            Issue::BelowEquator { vertex, value } => {
                write!(
                    f,
                    "vertex {vertex}: not in the open upper half (x_n+1 = {value:e})"
                )
            }
            Issue::OnAbsolute { vertex, value } => {
                write!(f, "vertex {vertex}: on the absolute ({value:e})")
            }
            Issue::WrongRegion { vertex, expected } => {
                write!(f, "vertex {vertex}: must lie {expected}")
            }
            Issue::DegenerateEdge { edge, i, j } => {
                write!(f, "edge {edge} ({i},{j}): coincident endpoints")
            }
            Issue::FormalVertex { vertex, value } => {
                write!(
                    f,
                    "vertex {vertex}: <p,p> = {value} off the level surface (formal)"
                )
            }
        }
    }
}

/// Result of [`Framework::validate`]. `notes` never make a framework invalid.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Issue>,
    pub notes: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Per-edge distances `c_ij` under the framework's metric.
pub fn edge_lengths(fw: &Framework, tol: &Tolerance) -> Result<Vec<f64>> {
    if !fw.geometry.is_metric() {
        return Err(RigidityError::NonMetric(fw.model().name()));
    }
    edge_values(fw, tol)
}

/// Per-edge form invariants `<p̂_i, p̂_j>` of the normalized endpoints, for
/// models without a metric (exterior hyperbolic, indefinite ambient forms).
pub fn edge_invariants(fw: &Framework, tol: &Tolerance) -> Result<Vec<f64>> {
    if fw.geometry.is_metric() {
        return Err(RigidityError::Unsupported(format!(
            "{} has a metric; use edge_lengths",
            fw.model()
        )));
    }
    edge_values(fw, tol)
}

fn edge_values(fw: &Framework, tol: &Tolerance) -> Result<Vec<f64>> {
    fw.check_structure()?;
    fw.graph
        .edges
        .iter()
        .enumerate()
        .map(|(e, &(i, j))| {
            geometry::distance(&fw.geometry, &fw.points[i], &fw.points[j], tol)
                .map_err(|err| relabel_pair(err, i, j).on_edge(e, i, j))
        })
        .collect()
}

/// Point-level errors report vertex 0/1 for the first/second argument.
fn relabel_pair(err: RigidityError, i: usize, j: usize) -> RigidityError {
    let pick = |v: usize| if v == 0 { i } else { j };
    match err {
        RigidityError::Absolute { vertex, value } => RigidityError::Absolute {
            vertex: pick(vertex),
            value,
        },
        other => other,
    }
}

// ---------------------------------------------------------------------------
// File format

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed framework document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported model {0:?}")]
    UnsupportedModel(String),
    #[error("invalid field `{field}`: {reason}")]
    Field { field: &'static str, reason: String },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    version: u32,
    dimension: usize,
    model: String,
    #[serde(default)]
    form_coefficients: Option<Vec<f64>>,
    #[serde(default)]
    level: Option<f64>,
    coordinates: Convention,
    vertices: Vec<Vec<f64>>,
    edges: Vec<[usize; 2]>,
    #[serde(default)]
    member_kinds: Option<Vec<MemberKind>>,
}

fn field(field: &'static str, reason: impl Into<String>) -> FormatError {
    FormatError::Field {
        field,
        reason: reason.into(),
    }
}

/// Parses a UTF-8 JSON framework document.
pub fn parse(text: &str) -> std::result::Result<Framework, FormatError> {
    let doc: Document = serde_json::from_str(text)?;
    if doc.version != FORMAT_VERSION {
        return Err(field(
            "version",
            format!("expected {FORMAT_VERSION}, got {}", doc.version),
        ));
    }
    let model = Model::from_name(&doc.model)
        .ok_or_else(|| FormatError::UnsupportedModel(doc.model.clone()))?;
    if doc.dimension == 0 {
        return Err(field("dimension", "must be at least 1"));
    }
    let geometry = match model {
        Model::AmbientForm => {
            let a = doc
                .form_coefficients
                .ok_or_else(|| field("form_coefficients", "required for ambient_form"))?;
            let level = doc
                .level
                .ok_or_else(|| field("level", "required for ambient_form"))?;
            if a.len() != doc.dimension + 1 {
                return Err(field(
                    "form_coefficients",
                    format!("expected {} entries, got {}", doc.dimension + 1, a.len()),
                ));
            }
            GeometrySpec::ambient_form(a, level)
                .map_err(|e| field("form_coefficients", e.to_string()))?
        }
        other => {
            if doc.form_coefficients.is_some() {
                return Err(field("form_coefficients", "only allowed for ambient_form"));
            }
            if doc.level.is_some() {
                return Err(field("level", "only allowed for ambient_form"));
            }
            GeometrySpec::for_model(other, doc.dimension)
        }
    };
    let edges = doc.edges.iter().map(|e| (e[0], e[1])).collect();
    let fw =
        Framework::new(geometry, doc.coordinates, doc.vertices, edges).map_err(|e| match e {
            RigidityError::ConventionMismatch { .. } => field("coordinates", e.to_string()),
            other => field("vertices", other.to_string()),
        })?;
    if let Some(kinds) = &doc.member_kinds {
        if kinds.len() != fw.edge_count() {
            return Err(field(
                "member_kinds",
                format!("{} entries for {} edges", kinds.len(), fw.edge_count()),
            ));
        }
    }
    Ok(Framework {
        member_kinds: doc.member_kinds,
        ..fw
    })
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

/// Canonical JSON form: fixed key order, one vertex per line, shortest
/// round-trip floats, trailing newline.
pub fn serialize(fw: &Framework) -> String {
    let mut out = String::from("{\n");
    out += &format!("  \"version\": {FORMAT_VERSION},\n");
    out += &format!("  \"dimension\": {},\n", fw.dimension());
    out += &format!("  \"model\": {},\n", json(fw.model().name()));
    if fw.model() == Model::AmbientForm {
        out += &format!(
            "  \"form_coefficients\": {},\n",
            json(&fw.geometry.form_coefficients)
        );
        out += &format!("  \"level\": {},\n", json(&fw.geometry.level));
    }
    out += &format!("  \"coordinates\": {},\n", json(fw.convention.name()));
    if fw.points.is_empty() {
        out += "  \"vertices\": [],\n";
    } else {
        out += "  \"vertices\": [\n";
        let rows: Vec<String> = fw
            .points
            .iter()
            .map(|p| format!("    {}", json(p)))
            .collect();
        out += &rows.join(",\n");
        out += "\n  ],\n";
    }
    let edges: Vec<[usize; 2]> = fw.graph.edges.iter().map(|&(i, j)| [i, j]).collect();
    out += &format!("  \"edges\": {}", json(&edges));
    if let Some(kinds) = &fw.member_kinds {
        out += &format!(",\n  \"member_kinds\": {}", json(kinds));
    }
    out += "\n}\n";
    out
}
