use thiserror::Error;

/// Errors raised by geometry, rigidity and transfer operations.
///
/// Vertex and edge indices are 0-based, matching the on-disk format.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RigidityError {
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vertex {vertex} lies on the equator (e·x = {value:e}); gnomic projection undefined")]
    Equator { vertex: usize, value: f64 },

    #[error("vertex {vertex} lies on the absolute (<x,x> = {value:e})")]
    Absolute { vertex: usize, value: f64 },

    #[error("value {value} is outside the domain of {function}")]
    NumericDomain { function: &'static str, value: f64 },

    #[error("point {vertex} is not valid for {model}: {reason}")]
    InvalidPoint {
        vertex: usize,
        model: &'static str,
        reason: String,
    },

    #[error("coordinate convention mismatch: operation needs {expected} coordinates, framework uses {got}")]
    ConventionMismatch {
        expected: &'static str,
        got: &'static str,
    },

    #[error("model {0} has no metric distance")]
    NonMetric(&'static str),

    #[error("edge {edge} ({i},{j}): {source}")]
    Edge {
        edge: usize,
        i: usize,
        j: usize,
        #[source]
        source: Box<RigidityError>,
    },

    #[error("matrix has non-finite entry at ({row},{col})")]
    NonFinite { row: usize, col: usize },

    #[error("vertex {vertex} is sent to infinity by the projective map (w = {value:e})")]
    PointAtInfinity { vertex: usize, value: f64 },

    #[error("projective map is singular")]
    SingularMap,

    #[error("hyperplane {index}: pole is not an exterior point (<p,p>_1 = {value:e})")]
    NotExterior { index: usize, value: f64 },

    #[error("hyperplanes {i} and {j} are ultraparallel (<p,q>_1 = {value})")]
    Ultraparallel { i: usize, j: usize, value: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid framework: {0}")]
    InvalidFramework(String),

    #[error("unknown example {0:?}")]
    UnknownExample(String),
}

impl RigidityError {
    /// True for the geometric domain failures the CLI reports with exit status 1
    /// (absolute, equator, numeric-domain and similar), as opposed to input errors.
    pub fn is_domain_error(&self) -> bool {
        match self {
            RigidityError::Edge { source, .. } => source.is_domain_error(),
            RigidityError::Equator { .. }
            | RigidityError::Absolute { .. }
            | RigidityError::NumericDomain { .. }
            | RigidityError::PointAtInfinity { .. }
            | RigidityError::NotExterior { .. }
            | RigidityError::Ultraparallel { .. }
            | RigidityError::InvalidPoint { .. }
            | RigidityError::NonMetric(_) => true,
            _ => false,
        }
    }

    pub(crate) fn on_edge(self, edge: usize, i: usize, j: usize) -> Self {
        RigidityError::Edge {
            edge,
            i,
            j,
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = RigidityError> = std::result::Result<T, E>;
