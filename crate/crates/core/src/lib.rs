//! First-order rigidity of bar-and-joint frameworks in Euclidean, spherical,
//! hyperbolic and exterior-hyperbolic space.
//!
//! The crate builds rigidity matrices in ambient (`n + 1` coordinates per
//! vertex) and projective-model (`n` coordinates per vertex) form, computes
//! first-order motions, trivial motions and self-stresses, and provides the
//! maps that carry frameworks and motions between geometries:
//!
//! - [`geometry`]: bilinear forms, distances, gnomic projection and the
//!   velocity maps between the sphere, Euclidean space and `<x,x>_k = c`.
//! - [`framework`]: graphs, configurations, validation and the JSON format.
//! - [`rigidity`]: rigidity matrices, motion and stress spaces, verdicts.
//! - [`transfer`]: the `T_K` blocks relating model matrices, framework and
//!   motion transfer, coning and projective maps.
//! - [`polarity`]: hyperbolic hyperplanes under angle constraints.
//! - [`polytopes`]: canonical rigid polytopes and flexible controls.

pub mod error;
pub mod framework;
pub mod geometry;
pub mod linalg;
pub mod polarity;
pub mod polytopes;
pub mod rigidity;
pub mod transfer;

pub use error::{Result, RigidityError};
pub use framework::{Convention, Framework, Graph, MemberKind};
pub use geometry::{Curvature, GeometrySpec, Model};
pub use rigidity::{MotionSpace, RigidityMatrix, StressSpace, Verdict, VerdictReport};

/// Numerical tolerances shared by a call chain.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerance {
    /// Absolute tolerance for surface membership, tangency and domain checks.
    pub abs: f64,
    /// Relative singular-value cutoff; scaled by `σ_max · max(rows, cols)`.
    pub rank_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-9,
            rank_eps: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }

    pub fn with_rank_eps(mut self, rank_eps: f64) -> Self {
        self.rank_eps = rank_eps;
        self
    }
}
