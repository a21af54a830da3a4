//! Bilinear forms, distances, and the point and velocity maps between the
//! sphere, Euclidean space and the surfaces `<x,x>_k = c`.
//!
//! Ambient points live in `R^{n+1}` and the distinguished vector
//! `e = (0, …, 0, 1)` picks out the homogenizing coordinate. Model points
//! live in `R^n` and are identified with the ambient point `(p, 1)`.
//!
//! Everything here is a pure function of slices. Points are never
//! normalized implicitly; callers go through [`normalize_to_surface`].

use serde::{Deserialize, Serialize};

use crate::error::{Result, RigidityError};
use crate::Tolerance;

/// Which space a framework lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Euclidean,
    SphereAmbient,
    ProjSphere,
    ProjHyperbolic,
    ProjExteriorHyperbolic,
    AmbientForm,
}

impl Model {
    pub const ALL: [Model; 6] = [
        Model::Euclidean,
        Model::SphereAmbient,
        Model::ProjSphere,
        Model::ProjHyperbolic,
        Model::ProjExteriorHyperbolic,
        Model::AmbientForm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::Euclidean => "euclidean",
            Model::SphereAmbient => "sphere_ambient",
            Model::ProjSphere => "proj_sphere",
            Model::ProjHyperbolic => "proj_hyperbolic",
            Model::ProjExteriorHyperbolic => "proj_exterior_hyperbolic",
            Model::AmbientForm => "ambient_form",
        }
    }

    pub fn from_name(name: &str) -> Option<Model> {
        Model::ALL.into_iter().find(|m| m.name() == name)
    }

    /// Projective models use `n` coordinates per vertex.
    pub fn is_projective(self) -> bool {
        matches!(
            self,
            Model::ProjSphere | Model::ProjHyperbolic | Model::ProjExteriorHyperbolic
        )
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Sign `K` of the curvature of a projective model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Curvature {
    Positive,
    Negative,
}

impl Curvature {
    pub fn sign(self) -> f64 {
        match self {
            Curvature::Positive => 1.0,
            Curvature::Negative => -1.0,
        }
    }

    pub fn from_sign(k: i32) -> Option<Curvature> {
        match k {
            1 => Some(Curvature::Positive),
            -1 => Some(Curvature::Negative),
            _ => None,
        }
    }
}

/// A metric space together with the diagonal form `a_1 x_1 y_1 + … + a_{n+1} x_{n+1} y_{n+1}`
/// that defines its first-order constraints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometrySpec {
    pub model: Model,
    pub dimension: usize,
    pub form_coefficients: Vec<f64>,
    pub level: f64,
}

fn signature(n: usize, k: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| if i + k > n { -1.0 } else { 1.0 })
        .collect()
}

impl GeometrySpec {
    pub fn euclidean(n: usize) -> Self {
        let mut a = vec![1.0; n + 1];
        a[n] = 0.0;
        GeometrySpec {
            model: Model::Euclidean,
            dimension: n,
            form_coefficients: a,
            level: 1.0,
        }
    }

    pub fn sphere(n: usize) -> Self {
        GeometrySpec {
            model: Model::SphereAmbient,
            dimension: n,
            form_coefficients: vec![1.0; n + 1],
            level: 1.0,
        }
    }

    pub fn proj_sphere(n: usize) -> Self {
        GeometrySpec {
            model: Model::ProjSphere,
            dimension: n,
            form_coefficients: vec![1.0; n + 1],
            level: 1.0,
        }
    }

    pub fn proj_hyperbolic(n: usize) -> Self {
        GeometrySpec {
            model: Model::ProjHyperbolic,
            dimension: n,
            form_coefficients: signature(n, 1),
            level: -1.0,
        }
    }

    pub fn proj_exterior_hyperbolic(n: usize) -> Self {
        GeometrySpec {
            model: Model::ProjExteriorHyperbolic,
            dimension: n,
            form_coefficients: signature(n, 1),
            level: 1.0,
        }
    }

    /// The surface `<x,x>_k = c` for the signature form with `k` trailing minus signs.
    pub fn signature_surface(n: usize, k: usize, level: f64) -> Result<Self> {
        if k > n + 1 {
            return Err(RigidityError::Unsupported(format!(
                "signature index k = {k} exceeds n + 1 = {}",
                n + 1
            )));
        }
        GeometrySpec::ambient_form(signature(n, k), level)
    }

    /// The hyperboloid model of `H^n` (`k = 1`, `c = -1`).
    pub fn hyperboloid(n: usize) -> Self {
        GeometrySpec::signature_surface(n, 1, -1.0).expect("valid signature")
    }

    /// Exterior hyperbolic space `D^n` on the one-sheeted hyperboloid (`k = 1`, `c = 1`).
    pub fn de_sitter(n: usize) -> Self {
        GeometrySpec::signature_surface(n, 1, 1.0).expect("valid signature")
    }

    pub fn ambient_form(a: Vec<f64>, level: f64) -> Result<Self> {
        if a.is_empty() {
            return Err(RigidityError::Unsupported(
                "form needs at least two coefficients".into(),
            ));
        }
        if let Some(i) = a.iter().position(|&ai| ai == 0.0 || !ai.is_finite()) {
            return Err(RigidityError::Unsupported(format!(
                "form coefficient a_{} must be finite and nonzero",
                i + 1
            )));
        }
        if level == 0.0 || !level.is_finite() {
            return Err(RigidityError::Unsupported(
                "surface level c must be finite and nonzero".into(),
            ));
        }
        Ok(GeometrySpec {
            model: Model::AmbientForm,
            dimension: a.len() - 1,
            form_coefficients: a,
            level,
        })
    }

    /// Default spec for a model in dimension `n`. `AmbientForm` defaults to the hyperboloid.
    pub fn for_model(model: Model, n: usize) -> Self {
        match model {
            Model::Euclidean => GeometrySpec::euclidean(n),
            Model::SphereAmbient => GeometrySpec::sphere(n),
            Model::ProjSphere => GeometrySpec::proj_sphere(n),
            Model::ProjHyperbolic => GeometrySpec::proj_hyperbolic(n),
            Model::ProjExteriorHyperbolic => GeometrySpec::proj_exterior_hyperbolic(n),
            Model::AmbientForm => GeometrySpec::hyperboloid(n),
        }
    }

    pub fn ambient_len(&self) -> usize {
        self.dimension + 1
    }

    /// `K` for the projective models; `None` for Euclidean and ambient models.
    pub fn curvature(&self) -> Option<Curvature> {
        match self.model {
            Model::ProjSphere => Some(Curvature::Positive),
            Model::ProjHyperbolic | Model::ProjExteriorHyperbolic => Some(Curvature::Negative),
            _ => None,
        }
    }

    /// Number of trailing negative coefficients, when the form is a signature form.
    pub fn signature_index(&self) -> Option<usize> {
        let a = &self.form_coefficients;
        if self.model == Model::Euclidean {
            return None;
        }
        if a.iter().any(|&x| x != 1.0 && x != -1.0) {
            return None;
        }
        let k = a.iter().filter(|&&x| x == -1.0).count();
        a[a.len() - k..].iter().all(|&x| x == -1.0).then_some(k)
    }

    /// Whether the form has no zero coefficient (everything except Euclidean).
    pub fn is_nondegenerate(&self) -> bool {
        self.form_coefficients.iter().all(|&a| a != 0.0)
    }

    /// Whether [`distance`] returns a metric distance rather than a form invariant.
    pub fn is_metric(&self) -> bool {
        match self.model {
            Model::ProjExteriorHyperbolic => false,
            Model::AmbientForm => self.ambient_distance_kind().is_some(),
            _ => true,
        }
    }

    fn ambient_distance_kind(&self) -> Option<AmbientDistance> {
        let a = &self.form_coefficients;
        if self.level > 0.0 && a.iter().all(|&x| x > 0.0) {
            Some(AmbientDistance::Spherical)
        } else if self.level < 0.0 && self.signature_index() == Some(1) {
            Some(AmbientDistance::Hyperbolic)
        } else {
            None
        }
    }
}

enum AmbientDistance {
    Spherical,
    Hyperbolic,
}

/// Euclidean dot product.
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub(crate) fn check_len(x: &[f64], expected: usize) -> Result<()> {
    if x.len() != expected {
        return Err(RigidityError::DimensionMismatch {
            expected,
            got: x.len(),
        });
    }
    Ok(())
}

/// `Σ a_i x_i y_i` for explicit coefficients.
pub fn form(a: &[f64], x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(x, a.len())?;
    check_len(y, a.len())?;
    Ok(a.iter().zip(x).zip(y).map(|((a, x), y)| a * x * y).sum())
}

/// The geometry's bilinear form on ambient coordinates.
pub fn bilinear_form(spec: &GeometrySpec, x: &[f64], y: &[f64]) -> Result<f64> {
    form(&spec.form_coefficients, x, y)
}

/// The signature form `<x,y>_k`: the last `k` products enter with a minus sign.
pub fn signature_form(k: usize, x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(y, x.len())?;
    Ok(dot(x, &involution_j(k, y)?))
}

fn clamp_unit(value: f64, function: &'static str, tol: f64) -> Result<f64> {
    if !value.is_finite() || value.abs() > 1.0 + tol {
        return Err(RigidityError::NumericDomain { function, value });
    }
    Ok(value.clamp(-1.0, 1.0))
}

fn acos_checked(value: f64, tol: f64) -> Result<f64> {
    Ok(clamp_unit(value, "arccos", tol)?.acos())
}

fn acosh_checked(value: f64, tol: f64) -> Result<f64> {
    if !value.is_finite() || value < 1.0 - tol {
        return Err(RigidityError::NumericDomain {
            function: "arccosh",
            value,
        });
    }
    Ok(value.max(1.0).acosh())
}

/// Distance between two points of the geometry.
///
/// For `proj_exterior_hyperbolic` (and ambient forms without a metric) the
/// result is the form invariant `<x̂,ŷ>` of the normalized points instead;
/// see [`GeometrySpec::is_metric`]. Its arccos, when defined, is
/// [`exterior_angle`].
pub fn distance(spec: &GeometrySpec, x: &[f64], y: &[f64], tol: &Tolerance) -> Result<f64> {
    let n = spec.dimension;
    match spec.model {
        Model::Euclidean => {
            if x.len() != n && x.len() != n + 1 {
                return Err(RigidityError::DimensionMismatch {
                    expected: n,
                    got: x.len(),
                });
            }
            check_len(y, x.len())?;
            Ok(x.iter()
                .zip(y)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt())
        }
        Model::SphereAmbient => {
            check_len(x, n + 1)?;
            check_len(y, n + 1)?;
            acos_checked(dot(x, y), tol.abs)
        }
        Model::ProjSphere => {
            check_len(x, n)?;
            check_len(y, n)?;
            let c = (1.0 + dot(x, y)) / ((1.0 + dot(x, x)).sqrt() * (1.0 + dot(y, y)).sqrt());
            acos_checked(c, tol.abs)
        }
        Model::ProjHyperbolic => {
            check_len(x, n)?;
            check_len(y, n)?;
            for (vertex, p) in [x, y].into_iter().enumerate() {
                let w = 1.0 - dot(p, p);
                if w <= tol.abs {
                    return Err(RigidityError::Absolute { vertex, value: w });
                }
            }
            let c = (1.0 - dot(x, y)) / ((1.0 - dot(x, x)).sqrt() * (1.0 - dot(y, y)).sqrt());
            acosh_checked(c, tol.abs)
        }
        Model::ProjExteriorHyperbolic => {
            check_len(x, n)?;
            check_len(y, n)?;
            for (vertex, p) in [x, y].into_iter().enumerate() {
                let w = dot(p, p) - 1.0;
                if w <= tol.abs {
                    return Err(RigidityError::Absolute { vertex, value: w });
                }
            }
            Ok((dot(x, y) - 1.0) / ((dot(x, x) - 1.0).sqrt() * (dot(y, y) - 1.0).sqrt()))
        }
        Model::AmbientForm => {
            let xx = bilinear_form(spec, x, x)?;
            let yy = bilinear_form(spec, y, y)?;
            for (vertex, w) in [xx, yy].into_iter().enumerate() {
                if w.abs() <= tol.abs {
                    return Err(RigidityError::Absolute { vertex, value: w });
                }
            }
            let c = bilinear_form(spec, x, y)? / (xx.abs().sqrt() * yy.abs().sqrt());
            match spec.ambient_distance_kind() {
                Some(AmbientDistance::Spherical) => acos_checked(c, tol.abs),
                Some(AmbientDistance::Hyperbolic) => acosh_checked(-c, tol.abs),
                None => Ok(c),
            }
        }
    }
}

/// Angle `arccos(<x̂,ŷ>_1)` between two exterior-hyperbolic model points,
/// i.e. the dihedral angle of their polar hyperplanes.
pub fn exterior_angle(x: &[f64], y: &[f64], tol: &Tolerance) -> Result<f64> {
    let spec = GeometrySpec::proj_exterior_hyperbolic(x.len());
    acos_checked(distance(&spec, x, y, tol)?, tol.abs)
}

/// Central (gnomic) projection `x ↦ x / (e·x)` onto the plane `x_{n+1} = 1`.
pub fn gnomic_project(x: &[f64], tol: &Tolerance) -> Result<Vec<f64>> {
    let w = *x.last().ok_or(RigidityError::DimensionMismatch {
        expected: 2,
        got: 0,
    })?;
    if w <= tol.abs {
        return Err(RigidityError::Equator {
            vertex: 0,
            value: w,
        });
    }
    let mut q: Vec<f64> = x.iter().map(|xi| xi / w).collect();
    *q.last_mut().unwrap() = 1.0;
    Ok(q)
}

/// Representative of the ray through `x` on the geometry's surface.
///
/// Sphere targets (and Euclidean ones, which are reached through the sphere)
/// use `x / |x|`; form surfaces use `x / sqrt(|<x,x>|)` and require the sign
/// of `<x,x>` to match the level `c`.
pub fn normalize_to_surface(spec: &GeometrySpec, x: &[f64], tol: &Tolerance) -> Result<Vec<f64>> {
    check_len(x, spec.ambient_len())?;
    let last = x[spec.dimension];
    if last <= tol.abs {
        return Err(RigidityError::Equator {
            vertex: 0,
            value: last,
        });
    }
    let scale = match spec.model {
        Model::Euclidean | Model::SphereAmbient | Model::ProjSphere => dot(x, x).sqrt(),
        _ => {
            let q = bilinear_form(spec, x, x)?;
            if q.abs() <= tol.abs {
                return Err(RigidityError::Absolute {
                    vertex: 0,
                    value: q,
                });
            }
            if q.signum() != spec.level.signum() {
                return Err(RigidityError::InvalidPoint {
                    vertex: 0,
                    model: spec.model.name(),
                    reason: format!("<x,x> = {q} has the wrong sign for level {}", spec.level),
                });
            }
            (q / spec.level).sqrt()
        }
    };
    Ok(x.iter().map(|xi| xi / scale).collect())
}

/// `J_k`: negate the last `k` coordinates.
pub fn involution_j(k: usize, x: &[f64]) -> Result<Vec<f64>> {
    if k > x.len() {
        return Err(RigidityError::Unsupported(format!(
            "J_k with k = {k} on a vector of length {}",
            x.len()
        )));
    }
    let split = x.len() - k;
    Ok(x.iter()
        .enumerate()
        .map(|(i, &xi)| if i >= split { -xi } else { xi })
        .collect())
}

/// Velocity map from the upper hemisphere to Euclidean space:
/// `u ↦ (u − (u·e) e) / (e·p)`.
pub fn motion_sphere_to_euclid(p: &[f64], u: &[f64], tol: &Tolerance) -> Result<Vec<f64>> {
    check_len(u, p.len())?;
    let w = *p.last().ok_or(RigidityError::DimensionMismatch {
        expected: 2,
        got: 0,
    })?;
    if w <= tol.abs {
        return Err(RigidityError::Equator {
            vertex: 0,
            value: w,
        });
    }
    let mut out: Vec<f64> = u.iter().map(|ui| ui / w).collect();
    *out.last_mut().unwrap() = 0.0;
    Ok(out)
}

/// Inverse velocity map at a Euclidean point `q` (with `e·q = 1`):
/// `v ↦ (v − (v·q) e) / sqrt(q·q)`.
pub fn motion_euclid_to_sphere(q: &[f64], v: &[f64], tol: &Tolerance) -> Result<Vec<f64>> {
    check_len(v, q.len())?;
    let ev = *v.last().ok_or(RigidityError::DimensionMismatch {
        expected: 2,
        got: 0,
    })?;
    if ev.abs() > tol.abs {
        return Err(RigidityError::InvalidPoint {
            vertex: 0,
            model: "euclidean",
            reason: format!("velocity has e-component {ev:e}; expected 0"),
        });
    }
    let vq = dot(v, q);
    let norm = dot(q, q).sqrt();
    let mut out = v.to_vec();
    *out.last_mut().unwrap() -= vq;
    Ok(out.into_iter().map(|x| x / norm).collect())
}

/// Velocity map from `X^n_{c,k}` to the sphere: `u ↦ J_k(u) / sqrt(p·p)`.
pub fn motion_x_to_sphere(p: &[f64], u: &[f64], k: usize) -> Result<Vec<f64>> {
    check_len(u, p.len())?;
    let norm = dot(p, p).sqrt();
    Ok(involution_j(k, u)?.into_iter().map(|x| x / norm).collect())
}

/// The general diagonal-form version of [`motion_x_to_sphere`]: `u ↦ D u / sqrt(p·p)`.
pub(crate) fn motion_form_to_sphere(a: &[f64], p: &[f64], u: &[f64]) -> Result<Vec<f64>> {
    check_len(u, p.len())?;
    check_len(p, a.len())?;
    let norm = dot(p, p).sqrt();
    Ok(a.iter().zip(u).map(|(a, u)| a * u / norm).collect())
}

/// Inverse of [`motion_form_to_sphere`] at the surface point `p`.
pub(crate) fn motion_sphere_to_form(a: &[f64], p: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    check_len(w, p.len())?;
    check_len(p, a.len())?;
    let norm = dot(p, p).sqrt();
    Ok(a.iter().zip(w).map(|(a, w)| w * norm / a).collect())
}

/// Differential of the central projection `x ↦ x / (e·x)` at `x`, applied to `u`.
/// Returns the `n` model coordinates of the projected velocity.
pub fn project_velocity(x: &[f64], u: &[f64], tol: &Tolerance) -> Result<Vec<f64>> {
    check_len(u, x.len())?;
    let n = x.len() - 1;
    let w = x[n];
    if w.abs() <= tol.abs {
        return Err(RigidityError::Equator {
            vertex: 0,
            value: w,
        });
    }
    let eu = u[n];
    Ok((0..n).map(|i| (u[i] - eu * x[i] / w) / w).collect())
}

/// `(p, 1)`: the ambient lift of a model point.
pub fn homogenize(p: &[f64]) -> Vec<f64> {
    let mut x = p.to_vec();
    x.push(1.0);
    x
}
