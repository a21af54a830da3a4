//! SVD-based numeric rank, kernel bases and principal angles.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Result, RigidityError};
use crate::Tolerance;

/// Outcome of a thresholded rank computation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankInfo {
    pub rank: usize,
    /// All singular values, descending.
    pub singular_values: Vec<f64>,
    pub threshold: f64,
    /// Smallest singular value counted toward the rank.
    pub smallest_kept: Option<f64>,
    /// Largest singular value treated as zero.
    pub largest_dropped: Option<f64>,
}

impl RankInfo {
    /// Ratio between the last kept and the first dropped singular value.
    /// Large values mean the rank decision was clear-cut.
    pub fn gap(&self) -> Option<f64> {
        match (self.smallest_kept, self.largest_dropped) {
            (Some(k), Some(d)) if d > 0.0 => Some(k / d),
            (Some(_), Some(_)) => Some(f64::INFINITY),
            _ => None,
        }
    }
}

fn check_finite(m: &DMatrix<f64>) -> Result<()> {
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            if !m[(r, c)].is_finite() {
                return Err(RigidityError::NonFinite { row: r, col: c });
            }
        }
    }
    Ok(())
}

/// Singular values sorted descending, plus the right singular vectors as the
/// columns of a full `cols × cols` matrix in the same order.
fn full_svd(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    // Zero rows leave the kernel unchanged and make V square.
    let padded;
    let a = if rows < cols {
        padded = m.clone().resize_vertically(cols, 0.0);
        &padded
    } else {
        m
    };
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let v = DMatrix::from_fn(cols, cols, |r, c| v_t[(order[c], r)]);
    (sv, v)
}

fn rank_from_singular_values(sv: &[f64], rows: usize, cols: usize, tol: &Tolerance) -> RankInfo {
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let threshold = sigma_max * rows.max(cols) as f64 * tol.rank_eps;
    let rank = if sigma_max == 0.0 {
        0
    } else {
        sv.iter().filter(|&&s| s > threshold).count()
    };
    let reported: Vec<f64> = sv.iter().take(rows.min(cols)).copied().collect();
    RankInfo {
        rank,
        smallest_kept: rank.checked_sub(1).map(|i| reported[i]),
        largest_dropped: reported.get(rank).copied(),
        singular_values: reported,
        threshold,
    }
}

/// Rank as the count of singular values above `σ_max · max(rows, cols) · rank_eps`.
pub fn numeric_rank(m: &DMatrix<f64>, tol: &Tolerance) -> Result<RankInfo> {
    check_finite(m)?;
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(rank_from_singular_values(&[], rows, cols, tol));
    }
    let sv = m.singular_values();
    let mut sv: Vec<f64> = sv.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(rank_from_singular_values(&sv, rows, cols, tol))
}

/// Orthonormal basis of the right kernel, one basis vector per column.
pub fn kernel_basis(m: &DMatrix<f64>, tol: &Tolerance) -> Result<(DMatrix<f64>, RankInfo)> {
    check_finite(m)?;
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok((
            DMatrix::identity(cols, cols),
            rank_from_singular_values(&[], rows, cols, tol),
        ));
    }
    let (sv, v) = full_svd(m);
    let info = rank_from_singular_values(&sv, rows, cols, tol);
    let basis = v.columns(info.rank, cols - info.rank).into_owned();
    Ok((basis, info))
}

/// Orthonormal basis of the left kernel (`ωᵀ M = 0`), one vector per column.
pub fn left_kernel_basis(m: &DMatrix<f64>, tol: &Tolerance) -> Result<(DMatrix<f64>, RankInfo)> {
    let (basis, info) = kernel_basis(&m.transpose(), tol)?;
    Ok((basis, info))
}

/// Orthonormal basis of the column span, with the span's dimension decided by
/// the same rank policy.
pub fn column_span(m: &DMatrix<f64>, tol: &Tolerance) -> Result<(DMatrix<f64>, RankInfo)> {
    check_finite(m)?;
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok((
            DMatrix::zeros(rows, 0),
            rank_from_singular_values(&[], rows, cols, tol),
        ));
    }
    // Left singular vectors of M are right singular vectors of Mᵀ.
    let (sv, u) = full_svd(&m.transpose());
    let info = rank_from_singular_values(&sv, rows, cols, tol);
    Ok((u.columns(0, info.rank).into_owned(), info))
}

/// Sine of the largest principal angle between two subspaces given by
/// orthonormal column bases. Returns `None` when the dimensions differ.
pub fn max_principal_angle_sin(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<f64> {
    if a.ncols() != b.ncols() || a.nrows() != b.nrows() {
        return None;
    }
    if a.ncols() == 0 {
        return Some(0.0);
    }
    // ‖(I − A Aᵀ) B‖₂ = sin θ_max for equal-dimensional subspaces.
    let residual = b - a * (a.transpose() * b);
    let s = residual.singular_values().max();
    Some(s.min(1.0))
}

/// Largest principal angle in radians, `None` on dimension mismatch.
pub fn max_principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<f64> {
    max_principal_angle_sin(a, b).map(f64::asin)
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}
