//! Simplex content and distortion factors.
//!
//! Content is the j-dimensional measure of a j-simplex (1 for points, length
//! for segments, area for triangles, volume for tetrahedra), computed from
//! the bordered squared-distance determinant. The distortion factor is the
//! ratio of a simplex's content to the unit orthogonal simplex's `1/j!`.

use crate::error::{Error, Result};
use crate::geom::{det2, det3, det_small, dist_sq};

/// Radicand values in `[-RADICAND_TOL, 0)` clamp to zero; anything lower is
/// reported as inconsistent input.
pub const RADICAND_TOL: f64 = 1e-12;

/// Content and distortion of a single simplex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexMeasure {
    /// j-dimensional measure, always non-negative.
    pub content: f64,
    /// `j! * content`, the ratio to the unit orthogonal simplex.
    pub distortion: f64,
    /// Signed distortion of the auxiliary simplex spanned with the origin;
    /// only set on the auxiliary-node path.
    pub signed_distortion: Option<f64>,
}

impl SimplexMeasure {
    pub fn of(points: &[&[f64]]) -> Result<Self> {
        let content = content(points)?;
        let degree = points.len() - 1;
        Ok(SimplexMeasure {
            content,
            distortion: factorial(degree) * content,
            signed_distortion: None,
        })
    }
}

pub(crate) fn factorial(j: usize) -> f64 {
    match j {
        0 | 1 => 1.0,
        2 => 2.0,
        3 => 6.0,
        _ => (1..=j).map(|v| v as f64).product(),
    }
}

/// Content of the simplex spanned by `points` (`j + 1` coordinate slices of
/// equal dimension). A lone point returns 1 by the unit-mass convention.
///
/// Uses the bordered squared-distance determinant, so the result is
/// invariant under vertex permutations and rigid motions by construction.
pub fn content(points: &[&[f64]]) -> Result<f64> {
    if points.is_empty() || points.len() > 4 {
        return Err(Error::InvalidMesh(format!(
            "content expects 1..=4 vertices, got {}",
            points.len()
        )));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::InvalidMesh("mixed vertex dimensions".into()));
    }
    if points.iter().any(|p| p.iter().any(|v| !v.is_finite())) {
        return Err(Error::InvalidMesh("non-finite vertex coordinate".into()));
    }
    let j = points.len() - 1;
    if dim < j {
        return Err(Error::InvalidMesh(format!(
            "a {j}-simplex cannot be embedded in {dim} dimensions"
        )));
    }
    if j == 0 {
        return Ok(1.0);
    }

    // Bordered matrix: zero diagonal, unit first row/column, squared
    // distances elsewhere. Size (j + 2) x (j + 2).
    let size = j + 2;
    let mut m = [[0.0f64; 6]; 6];
    for r in 1..size {
        m[0][r] = 1.0;
        m[r][0] = 1.0;
    }
    for r in 1..size {
        for c in r + 1..size {
            let d2 = dist_sq(points[r - 1], points[c - 1]);
            m[r][c] = d2;
            m[c][r] = d2;
        }
    }
    let det = det_small(&mut m, size);
    let sign = if (j + 1) % 2 == 0 { 1.0 } else { -1.0 };
    let fact = factorial(j);
    let radicand = sign / (2f64.powi(j as i32) * fact * fact) * det;
    if radicand < 0.0 {
        if radicand < -RADICAND_TOL {
            return Err(Error::NegativeRadicand { radicand });
        }
        return Ok(0.0);
    }
    Ok(radicand.sqrt())
}

/// `j! * content`: the content distortion factor relative to the unit
/// orthogonal simplex.
pub fn distortion_factor(points: &[&[f64]]) -> Result<f64> {
    let c = content(points)?;
    Ok(factorial(points.len() - 1) * c)
}

/// Signed distortion of the auxiliary simplex formed by the origin and the
/// given `j` points in `R^j`: the determinant of the matrix whose columns
/// are the points. Swapping two points flips the sign.
pub fn signed_distortion(points: &[&[f64]]) -> Result<f64> {
    let j = points.len();
    if j == 0 || j > 3 {
        return Err(Error::InvalidMesh(format!(
            "signed distortion expects 1..=3 vertices, got {j}"
        )));
    }
    if points.iter().any(|p| p.len() != j) {
        return Err(Error::InvalidMesh(format!(
            "signed distortion requires ambient dimension {j} for {j} vertices"
        )));
    }
    Ok(match j {
        1 => points[0][0],
        2 => det2(points[0], points[1]),
        _ => det3(points[0], points[1], points[2]),
    })
}
