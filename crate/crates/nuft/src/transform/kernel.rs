//! Closed-form transform kernels.
//!
//! The general kernel evaluates the exact Fourier integral of a constant
//! signal over one j-simplex as a rational combination of the per-vertex
//! phase dots `sigma_t = k . x_t`:
//!
//! ```text
//! F = i^j * gamma * sum_t  exp(-i sigma_t) / prod_{l != t} (sigma_t - sigma_l)
//! ```
//!
//! The degree-specialized forms spell the same result out per degree with
//! denominators taken directly from coordinate differences, giving an
//! algebraically independent cross-check path. The auxiliary-node kernel is
//! the general form applied to the simplex spanned by the origin and one
//! oriented boundary element, with signed distortion, which lets a solid
//! polytope be transformed by one pass over its boundary.
//!
//! All kernels refuse to divide through sigma separations below
//! [`SIGMA_SEPARATION`]; callers jitter the vertices and retry.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geom::{det2, det3, dot, sub};
use crate::mesh::{distortion_factor, signed_distortion};

/// Minimum `|sigma_t - sigma_l|` (and `|sigma_t|` on the auxiliary-node
/// path) accepted before a kernel reports a collision.
pub const SIGMA_SEPARATION: f64 = 1e-9;

/// `i^j` for degrees 0..=3.
#[inline]
pub(crate) fn i_pow(j: usize) -> Complex64 {
    match j % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[inline]
fn unit_phase(sigma: f64) -> Complex64 {
    let (sin, cos) = sigma.sin_cos();
    Complex64::new(cos, -sin)
}

/// Rational phase sum of the general kernel, given per-vertex sigmas and
/// phases. `None` signals a sigma collision below `sep`.
#[inline]
pub(crate) fn rational_sum(sigma: &[f64], phase: &[Complex64], sep: f64) -> Option<Complex64> {
    let arity = sigma.len();
    let mut acc = Complex64::ZERO;
    for t in 0..arity {
        let mut denom = 1.0;
        for l in 0..arity {
            if l == t {
                continue;
            }
            let d = sigma[t] - sigma[l];
            if d.abs() < sep {
                return None;
            }
            denom *= d;
        }
        acc += phase[t] / denom;
    }
    Some(acc)
}

/// Rational sum of the auxiliary-node kernel: the general kernel with one
/// extra vertex pinned at the origin (`sigma = 0`), divided out explicitly.
#[inline]
pub(crate) fn auxnode_rational_sum(sigma: &[f64], phase: &[Complex64], sep: f64) -> Option<Complex64> {
    let j = sigma.len();
    let mut product = 1.0;
    for &s in sigma {
        if s.abs() < sep {
            return None;
        }
        product *= s;
    }
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    let mut acc = Complex64::new(sign / product, 0.0);
    for t in 0..j {
        let mut denom = sigma[t];
        for l in 0..j {
            if l == t {
                continue;
            }
            let d = sigma[t] - sigma[l];
            if d.abs() < sep {
                return None;
            }
            denom *= d;
        }
        acc += phase[t] / denom;
    }
    Some(acc)
}

/// Exact transform of a constant unit signal over one simplex, general form.
///
/// `points` holds the `j + 1` vertices; degree 0 reduces to the pure phase
/// `exp(-i k . x)`. Near-coincident sigma values are reported as a collision
/// rather than divided through.
pub fn simplex_ft(points: &[&[f64]], k: &[f64]) -> Result<Complex64> {
    simplex_ft_with_separation(points, k, SIGMA_SEPARATION)
}

/// [`simplex_ft`] with a custom sigma-separation threshold.
pub fn simplex_ft_with_separation(points: &[&[f64]], k: &[f64], sep: f64) -> Result<Complex64> {
    let arity = points.len();
    if arity == 0 || arity > 4 {
        return Err(Error::Unsupported(format!(
            "simplex transform expects 1..=4 vertices, got {arity}"
        )));
    }
    let j = arity - 1;
    if j == 0 {
        return Ok(unit_phase(dot(k, points[0])));
    }
    let gamma = distortion_factor(points)?;
    let mut sigma = [0.0f64; 4];
    let mut phase = [Complex64::ZERO; 4];
    for (t, p) in points.iter().enumerate() {
        sigma[t] = dot(k, p);
        phase[t] = unit_phase(sigma[t]);
    }
    let acc = rational_sum(&sigma[..arity], &phase[..arity], sep).ok_or_else(|| {
        Error::SigmaCollision {
            element: 0,
            separation: min_separation(&sigma[..arity]),
        }
    })?;
    Ok(i_pow(j) * gamma * acc)
}

fn min_separation(sigma: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for t in 0..sigma.len() {
        for l in t + 1..sigma.len() {
            best = best.min((sigma[t] - sigma[l]).abs());
        }
    }
    best
}

/// Degree-specialized closed forms.
///
/// Written out term by term with denominators computed as dot products of
/// coordinate differences (`k . (x_a - x_b)`), not as differences of cached
/// sigmas, so agreement with [`simplex_ft`] exercises two distinct
/// evaluation routes. Near multi-way sigma collisions this route degrades
/// earlier than the general form: its denominators round independently of
/// the phases, so the residual cancellation error scales with the inverse
/// square of the separation. Jitter of 1e-5 or more keeps resonant
/// evaluations inside ordinary tolerances.
pub fn simplex_ft_specialized(points: &[&[f64]], k: &[f64]) -> Result<Complex64> {
    let arity = points.len();
    if arity == 0 || arity > 4 {
        return Err(Error::Unsupported(format!(
            "simplex transform expects 1..=4 vertices, got {arity}"
        )));
    }
    let w = |a: usize, b: usize| dot(k, &sub(points[a], points[b])[..k.len()]);
    let e = |a: usize| unit_phase(dot(k, points[a]));
    let guard = |d: f64| -> Result<f64> {
        if d.abs() < SIGMA_SEPARATION {
            Err(Error::SigmaCollision {
                element: 0,
                separation: d.abs(),
            })
        } else {
            Ok(d)
        }
    };
    match arity - 1 {
        // point: the discrete Fourier kernel
        0 => Ok(e(0)),
        // segment: i*gamma*(e1/w12 + e2/w21)
        1 => {
            let gamma = distortion_factor(points)?;
            let w12 = guard(w(0, 1))?;
            let value = e(0) / w12 + e(1) / (-w12);
            Ok(Complex64::new(0.0, 1.0) * gamma * value)
        }
        // triangle: -gamma*(e1/(w12 w13) + e2/(w21 w23) + e3/(w31 w32))
        2 => {
            let gamma = distortion_factor(points)?;
            let w12 = guard(w(0, 1))?;
            let w13 = guard(w(0, 2))?;
            let w23 = guard(w(1, 2))?;
            let value = e(0) / (w12 * w13) + e(1) / (-w12 * w23) + e(2) / (w13 * w23);
            Ok(-gamma * value)
        }
        // tetrahedron: -i*gamma*(e1/(w12 w13 w14) + ... + e4/(w41 w42 w43))
        _ => {
            let gamma = distortion_factor(points)?;
            let w12 = guard(w(0, 1))?;
            let w13 = guard(w(0, 2))?;
            let w14 = guard(w(0, 3))?;
            let w23 = guard(w(1, 2))?;
            let w24 = guard(w(1, 3))?;
            let w34 = guard(w(2, 3))?;
            let value = e(0) / (w12 * w13 * w14) + e(1) / (-w12 * w23 * w24)
                + e(2) / (w13 * w23 * w34)
                + e(3) / (-(w14 * w24 * w34));
            Ok(Complex64::new(0.0, -1.0) * gamma * value)
        }
    }
}

/// Transform contribution of one oriented boundary element on the
/// auxiliary-node path: the signed transform of the simplex it spans with
/// the origin. `points` holds the `j` boundary vertices in `R^j`.
pub fn auxnode_element_ft(points: &[&[f64]], k: &[f64]) -> Result<Complex64> {
    let j = points.len();
    if !(2..=3).contains(&j) {
        return Err(Error::Unsupported(format!(
            "auxiliary-node elements span solids of degree 2 or 3, got {j}"
        )));
    }
    let signed = signed_distortion(points)?;
    let mut sigma = [0.0f64; 3];
    let mut phase = [Complex64::ZERO; 3];
    for (t, p) in points.iter().enumerate() {
        sigma[t] = dot(k, p);
        phase[t] = unit_phase(sigma[t]);
    }
    let acc = auxnode_rational_sum(&sigma[..j], &phase[..j], SIGMA_SEPARATION).ok_or_else(|| {
        Error::SigmaCollision {
            element: 0,
            separation: min_separation_with_zero(&sigma[..j]),
        }
    })?;
    Ok(i_pow(j) * signed * acc)
}

fn min_separation_with_zero(sigma: &[f64]) -> f64 {
    sigma
        .iter()
        .map(|s| s.abs())
        .fold(min_separation(sigma), f64::min)
}

/// Per-frequency cache of vertex phase dots and unit phases.
///
/// One frequency's values stay valid until [`SigmaCache::begin_mode`]
/// starts the next; entries fill lazily as elements touch their vertices,
/// so visiting elements in breadth-first order keeps the hot range of the
/// cache small. Cached sigmas are bitwise equal to recomputation because
/// they come from the same dot product over the same inputs.
#[derive(Debug)]
pub struct SigmaCache {
    sigma: Vec<f64>,
    phase: Vec<Complex64>,
    stamp: Vec<u32>,
    epoch: u32,
}

impl SigmaCache {
    pub fn new(vertex_count: usize) -> Self {
        SigmaCache {
            sigma: vec![0.0; vertex_count],
            phase: vec![Complex64::ZERO; vertex_count],
            stamp: vec![0; vertex_count],
            epoch: 0,
        }
    }

    /// Invalidates all entries in O(1); call when moving to a new frequency.
    pub fn begin_mode(&mut self) {
        if self.epoch == u32::MAX {
            self.stamp.fill(0);
            self.epoch = 0;
        }
        self.epoch += 1;
    }

    #[inline]
    pub fn get(&mut self, vertex: usize, coords: &[f64], k: &[f64]) -> (f64, Complex64) {
        if self.stamp[vertex] != self.epoch {
            let s = dot(k, coords);
            self.sigma[vertex] = s;
            self.phase[vertex] = unit_phase(s);
            self.stamp[vertex] = self.epoch;
        }
        (self.sigma[vertex], self.phase[vertex])
    }
}

/// Signed distortion for fixed-arity slices, avoiding the generic dispatch
/// in hot loops.
#[inline]
pub(crate) fn signed_distortion_fast(points: &[&[f64]]) -> f64 {
    match points.len() {
        2 => det2(points[0], points[1]),
        _ => det3(points[0], points[1], points[2]),
    }
}
