//! Physical-domain fields and spectral-domain resampling.
//!
//! The inverse transform evaluates the truncated Fourier series
//! `f(x) = sum_m F(2 pi m) exp(+2 pi i m . x)` at the uniform cell centers
//! `x_p = (p + 0.5) / n` of the unit cell. It runs as a phase-twisted
//! unnormalized inverse FFT, which matches direct summation to rounding.
//! Upsampling embeds the modes of a spectrum in a larger zero-filled grid;
//! since the added coefficients are zero, the underlying band-limited
//! function is unchanged.
//!
//! On grids with even axes the rows at `m = -n/2` have no mirror, so even an
//! exact real-signal spectrum produces a small genuine imaginary part. The
//! corruption check therefore measures the imaginary residue of the
//! mirrored-mode subset only: Nyquist rows are subtracted out before the
//! residue is taken, and the reported field is the real part of the full
//! series.

use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::dot;
use crate::mesh::AffineMap;
use crate::rawio;
use crate::transform::{KGrid, ModeLayout, SpectralGrid};

/// Relative threshold on the mirrored-mode imaginary residue.
pub const IMAG_RESIDUE_TOL: f64 = 1e-9;

/// Which pipeline produced a field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "provenance")]
pub enum Provenance {
    /// Inverse transform of an exact spectrum.
    Nuft { degree: usize, solid: bool },
    /// Binary occupancy rasterization.
    Binary,
    /// (Signed) distance field.
    Distance,
}

impl Provenance {
    /// Short name used in fidelity reports.
    pub fn name(&self) -> &'static str {
        match self {
            Provenance::Nuft { .. } => "nuft",
            Provenance::Binary => "binary",
            Provenance::Distance => "distance",
        }
    }
}

/// Real-valued grid over the unit cell, row-major with axis 0 slowest,
/// values sampled at cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    shape: Vec<usize>,
    values: Vec<f64>,
    provenance: Provenance,
    pub affine: Option<AffineMap>,
    /// Mirrored-mode imaginary residue of the inverse transform that made
    /// this field; zero for rasterized fields.
    pub imag_residual: f64,
}

#[derive(Serialize, Deserialize)]
struct FieldHeader {
    kind: String,
    resolution: Vec<usize>,
    spacing: Vec<f64>,
    /// Values are sampled at cell centers `(p + 0.5) * spacing`.
    #[serde(default = "cell_center")]
    sample_points: String,
    #[serde(flatten)]
    provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    affine: Option<AffineMap>,
    imag_residual: f64,
}

fn cell_center() -> String {
    "cell-center".into()
}

impl ScalarField {
    pub fn new(shape: Vec<usize>, values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        let total: usize = shape.iter().product();
        if values.len() != total {
            return Err(Error::Unsupported(format!(
                "{} values for a {shape:?} field",
                values.len()
            )));
        }
        if shape.iter().any(|&n| n < 1) {
            return Err(Error::Unsupported("field axes need at least one cell".into()));
        }
        Ok(ScalarField {
            shape,
            values,
            provenance,
            affine: None,
            imag_residual: 0.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Cell spacing per axis: the unit cell divided by the resolution.
    pub fn spacing(&self, axis: usize) -> f64 {
        1.0 / self.shape[axis] as f64
    }

    #[inline]
    pub fn index(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for (a, &i) in idx.iter().enumerate() {
            flat = flat * self.shape[a] + i;
        }
        flat
    }

    #[inline]
    pub fn value(&self, idx: &[usize]) -> f64 {
        self.values[self.index(idx)]
    }

    /// Coordinates of the center of cell `idx`.
    pub fn cell_center(&self, idx: &[usize], out: &mut [f64]) {
        for (a, &i) in idx.iter().enumerate() {
            out[a] = (i as f64 + 0.5) / self.shape[a] as f64;
        }
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    /// Copy with all values negated (useful for contouring signed-distance
    /// fields, whose inside is negative).
    pub fn negated(&self) -> ScalarField {
        let mut out = self.clone();
        for v in &mut out.values {
            *v = -*v;
        }
        out
    }

    /// Copy scaled so the maximum value is 1 (no-op for all-zero fields).
    pub fn max_normalized(&self) -> ScalarField {
        let m = self.max();
        let mut out = self.clone();
        if m > 0.0 {
            for v in &mut out.values {
                *v /= m;
            }
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let header = FieldHeader {
            kind: "field".into(),
            resolution: self.shape.clone(),
            spacing: (0..self.dim()).map(|a| self.spacing(a)).collect(),
            sample_points: cell_center(),
            provenance: self.provenance,
            affine: self.affine.clone(),
            imag_residual: self.imag_residual,
        };
        rawio::write_payload(path.as_ref(), &header, &self.values)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ScalarField> {
        let path = path.as_ref();
        let (header, values) = rawio::read_payload::<FieldHeader>(path, |h| {
            h.resolution.iter().product::<usize>()
        })?;
        if header.kind != "field" {
            return Err(Error::BadFile {
                path: path.display().to_string(),
                message: format!("expected a field file, found kind {:?}", header.kind),
            });
        }
        let mut field = ScalarField::new(header.resolution, values, header.provenance)?;
        field.affine = header.affine;
        field.imag_residual = header.imag_residual;
        Ok(field)
    }
}

/// Unnormalized inverse DFT along every axis (row-major, axis 0 slowest).
fn ifft_nd(shape: &[usize], data: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    let dim = shape.len();
    let total: usize = shape.iter().product();
    let mut scratch: Vec<Complex64> = Vec::new();
    for axis in 0..dim {
        let n = shape[axis];
        if n == 1 {
            continue;
        }
        let fft = planner.plan_fft_inverse(n);
        let stride: usize = shape[axis + 1..].iter().product();
        let block = stride * n;
        if stride == 1 {
            for chunk in data.chunks_exact_mut(n) {
                fft.process(chunk);
            }
        } else {
            scratch.resize(n, Complex64::ZERO);
            for slab in (0..total).step_by(block) {
                for off in 0..stride {
                    for i in 0..n {
                        scratch[i] = data[slab + off + i * stride];
                    }
                    fft.process(&mut scratch);
                    for i in 0..n {
                        data[slab + off + i * stride] = scratch[i];
                    }
                }
            }
        }
    }
}

/// Lays the spectrum out in natural DFT order with the half-cell phase
/// twist; `filter` selects which modes participate.
fn twisted_coefficients(
    spec: &SpectralGrid,
    natural: &KGrid,
    filter: impl Fn(&[i64]) -> bool,
) -> Vec<Complex64> {
    let grid = spec.grid();
    let dim = grid.dim();
    let mut out = vec![Complex64::ZERO; grid.len()];
    for flat in 0..grid.len() {
        let m = grid.mode(flat);
        if !filter(&m[..dim]) {
            continue;
        }
        // e^{+i pi m / n} per axis: the cell-center offset of x_p = (p+0.5)/n
        let mut twist = Complex64::new(1.0, 0.0);
        for a in 0..dim {
            let arg = std::f64::consts::PI * m[a] as f64 / grid.shape()[a] as f64;
            twist *= Complex64::new(arg.cos(), arg.sin());
        }
        out[natural.index_of(&m[..dim]).expect("same shape")] = spec.values()[flat] * twist;
    }
    out
}

/// Full complex series values at the cell centers, row-major. Exposed for
/// energy checks and diagnostics; [`inverse_transform`] wraps it.
pub fn inverse_series_complex(spec: &SpectralGrid) -> Vec<Complex64> {
    let natural = spec.grid().clone().with_layout(ModeLayout::Natural);
    let mut data = twisted_coefficients(spec, &natural, |_| true);
    ifft_nd(natural.shape(), &mut data);
    data
}

/// Inverse transform: real field at the `n^d` cell centers.
///
/// Fails with [`Error::NonHermitian`] when the mirrored-mode imaginary
/// residue exceeds [`IMAG_RESIDUE_TOL`] relative to the field peak, which
/// signals a corrupted spectrum rather than real signal content.
pub fn inverse_transform(spec: &SpectralGrid) -> Result<ScalarField> {
    let grid = spec.grid();
    let dim = grid.dim();
    let natural = grid.clone().with_layout(ModeLayout::Natural);
    let mut full = twisted_coefficients(spec, &natural, |_| true);
    ifft_nd(natural.shape(), &mut full);

    // The unmirrored Nyquist rows contribute a genuine imaginary part; peel
    // them off so the residue only reflects Hermitian asymmetry.
    let has_nyquist = (0..dim).any(|a| grid.shape()[a] % 2 == 0);
    let is_nyquist = |m: &[i64]| (0..dim).any(|a| grid.shape()[a] % 2 == 0 && m[a] == grid.axis_lo(a));
    let mut residue = 0.0f64;
    if has_nyquist {
        let mut nyq = twisted_coefficients(spec, &natural, |m| is_nyquist(m));
        ifft_nd(natural.shape(), &mut nyq);
        for (f, n) in full.iter().zip(&nyq) {
            residue = residue.max((f.im - n.im).abs());
        }
    } else {
        for f in &full {
            residue = residue.max(f.im.abs());
        }
    }

    let values: Vec<f64> = full.iter().map(|c| c.re).collect();
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let threshold = IMAG_RESIDUE_TOL * peak.max(f64::MIN_POSITIVE);
    if residue > threshold {
        return Err(Error::NonHermitian { residue, threshold });
    }

    let mut field = ScalarField::new(
        natural.shape().to_vec(),
        values,
        Provenance::Nuft {
            degree: spec.meta().degree,
            solid: spec.meta().solid,
        },
    )?;
    field.affine = spec.meta().affine.clone();
    field.imag_residual = residue;
    Ok(field)
}

/// Direct series evaluation at arbitrary points; the oracle for the FFT
/// path and for upsample-coincidence checks. Cost is modes x points.
pub fn eval_series_at(spec: &SpectralGrid, points: &[Vec<f64>]) -> Vec<Complex64> {
    let grid = spec.grid();
    let dim = grid.dim();
    points
        .iter()
        .map(|x| {
            let mut acc = Complex64::ZERO;
            let mut k = [0.0f64; 3];
            for flat in 0..grid.len() {
                let m = grid.mode(flat);
                grid.k_of(&m, &mut k);
                let s = dot(&k[..dim], x);
                acc += spec.values()[flat] * Complex64::new(s.cos(), s.sin());
            }
            acc
        })
        .collect()
}

/// Embeds the spectrum in a larger zero-filled grid (per-axis sizes must
/// not shrink). The represented band-limited function is unchanged.
pub fn upsample(spec: &SpectralGrid, new_shape: &[usize]) -> Result<SpectralGrid> {
    let grid = spec.grid();
    if new_shape.len() != grid.dim() {
        return Err(Error::Unsupported(format!(
            "upsample shape {new_shape:?} does not match grid dimension {}",
            grid.dim()
        )));
    }
    for a in 0..grid.dim() {
        if new_shape[a] < grid.shape()[a] {
            return Err(Error::Unsupported(format!(
                "axis {a}: cannot shrink {} modes to {}; spectral truncation is not supported",
                grid.shape()[a],
                new_shape[a]
            )));
        }
    }
    let new_grid = KGrid::with_shape(new_shape.to_vec())?.with_layout(grid.layout());
    let dim = grid.dim();
    let mut values = vec![Complex64::ZERO; new_grid.len()];
    for flat in 0..grid.len() {
        let m = grid.mode(flat);
        let idx = new_grid
            .index_of(&m[..dim])
            .expect("larger grid contains all modes");
        // A Nyquist row has no mirror in the old grid; when the new grid can
        // hold its mirror, split the coefficient into the Hermitian pair
        // (F/2 at m, conj(F)/2 at -m). This is the real-part projection of
        // the one-sided row: the real field is unchanged at every point and
        // the enlarged spectrum stays Hermitian-pairable.
        let neg = [-m[0], -m[1], -m[2]];
        if grid.mirror_index(flat).is_none() {
            if let Some(mirror) = new_grid.index_of(&neg[..dim]) {
                values[idx] = 0.5 * spec.values()[flat];
                values[mirror] += 0.5 * spec.values()[flat].conj();
                continue;
            }
        }
        values[idx] = spec.values()[flat];
    }
    SpectralGrid::new(new_grid, values, spec.meta().clone())
}

/// Convenience: upsample by an integer factor per axis.
pub fn upsample_by(spec: &SpectralGrid, factor: usize) -> Result<SpectralGrid> {
    let shape: Vec<usize> = spec.grid().shape().iter().map(|&n| n * factor).collect();
    upsample(spec, &shape)
}

/// Raised-cosine (Hann) window over mode magnitude, for visualization only:
/// damps ringing at the cost of exactness.
pub fn raised_cosine_window(spec: &SpectralGrid) -> SpectralGrid {
    let grid = spec.grid();
    let dim = grid.dim();
    let mut values = spec.values().to_vec();
    for (flat, v) in values.iter_mut().enumerate() {
        let m = grid.mode(flat);
        let mut w = 1.0;
        for a in 0..dim {
            let half = (grid.shape()[a] / 2).max(1) as f64;
            let r = (m[a] as f64 / (half + 1.0)).abs().min(1.0);
            w *= 0.5 * (1.0 + (std::f64::consts::PI * r).cos());
        }
        *v *= w;
    }
    SpectralGrid::new(grid.clone(), values, spec.meta().clone()).expect("same shape")
}
