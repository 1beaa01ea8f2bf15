//! Complex spectra on a frequency grid, with provenance metadata and the
//! sidecar + raw-binary file format.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::AffineMap;
use crate::rawio;
use crate::transform::grid::{KGrid, ModeLayout};
use crate::transform::jitter::DcPolicy;

/// Where a spectrum came from and how it was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMeta {
    /// Signal degree: the element degree for mesh transforms, the solid
    /// dimension for auxiliary-node transforms.
    pub degree: usize,
    /// True when the spectrum describes a solid via its boundary.
    pub solid: bool,
    pub element_count: usize,
    pub jitter_eps: f64,
    /// Jitter seed actually used (the configured seed, or its retry
    /// increment if a re-jitter was needed).
    pub seed: u64,
    pub dc_policy: DcPolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affine: Option<AffineMap>,
}

/// One complex value per grid mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    grid: KGrid,
    values: Vec<Complex64>,
    meta: SpectrumMeta,
}

#[derive(Serialize, Deserialize)]
struct SpectrumHeader {
    kind: String,
    resolution: Vec<usize>,
    layout: ModeLayout,
    #[serde(flatten)]
    meta: SpectrumMeta,
}

impl SpectralGrid {
    pub fn new(grid: KGrid, values: Vec<Complex64>, meta: SpectrumMeta) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Unsupported(format!(
                "{} values for a grid of {} modes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Unsupported(format!(
                "non-finite spectrum value at flat index {bad}"
            )));
        }
        Ok(SpectralGrid { grid, values, meta })
    }

    pub fn grid(&self) -> &KGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn meta(&self) -> &SpectrumMeta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut SpectrumMeta {
        &mut self.meta
    }

    /// The zero-frequency coefficient.
    pub fn dc(&self) -> Complex64 {
        self.values[self.grid.dc_index()]
    }

    pub fn value_at_mode(&self, mode: &[i64]) -> Option<Complex64> {
        self.grid.index_of(mode).map(|i| self.values[i])
    }

    /// Largest Hermitian-symmetry violation over mirrored mode pairs:
    /// `max |F(-k) - conj(F(k))| / (1 + |F(k)|)`. Unmirrored Nyquist rows
    /// are skipped, so a clean real-signal spectrum scores at rounding level.
    pub fn hermitian_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for flat in 0..self.values.len() {
            if let Some(neg) = self.grid.mirror_index(flat) {
                let f = self.values[flat];
                let g = self.values[neg];
                let r = (g - f.conj()).norm() / (1.0 + f.norm());
                worst = worst.max(r);
            }
        }
        worst
    }

    /// Same spectrum re-ordered into the requested storage layout.
    pub fn to_layout(&self, layout: ModeLayout) -> SpectralGrid {
        if self.grid.layout() == layout {
            return self.clone();
        }
        let new_grid = self.grid.clone().with_layout(layout);
        let mut values = vec![Complex64::ZERO; self.values.len()];
        for flat in 0..self.values.len() {
            values[new_grid.reindex_from(&self.grid, flat)] = self.values[flat];
        }
        SpectralGrid {
            grid: new_grid,
            values,
            meta: self.meta.clone(),
        }
    }

    /// Writes `<path>` (raw little-endian interleaved re/im in row-major
    /// natural mode order) plus the `<path>.json` sidecar header.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let natural = self.to_layout(ModeLayout::Natural);
        let header = SpectrumHeader {
            kind: "spectrum".into(),
            resolution: natural.grid.shape().to_vec(),
            layout: ModeLayout::Natural,
            meta: natural.meta.clone(),
        };
        let mut flat = Vec::with_capacity(natural.values.len() * 2);
        for v in &natural.values {
            flat.push(v.re);
            flat.push(v.im);
        }
        rawio::write_payload(path.as_ref(), &header, &flat)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SpectralGrid> {
        let path = path.as_ref();
        let (header, flat) = rawio::read_payload::<SpectrumHeader>(path, |h| {
            2 * h.resolution.iter().product::<usize>()
        })?;
        if header.kind != "spectrum" {
            return Err(Error::BadFile {
                path: path.display().to_string(),
                message: format!("expected a spectrum file, found kind {:?}", header.kind),
            });
        }
        let grid = KGrid::with_shape(header.resolution)?.with_layout(header.layout);
        let values = flat
            .chunks_exact(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        SpectralGrid::new(grid, values, header.meta)
    }
}
