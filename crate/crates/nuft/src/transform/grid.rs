//! The discrete frequency lattice.
//!
//! Modes are integer vectors `m` with per-axis range `-(n/2) ..= n-1-(n/2)`
//! (the zero-centered range: `-n/2 ..= n/2-1` for even `n`, symmetric for
//! odd `n`), and angular frequencies `k = 2*pi*m` on the unit-period cell.
//! The grid is closed under negation except for the unmirrored rows at
//! `m = -n/2` when `n` is even. Two storage orders exist: `Natural` is the
//! DFT order (`0, 1, .., -1`), `Centered` is ascending mode order; files
//! always hold natural order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeLayout {
    Natural,
    Centered,
}

/// Frequency-grid specification: per-axis mode counts plus storage order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KGrid {
    shape: Vec<usize>,
    layout: ModeLayout,
}

impl KGrid {
    /// `n` modes per axis in `dim` dimensions, natural storage order.
    pub fn cubic(dim: usize, n: usize) -> KGrid {
        KGrid {
            shape: vec![n; dim],
            layout: ModeLayout::Natural,
        }
    }

    pub fn with_shape(shape: Vec<usize>) -> Result<KGrid> {
        if shape.is_empty() || shape.len() > 3 {
            return Err(Error::Unsupported(format!(
                "grid needs 1..=3 axes, got {}",
                shape.len()
            )));
        }
        if shape.iter().any(|&n| n == 0) {
            return Err(Error::Unsupported("grid axes need at least one mode".into()));
        }
        Ok(KGrid {
            shape,
            layout: ModeLayout::Natural,
        })
    }

    pub fn with_layout(mut self, layout: ModeLayout) -> KGrid {
        self.layout = layout;
        self
    }

    pub fn layout(&self) -> ModeLayout {
        self.layout
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Smallest mode on an axis: `-(n / 2)`.
    #[inline]
    pub fn axis_lo(&self, axis: usize) -> i64 {
        -((self.shape[axis] / 2) as i64)
    }

    /// Largest mode on an axis.
    #[inline]
    pub fn axis_hi(&self, axis: usize) -> i64 {
        self.axis_lo(axis) + self.shape[axis] as i64 - 1
    }

    #[inline]
    fn mode_of_axis_index(&self, axis: usize, q: usize) -> i64 {
        let n = self.shape[axis];
        match self.layout {
            ModeLayout::Natural => {
                if q as i64 <= self.axis_hi(axis) {
                    q as i64
                } else {
                    q as i64 - n as i64
                }
            }
            ModeLayout::Centered => self.axis_lo(axis) + q as i64,
        }
    }

    #[inline]
    fn axis_index_of_mode(&self, axis: usize, m: i64) -> Option<usize> {
        if m < self.axis_lo(axis) || m > self.axis_hi(axis) {
            return None;
        }
        let n = self.shape[axis] as i64;
        Some(match self.layout {
            ModeLayout::Natural => {
                if m >= 0 {
                    m as usize
                } else {
                    (m + n) as usize
                }
            }
            ModeLayout::Centered => (m - self.axis_lo(axis)) as usize,
        })
    }

    /// Integer mode vector of a flat storage index (row-major, axis 0 slowest).
    #[inline]
    pub fn mode(&self, flat: usize) -> [i64; 3] {
        let mut out = [0i64; 3];
        let mut rest = flat;
        for axis in (0..self.dim()).rev() {
            let n = self.shape[axis];
            out[axis] = self.mode_of_axis_index(axis, rest % n);
            rest /= n;
        }
        out
    }

    /// Flat storage index of a mode vector, if it lies on the grid.
    pub fn index_of(&self, mode: &[i64]) -> Option<usize> {
        let mut flat = 0;
        for axis in 0..self.dim() {
            flat = flat * self.shape[axis] + self.axis_index_of_mode(axis, mode[axis])?;
        }
        Some(flat)
    }

    /// Index of the negated mode, `None` when a component sits on an
    /// unmirrored Nyquist row.
    pub fn mirror_index(&self, flat: usize) -> Option<usize> {
        let m = self.mode(flat);
        let neg = [-m[0], -m[1], -m[2]];
        self.index_of(&neg[..self.dim()])
    }

    pub fn dc_index(&self) -> usize {
        self.index_of(&[0, 0, 0][..self.dim()]).expect("DC mode always present")
    }

    /// Angular frequency of a mode on the unit-period cell.
    #[inline]
    pub fn k_of(&self, mode: &[i64; 3], out: &mut [f64; 3]) {
        for axis in 0..self.dim() {
            out[axis] = 2.0 * std::f64::consts::PI * mode[axis] as f64;
        }
    }

    /// Flat index in this grid of the value stored at `flat` in `other`,
    /// for grids of equal shape but possibly different layout.
    pub fn reindex_from(&self, other: &KGrid, flat: usize) -> usize {
        let m = other.mode(flat);
        self.index_of(&m[..self.dim()]).expect("same shape")
    }
}
