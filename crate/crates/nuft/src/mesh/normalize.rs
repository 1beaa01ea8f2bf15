//! Fitting meshes into the unit cell.
//!
//! The frequency grid assumes a unit-period cell, so meshes are isotropically
//! scaled and translated to sit inside `[margin, 1 - margin]^d` before being
//! transformed. The affine map is returned so results can be mapped back.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::SimplexMesh;

/// Isotropic scale followed by a translation: `x -> scale * x + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub scale: f64,
    pub offset: Vec<f64>,
}

impl AffineMap {
    pub fn identity(dim: usize) -> Self {
        AffineMap {
            scale: 1.0,
            offset: vec![0.0; dim],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.scale == 1.0 && self.offset.iter().all(|&v| v == 0.0)
    }

    pub fn apply(&self, p: &mut [f64]) {
        for (a, v) in p.iter_mut().enumerate() {
            *v = self.scale * *v + self.offset[a];
        }
    }

    /// The map sending normalized coordinates back to the original frame.
    pub fn inverse(&self) -> AffineMap {
        let inv = 1.0 / self.scale;
        AffineMap {
            scale: inv,
            offset: self.offset.iter().map(|&o| -o * inv).collect(),
        }
    }

    pub fn apply_mesh(&self, mesh: &SimplexMesh) -> SimplexMesh {
        let mut out = mesh.clone();
        self.apply_mesh_in_place(&mut out);
        out
    }

    pub(crate) fn apply_mesh_in_place(&self, mesh: &mut SimplexMesh) {
        let dim = mesh.dim();
        let mut vertices = std::mem::take(&mut mesh.vertices);
        for v in vertices.chunks_mut(dim) {
            self.apply(v);
        }
        mesh.vertices = vertices;
    }
}

/// Scales and centers `mesh` so its bounding box fits inside
/// `[margin, 1 - margin]^d`. Returns the normalized mesh together with the
/// affine map that was applied.
///
/// A mesh with zero extent in every axis (e.g. a single point) cannot be
/// scaled meaningfully; it is centered at the cell midpoint with unit scale.
pub fn normalize_to_unit_cell(mesh: &SimplexMesh, margin: f64) -> Result<(SimplexMesh, AffineMap)> {
    if !(0.0..0.5).contains(&margin) {
        return Err(Error::Unsupported(format!(
            "margin {margin} outside [0, 0.5)"
        )));
    }
    if mesh.vertex_count() == 0 {
        return Err(Error::InvalidMesh("cannot normalize an empty mesh".into()));
    }
    let bbox = mesh.bbox();
    let extent = bbox.max_extent();
    let scale = if extent == 0.0 {
        1.0
    } else {
        (1.0 - 2.0 * margin) / extent
    };
    let dim = mesh.dim();
    let offset = (0..dim)
        .map(|a| 0.5 - scale * bbox.center(a))
        .collect::<Vec<_>>();
    let map = AffineMap { scale, offset };
    Ok((map.apply_mesh(mesh), map))
}
