//! Comparison representations: binary occupancy grids and distance fields.
//!
//! Binary rasterization marks a cell when any element intersects it
//! (exact point/segment/triangle versus cell-box tests, any-hit union) or,
//! for watertight boundaries, when the cell center lies inside the enclosed
//! solid. Distance fields store the exact Euclidean distance from each cell
//! center to the nearest element, negated inside when signed.

mod pgm;
mod primitives;

pub use pgm::load_pgm;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{BoundaryMesh, SimplexMesh};
use crate::query::{MeshQuery, QueryScratch};
use crate::spectral::{Provenance, ScalarField};

fn cell_bounds(shape: &[usize], idx: &[usize; 3], dim: usize) -> ([f64; 3], [f64; 3]) {
    let mut lo = [0.0; 3];
    let mut hi = [0.0; 3];
    for a in 0..dim {
        lo[a] = idx[a] as f64 / shape[a] as f64;
        hi[a] = (idx[a] + 1) as f64 / shape[a] as f64;
    }
    (lo, hi)
}

/// Occupancy of surface-like meshes: 1.0 in every cell some element
/// touches, 0.0 elsewhere. The mesh should be normalized to the unit cell;
/// geometry outside it is clipped.
pub fn rasterize_binary(mesh: &SimplexMesh, resolution: usize) -> Result<ScalarField> {
    if resolution < 2 {
        return Err(Error::Unsupported("resolution must be at least 2".into()));
    }
    let dim = mesh.dim();
    let shape = vec![resolution; dim];
    let mut values = vec![0.0f64; shape.iter().product()];
    let n_f = resolution as f64;
    for n in 0..mesh.element_count() {
        let pts = mesh.element_points(n);
        // candidate cell range from the element bounding box
        let mut lo_idx = [0usize; 3];
        let mut hi_idx = [0usize; 3];
        for a in 0..dim {
            let lo = pts.iter().map(|p| p[a]).fold(f64::INFINITY, f64::min);
            let hi = pts.iter().map(|p| p[a]).fold(f64::NEG_INFINITY, f64::max);
            if hi < 0.0 || lo > 1.0 {
                lo_idx[a] = 1;
                hi_idx[a] = 0; // empty range: element outside the cell
            } else {
                lo_idx[a] = (lo * n_f).floor().max(0.0) as usize;
                hi_idx[a] = ((hi * n_f).floor() as usize).min(resolution - 1);
            }
        }
        if (0..dim).any(|a| lo_idx[a] > hi_idx[a]) {
            continue;
        }
        let mut idx = lo_idx;
        'cells: loop {
            let (clo, chi) = cell_bounds(&shape, &idx, dim);
            if primitives::element_intersects_box(&pts, &clo[..dim], &chi[..dim]) {
                let mut flat = 0;
                for a in 0..dim {
                    flat = flat * resolution + idx[a];
                }
                values[flat] = 1.0;
            }
            let mut axis = dim;
            loop {
                if axis == 0 {
                    break 'cells;
                }
                axis -= 1;
                if idx[axis] < hi_idx[axis] {
                    idx[axis] += 1;
                    for reset in axis + 1..dim {
                        idx[reset] = lo_idx[reset];
                    }
                    break;
                }
                idx[axis] = lo_idx[axis];
            }
        }
    }
    ScalarField::new(shape, values, Provenance::Binary)
}

/// Occupancy of the solid enclosed by a watertight boundary: 1.0 where the
/// cell center passes the parity inside test.
pub fn rasterize_binary_solid(
    boundary: &BoundaryMesh,
    resolution: usize,
    seed: u64,
) -> Result<ScalarField> {
    if resolution < 2 {
        return Err(Error::Unsupported("resolution must be at least 2".into()));
    }
    let dim = boundary.mesh().dim();
    let query = MeshQuery::for_boundary(boundary, seed);
    let shape = vec![resolution; dim];
    let values = centers_map(&shape, |p, scratch| {
        if query.is_inside(p, scratch) {
            1.0
        } else {
            0.0
        }
    });
    ScalarField::new(shape, values, Provenance::Binary)
}

/// Unsigned distance field: Euclidean distance from each cell center to the
/// nearest element of any degree.
pub fn rasterize_distance(mesh: &SimplexMesh, resolution: usize, seed: u64) -> Result<ScalarField> {
    if resolution < 2 {
        return Err(Error::Unsupported("resolution must be at least 2".into()));
    }
    let dim = mesh.dim();
    let query = MeshQuery::new(mesh, seed);
    let shape = vec![resolution; dim];
    let values = centers_map(&shape, |p, scratch| query.distance(p, scratch));
    ScalarField::new(shape, values, Provenance::Distance)
}

/// Signed distance field: negative inside the enclosed solid.
pub fn rasterize_distance_signed(
    boundary: &BoundaryMesh,
    resolution: usize,
    seed: u64,
) -> Result<ScalarField> {
    if resolution < 2 {
        return Err(Error::Unsupported("resolution must be at least 2".into()));
    }
    let dim = boundary.mesh().dim();
    let query = MeshQuery::for_boundary(boundary, seed);
    let shape = vec![resolution; dim];
    let values = centers_map(&shape, |p, scratch| query.signed_distance(p, scratch));
    ScalarField::new(shape, values, Provenance::Distance)
}

/// Applies `f` to every cell center in parallel, row-major output.
fn centers_map(shape: &[usize], f: impl Fn(&[f64], &mut QueryScratch) -> f64 + Sync) -> Vec<f64> {
    let dim = shape.len();
    let total: usize = shape.iter().product();
    (0..total)
        .into_par_iter()
        .map_init(QueryScratch::new, |scratch, flat| {
            let mut idx = [0usize; 3];
            let mut rest = flat;
            for a in (0..dim).rev() {
                idx[a] = rest % shape[a];
                rest /= shape[a];
            }
            let mut p = [0.0f64; 3];
            for a in 0..dim {
                p[a] = (idx[a] as f64 + 0.5) / shape[a] as f64;
            }
            f(&p[..dim], scratch)
        })
        .collect()
}

/// Separable multilinear upsampling by an integer factor, sampling the fine
/// cell centers with edge clamping.
pub fn nlinear_upsample(field: &ScalarField, factor: usize) -> Result<ScalarField> {
    if factor == 0 {
        return Err(Error::Unsupported("upsample factor must be positive".into()));
    }
    if factor == 1 {
        return Ok(field.clone());
    }
    let dim = field.dim();
    let out_shape: Vec<usize> = field.shape().iter().map(|&n| n * factor).collect();
    let total = out_shape.iter().product();
    let mut values = vec![0.0f64; total];
    let mut idx = vec![0usize; dim];
    for (flat, value) in values.iter_mut().enumerate() {
        let mut rest = flat;
        for a in (0..dim).rev() {
            idx[a] = rest % out_shape[a];
            rest /= out_shape[a];
        }
        // per-axis lower sample index and interpolation weight
        let mut base = [0usize; 3];
        let mut w = [0.0f64; 3];
        for a in 0..dim {
            let n = field.shape()[a];
            let x = (idx[a] as f64 + 0.5) / out_shape[a] as f64;
            let u = (x * n as f64 - 0.5).clamp(0.0, (n - 1) as f64);
            let i0 = (u.floor() as usize).min(n.saturating_sub(2));
            base[a] = i0;
            w[a] = u - i0 as f64;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << dim) {
            let mut weight = 1.0;
            let mut cidx = [0usize; 3];
            for a in 0..dim {
                if corner >> a & 1 == 1 {
                    weight *= w[a];
                    cidx[a] = base[a] + 1;
                } else {
                    weight *= 1.0 - w[a];
                    cidx[a] = base[a];
                }
            }
            if weight != 0.0 {
                acc += weight * field.value(&cidx[..dim]);
            }
        }
        *value = acc;
    }
    let mut out = ScalarField::new(out_shape, values, field.provenance())?;
    out.affine = field.affine.clone();
    Ok(out)
}

/// Raster-image polygonization: multilinear upsampling followed by a
/// marching-squares contour, yielding counter-clockwise loops. An empty
/// contour (field entirely on one side of `iso`) yields an empty mesh.
pub fn polygonize_raster(
    image: &ScalarField,
    upsample_factor: usize,
    iso: f64,
) -> Result<BoundaryMesh> {
    if image.dim() != 2 {
        return Err(Error::Unsupported("polygonization expects a 2D field".into()));
    }
    let fine = nlinear_upsample(image, upsample_factor)?;
    crate::recon::extract_contour(&fine, iso)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn point_occupies_exactly_one_cell() {
        let mesh = SimplexMesh::with_unit_densities(2, 0, vec![0.5 + 1e-9, 0.5 + 1e-9], vec![0])
            .unwrap();
        let field = rasterize_binary(&mesh, 16).unwrap();
        let ones = field.values().iter().filter(|&&v| v == 1.0).count();
        assert_eq!(ones, 1);
        assert!(field.values().iter().all(|&v| v == 0.0 || v == 1.0));
    }

    #[test]
    fn solid_square_has_aligned_block() {
        let square = shapes::square_loop(0.25, 0.75);
        let field = rasterize_binary_solid(&square, 16, 0).unwrap();
        let ones = field.values().iter().filter(|&&v| v == 1.0).count();
        assert_eq!(ones, 64); // 8 x 8 interior cells
    }

    #[test]
    fn triangle_cells_match_dense_sampling() {
        // brute-force oracle: sample the triangle densely and mark the cells
        // the samples land in; the rasterizer must mark a superset that adds
        // nothing beyond boundary-touching cells
        let tri = SimplexMesh::with_unit_densities(
            2,
            2,
            vec![0.21, 0.17, 0.83, 0.34, 0.42, 0.86],
            vec![0, 1, 2],
        )
        .unwrap();
        let res = 16usize;
        let field = rasterize_binary(&tri, res).unwrap();
        let mut expected = vec![false; res * res];
        let steps = 600;
        for i in 0..=steps {
            for j in 0..=(steps - i) {
                let u = i as f64 / steps as f64;
                let v = j as f64 / steps as f64;
                let w = 1.0 - u - v;
                let x = u * 0.21 + v * 0.83 + w * 0.42;
                let y = u * 0.17 + v * 0.34 + w * 0.86;
                let cx = ((x * res as f64) as usize).min(res - 1);
                let cy = ((y * res as f64) as usize).min(res - 1);
                expected[cx * res + cy] = true;
            }
        }
        for flat in 0..res * res {
            if expected[flat] {
                assert_eq!(field.values()[flat], 1.0, "cell {flat} covered but unmarked");
            }
        }
        let marked = field.values().iter().filter(|&&v| v == 1.0).count();
        let expect_count = expected.iter().filter(|&&b| b).count();
        assert!(
            marked <= expect_count + 2 * res,
            "marked {marked} vs covered {expect_count}"
        );
    }

    #[test]
    fn distance_to_point_is_euclidean() {
        let mesh =
            SimplexMesh::with_unit_densities(2, 0, vec![0.5, 0.5], vec![0]).unwrap();
        let field = rasterize_distance(&mesh, 8, 0).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let x = (i as f64 + 0.5) / 8.0;
                let y = (j as f64 + 0.5) / 8.0;
                let want = ((x - 0.5).powi(2) + (y - 0.5).powi(2)).sqrt();
                assert!((field.value(&[i, j]) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn signed_square_center_value() {
        let square = shapes::square_loop(0.25, 0.75);
        let field = rasterize_distance_signed(&square, 16, 0).unwrap();
        // center cell at (0.5 - h/2, 0.5 - h/2) h=1/16: nearest wall 0.21875
        let center = field.value(&[8, 8]);
        let expect = -(0.75 - (8.5 / 16.0));
        assert!((center - expect).abs() < 1e-12, "{center} vs {expect}");
        // cell center exactly on the surface reads zero
        let mesh = shapes::square_loop(0.25, 0.5 + 1.0 / 32.0);
        let field = rasterize_distance_signed(&mesh, 16, 0).unwrap();
        assert_eq!(field.value(&[8, 8]), 0.0);
    }

    #[test]
    fn eikonal_bound_on_signed_field() {
        let blob = shapes::blob_surface(1);
        let (mesh, _) = crate::mesh::normalize_to_unit_cell(blob.mesh(), 0.2).unwrap();
        let b = BoundaryMesh::new_unchecked(mesh);
        let field = rasterize_distance_signed(&b, 12, 1).unwrap();
        let h = field.spacing(0);
        for i in 0..12 {
            for j in 0..12 {
                for k in 0..11 {
                    let a = field.value(&[i, j, k]);
                    let b = field.value(&[i, j, k + 1]);
                    assert!((a - b).abs() <= h * 3f64.sqrt() + 1e-12);
                }
            }
        }
    }

    #[test]
    fn occupied_volume_converges_for_solids() {
        // cell-center inside tests: occupied volume approaches the true
        // volume within 2 * surface * spacing
        let square = shapes::square_loop(0.25, 0.75);
        for res in [16usize, 32, 64] {
            let field = rasterize_binary_solid(&square, res, 0).unwrap();
            let occupied = field.values().iter().sum::<f64>() / (res * res) as f64;
            let bound = 2.0 * 2.0 / res as f64; // perimeter 2.0
            assert!(
                (occupied - 0.25).abs() <= bound,
                "res {res}: occupied {occupied}"
            );
        }
        let cube = shapes::cube_boundary(0.25, 0.75);
        for res in [8usize, 16] {
            let field = rasterize_binary_solid(&cube, res, 0).unwrap();
            let occupied = field.values().iter().sum::<f64>() / (res * res * res) as f64;
            let bound = 2.0 * 1.5 / res as f64; // surface 6 * 0.25
            assert!(
                (occupied - 0.125).abs() <= bound,
                "res {res}: occupied {occupied}"
            );
        }
    }

    #[test]
    fn upsample_is_exact_on_linear_ramps() {
        // multilinear interpolation reproduces an affine field exactly away
        // from the clamped border
        let mut vals = vec![0.0; 36];
        for i in 0..6 {
            for j in 0..6 {
                let x = (i as f64 + 0.5) / 6.0;
                let y = (j as f64 + 0.5) / 6.0;
                vals[i * 6 + j] = 2.0 * x - 0.5 * y + 0.25;
            }
        }
        let field = ScalarField::new(vec![6, 6], vals, Provenance::Binary).unwrap();
        let fine = nlinear_upsample(&field, 3).unwrap();
        for i in 3..15 {
            for j in 3..15 {
                let x = (i as f64 + 0.5) / 18.0;
                let y = (j as f64 + 0.5) / 18.0;
                let want = 2.0 * x - 0.5 * y + 0.25;
                assert!((fine.value(&[i, j]) - want).abs() < 1e-12);
            }
        }
    }
}
