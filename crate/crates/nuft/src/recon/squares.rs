//! Marching squares with the asymptotic-decider ambiguity rule.
//!
//! The 16-case table emits directed segments with the inside region (values
//! above the iso level) on the left, so loops around solids run
//! counter-clockwise. The same table drives the cube faces of the 3D
//! extractor, where consistency of the decider on shared faces is what
//! keeps the surface watertight.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::mesh::{BoundaryMesh, SimplexMesh};
use crate::spectral::ScalarField;

/// Square edges in frame order: bottom, right, top, left.
pub(crate) const B: u8 = 0;
pub(crate) const R: u8 = 1;
pub(crate) const T: u8 = 2;
pub(crate) const L: u8 = 3;

/// Directed contour segments for one square. Corner values are given in
/// frame order `(0,0), (1,0), (1,1), (0,1)`; a segment `(from, to)` leaves
/// edge `from` and enters edge `to` with the inside on its left.
pub(crate) fn square_segments(v: [f64; 4], iso: f64) -> ([(u8, u8); 2], usize) {
    let mask = (usize::from(v[0] > iso))
        | (usize::from(v[1] > iso) << 1)
        | (usize::from(v[2] > iso) << 2)
        | (usize::from(v[3] > iso) << 3);
    let one = |a, b| ([(a, b), (0, 0)], 1);
    match mask {
        0b0000 | 0b1111 => ([(0, 0); 2], 0),
        0b0001 => one(B, L),
        0b0010 => one(R, B),
        0b0011 => one(R, L),
        0b0100 => one(T, R),
        0b0110 => one(T, B),
        0b0111 => one(T, L),
        0b1000 => one(L, T),
        0b1001 => one(B, T),
        0b1011 => one(R, T),
        0b1100 => one(L, R),
        0b1101 => one(B, R),
        0b1110 => one(L, B),
        0b0101 => {
            if saddle_inside(&v, iso) {
                ([(B, R), (T, L)], 2)
            } else {
                ([(B, L), (T, R)], 2)
            }
        }
        _ => {
            // 0b1010
            if saddle_inside(&v, iso) {
                ([(L, B), (R, T)], 2)
            } else {
                ([(R, B), (L, T)], 2)
            }
        }
    }
}

/// Asymptotic decider: is the bilinear saddle point above the iso level?
/// A degenerate bilinear patch (no saddle) keeps the corners separated.
fn saddle_inside(v: &[f64; 4], iso: f64) -> bool {
    let denom = v[0] + v[2] - v[1] - v[3];
    if denom == 0.0 {
        return false;
    }
    (v[0] * v[2] - v[1] * v[3]) / denom > iso
}

/// Interpolation parameter of the crossing on an edge from value `v0` to
/// `v1`, clamped away from the endpoints so welded vertices never collapse
/// onto lattice nodes.
#[inline]
pub(crate) fn crossing_t(v0: f64, v1: f64, iso: f64) -> f64 {
    ((iso - v0) / (v1 - v0)).clamp(1e-9, 1.0 - 1e-9)
}

/// Extracts the iso contour of a 2D field as counter-clockwise loops of
/// directed segments. The contour must not touch the border of the sample
/// lattice (keep shapes inside a margin).
pub(crate) fn marching_squares(field: &ScalarField, iso: f64) -> Result<BoundaryMesh> {
    let nx = field.shape()[0];
    let ny = field.shape()[1];
    let node = |i: usize, j: usize| -> [f64; 2] {
        [
            (i as f64 + 0.5) / nx as f64,
            (j as f64 + 0.5) / ny as f64,
        ]
    };

    let mut vertices: Vec<f64> = Vec::new();
    let mut vertex_ids: HashMap<(usize, usize, u8), u32> = HashMap::new();
    let mut elements: Vec<u32> = Vec::new();

    // edge key: (i, j, axis): axis 0 runs +x from node (i,j), axis 1 runs +y
    let mut vertex_on_edge = |i: usize, j: usize, axis: u8, field: &ScalarField| -> u32 {
        *vertex_ids.entry((i, j, axis)).or_insert_with(|| {
            let (v0, v1, p0, p1) = if axis == 0 {
                (
                    field.value(&[i, j]),
                    field.value(&[i + 1, j]),
                    node(i, j),
                    node(i + 1, j),
                )
            } else {
                (
                    field.value(&[i, j]),
                    field.value(&[i, j + 1]),
                    node(i, j),
                    node(i, j + 1),
                )
            };
            let t = crossing_t(v0, v1, iso);
            let id = (vertices.len() / 2) as u32;
            vertices.push(p0[0] + t * (p1[0] - p0[0]));
            vertices.push(p0[1] + t * (p1[1] - p0[1]));
            id
        })
    };

    for i in 0..nx - 1 {
        for j in 0..ny - 1 {
            let v = [
                field.value(&[i, j]),
                field.value(&[i + 1, j]),
                field.value(&[i + 1, j + 1]),
                field.value(&[i, j + 1]),
            ];
            let (segs, count) = square_segments(v, iso);
            for &(from, to) in &segs[..count] {
                // map frame edges to lattice edge keys
                let key = |e: u8| match e {
                    B => (i, j, 0u8),
                    R => (i + 1, j, 1u8),
                    T => (i, j + 1, 0u8),
                    _ => (i, j, 1u8),
                };
                let (fi, fj, fa) = key(from);
                let (ti, tj, ta) = key(to);
                let a = vertex_on_edge(fi, fj, fa, field);
                let b = vertex_on_edge(ti, tj, ta, field);
                elements.push(a);
                elements.push(b);
            }
        }
    }

    // closed loops need every vertex to be one segment's head and
    // another's tail; anything else means the contour hit the border
    let vcount = vertices.len() / 2;
    let mut out_deg = vec![0u32; vcount];
    let mut in_deg = vec![0u32; vcount];
    for seg in elements.chunks(2) {
        out_deg[seg[0] as usize] += 1;
        in_deg[seg[1] as usize] += 1;
    }
    if out_deg.iter().any(|&d| d != 1) || in_deg.iter().any(|&d| d != 1) {
        return Err(Error::InvalidMesh(
            "contour reaches the sample-lattice border; normalize the shape with a margin".into(),
        ));
    }

    let n = elements.len() / 2;
    let mesh = SimplexMesh::new_unchecked(2, 1, vertices, elements, vec![1.0; n]);
    Ok(BoundaryMesh::new_unchecked(mesh))
}
