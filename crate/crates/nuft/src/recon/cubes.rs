//! Marching cubes by face-consistent loop tracing.
//!
//! Instead of a fixed triangle table, each cube face runs the shared
//! marching-squares case table in a frame whose `u x v` is the outward face
//! normal. The directed face segments then chain head-to-tail into closed
//! loops on the cube boundary, which are fan-triangulated. Because a face's
//! segments (including the asymptotic-decider resolution of ambiguous
//! faces) depend only on that face's four values, the two cubes sharing a
//! face always agree on the crossing geometry and induce opposite edge
//! directions: the output surface is watertight and consistently oriented,
//! with the high-value side enclosed. Interior ambiguities fall out
//! naturally as multiple loops in one cube.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::mesh::{BoundaryMesh, SimplexMesh};
use crate::recon::squares::{crossing_t, square_segments, B, L, R, T};
use crate::spectral::ScalarField;

/// Cube-edge key: lattice node plus axis (the edge runs to the next node
/// along that axis).
type EdgeKey = (usize, usize, usize, u8);

/// The six faces: lattice offset of the face origin node, u axis, v axis.
/// `u x v` points out of the cube.
const FACES: [([usize; 3], u8, u8); 6] = [
    ([0, 0, 0], 2, 1), // x = lo
    ([1, 0, 0], 1, 2), // x = hi
    ([0, 0, 0], 0, 2), // y = lo
    ([0, 1, 0], 2, 0), // y = hi
    ([0, 0, 0], 1, 0), // z = lo
    ([0, 0, 1], 0, 1), // z = hi
];

fn offset(node: [usize; 3], axis: u8, by: usize) -> [usize; 3] {
    let mut out = node;
    out[axis as usize] += by;
    out
}

pub(crate) fn marching_cubes(field: &ScalarField, iso: f64) -> Result<BoundaryMesh> {
    let shape = [field.shape()[0], field.shape()[1], field.shape()[2]];
    let value = |n: [usize; 3]| field.value(&n);
    let node_pos = |n: [usize; 3]| -> [f64; 3] {
        [
            (n[0] as f64 + 0.5) / shape[0] as f64,
            (n[1] as f64 + 0.5) / shape[1] as f64,
            (n[2] as f64 + 0.5) / shape[2] as f64,
        ]
    };

    let mut vertices: Vec<f64> = Vec::new();
    let mut vertex_ids: HashMap<EdgeKey, u32> = HashMap::new();
    let mut elements: Vec<u32> = Vec::new();

    let mut vertex_on_edge = |key: EdgeKey| -> u32 {
        *vertex_ids.entry(key).or_insert_with(|| {
            let (i, j, k, axis) = key;
            let a = [i, j, k];
            let b = offset(a, axis, 1);
            let t = crossing_t(value(a), value(b), iso);
            let pa = node_pos(a);
            let pb = node_pos(b);
            let id = (vertices.len() / 3) as u32;
            for c in 0..3 {
                vertices.push(pa[c] + t * (pb[c] - pa[c]));
            }
            id
        })
    };

    // per-cube segment list: (from edge, to edge)
    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::with_capacity(12);
    for i in 0..shape[0] - 1 {
        for j in 0..shape[1] - 1 {
            for k in 0..shape[2] - 1 {
                segments.clear();
                for &(face_off, u, v) in &FACES {
                    let o = [i + face_off[0], j + face_off[1], k + face_off[2]];
                    let vals = [
                        value(o),
                        value(offset(o, u, 1)),
                        value(offset(offset(o, u, 1), v, 1)),
                        value(offset(o, v, 1)),
                    ];
                    let (segs, count) = square_segments(vals, iso);
                    for &(from, to) in &segs[..count] {
                        let key = |e: u8| -> EdgeKey {
                            match e {
                                B => (o[0], o[1], o[2], u),
                                R => {
                                    let n = offset(o, u, 1);
                                    (n[0], n[1], n[2], v)
                                }
                                T => {
                                    let n = offset(o, v, 1);
                                    (n[0], n[1], n[2], u)
                                }
                                L => (o[0], o[1], o[2], v),
                                _ => unreachable!(),
                            }
                        };
                        segments.push((key(from), key(to)));
                    }
                }
                if segments.is_empty() {
                    continue;
                }
                chain_loops(&segments, &mut elements, &mut vertex_on_edge)?;
            }
        }
    }
    let n = elements.len() / 3;
    let mesh = SimplexMesh::new_unchecked(3, 2, vertices, elements, vec![1.0; n]);
    Ok(BoundaryMesh::new_unchecked(mesh))
}

/// Chains directed segments head-to-tail into closed loops and fans each
/// loop into triangles.
fn chain_loops(
    segments: &[(EdgeKey, EdgeKey)],
    elements: &mut Vec<u32>,
    vertex_on_edge: &mut impl FnMut(EdgeKey) -> u32,
) -> Result<()> {
    let m = segments.len();
    let mut used = vec![false; m];
    for start in 0..m {
        if used[start] {
            continue;
        }
        let mut loop_edges: Vec<EdgeKey> = Vec::with_capacity(m);
        let mut cursor = start;
        loop {
            used[cursor] = true;
            loop_edges.push(segments[cursor].0);
            let next_key = segments[cursor].1;
            if next_key == segments[start].0 {
                break;
            }
            match (0..m).find(|&s| !used[s] && segments[s].0 == next_key) {
                Some(next) => cursor = next,
                None => {
                    return Err(Error::InvalidMesh(
                        "isosurface reaches the sample-lattice border; normalize the shape with a margin"
                            .into(),
                    ))
                }
            }
        }
        if loop_edges.len() < 3 {
            continue;
        }
        // face tracing runs loops clockwise around the high-value patch seen
        // from outside; reverse the fan so normals point outward
        let ids: Vec<u32> = loop_edges.iter().map(|&k| vertex_on_edge(k)).collect();
        for w in 1..ids.len() - 1 {
            elements.push(ids[0]);
            elements.push(ids[w + 1]);
            elements.push(ids[w]);
        }
    }
    Ok(())
}
