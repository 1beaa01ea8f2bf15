//! Spatial queries against simplex meshes: parity-based inside tests for
//! watertight boundaries and exact point-to-element distances, both
//! accelerated by a uniform grid over element bounding boxes.
//!
//! Parity rays leave along +x with a fixed seeded direction jitter; a query
//! that grazes a vertex or edge is retried with the next derived direction,
//! so results are deterministic for a fixed seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geom::{dist_sq, mix_seed, Aabb};
use crate::mesh::{BoundaryMesh, SimplexMesh};

const MAX_RAY_ATTEMPTS: usize = 32;
const BARY_EPS: f64 = 1e-9;

/// Per-worker scratch for element deduplication during traversal.
#[derive(Debug, Default)]
pub struct QueryScratch {
    stamps: Vec<u64>,
    epoch: u64,
}

impl QueryScratch {
    pub fn new() -> Self {
        Self::default()
    }

    fn begin(&mut self, elements: usize) -> u64 {
        if self.stamps.len() < elements {
            self.stamps.resize(elements, 0);
        }
        self.epoch += 1;
        self.epoch
    }
}

/// Grid-accelerated query structure over one mesh.
#[derive(Debug)]
pub struct MeshQuery {
    dim: usize,
    degree: usize,
    vertices: Vec<f64>,
    elements: Vec<u32>,
    bbox: Aabb,
    grid_res: [usize; 3],
    cell_size: [f64; 3],
    buckets: Vec<Vec<u32>>,
    ray_dirs: Vec<[f64; 3]>,
}

impl MeshQuery {
    /// Builds the index. `seed` fixes the parity-ray jitter.
    pub fn new(mesh: &SimplexMesh, seed: u64) -> Self {
        let dim = mesh.dim();
        let ne = mesh.element_count();
        let mut bbox = mesh.bbox();
        if bbox.is_empty() {
            bbox = Aabb {
                dim,
                lo: [0.0; 3],
                hi: [0.0; 3],
            };
        }
        // Pad so boundary-touching queries still map to a cell.
        let pad = 1e-9 * (1.0 + bbox.diagonal());
        for a in 0..dim {
            bbox.lo[a] -= pad;
            bbox.hi[a] += pad;
        }
        let target = ((2 * ne.max(1)) as f64).powf(1.0 / dim as f64).ceil() as usize;
        let res = target.clamp(1, 128);
        let mut grid_res = [1usize; 3];
        let mut cell_size = [1.0f64; 3];
        for a in 0..dim {
            grid_res[a] = res;
            cell_size[a] = bbox.extent(a).max(1e-12) / res as f64;
        }
        let cells: usize = grid_res[..dim].iter().product();
        let mut buckets = vec![Vec::new(); cells];
        for n in 0..ne {
            let mut eb = Aabb::empty(dim);
            for p in mesh.element_points(n) {
                eb.include(p);
            }
            let (lo_idx, hi_idx) = (
                cell_of(&eb.lo, &bbox, &grid_res, &cell_size, dim),
                cell_of(&eb.hi, &bbox, &grid_res, &cell_size, dim),
            );
            for_each_cell_in_range(&lo_idx, &hi_idx, &grid_res, dim, |flat| {
                buckets[flat].push(n as u32)
            });
        }
        // Fixed jittered ray directions shared by every query; later entries
        // serve the retry rule for grazing hits.
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x5261_79)); // "Ray"
        let ray_dirs = (0..MAX_RAY_ATTEMPTS)
            .map(|_| {
                let mut d = [0.0; 3];
                d[0] = 1.0;
                for v in d.iter_mut().take(dim).skip(1) {
                    *v = 1e-4 * (rng.gen::<f64>() - 0.5);
                }
                d
            })
            .collect();
        MeshQuery {
            dim,
            degree: mesh.degree(),
            vertices: mesh.vertices_flat().to_vec(),
            elements: mesh.elements_flat().to_vec(),
            bbox,
            grid_res,
            cell_size,
            buckets,
            ray_dirs,
        }
    }

    /// Query structure over a validated (or deliberately reversed) boundary.
    pub fn for_boundary(boundary: &BoundaryMesh, seed: u64) -> Self {
        Self::new(boundary.mesh(), seed)
    }

    pub fn bbox(&self) -> &Aabb {
        &self.bbox
    }

    #[inline]
    fn vertex(&self, i: u32) -> &[f64] {
        &self.vertices[i as usize * self.dim..(i as usize + 1) * self.dim]
    }

    #[inline]
    fn element(&self, n: u32) -> &[u32] {
        let a = self.degree + 1;
        &self.elements[n as usize * a..(n as usize + 1) * a]
    }

    fn element_count(&self) -> usize {
        if self.elements.is_empty() {
            0
        } else {
            self.elements.len() / (self.degree + 1)
        }
    }

    /// Parity inside test. Meaningful only when the mesh is the watertight
    /// boundary of a solid (segments in 2D, triangles in 3D).
    pub fn is_inside(&self, p: &[f64], scratch: &mut QueryScratch) -> bool {
        debug_assert_eq!(self.degree + 1, self.dim, "boundary of a solid expected");
        if self.element_count() == 0 || !self.bbox.contains(p) {
            return false;
        }
        let mut parity = false;
        for dir in &self.ray_dirs {
            match self.cast_parity_ray(p, dir, scratch) {
                Some(crossings) => {
                    parity = crossings % 2 == 1;
                    return parity;
                }
                None => continue, // grazing hit: retry with next jitter
            }
        }
        parity
    }

    /// Walks the ray through the grid, counting crossings. `None` when any
    /// intersection was too close to an element boundary to trust.
    fn cast_parity_ray(&self, p: &[f64], dir: &[f64; 3], scratch: &mut QueryScratch) -> Option<usize> {
        let epoch = scratch.begin(self.element_count());
        let dim = self.dim;
        let mut crossings = 0usize;

        let mut idx = cell_of(p, &self.bbox, &self.grid_res, &self.cell_size, dim);
        let mut t_max = [f64::INFINITY; 3];
        let mut t_delta = [f64::INFINITY; 3];
        let mut step = [0isize; 3];
        for a in 0..dim {
            if dir[a] > 0.0 {
                step[a] = 1;
                let edge = self.bbox.lo[a] + (idx[a] + 1) as f64 * self.cell_size[a];
                t_max[a] = (edge - p[a]) / dir[a];
                t_delta[a] = self.cell_size[a] / dir[a];
            } else if dir[a] < 0.0 {
                step[a] = -1;
                let edge = self.bbox.lo[a] + idx[a] as f64 * self.cell_size[a];
                t_max[a] = (edge - p[a]) / dir[a];
                t_delta[a] = -self.cell_size[a] / dir[a];
            }
        }
        loop {
            let flat = flatten(&idx, &self.grid_res, dim);
            for &n in &self.buckets[flat] {
                if scratch.stamps[n as usize] == epoch {
                    continue;
                }
                scratch.stamps[n as usize] = epoch;
                match self.intersect_ray(p, dir, n) {
                    Hit::Cross => crossings += 1,
                    Hit::Miss => {}
                    Hit::Grazing => return None,
                }
            }
            // advance to the next cell along the smallest exit time
            let mut axis = 0;
            for a in 1..dim {
                if t_max[a] < t_max[axis] {
                    axis = a;
                }
            }
            if !t_max[axis].is_finite() {
                break;
            }
            let next = idx[axis] as isize + step[axis];
            if next < 0 || next as usize >= self.grid_res[axis] {
                break;
            }
            idx[axis] = next as usize;
            t_max[axis] += t_delta[axis];
        }
        Some(crossings)
    }

    fn intersect_ray(&self, p: &[f64], dir: &[f64; 3], n: u32) -> Hit {
        let el = self.element(n);
        if self.dim == 2 {
            ray_segment(p, dir, self.vertex(el[0]), self.vertex(el[1]))
        } else {
            ray_triangle(p, dir, self.vertex(el[0]), self.vertex(el[1]), self.vertex(el[2]))
        }
    }

    /// Exact Euclidean distance from `p` to the nearest element, found by an
    /// expanding ring search over the grid.
    pub fn distance(&self, p: &[f64], scratch: &mut QueryScratch) -> f64 {
        let ne = self.element_count();
        if ne == 0 {
            return f64::INFINITY;
        }
        let epoch = scratch.begin(ne);
        let dim = self.dim;
        let center = cell_of(p, &self.bbox, &self.grid_res, &self.cell_size, dim);
        let min_edge = (0..dim).map(|a| self.cell_size[a]).fold(f64::INFINITY, f64::min);
        let max_res = (0..dim).map(|a| self.grid_res[a]).max().unwrap_or(1);
        let mut best = f64::INFINITY;
        for ring in 0..=max_res {
            // Every cell at Chebyshev ring r is at least (r - 1) cell edges
            // away from p, so once that bound exceeds the best distance no
            // farther ring can improve it.
            if ring >= 2 && ((ring - 1) as f64) * min_edge > best {
                break;
            }
            self.for_each_ring_cell(&center, ring, |flat| {
                for &n in &self.buckets[flat] {
                    if scratch.stamps[n as usize] == epoch {
                        continue;
                    }
                    scratch.stamps[n as usize] = epoch;
                    let d = self.element_distance(p, n);
                    if d < best {
                        best = d;
                    }
                }
            });
        }
        best
    }

    /// Distance with parity sign: negative inside the enclosed solid.
    pub fn signed_distance(&self, p: &[f64], scratch: &mut QueryScratch) -> f64 {
        let d = self.distance(p, scratch);
        if self.is_inside(p, scratch) {
            -d
        } else {
            d
        }
    }

    fn element_distance(&self, p: &[f64], n: u32) -> f64 {
        let el = self.element(n);
        match self.degree {
            0 => dist_sq(p, self.vertex(el[0])).sqrt(),
            1 => point_segment_distance(p, self.vertex(el[0]), self.vertex(el[1])),
            _ => point_triangle_distance(p, self.vertex(el[0]), self.vertex(el[1]), self.vertex(el[2])),
        }
    }

    fn for_each_ring_cell(&self, center: &[usize; 3], ring: usize, mut f: impl FnMut(usize)) {
        let dim = self.dim;
        let r = ring as isize;
        let lo: Vec<isize> = (0..dim).map(|a| center[a] as isize - r).collect();
        let hi: Vec<isize> = (0..dim).map(|a| center[a] as isize + r).collect();
        let mut idx = [0usize; 3];
        let visit = |this: &Self, idx: &[usize; 3], f: &mut dyn FnMut(usize)| {
            f(flatten(idx, &this.grid_res, dim));
        };
        // iterate the shell: at least one axis pinned to lo or hi
        let in_range = |a: usize, v: isize| v >= 0 && (v as usize) < self.grid_res[a];
        if dim == 2 {
            for x in lo[0]..=hi[0] {
                if !in_range(0, x) {
                    continue;
                }
                for y in lo[1]..=hi[1] {
                    if !in_range(1, y) {
                        continue;
                    }
                    let on_shell = x == lo[0] || x == hi[0] || y == lo[1] || y == hi[1];
                    if ring == 0 || on_shell {
                        idx[0] = x as usize;
                        idx[1] = y as usize;
                        visit(self, &idx, &mut f);
                    }
                }
            }
        } else {
            for x in lo[0]..=hi[0] {
                if !in_range(0, x) {
                    continue;
                }
                for y in lo[1]..=hi[1] {
                    if !in_range(1, y) {
                        continue;
                    }
                    for z in lo[2]..=hi[2] {
                        if !in_range(2, z) {
                            continue;
                        }
                        let on_shell = x == lo[0]
                            || x == hi[0]
                            || y == lo[1]
                            || y == hi[1]
                            || z == lo[2]
                            || z == hi[2];
                        if ring == 0 || on_shell {
                            idx[0] = x as usize;
                            idx[1] = y as usize;
                            idx[2] = z as usize;
                            visit(self, &idx, &mut f);
                        }
                    }
                }
            }
        }
    }
}

enum Hit {
    Miss,
    Cross,
    Grazing,
}

fn cell_of(
    p: &[f64],
    bbox: &Aabb,
    grid_res: &[usize; 3],
    cell_size: &[f64; 3],
    dim: usize,
) -> [usize; 3] {
    let mut idx = [0usize; 3];
    for a in 0..dim {
        let rel = (p[a] - bbox.lo[a]) / cell_size[a];
        idx[a] = (rel.floor().max(0.0) as usize).min(grid_res[a] - 1);
    }
    idx
}

fn flatten(idx: &[usize; 3], grid_res: &[usize; 3], dim: usize) -> usize {
    let mut flat = 0;
    for a in 0..dim {
        flat = flat * grid_res[a] + idx[a];
    }
    flat
}

fn for_each_cell_in_range(
    lo: &[usize; 3],
    hi: &[usize; 3],
    grid_res: &[usize; 3],
    dim: usize,
    mut f: impl FnMut(usize),
) {
    let mut idx = *lo;
    loop {
        f(flatten(&idx, grid_res, dim));
        let mut axis = dim;
        while axis > 0 {
            axis -= 1;
            if idx[axis] < hi[axis] {
                idx[axis] += 1;
                for reset in axis + 1..dim {
                    idx[reset] = lo[reset];
                }
                break;
            }
            if axis == 0 {
                return;
            }
        }
    }
}

/// Ray-segment crossing in the plane, flagging grazing incidence near the
/// segment endpoints or a near-parallel ray.
fn ray_segment(p: &[f64], dir: &[f64; 3], a: &[f64], b: &[f64]) -> Hit {
    let sx = b[0] - a[0];
    let sy = b[1] - a[1];
    let denom = dir[0] * sy - dir[1] * sx;
    let scale = (sx * sx + sy * sy).sqrt().max(1e-300);
    if denom.abs() < 1e-12 * scale {
        // parallel: either misses entirely or grazes along the segment
        let off = (a[0] - p[0]) * dir[1] - (a[1] - p[1]) * dir[0];
        if off.abs() < 1e-12 * scale {
            return Hit::Grazing;
        }
        return Hit::Miss;
    }
    let qx = a[0] - p[0];
    let qy = a[1] - p[1];
    let t = (qx * sy - qy * sx) / denom;
    let u = (qx * dir[1] - qy * dir[0]) / denom;
    if !(-BARY_EPS..=1.0 + BARY_EPS).contains(&u) {
        return Hit::Miss;
    }
    if u < BARY_EPS || u > 1.0 - BARY_EPS || t.abs() < BARY_EPS * scale {
        return Hit::Grazing;
    }
    if t > 0.0 {
        Hit::Cross
    } else {
        Hit::Miss
    }
}

/// Watertight-enough ray-triangle crossing with grazing detection near the
/// triangle boundary.
fn ray_triangle(p: &[f64], dir: &[f64; 3], a: &[f64], b: &[f64], c: &[f64]) -> Hit {
    let e1 = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let e2 = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let pv = [
        dir[1] * e2[2] - dir[2] * e2[1],
        dir[2] * e2[0] - dir[0] * e2[2],
        dir[0] * e2[1] - dir[1] * e2[0],
    ];
    let det = e1[0] * pv[0] + e1[1] * pv[1] + e1[2] * pv[2];
    let scale = (dist_sq(a, b).sqrt() * dist_sq(a, c).sqrt()).max(1e-300);
    if det.abs() < 1e-12 * scale {
        return Hit::Grazing;
    }
    let inv = 1.0 / det;
    let tv = [p[0] - a[0], p[1] - a[1], p[2] - a[2]];
    let u = (tv[0] * pv[0] + tv[1] * pv[1] + tv[2] * pv[2]) * inv;
    let qv = [
        tv[1] * e1[2] - tv[2] * e1[1],
        tv[2] * e1[0] - tv[0] * e1[2],
        tv[0] * e1[1] - tv[1] * e1[0],
    ];
    let v = (dir[0] * qv[0] + dir[1] * qv[1] + dir[2] * qv[2]) * inv;
    let w = 1.0 - u - v;
    let inside_loose = u > -BARY_EPS && v > -BARY_EPS && w > -BARY_EPS;
    if !inside_loose {
        return Hit::Miss;
    }
    let t = (e2[0] * qv[0] + e2[1] * qv[1] + e2[2] * qv[2]) * inv;
    if u < BARY_EPS || v < BARY_EPS || w < BARY_EPS || t.abs() < BARY_EPS {
        return Hit::Grazing;
    }
    if t > 0.0 {
        Hit::Cross
    } else {
        Hit::Miss
    }
}

/// Distance from a point to a segment, exact.
pub fn point_segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let dim = p.len();
    let mut ab2 = 0.0;
    let mut ap_ab = 0.0;
    for i in 0..dim {
        let ab = b[i] - a[i];
        ab2 += ab * ab;
        ap_ab += (p[i] - a[i]) * ab;
    }
    let t = if ab2 > 0.0 { (ap_ab / ab2).clamp(0.0, 1.0) } else { 0.0 };
    let mut d2 = 0.0;
    for i in 0..dim {
        let closest = a[i] + t * (b[i] - a[i]);
        let d = p[i] - closest;
        d2 += d * d;
    }
    d2.sqrt()
}

/// Distance from a point to a triangle in 3D (closest-point region tests).
pub fn point_triangle_distance(p: &[f64], a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let sub3 = |x: &[f64], y: &[f64]| [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
    let dot3 = |x: [f64; 3], y: [f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    let ab = sub3(b, a);
    let ac = sub3(c, a);
    let ap = sub3(p, a);
    let d1 = dot3(ab, ap);
    let d2 = dot3(ac, ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return dist_sq(p, a).sqrt();
    }
    let bp = sub3(p, b);
    let d3 = dot3(ab, bp);
    let d4 = dot3(ac, bp);
    if d3 >= 0.0 && d4 <= d3 {
        return dist_sq(p, b).sqrt();
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let t = d1 / (d1 - d3);
        let q = [a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]];
        return dist_sq(p, &q).sqrt();
    }
    let cp = sub3(p, c);
    let d5 = dot3(ab, cp);
    let d6 = dot3(ac, cp);
    if d6 >= 0.0 && d5 <= d6 {
        return dist_sq(p, c).sqrt();
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let t = d2 / (d2 - d6);
        let q = [a[0] + t * ac[0], a[1] + t * ac[1], a[2] + t * ac[2]];
        return dist_sq(p, &q).sqrt();
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        let q = [
            b[0] + t * (c[0] - b[0]),
            b[1] + t * (c[1] - b[1]),
            b[2] + t * (c[2] - b[2]),
        ];
        return dist_sq(p, &q).sqrt();
    }
    // interior: project onto the plane
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    let q = [
        a[0] + ab[0] * v + ac[0] * w,
        a[1] + ab[1] * v + ac[1] * w,
        a[2] + ab[2] * v + ac[2] * w,
    ];
    dist_sq(p, &q).sqrt()
}
