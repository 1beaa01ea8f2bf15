//! Exact primitive-versus-cell-box intersection tests.

/// Dispatch on element arity: point containment, segment slab test, or
/// triangle separating-axis test.
pub(crate) fn element_intersects_box(pts: &[&[f64]], lo: &[f64], hi: &[f64]) -> bool {
    match pts.len() {
        1 => point_in_box(pts[0], lo, hi),
        2 => segment_intersects_box(pts[0], pts[1], lo, hi),
        3 => {
            if lo.len() == 2 {
                triangle_intersects_box_2d(pts[0], pts[1], pts[2], lo, hi)
            } else {
                triangle_intersects_box_3d(pts[0], pts[1], pts[2], lo, hi)
            }
        }
        // tetrahedra rasterize via their solid interior elsewhere; treat the
        // hull conservatively through its bounding box here
        _ => (0..lo.len()).all(|a| {
            let e_lo = pts.iter().map(|p| p[a]).fold(f64::INFINITY, f64::min);
            let e_hi = pts.iter().map(|p| p[a]).fold(f64::NEG_INFINITY, f64::max);
            e_lo <= hi[a] && e_hi >= lo[a]
        }),
    }
}

fn point_in_box(p: &[f64], lo: &[f64], hi: &[f64]) -> bool {
    // half-open cells so a point on a shared face belongs to one cell
    (0..lo.len()).all(|a| p[a] >= lo[a] && p[a] < hi[a])
}

/// Slab test in any dimension.
fn segment_intersects_box(a: &[f64], b: &[f64], lo: &[f64], hi: &[f64]) -> bool {
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for axis in 0..lo.len() {
        let d = b[axis] - a[axis];
        if d.abs() < 1e-300 {
            if a[axis] < lo[axis] || a[axis] > hi[axis] {
                return false;
            }
            continue;
        }
        let mut near = (lo[axis] - a[axis]) / d;
        let mut far = (hi[axis] - a[axis]) / d;
        if near > far {
            std::mem::swap(&mut near, &mut far);
        }
        t0 = t0.max(near);
        t1 = t1.min(far);
        if t0 > t1 {
            return false;
        }
    }
    true
}

/// 2D separating axes: box axes plus the three edge normals.
fn triangle_intersects_box_2d(a: &[f64], b: &[f64], c: &[f64], lo: &[f64], hi: &[f64]) -> bool {
    let tri = [a, b, c];
    // box axes
    for axis in 0..2 {
        let t_lo = tri.iter().map(|p| p[axis]).fold(f64::INFINITY, f64::min);
        let t_hi = tri.iter().map(|p| p[axis]).fold(f64::NEG_INFINITY, f64::max);
        if t_lo > hi[axis] || t_hi < lo[axis] {
            return false;
        }
    }
    // edge normals
    let corners = [[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]];
    for (p, q) in [(a, b), (b, c), (c, a)] {
        let n = [q[1] - p[1], p[0] - q[0]];
        let proj = |pt: &[f64]| n[0] * pt[0] + n[1] * pt[1];
        let t_min = tri.iter().map(|p| proj(p)).fold(f64::INFINITY, f64::min);
        let t_max = tri.iter().map(|p| proj(p)).fold(f64::NEG_INFINITY, f64::max);
        let b_min = corners.iter().map(|p| proj(p)).fold(f64::INFINITY, f64::min);
        let b_max = corners.iter().map(|p| proj(p)).fold(f64::NEG_INFINITY, f64::max);
        if t_min > b_max || t_max < b_min {
            return false;
        }
    }
    true
}

/// 3D separating axes (box axes, triangle normal, nine edge cross products).
fn triangle_intersects_box_3d(a: &[f64], b: &[f64], c: &[f64], lo: &[f64], hi: &[f64]) -> bool {
    let center = [
        0.5 * (lo[0] + hi[0]),
        0.5 * (lo[1] + hi[1]),
        0.5 * (lo[2] + hi[2]),
    ];
    let half = [
        0.5 * (hi[0] - lo[0]),
        0.5 * (hi[1] - lo[1]),
        0.5 * (hi[2] - lo[2]),
    ];
    let v0 = [a[0] - center[0], a[1] - center[1], a[2] - center[2]];
    let v1 = [b[0] - center[0], b[1] - center[1], b[2] - center[2]];
    let v2 = [c[0] - center[0], c[1] - center[1], c[2] - center[2]];
    let e0 = [v1[0] - v0[0], v1[1] - v0[1], v1[2] - v0[2]];
    let e1 = [v2[0] - v1[0], v2[1] - v1[1], v2[2] - v1[2]];
    let e2 = [v0[0] - v2[0], v0[1] - v2[1], v0[2] - v2[2]];

    let cross = |u: [f64; 3], v: [f64; 3]| {
        [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ]
    };
    let dot = |u: [f64; 3], v: [f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];

    let separated = |axis: [f64; 3]| -> bool {
        let p0 = dot(v0, axis);
        let p1 = dot(v1, axis);
        let p2 = dot(v2, axis);
        let r = half[0] * axis[0].abs() + half[1] * axis[1].abs() + half[2] * axis[2].abs();
        let t_min = p0.min(p1).min(p2);
        let t_max = p0.max(p1).max(p2);
        t_min > r || t_max < -r
    };

    // box axes
    for axis in 0..3 {
        let t_min = v0[axis].min(v1[axis]).min(v2[axis]);
        let t_max = v0[axis].max(v1[axis]).max(v2[axis]);
        if t_min > half[axis] || t_max < -half[axis] {
            return false;
        }
    }
    // nine cross axes
    let units = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for e in [e0, e1, e2] {
        for u in units {
            let axis = cross(u, e);
            if axis.iter().all(|v| v.abs() < 1e-300) {
                continue;
            }
            if separated(axis) {
                return false;
            }
        }
    }
    // triangle normal
    !separated(cross(e0, e1))
}
