//! Deterministic sample geometry: squares, cubes, polygons and a blobby
//! genus-0 surface. Used throughout the tests, the book and as CLI demo
//! input; all generators are reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::mesh::{BoundaryMesh, SimplexMesh};

/// Counter-clockwise loop of directed segments through `points` in order.
pub fn polygon_loop(points: &[[f64; 2]]) -> BoundaryMesh {
    let n = points.len();
    let vertices = points.iter().flat_map(|p| [p[0], p[1]]).collect();
    let elements = (0..n as u32)
        .flat_map(|i| [i, (i + 1) % n as u32])
        .collect();
    BoundaryMesh::new_unchecked(
        SimplexMesh::with_unit_densities(2, 1, vertices, elements).expect("loop mesh"),
    )
}

/// Axis-aligned square `[lo, hi]^2` as a counter-clockwise boundary loop.
pub fn square_loop(lo: f64, hi: f64) -> BoundaryMesh {
    polygon_loop(&[[lo, lo], [hi, lo], [hi, hi], [lo, hi]])
}

/// The same square as a solid two-triangle mesh (degree 2 in the plane).
pub fn square_solid(lo: f64, hi: f64) -> SimplexMesh {
    SimplexMesh::with_unit_densities(
        2,
        2,
        vec![lo, lo, hi, lo, hi, hi, lo, hi],
        vec![0, 1, 2, 0, 2, 3],
    )
    .expect("square mesh")
}

/// L-shaped polygon: the unit square minus its upper-right quadrant,
/// enclosing area 3/4. Counter-clockwise.
pub fn l_polygon() -> BoundaryMesh {
    polygon_loop(&[
        [0.0, 0.0],
        [1.0, 0.0],
        [1.0, 0.5],
        [0.5, 0.5],
        [0.5, 1.0],
        [0.0, 1.0],
    ])
}

const CUBE_CORNERS: [[usize; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [1, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [0, 1, 1],
    [1, 1, 1],
];

fn cube_vertices(lo: f64, hi: f64) -> Vec<f64> {
    CUBE_CORNERS
        .iter()
        .flat_map(|c| c.iter().map(move |&b| if b == 0 { lo } else { hi }))
        .collect()
}

/// Axis-aligned cube `[lo, hi]^3` as 12 outward-oriented boundary triangles
/// over 8 shared vertices.
///
/// Face diagonals match the ones induced by the [`cube_tets`] decomposition
/// (every diagonal passes through corner 0 or corner 7), so under any vertex
/// perturbation this surface still bounds exactly the union of those
/// tetrahedra.
pub fn cube_boundary(lo: f64, hi: f64) -> BoundaryMesh {
    let elements = vec![
        0, 3, 1, 0, 2, 3, // z = lo
        4, 5, 7, 4, 7, 6, // z = hi
        0, 1, 5, 0, 5, 4, // y = lo
        2, 6, 7, 2, 7, 3, // y = hi
        0, 4, 6, 0, 6, 2, // x = lo
        1, 3, 7, 1, 7, 5, // x = hi
    ];
    BoundaryMesh::new_unchecked(
        SimplexMesh::with_unit_densities(3, 2, cube_vertices(lo, hi), elements)
            .expect("cube surface"),
    )
}

/// The same cube as a solid mesh of six tetrahedra fanned around the main
/// diagonal (corner 0 to corner 7), over the identical vertex buffer as
/// [`cube_boundary`].
pub fn cube_tets(lo: f64, hi: f64) -> SimplexMesh {
    let elements = vec![
        0, 1, 3, 7, 0, 3, 2, 7, 0, 2, 6, 7, 0, 6, 4, 7, 0, 4, 5, 7, 0, 5, 1, 7,
    ];
    SimplexMesh::with_unit_densities(3, 3, cube_vertices(lo, hi), elements).expect("cube tets")
}

/// Regular polygon boundary loop, counter-clockwise.
pub fn regular_polygon(center: [f64; 2], radius: f64, sides: usize) -> BoundaryMesh {
    let pts: Vec<[f64; 2]> = (0..sides)
        .map(|i| {
            let a = 2.0 * std::f64::consts::PI * i as f64 / sides as f64;
            [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
        })
        .collect();
    polygon_loop(&pts)
}

/// Random convex polygon: the convex hull of seeded random points in the
/// unit square, as a counter-clockwise loop. At least a triangle.
pub fn random_convex_polygon(seed: u64) -> BoundaryMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.gen_range(6..=14);
    let mut pts: Vec<[f64; 2]> = (0..count)
        .map(|_| [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])
        .collect();
    let hull = convex_hull(&mut pts);
    polygon_loop(&hull)
}

/// Andrew's monotone chain; returns the hull counter-clockwise.
fn convex_hull(pts: &mut Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup();
    let cross = |o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for p in pts.iter() {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0
        {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0
        {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Smoothly deformed icosphere: a watertight genus-0 surface with
/// `20 * 4^subdivisions` triangles (1280 at three subdivisions). The radial
/// deformation keeps the shape star-shaped, so it never self-intersects.
pub fn blob_surface(subdivisions: usize) -> BoundaryMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<[f64; 3]> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|v| normalize3(*v))
    .collect();
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoints: std::collections::HashMap<(u32, u32), u32> =
            std::collections::HashMap::new();
        let mut midpoint = |a: u32, b: u32, vertices: &mut Vec<[f64; 3]>| -> u32 {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                let pa = vertices[a as usize];
                let pb = vertices[b as usize];
                let m = normalize3([
                    (pa[0] + pb[0]) / 2.0,
                    (pa[1] + pb[1]) / 2.0,
                    (pa[2] + pb[2]) / 2.0,
                ]);
                vertices.push(m);
                (vertices.len() - 1) as u32
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.push([a, ab, ca]);
            next.push([b, bc, ab]);
            next.push([c, ca, bc]);
            next.push([ab, bc, ca]);
        }
        faces = next;
    }
    // Radial bumps: polynomial in the unit direction, bounded below 1 so the
    // radius stays positive.
    let flat: Vec<f64> = vertices
        .iter()
        .flat_map(|&u| {
            let r = 1.0 + 0.35 * u[0] * u[1] + 0.25 * u[2].powi(3) - 0.2 * u[0] * u[2]
                + 0.15 * u[1];
            [r * u[0], r * u[1], r * u[2]]
        })
        .collect();
    let elements = faces.iter().flat_map(|f| f.iter().copied()).collect();
    BoundaryMesh::new_unchecked(
        SimplexMesh::with_unit_densities(3, 2, flat, elements).expect("blob mesh"),
    )
}

fn normalize3(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Random non-degenerate simplex of the given degree inside the unit cell.
/// Resamples until the content is comfortably away from zero.
pub fn random_simplex(dim: usize, degree: usize, seed: u64) -> Result<SimplexMesh> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let vertices: Vec<f64> = (0..(degree + 1) * dim)
            .map(|_| rng.gen_range(0.05..0.95))
            .collect();
        let mesh = SimplexMesh::with_unit_densities(
            dim,
            degree,
            vertices,
            (0..=degree as u32).collect(),
        )?;
        if degree == 0 || mesh.element_content(0)? > 1e-3 {
            return Ok(mesh);
        }
    }
}
