//! Exact Fourier transforms of weighted simplex meshes on frequency grids.
//!
//! [`mesh_ft`] sums the closed-form per-element transform over a mesh;
//! [`auxnode_ft`] transforms the solid enclosed by a watertight boundary by
//! signed accumulation over auxiliary simplices spanned with the origin.
//! Both jitter the vertices once up front, parallelize over grid modes with
//! a per-worker sigma cache, visit elements in breadth-first order, and
//! accumulate each mode in element index order, so the output is bitwise
//! deterministic for a fixed seed regardless of worker count. On a sigma
//! collision the whole transform retries once with the seed incremented,
//! then reports the error.

mod grid;
mod jitter;
mod kernel;
mod spectrum;

pub use grid::{KGrid, ModeLayout};
pub use jitter::{jitter_vertices, DcPolicy, JitterConfig};
pub use kernel::{
    auxnode_element_ft, simplex_ft, simplex_ft_specialized, simplex_ft_with_separation,
    SigmaCache, SIGMA_SEPARATION,
};
pub use spectrum::{SpectralGrid, SpectrumMeta};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::mix_seed;
use crate::mesh::{BoundaryMesh, SimplexMesh};

use kernel::{auxnode_rational_sum, i_pow, rational_sum, signed_distortion_fast};

/// Transform of a weighted simplex mesh on every mode of `grid`.
///
/// The mesh should sit inside the unit cell (see
/// [`crate::mesh::normalize_to_unit_cell`]); the grid's period convention
/// assumes it. The zero mode follows `config.dc_policy`: by default it is
/// the analytic limit, the exact total mass of the input mesh.
pub fn mesh_ft(mesh: &SimplexMesh, grid: &KGrid, config: &JitterConfig) -> Result<SpectralGrid> {
    run_with_rejitter(mesh, grid, config, false)
}

/// Transform of the uniform solid enclosed by a watertight boundary.
///
/// Requires the ambient dimension to equal the solid degree (loops in the
/// plane, surfaces in space). The analytic zero mode is the density-weighted
/// enclosed signed volume.
pub fn auxnode_ft(
    boundary: &BoundaryMesh,
    grid: &KGrid,
    config: &JitterConfig,
) -> Result<SpectralGrid> {
    run_with_rejitter(boundary.mesh(), grid, config, true)
}

fn run_with_rejitter(
    mesh: &SimplexMesh,
    grid: &KGrid,
    config: &JitterConfig,
    solid: bool,
) -> Result<SpectralGrid> {
    if grid.dim() != mesh.dim() {
        return Err(Error::Unsupported(format!(
            "grid dimension {} does not match mesh dimension {}",
            grid.dim(),
            mesh.dim()
        )));
    }
    if solid && mesh.degree() + 1 != mesh.dim() {
        return Err(Error::Unsupported(
            "auxiliary-node transform needs a boundary whose solid degree equals the ambient dimension"
                .into(),
        ));
    }
    // The analytic zero mode is the exact mass (or signed volume) of the
    // input mesh itself; jitter is a numerical device for the other modes.
    let analytic_dc = signal_mass(mesh, solid)?;
    let mut last_err = None;
    for attempt in 0..2u64 {
        let seed = config.seed.wrapping_add(attempt);
        let jittered = jitter_vertices(mesh, &JitterConfig { seed, ..*config });
        match transform_grid(&jittered, grid, config, seed, solid, analytic_dc) {
            Ok(values) => {
                let meta = SpectrumMeta {
                    degree: if solid { mesh.dim() } else { mesh.degree() },
                    solid,
                    element_count: mesh.element_count(),
                    jitter_eps: config.eps,
                    seed,
                    dc_policy: config.dc_policy,
                    affine: None,
                };
                return SpectralGrid::new(grid.clone(), values, meta);
            }
            Err(e) if e.is_sigma_collision() && attempt == 0 => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("loop exits via return unless a collision was recorded"))
}

/// Density-weighted total mass for mesh signals, enclosed signed volume for
/// solids: the exact zero-frequency coefficient.
fn signal_mass(mesh: &SimplexMesh, solid: bool) -> Result<f64> {
    let degree = if solid { mesh.dim() } else { mesh.degree() };
    let mut mass = 0.0;
    for n in 0..mesh.element_count() {
        let pts = mesh.element_points(n);
        let w = if solid {
            signed_distortion_fast(&pts)
        } else {
            crate::mesh::distortion_factor(&pts)?
        };
        mass += mesh.density(n) * w / crate::mesh::factorial(degree);
    }
    Ok(mass)
}

fn transform_grid(
    mesh: &SimplexMesh,
    grid: &KGrid,
    config: &JitterConfig,
    seed: u64,
    solid: bool,
    analytic_dc: f64,
) -> Result<Vec<Complex64>> {
    let ne = mesh.element_count();
    let nv = mesh.vertex_count();
    let degree = if solid { mesh.dim() } else { mesh.degree() };
    let arity = mesh.degree() + 1;

    // k-independent per-element factors: density times (signed) distortion;
    // zero-content elements contribute nothing and are skipped outright
    let mut weights = Vec::with_capacity(ne);
    for n in 0..ne {
        let pts = mesh.element_points(n);
        let w = if solid {
            signed_distortion_fast(&pts)
        } else {
            crate::mesh::distortion_factor(&pts)?
        };
        weights.push(mesh.density(n) * w);
    }

    let order = mesh.bfs_element_order();
    let ij = i_pow(degree);

    // The jittered zero-frequency used when the DC policy asks for it.
    let dc_k = {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(mix_seed(seed, 0xdc));
        let mut k = [0.0f64; 3];
        let eps = if config.eps > 0.0 { config.eps } else { 0.0 };
        for v in k.iter_mut().take(grid.dim()) {
            *v = 2.0 * std::f64::consts::PI * eps * (2.0 * rng.gen::<f64>() - 1.0);
        }
        k
    };

    (0..grid.len())
        .into_par_iter()
        .map_init(
            || (SigmaCache::new(nv), vec![Complex64::ZERO; ne]),
            |(cache, scratch), flat| -> Result<Complex64> {
                let mode = grid.mode(flat);
                let is_dc = mode[..grid.dim()].iter().all(|&m| m == 0);
                if is_dc && config.dc_policy == DcPolicy::Analytic {
                    return Ok(Complex64::new(analytic_dc, 0.0));
                }
                let mut k = [0.0f64; 3];
                grid.k_of(&mode, &mut k);
                if is_dc {
                    k = dc_k;
                }
                let k = &k[..grid.dim()];

                cache.begin_mode();
                let mut sigma = [0.0f64; 4];
                let mut phase = [Complex64::ZERO; 4];
                for &n in &order {
                    let n = n as usize;
                    if weights[n] == 0.0 {
                        scratch[n] = Complex64::ZERO;
                        continue;
                    }
                    let el = mesh.element(n);
                    for (t, &v) in el.iter().enumerate() {
                        let (s, p) = cache.get(v as usize, mesh.vertex(v as usize), k);
                        sigma[t] = s;
                        phase[t] = p;
                    }
                    let sum = if solid {
                        auxnode_rational_sum(&sigma[..arity], &phase[..arity], SIGMA_SEPARATION)
                    } else if degree == 0 {
                        Some(phase[0])
                    } else {
                        rational_sum(&sigma[..arity], &phase[..arity], SIGMA_SEPARATION)
                    };
                    match sum {
                        Some(s) => scratch[n] = weights[n] * s,
                        None => {
                            return Err(Error::SigmaCollision {
                                element: n,
                                separation: SIGMA_SEPARATION,
                            })
                        }
                    }
                }
                // summation in element index order, independent of visit
                // order and worker count
                let mut total = Complex64::ZERO;
                for v in scratch.iter() {
                    total += v;
                }
                Ok(ij * total)
            },
        )
        .collect()
}

/// Transform of a mesh at one arbitrary frequency (no grid, no jitter);
/// elements accumulate in index order.
pub fn mesh_ft_at(mesh: &SimplexMesh, k: &[f64]) -> Result<Complex64> {
    let mut total = Complex64::ZERO;
    for n in 0..mesh.element_count() {
        let pts = mesh.element_points(n);
        if mesh.degree() > 0 && mesh.element_content(n)? == 0.0 {
            continue;
        }
        let v = simplex_ft(&pts, k).map_err(|e| tag_element(e, n))?;
        total += mesh.density(n) * v;
    }
    Ok(total)
}

/// Solid transform at one arbitrary frequency via the auxiliary-node path.
pub fn auxnode_ft_at(boundary: &BoundaryMesh, k: &[f64]) -> Result<Complex64> {
    let mesh = boundary.mesh();
    let mut total = Complex64::ZERO;
    for n in 0..mesh.element_count() {
        let pts = mesh.element_points(n);
        let v = auxnode_element_ft(&pts, k).map_err(|e| tag_element(e, n))?;
        total += mesh.density(n) * v;
    }
    Ok(total)
}

fn tag_element(e: Error, n: usize) -> Error {
    match e {
        Error::SigmaCollision { separation, .. } => Error::SigmaCollision {
            element: n,
            separation,
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use std::f64::consts::PI;

    #[test]
    fn two_points_give_cosine_pair() {
        // unit points at 0.5 +- d: F(k) = 2 cos(k d) e^{-i k 0.5}-style pair;
        // place them symmetrically about the origin for the pure cosine
        let mesh = crate::mesh::SimplexMesh::with_unit_densities(
            2,
            0,
            vec![0.3, 0.4, -0.3, -0.4],
            vec![0, 1],
        )
        .unwrap();
        let k = [2.0 * PI * 3.0, 2.0 * PI];
        let v = mesh_ft_at(&mesh, &k).unwrap();
        let expect = 2.0 * (k[0] * 0.3 + k[1] * 0.4).cos();
        assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn grid_dc_is_total_mass() {
        let mesh = shapes::square_solid(0.25, 0.75);
        let grid = KGrid::cubic(2, 8);
        let spec = mesh_ft(&mesh, &grid, &JitterConfig::default()).unwrap();
        let mass = 0.25;
        assert!((spec.dc().re - mass).abs() < 1e-12 * mass);
        assert_eq!(spec.dc().im, 0.0);
    }

    #[test]
    fn unit_square_separable_product() {
        // solid square [0,1]^2 as two triangles, evaluated at an arbitrary
        // frequency: the transform separates into two segment factors
        let mesh = shapes::square_solid(0.0, 1.0);
        let (a, b) = (0.7, 1.3);
        let k = [2.0 * PI * a, 2.0 * PI * b];
        let v = mesh_ft_at(&mesh, &k).unwrap();
        let seg = |w: f64| {
            let i = Complex64::new(0.0, 1.0);
            ((-i * w).exp() - 1.0) / (-i * w)
        };
        let expect = seg(2.0 * PI * a) * seg(2.0 * PI * b);
        assert!((v - expect).norm() < 1e-12, "{v} vs {expect}");
    }

    #[test]
    fn unit_square_integer_modes_vanish() {
        // the square fills the whole unit cell, so every nonzero integer
        // mode integrates a full period
        let mesh = shapes::square_solid(0.0, 1.0);
        let grid = KGrid::cubic(2, 6);
        let spec = mesh_ft(&mesh, &grid, &JitterConfig::new(1e-7, 11)).unwrap();
        for flat in 0..grid.len() {
            let m = grid.mode(flat);
            if m[..2].iter().all(|&x| x == 0) {
                assert!((spec.values()[flat].re - 1.0).abs() < 1e-12);
            } else {
                assert!(
                    spec.values()[flat].norm() < 1e-4,
                    "mode {m:?}: {}",
                    spec.values()[flat].norm()
                );
            }
        }
    }

    #[test]
    fn auxnode_square_dc_is_area() {
        let square = shapes::square_loop(0.2, 0.7);
        let grid = KGrid::cubic(2, 4);
        let spec = auxnode_ft(&square, &grid, &JitterConfig::default()).unwrap();
        assert!((spec.dc().re - 0.25).abs() < 1e-13);
        let l = shapes::l_polygon();
        let spec = auxnode_ft(&l, &KGrid::cubic(2, 1), &JitterConfig::new(0.0, 0)).unwrap();
        assert!((spec.dc().re - 0.75).abs() < 1e-13);
    }

    #[test]
    fn auxnode_cube_dc_is_volume() {
        let cube = shapes::cube_boundary(0.0, 1.0);
        let spec = auxnode_ft(&cube, &KGrid::cubic(3, 1), &JitterConfig::new(0.0, 0)).unwrap();
        assert!((spec.dc().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn auxnode_matches_direct_triangulation_on_square() {
        let square = shapes::square_loop(0.15, 0.85);
        let solid = shapes::square_solid(0.15, 0.85);
        let k = [2.0 * PI * 2.0, -2.0 * PI * 3.0];
        let via_aux = auxnode_ft_at(&square, &k).unwrap();
        let via_tris = mesh_ft_at(&solid, &k).unwrap();
        assert!((via_aux - via_tris).norm() < 1e-12);
    }

    #[test]
    fn collision_retries_once_with_next_seed() {
        // axis-aligned square edges collide at axis modes without jitter
        let mesh = shapes::square_solid(0.25, 0.75);
        let grid = KGrid::cubic(2, 4);
        let err = mesh_ft(&mesh, &grid, &JitterConfig::new(0.0, 5));
        assert!(matches!(err, Err(Error::SigmaCollision { .. })));
        // with jitter enabled the retry machinery is not even needed
        let spec = mesh_ft(&mesh, &grid, &JitterConfig::new(1e-6, 5)).unwrap();
        assert_eq!(spec.meta().seed, 5);
    }

    #[test]
    fn output_independent_of_worker_count() {
        let mesh = shapes::square_solid(0.2, 0.8);
        let grid = KGrid::cubic(2, 8);
        let cfg = JitterConfig::new(1e-6, 3);
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = pool1.install(|| mesh_ft(&mesh, &grid, &cfg)).unwrap();
        let b = pool4.install(|| mesh_ft(&mesh, &grid, &cfg)).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn hermitian_symmetry_of_real_mesh() {
        let mesh = shapes::square_solid(0.3, 0.6);
        let grid = KGrid::cubic(2, 8);
        let spec = mesh_ft(&mesh, &grid, &JitterConfig::new(1e-6, 2)).unwrap();
        assert!(spec.hermitian_residual() < 1e-12);
    }

    #[test]
    fn density_scaling_power_of_two_is_exact() {
        let mesh = shapes::square_solid(0.3, 0.6);
        let grid = KGrid::cubic(2, 6);
        let cfg = JitterConfig::new(1e-6, 4);
        let base = mesh_ft(&mesh, &grid, &cfg).unwrap();
        let scaled = mesh_ft(&mesh.density_scaled(2.0), &grid, &cfg).unwrap();
        for (a, b) in base.values().iter().zip(scaled.values()) {
            assert_eq!(a * 2.0, *b);
        }
    }
}
