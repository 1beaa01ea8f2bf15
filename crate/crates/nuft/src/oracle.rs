//! Brute-force integration oracles for the closed-form transforms.
//!
//! These estimate the transform integrals numerically, by stratified Monte
//! Carlo over simplices (exact barycentric sampling, zero rejection) or by a
//! midpoint rule on recursively subdivided simplices, plus a Monte Carlo
//! estimator for solid polytopes using parity inside-tests. They share no
//! code with the closed-form kernels: even simplex content is recomputed
//! here from the Gram determinant rather than the squared-distance matrix.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{det_small, dot, mix_seed};
use crate::mesh::BoundaryMesh;
use crate::query::{MeshQuery, QueryScratch};

/// How to estimate a transform integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "method")]
pub enum QuadratureMethod {
    /// Uniform barycentric sampling, stratified over a simplex subdivision.
    StratifiedMonteCarlo { samples: usize },
    /// Midpoint rule over `(2^j)^depth` congruent sub-simplices.
    RecursiveSubdivisionMidpoint { depth: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    #[serde(flatten)]
    pub method: QuadratureMethod,
    pub seed: u64,
}

impl QuadratureSpec {
    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        QuadratureSpec {
            method: QuadratureMethod::StratifiedMonteCarlo { samples },
            seed,
        }
    }

    pub fn midpoint(depth: usize) -> Self {
        QuadratureSpec {
            method: QuadratureMethod::RecursiveSubdivisionMidpoint { depth },
            seed: 0,
        }
    }
}

/// A quadrature value with its error estimate: the standard error for Monte
/// Carlo, a Richardson difference for the midpoint rule.
#[derive(Debug, Clone, Copy)]
pub struct QuadEstimate {
    pub value: Complex64,
    pub std_error: f64,
    /// Number of integrand evaluations actually performed.
    pub evaluations: usize,
}

/// Simplex content from the Gram determinant of edge vectors; independent of
/// the bordered squared-distance route used by the mesh module.
fn gram_content(points: &[Vec<f64>]) -> f64 {
    let j = points.len() - 1;
    if j == 0 {
        return 1.0;
    }
    let last = &points[j];
    let edges: Vec<Vec<f64>> = points[..j]
        .iter()
        .map(|p| p.iter().zip(last.iter()).map(|(a, b)| a - b).collect())
        .collect();
    let mut g = [[0.0f64; 6]; 6];
    for r in 0..j {
        for c in 0..j {
            g[r][c] = dot(&edges[r], &edges[c]);
        }
    }
    let det = det_small(&mut g, j).max(0.0);
    det.sqrt() / [1.0, 1.0, 2.0, 6.0][j]
}

/// Midpoint split of a simplex into `2^j` equal-content children.
fn subdivide(points: &[Vec<f64>]) -> Vec<Vec<Vec<f64>>> {
    let j = points.len() - 1;
    let mid = |a: &[f64], b: &[f64]| -> Vec<f64> {
        a.iter().zip(b.iter()).map(|(x, y)| 0.5 * (x + y)).collect()
    };
    match j {
        1 => {
            let m = mid(&points[0], &points[1]);
            vec![
                vec![points[0].clone(), m.clone()],
                vec![m, points[1].clone()],
            ]
        }
        2 => {
            let (a, b, c) = (&points[0], &points[1], &points[2]);
            let ab = mid(a, b);
            let bc = mid(b, c);
            let ca = mid(c, a);
            vec![
                vec![a.clone(), ab.clone(), ca.clone()],
                vec![b.clone(), bc.clone(), ab.clone()],
                vec![c.clone(), ca.clone(), bc.clone()],
                vec![ab, bc, ca],
            ]
        }
        3 => {
            let (a, b, c, d) = (&points[0], &points[1], &points[2], &points[3]);
            let m01 = mid(a, b);
            let m02 = mid(a, c);
            let m03 = mid(a, d);
            let m12 = mid(b, c);
            let m13 = mid(b, d);
            let m23 = mid(c, d);
            // corner tetrahedra plus the inner octahedron split along the
            // m02-m13 diagonal; all eight children have content/8
            vec![
                vec![a.clone(), m01.clone(), m02.clone(), m03.clone()],
                vec![m01.clone(), b.clone(), m12.clone(), m13.clone()],
                vec![m02.clone(), m12.clone(), c.clone(), m23.clone()],
                vec![m03.clone(), m13.clone(), m23.clone(), d.clone()],
                vec![m01.clone(), m02.clone(), m03.clone(), m13.clone()],
                vec![m01.clone(), m02.clone(), m12.clone(), m13.clone()],
                vec![m02.clone(), m03.clone(), m13.clone(), m23.clone()],
                vec![m02, m12, m13, m23],
            ]
        }
        _ => vec![points.to_vec()],
    }
}

fn leaves_at_depth(points: &[Vec<f64>], depth: usize) -> Vec<Vec<Vec<f64>>> {
    let mut leaves = vec![points.to_vec()];
    for _ in 0..depth {
        leaves = leaves.iter().flat_map(|l| subdivide(l)).collect();
    }
    leaves
}

#[inline]
fn phase(k: &[f64], x: &[f64]) -> Complex64 {
    let s = dot(k, x);
    let (sin, cos) = s.sin_cos();
    Complex64::new(cos, -sin)
}

/// Estimates the transform integral of `e^{-i k.x}` over one simplex.
///
/// Degrees 1..=3 are supported; the sampled estimate multiplies the mean
/// integrand by the simplex content, so `k = 0` returns the content exactly.
pub fn quad_simplex_ft(points: &[&[f64]], k: &[f64], spec: &QuadratureSpec) -> Result<QuadEstimate> {
    let j = points.len().saturating_sub(1);
    if !(1..=3).contains(&j) {
        return Err(Error::Unsupported(format!(
            "quadrature oracle covers degrees 1..=3, got {j}"
        )));
    }
    let owned: Vec<Vec<f64>> = points.iter().map(|p| p.to_vec()).collect();
    match spec.method {
        QuadratureMethod::StratifiedMonteCarlo { samples } => {
            Ok(mc_simplex(&owned, k, samples.max(1), spec.seed))
        }
        QuadratureMethod::RecursiveSubdivisionMidpoint { depth } => {
            Ok(midpoint_simplex(&owned, k, depth))
        }
    }
}

fn mc_simplex(points: &[Vec<f64>], k: &[f64], samples: usize, seed: u64) -> QuadEstimate {
    let j = points.len() - 1;
    let content = gram_content(points);
    // 64 equal-content strata regardless of degree, one independent
    // substream per stratum; a fixed stratum count keeps the standard error
    // scaling as 1/sqrt(samples).
    let depth = [0, 6, 3, 2][j];
    let leaves = leaves_at_depth(points, depth);
    let strata = leaves.len();
    let per_stratum = samples.div_ceil(strata);
    let dim = points[0].len();

    let results: Vec<(Complex64, f64)> = leaves
        .par_iter()
        .enumerate()
        .map(|(li, leaf)| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, li as u64));
            let mut sum = Complex64::ZERO;
            let mut sum_sq_re = 0.0;
            let mut sum_sq_im = 0.0;
            let mut bary = [0.0f64; 5];
            let mut x = [0.0f64; 3];
            for _ in 0..per_stratum {
                sample_barycentric(j, &mut rng, &mut bary);
                for a in 0..dim {
                    let mut v = 0.0;
                    for (t, p) in leaf.iter().enumerate() {
                        v += bary[t] * p[a];
                    }
                    x[a] = v;
                }
                let f = phase(k, &x[..dim]);
                sum += f;
                sum_sq_re += f.re * f.re;
                sum_sq_im += f.im * f.im;
            }
            let n = per_stratum as f64;
            let mean = sum / n;
            let var_re = (sum_sq_re / n - mean.re * mean.re).max(0.0);
            let var_im = (sum_sq_im / n - mean.im * mean.im).max(0.0);
            (mean, (var_re + var_im) / n)
        })
        .collect();

    // equal-content strata: estimate is the plain average of stratum means
    let w = content / strata as f64;
    let mut value = Complex64::ZERO;
    let mut var = 0.0;
    for (mean, v) in &results {
        value += w * mean;
        var += w * w * v;
    }
    QuadEstimate {
        value,
        std_error: var.sqrt(),
        evaluations: per_stratum * strata,
    }
}

/// Uniform barycentric coordinates via sorted uniform spacings.
#[inline]
fn sample_barycentric(j: usize, rng: &mut ChaCha8Rng, out: &mut [f64; 5]) {
    match j {
        1 => {
            let u = rng.gen::<f64>();
            out[0] = u;
            out[1] = 1.0 - u;
        }
        2 => {
            let mut u = rng.gen::<f64>();
            let mut v = rng.gen::<f64>();
            if u > v {
                std::mem::swap(&mut u, &mut v);
            }
            out[0] = u;
            out[1] = v - u;
            out[2] = 1.0 - v;
        }
        _ => {
            let mut u = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
            u.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            out[0] = u[0];
            out[1] = u[1] - u[0];
            out[2] = u[2] - u[1];
            out[3] = 1.0 - u[2];
        }
    }
}

fn midpoint_simplex(points: &[Vec<f64>], k: &[f64], depth: usize) -> QuadEstimate {
    let eval = |d: usize| -> (Complex64, usize) {
        let leaves = leaves_at_depth(points, d);
        let dim = points[0].len();
        let mut total = Complex64::ZERO;
        for leaf in &leaves {
            let content = gram_content(leaf);
            let mut centroid = [0.0f64; 3];
            for a in 0..dim {
                centroid[a] = leaf.iter().map(|p| p[a]).sum::<f64>() / leaf.len() as f64;
            }
            total += content * phase(k, &centroid[..dim]);
        }
        (total, leaves.len())
    };
    let (value, evals) = eval(depth);
    let std_error = if depth == 0 {
        f64::INFINITY
    } else {
        // midpoint converges at second order: Richardson error estimate
        let (coarse, _) = eval(depth - 1);
        (value - coarse).norm() / 3.0
    };
    QuadEstimate {
        value,
        std_error,
        evaluations: evals,
    }
}

/// Estimates the transform of the uniform solid enclosed by a watertight
/// boundary: stratified Monte Carlo over the bounding box with parity
/// inside-tests.
pub fn quad_polytope_ft(
    boundary: &BoundaryMesh,
    k: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadEstimate> {
    let samples = match spec.method {
        QuadratureMethod::StratifiedMonteCarlo { samples } => samples.max(1),
        QuadratureMethod::RecursiveSubdivisionMidpoint { .. } => {
            return Err(Error::Unsupported(
                "polytope quadrature is Monte Carlo only".into(),
            ))
        }
    };
    let dim = boundary.mesh().dim();
    let query = MeshQuery::for_boundary(boundary, mix_seed(spec.seed, 0x7261_79));
    // exact mesh bounds, not the query grid's padded copy
    let bbox = boundary.mesh().bbox();
    let volume: f64 = (0..dim).map(|a| bbox.extent(a)).product();

    // jittered-grid stratification: one sample per cell of an s^d lattice
    let s = (samples as f64).powf(1.0 / dim as f64).ceil() as usize;
    let strata: usize = s.pow(dim as u32);
    let results: Vec<(f64, f64, usize)> = (0..strata)
        .into_par_iter()
        .map_init(QueryScratch::new, |scratch, idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(spec.seed, idx as u64));
            let mut cell = [0usize; 3];
            let mut rest = idx;
            for a in (0..dim).rev() {
                cell[a] = rest % s;
                rest /= s;
            }
            let mut x = [0.0f64; 3];
            for a in 0..dim {
                let u = rng.gen::<f64>();
                x[a] = bbox.lo[a] + bbox.extent(a) * ((cell[a] as f64 + u) / s as f64);
            }
            if query.is_inside(&x[..dim], scratch) {
                let f = phase(k, &x[..dim]);
                (f.re, f.im, 1)
            } else {
                (0.0, 0.0, 0)
            }
        })
        .collect();

    let n = strata as f64;
    let sum_re: f64 = results.iter().map(|r| r.0).sum();
    let sum_im: f64 = results.iter().map(|r| r.1).sum();
    let hits: usize = results.iter().map(|r| r.2).sum();
    let mean = Complex64::new(sum_re / n, sum_im / n);
    let var_re: f64 = results
        .iter()
        .map(|r| (r.0 - mean.re).powi(2))
        .sum::<f64>()
        / n;
    let var_im: f64 = results
        .iter()
        .map(|r| (r.1 - mean.im).powi(2))
        .sum::<f64>()
        / n;
    let _ = hits;
    Ok(QuadEstimate {
        value: volume * mean,
        std_error: volume * ((var_re + var_im) / n).sqrt(),
        evaluations: strata,
    })
}
