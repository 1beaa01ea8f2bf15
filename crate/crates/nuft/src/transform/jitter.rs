//! Vertex jitter.
//!
//! The closed-form kernels divide by differences of per-vertex phase dots,
//! so geometry aligned with a frequency direction hits removable
//! singularities. A minor seeded random perturbation of the vertex
//! coordinates, applied exactly once before any frequency is evaluated,
//! moves every configuration off the singular set.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::mesh::SimplexMesh;

/// How the zero-frequency mode is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DcPolicy {
    /// Exact limit: total mass for meshes, signed volume for solids.
    Analytic,
    /// Evaluate the kernel at a seeded near-zero frequency instead.
    Jittered,
}

/// Jitter magnitude, seed and zero-frequency policy for one transform run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JitterConfig {
    /// Relative magnitude as a fraction of the bounding-box diagonal.
    pub eps: f64,
    pub seed: u64,
    pub dc_policy: DcPolicy,
}

impl Default for JitterConfig {
    fn default() -> Self {
        JitterConfig {
            eps: 1e-6,
            seed: 0,
            dc_policy: DcPolicy::Analytic,
        }
    }
}

impl JitterConfig {
    pub fn new(eps: f64, seed: u64) -> Self {
        JitterConfig {
            eps,
            seed,
            dc_policy: DcPolicy::Analytic,
        }
    }

    pub fn with_dc_policy(mut self, policy: DcPolicy) -> Self {
        self.dc_policy = policy;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Perturbs every vertex coordinate by a uniform offset of magnitude at most
/// `eps` times the bounding-box diagonal. Deterministic for a fixed seed;
/// `eps = 0` returns the mesh unchanged.
pub fn jitter_vertices(mesh: &SimplexMesh, config: &JitterConfig) -> SimplexMesh {
    if config.eps == 0.0 || mesh.vertex_count() == 0 {
        return mesh.clone();
    }
    let scale = config.eps * mesh.bbox().diagonal().max(f64::MIN_POSITIVE);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let dim = mesh.dim();
    let mut vertices = mesh.vertices_flat().to_vec();
    for v in &mut vertices {
        *v += scale * (2.0 * rng.gen::<f64>() - 1.0);
    }
    SimplexMesh::new(
        dim,
        mesh.degree(),
        vertices,
        mesh.elements_flat().to_vec(),
        mesh.densities().to_vec(),
    )
    .expect("jitter preserves mesh structure")
}
