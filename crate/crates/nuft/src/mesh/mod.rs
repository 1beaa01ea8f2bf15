//! Weighted simplex meshes: points, segments, triangles and tetrahedra with
//! one scalar density per element.

mod boundary;
mod io;
mod measure;
mod normalize;

pub use boundary::{validate_boundary, BoundaryMesh, Defect, DefectKind, DefectReport};
pub use io::{load_mesh, load_mesh_with_format, save_mesh, MeshFormat};
pub use measure::{content, distortion_factor, signed_distortion, SimplexMeasure};
pub(crate) use measure::factorial;
pub use normalize::{normalize_to_unit_cell, AffineMap};

use crate::error::{Error, Result};
use crate::geom::Aabb;

/// A homogeneous simplicial complex of degree `j` embedded in `R^d` with a
/// constant signal density per element.
///
/// Degree 0 holds points, 1 segments, 2 triangles, 3 tetrahedra. Vertices are
/// stored flat (`dim` coordinates per vertex), elements as `(degree + 1)`
/// vertex indices each. The mesh is immutable after construction; the
/// modifiers below return new meshes.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexMesh {
    dim: usize,
    degree: usize,
    vertices: Vec<f64>,
    elements: Vec<u32>,
    densities: Vec<f64>,
}

impl SimplexMesh {
    /// Builds a mesh and checks the structural invariants: dimensions in
    /// range, `dim >= degree`, in-range and pairwise-distinct element
    /// indices, finite coordinates and densities, one density per element.
    pub fn new(
        dim: usize,
        degree: usize,
        vertices: Vec<f64>,
        elements: Vec<u32>,
        densities: Vec<f64>,
    ) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidMesh(format!("dimension {dim} not in {{2, 3}}")));
        }
        if degree > 3 {
            return Err(Error::InvalidMesh(format!("degree {degree} not in {{0, 1, 2, 3}}")));
        }
        if dim < degree {
            return Err(Error::InvalidMesh(format!(
                "a {degree}-simplex cannot be embedded in {dim} dimensions"
            )));
        }
        if vertices.len() % dim != 0 {
            return Err(Error::InvalidMesh(format!(
                "vertex buffer length {} is not a multiple of dimension {dim}",
                vertices.len()
            )));
        }
        let arity = degree + 1;
        if elements.len() % arity != 0 {
            return Err(Error::InvalidMesh(format!(
                "element buffer length {} is not a multiple of {arity}",
                elements.len()
            )));
        }
        let vertex_count = vertices.len() / dim;
        let element_count = elements.len() / arity;
        if densities.len() != element_count {
            return Err(Error::InvalidMesh(format!(
                "{} densities for {element_count} elements",
                densities.len()
            )));
        }
        if let Some(bad) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidMesh(format!(
                "non-finite coordinate at vertex {}",
                bad / dim
            )));
        }
        if let Some(bad) = densities.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidMesh(format!("non-finite density at element {bad}")));
        }
        for (n, el) in elements.chunks(arity).enumerate() {
            for (i, &v) in el.iter().enumerate() {
                if v as usize >= vertex_count {
                    return Err(Error::InvalidMesh(format!(
                        "element {n} references vertex {v} of {vertex_count}"
                    )));
                }
                if el[..i].contains(&v) {
                    return Err(Error::InvalidMesh(format!(
                        "element {n} repeats vertex {v}"
                    )));
                }
            }
        }
        Ok(SimplexMesh {
            dim,
            degree,
            vertices,
            elements,
            densities,
        })
    }

    /// Mesh with every density set to 1.
    pub fn with_unit_densities(
        dim: usize,
        degree: usize,
        vertices: Vec<f64>,
        elements: Vec<u32>,
    ) -> Result<Self> {
        let n = elements.len() / (degree + 1);
        Self::new(dim, degree, vertices, elements, vec![1.0; n])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len() / self.dim
    }

    pub fn element_count(&self) -> usize {
        if self.elements.is_empty() {
            0
        } else {
            self.elements.len() / (self.degree + 1)
        }
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    #[inline]
    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.vertices[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn element(&self, n: usize) -> &[u32] {
        let a = self.degree + 1;
        &self.elements[n * a..(n + 1) * a]
    }

    #[inline]
    pub fn density(&self, n: usize) -> f64 {
        self.densities[n]
    }

    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    pub fn vertices_flat(&self) -> &[f64] {
        &self.vertices
    }

    pub fn elements_flat(&self) -> &[u32] {
        &self.elements
    }

    /// Coordinates of one element's vertices, in element order.
    pub fn element_points(&self, n: usize) -> Vec<&[f64]> {
        self.element(n).iter().map(|&v| self.vertex(v as usize)).collect()
    }

    pub fn bbox(&self) -> Aabb {
        let mut b = Aabb::empty(self.dim);
        for i in 0..self.vertex_count() {
            b.include(self.vertex(i));
        }
        b
    }

    /// Content of element `n` (length, area or volume; 1 for points).
    pub fn element_content(&self, n: usize) -> Result<f64> {
        let pts = self.element_points(n);
        content(&pts)
    }

    /// Total signal mass: the sum of density times content over elements.
    /// This is what the zero-frequency Fourier coefficient must equal.
    pub fn total_mass(&self) -> Result<f64> {
        let mut m = 0.0;
        for n in 0..self.element_count() {
            m += self.density(n) * self.element_content(n)?;
        }
        Ok(m)
    }

    /// Number of zero-content elements. Degenerate elements are retained
    /// (they contribute nothing to transforms) but callers may want to warn.
    pub fn degenerate_element_count(&self) -> usize {
        (0..self.element_count())
            .filter(|&n| matches!(self.element_content(n), Ok(c) if c == 0.0))
            .count()
    }

    /// New mesh with all vertices translated by `t`.
    pub fn translated(&self, t: &[f64]) -> SimplexMesh {
        let mut out = self.clone();
        for v in out.vertices.chunks_mut(self.dim) {
            for a in 0..self.dim {
                v[a] += t[a];
            }
        }
        out
    }

    /// New mesh with every density multiplied by `c`.
    pub fn density_scaled(&self, c: f64) -> SimplexMesh {
        let mut out = self.clone();
        for d in &mut out.densities {
            *d *= c;
        }
        out
    }

    /// New mesh with densities replaced wholesale.
    pub fn with_densities(&self, densities: Vec<f64>) -> Result<SimplexMesh> {
        SimplexMesh::new(
            self.dim,
            self.degree,
            self.vertices.clone(),
            self.elements.clone(),
            densities,
        )
    }

    /// Concatenation of two meshes of equal dimension and degree.
    pub fn concat(&self, other: &SimplexMesh) -> Result<SimplexMesh> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(Error::InvalidMesh(
                "cannot concatenate meshes of different dimension or degree".into(),
            ));
        }
        let offset = self.vertex_count() as u32;
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        let mut elements = self.elements.clone();
        elements.extend(other.elements.iter().map(|&v| v + offset));
        let mut densities = self.densities.clone();
        densities.extend_from_slice(&other.densities);
        SimplexMesh::new(self.dim, self.degree, vertices, elements, densities)
    }

    /// Element visiting order from a breadth-first traversal of the vertex
    /// adjacency graph (vertices are adjacent when they share an element).
    /// Keeps the per-frequency sigma cache's working set contiguous; ties and
    /// disconnected components fall back to index order.
    pub fn bfs_element_order(&self) -> Vec<u32> {
        let nv = self.vertex_count();
        let ne = self.element_count();
        if ne == 0 {
            return Vec::new();
        }
        // vertex -> incident elements
        let mut incidence = vec![Vec::new(); nv];
        for n in 0..ne {
            for &v in self.element(n) {
                incidence[v as usize].push(n as u32);
            }
        }
        let mut vertex_rank = vec![u32::MAX; nv];
        let mut queue = std::collections::VecDeque::new();
        let mut next_rank = 0u32;
        for start in 0..nv {
            if vertex_rank[start] != u32::MAX {
                continue;
            }
            vertex_rank[start] = next_rank;
            next_rank += 1;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &e in &incidence[v] {
                    for &w in self.element(e as usize) {
                        let w = w as usize;
                        if vertex_rank[w] == u32::MAX {
                            vertex_rank[w] = next_rank;
                            next_rank += 1;
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        let mut order: Vec<u32> = (0..ne as u32).collect();
        let key = |e: u32| {
            self.element(e as usize)
                .iter()
                .map(|&v| vertex_rank[v as usize])
                .min()
                .unwrap_or(u32::MAX)
        };
        order.sort_by_key(|&e| (key(e), e));
        order
        // each element appears exactly once: a permutation of 0..ne
    }

    /// Internal constructor for code paths that already guarantee the
    /// invariants (e.g. contour extraction).
    pub(crate) fn new_unchecked(
        dim: usize,
        degree: usize,
        vertices: Vec<f64>,
        elements: Vec<u32>,
        densities: Vec<f64>,
    ) -> Self {
        SimplexMesh {
            dim,
            degree,
            vertices,
            elements,
            densities,
        }
    }
}
