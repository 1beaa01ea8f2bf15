//! Watertight oriented boundary meshes.
//!
//! A solid polygon is bounded by a loop of directed segments, a solid
//! polyhedron by a closed triangle surface. Orientation is encoded in each
//! element's vertex order: loops run counter-clockwise and triangle normals
//! follow the right-hand rule, so a valid boundary encloses positive signed
//! volume.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{det2, det3};
use crate::mesh::measure::factorial;
use crate::mesh::SimplexMesh;

/// Kinds of boundary defects, reported with the offending element indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DefectKind {
    /// A codimension-1 face shared by a number of elements other than two.
    NonManifoldFace,
    /// Two neighboring elements induce the same direction on a shared face.
    InconsistentOrientation,
    /// Consistent but inward orientation: enclosed signed volume is negative.
    InwardOrientation,
    /// The mesh degree or dimension does not describe a boundary.
    UnsupportedShape,
}

#[derive(Debug, Clone, Serialize)]
pub struct Defect {
    pub kind: DefectKind,
    pub elements: Vec<usize>,
    pub detail: String,
}

/// JSON-serializable list of everything wrong with a candidate boundary.
#[derive(Debug, Clone, Serialize)]
pub struct DefectReport {
    pub defects: Vec<Defect>,
}

impl fmt::Display for DefectReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.defects.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{:?} {}", d.kind, d.detail)?;
        }
        Ok(())
    }
}

/// A validated watertight, consistently oriented boundary mesh.
///
/// `solid_degree` is the dimension of the enclosed solid: 2 for polygon
/// loops of segments, 3 for triangle surfaces. The enclosed signed volume of
/// a validated boundary is positive; [`BoundaryMesh::reversed`] produces the
/// inward-oriented twin (useful for sign checks, rejected by validation).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMesh {
    mesh: SimplexMesh,
}

impl BoundaryMesh {
    /// Wraps a mesh without validation. The caller asserts watertightness
    /// and consistent orientation (contour extraction guarantees both).
    pub fn new_unchecked(mesh: SimplexMesh) -> Self {
        BoundaryMesh { mesh }
    }

    pub fn mesh(&self) -> &SimplexMesh {
        &self.mesh
    }

    pub fn into_mesh(self) -> SimplexMesh {
        self.mesh
    }

    /// Dimension of the solid this boundary encloses.
    pub fn solid_degree(&self) -> usize {
        self.mesh.degree() + 1
    }

    pub fn element_count(&self) -> usize {
        self.mesh.element_count()
    }

    pub fn is_empty(&self) -> bool {
        self.mesh.is_empty()
    }

    /// Signed volume enclosed by the boundary: the sum over elements of the
    /// signed content of the simplex each element spans with the origin.
    pub fn enclosed_signed_volume(&self) -> f64 {
        enclosed_signed_volume(&self.mesh)
    }

    /// Normalized copy fitting inside `[margin, 1 - margin]^d`, with the
    /// affine map that was applied. Positive isotropic scaling preserves
    /// watertightness and orientation.
    pub fn normalized(&self, margin: f64) -> Result<(BoundaryMesh, crate::mesh::AffineMap)> {
        let (mesh, map) = crate::mesh::normalize_to_unit_cell(&self.mesh, margin)?;
        Ok((BoundaryMesh { mesh }, map))
    }

    /// Copy with every element's orientation reversed.
    pub fn reversed(&self) -> BoundaryMesh {
        let mesh = &self.mesh;
        let arity = mesh.degree() + 1;
        let mut elements = mesh.elements_flat().to_vec();
        for el in elements.chunks_mut(arity) {
            el.swap(0, 1);
        }
        BoundaryMesh {
            mesh: SimplexMesh::new_unchecked(
                mesh.dim(),
                mesh.degree(),
                mesh.vertices_flat().to_vec(),
                elements,
                mesh.densities().to_vec(),
            ),
        }
    }
}

fn enclosed_signed_volume(mesh: &SimplexMesh) -> f64 {
    let j = mesh.degree() + 1;
    let mut total = 0.0;
    for n in 0..mesh.element_count() {
        let pts = mesh.element_points(n);
        let det = match j {
            2 => det2(pts[0], pts[1]),
            _ => det3(pts[0], pts[1], pts[2]),
        };
        total += det / factorial(j);
    }
    total
}

/// Validates that `mesh` is the watertight, consistently outward-oriented
/// boundary of a solid. Segments in the plane must form counter-clockwise
/// loops; triangles in space must be edge-manifold with outward normals.
pub fn validate_boundary(mesh: &SimplexMesh) -> Result<BoundaryMesh> {
    let mut defects = Vec::new();
    let degree = mesh.degree();
    let dim = mesh.dim();
    if !(degree == 1 && dim == 2 || degree == 2 && dim == 3) {
        defects.push(Defect {
            kind: DefectKind::UnsupportedShape,
            elements: vec![],
            detail: format!(
                "boundary must be segments in 2D or triangles in 3D, got degree {degree} in {dim}D"
            ),
        });
        return Err(Error::Boundary(DefectReport { defects }));
    }
    if mesh.is_empty() {
        defects.push(Defect {
            kind: DefectKind::UnsupportedShape,
            elements: vec![],
            detail: "empty boundary mesh".into(),
        });
        return Err(Error::Boundary(DefectReport { defects }));
    }

    let mut nonmanifold: Vec<usize> = Vec::new();
    let mut misoriented: Vec<usize> = Vec::new();
    if degree == 1 {
        // Loop of directed segments: every vertex must touch exactly two
        // segments, once as tail and once as head.
        let mut tails: HashMap<u32, Vec<usize>> = HashMap::new();
        let mut heads: HashMap<u32, Vec<usize>> = HashMap::new();
        for n in 0..mesh.element_count() {
            let el = mesh.element(n);
            tails.entry(el[0]).or_default().push(n);
            heads.entry(el[1]).or_default().push(n);
        }
        let mut vertices: Vec<u32> = tails.keys().chain(heads.keys()).copied().collect();
        vertices.sort_unstable();
        vertices.dedup();
        for v in vertices {
            let out_deg = tails.get(&v).map_or(0, |v| v.len());
            let in_deg = heads.get(&v).map_or(0, |v| v.len());
            if out_deg + in_deg != 2 {
                nonmanifold.extend(tails.get(&v).into_iter().flatten());
                nonmanifold.extend(heads.get(&v).into_iter().flatten());
            } else if out_deg != 1 {
                // two heads or two tails meet: consistent traversal breaks
                misoriented.extend(tails.get(&v).into_iter().flatten());
                misoriented.extend(heads.get(&v).into_iter().flatten());
            }
        }
    } else {
        // Triangle surface: each undirected edge must appear in exactly two
        // triangles (watertight) and with opposite directions (consistent).
        let mut edges: HashMap<(u32, u32), Vec<(usize, bool)>> = HashMap::new();
        for n in 0..mesh.element_count() {
            let el = mesh.element(n);
            for (a, b) in [(el[0], el[1]), (el[1], el[2]), (el[2], el[0])] {
                let forward = a < b;
                let key = if forward { (a, b) } else { (b, a) };
                edges.entry(key).or_default().push((n, forward));
            }
        }
        for (_, users) in edges.iter() {
            if users.len() != 2 {
                nonmanifold.extend(users.iter().map(|u| u.0));
            } else if users[0].1 == users[1].1 {
                misoriented.push(users[0].0);
                misoriented.push(users[1].0);
            }
        }
    }
    nonmanifold.sort_unstable();
    nonmanifold.dedup();
    misoriented.sort_unstable();
    misoriented.dedup();
    if !nonmanifold.is_empty() {
        defects.push(Defect {
            kind: DefectKind::NonManifoldFace,
            detail: format!("{} elements touch non-manifold faces", nonmanifold.len()),
            elements: nonmanifold,
        });
    }
    if !misoriented.is_empty() {
        defects.push(Defect {
            kind: DefectKind::InconsistentOrientation,
            detail: format!("{} elements disagree on shared-face direction", misoriented.len()),
            elements: misoriented,
        });
    }

    if defects.is_empty() {
        let volume = enclosed_signed_volume(mesh);
        if volume <= 0.0 {
            defects.push(Defect {
                kind: DefectKind::InwardOrientation,
                elements: vec![],
                detail: format!("enclosed signed volume {volume:.6e} is not positive"),
            });
        }
    }

    if defects.is_empty() {
        Ok(BoundaryMesh {
            mesh: mesh.clone(),
        })
    } else {
        Err(Error::Boundary(DefectReport { defects }))
    }
}
