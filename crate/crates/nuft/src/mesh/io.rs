//! Mesh file formats: OFF, Wavefront OBJ (`v`/`p`/`l`/`f` records), XYZ
//! point lists with optional densities, and a weighted JSON format that can
//! express any dimension/degree combination.
//!
//! One file describes one mesh of one degree; mixing `p`, `l` and `f`
//! records in an OBJ is rejected. Polygonal faces are fan-triangulated from
//! their first listed vertex.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::SimplexMesh;

/// Supported mesh file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshFormat {
    Off,
    Obj,
    Xyz,
    Json,
}

impl MeshFormat {
    /// Infers the format from a file extension.
    pub fn from_path(path: &Path) -> Result<MeshFormat> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .as_deref()
        {
            Some("off") => Ok(MeshFormat::Off),
            Some("obj") => Ok(MeshFormat::Obj),
            Some("xyz") => Ok(MeshFormat::Xyz),
            Some("json") => Ok(MeshFormat::Json),
            other => Err(Error::Unsupported(format!(
                "cannot infer mesh format from extension {other:?} of {}",
                path.display()
            ))),
        }
    }
}

impl std::str::FromStr for MeshFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<MeshFormat> {
        match s.to_ascii_lowercase().as_str() {
            "off" => Ok(MeshFormat::Off),
            "obj" => Ok(MeshFormat::Obj),
            "xyz" => Ok(MeshFormat::Xyz),
            "json" => Ok(MeshFormat::Json),
            other => Err(Error::Unsupported(format!("unknown mesh format {other:?}"))),
        }
    }
}

/// Loads a mesh, inferring the format from the file extension.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<SimplexMesh> {
    let path = path.as_ref();
    load_mesh_with_format(path, MeshFormat::from_path(path)?)
}

/// Loads a mesh under an explicit format.
pub fn load_mesh_with_format(path: impl AsRef<Path>, format: MeshFormat) -> Result<SimplexMesh> {
    let path = path.as_ref();
    let name = path.display().to_string();
    let text = fs::read_to_string(path)?;
    match format {
        MeshFormat::Off => parse_off(&name, &text),
        MeshFormat::Obj => parse_obj(&name, &text),
        MeshFormat::Xyz => parse_xyz(&name, &text),
        MeshFormat::Json => parse_json(&name, &text),
    }
}

/// Saves a mesh. OFF requires triangles, OBJ degree <= 2 in 3D, XYZ points;
/// JSON accepts anything.
pub fn save_mesh(path: impl AsRef<Path>, mesh: &SimplexMesh, format: MeshFormat) -> Result<()> {
    let out = match format {
        MeshFormat::Json => to_json(mesh)?,
        MeshFormat::Off => to_off(mesh)?,
        MeshFormat::Obj => to_obj(mesh)?,
        MeshFormat::Xyz => to_xyz(mesh)?,
    };
    fs::write(path, out)?;
    Ok(())
}

fn meaningful_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

fn parse_f64(name: &str, line_no: usize, tok: &str) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| Error::parse(name, line_no, format!("bad number {tok:?}")))
}

fn parse_off(name: &str, text: &str) -> Result<SimplexMesh> {
    let mut lines = meaningful_lines(text);
    let (first_no, first) = lines
        .next()
        .ok_or_else(|| Error::parse(name, 0, "empty OFF file"))?;
    let counts_line = if first.eq_ignore_ascii_case("OFF") {
        lines
            .next()
            .ok_or_else(|| Error::parse(name, first_no, "missing OFF counts line"))?
    } else {
        (first_no, first)
    };
    let counts: Vec<&str> = counts_line.1.split_whitespace().collect();
    if counts.len() < 2 {
        return Err(Error::parse(name, counts_line.0, "expected `nv nf [ne]`"));
    }
    let nv: usize = counts[0]
        .parse()
        .map_err(|_| Error::parse(name, counts_line.0, "bad vertex count"))?;
    let nf: usize = counts[1]
        .parse()
        .map_err(|_| Error::parse(name, counts_line.0, "bad face count"))?;
    if nf == 0 {
        return Err(Error::parse(name, counts_line.0, "OFF file has no faces"));
    }

    let mut vertices = Vec::with_capacity(nv * 3);
    for _ in 0..nv {
        let (no, line) = lines
            .next()
            .ok_or_else(|| Error::parse(name, 0, "unexpected end of vertex list"))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 3 {
            return Err(Error::parse(name, no, "vertex needs 3 coordinates"));
        }
        for t in &toks[..3] {
            vertices.push(parse_f64(name, no, t)?);
        }
    }
    let mut elements = Vec::with_capacity(nf * 3);
    for _ in 0..nf {
        let (no, line) = lines
            .next()
            .ok_or_else(|| Error::parse(name, 0, "unexpected end of face list"))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        let cnt: usize = toks[0]
            .parse()
            .map_err(|_| Error::parse(name, no, "bad face vertex count"))?;
        if cnt < 3 || toks.len() < cnt + 1 {
            return Err(Error::parse(name, no, "face needs at least 3 vertices"));
        }
        let idx: Vec<u32> = toks[1..=cnt]
            .iter()
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| Error::parse(name, no, format!("bad vertex index {t:?}")))
            })
            .collect::<Result<_>>()?;
        fan_triangulate(&idx, &mut elements);
    }
    SimplexMesh::with_unit_densities(3, 2, vertices, elements)
}

/// Splits a polygon into triangles anchored at its first listed vertex.
fn fan_triangulate(idx: &[u32], out: &mut Vec<u32>) {
    for w in 1..idx.len() - 1 {
        out.extend_from_slice(&[idx[0], idx[w], idx[w + 1]]);
    }
}

fn parse_obj(name: &str, text: &str) -> Result<SimplexMesh> {
    let mut vertices: Vec<f64> = Vec::new();
    let mut points: Vec<u32> = Vec::new();
    let mut segments: Vec<u32> = Vec::new();
    let mut triangles: Vec<u32> = Vec::new();

    let resolve = |tok: &str, no: usize, nv: usize| -> Result<u32> {
        let raw = tok.split('/').next().unwrap_or(tok);
        let i: i64 = raw
            .parse()
            .map_err(|_| Error::parse(name, no, format!("bad index {tok:?}")))?;
        let idx = if i < 0 { nv as i64 + i } else { i - 1 };
        if idx < 0 || idx as usize >= nv {
            return Err(Error::parse(name, no, format!("index {i} out of range")));
        }
        Ok(idx as u32)
    };

    for (no, line) in meaningful_lines(text) {
        let mut toks = line.split_whitespace();
        let tag = toks.next().unwrap_or("");
        let rest: Vec<&str> = toks.collect();
        let nv = vertices.len() / 3;
        match tag {
            "v" => {
                if rest.len() < 3 {
                    return Err(Error::parse(name, no, "vertex needs 3 coordinates"));
                }
                for t in &rest[..3] {
                    vertices.push(parse_f64(name, no, t)?);
                }
            }
            "p" => {
                for t in &rest {
                    points.push(resolve(t, no, nv)?);
                }
            }
            "l" => {
                if rest.len() < 2 {
                    return Err(Error::parse(name, no, "polyline needs 2+ vertices"));
                }
                let idx: Vec<u32> = rest
                    .iter()
                    .map(|t| resolve(t, no, nv))
                    .collect::<Result<_>>()?;
                for pair in idx.windows(2) {
                    segments.extend_from_slice(pair);
                }
            }
            "f" => {
                if rest.len() < 3 {
                    return Err(Error::parse(name, no, "face needs 3+ vertices"));
                }
                let idx: Vec<u32> = rest
                    .iter()
                    .map(|t| resolve(t, no, nv))
                    .collect::<Result<_>>()?;
                fan_triangulate(&idx, &mut triangles);
            }
            // normals, texture coords, groups, materials: ignored
            "vn" | "vt" | "g" | "o" | "s" | "usemtl" | "mtllib" => {}
            other => {
                return Err(Error::parse(name, no, format!("unsupported record {other:?}")));
            }
        }
    }
    let kinds = [!points.is_empty(), !segments.is_empty(), !triangles.is_empty()];
    match kinds.iter().filter(|&&k| k).count() {
        0 => Err(Error::parse(name, 0, "OBJ file has no p/l/f records")),
        1 => {
            if !points.is_empty() {
                SimplexMesh::with_unit_densities(3, 0, vertices, points)
            } else if !segments.is_empty() {
                SimplexMesh::with_unit_densities(3, 1, vertices, segments)
            } else {
                SimplexMesh::with_unit_densities(3, 2, vertices, triangles)
            }
        }
        _ => Err(Error::parse(
            name,
            0,
            "mixed element degrees in one file; one mesh per degree",
        )),
    }
}

fn parse_xyz(name: &str, text: &str) -> Result<SimplexMesh> {
    let mut vertices = Vec::new();
    let mut densities = Vec::new();
    let mut columns = None;
    for (no, line) in meaningful_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let cols = *columns.get_or_insert(toks.len());
        if !(3..=4).contains(&cols) {
            return Err(Error::parse(name, no, "expected `x y z [density]`"));
        }
        if toks.len() != cols {
            return Err(Error::parse(name, no, "inconsistent column count"));
        }
        for t in &toks[..3] {
            vertices.push(parse_f64(name, no, t)?);
        }
        densities.push(if cols == 4 {
            parse_f64(name, no, toks[3])?
        } else {
            1.0
        });
    }
    if vertices.is_empty() {
        return Err(Error::parse(name, 0, "empty XYZ file"));
    }
    let n = densities.len();
    SimplexMesh::new(3, 0, vertices, (0..n as u32).collect(), densities)
}

#[derive(Serialize, Deserialize)]
struct JsonMesh {
    dimension: usize,
    degree: usize,
    vertices: Vec<Vec<f64>>,
    elements: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    densities: Option<Vec<f64>>,
}

fn parse_json(name: &str, text: &str) -> Result<SimplexMesh> {
    let raw: JsonMesh = serde_json::from_str(text)
        .map_err(|e| Error::parse(name, e.line(), e.to_string()))?;
    let dim = raw.dimension;
    let mut vertices = Vec::with_capacity(raw.vertices.len() * dim);
    for (i, v) in raw.vertices.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::parse(
                name,
                0,
                format!("vertex {i} has {} coordinates, dimension is {dim}", v.len()),
            ));
        }
        vertices.extend_from_slice(v);
    }
    let arity = raw.degree + 1;
    let mut elements = Vec::with_capacity(raw.elements.len() * arity);
    for (n, el) in raw.elements.iter().enumerate() {
        if el.len() != arity {
            return Err(Error::parse(
                name,
                0,
                format!("element {n} has {} indices, degree {} needs {arity}", el.len(), raw.degree),
            ));
        }
        elements.extend_from_slice(el);
    }
    let densities = raw
        .densities
        .unwrap_or_else(|| vec![1.0; raw.elements.len()]);
    SimplexMesh::new(dim, raw.degree, vertices, elements, densities)
}

fn to_json(mesh: &SimplexMesh) -> Result<String> {
    let dim = mesh.dim();
    let raw = JsonMesh {
        dimension: dim,
        degree: mesh.degree(),
        vertices: (0..mesh.vertex_count())
            .map(|i| mesh.vertex(i).to_vec())
            .collect(),
        elements: (0..mesh.element_count())
            .map(|n| mesh.element(n).to_vec())
            .collect(),
        densities: Some(mesh.densities().to_vec()),
    };
    Ok(serde_json::to_string_pretty(&raw).expect("mesh serializes"))
}

fn to_off(mesh: &SimplexMesh) -> Result<String> {
    if mesh.degree() != 2 || mesh.dim() != 3 {
        return Err(Error::Unsupported(
            "OFF output requires a triangle mesh in 3D".into(),
        ));
    }
    let mut out = String::from("OFF\n");
    out.push_str(&format!("{} {} 0\n", mesh.vertex_count(), mesh.element_count()));
    for i in 0..mesh.vertex_count() {
        let v = mesh.vertex(i);
        out.push_str(&format!("{:?} {:?} {:?}\n", v[0], v[1], v[2]));
    }
    for n in 0..mesh.element_count() {
        let e = mesh.element(n);
        out.push_str(&format!("3 {} {} {}\n", e[0], e[1], e[2]));
    }
    Ok(out)
}

fn to_obj(mesh: &SimplexMesh) -> Result<String> {
    if mesh.dim() != 3 {
        return Err(Error::Unsupported("OBJ output requires 3D coordinates".into()));
    }
    let mut out = String::new();
    for i in 0..mesh.vertex_count() {
        let v = mesh.vertex(i);
        out.push_str(&format!("v {:?} {:?} {:?}\n", v[0], v[1], v[2]));
    }
    for n in 0..mesh.element_count() {
        let e = mesh.element(n);
        match mesh.degree() {
            0 => out.push_str(&format!("p {}\n", e[0] + 1)),
            1 => out.push_str(&format!("l {} {}\n", e[0] + 1, e[1] + 1)),
            2 => out.push_str(&format!("f {} {} {}\n", e[0] + 1, e[1] + 1, e[2] + 1)),
            _ => {
                return Err(Error::Unsupported(
                    "OBJ cannot express tetrahedral meshes".into(),
                ))
            }
        }
    }
    Ok(out)
}

fn to_xyz(mesh: &SimplexMesh) -> Result<String> {
    if mesh.degree() != 0 || mesh.dim() != 3 {
        return Err(Error::Unsupported("XYZ output requires a 3D point mesh".into()));
    }
    let mut out = String::new();
    for n in 0..mesh.element_count() {
        let v = mesh.vertex(mesh.element(n)[0] as usize);
        out.push_str(&format!("{:?} {:?} {:?} {:?}\n", v[0], v[1], v[2], mesh.density(n)));
    }
    Ok(out)
}
