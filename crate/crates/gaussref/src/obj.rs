//! Wavefront OBJ meshes: `v x y z` and triangular `f i j k` records with
//! 1-based indices. Other records are ignored; faces with more than three
//! corners are rejected.

use std::fmt::Write as _;
use std::path::Path;

use gaussref_core::math::Vec3;
use gaussref_core::mesh::Mesh;

use crate::error::{Error, Result};
use crate::fsutil::{read_text, write_atomic};

pub fn load_mesh(path: &Path) -> Result<Mesh> {
    parse_obj(&read_text(path)?, path)
}

/// Parses OBJ text; `path` only labels errors.
pub fn parse_obj(text: &str, path: &Path) -> Result<Mesh> {
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("v") => {
                let mut p = [0.0; 3];
                for (axis, slot) in p.iter_mut().enumerate() {
                    let tok = fields.next().ok_or_else(|| {
                        Error::parse(path, line_no, format!("vertex is missing coordinate {}", axis + 1))
                    })?;
                    *slot = tok
                        .parse()
                        .map_err(|_| Error::parse(path, line_no, format!("malformed number `{tok}`")))?;
                }
                vertices.push(p);
            }
            Some("f") => {
                let corners: Vec<&str> = fields.collect();
                if corners.len() != 3 {
                    return Err(Error::parse(
                        path,
                        line_no,
                        format!("only triangles are supported, face has {} corners", corners.len()),
                    ));
                }
                let mut face = [0usize; 3];
                for (slot, tok) in face.iter_mut().zip(corners) {
                    let idx_text = tok.split('/').next().unwrap_or("");
                    let idx: i64 = idx_text
                        .parse()
                        .map_err(|_| Error::parse(path, line_no, format!("malformed face index `{tok}`")))?;
                    let count = vertices.len();
                    let resolved = if idx > 0 {
                        idx - 1
                    } else if idx < 0 {
                        count as i64 + idx
                    } else {
                        -1
                    };
                    if resolved < 0 {
                        return Err(Error::FaceIndex {
                            path: path.to_path_buf(),
                            line: line_no,
                            index: idx,
                            count,
                        });
                    }
                    *slot = resolved as usize;
                }
                faces.push(face);
            }
            _ => {}
        }
    }
    // forward references are legal in OBJ, so ranges are checked at the end
    let count = vertices.len();
    if let Some(line) = first_out_of_range(text, count) {
        return Err(Error::FaceIndex {
            path: path.to_path_buf(),
            line: line.0,
            index: line.1,
            count,
        });
    }
    Mesh::new(vertices, faces).map_err(|source| Error::Mesh {
        path: path.to_path_buf(),
        source,
    })
}

fn first_out_of_range(text: &str, count: usize) -> Option<(usize, i64)> {
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut fields = line.split_whitespace();
        if fields.next() != Some("f") {
            continue;
        }
        for tok in fields {
            if let Ok(idx) = tok.split('/').next().unwrap_or("").parse::<i64>() {
                if idx > count as i64 {
                    return Some((n + 1, idx));
                }
            }
        }
    }
    None
}

/// OBJ text for a mesh. Coordinates use the shortest representation that
/// reads back to the same `f64`.
pub fn format_obj(mesh: &Mesh) -> String {
    let mut out = String::with_capacity(32 * (mesh.vertex_count() + mesh.face_count()));
    for v in mesh.vertices() {
        let _ = writeln!(out, "v {} {} {}", v[0], v[1], v[2]);
    }
    for f in mesh.faces() {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

pub fn save_mesh(mesh: &Mesh, path: &Path) -> Result<()> {
    write_atomic(path, format_obj(mesh).as_bytes())
}

/// Region mask sidecar: one vertex index per line, `#` comments allowed.
pub fn load_mask(path: &Path) -> Result<Vec<usize>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        out.push(
            line.parse()
                .map_err(|_| Error::parse(path, n + 1, format!("malformed vertex index `{line}`")))?,
        );
    }
    Ok(out)
}

/// Applies a region mask file to a mesh.
pub fn apply_mask(mesh: Mesh, indices: &[usize], path: &Path) -> Result<Mesh> {
    mesh.with_region_indices(indices).map_err(|source| Error::Mesh {
        path: path.to_path_buf(),
        source,
    })
}
