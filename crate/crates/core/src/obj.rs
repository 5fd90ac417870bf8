//! Minimal Wavefront OBJ reader/writer: `v` and `f` records only.

use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObjMesh {
    pub vertices: Vec<Vec3>,
    /// Triangles (0-based), polygons fan-triangulated.
    pub triangles: Vec<[usize; 3]>,
}

pub fn read_obj(path: &Path) -> Result<ObjMesh> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_obj(&text, path)
}

/// Parses OBJ text; `origin` is only used in error messages.
pub fn parse_obj(text: &str, origin: &Path) -> Result<ObjMesh> {
    let err = |line: usize, msg: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        msg,
    };
    let mut mesh = ObjMesh::default();
    let mut faces: Vec<(usize, Vec<i64>)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords: Vec<f64> = tokens
                    .take(3)
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| err(lineno, format!("bad vertex coordinate: {e}")))?;
                if coords.len() != 3 || !coords.iter().all(|c| c.is_finite()) {
                    return Err(err(lineno, "vertex needs 3 finite coordinates".into()));
                }
                mesh.vertices.push(Vec3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let idx: Vec<i64> = tokens
                    .map(|t| t.split('/').next().unwrap_or("").parse::<i64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| err(lineno, format!("bad face index: {e}")))?;
                if idx.len() < 3 {
                    return Err(err(lineno, "face needs at least 3 vertices".into()));
                }
                faces.push((lineno, idx));
            }
            // Other record types (vn, vt, o, g, s, usemtl, ...) are ignored.
            _ => {}
        }
    }

    let n = mesh.vertices.len() as i64;
    for (lineno, idx) in faces {
        let resolved: Vec<usize> = idx
            .iter()
            .map(|&i| {
                // 1-based; negative indices count back from the end.
                let r = if i > 0 { i - 1 } else { n + i };
                if i == 0 || r < 0 || r >= n {
                    Err(err(lineno, format!("face index {i} out of range")))
                } else {
                    Ok(r as usize)
                }
            })
            .collect::<Result<_>>()?;
        for k in 1..resolved.len() - 1 {
            mesh.triangles.push([resolved[0], resolved[k], resolved[k + 1]]);
        }
    }
    Ok(mesh)
}

pub fn to_obj_string(vertices: &[Vec3], triangles: &[[usize; 3]]) -> String {
    let mut s = String::new();
    for v in vertices {
        let _ = writeln!(s, "v {} {} {}", v.x, v.y, v.z);
    }
    for t in triangles {
        let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    s
}

pub fn write_obj(path: &Path, vertices: &[Vec3], triangles: &[[usize; 3]]) -> Result<()> {
    std::fs::write(path, to_obj_string(vertices, triangles)).map_err(|e| Error::io(path, e))
}
