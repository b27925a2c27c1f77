use std::fmt::Write as _;
use std::path::Path;

use super::{Point2, TriMesh};
use crate::{Error, Real, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "off" => Some(Self::Off),
            "obj" => Some(Self::Obj),
            _ => None,
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_coord<T: Real>(tok: Option<&str>, line: usize) -> Result<T> {
    let s = tok.ok_or_else(|| parse_err(line, "missing coordinate"))?;
    let x: f64 = s.parse().map_err(|_| parse_err(line, format!("bad number {s:?}")))?;
    Ok(T::lit(x))
}

/// Reads an OFF file; z coordinates are ignored.
pub fn parse_off<T: Real>(text: &str) -> Result<TriMesh<T>> {
    let mut tokens = text.lines().enumerate().flat_map(|(n, l)| {
        l.split('#').next().unwrap_or("").split_whitespace().map(move |t| (n + 1, t))
    });
    let (line, head) = tokens.next().ok_or_else(|| parse_err(1, "empty file"))?;
    if head != "OFF" {
        return Err(parse_err(line, "missing OFF header"));
    }
    let mut next_usize = |what: &str| -> Result<(usize, usize)> {
        let (line, t) = tokens.next().ok_or_else(|| parse_err(0, format!("missing {what}")))?;
        t.parse().map(|v| (line, v)).map_err(|_| parse_err(line, format!("bad {what} {t:?}")))
    };
    let (_, nv) = next_usize("vertex count")?;
    let (_, nf) = next_usize("face count")?;
    let _ = next_usize("edge count")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (_, x) = next_float(&mut tokens)?;
        let (_, y) = next_float(&mut tokens)?;
        let _ = next_float(&mut tokens)?;
        vertices.push(Point2::new(T::lit(x), T::lit(y)));
    }
    let mut tris = Vec::with_capacity(nf);
    for f in 0..nf {
        let (line, c) = tokens.next().ok_or_else(|| parse_err(0, "missing face"))?;
        let count: usize = c.parse().map_err(|_| parse_err(line, "bad face size"))?;
        if count != 3 {
            return Err(Error::NonTriangleFace { face: f, count });
        }
        let mut t = [0usize; 3];
        for slot in &mut t {
            let (line, s) = tokens.next().ok_or_else(|| parse_err(line, "truncated face"))?;
            *slot = s.parse().map_err(|_| parse_err(line, format!("bad index {s:?}")))?;
        }
        tris.push(t);
    }
    TriMesh::new(vertices, tris)
}

fn next_float<'a>(tokens: &mut impl Iterator<Item = (usize, &'a str)>) -> Result<(usize, f64)> {
    let (line, t) = tokens.next().ok_or_else(|| parse_err(0, "missing coordinate"))?;
    t.parse().map(|v| (line, v)).map_err(|_| parse_err(line, format!("bad number {t:?}")))
}

/// Reads the `v` and `f` records of an OBJ file.
pub fn parse_obj<T: Real>(text: &str) -> Result<TriMesh<T>> {
    let mut vertices = Vec::new();
    let mut tris = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let l = raw.split('#').next().unwrap_or("");
        let mut it = l.split_whitespace();
        match it.next() {
            Some("v") => {
                let x = parse_coord::<T>(it.next(), line)?;
                let y = parse_coord::<T>(it.next(), line)?;
                vertices.push(Point2::new(x, y));
            }
            Some("f") => {
                let idx: Vec<&str> = it.collect();
                if idx.len() != 3 {
                    return Err(Error::NonTriangleFace { face: tris.len(), count: idx.len() });
                }
                let mut t = [0usize; 3];
                for (slot, s) in t.iter_mut().zip(idx) {
                    let first = s.split('/').next().unwrap_or("");
                    let i: i64 = first.parse().map_err(|_| parse_err(line, format!("bad index {s:?}")))?;
                    let resolved = if i > 0 { i - 1 } else { vertices.len() as i64 + i };
                    if resolved < 0 {
                        return Err(parse_err(line, format!("index {i} out of range")));
                    }
                    *slot = resolved as usize;
                }
                tris.push(t);
            }
            _ => {}
        }
    }
    TriMesh::new(vertices, tris)
}

pub fn read_mesh<T: Real>(path: &Path, format: Option<MeshFormat>) -> Result<TriMesh<T>> {
    let text = std::fs::read_to_string(path)?;
    match format.or_else(|| MeshFormat::from_path(path)) {
        Some(MeshFormat::Obj) => parse_obj(&text),
        Some(MeshFormat::Off) => parse_off(&text),
        None => Err(Error::InvalidParameter(format!(
            "cannot infer mesh format of {}",
            path.display()
        ))),
    }
}

pub fn write_off<T: Real>(mesh: &TriMesh<T>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "OFF\n{} {} 0", mesh.num_vertices(), mesh.num_triangles());
    for p in mesh.vertices() {
        let _ = writeln!(s, "{} {} 0", p.x.as_f64(), p.y.as_f64());
    }
    for t in mesh.triangles() {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    s
}

pub fn write_obj<T: Real>(mesh: &TriMesh<T>) -> String {
    let mut s = String::new();
    for p in mesh.vertices() {
        let _ = writeln!(s, "v {} {} 0", p.x.as_f64(), p.y.as_f64());
    }
    for t in mesh.triangles() {
        let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: &str = "OFF\n# unit square fan\n5 4 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n0.5 0.5 0\n3 0 1 4\n3 1 2 4\n3 2 3 4\n3 3 0 4\n";

    #[test]
    fn off_round_trip() {
        let m: TriMesh<f64> = parse_off(SQUARE).unwrap();
        assert_eq!(m.num_vertices(), 5);
        let again: TriMesh<f64> = parse_off(&write_off(&m)).unwrap();
        assert_eq!(again.triangles(), m.triangles());
        let obj: TriMesh<f64> = parse_obj(&write_obj(&m)).unwrap();
        assert_eq!(obj.triangles(), m.triangles());
    }

    #[test]
    fn rejects_quads() {
        let text = "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        assert!(matches!(parse_off::<f64>(text), Err(Error::NonTriangleFace { face: 0, count: 4 })));
        let obj = "v 0 0\nv 1 0\nv 1 1\nv 0 1\nf 1 2 3 4\n";
        assert!(matches!(parse_obj::<f64>(obj), Err(Error::NonTriangleFace { .. })));
    }

    #[test]
    fn obj_slashes_and_negative_indices() {
        let obj = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 0.5 0.5 0\nvt 0 0\nf 1/1 2/1 5/1\nf 2 3 -1\nf 3 4 5\nf 4 1 5\n";
        let m: TriMesh<f64> = parse_obj(obj).unwrap();
        assert_eq!(m.num_triangles(), 4);
    }

    #[test]
    fn parse_errors_carry_line() {
        let bad = "OFF\n3 1 0\n0 0 0\n1 x 0\n";
        assert!(matches!(parse_off::<f64>(bad), Err(Error::Parse { line: 4, .. })));
    }
}
