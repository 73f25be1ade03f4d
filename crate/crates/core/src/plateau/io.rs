//! Mesh export and boundary point files.

use std::io::{BufRead, Write};
use std::path::Path;

use nalgebra::Vector3;

use super::mesh::DiskMesh;
use crate::error::{Error, Result};

/// Wavefront OBJ with vertices, parametric coordinates and faces.
pub fn write_obj<W: Write>(mesh: &DiskMesh, mut w: W) -> Result<()> {
    for x in &mesh.x {
        writeln!(w, "v {:.17e} {:.17e} {:.17e}", x[0], x[1], x[2])?;
    }
    for u in &mesh.uv {
        writeln!(w, "vt {:.17e} {:.17e}", u[0], u[1])?;
    }
    for t in &mesh.triangles {
        let [a, b, c] = t.map(|v| v + 1);
        writeln!(w, "f {a}/{a} {b}/{b} {c}/{c}")?;
    }
    Ok(())
}

pub fn save_obj(mesh: &DiskMesh, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_obj(mesh, std::io::BufWriter::new(f))
}

/// Vertex positions of an OBJ file (`v` lines only).
pub fn read_obj_vertices<R: BufRead>(r: R) -> Result<Vec<Vector3<f64>>> {
    let mut out = vec![];
    for line in r.lines() {
        let line = line?;
        if let Some(rest) = line.strip_prefix("v ") {
            out.push(parse_point(rest, &line)?);
        }
    }
    Ok(out)
}

/// One point per line, three numbers separated by whitespace or commas;
/// blank lines and `#` comments are skipped.
pub fn read_points<R: BufRead>(r: R) -> Result<Vec<Vector3<f64>>> {
    let mut out = vec![];
    for line in r.lines() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        out.push(parse_point(body, &line)?);
    }
    Ok(out)
}

fn parse_point(body: &str, line: &str) -> Result<Vector3<f64>> {
    let vals: Vec<f64> = body
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Error::Parse(format!("{e} in line {line:?}")))?;
    if vals.len() != 3 {
        return Err(Error::Parse(format!("expected 3 coordinates in line {line:?}")));
    }
    Ok(Vector3::new(vals[0], vals[1], vals[2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plateau::mesh::generate_disk_mesh;

    #[test]
    fn obj_roundtrip() {
        let m = generate_disk_mesh(2).unwrap();
        let mut buf = vec![];
        write_obj(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 24);
        let v = read_obj_vertices(&buf[..]).unwrap();
        assert_eq!(v, m.x);
    }

    #[test]
    fn points_file() {
        let src = "# closed curve\n1 0 0\n0,1,0\n\n-1 0 0 # left\n0 -1 0\n";
        assert_eq!(read_points(src.as_bytes()).unwrap().len(), 4);
        assert!(read_points("1 2\n".as_bytes()).is_err());
        assert!(read_points("1 2 x\n".as_bytes()).is_err());
    }
}
