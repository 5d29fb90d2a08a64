//! OFF triangle meshes and JSON polylines.

use std::io::{BufRead, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Cells, Mesh};
use crate::geometry::AmbientSoliton;
use crate::{Error, Result};

/// Reads an ASCII OFF file as a triangle mesh in Gaussian `R³`.
pub fn read_off<R: BufRead>(reader: R) -> Result<Mesh> {
    let mut tokens = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let content = line.split('#').next().unwrap_or("");
        tokens.extend(content.split_whitespace().map(str::to_owned));
    }
    let mut it = tokens.into_iter();
    let header = it.next().ok_or_else(|| Error::Parse("empty OFF file".into()))?;
    let mut pending = None;
    if header != "OFF" {
        match header.strip_prefix("OFF") {
            Some(rest) if rest.parse::<usize>().is_ok() => pending = Some(rest.to_owned()),
            _ => return Err(Error::Parse(format!("expected OFF header, found {header:?}"))),
        }
    }
    let mut next = |what: &str| -> Result<String> {
        pending
            .take()
            .or_else(|| it.next())
            .ok_or_else(|| Error::Parse(format!("unexpected end of file reading {what}")))
    };
    let int = |s: String| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad integer {s:?}")));
    let nv = int(next("vertex count")?)?;
    let nf = int(next("face count")?)?;
    let _edges = int(next("edge count")?)?;
    let mut coords = Vec::with_capacity(3 * nv);
    for _ in 0..3 * nv {
        let s = next("vertex")?;
        coords.push(s.parse::<f64>().map_err(|_| Error::Parse(format!("bad coordinate {s:?}")))?);
    }
    let mut tris = Vec::with_capacity(nf);
    for f in 0..nf {
        let k = int(next("face")?)?;
        if k != 3 {
            return Err(Error::Parse(format!("face {f} has {k} vertices; only triangles are supported")));
        }
        let a = int(next("face")?)?;
        let b = int(next("face")?)?;
        let c = int(next("face")?)?;
        tris.push([a, b, c]);
    }
    Mesh::new(AmbientSoliton::Gaussian { p: 3 }, coords, Cells::Triangles(tris), None)
}

/// Writes a triangle mesh as ASCII OFF. Coordinates use shortest round-trip
/// formatting, so reading the file back reproduces them bit for bit.
pub fn write_off<W: Write>(mesh: &Mesh, mut w: W) -> Result<()> {
    if mesh.dim() != 2 {
        return Err(Error::Unsupported("OFF output needs a triangle mesh".into()));
    }
    writeln!(w, "OFF")?;
    writeln!(w, "{} {} 0", mesh.num_vertices(), mesh.num_elements())?;
    for i in 0..mesh.num_vertices() {
        let x = mesh.vertex(i);
        writeln!(w, "{:?} {:?} {:?}", x[0], x[1], x[2])?;
    }
    for t in mesh.triangles() {
        writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct PolylineFile {
    n: usize,
    closed: bool,
    vertices: Vec<[f64; 2]>,
}

/// Reads `{"n": 1, "closed": bool, "vertices": [[x, y], ...]}`.
pub fn read_polyline_json<R: Read>(reader: R) -> Result<Mesh> {
    let file: PolylineFile = serde_json::from_reader(reader)?;
    if file.n != 1 {
        return Err(Error::Parse(format!("polyline files need n = 1, got {}", file.n)));
    }
    let nv = file.vertices.len();
    if nv < 2 || (file.closed && nv < 3) {
        return Err(Error::InvalidMesh(format!("polyline has too few vertices ({nv})")));
    }
    let mut edges: Vec<[usize; 2]> = (0..nv - 1).map(|i| [i, i + 1]).collect();
    if file.closed {
        edges.push([nv - 1, 0]);
    }
    let coords = file.vertices.iter().flatten().copied().collect();
    Mesh::new(AmbientSoliton::Gaussian { p: 2 }, coords, Cells::Edges(edges), None)
}

/// Writes a polyline whose edges run through consecutive vertices.
pub fn write_polyline_json<W: Write>(mesh: &Mesh, w: W) -> Result<()> {
    let edges = mesh.edges();
    if mesh.dim() != 1 {
        return Err(Error::Unsupported("polyline output needs a 1-dimensional mesh".into()));
    }
    let nv = mesh.num_vertices();
    let consecutive = edges.iter().enumerate().all(|(i, e)| *e == [i, (i + 1) % nv]);
    let closed = edges.len() == nv;
    if !consecutive || !(closed || edges.len() == nv - 1) {
        return Err(Error::Unsupported("polyline output needs consecutively numbered vertices".into()));
    }
    let file = PolylineFile {
        n: 1,
        closed,
        vertices: (0..nv).map(|i| [mesh.vertex(i)[0], mesh.vertex(i)[1]]).collect(),
    };
    serde_json::to_writer(w, &file)?;
    Ok(())
}

/// Reads `.off` or `.json` by extension.
pub fn read_mesh_file(path: &Path) -> Result<Mesh> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    match path.extension().and_then(|e| e.to_str()) {
        Some("off") | Some("OFF") => read_off(reader),
        Some("json") => read_polyline_json(reader),
        _ => Err(Error::Parse(format!(
            "unrecognized mesh file extension: {}",
            path.display()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CatalogShape;
    use crate::mesh::sample_shape;

    #[test]
    fn off_round_trip_is_exact() {
        let shape = CatalogShape::round_sphere(2, vec![0.1, 0.2, 0.3], 1.7).unwrap();
        let m = sample_shape(&shape, 500, None).unwrap();
        let mut buf = Vec::new();
        write_off(&m, &mut buf).unwrap();
        let back = read_off(buf.as_slice()).unwrap();
        assert_eq!(back.coords(), m.coords());
        assert_eq!(back.triangles(), m.triangles());
    }

    #[test]
    fn off_with_comments_and_errors() {
        let text = "OFF # header\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
        let m = read_off(text.as_bytes()).unwrap();
        assert_eq!(m.num_vertices(), 3);
        assert!(read_off("PLY\n".as_bytes()).is_err());
        assert!(read_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n4 0 1 2 2\n".as_bytes()).is_err());
        assert!(read_off("OFF\n3 1 0\n0 0 0\n1 0 0\n".as_bytes()).is_err());
    }

    #[test]
    fn polyline_round_trip() {
        let shape = CatalogShape::round_sphere(1, vec![0.0, 0.0], 2f64.sqrt()).unwrap();
        let m = sample_shape(&shape, 64, None).unwrap();
        let mut buf = Vec::new();
        write_polyline_json(&m, &mut buf).unwrap();
        let back = read_polyline_json(buf.as_slice()).unwrap();
        assert_eq!(back.coords(), m.coords());
        assert!(back.is_closed());
        let open = r#"{"n":1,"closed":false,"vertices":[[0,0],[1,0],[2,0]]}"#;
        let o = read_polyline_json(open.as_bytes()).unwrap();
        assert!(!o.is_closed());
        assert!(read_polyline_json(r#"{"n":2,"closed":false,"vertices":[]}"#.as_bytes()).is_err());
    }
}
