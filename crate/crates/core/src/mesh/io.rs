//! Plain-text mesh format.
//!
//! ```text
//! # optional comment lines
//! nodes N
//! x y                   (N lines, implicit 0-based ids)
//! triangles M
//! v1 v2 v3 region_tag   (M lines)
//! boundary_edges B
//! v1 v2 boundary_tag    (B lines)
//! ```
//!
//! Coordinates are written with Rust's shortest round-trip float formatting,
//! so `read_mesh(write_mesh(m)) == m` holds exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{BoundaryEdge, Mesh, MeshError};

pub fn write_mesh_to<W: Write>(mesh: &Mesh, mut w: W) -> std::io::Result<()> {
    writeln!(w, "nodes {}", mesh.n_vertices())?;
    for [x, y] in mesh.vertices() {
        writeln!(w, "{x:?} {y:?}")?;
    }
    writeln!(w, "triangles {}", mesh.n_triangles())?;
    for (tri, region) in mesh.triangles().iter().zip(mesh.regions()) {
        writeln!(w, "{} {} {} {}", tri[0], tri[1], tri[2], region)?;
    }
    writeln!(w, "boundary_edges {}", mesh.boundary_edges().len())?;
    for be in mesh.boundary_edges() {
        writeln!(w, "{} {} {}", be.vertices[0], be.vertices[1], be.tag)?;
    }
    w.flush()
}

pub fn write_mesh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<(), MeshError> {
    let path = path.as_ref();
    let io_err = |source| MeshError::Io { path: path.display().to_string(), source };
    let file = File::create(path).map_err(io_err)?;
    write_mesh_to(mesh, BufWriter::new(file)).map_err(io_err)
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<Mesh, MeshError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| MeshError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_mesh(BufReader::new(file))
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line_no: usize,
}

impl<R: BufRead> Lines<R> {
    /// Next non-blank, non-comment line, split into tokens.
    fn next_tokens(&mut self) -> Result<Option<Vec<String>>, MeshError> {
        for line in self.inner.by_ref() {
            self.line_no += 1;
            let line = line.map_err(|e| MeshError::Parse {
                line: self.line_no,
                message: e.to_string(),
            })?;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            return Ok(Some(content.split_whitespace().map(str::to_owned).collect()));
        }
        Ok(None)
    }

    fn err(&self, message: impl Into<String>) -> MeshError {
        MeshError::Parse { line: self.line_no, message: message.into() }
    }

    fn expect_tokens(&mut self, what: &str) -> Result<Vec<String>, MeshError> {
        self.next_tokens()?
            .ok_or_else(|| MeshError::Parse { line: self.line_no + 1, message: format!("unexpected end of file, expected {what}") })
    }

    fn section(&mut self, keyword: &str) -> Result<usize, MeshError> {
        let tokens = self.expect_tokens(keyword)?;
        if tokens.len() != 2 || tokens[0] != keyword {
            return Err(self.err(format!("expected `{keyword} <count>`")));
        }
        tokens[1]
            .parse()
            .map_err(|_| self.err(format!("invalid {keyword} count `{}`", tokens[1])))
    }

    fn record<T: std::str::FromStr>(&mut self, what: &str, arity: usize) -> Result<Vec<T>, MeshError> {
        let tokens = self.expect_tokens(what)?;
        if tokens.len() != arity {
            return Err(self.err(format!("{what} needs {arity} fields, found {}", tokens.len())));
        }
        tokens
            .iter()
            .map(|t| t.parse().map_err(|_| self.err(format!("invalid {what} field `{t}`"))))
            .collect()
    }
}

pub fn read_mesh<R: BufRead>(reader: R) -> Result<Mesh, MeshError> {
    let mut lines = Lines { inner: reader.lines(), line_no: 0 };

    let n_nodes = lines.section("nodes")?;
    let mut vertices = Vec::with_capacity(n_nodes);
    for _ in 0..n_nodes {
        let xy: Vec<f64> = lines.record("node", 2)?;
        if !(xy[0].is_finite() && xy[1].is_finite()) {
            return Err(lines.err("non-finite coordinate"));
        }
        vertices.push([xy[0], xy[1]]);
    }

    let n_tri = lines.section("triangles")?;
    let mut triangles = Vec::with_capacity(n_tri);
    let mut regions = Vec::with_capacity(n_tri);
    for _ in 0..n_tri {
        let rec: Vec<u64> = lines.record("triangle", 4)?;
        triangles.push([rec[0] as usize, rec[1] as usize, rec[2] as usize]);
        regions.push(u32::try_from(rec[3]).map_err(|_| lines.err("region tag out of range"))?);
    }

    let n_be = lines.section("boundary_edges")?;
    let mut boundary = Vec::with_capacity(n_be);
    for _ in 0..n_be {
        let rec: Vec<u64> = lines.record("boundary edge", 3)?;
        boundary.push(BoundaryEdge {
            vertices: [rec[0] as usize, rec[1] as usize],
            tag: u32::try_from(rec[2]).map_err(|_| lines.err("boundary tag out of range"))?,
        });
    }
    if lines.next_tokens()?.is_some() {
        return Err(lines.err("trailing content after boundary_edges section"));
    }

    Mesh::new(vertices, triangles, regions, boundary)
}
