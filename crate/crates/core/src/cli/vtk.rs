//! Legacy ASCII VTK output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::fem::{CoefficientVector, Family};
use crate::mesh::Mesh;

#[derive(Debug, Clone, PartialEq)]
pub enum FieldData {
    Scalar(Vec<f64>),
    Vector(Vec<[f64; 2]>),
}

/// A vertex field; P2 data is reduced to its vertex values.
#[derive(Debug, Clone, PartialEq)]
pub struct VtkField {
    pub name: String,
    pub data: FieldData,
}

impl VtkField {
    pub fn from_coefficients(name: &str, f: &CoefficientVector) -> Self {
        let v = f.vertex_values();
        let data = match f.space().family() {
            Family::P1 => FieldData::Scalar(v.into_iter().map(|x| x[0]).collect()),
            Family::P2Vector => FieldData::Vector(v),
        };
        Self { name: name.to_string(), data }
    }
}

pub fn write_vtk_to<W: Write>(mut w: W, mesh: &Mesh, fields: &[VtkField]) -> std::io::Result<()> {
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "biot")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", mesh.n_vertices())?;
    for [x, y] in mesh.vertices() {
        writeln!(w, "{x} {y} 0")?;
    }
    let nt = mesh.n_triangles();
    writeln!(w, "CELLS {nt} {}", 4 * nt)?;
    for [a, b, c] in mesh.triangles() {
        writeln!(w, "3 {a} {b} {c}")?;
    }
    writeln!(w, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(w, "5")?;
    }
    if !fields.is_empty() {
        writeln!(w, "POINT_DATA {}", mesh.n_vertices())?;
    }
    for f in fields {
        match &f.data {
            FieldData::Scalar(v) => {
                assert_eq!(v.len(), mesh.n_vertices());
                writeln!(w, "SCALARS {} double 1", f.name)?;
                writeln!(w, "LOOKUP_TABLE default")?;
                for x in v {
                    writeln!(w, "{x}")?;
                }
            }
            FieldData::Vector(v) => {
                assert_eq!(v.len(), mesh.n_vertices());
                writeln!(w, "VECTORS {} double", f.name)?;
                for [x, y] in v {
                    writeln!(w, "{x} {y} 0")?;
                }
            }
        }
    }
    w.flush()
}

pub fn write_vtk(path: &Path, mesh: &Mesh, fields: &[VtkField]) -> std::io::Result<()> {
    write_vtk_to(BufWriter::new(File::create(path)?), mesh, fields)
}
