//! On-disk formats: lattice files (coordinates, struts, materials),
//! descriptor files (the five matrices), and CSV/OBJ exports.
//!
//! Both JSON formats round-trip losslessly: floats are written in the
//! shortest form that parses back to the same bits.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::encoder;
use crate::error::{Error, Result};
use crate::matrix::{Entry, ExtendedMatrix, Matrix};
use crate::types::{DescriptorSet, Material, Node, Strut, StrutSection, UnitCell, Vec3};

pub const FORMAT_VERSION: &str = "1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn parse_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Parse { path: path.display().to_string(), msg: e.to_string() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Units {
    pub length: String,
    pub force: String,
}

impl Default for Units {
    fn default() -> Self {
        Units { length: "mm".into(), force: "N".into() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: usize,
    pub pos: [f64; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionRecord {
    Circular { radius: f64 },
    Explicit { area: f64, second_moment: f64, linear_density: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaterialRecord {
    pub e: f64,
    pub rho: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrutRecord {
    pub i: usize,
    pub j: usize,
    pub section: SectionRecord,
    pub material: MaterialRecord,
}

/// A coordinatized lattice on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeFile {
    pub format_version: String,
    #[serde(default)]
    pub units: Units,
    pub obb: [f64; 3],
    pub nodes: Vec<NodeRecord>,
    pub struts: Vec<StrutRecord>,
}

impl LatticeFile {
    pub fn load(path: &Path) -> Result<LatticeFile> {
        let text = std::fs::read_to_string(path)?;
        let file: LatticeFile = serde_json::from_str(&text).map_err(|e| parse_err(path, e))?;
        if file.format_version != FORMAT_VERSION {
            return Err(parse_err(
                path,
                format!("unsupported format version {:?}", file.format_version),
            ));
        }
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| parse_err(path, e))?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    /// Resolve sections and materials into per-strut properties.
    pub fn to_cell(&self) -> Result<UnitCell<f64>> {
        let nodes = self
            .nodes
            .iter()
            .map(|r| Node { id: r.id, position: Vec3(r.pos) })
            .collect();
        let mut struts = Vec::with_capacity(self.struts.len());
        for r in &self.struts {
            let material =
                Material::new(r.material.e, r.material.rho, r.material.nu.unwrap_or(0.3))?;
            let (lam, t, b) = match r.section {
                SectionRecord::Circular { radius } => {
                    encoder::circular_strut_properties(radius, &material)?
                }
                SectionRecord::Explicit { area, second_moment, linear_density } => {
                    StrutSection::Explicit { area, second_moment, linear_density }.validate()?;
                    (linear_density, material.youngs_modulus * area,
                     material.youngs_modulus * second_moment)
                }
            };
            struts.push(Strut::new(r.i, r.j, t, b, lam)?);
        }
        UnitCell::new(nodes, struts, self.obb)
    }

    /// Express a cell as a file. The per-strut properties are already
    /// resolved, so sections come out explicit against a unit-modulus
    /// material: area `t`, second moment `b`.
    pub fn from_cell(cell: &UnitCell<f64>) -> LatticeFile {
        let nodes = cell
            .nodes()
            .iter()
            .map(|nd| NodeRecord { id: nd.id, pos: nd.position.0 })
            .collect();
        let struts = cell
            .struts()
            .iter()
            .map(|s| StrutRecord {
                i: s.i,
                j: s.j,
                section: SectionRecord::Explicit {
                    area: s.stretch_stiffness,
                    second_moment: s.bend_stiffness,
                    linear_density: s.linear_density,
                },
                material: MaterialRecord { e: 1.0, rho: 1.0, nu: None },
            })
            .collect();
        LatticeFile {
            format_version: FORMAT_VERSION.into(),
            units: Units::default(),
            obb: cell.obb_lengths(),
            nodes,
            struts,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<String>,
}

/// The five matrices on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescriptorFile {
    pub format_version: String,
    pub n: usize,
    pub g: Vec<Vec<f64>>,
    pub d: Vec<Vec<f64>>,
    pub kt: Vec<Vec<f64>>,
    pub kb: Vec<Vec<f64>>,
    pub p: Vec<Vec<i32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl DescriptorFile {
    pub fn load(path: &Path) -> Result<DescriptorFile> {
        let text = std::fs::read_to_string(path)?;
        let file: DescriptorFile = serde_json::from_str(&text).map_err(|e| parse_err(path, e))?;
        if file.format_version != FORMAT_VERSION {
            return Err(parse_err(
                path,
                format!("unsupported format version {:?}", file.format_version),
            ));
        }
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| parse_err(path, e))?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn from_descriptors(desc: &DescriptorSet<f64>, fingerprint: Option<String>) -> Self {
        DescriptorFile {
            format_version: FORMAT_VERSION.into(),
            n: desc.n(),
            g: desc.geometry().to_rows(),
            d: desc.density().to_rows(),
            kt: desc.stretching().to_rows(),
            kb: desc.bending().to_rows(),
            p: desc.packing().to_rows(),
            provenance: Some(Provenance { tool_version: TOOL_VERSION.into(), fingerprint }),
        }
    }

    pub fn to_descriptors(&self) -> Result<DescriptorSet<f64>> {
        let check = |name: &str, rows: usize| {
            if rows != self.n {
                Err(Error::CorruptMatrix(format!("{name} has {rows} rows, expected {}", self.n)))
            } else {
                Ok(())
            }
        };
        check("g", self.g.len())?;
        check("d", self.d.len())?;
        check("kt", self.kt.len())?;
        check("kb", self.kb.len())?;
        check("p", self.p.len())?;
        DescriptorSet::new(
            Matrix::from_rows(&self.g)?,
            Matrix::from_rows(&self.d)?,
            Matrix::from_rows(&self.kt)?,
            Matrix::from_rows(&self.kb)?,
            Matrix::from_rows(&self.p)?,
        )
    }
}

fn csv_from_cells(n: usize, cell: impl Fn(usize, usize) -> String) -> String {
    let mut out = String::new();
    out.push_str("node");
    for j in 1..=n {
        out.push(',');
        out.push_str(&j.to_string());
    }
    out.push('\n');
    for i in 1..=n {
        out.push_str(&i.to_string());
        for j in 1..=n {
            out.push(',');
            out.push_str(&cell(i - 1, j - 1));
        }
        out.push('\n');
    }
    out
}

/// CSV with a node-id header row and column.
pub fn csv_matrix(m: &Matrix<f64>) -> String {
    csv_from_cells(m.n(), |i, j| format!("{}", m.get(i, j)))
}

pub fn csv_packing(m: &Matrix<i32>) -> String {
    csv_from_cells(m.n(), |i, j| m.get(i, j).to_string())
}

/// CSV of a coefficient matrix; undefined entries read "omega".
pub fn csv_extended(m: &ExtendedMatrix<f64>) -> String {
    csv_from_cells(m.rows(), |i, j| match m.get(i, j) {
        Entry::Finite(v) => format!("{v}"),
        Entry::Omega => "omega".into(),
    })
}

/// JSON value of a coefficient matrix; undefined entries become the string
/// "omega".
pub fn extended_to_json(m: &ExtendedMatrix<f64>) -> serde_json::Value {
    let rows: Vec<Vec<serde_json::Value>> = m
        .to_rows()
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|e| match e {
                    Entry::Finite(v) => serde_json::json!(v),
                    Entry::Omega => serde_json::Value::String("omega".into()),
                })
                .collect()
        })
        .collect();
    serde_json::json!(rows)
}

/// Wavefront OBJ: one `v` record per node, one `l` record per strut.
pub fn obj_from_cell(cell: &UnitCell<f64>) -> String {
    let mut out = String::new();
    for nd in cell.nodes() {
        out.push_str(&format!(
            "v {} {} {}\n",
            nd.position.axis(0),
            nd.position.axis(1),
            nd.position.axis(2)
        ));
    }
    for s in cell.struts() {
        out.push_str(&format!("l {} {}\n", s.i, s.j));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prefab;

    #[test]
    fn lattice_file_round_trips_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cell.json");
        let mut file = LatticeFile::from_cell(&prefab::fcc(1.0, 1.0, 1.0, 1.0));
        // Awkward floats survive the trip.
        file.nodes[0].pos = [0.1, 1.0 / 3.0, f64::MIN_POSITIVE];
        file.save(&path).unwrap();
        let loaded = LatticeFile::load(&path).unwrap();
        assert_eq!(loaded, file);
        loaded.save(&path).unwrap();
        let text1 = std::fs::read_to_string(&path).unwrap();
        file.save(&path).unwrap();
        let text2 = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text1, text2);
    }

    #[test]
    fn cell_to_file_to_cell_is_identity() {
        let cell = prefab::bcc(1.0, 2.0, 3.0, 4.0);
        let file = LatticeFile::from_cell(&cell);
        let back = file.to_cell().unwrap();
        assert_eq!(back, cell);
    }

    #[test]
    fn circular_sections_resolve() {
        let mut file = LatticeFile::from_cell(&prefab::sc(1.0, 1.0, 1.0, 1.0));
        for s in &mut file.struts {
            s.section = SectionRecord::Circular { radius: 0.05 };
            s.material = MaterialRecord { e: 200.0, rho: 8.0, nu: Some(0.3) };
        }
        let cell = file.to_cell().unwrap();
        let s = &cell.struts()[0];
        let pi = std::f64::consts::PI;
        assert!((s.linear_density - pi * 8.0 * 0.05 * 0.05).abs() < 1e-15);
        assert!((s.stretch_stiffness - pi * 200.0 * 0.05 * 0.05).abs() < 1e-12);
        assert!((s.bend_stiffness - pi * 200.0 * 0.05f64.powi(4) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn descriptor_file_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("desc.json");
        let desc = crate::encoder::encode(
            &prefab::sc(1.0, 1.0, 1.0, 1.0),
            &crate::encoder::EncodeConfig::default(),
        )
        .unwrap();
        let file = DescriptorFile::from_descriptors(&desc, Some("abc".into()));
        file.save(&path).unwrap();
        let loaded = DescriptorFile::load(&path).unwrap();
        assert_eq!(loaded, file);
        assert_eq!(loaded.to_descriptors().unwrap(), desc);
    }

    #[test]
    fn bad_version_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        let mut file = LatticeFile::from_cell(&prefab::sc(1.0, 1.0, 1.0, 1.0));
        file.format_version = "999".into();
        let text = serde_json::to_string(&file).unwrap();
        std::fs::write(&path, text).unwrap();
        assert!(matches!(LatticeFile::load(&path), Err(Error::Parse { .. })));
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("garbage.json");
        std::fs::write(&path, "{ not json").unwrap();
        assert!(matches!(LatticeFile::load(&path), Err(Error::Parse { .. })));
        assert!(matches!(DescriptorFile::load(&path), Err(Error::Parse { .. })));
    }

    #[test]
    fn corrupt_descriptor_shapes_are_rejected() {
        let desc = crate::encoder::encode(
            &prefab::sc(1.0, 1.0, 1.0, 1.0),
            &crate::encoder::EncodeConfig::default(),
        )
        .unwrap();
        let mut file = DescriptorFile::from_descriptors(&desc, None);
        file.g.pop();
        assert!(matches!(file.to_descriptors(), Err(Error::CorruptMatrix(_))));
    }

    #[test]
    fn csv_has_header_and_omega() {
        let m = Matrix::from_rows(&[vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        let csv = csv_matrix(&m);
        assert!(csv.starts_with("node,1,2\n"));
        assert!(csv.contains("1,0,2\n"));
        let ext = m.hadamard_div(&m).unwrap();
        let csv = csv_extended(&ext);
        assert!(csv.contains("omega"));
        assert!(csv.contains("1,omega,1\n"));
    }

    #[test]
    fn obj_lists_vertices_then_lines() {
        let obj = obj_from_cell(&prefab::sc(1.0, 1.0, 1.0, 1.0));
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 8);
        assert_eq!(obj.lines().filter(|l| l.starts_with("l ")).count(), 12);
        assert!(obj.contains("v 0 0 0\n"));
    }
}
