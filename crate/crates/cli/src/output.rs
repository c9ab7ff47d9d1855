//! Writers for the JSON and CSV artifacts.
//!
//! JSON keys come out in declaration order (structs) or sorted order
//! (`BTreeMap`), floats in shortest round-trip form and non-finite values as
//! `null`, so identical inputs give identical bytes.

use std::fs;
use std::path::Path;

use neumann_core::Mesh;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Failure;

pub fn create_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::input(format!("cannot create {}: {e}", dir.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(Failure::numerical)?;
    bytes.push(b'\n');
    fs::write(path, bytes).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

/// One header row and one record per item.
pub fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<(), Failure> {
    let err = |e: csv::Error| Failure::input(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(err)?;
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.serialize(row).map_err(err)?;
    }
    w.flush()
        .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

/// SHA-256 over the dimension, vertex coordinates and cell indices, hex
/// encoded. Field files carry it to tie them to their mesh.
pub fn mesh_checksum(mesh: &Mesh) -> String {
    let mut hasher = Sha256::new();
    hasher.update((mesh.dim() as u64).to_le_bytes());
    for v in mesh.vertices() {
        hasher.update(v[0].to_le_bytes());
        hasher.update(v[1].to_le_bytes());
    }
    for &c in mesh.cells_flat() {
        hasher.update((c as u64).to_le_bytes());
    }
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// `p` as it appears in file names: `2`, `2.5`, `128`.
pub fn p_label(p: f64) -> String {
    format!("{p}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use neumann_core::geometry::build_mesh;
    use neumann_core::Domain;

    #[test]
    fn checksum_depends_on_the_mesh_only() {
        let d = Domain::interval(0.0, 1.0).unwrap();
        let a = mesh_checksum(&build_mesh(&d, 0.1).unwrap());
        assert_eq!(a, mesh_checksum(&build_mesh(&d, 0.1).unwrap()));
        assert_ne!(a, mesh_checksum(&build_mesh(&d, 0.05).unwrap()));
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn labels() {
        assert_eq!(p_label(2.0), "2");
        assert_eq!(p_label(2.5), "2.5");
        assert_eq!(p_label(128.0), "128");
    }
}
