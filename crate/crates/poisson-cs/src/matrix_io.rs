//! Self-describing JSON container for sensing matrices.
//!
//! The file stores the scaled Bernoulli matrix `Φ̃` and its parameter `p`;
//! the measurement matrix `Φ` is rebuilt from them on load. Values are
//! written in shortest round-trip form, so save/load is exact.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use poisson_cs_core::sensing::build_phi;
use poisson_cs_core::{Matrix, RipMatrix, SensingMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, Error, Result};

pub const FORMAT: &str = "poisson-cs-matrix";
pub const VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct MatrixFile {
    format: String,
    version: u32,
    rows: usize,
    cols: usize,
    p: f64,
    /// Row-major entries of `Φ̃`.
    data: Vec<f64>,
}

pub fn to_json(phi: &SensingMatrix) -> Result<String> {
    let src = phi.source();
    let file = MatrixFile {
        format: FORMAT.to_string(),
        version: VERSION,
        rows: src.entries().rows(),
        cols: src.entries().cols(),
        p: src.p(),
        data: src.entries().as_slice().to_vec(),
    };
    Ok(serde_json::to_string(&file)?)
}

pub fn from_json(text: &str) -> Result<SensingMatrix> {
    let file: MatrixFile = serde_json::from_str(text)?;
    decode(file)
}

fn decode(file: MatrixFile) -> Result<SensingMatrix> {
    if file.format != FORMAT {
        return Err(Error::MatrixFormat(format!("unknown format tag {:?}", file.format)));
    }
    if file.version != VERSION {
        return Err(Error::MatrixFormat(format!("unsupported version {}", file.version)));
    }
    if file.rows.checked_mul(file.cols) != Some(file.data.len()) {
        return Err(Error::MatrixFormat(format!(
            "{}x{} header but {} values",
            file.rows,
            file.cols,
            file.data.len()
        )));
    }
    let entries = Matrix::from_row_major(file.rows, file.cols, file.data)?;
    Ok(build_phi(RipMatrix::from_entries(entries, file.p)?))
}

pub fn save(phi: &SensingMatrix, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    w.write_all(to_json(phi)?.as_bytes()).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

pub fn load(path: &Path) -> Result<SensingMatrix> {
    let r = BufReader::new(File::open(path).map_err(io_err(path))?);
    decode(serde_json::from_reader(r)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use poisson_cs_core::sensing::sample_rip_matrix;

    #[test]
    fn round_trip_is_exact() {
        for p in [0.5, 0.3, 0.85] {
            let phi = build_phi(sample_rip_matrix(7, 13, p, 21).unwrap());
            let back = from_json(&to_json(&phi).unwrap()).unwrap();
            assert_eq!(back, phi);
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("phi.json");
        let phi = build_phi(sample_rip_matrix(4, 6, 0.5, 1).unwrap());
        save(&phi, &path).unwrap();
        assert_eq!(load(&path).unwrap(), phi);
    }

    #[test]
    fn rejects_malformed_files() {
        let phi = build_phi(sample_rip_matrix(3, 4, 0.5, 2).unwrap());
        let good = to_json(&phi).unwrap();
        let wrong_tag = good.replace(FORMAT, "something-else");
        assert!(matches!(from_json(&wrong_tag), Err(Error::MatrixFormat(_))));
        let wrong_dims = good.replace("\"rows\":3", "\"rows\":5");
        assert!(matches!(from_json(&wrong_dims), Err(Error::MatrixFormat(_))));
        let mut v: serde_json::Value = serde_json::from_str(&good).unwrap();
        v["data"][0] = serde_json::json!(0.25);
        assert!(matches!(from_json(&v.to_string()), Err(Error::Core(_))));
    }
}
