//! Proximity matrix files: CSV with an id header, or raw little-endian `f64`
//! with a JSON sidecar.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use xmurf_core::ProximityMatrix;

use super::{fmt_f64, read_bytes, read_json, write_bytes, write_json};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Raw,
}

impl MatrixFormat {
    /// `.csv` files are CSV, anything else raw.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => MatrixFormat::Csv,
            _ => MatrixFormat::Raw,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    #[serde(rename = "M")]
    m: usize,
    ids: Vec<String>,
}

/// `<path>.json`, describing a raw matrix file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn save_matrix(p: &ProximityMatrix, path: &Path, format: MatrixFormat) -> Result<()> {
    match format {
        MatrixFormat::Raw => {
            let bytes: Vec<u8> = p.values().iter().flat_map(|v| v.to_le_bytes()).collect();
            write_bytes(path, &bytes)?;
            write_json(
                &sidecar_path(path),
                &Sidecar {
                    m: p.len(),
                    ids: p.ids().to_vec(),
                },
            )
        }
        MatrixFormat::Csv => {
            let mut out = String::new();
            let mut wr = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            wr.write_record(p.ids()).map_err(|e| Error::input(path, e))?;
            for i in 0..p.len() {
                wr.write_record(p.row(i).iter().map(|&v| fmt_f64(v)))
                    .map_err(|e| Error::input(path, e))?;
            }
            out.push_str(&String::from_utf8(wr.into_inner().expect("in-memory")).expect("utf-8"));
            write_bytes(path, out.as_bytes())
        }
    }
}

pub fn load_matrix(path: &Path, format: MatrixFormat) -> Result<ProximityMatrix> {
    let (ids, values) = match format {
        MatrixFormat::Raw => {
            let side: Sidecar = read_json(&sidecar_path(path))?;
            if side.ids.len() != side.m {
                return Err(Error::input(path, format!("sidecar lists {} ids for M = {}", side.ids.len(), side.m)));
            }
            let bytes = read_bytes(path)?;
            if bytes.len() != 8 * side.m * side.m {
                return Err(Error::input(
                    path,
                    format!("{} bytes, expected 8 * {}^2", bytes.len(), side.m),
                ));
            }
            let values = bytes
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
                .collect();
            (side.ids, values)
        }
        MatrixFormat::Csv => {
            let bytes = read_bytes(path)?;
            let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(&bytes[..]);
            let ids: Vec<String> = rd
                .headers()
                .map_err(|e| Error::input(path, e))?
                .iter()
                .map(String::from)
                .collect();
            let mut values = Vec::with_capacity(ids.len() * ids.len());
            for (k, rec) in rd.records().enumerate() {
                let rec = rec.map_err(|e| Error::input(path, format!("line {}: {e}", k + 2)))?;
                for cell in rec.iter() {
                    values.push(cell.trim().parse::<f64>().map_err(|_| {
                        Error::input(path, format!("line {}: {cell:?} is not a number", k + 2))
                    })?);
                }
            }
            (ids, values)
        }
    };
    ProximityMatrix::new(ids, values).map_err(|e| Error::input(path, e))
}
