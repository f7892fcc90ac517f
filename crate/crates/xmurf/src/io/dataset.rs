//! Dataset CSV: header `id,<feature>...`, optionally `id,label,<feature>...`.

use std::io::{Read, Write};
use std::path::Path;

use xmurf_core::{Dataset, FeatureVector, LabeledDataset};

use super::{fmt_f64, read_bytes, write_bytes};
use crate::error::{Error, Result};

const LABEL: &str = "label";

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).from_reader(r)
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// Parses a table; a `label` column right after `id` is returned separately.
fn parse<R: Read>(r: R) -> Result<(Dataset, Option<Vec<String>>), String> {
    let mut rd = reader(r);
    let header = rd.headers().map_err(|e| e.to_string())?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err("no header".into());
    }
    if &header[0] != "id" {
        return Err(format!("first column must be \"id\", found {:?}", &header[0]));
    }
    let labeled = header.get(1) == Some(LABEL);
    let first = if labeled { 2 } else { 1 };
    let names: Vec<String> = header.iter().skip(first).map(String::from).collect();
    if names.is_empty() {
        return Err("empty schema".into());
    }

    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for (k, rec) in rd.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { expected_len, len, .. } => format!(
                "line {line}: {len} fields, header has {expected_len}"
            ),
            _ => format!("line {line}: {e}"),
        })?;
        ids.push(rec[0].to_string());
        if labeled {
            labels.push(rec[1].to_string());
        }
        let mut row = Vec::with_capacity(names.len());
        for (j, cell) in rec.iter().skip(first).enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| {
                format!("line {line}, column {:?}: {cell:?} is not a number", names[j])
            })?;
            if !v.is_finite() {
                return Err(format!("line {line}, column {:?}: {cell:?} is not finite", names[j]));
            }
            row.push(v);
        }
        rows.push(FeatureVector(row));
    }
    let data = Dataset::new(ids, names, rows).map_err(|e| e.to_string())?;
    Ok((data, labeled.then_some(labels)))
}

pub fn read_dataset<R: Read>(r: R) -> Result<Dataset, String> {
    let (d, labels) = parse(r)?;
    match labels {
        None => Ok(d),
        Some(_) => Err("unexpected label column".into()),
    }
}

/// Dataset or labelled dataset, whichever the header describes.
pub fn load_table(path: &Path) -> Result<(Dataset, Option<Vec<String>>)> {
    parse(&read_bytes(path)?[..]).map_err(|m| Error::input(path, m))
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    read_dataset(&read_bytes(path)?[..]).map_err(|m| Error::input(path, m))
}

pub fn load_labeled(path: &Path) -> Result<LabeledDataset> {
    match load_table(path)? {
        (d, Some(labels)) => Ok(LabeledDataset::new(d, labels)?),
        (_, None) => Err(Error::input(path, "no label column")),
    }
}

fn write_table<W: Write>(w: W, d: &Dataset, labels: Option<&[String]>) -> csv::Result<()> {
    let mut wr = writer(w);
    let mut header = vec!["id"];
    if labels.is_some() {
        header.push(LABEL);
    }
    header.extend(d.feature_names().iter().map(String::as_str));
    wr.write_record(&header)?;
    for i in 0..d.len() {
        let mut rec = vec![d.ids()[i].clone()];
        if let Some(l) = labels {
            rec.push(l[i].clone());
        }
        rec.extend(d.row(i).iter().map(|&v| fmt_f64(v)));
        wr.write_record(&rec)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_dataset<W: Write>(w: W, d: &Dataset) -> csv::Result<()> {
    write_table(w, d, None)
}

pub fn save_dataset(d: &Dataset, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_dataset(&mut buf, d).map_err(|e| Error::input(path, e))?;
    write_bytes(path, &buf)
}

pub fn save_labeled(d: &LabeledDataset, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_table(&mut buf, d.base(), Some(d.labels())).map_err(|e| Error::input(path, e))?;
    write_bytes(path, &buf)
}
