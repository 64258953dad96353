//! Flat-file formats: instance CSV, solution CSV and `key=value` sidecars.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{OkpError, Result};
use crate::types::{Bounds, Instance, Item, Solution};

pub const INSTANCE_HEADER: [&str; 2] = ["value", "weight"];
pub const SOLUTION_HEADER: [&str; 4] = ["index", "value", "weight", "x"];

/// Writes `value,weight` rows in arrival order.
pub fn write_instance<W: Write>(out: W, instance: &Instance) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(INSTANCE_HEADER)?;
    for item in instance.items() {
        w.write_record([item.value.to_string(), item.weight.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn parse_field(raw: &str, column: &str, row: usize) -> Result<f64> {
    raw.trim()
        .parse::<f64>()
        .map_err(|_| OkpError::Data(format!("row {row}: cannot parse {column} from {raw:?}")))
}

/// Reads an instance CSV. Rows are numbered from 1 after the header.
///
/// Bounds are not stored in the CSV; pass them explicitly or use the observed
/// range via [`Instance::with_observed_bounds`].
pub fn read_instance<R: Read>(input: R, bounds: Option<Bounds>) -> Result<Instance> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = r.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| OkpError::Data(format!("instance CSV lacks a `{name}` column")))
    };
    let (vi, wi) = (col("value")?, col("weight")?);
    let mut items = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let row = k + 1;
        let rec = rec?;
        let value = parse_field(rec.get(vi).unwrap_or(""), "value", row)?;
        let weight = parse_field(rec.get(wi).unwrap_or(""), "weight", row)?;
        items.push(Item::new(value, weight).map_err(|e| OkpError::Data(format!("row {row}: {e}")))?);
    }
    Instance::new(items, bounds)
}

pub fn write_solution<W: Write>(out: W, instance: &Instance, solution: &Solution) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SOLUTION_HEADER)?;
    for (i, (item, x)) in instance.items().iter().zip(&solution.decisions).enumerate() {
        w.write_record([i.to_string(), item.value.to_string(), item.weight.to_string(), x.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Path of the metadata sidecar for an instance file: `<file>.meta`.
pub fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

/// Ordered `key=value` metadata.
pub type Meta = BTreeMap<String, String>;

pub fn write_meta<W: Write>(mut out: W, meta: &Meta) -> Result<()> {
    for (k, v) in meta {
        writeln!(out, "{k}={v}")?;
    }
    Ok(())
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_meta(text: &str) -> Result<Meta> {
    let mut meta = Meta::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| OkpError::Data(format!("metadata line {}: expected key=value", i + 1)))?;
        meta.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(meta)
}

/// Bounds recorded in a sidecar (`lo`, `hi`), if both are present.
pub fn meta_bounds(meta: &Meta) -> Result<Option<Bounds>> {
    match (meta.get("lo"), meta.get("hi")) {
        (Some(lo), Some(hi)) => {
            let lo = parse_field(lo, "lo", 0)?;
            let hi = parse_field(hi, "hi", 0)?;
            Ok(Some(Bounds::new(lo, hi)?))
        }
        _ => Ok(None),
    }
}

/// Loads an instance file. Bounds come from `bounds` if given, else from the
/// sidecar, else from the observed value range.
pub fn load_instance(path: &Path, bounds: Option<Bounds>) -> Result<Instance> {
    let instance = read_instance(fs::File::open(path)?, None)?;
    let bounds = match bounds {
        Some(b) => Some(b),
        None => {
            let meta = meta_path(path);
            if meta.exists() {
                meta_bounds(&parse_meta(&fs::read_to_string(meta)?)?)?
            } else {
                None
            }
        }
    };
    match bounds {
        Some(b) => instance.with_bounds(Some(b)),
        None => Instance::with_observed_bounds(instance.items().to_vec()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_round_trip() {
        let inst = Instance::from_pairs(&[(5.0, 0.5), (1.0 / 3.0, 1e-3)], None).unwrap();
        let mut buf = Vec::new();
        write_instance(&mut buf, &inst).unwrap();
        assert!(buf.starts_with(b"value,weight\n"));
        let back = read_instance(buf.as_slice(), None).unwrap();
        assert_eq!(back.items(), inst.items());
    }

    #[test]
    fn malformed_row_is_numbered() {
        let err = read_instance("value,weight\n1,0.5\nabc,0.1\n".as_bytes(), None).unwrap_err();
        assert!(matches!(&err, OkpError::Data(m) if m.contains("row 2")), "{err}");
    }

    #[test]
    fn meta_round_trip() {
        let mut meta = Meta::new();
        meta.insert("kind".into(), "powerlaw".into());
        meta.insert("lo".into(), "1".into());
        meta.insert("hi".into(), "1000".into());
        let mut buf = Vec::new();
        write_meta(&mut buf, &meta).unwrap();
        let back = parse_meta(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, meta);
        assert_eq!(meta_bounds(&back).unwrap(), Some(Bounds::new(1.0, 1000.0).unwrap()));
    }
}
