//! Atomic file output and the front CSV format.
//!
//! A front CSV has a header row naming the twelve norm genes followed by
//! the objectives, then one row per solution. Numbers are written in
//! Rust's shortest round-trip form, so reading a file back reproduces the
//! exact values.

use std::io::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::front::{Front, Solution};
use crate::society::NormVector;
use crate::values::Objective;

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never observe partial content.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::parse(path, e))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path, e))
}

/// CSV text of `rows` under `header`; numbers use `Display`.
pub fn csv_bytes(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    w.into_inner().expect("writing to memory")
}

pub fn front_csv(front: &Front) -> Vec<u8> {
    let header: Vec<String> = front
        .variable_names
        .iter()
        .chain(&front.objective_names)
        .cloned()
        .collect();
    csv_bytes(
        &header,
        front.solutions.iter().map(|s| {
            s.genes
                .iter()
                .chain(&s.objectives)
                .map(|v| v.to_string())
                .collect()
        }),
    )
}

pub fn write_front(path: &Path, front: &Front) -> Result<()> {
    write_atomic(path, &front_csv(front))
}

/// Reads and validates a front CSV: the header must list the twelve norm
/// genes in order followed by at least one known objective, and every cell
/// must be a finite number.
pub fn read_front(path: &Path) -> Result<Front> {
    let bad = |msg: String| Error::parse(path, msg);
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => bad(format!("{other:?}")),
    })?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| bad(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let genes = NormVector::VARIABLE_NAMES.len();
    if header.len() <= genes
        || header[..genes]
            .iter()
            .zip(NormVector::VARIABLE_NAMES)
            .any(|(h, n)| h != n)
    {
        return Err(bad(format!(
            "header must start with {} and name at least one objective",
            NormVector::VARIABLE_NAMES.join(",")
        )));
    }
    for name in &header[genes..] {
        name.parse::<Objective>()
            .map_err(|_| bad(format!("unknown objective column {name:?}")))?;
    }
    let mut front = Front::new(header[..genes].to_vec(), header[genes..].to_vec());
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let values: Vec<f64> = record
            .iter()
            .map(|cell| cell.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<_>>()
            .ok_or_else(|| {
                bad(format!(
                    "row {} holds a non-numeric or non-finite cell",
                    line + 2
                ))
            })?;
        if values.len() != header.len() {
            return Err(bad(format!("row {} has {} cells", line + 2, values.len())));
        }
        front.solutions.push(Solution {
            genes: values[..genes].to_vec(),
            objectives: values[genes..].to_vec(),
        });
    }
    Ok(front)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Front {
        let mut f = Front::new(
            NormVector::VARIABLE_NAMES
                .iter()
                .map(|s| s.to_string())
                .collect(),
            vec!["Equality".into(), "Fairness".into()],
        );
        f.solutions.push(Solution {
            genes: vec![
                0.1,
                0.2,
                1.0 / 3.0,
                0.4,
                0.5,
                0.2,
                0.2,
                0.2,
                0.2,
                0.2,
                0.25,
                0.7,
            ],
            objectives: vec![0.123456789012345, -0.1],
        });
        f
    }

    #[test]
    fn front_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        let f = sample();
        write_front(&path, &f).unwrap();
        assert_eq!(read_front(&path).unwrap(), f);
    }

    #[test]
    fn malformed_fronts_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        let text = String::from_utf8(front_csv(&sample())).unwrap();
        for broken in [
            text.replace("Fairness", "Happiness"),
            text.replace("catch", "katch"),
            text.replace("0.7", "abc"),
            text.replace("0.7", "NaN"),
        ] {
            std::fs::write(&path, broken).unwrap();
            assert!(matches!(read_front(&path), Err(Error::Parse { .. })));
        }
        assert!(matches!(
            read_front(&dir.path().join("none.csv")),
            Err(Error::Io { .. })
        ));
    }
}
