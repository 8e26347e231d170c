//! Output files are assembled in memory and written together with a manifest
//! recording their checksums.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// `x` with 17 significant digits; non-finite values and gaps stay empty.
pub fn num(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.16e}"),
        _ => String::new(),
    }
}

pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

pub fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut b = serde_json::to_vec_pretty(v)?;
    b.push(b'\n');
    Ok(b)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStatus {
    pub name: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunStatus {
    pub fn from_result<T>(name: impl Into<String>, r: &Result<T>) -> Self {
        RunStatus { name: name.into(), ok: r.is_ok(), error: r.as_ref().err().map(|e| e.to_string()) }
    }
}

/// Everything one command produces.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub files: Vec<(String, Vec<u8>)>,
    pub runs: Vec<RunStatus>,
}

impl Artifacts {
    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn failed(&self) -> usize {
        self.runs.iter().filter(|r| !r.ok).count()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub command: &'a str,
    pub version: &'a str,
    pub scenario_hash: &'a str,
    pub scenario: serde_json::Value,
    pub wall_clock_seconds: f64,
    pub runs: &'a [RunStatus],
    pub outputs: Vec<OutputFile>,
}

/// Writes the artifacts and `<command>_manifest.json` into `dir`.
pub fn write_all(
    dir: &Path,
    command: &str,
    scenario_json: &str,
    scenario_hash: &str,
    wall_clock_seconds: f64,
    art: &Artifacts,
) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut outputs = Vec::with_capacity(art.files.len());
    for (name, bytes) in &art.files {
        std::fs::write(dir.join(name), bytes)?;
        outputs.push(OutputFile { file: name.clone(), sha256: hex::encode(Sha256::digest(bytes)), bytes: bytes.len() });
    }
    let m = Manifest {
        command,
        version: env!("CARGO_PKG_VERSION"),
        scenario_hash,
        scenario: serde_json::from_str(scenario_json)?,
        wall_clock_seconds,
        runs: &art.runs,
        outputs,
    };
    let path = dir.join(format!("{command}_manifest.json"));
    std::fs::write(&path, json_bytes(&m)?)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_seventeen_digits() {
        let x = 0.1 + 0.2;
        assert_eq!(num(Some(x)).parse::<f64>().unwrap(), x);
        assert_eq!(num(None), "");
        assert_eq!(num(Some(f64::NAN)), "");
    }

    #[test]
    fn csv_uses_lf() {
        let b = csv_bytes(&["a", "b"], &[vec!["1".into(), "2".into()]]).unwrap();
        assert_eq!(b, b"a,b\n1,2\n");
    }
}
