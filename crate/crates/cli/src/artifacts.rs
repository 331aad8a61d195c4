//! Output directory bookkeeping. Every file goes through [`Artifacts`] so the
//! manifest lists all of them with their SHA-256.

use std::fs;
use std::path::{Path, PathBuf};

use helmholtz_lp::experiments::ScanReport;
use helmholtz_lp::lattice::write_fld_to;
use helmholtz_lp::Field;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";
pub const CONFIG: &str = "config.json";

#[derive(Debug, Serialize)]
struct ManifestEntry {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    config_sha256: &'a str,
    files: Vec<ManifestEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("plain data serializes");
    bytes.push(b'\n');
    bytes
}

pub struct Artifacts {
    dir: PathBuf,
    files: Vec<ManifestEntry>,
}

impl Artifacts {
    pub fn create(dir: &Path) -> Result<Artifacts, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Artifacts {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        if self.files.iter().any(|e| e.path == name) {
            return Err(CliError::Config(format!("artifact {name} written twice")));
        }
        fs::write(self.dir.join(name), bytes)?;
        self.files.push(ManifestEntry {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        self.write_bytes(name, &to_json(value))
    }

    pub fn write_field(&mut self, name: &str, field: &Field) -> Result<(), CliError> {
        let mut bytes = Vec::new();
        write_fld_to(field, &mut bytes)?;
        self.write_bytes(name, &bytes)
    }

    /// `<name>.csv` with the rows and `<name>.json` with the fit summary.
    pub fn write_report(&mut self, report: &ScanReport) -> Result<(), CliError> {
        self.write_bytes(&format!("{}.csv", report.name), report.to_csv().as_bytes())?;
        self.write_json(&format!("{}.json", report.name), &report.summary())
    }

    /// Writes the manifest, sorted by path.
    pub fn finish(mut self, command: &str, config_sha256: &str) -> Result<(), CliError> {
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = Manifest {
            command,
            config_sha256,
            files: self.files,
        };
        fs::write(self.dir.join(MANIFEST), to_json(&manifest))?;
        Ok(())
    }
}
