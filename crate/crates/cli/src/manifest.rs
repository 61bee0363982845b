use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use momenta_vt::forward::NoiseDescriptor;
use momenta_vt::pipeline::StageRecord;
use momenta_vt::ReconConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHash {
    pub path: PathBuf,
    pub sha256: String,
}

impl FileHash {
    pub fn of(path: &Path) -> Result<Self, CliError> {
        Ok(FileHash {
            path: path.to_path_buf(),
            sha256: sha256_file(path)?,
        })
    }
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Record of one command invocation, written next to its main output.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Option<ReconConfig>,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<FileHash>,
    pub noise: Option<NoiseDescriptor>,
    /// Relative errors keyed by region.
    pub errors: BTreeMap<String, f64>,
    pub stages: Vec<StageRecord>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.into(),
            ..Default::default()
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<(), CliError> {
        self.inputs.push(FileHash::of(path)?);
        Ok(())
    }

    pub fn output(&mut self, path: &Path) -> Result<(), CliError> {
        self.outputs.push(FileHash::of(path)?);
        Ok(())
    }

    /// `<primary>.manifest.json`.
    pub fn path_for(primary: &Path) -> PathBuf {
        let mut name = primary.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).map_err(momenta_vt::Error::from)?;
        fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Ok(serde_json::from_str(&text).map_err(momenta_vt::Error::from)?)
    }

    /// Every referenced output exists and still matches its hash.
    pub fn verify(&self) -> Result<(), CliError> {
        for f in &self.outputs {
            let now = sha256_file(&f.path)?;
            if now != f.sha256 {
                return Err(CliError::Data(format!("{} changed since the run", f.path.display())));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hashes_and_verification() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("a.txt");
        fs::write(&out, "abc").unwrap();
        let mut m = RunManifest::new("test");
        m.output(&out).unwrap();
        assert_eq!(
            m.outputs[0].sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        let path = RunManifest::path_for(&out);
        assert!(path.to_string_lossy().ends_with("a.txt.manifest.json"));
        m.write(&path).unwrap();
        let back = RunManifest::read(&path).unwrap();
        assert_eq!(back, m);
        back.verify().unwrap();
        fs::write(&out, "abd").unwrap();
        assert!(back.verify().is_err());
    }
}
