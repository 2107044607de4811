use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_VERSION: u32 = 1;

/// What one stage consumed and produced. Artifact keys are paths relative
/// to the working directory; external inputs use `input:<name>` keys.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub config_hash: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub stages: BTreeMap<String, StageRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failed: Option<StageFailure>,
}

impl Default for Manifest {
    fn default() -> Self {
        Manifest {
            version: MANIFEST_VERSION,
            stages: BTreeMap::new(),
            failed: None,
        }
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(hex::encode(h.finalize()))
}

/// A pipeline working directory and its manifest.
#[derive(Debug)]
pub struct Workdir {
    root: PathBuf,
    pub manifest: Manifest,
}

impl Workdir {
    pub fn open(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        let path = root.join(MANIFEST_FILE);
        let manifest = if path.exists() {
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            serde_json::from_str(&text)?
        } else {
            Manifest::default()
        };
        if manifest.version != MANIFEST_VERSION {
            return Err(Error::Consistency(format!(
                "{}: unsupported manifest version {}",
                path.display(),
                manifest.version
            )));
        }
        Ok(Workdir {
            root: root.to_path_buf(),
            manifest,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, artifact: &str) -> PathBuf {
        self.root.join(artifact)
    }

    pub fn save(&self) -> Result<()> {
        let path = self.path(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(&self.manifest)?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    /// Checks that `artifact` exists, is what `producer` last recorded, and
    /// that the producer's own workdir inputs have not changed since.
    /// Returns the artifact's hash.
    pub fn require(&self, artifact: &str, producer: &str) -> Result<String> {
        let missing = || Error::MissingUpstream {
            artifact: artifact.to_string(),
            stage: producer.to_string(),
        };
        let record = self.manifest.stages.get(producer).ok_or_else(missing)?;
        let recorded = record.outputs.get(artifact).ok_or_else(missing)?;
        let path = self.path(artifact);
        if !path.exists() {
            return Err(missing());
        }
        let current = sha256_file(&path)?;
        if &current != recorded {
            return Err(Error::StaleUpstream {
                artifact: artifact.to_string(),
                stage: producer.to_string(),
            });
        }
        for (input, hash) in &record.inputs {
            if input.starts_with("input:") {
                continue;
            }
            let p = self.path(input);
            if !p.exists() || &sha256_file(&p)? != hash {
                return Err(Error::StaleUpstream {
                    artifact: input.clone(),
                    stage: producer.to_string(),
                });
            }
        }
        Ok(current)
    }

    /// Records a finished stage, hashing each listed output.
    pub fn record(
        &mut self,
        stage: &str,
        inputs: BTreeMap<String, String>,
        outputs: &[String],
        config_hash: String,
        seed: u64,
    ) -> Result<()> {
        let outputs = outputs
            .iter()
            .map(|o| Ok((o.clone(), sha256_file(&self.path(o))?)))
            .collect::<Result<_>>()?;
        self.manifest.stages.insert(
            stage.to_string(),
            StageRecord {
                inputs,
                outputs,
                config_hash,
                seed,
            },
        );
        if self.manifest.failed.as_ref().is_some_and(|f| f.stage == stage) {
            self.manifest.failed = None;
        }
        self.save()
    }

    pub fn record_failure(&mut self, stage: &str, error: &Error) -> Result<()> {
        self.manifest.failed = Some(StageFailure {
            stage: stage.to_string(),
            error: error.to_string(),
        });
        self.save()
    }
}
