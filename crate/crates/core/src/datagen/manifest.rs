use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::beamsim::AcousticConfig;
use crate::error::{Error, Result};
use crate::grid::ImageGrid;
use crate::phantom::{LesionSpec, PhantomConfig};

use super::split::SplitPolicy;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Simulated,
    Invivo,
    Natural,
}

impl std::str::FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simulated" => Ok(DatasetKind::Simulated),
            "invivo" => Ok(DatasetKind::Invivo),
            "natural" => Ok(DatasetKind::Natural),
            other => Err(Error::config(format!("unknown dataset kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

impl SplitCounts {
    pub fn total(&self) -> usize {
        self.train + self.val + self.test
    }
}

impl std::fmt::Display for SplitCounts {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "train {} / val {} / test {}", self.train, self.val, self.test)
    }
}

/// Everything needed to regenerate a simulated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub phantom: PhantomConfig,
    pub acoustic: AcousticConfig,
    pub grid: ImageGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    /// Relative to the manifest's directory.
    pub image_path: PathBuf,
    pub mask_path: PathBuf,
    pub split: Split,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lesions: Option<Vec<LesionSpec>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsampleRecord {
    pub train: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub dataset_kind: DatasetKind,
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generation_config: Option<SimulationConfig>,
    pub split_policy: SplitPolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsample: Option<SubsampleRecord>,
    pub counts: SplitCounts,
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn refresh_counts(&mut self) {
        let mut c = SplitCounts::default();
        for e in &self.entries {
            match e.split {
                Split::Train => c.train += 1,
                Split::Val => c.val += 1,
                Split::Test => c.test += 1,
            }
        }
        self.counts = c;
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }

    /// Canonical JSON: sorted keys, two-space indent, trailing newline.
    pub fn to_canonical_json(&self) -> Result<String> {
        let value = serde_json::to_value(self)?;
        let mut s = serde_json::to_string_pretty(&value)?;
        s.push('\n');
        Ok(s)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = self.to_canonical_json()?;
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Checks id uniqueness, split counts and that every referenced file exists under `root`.
    pub fn verify(&self, root: &Path) -> Result<()> {
        let mut ids: Vec<&str> = self.entries.iter().map(|e| e.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::config(format!("duplicate entry id {:?}", w[0])));
        }
        let mut recount = self.clone();
        recount.refresh_counts();
        if recount.counts != self.counts {
            return Err(Error::config(format!(
                "manifest counts {} disagree with entries {}",
                self.counts, recount.counts
            )));
        }
        for e in &self.entries {
            for p in [&e.image_path, &e.mask_path] {
                let full = root.join(p);
                if !full.is_file() {
                    return Err(Error::io(
                        full,
                        std::io::Error::new(std::io::ErrorKind::NotFound, "referenced file missing"),
                    ));
                }
            }
        }
        Ok(())
    }
}
