use std::path::{Path, PathBuf};

use serde::Deserialize;
use sonosim::beamsim::{default_grid, AcousticConfig, DEFAULT_IMAGE_SHAPE};
use sonosim::datagen::SimulationConfig;
use sonosim::phantom::PhantomConfig;
use sonosim::{Error, ImageGrid, Result};

/// Contents of a `--config` TOML file. Every key is optional; command-line
/// flags take precedence over values found here.
///
/// ```toml
/// seed = 7
/// out = "data/sim"
///
/// [phantom]
/// scatterer_density = 4.0
///
/// [acoustic]
/// center_frequency = 3.5e6
///
/// [grid]
/// height = 512
/// width = 340
///
/// [simulate]
/// count = 700
/// ```
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub phantom: PhantomConfig,
    pub acoustic: AcousticConfig,
    pub grid: GridSection,
    pub simulate: SimulateSection,
    pub ingest: IngestSection,
}

/// Output image size; the grid always spans the phantom's imaged region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub height: usize,
    pub width: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        let (height, width) = DEFAULT_IMAGE_SHAPE;
        GridSection { height, width }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    pub count: Option<usize>,
    pub dump_rf: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestSection {
    pub train: Option<usize>,
    pub val: Option<usize>,
    pub test: Option<usize>,
    pub subsample_train: Option<usize>,
    pub mask_suffix: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
    }

    /// Phantom, probe and grid settings, validated.
    pub fn simulation(&self) -> Result<SimulationConfig> {
        self.phantom.validate()?;
        let grid = if self.grid == GridSection::default() {
            default_grid(&self.phantom)
        } else {
            let p = &self.phantom;
            ImageGrid::spanning(
                self.grid.height,
                self.grid.width,
                (p.standoff, p.standoff + p.axial_extent),
                (-p.lateral_extent / 2.0, p.lateral_extent / 2.0),
            )?
        };
        let cfg = SimulationConfig { phantom: self.phantom.clone(), acoustic: self.acoustic.clone(), grid };
        cfg.validate()?;
        Ok(cfg)
    }
}
