use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::beamsim::{default_grid, image_phantom, write_rf_dump};
use crate::error::{Error, Result};
use crate::phantom::{generate_phantom, rasterize_mask, LesionSpec, Phantom};

use super::io::{quantize, write_gray, write_mask};
use super::manifest::{DatasetKind, DatasetManifest, ManifestEntry, SimulationConfig, MANIFEST_FILE};
use super::seed::{derive_seed, stream_seed};
use super::split::SplitPolicy;

pub const IMAGE_DIR: &str = "images";

#[derive(Debug, Clone, Default)]
pub struct SimOptions {
    /// Also write each frame's RF lines as `<id>.rf`.
    pub dump_rf: bool,
}

impl Default for SimulationConfig {
    /// Default phantom and probe settings on the default 512x340 grid.
    fn default() -> Self {
        let phantom = crate::phantom::PhantomConfig::default();
        let grid = default_grid(&phantom);
        SimulationConfig { phantom, acoustic: Default::default(), grid }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        self.phantom.validate()?;
        self.acoustic.validate()?;
        self.grid.validate()
    }
}

pub fn sim_id(index: usize) -> String {
    format!("sim_{index:05}")
}

fn simulate_to_disk(
    cfg: &SimulationConfig,
    seed: u64,
    id: &str,
    dir: &Path,
    opts: &SimOptions,
) -> Result<Vec<LesionSpec>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phantom: Phantom<f64> = generate_phantom(&mut rng, &cfg.phantom)?;
    let acq = image_phantom(&phantom, &cfg.acoustic, &cfg.grid)?;
    let mask = rasterize_mask(&phantom.lesions, &cfg.grid);
    write_gray(&dir.join(format!("{id}.png")), &quantize(&acq.image.pixels))?;
    write_mask(&dir.join(format!("{id}_mask.png")), &mask.pixels)?;
    if opts.dump_rf {
        let path = dir.join(format!("{id}.rf"));
        let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        write_rf_dump(&acq.rf, std::io::BufWriter::new(file)).map_err(|e| Error::io(&path, e))?;
    }
    Ok(phantom.lesions)
}

/// Simulates `count` images into `out_dir` and writes `out_dir/manifest.json`.
///
/// Image `i` uses seed `derive_seed(master_seed, i)`, so output bytes do not
/// depend on how the work is scheduled across threads.
pub fn generate_sim_dataset(
    cfg: &SimulationConfig,
    count: usize,
    master_seed: u64,
    out_dir: &Path,
    opts: &SimOptions,
) -> Result<DatasetManifest> {
    cfg.validate()?;
    if count == 0 {
        return Err(Error::config("count must be >= 1"));
    }
    let policy = SplitPolicy::simulated(stream_seed(master_seed, "split"));
    let labels = policy.assign(count)?;

    let image_dir = out_dir.join(IMAGE_DIR);
    fs::create_dir_all(&image_dir).map_err(|e| Error::io(&image_dir, e))?;

    let lesions: Vec<Vec<LesionSpec>> = (0..count)
        .into_par_iter()
        .map(|i| simulate_to_disk(cfg, derive_seed(master_seed, i as u64), &sim_id(i), &image_dir, opts))
        .collect::<Result<_>>()?;

    let entries = lesions
        .into_iter()
        .zip(labels)
        .enumerate()
        .map(|(i, (lesions, split))| {
            let id = sim_id(i);
            ManifestEntry {
                image_path: PathBuf::from(IMAGE_DIR).join(format!("{id}.png")),
                mask_path: PathBuf::from(IMAGE_DIR).join(format!("{id}_mask.png")),
                id,
                split,
                seed: Some(derive_seed(master_seed, i as u64)),
                lesions: Some(lesions),
            }
        })
        .collect();
    let mut manifest = DatasetManifest {
        dataset_kind: DatasetKind::Simulated,
        master_seed,
        generation_config: Some(cfg.clone()),
        split_policy: policy,
        subsample: None,
        counts: Default::default(),
        entries,
    };
    manifest.refresh_counts();
    manifest.write(&out_dir.join(MANIFEST_FILE))?;
    Ok(manifest)
}
