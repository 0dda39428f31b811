use std::fs;
use std::path::{Path, PathBuf};

use image::DynamicImage;
use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{DefectKind, Error, PairDefect, Result};

use super::io::{open_image, write_gray, write_mask};
use super::manifest::{DatasetKind, DatasetManifest, ManifestEntry, MANIFEST_FILE};
use super::sim::IMAGE_DIR;
use super::split::SplitPolicy;

/// File naming of image/mask pairs: `<id>.png` and `<id><mask_suffix>.png`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairNaming {
    pub mask_suffix: String,
    pub extension: String,
}

impl Default for PairNaming {
    fn default() -> Self {
        PairNaming { mask_suffix: "_mask".into(), extension: "png".into() }
    }
}

impl PairNaming {
    fn image_id(&self, path: &Path) -> Option<String> {
        let ext = path.extension()?.to_str()?;
        if !ext.eq_ignore_ascii_case(&self.extension) {
            return None;
        }
        let stem = path.file_stem()?.to_str()?;
        if stem.ends_with(&self.mask_suffix) {
            return None;
        }
        Some(stem.to_string())
    }

    fn mask_path(&self, dir: &Path, id: &str) -> PathBuf {
        dir.join(format!("{id}{}.{}", self.mask_suffix, self.extension))
    }
}

/// Image ids found in `dir`, sorted.
pub fn discover_pairs(dir: &Path, naming: &PairNaming) -> Result<Vec<String>> {
    let mut ids = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() {
            if let Some(id) = naming.image_id(&path) {
                ids.push(id);
            }
        }
    }
    ids.sort();
    Ok(ids)
}

/// Converts a decoded mask to `{0, 1}`, accepting either `{0, 255}` or `{0, 1}`
/// encodings. Colour masks must be gray (equal channels).
fn binary_mask(img: &DynamicImage) -> std::result::Result<Array2<u8>, u8> {
    let rgb = img.to_rgb8();
    let (w, h) = rgb.dimensions();
    let mut max = 0u8;
    for p in rgb.pixels() {
        let [r, g, b] = p.0;
        if r != g || g != b {
            return Err([r, g, b].into_iter().find(|&v| v != 0 && v != 1 && v != 255).unwrap_or(r.max(g).max(b)));
        }
        if r != 0 && r != 1 && r != 255 {
            return Err(r);
        }
        max = max.max(r);
    }
    if max == 255 && rgb.pixels().any(|p| p.0[0] == 1) {
        return Err(1);
    }
    let data = rgb.pixels().map(|p| u8::from(p.0[0] != 0)).collect();
    Ok(Array2::from_shape_vec((h as usize, w as usize), data).expect("dims"))
}

struct LoadedPair {
    image: Array2<u8>,
    mask: Array2<u8>,
}

fn load_pair(dir: &Path, id: &str, naming: &PairNaming) -> std::result::Result<LoadedPair, DefectKind> {
    let mask_path = naming.mask_path(dir, id);
    if !mask_path.is_file() {
        return Err(DefectKind::MissingMask);
    }
    let image_path = dir.join(format!("{id}.{}", naming.extension));
    let image = open_image(&image_path).map_err(|e| DefectKind::Unreadable(e.to_string()))?;
    let mask = open_image(&mask_path).map_err(|e| DefectKind::Unreadable(e.to_string()))?;
    if (image.width(), image.height()) != (mask.width(), mask.height()) {
        return Err(DefectKind::ShapeMismatch {
            image: (image.width(), image.height()),
            mask: (mask.width(), mask.height()),
        });
    }
    let mask = binary_mask(&mask).map_err(|value| DefectKind::NonBinaryMask { value })?;
    let gray = image.to_luma8();
    let (w, h) = gray.dimensions();
    let image = Array2::from_shape_vec((h as usize, w as usize), gray.into_raw()).expect("dims");
    Ok(LoadedPair { image, mask })
}

/// Validates every pair in `dir`, converts images to 8-bit luma and masks to
/// `{0, 255}` under `out_dir/images`, splits by `policy` and writes the manifest.
///
/// All malformed pairs are reported together in [`Error::Ingest`].
pub fn ingest_labeled_corpus(
    dir: &Path,
    kind: DatasetKind,
    policy: &SplitPolicy,
    out_dir: &Path,
    naming: &PairNaming,
) -> Result<DatasetManifest> {
    let ids = discover_pairs(dir, naming)?;
    if ids.is_empty() {
        return Err(Error::config(format!("no image/mask pairs found in {}", dir.display())));
    }
    let labels = policy.assign(ids.len())?;

    let loaded: Vec<std::result::Result<LoadedPair, PairDefect>> = ids
        .par_iter()
        .map(|id| load_pair(dir, id, naming).map_err(|kind| PairDefect { id: id.clone(), kind }))
        .collect();
    let defects: Vec<PairDefect> = loaded.iter().filter_map(|r| r.as_ref().err().cloned()).collect();
    if !defects.is_empty() {
        return Err(Error::Ingest(defects));
    }

    let image_dir = out_dir.join(IMAGE_DIR);
    fs::create_dir_all(&image_dir).map_err(|e| Error::io(&image_dir, e))?;
    ids.par_iter()
        .zip(loaded.par_iter())
        .try_for_each(|(id, pair)| {
            let pair = pair.as_ref().expect("defects handled above");
            write_gray(&image_dir.join(format!("{id}.png")), &pair.image)?;
            write_mask(&image_dir.join(format!("{id}_mask.png")), &pair.mask)
        })?;

    let entries = ids
        .into_iter()
        .zip(labels)
        .map(|(id, split)| ManifestEntry {
            image_path: PathBuf::from(IMAGE_DIR).join(format!("{id}.png")),
            mask_path: PathBuf::from(IMAGE_DIR).join(format!("{id}_mask.png")),
            id,
            split,
            seed: None,
            lesions: None,
        })
        .collect();
    let mut manifest = DatasetManifest {
        dataset_kind: kind,
        master_seed: policy.seed,
        generation_config: None,
        split_policy: policy.clone(),
        subsample: None,
        counts: Default::default(),
        entries,
    };
    manifest.refresh_counts();
    manifest.write(&out_dir.join(MANIFEST_FILE))?;
    Ok(manifest)
}
