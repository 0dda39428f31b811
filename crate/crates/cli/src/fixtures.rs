//! Golden files for conformance tests of downstream consumers.
//!
//! Layout under the output directory:
//!
//! ```text
//! preprocess/mirror_pad_in.npy    388x388 f64
//! preprocess/mirror_pad_out.npy   572x572 f64, mirror padding by 92
//! preprocess/image_in.npy         arbitrary-size f64 gray image (0..255)
//! preprocess/image_out.npy        572x572 f64 network input in [0, 1]
//! preprocess/mask_in.npy          u8 {0, 1}, same size as image_in
//! preprocess/mask_out.npy         388x388 u8 {0, 1}
//! preprocess/augment.json         shift/zoom parameters
//! preprocess/augment_image_out.npy, preprocess/augment_mask_out.npy
//! reflect_1d.json                 [1, 2, 3] padded by 1
//! dice/truth/*.png, dice/pred/*.png, dice/cases.json
//! sim8/                           8-image simulated dataset with manifest
//! ```

use std::fs;
use std::path::Path;

use ndarray::Array2;
use ndarray_npy::WritableElement;
use serde_json::json;
use sonosim::datagen::{generate_sim_dataset, splitmix64, write_mask, SimOptions, SimulationConfig};
use sonosim::imgops::{
    dice, mean_std, mirror_pad, mirror_pad_1d, preprocess_pair, Normalization, ShiftZoom, MIRROR_PAD,
    NET_OUTPUT_SIZE,
};
use sonosim::{Error, Result};

pub const SIM_FIXTURE_COUNT: usize = 8;

/// Size of the arbitrary-size preprocessing input.
const IMAGE_IN_SHAPE: (usize, usize) = (301, 217);

const AUGMENT_FIXTURE: ShiftZoom = ShiftZoom { dy: 12.5, dx: -7.25, zoom: 1.05 };

/// Side length of the Dice fixture masks.
const DICE_SIZE: usize = 16;

/// What the fixture writer produced, for printing.
#[derive(Debug, Clone, PartialEq)]
pub struct FixtureSummary {
    pub files: Vec<String>,
    pub dice_summary: String,
}

/// Formats a mean and standard deviation as `m ± s` with two decimals.
pub fn format_mean_std(mean: f64, std: f64) -> String {
    format!("{mean:.2} ± {std:.2}")
}

fn write_npy<A: WritableElement>(path: &Path, arr: &Array2<A>) -> Result<()> {
    ndarray_npy::write_npy(path, arr).map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Deterministic pseudo-random values in `0..256` mixed with a smooth ramp.
fn pattern(shape: (usize, usize), seed: u64) -> Array2<f64> {
    Array2::from_shape_fn(shape, |(r, c)| {
        let noise = splitmix64(seed ^ ((r as u64) << 32 | c as u64)) % 64;
        ((r + 2 * c) % 192) as f64 + noise as f64
    })
}

fn ellipse_mask(shape: (usize, usize)) -> Array2<u8> {
    let (h, w) = shape;
    let (cy, cx) = (h as f64 * 0.45, w as f64 * 0.55);
    let (ry, rx) = (h as f64 * 0.25, w as f64 * 0.2);
    Array2::from_shape_fn(shape, |(r, c)| {
        let q = ((r as f64 - cy) / ry).powi(2) + ((c as f64 - cx) / rx).powi(2);
        u8::from(q <= 1.0)
    })
}

fn block(rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Array2<u8> {
    Array2::from_shape_fn((DICE_SIZE, DICE_SIZE), |(r, c)| u8::from(rows.contains(&r) && cols.contains(&c)))
}

/// The three handmade Dice cases: full overlap, empty prediction and half overlap.
pub fn dice_cases() -> Vec<(&'static str, Array2<u8>, Array2<u8>)> {
    let truth = block(4..12, 4..12);
    vec![
        ("all", truth.clone(), truth.clone()),
        ("none", truth.clone(), Array2::zeros((DICE_SIZE, DICE_SIZE))),
        ("half", truth, block(4..12, 8..16)),
    ]
}

fn write_preprocess(dir: &Path, seed: u64) -> Result<Vec<String>> {
    create_dir(dir)?;
    let square = pattern((NET_OUTPUT_SIZE, NET_OUTPUT_SIZE), seed);
    write_npy(&dir.join("mirror_pad_in.npy"), &square)?;
    write_npy(&dir.join("mirror_pad_out.npy"), &mirror_pad(&square, MIRROR_PAD)?)?;

    let image = pattern(IMAGE_IN_SHAPE, seed.wrapping_add(1));
    let mask = ellipse_mask(IMAGE_IN_SHAPE);
    let pair = preprocess_pair(&image, Some(&mask), Normalization::MinMax)?;
    write_npy(&dir.join("image_in.npy"), &image)?;
    write_npy(&dir.join("mask_in.npy"), &mask)?;
    write_npy(&dir.join("image_out.npy"), &pair.image)?;
    write_npy(&dir.join("mask_out.npy"), pair.mask.as_ref().expect("mask was given"))?;

    write_json(&dir.join("augment.json"), &serde_json::to_value(AUGMENT_FIXTURE)?)?;
    write_npy(&dir.join("augment_image_out.npy"), &AUGMENT_FIXTURE.apply_image(&image))?;
    write_npy(&dir.join("augment_mask_out.npy"), &AUGMENT_FIXTURE.apply_mask(&mask))?;
    Ok([
        "mirror_pad_in.npy",
        "mirror_pad_out.npy",
        "image_in.npy",
        "mask_in.npy",
        "image_out.npy",
        "mask_out.npy",
        "augment.json",
        "augment_image_out.npy",
        "augment_mask_out.npy",
    ]
    .iter()
    .map(|f| format!("preprocess/{f}"))
    .collect())
}

fn write_dice(dir: &Path) -> Result<(Vec<String>, String)> {
    let (truth_dir, pred_dir) = (dir.join("truth"), dir.join("pred"));
    create_dir(&truth_dir)?;
    create_dir(&pred_dir)?;
    let mut files = Vec::new();
    let mut cases = Vec::new();
    let mut scores = Vec::new();
    for (name, truth, pred) in dice_cases() {
        let file = format!("{name}.png");
        write_mask(&truth_dir.join(&file), &truth)?;
        write_mask(&pred_dir.join(&file), &pred)?;
        let d = dice(&truth, &pred)?;
        scores.push(d);
        cases.push(json!({ "name": name, "file": file, "dice": d }));
        files.push(format!("dice/truth/{file}"));
        files.push(format!("dice/pred/{file}"));
    }
    let (mean, std) = mean_std(&scores);
    let summary = format_mean_std(mean, std);
    write_json(&dir.join("cases.json"), &json!({ "cases": cases, "mean": mean, "std": std, "summary": summary }))?;
    files.push("dice/cases.json".into());
    Ok((files, summary))
}

/// Writes every fixture under `out`. Reruns with the same inputs give identical bytes.
pub fn write_fixtures(out: &Path, seed: u64, sim: &SimulationConfig) -> Result<FixtureSummary> {
    create_dir(out)?;
    let mut files = write_preprocess(&out.join("preprocess"), seed)?;

    let input = [1i64, 2, 3];
    let output = mirror_pad_1d(&input, 1)?;
    write_json(&out.join("reflect_1d.json"), &json!({ "input": input, "pad": 1, "output": output }))?;
    files.push("reflect_1d.json".into());

    let (dice_files, dice_summary) = write_dice(&out.join("dice"))?;
    files.extend(dice_files);

    generate_sim_dataset(sim, SIM_FIXTURE_COUNT, seed, &out.join("sim8"), &SimOptions::default())?;
    files.push("sim8/manifest.json".into());
    Ok(FixtureSummary { files, dice_summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dice_cases_score_one_zero_half() {
        let scores: Vec<f64> = dice_cases().iter().map(|(_, t, p)| dice(t, p).unwrap()).collect();
        assert_eq!(scores, vec![1.0, 0.0, 0.5]);
    }

    #[test]
    fn mean_std_format() {
        assert_eq!(format_mean_std(0.5, (1.0f64 / 6.0).sqrt()), "0.50 ± 0.41");
        assert_eq!(format_mean_std(1.0, 0.0), "1.00 ± 0.00");
    }

    #[test]
    fn pattern_spans_byte_range() {
        let p = pattern((40, 40), 0);
        assert!(p.iter().all(|&v| (0.0..256.0).contains(&v)));
        assert!(p.iter().any(|&v| v != p[[0, 0]]));
    }
}
