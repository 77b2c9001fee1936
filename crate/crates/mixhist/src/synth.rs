//! Synthetic striped corpus for end-to-end demos and tests.
//!
//! Categories are (base hue x stripe orientation) combinations: stripes of
//! one hue alternate between a bright and a dark band along a fixed
//! direction. Per-image seeded jitter moves the stripe phase and the
//! brightness, so same-hue categories have nearly identical color
//! histograms and only the joint color/orientation descriptor separates
//! all categories.

use std::f64::consts::PI;
use std::io;
use std::path::{Path, PathBuf};

use mixhist_core::db::ManifestEntry;
use mixhist_core::image::hsv_pixel_to_rgb;
use mixhist_core::rng::SplitMix64;
use thiserror::Error;

pub const IMAGE_SIZE: u32 = 64;
pub const BAND_WIDTH: f64 = 8.0;
// Band values sit inside one default value bin each, with jitter small
// enough to stay there: same-hue categories then share one color
// histogram and only the orientation rows tell them apart.
const SATURATION: f64 = 0.9;
const VALUE_HI: f64 = 0.85;
const VALUE_LO: f64 = 0.60;
const VALUE_JITTER: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub categories: usize,
    pub per_category: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self { categories: 4, per_category: 25, seed: 42 }
    }
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("category and image counts must be at least 1")]
    EmptyCorpus,
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cannot encode {path}: {source}")]
    Encode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}

/// The (hue, stripe angle) pair of one category. Hues spread evenly around
/// the wheel; angles spread evenly over the half turn, so with four
/// categories the grid is two hues by two orientations.
pub fn category_params(index: usize, categories: usize) -> (f64, f64) {
    let n_hues = (categories as f64).sqrt().ceil() as usize;
    let n_orients = categories.div_ceil(n_hues);
    let hue_idx = index / n_orients;
    let orient_idx = index % n_orients;
    (hue_idx as f64 / n_hues as f64, orient_idx as f64 * PI / n_orients as f64)
}

pub fn category_label(index: usize, categories: usize) -> String {
    let (hue, angle) = category_params(index, categories);
    format!("hue{:03}-ang{:03}", (hue * 360.0).round() as u32, (angle * 180.0 / PI).round() as u32)
}

/// Renders one striped image. `phase` shifts the stripe pattern along its
/// normal; `brightness` offsets both band values.
pub fn render_stripes(hue: f64, angle: f64, phase: f64, brightness: f64) -> Vec<u8> {
    // Snap the stripe normal onto the axes where the angle is axis-aligned,
    // so axis stripes are exactly constant along the other axis.
    let mut dir_x = angle.cos();
    let mut dir_y = angle.sin();
    if dir_x.abs() < 1e-12 {
        dir_x = 0.0;
    }
    if dir_y.abs() < 1e-12 {
        dir_y = 0.0;
    }
    let size = IMAGE_SIZE as usize;
    let mut bytes = Vec::with_capacity(size * size * 3);
    for y in 0..size {
        for x in 0..size {
            let t = dir_x * x as f64 + dir_y * y as f64 + phase;
            let band = (t / BAND_WIDTH).floor() as i64;
            let base = if band.rem_euclid(2) == 0 { VALUE_HI } else { VALUE_LO };
            let v = (base + brightness).clamp(0.05, 0.98);
            let (r, g, b) = hsv_pixel_to_rgb(hue, SATURATION, v);
            bytes.extend_from_slice(&[r, g, b]);
        }
    }
    bytes
}

/// Writes `categories x per_category` PNGs under `out_dir/images` plus
/// `out_dir/manifest.csv`. Returns the manifest entries with paths
/// resolved against `out_dir`; the manifest file itself holds relative
/// paths so the directory is relocatable. Fully deterministic for a given
/// seed.
pub fn generate(out_dir: &Path, config: &SynthConfig) -> Result<Vec<ManifestEntry>, SynthError> {
    if config.categories == 0 || config.per_category == 0 {
        return Err(SynthError::EmptyCorpus);
    }
    let images_dir = out_dir.join("images");
    std::fs::create_dir_all(&images_dir)
        .map_err(|e| SynthError::Io { path: images_dir.clone(), source: e })?;

    let mut rng = SplitMix64::new(config.seed);
    let mut entries = Vec::with_capacity(config.categories * config.per_category);
    let mut relative = Vec::with_capacity(entries.capacity());
    for c in 0..config.categories {
        let (hue, angle) = category_params(c, config.categories);
        let label = category_label(c, config.categories);
        for i in 0..config.per_category {
            let phase = rng.next_f64() * 2.0 * BAND_WIDTH;
            let brightness = (rng.next_f64() * 2.0 - 1.0) * VALUE_JITTER;
            let pixels = render_stripes(hue, angle, phase, brightness);
            let file_name = format!("{label}-{i:03}.png");
            let path = images_dir.join(&file_name);
            image::save_buffer(
                &path,
                &pixels,
                IMAGE_SIZE,
                IMAGE_SIZE,
                image::ExtendedColorType::Rgb8,
            )
            .map_err(|e| SynthError::Encode { path: path.clone(), source: e })?;
            entries.push(ManifestEntry {
                image_id: format!("{label}-{i:03}"),
                path: path.to_string_lossy().into_owned(),
                category: label.clone(),
            });
            relative.push(ManifestEntry {
                image_id: format!("{label}-{i:03}"),
                path: format!("images/{file_name}"),
                category: label.clone(),
            });
        }
    }
    let manifest_path = out_dir.join("manifest.csv");
    crate::manifest::write_manifest(&manifest_path, &relative)
        .map_err(|e| SynthError::Io { path: manifest_path, source: e })?;
    Ok(entries)
}
