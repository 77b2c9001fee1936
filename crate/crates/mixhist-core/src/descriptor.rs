//! The mix histogram descriptor: uniform HSV color quantization, edge
//! orientation quantization, the joint (orientation, color) probability
//! table, and its flattening into the feature vector.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::gradient::{hsv_gradient, orientation_field};
use crate::image::{rgb_to_hsv, HsvImage, Plane, RgbImage};
use crate::scheme::QuantizationScheme;

/// Tolerance on the unit-sum invariant of histograms and feature vectors.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Uniform color bin index for one HSV triple:
/// `floor(h * n_h) * (n_s * n_v) + floor(s * n_s) * n_v + floor(v * n_v)`,
/// with the upper domain boundary (channel value exactly 1) clamped into
/// the last bin. Inputs outside [0, 1] are rejected.
pub fn quantize_color(
    h: f64,
    s: f64,
    v: f64,
    scheme: &QuantizationScheme,
) -> Result<usize, DescriptorError> {
    for (name, value) in [("h", h), ("s", s), ("v", v)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(DescriptorError::ChannelOutOfRange { channel: name, value });
        }
    }
    Ok(color_bin_unchecked(h, s, v, scheme))
}

#[inline]
pub(crate) fn color_bin_unchecked(h: f64, s: f64, v: f64, scheme: &QuantizationScheme) -> usize {
    let qh = uniform_bin(h, scheme.n_h());
    let qs = uniform_bin(s, scheme.n_s());
    let qv = uniform_bin(v, scheme.n_v());
    qh * (scheme.n_s() * scheme.n_v()) + qs * scheme.n_v() + qv
}

#[inline]
fn uniform_bin(unit_value: f64, bins: usize) -> usize {
    (libm::floor(unit_value * bins as f64) as usize).min(bins - 1)
}

/// Uniform orientation bin index `min(floor(theta * n_q / pi), n_q - 1)`
/// for `theta` in [0, pi]; exactly pi clamps into the last bin. Angles
/// outside that range are rejected.
pub fn quantize_orientation(theta: f64, n_q: usize) -> Result<usize, DescriptorError> {
    if n_q == 0 {
        return Err(DescriptorError::ZeroBins);
    }
    if !(0.0..=PI).contains(&theta) {
        return Err(DescriptorError::AngleOutOfRange { theta });
    }
    Ok(orientation_bin_unchecked(theta, n_q))
}

#[inline]
pub(crate) fn orientation_bin_unchecked(theta: f64, n_q: usize) -> usize {
    (libm::floor(theta * n_q as f64 / PI) as usize).min(n_q - 1)
}

/// Per-pixel color bin indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorMap {
    width: u32,
    height: u32,
    n_colors: usize,
    bins: Vec<usize>,
}

impl ColorMap {
    pub fn new(width: u32, height: u32, n_colors: usize, bins: Vec<usize>) -> Result<Self, DescriptorError> {
        let expected = width as usize * height as usize;
        if bins.len() != expected {
            return Err(DescriptorError::WrongLength { expected, got: bins.len() });
        }
        if let Some(&bad) = bins.iter().find(|&&b| b >= n_colors) {
            return Err(DescriptorError::BinOutOfRange { bin: bad, bins: n_colors });
        }
        Ok(Self { width, height, n_colors, bins })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn n_colors(&self) -> usize {
        self.n_colors
    }

    pub fn bins(&self) -> &[usize] {
        &self.bins
    }
}

/// Per-pixel orientation bin indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientationMap {
    width: u32,
    height: u32,
    n_bins: usize,
    bins: Vec<usize>,
}

impl OrientationMap {
    pub fn new(width: u32, height: u32, n_bins: usize, bins: Vec<usize>) -> Result<Self, DescriptorError> {
        let expected = width as usize * height as usize;
        if bins.len() != expected {
            return Err(DescriptorError::WrongLength { expected, got: bins.len() });
        }
        if let Some(&bad) = bins.iter().find(|&&b| b >= n_bins) {
            return Err(DescriptorError::BinOutOfRange { bin: bad, bins: n_bins });
        }
        Ok(Self { width, height, n_bins, bins })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn bins(&self) -> &[usize] {
        &self.bins
    }
}

/// Joint probability of (orientation bin, color bin) over all pixels:
/// `n_q` rows by `n_c` columns, entries summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MixHistogram {
    scheme: QuantizationScheme,
    values: Vec<f64>,
}

impl MixHistogram {
    pub fn scheme(&self) -> &QuantizationScheme {
        &self.scheme
    }

    pub fn n_rows(&self) -> usize {
        self.scheme.n_q()
    }

    pub fn n_cols(&self) -> usize {
        self.scheme.n_colors()
    }

    /// Cell (orientation row `i`, color column `j`).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_cols() + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Counts (orientation, color) pairs over all pixels and normalizes by the
/// pixel count.
pub fn mix_histogram(
    colors: &ColorMap,
    orients: &OrientationMap,
    scheme: &QuantizationScheme,
) -> Result<MixHistogram, DescriptorError> {
    if colors.width != orients.width || colors.height != orients.height {
        return Err(DescriptorError::MapDimensionMismatch);
    }
    if colors.n_colors != scheme.n_colors() || orients.n_bins != scheme.n_q() {
        return Err(DescriptorError::SchemeMismatch);
    }
    let n_cols = scheme.n_colors();
    let mut counts = vec![0u64; scheme.feature_len()];
    for (&q, &c) in orients.bins.iter().zip(&colors.bins) {
        counts[q * n_cols + c] += 1;
    }
    let total = colors.bins.len() as f64;
    let values = counts.iter().map(|&k| k as f64 / total).collect();
    Ok(MixHistogram { scheme: *scheme, values })
}

/// Row-major flattening of the histogram: row `i` (orientation) times
/// `n_c` plus column `j` (color). The default scheme gives length 640.
pub fn flatten(histogram: MixHistogram) -> FeatureVector {
    FeatureVector { scheme: histogram.scheme, values: histogram.values }
}

/// Flattened mix histogram: nonnegative, unit sum, length
/// `n_q * n_h * n_s * n_v`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    scheme: QuantizationScheme,
    values: Vec<f64>,
}

impl FeatureVector {
    /// Validates length, nonnegativity, finiteness, and unit sum (within
    /// [`NORM_TOLERANCE`]).
    pub fn new(values: Vec<f64>, scheme: QuantizationScheme) -> Result<Self, DescriptorError> {
        if values.len() != scheme.feature_len() {
            return Err(DescriptorError::WrongLength {
                expected: scheme.feature_len(),
                got: values.len(),
            });
        }
        let mut sum = 0.0;
        for &v in &values {
            if !v.is_finite() || v < 0.0 {
                return Err(DescriptorError::BadEntry { value: v });
            }
            sum += v;
        }
        if libm::fabs(sum - 1.0) > NORM_TOLERANCE {
            return Err(DescriptorError::NotNormalized { sum });
        }
        Ok(Self { scheme, values })
    }

    pub fn scheme(&self) -> &QuantizationScheme {
        &self.scheme
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Scheme-independent per-image state: HSV planes plus the per-pixel edge
/// orientation angle. Quantizing against any number of schemes reuses this,
/// which is what makes bin-count sweeps cheap.
#[derive(Debug, Clone)]
pub struct DescriptorBasis {
    hsv: HsvImage,
    theta: Plane,
}

impl DescriptorBasis {
    pub fn compute(img: &RgbImage) -> Self {
        let hsv = rgb_to_hsv(img);
        let field = hsv_gradient(&hsv);
        let theta = orientation_field(&field);
        Self { hsv, theta }
    }

    pub fn width(&self) -> u32 {
        self.hsv.width()
    }

    pub fn height(&self) -> u32 {
        self.hsv.height()
    }

    pub fn hsv(&self) -> &HsvImage {
        &self.hsv
    }

    /// Per-pixel orientation angles in [0, pi).
    pub fn theta(&self) -> &Plane {
        &self.theta
    }

    pub fn color_map(&self, scheme: &QuantizationScheme) -> ColorMap {
        let bins = self
            .hsv
            .h()
            .values()
            .iter()
            .zip(self.hsv.s().values())
            .zip(self.hsv.v().values())
            .map(|((&h, &s), &v)| color_bin_unchecked(h, s, v, scheme))
            .collect();
        ColorMap {
            width: self.width(),
            height: self.height(),
            n_colors: scheme.n_colors(),
            bins,
        }
    }

    pub fn orientation_map(&self, scheme: &QuantizationScheme) -> OrientationMap {
        let n_q = scheme.n_q();
        let bins = self
            .theta
            .values()
            .iter()
            .map(|&t| orientation_bin_unchecked(t, n_q))
            .collect();
        OrientationMap {
            width: self.width(),
            height: self.height(),
            n_bins: n_q,
            bins,
        }
    }

    pub fn feature(&self, scheme: &QuantizationScheme) -> FeatureVector {
        let colors = self.color_map(scheme);
        let orients = self.orientation_map(scheme);
        let histogram = mix_histogram(&colors, &orients, scheme)
            .expect("maps derived from one basis are consistent");
        flatten(histogram)
    }
}

/// Whole descriptor pipeline for one image: HSV conversion, per-channel
/// Sobel partials, structure tensor, per-pixel orientation, quantization,
/// joint histogram, flattening. Deterministic: identical bytes and scheme
/// give a bit-identical vector.
pub fn extract(img: &RgbImage, scheme: &QuantizationScheme) -> FeatureVector {
    DescriptorBasis::compute(img).feature(scheme)
}

#[derive(Debug, Clone, PartialEq)]
pub enum DescriptorError {
    ChannelOutOfRange { channel: &'static str, value: f64 },
    AngleOutOfRange { theta: f64 },
    ZeroBins,
    WrongLength { expected: usize, got: usize },
    BinOutOfRange { bin: usize, bins: usize },
    MapDimensionMismatch,
    SchemeMismatch,
    BadEntry { value: f64 },
    NotNormalized { sum: f64 },
}

impl fmt::Display for DescriptorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DescriptorError::ChannelOutOfRange { channel, value } => {
                write!(f, "channel {channel} = {value} outside [0, 1]")
            }
            DescriptorError::AngleOutOfRange { theta } => {
                write!(f, "orientation {theta} outside [0, pi]")
            }
            DescriptorError::ZeroBins => write!(f, "bin count must be at least 1"),
            DescriptorError::WrongLength { expected, got } => {
                write!(f, "expected {expected} entries, got {got}")
            }
            DescriptorError::BinOutOfRange { bin, bins } => {
                write!(f, "bin index {bin} out of range for {bins} bins")
            }
            DescriptorError::MapDimensionMismatch => {
                write!(f, "color and orientation maps differ in dimensions")
            }
            DescriptorError::SchemeMismatch => write!(f, "maps do not match the scheme"),
            DescriptorError::BadEntry { value } => {
                write!(f, "entry {value} must be finite and nonnegative")
            }
            DescriptorError::NotNormalized { sum } => {
                write!(f, "entries sum to {sum}, expected 1")
            }
        }
    }
}

impl core::error::Error for DescriptorError {}
