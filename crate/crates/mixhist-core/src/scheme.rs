//! Bin-count configuration for the descriptor.

use core::fmt;

/// Per-channel bin counts for HSV color quantization plus the edge
/// orientation bin count. Dimensionality of the final feature vector is
/// `n_q * n_h * n_s * n_v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuantizationScheme {
    n_h: u16,
    n_s: u16,
    n_v: u16,
    n_q: u16,
}

/// The default configuration: 10 hue x 4 saturation x 4 value bins
/// (160 colors) and 4 orientation bins, for a 640-entry feature vector.
impl Default for QuantizationScheme {
    fn default() -> Self {
        Self { n_h: 10, n_s: 4, n_v: 4, n_q: 4 }
    }
}

impl QuantizationScheme {
    pub fn new(n_h: u16, n_s: u16, n_v: u16, n_q: u16) -> Result<Self, SchemeError> {
        if n_h == 0 || n_s == 0 || n_v == 0 || n_q == 0 {
            return Err(SchemeError::ZeroBinCount);
        }
        Ok(Self { n_h, n_s, n_v, n_q })
    }

    pub fn n_h(&self) -> usize {
        self.n_h as usize
    }

    pub fn n_s(&self) -> usize {
        self.n_s as usize
    }

    pub fn n_v(&self) -> usize {
        self.n_v as usize
    }

    /// Orientation bin count.
    pub fn n_q(&self) -> usize {
        self.n_q as usize
    }

    /// Total color bin count `n_h * n_s * n_v`.
    pub fn n_colors(&self) -> usize {
        self.n_h() * self.n_s() * self.n_v()
    }

    /// Length of the flattened feature vector.
    pub fn feature_len(&self) -> usize {
        self.n_q() * self.n_colors()
    }

    /// Raw bin counts in `(n_h, n_s, n_v, n_q)` order, as stored on disk.
    pub fn as_u16s(&self) -> [u16; 4] {
        [self.n_h, self.n_s, self.n_v, self.n_q]
    }
}

impl fmt::Display for QuantizationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x({},{},{})", self.n_q, self.n_h, self.n_s, self.n_v)
    }
}

/// Named (n_h, n_s, n_v) factorizations for common total color counts.
///
/// Only 160 = 10x4x4 has a canonical factorization; the others are the
/// project's fixed choices so that sweeps over Nc are runnable.
pub fn color_preset(n_colors: u32) -> Option<(u16, u16, u16)> {
    match n_colors {
        72 => Some((8, 3, 3)),
        90 => Some((10, 3, 3)),
        160 => Some((10, 4, 4)),
        240 => Some((15, 4, 4)),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeError {
    ZeroBinCount,
}

impl fmt::Display for SchemeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeError::ZeroBinCount => write!(f, "all bin counts must be at least 1"),
        }
    }
}

impl core::error::Error for SchemeError {}
