//! Raster containers and RGB <-> HSV conversion.
//!
//! All three HSV channels are normalized to [0, 1] (hue divided by 360
//! degrees) so that each channel contributes on equal scale to the
//! multi-channel gradient. Hue of an achromatic pixel is defined as 0.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Smallest usable raster: the 3x3 derivative stencil needs a full
/// neighborhood.
pub const MIN_DIMENSION: u32 = 3;

/// 8-bit RGB raster, interleaved `r g b` rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl RgbImage {
    /// Wraps interleaved RGB bytes. Rejects rasters smaller than 3x3 and
    /// buffers whose length is not `width * height * 3`.
    pub fn from_raw(width: u32, height: u32, data: Vec<u8>) -> Result<Self, ImageError> {
        if width < MIN_DIMENSION || height < MIN_DIMENSION {
            return Err(ImageError::TooSmall { width, height });
        }
        let expected = width as usize * height as usize * 3;
        if data.len() != expected {
            return Err(ImageError::BadBufferLength { expected, got: data.len() });
        }
        Ok(Self { width, height, data })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn pixel(&self, x: u32, y: u32) -> (u8, u8, u8) {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        (self.data[i], self.data[i + 1], self.data[i + 2])
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }
}

/// Single-channel f64 raster.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: u32,
    height: u32,
    data: Vec<f64>,
}

impl Plane {
    pub fn zeroed(width: u32, height: u32) -> Self {
        Self { width, height, data: vec![0.0; width as usize * height as usize] }
    }

    pub fn from_vec(width: u32, height: u32, data: Vec<f64>) -> Result<Self, ImageError> {
        let expected = width as usize * height as usize;
        if data.len() != expected {
            return Err(ImageError::BadBufferLength { expected, got: data.len() });
        }
        Ok(Self { width, height, data })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: f64) {
        self.data[y as usize * self.width as usize + x as usize] = value;
    }

    /// Sample with replicate padding: out-of-range coordinates clamp to the
    /// nearest border pixel.
    #[inline]
    pub fn get_clamped(&self, x: i64, y: i64) -> f64 {
        let cx = x.clamp(0, self.width as i64 - 1) as usize;
        let cy = y.clamp(0, self.height as i64 - 1) as usize;
        self.data[cy * self.width as usize + cx]
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }
}

/// Per-pixel H/S/V planes, each in [0, 1], same dimensions as the source.
#[derive(Debug, Clone, PartialEq)]
pub struct HsvImage {
    h: Plane,
    s: Plane,
    v: Plane,
}

impl HsvImage {
    pub fn from_planes(h: Plane, s: Plane, v: Plane) -> Result<Self, ImageError> {
        if h.width != s.width
            || h.width != v.width
            || h.height != s.height
            || h.height != v.height
        {
            return Err(ImageError::DimensionMismatch);
        }
        Ok(Self { h, s, v })
    }

    pub fn width(&self) -> u32 {
        self.h.width
    }

    pub fn height(&self) -> u32 {
        self.h.height
    }

    pub fn h(&self) -> &Plane {
        &self.h
    }

    pub fn s(&self) -> &Plane {
        &self.s
    }

    pub fn v(&self) -> &Plane {
        &self.v
    }
}

/// Standard hexcone RGB -> HSV for one 8-bit pixel, all outputs in [0, 1]
/// with H strictly below 1. Achromatic pixels get H = 0; black gets S = 0.
pub fn rgb_pixel_to_hsv(r: u8, g: u8, b: u8) -> (f64, f64, f64) {
    let rf = r as f64 / 255.0;
    let gf = g as f64 / 255.0;
    let bf = b as f64 / 255.0;

    let max = rf.max(gf).max(bf);
    let min = rf.min(gf).min(bf);
    let delta = max - min;

    let v = max;
    let s = if max == 0.0 { 0.0 } else { delta / max };
    let h = if delta == 0.0 {
        0.0
    } else {
        // Sector in [0, 6): distance around the hue hexagon.
        let mut sector = if max == rf {
            (gf - bf) / delta
        } else if max == gf {
            (bf - rf) / delta + 2.0
        } else {
            (rf - gf) / delta + 4.0
        };
        if sector < 0.0 {
            sector += 6.0;
        }
        sector / 6.0
    };

    (h, s, v)
}

/// Standard hexcone inverse of [`rgb_pixel_to_hsv`], rounding to 8 bits.
/// Round-trips exactly: `hsv_pixel_to_rgb(rgb_pixel_to_hsv(p)) == p`.
pub fn hsv_pixel_to_rgb(h: f64, s: f64, v: f64) -> (u8, u8, u8) {
    if s == 0.0 {
        let gray = round_u8(v);
        return (gray, gray, gray);
    }
    let h6 = h * 6.0;
    let sector = (libm::floor(h6) as usize).min(5);
    let f = h6 - sector as f64;
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    let (rf, gf, bf) = match sector {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    (round_u8(rf), round_u8(gf), round_u8(bf))
}

fn round_u8(value: f64) -> u8 {
    let scaled = libm::round(value * 255.0);
    if scaled <= 0.0 {
        0
    } else if scaled >= 255.0 {
        255
    } else {
        scaled as u8
    }
}

/// Converts a full raster to normalized HSV planes.
pub fn rgb_to_hsv(img: &RgbImage) -> HsvImage {
    let (w, ht) = (img.width, img.height);
    let n = img.pixel_count();
    let mut h = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for chunk in img.data.chunks_exact(3) {
        let (hp, sp, vp) = rgb_pixel_to_hsv(chunk[0], chunk[1], chunk[2]);
        h.push(hp);
        s.push(sp);
        v.push(vp);
    }
    HsvImage {
        h: Plane { width: w, height: ht, data: h },
        s: Plane { width: w, height: ht, data: s },
        v: Plane { width: w, height: ht, data: v },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImageError {
    TooSmall { width: u32, height: u32 },
    BadBufferLength { expected: usize, got: usize },
    DimensionMismatch,
}

impl fmt::Display for ImageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImageError::TooSmall { width, height } => {
                write!(f, "image is {width}x{height}; both dimensions must be at least {MIN_DIMENSION}")
            }
            ImageError::BadBufferLength { expected, got } => {
                write!(f, "buffer length {got} does not match dimensions (expected {expected})")
            }
            ImageError::DimensionMismatch => write!(f, "plane dimensions differ"),
        }
    }
}

impl core::error::Error for ImageError {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undersized_rasters_rejected() {
        assert!(matches!(
            RgbImage::from_raw(2, 5, vec![0; 2 * 5 * 3]),
            Err(ImageError::TooSmall { .. })
        ));
        assert!(matches!(
            RgbImage::from_raw(5, 2, vec![0; 5 * 2 * 3]),
            Err(ImageError::TooSmall { .. })
        ));
        assert!(RgbImage::from_raw(3, 3, vec![0; 27]).is_ok());
    }

    #[test]
    fn buffer_length_must_match() {
        assert!(matches!(
            RgbImage::from_raw(3, 3, vec![0; 26]),
            Err(ImageError::BadBufferLength { expected: 27, got: 26 })
        ));
    }

    #[test]
    fn pure_red_green_and_gray() {
        assert_eq!(rgb_pixel_to_hsv(255, 0, 0), (0.0, 1.0, 1.0));
        let (h, s, v) = rgb_pixel_to_hsv(0, 255, 0);
        assert_eq!(h, 1.0 / 3.0);
        assert_eq!(s, 1.0);
        assert_eq!(v, 1.0);
        let (h, s, v) = rgb_pixel_to_hsv(128, 128, 128);
        assert_eq!(h, 0.0);
        assert_eq!(s, 0.0);
        assert_eq!(v, 128.0 / 255.0);
    }

    #[test]
    fn hue_wraps_into_unit_range() {
        // Magenta-ish pixel: max = r, g < b, so the sector is negative
        // before the +6 wrap.
        let (h, _, _) = rgb_pixel_to_hsv(200, 10, 100);
        assert!(h >= 0.5 && h < 1.0);
    }

    #[test]
    fn grayscale_has_zero_hue_and_saturation() {
        for g in 0..=255u8 {
            let (h, s, _) = rgb_pixel_to_hsv(g, g, g);
            assert_eq!(h, 0.0);
            assert_eq!(s, 0.0);
        }
    }

    #[test]
    fn round_trip_corner_cases() {
        let cases = [
            (0, 0, 0),
            (255, 255, 255),
            (255, 0, 0),
            (0, 255, 0),
            (0, 0, 255),
            (255, 255, 0),
            (0, 255, 255),
            (255, 0, 255),
            (1, 0, 0),
            (254, 255, 253),
            (128, 64, 32),
            (17, 211, 99),
        ];
        for (r, g, b) in cases {
            let (h, s, v) = rgb_pixel_to_hsv(r, g, b);
            assert_eq!(hsv_pixel_to_rgb(h, s, v), (r, g, b), "pixel ({r},{g},{b})");
        }
    }

    #[test]
    fn planes_share_dimensions_with_source() {
        let img = RgbImage::from_raw(4, 3, vec![10; 4 * 3 * 3]).unwrap();
        let hsv = rgb_to_hsv(&img);
        assert_eq!(hsv.width(), 4);
        assert_eq!(hsv.height(), 3);
    }

    #[test]
    fn clamped_sampling_replicates_borders() {
        let plane = Plane::from_vec(3, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]).unwrap();
        assert_eq!(plane.get_clamped(-1, -1), 1.0);
        assert_eq!(plane.get_clamped(5, 1), 6.0);
        assert_eq!(plane.get_clamped(1, 7), 8.0);
    }
}
