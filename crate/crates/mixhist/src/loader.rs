//! Decoding raster files into core images.

use std::io;
use std::path::{Path, PathBuf};

use image::ImageFormat;
use mixhist_core::image::{ImageError, RgbImage, MIN_DIMENSION};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("file not found: {0}")]
    NotFound(PathBuf),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("unsupported format for {0} (only PNG and JPEG are accepted)")]
    UnsupportedFormat(PathBuf),
    #[error("cannot decode {path}: {source}")]
    Corrupt {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("{path}: image is {width}x{height}; both dimensions must be at least {MIN_DIMENSION}")]
    TooSmall { path: PathBuf, width: u32, height: u32 },
}

/// Decodes a PNG or JPEG file to 8-bit RGB, dropping any alpha channel.
pub fn load_image(path: &Path) -> Result<RgbImage, LoadError> {
    let reader = image::ImageReader::open(path).map_err(|e| {
        if e.kind() == io::ErrorKind::NotFound {
            LoadError::NotFound(path.to_path_buf())
        } else {
            LoadError::Io { path: path.to_path_buf(), source: e }
        }
    })?;
    let reader = reader.with_guessed_format().map_err(|e| LoadError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    match reader.format() {
        Some(ImageFormat::Png) | Some(ImageFormat::Jpeg) => {}
        _ => return Err(LoadError::UnsupportedFormat(path.to_path_buf())),
    }
    let decoded = reader
        .decode()
        .map_err(|e| LoadError::Corrupt { path: path.to_path_buf(), source: e })?
        .into_rgb8();
    let (width, height) = decoded.dimensions();
    RgbImage::from_raw(width, height, decoded.into_raw()).map_err(|e| match e {
        ImageError::TooSmall { width, height } => {
            LoadError::TooSmall { path: path.to_path_buf(), width, height }
        }
        // Buffer length always matches what the decoder produced.
        other => unreachable!("decoder produced inconsistent buffer: {other}"),
    })
}
