use std::io::Cursor;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, GrayImage, ImageEncoder};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("image sizes differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
    #[error("images have no pixels")]
    Empty,
    #[error("cannot decode image: {0}")]
    Decode(#[from] image::ImageError),
}

/// Pixel difference between two equally sized grayscale images.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Similarity {
    pub mae: f64,
    pub mse: f64,
    /// `(1 - mae / 255) * 100`.
    pub similarity_pct: f64,
}

impl Similarity {
    fn from_errors(mae: f64, mse: f64) -> Self {
        Similarity {
            mae,
            mse,
            similarity_pct: (1.0 - mae / 255.0) * 100.0,
        }
    }
}

pub fn image_similarity(a: &GrayImage, b: &GrayImage) -> Result<Similarity, MetricError> {
    if a.dimensions() != b.dimensions() {
        let ((aw, ah), (bw, bh)) = (a.dimensions(), b.dimensions());
        return Err(MetricError::DimensionMismatch(aw, ah, bw, bh));
    }
    let n = a.as_raw().len();
    if n == 0 {
        return Err(MetricError::Empty);
    }
    let (mut abs, mut sq) = (0u64, 0u64);
    for (&p, &q) in a.as_raw().iter().zip(b.as_raw()) {
        let d = (p as i64 - q as i64).unsigned_abs();
        abs += d;
        sq += d * d;
    }
    Ok(Similarity::from_errors(
        abs as f64 / n as f64,
        sq as f64 / n as f64,
    ))
}

/// Unweighted mean over pages; `None` for an empty slice.
pub fn mean_similarity(pages: &[Similarity]) -> Option<Similarity> {
    if pages.is_empty() {
        return None;
    }
    let n = pages.len() as f64;
    let mae = pages.iter().map(|s| s.mae).sum::<f64>() / n;
    let mse = pages.iter().map(|s| s.mse).sum::<f64>() / n;
    Some(Similarity::from_errors(mae, mse))
}

/// Binary PGM (P5) bytes.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = Vec::new();
    PnmEncoder::new(&mut out)
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(
            img.as_raw(),
            img.width(),
            img.height(),
            ExtendedColorType::L8,
        )
        .expect("in-memory PGM encoding");
    out
}

/// Decode any format compiled into the `image` crate as 8-bit grayscale.
pub fn decode_gray(bytes: &[u8]) -> Result<GrayImage, MetricError> {
    let img = image::ImageReader::new(Cursor::new(bytes))
        .with_guessed_format()
        .map_err(image::ImageError::IoError)?
        .decode()?;
    Ok(img.into_luma8())
}
