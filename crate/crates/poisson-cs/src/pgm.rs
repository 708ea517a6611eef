//! Grayscale rasters and PGM input/output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use image::{ColorType, ImageReader};

use crate::error::{io_err, Error, Result};

/// Row-major grayscale image with real-valued pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<f64>,
}

impl Raster {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width * height != pixels.len() || pixels.is_empty() {
            return Err(Error::Spec(format!(
                "{width}x{height} raster needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn total(&self) -> f64 {
        self.pixels.iter().sum()
    }

    /// Copy scaled so the pixels sum to `intensity`.
    pub fn with_intensity(&self, intensity: f64) -> Result<Self> {
        let total = self.total();
        if !(total > 0.0) {
            return Err(Error::ZeroImage);
        }
        Ok(Self {
            pixels: self.pixels.iter().map(|v| v * intensity / total).collect(),
            ..self.clone()
        })
    }

    /// Centered `side × side` window.
    pub fn center_crop(&self, side: usize) -> Result<Self> {
        if side == 0 || side > self.width || side > self.height {
            return Err(Error::Spec(format!(
                "crop {side} does not fit a {}x{} image",
                self.width, self.height
            )));
        }
        let r0 = (self.height - side) / 2;
        let c0 = (self.width - side) / 2;
        let mut pixels = Vec::with_capacity(side * side);
        for r in r0..r0 + side {
            pixels.extend_from_slice(&self.pixels[r * self.width + c0..r * self.width + c0 + side]);
        }
        Ok(Self {
            width: side,
            height: side,
            pixels,
        })
    }

    /// Quantize `v / white` into `bits`-bit levels, clamping to `[0, 1]`.
    fn levels(&self, white: f64, bits: u8) -> Vec<u16> {
        let max = if bits == 8 { 255.0 } else { 65535.0 };
        self.pixels
            .iter()
            .map(|&v| {
                let t = if white > 0.0 { (v / white).clamp(0.0, 1.0) } else { 0.0 };
                (t * max).round() as u16
            })
            .collect()
    }
}

/// Read a binary or ASCII PGM (8- or 16-bit).
pub fn read_pgm(path: &Path) -> Result<Raster> {
    let img_err = |source| Error::Image {
        path: path.to_path_buf(),
        source,
    };
    let reader = ImageReader::open(path).map_err(io_err(path))?;
    let reader = reader.with_guessed_format().map_err(io_err(path))?;
    let img = reader.decode().map_err(img_err)?;
    let (width, height) = (img.width() as usize, img.height() as usize);
    let pixels: Vec<f64> = match img.color() {
        ColorType::L8 => img.to_luma8().into_raw().into_iter().map(f64::from).collect(),
        ColorType::L16 => img.to_luma16().into_raw().into_iter().map(f64::from).collect(),
        other => return Err(Error::Spec(format!("{}: expected grayscale, got {other:?}", path.display()))),
    };
    Raster::new(width, height, pixels)
}

/// Write a binary PGM (P5), mapping `white` to the brightest level.
pub fn write_pgm(raster: &Raster, path: &Path, white: f64, bits: u8) -> Result<()> {
    let maxval: u16 = if bits == 8 { 255 } else { 65535 };
    let levels = raster.levels(white, bits);
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    let mut body = format!("P5\n{} {}\n{}\n", raster.width, raster.height, maxval).into_bytes();
    if bits == 8 {
        body.extend(levels.iter().map(|&v| v as u8));
    } else {
        body.extend(levels.iter().flat_map(|v| v.to_be_bytes()));
    }
    w.write_all(&body).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

/// Deterministic smooth test scene: a tilted sinusoid, a Gaussian blob and
/// one soft diagonal edge on a positive background.
pub fn synthetic_scene(width: usize, height: usize) -> Raster {
    use std::f64::consts::PI;
    let mut pixels = Vec::with_capacity(width * height);
    for r in 0..height {
        for c in 0..width {
            let (y, x) = (r as f64, c as f64);
            let wave = 60.0 * (2.0 * PI * y / 40.0).sin() * (2.0 * PI * x / 55.0).cos();
            let blob = 80.0 * (-((y - 0.45 * height as f64).powi(2) + (x - 0.3 * width as f64).powi(2)) / 120.0).exp();
            let edge = 30.0 / (1.0 + (-(y + 0.5 * x - 0.95 * height as f64) / 1.5).exp());
            pixels.push(100.0 + wave + blob + edge);
        }
    }
    Raster {
        width,
        height,
        pixels,
    }
}
