use serde::{Deserialize, Serialize};

use crate::error::{ClutterError, Result};

/// A pixel position. Pixel centers sit on integer coordinates, `x` grows to
/// the right and `y` grows downwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub(crate) fn check_inside(&self, width: usize, height: usize) -> Result<()> {
        let inside = self.x.is_finite()
            && self.y.is_finite()
            && self.x >= 0.0
            && self.y >= 0.0
            && self.x <= (width - 1) as f64
            && self.y <= (height - 1) as f64;
        if inside {
            Ok(())
        } else {
            Err(ClutterError::OutOfBounds {
                x: self.x,
                y: self.y,
                width,
                height,
            })
        }
    }
}

/// Row-major grid of reals tagged with its angular sampling. Every clutter
/// map, feature plane and pooled map in the crate is one of these.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    width: usize,
    height: usize,
    values: Vec<f64>,
    deg_per_px: f64,
}

impl ScalarField {
    pub fn new(width: usize, height: usize, values: Vec<f64>, deg_per_px: f64) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(ClutterError::InvalidParameter(format!(
                "field dimensions must be positive, got {width}x{height}"
            )));
        }
        if values.len() != width * height {
            return Err(ClutterError::InvalidParameter(format!(
                "{width}x{height} field needs {} values, got {}",
                width * height,
                values.len()
            )));
        }
        check_deg_per_px(deg_per_px)?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(ClutterError::InvalidParameter(format!(
                "non-finite value at ({}, {})",
                i % width,
                i / width
            )));
        }
        Ok(Self {
            width,
            height,
            values,
            deg_per_px,
        })
    }

    /// Internal constructor for values produced by the crate's own kernels.
    pub(crate) fn from_raw(width: usize, height: usize, values: Vec<f64>, deg_per_px: f64) -> Self {
        debug_assert_eq!(values.len(), width * height);
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self {
            width,
            height,
            values,
            deg_per_px,
        }
    }

    pub fn filled(width: usize, height: usize, value: f64, deg_per_px: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height], deg_per_px)
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        deg_per_px: f64,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self::new(width, height, values, deg_per_px)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn deg_per_px(&self) -> f64 {
        self.deg_per_px
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.values[y * self.width..(y + 1) * self.width]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Applies `f` pointwise. `f` must keep values finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        let values = self.values.iter().map(|&v| f(v)).collect();
        ScalarField::from_raw(self.width, self.height, values, self.deg_per_px)
    }

    pub(crate) fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        debug_assert_eq!(self.dims(), other.dims());
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        ScalarField::from_raw(self.width, self.height, values, self.deg_per_px)
    }

    pub fn ensure_dims(&self, width: usize, height: usize) -> Result<()> {
        if self.dims() == (width, height) {
            Ok(())
        } else {
            Err(ClutterError::DimensionMismatch {
                expected: (width, height),
                actual: self.dims(),
            })
        }
    }

    /// Copies the half-open pixel box `[x0, x1) x [y0, y1)`.
    pub fn crop(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> Result<ScalarField> {
        if x0 >= x1 || y0 >= y1 || x1 > self.width || y1 > self.height {
            return Err(ClutterError::InvalidParameter(format!(
                "crop [{x0},{x1})x[{y0},{y1}) outside {}x{} field",
                self.width, self.height
            )));
        }
        let mut values = Vec::with_capacity((x1 - x0) * (y1 - y0));
        for y in y0..y1 {
            values.extend_from_slice(&self.row(y)[x0..x1]);
        }
        Ok(ScalarField::from_raw(x1 - x0, y1 - y0, values, self.deg_per_px))
    }

    /// Same values with the angular sampling replaced.
    pub fn with_deg_per_px(mut self, deg_per_px: f64) -> Result<ScalarField> {
        check_deg_per_px(deg_per_px)?;
        self.deg_per_px = deg_per_px;
        Ok(self)
    }
}

pub(crate) fn check_deg_per_px(deg_per_px: f64) -> Result<()> {
    if deg_per_px.is_finite() && deg_per_px > 0.0 {
        Ok(())
    } else {
        Err(ClutterError::InvalidParameter(format!(
            "deg_per_px must be positive and finite, got {deg_per_px}"
        )))
    }
}

/// An sRGB raster with channel values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    pixels: Vec<[f64; 3]>,
    deg_per_px: f64,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[f64; 3]>, deg_per_px: f64) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(ClutterError::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(ClutterError::InvalidImage(format!(
                "{width}x{height} image needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        check_deg_per_px(deg_per_px)?;
        if let Some(i) = pixels.iter().position(|p| p.iter().any(|c| !(0.0..=1.0).contains(c))) {
            return Err(ClutterError::InvalidImage(format!(
                "channel value outside [0, 1] at ({}, {})",
                i % width,
                i / width
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
            deg_per_px,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        deg_per_px: f64,
        mut f: impl FnMut(usize, usize) -> [f64; 3],
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels, deg_per_px)
    }

    pub fn uniform(width: usize, height: usize, rgb: [f64; 3], deg_per_px: f64) -> Result<Self> {
        Self::new(width, height, vec![rgb; width * height], deg_per_px)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn deg_per_px(&self) -> f64 {
        self.deg_per_px
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [f64; 3] {
        self.pixels[y * self.width + x]
    }

    /// 2x2 box-averaged copy at twice the degrees per pixel. A trailing odd
    /// row or column is dropped.
    pub fn half_resolution(&self) -> Result<RasterImage> {
        let (w, h) = (self.width / 2, self.height / 2);
        if w == 0 || h == 0 {
            return Err(ClutterError::DimensionTooSmall {
                width: self.width,
                height: self.height,
                levels: 2,
            });
        }
        let mut pixels = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let mut acc = [0.0; 3];
                for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    let p = self.get(2 * x + dx, 2 * y + dy);
                    for c in 0..3 {
                        acc[c] += p[c];
                    }
                }
                pixels.push(acc.map(|v| (v / 4.0).clamp(0.0, 1.0)));
            }
        }
        RasterImage::new(w, h, pixels, self.deg_per_px * 2.0)
    }

    /// Rec. 601 luma on the encoded values, the usual `rgb2gray`.
    pub fn to_gray(&self) -> ScalarField {
        let values = self
            .pixels
            .iter()
            .map(|p| 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2])
            .collect();
        ScalarField::from_raw(self.width, self.height, values, self.deg_per_px)
    }

    /// Reads an 8- or 16-bit PNG (or any format the `image` crate decodes
    /// losslessly). The angular sampling is never inferred from the file.
    pub fn load(path: impl AsRef<std::path::Path>, deg_per_px: f64) -> Result<RasterImage> {
        let img = image::ImageReader::open(path)?.decode()?;
        Self::from_dynamic(&img, deg_per_px)
    }

    pub fn from_dynamic(img: &image::DynamicImage, deg_per_px: f64) -> Result<RasterImage> {
        let (w, h) = (img.width() as usize, img.height() as usize);
        let pixels = match img.color().bytes_per_pixel() / img.color().channel_count() {
            1 => img.to_rgb8().pixels().map(|p| p.0.map(|c| c as f64 / 255.0)).collect(),
            2 => img
                .to_rgb16()
                .pixels()
                .map(|p| p.0.map(|c| c as f64 / 65535.0))
                .collect(),
            _ => img
                .to_rgb32f()
                .pixels()
                .map(|p| p.0.map(|c| (c as f64).clamp(0.0, 1.0)))
                .collect(),
        };
        RasterImage::new(w, h, pixels, deg_per_px)
    }

    pub fn to_rgb8(&self) -> image::RgbImage {
        let mut out = image::RgbImage::new(self.width as u32, self.height as u32);
        for (dst, src) in out.pixels_mut().zip(&self.pixels) {
            dst.0 = src.map(|c| (c * 255.0).round() as u8);
        }
        out
    }

    pub fn to_rgb16(&self) -> image::ImageBuffer<image::Rgb<u16>, Vec<u16>> {
        let mut out = image::ImageBuffer::new(self.width as u32, self.height as u32);
        for (dst, src) in out.pixels_mut().zip(&self.pixels) {
            let p: &mut image::Rgb<u16> = dst;
            p.0 = src.map(|c| (c * 65535.0).round() as u16);
        }
        out
    }

    /// Writes a 16-bit PNG so that a load round-trips to within 1/65535.
    pub fn save_png(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        self.to_rgb16().save(path)?;
        Ok(())
    }
}

/// CIELab planes sharing one geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct LabImage {
    pub l: ScalarField,
    pub a: ScalarField,
    pub b: ScalarField,
}

impl LabImage {
    pub fn new(l: ScalarField, a: ScalarField, b: ScalarField) -> Result<Self> {
        let (w, h) = l.dims();
        a.ensure_dims(w, h)?;
        b.ensure_dims(w, h)?;
        if a.deg_per_px() != l.deg_per_px() || b.deg_per_px() != l.deg_per_px() {
            return Err(ClutterError::InvalidParameter(
                "Lab planes disagree on deg_per_px".into(),
            ));
        }
        Ok(Self { l, a, b })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.l.dims()
    }

    pub fn deg_per_px(&self) -> f64 {
        self.l.deg_per_px()
    }
}
