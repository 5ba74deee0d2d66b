//! Target-centred regions of interest and target masks.

use serde::{Deserialize, Serialize};

use crate::error::{ClutterError, Result};
use crate::imagecore::Point;

/// Half-open pixel box `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PixelRect {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl PixelRect {
    pub fn width(&self) -> usize {
        self.x1 - self.x0
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }

    /// Square of side `side_px` centred on `center`, clipped to the image.
    /// Pixel `i` is inside when `center - side/2 <= i < center + side/2`,
    /// so an integral side yields exactly that many pixels before clipping.
    pub fn centred_square(center: Point, side_px: f64, width: usize, height: usize) -> Option<PixelRect> {
        let half = side_px / 2.0;
        let clip = |lo: f64, hi: f64, n: usize| -> Option<(usize, usize)> {
            let a = lo.ceil().max(0.0);
            let b = hi.ceil().min(n as f64);
            (b > a).then_some((a as usize, b as usize))
        };
        let (x0, x1) = clip(center.x - half, center.x + half, width)?;
        let (y0, y1) = clip(center.y - half, center.y + half, height)?;
        Some(PixelRect { x0, y0, x1, y1 })
    }
}

/// Square region of interest around a target, sized in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoiSpec {
    pub center: Point,
    pub side_deg: f64,
}

pub const DEFAULT_ROI_DEG: f64 = 6.0;

impl RoiSpec {
    pub fn new(center: Point, side_deg: f64) -> Result<Self> {
        if !(side_deg.is_finite() && side_deg > 0.0) {
            return Err(ClutterError::InvalidParameter(format!(
                "ROI side must be positive, got {side_deg}"
            )));
        }
        Ok(Self { center, side_deg })
    }

    /// Clipped pixel box; errors when nothing of it falls on the image.
    pub fn pixel_rect(&self, width: usize, height: usize, deg_per_px: f64) -> Result<PixelRect> {
        if !(self.side_deg.is_finite() && self.side_deg > 0.0) {
            return Err(ClutterError::InvalidParameter(format!(
                "ROI side must be positive, got {}",
                self.side_deg
            )));
        }
        PixelRect::centred_square(self.center, self.side_deg / deg_per_px, width, height).ok_or(ClutterError::EmptyRoi)
    }
}

/// Pixels belonging to the search target. Masked pixels take part in neither
/// pooling maxima nor means.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TargetMask {
    pub rect: Option<PixelRect>,
}

impl TargetMask {
    pub fn none() -> Self {
        Self { rect: None }
    }

    pub fn from_rect(rect: PixelRect, width: usize, height: usize) -> Result<Self> {
        if rect.x0 >= rect.x1 || rect.y0 >= rect.y1 || rect.x1 > width || rect.y1 > height {
            return Err(ClutterError::InvalidParameter(format!(
                "target box {rect:?} is not inside the {width}x{height} image"
            )));
        }
        Ok(Self { rect: Some(rect) })
    }

    /// Square box of `side_deg` around the target, clipped to the image.
    pub fn around(center: Point, side_deg: f64, width: usize, height: usize, deg_per_px: f64) -> Self {
        Self {
            rect: PixelRect::centred_square(center, side_deg / deg_per_px, width, height),
        }
    }

    #[inline]
    pub fn is_masked(&self, x: usize, y: usize) -> bool {
        self.rect.is_some_and(|r| r.contains(x, y))
    }
}
