//! Peripheral pooling of dense clutter maps and the peripheral integration
//! coefficient (PIFC) around a target.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::congestion::{fc_map, masked_mean, FcConfig};
use crate::error::{ClutterError, Result};
use crate::imagecore::{Point, RasterImage, ScalarField};
use crate::peripheral::{rasterize, ArchParams, Label, PeripheralArchitecture, RasterizedArch};
use crate::roi::{PixelRect, RoiSpec, TargetMask, DEFAULT_ROI_DEG};

/// Distance between the foveated and plain ROI crops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    L1,
    L2,
    Kl,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::L1, Metric::L2, Metric::Kl];

    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::L1 => "l1",
            Metric::L2 => "l2",
            Metric::Kl => "kl",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = ClutterError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Metric::L1),
            "l2" => Ok(Metric::L2),
            "kl" => Ok(Metric::Kl),
            other => Err(ClutterError::InvalidParameter(format!(
                "unknown metric '{other}' (expected l1, l2 or kl)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KlDirection {
    /// `D(foveated || plain)`.
    #[default]
    FoveatedToPlain,
    PlainToFoveated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KlOptions {
    /// Added to every value before sum-normalization.
    pub epsilon: f64,
    pub direction: KlDirection,
}

impl Default for KlOptions {
    fn default() -> Self {
        Self {
            epsilon: 1e-8,
            direction: KlDirection::FoveatedToPlain,
        }
    }
}

/// Pools `map` through the rasterized architecture: every region takes the
/// maximum of its unmasked pixels, the fovea and the outside keep the input,
/// and masked pixels become 0.
pub fn foveate_map(map: &ScalarField, raster: &RasterizedArch, mask: &TargetMask) -> Result<ScalarField> {
    let (w, h) = raster.dims();
    map.ensure_dims(w, h)?;
    let mut region_max = vec![f64::NEG_INFINITY; raster.region_count()];
    for y in 0..h {
        for (x, &v) in map.row(y).iter().enumerate() {
            if let Label::Region(id) = raster.label(x, y) {
                if !mask.is_masked(x, y) {
                    let m = &mut region_max[id as usize];
                    *m = m.max(v);
                }
            }
        }
    }
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for (x, &v) in map.row(y).iter().enumerate() {
            out.push(if mask.is_masked(x, y) {
                0.0
            } else {
                match raster.label(x, y) {
                    Label::Region(id) => region_max[id as usize],
                    Label::Fovea | Label::Outside => v,
                }
            });
        }
    }
    Ok(ScalarField::from_raw(w, h, out, map.deg_per_px()))
}

/// Coefficient of one metric over paired, unmasked ROI values.
pub fn roi_distance(plain: &[f64], foveated: &[f64], metric: Metric, kl: &KlOptions) -> f64 {
    assert_eq!(plain.len(), foveated.len(), "paired slices");
    let n = plain.len() as f64;
    match metric {
        Metric::L1 => plain.iter().zip(foveated).map(|(r, p)| (p - r).abs()).sum::<f64>() / n,
        Metric::L2 => (plain.iter().zip(foveated).map(|(r, p)| (p - r) * (p - r)).sum::<f64>() / n).sqrt(),
        Metric::Kl => {
            let eps = kl.epsilon;
            let (from, to) = match kl.direction {
                KlDirection::FoveatedToPlain => (foveated, plain),
                KlDirection::PlainToFoveated => (plain, foveated),
            };
            let zf: f64 = from.iter().map(|v| v + eps).sum();
            let zt: f64 = to.iter().map(|v| v + eps).sum();
            let d: f64 = from
                .iter()
                .zip(to)
                .map(|(a, b)| {
                    let pa = (a + eps) / zf;
                    let pb = (b + eps) / zt;
                    if pa > 0.0 {
                        pa * (pa / pb).ln()
                    } else {
                        0.0
                    }
                })
                .sum();
            (d / n).max(0.0)
        }
    }
}

/// Output of one PIFC evaluation.
#[derive(Debug, Clone)]
pub struct PifcResult {
    pub coefficient: f64,
    pub metric: Metric,
    /// Clipped ROI in image pixels.
    pub rect: PixelRect,
    pub roi_plain: ScalarField,
    pub roi_foveated: ScalarField,
    /// `true` where the ROI pixel is excluded by the target mask, row-major
    /// over `rect`.
    pub roi_mask: Vec<bool>,
}

/// PIFC from an already-foveated map.
pub fn pifc_from_foveated(
    plain: &ScalarField,
    foveated: &ScalarField,
    roi: &RoiSpec,
    mask: &TargetMask,
    metric: Metric,
    kl: &KlOptions,
) -> Result<PifcResult> {
    foveated.ensure_dims(plain.width(), plain.height())?;
    let rect = roi.pixel_rect(plain.width(), plain.height(), plain.deg_per_px())?;
    let roi_plain = plain.crop(rect.x0, rect.y0, rect.x1, rect.y1)?;
    let roi_foveated = foveated.crop(rect.x0, rect.y0, rect.x1, rect.y1)?;
    let mut roi_mask = Vec::with_capacity(rect.area());
    let (mut r, mut p) = (Vec::new(), Vec::new());
    for y in rect.y0..rect.y1 {
        for x in rect.x0..rect.x1 {
            let m = mask.is_masked(x, y);
            roi_mask.push(m);
            if !m {
                r.push(plain.get(x, y));
                p.push(foveated.get(x, y));
            }
        }
    }
    if r.is_empty() {
        return Err(ClutterError::FullyMaskedRoi);
    }
    Ok(PifcResult {
        coefficient: roi_distance(&r, &p, metric, kl),
        metric,
        rect,
        roi_plain,
        roi_foveated,
        roi_mask,
    })
}

/// Rasterizes the architecture at `fixation`, pools `map`, and compares the
/// two maps over the ROI.
pub fn pifc(
    map: &ScalarField,
    arch: &PeripheralArchitecture,
    fixation: Point,
    roi: &RoiSpec,
    mask: &TargetMask,
    metric: Metric,
    kl: &KlOptions,
) -> Result<PifcResult> {
    let raster = rasterize(arch, map.width(), map.height(), fixation, map.deg_per_px())?;
    let foveated = foveate_map(map, &raster, mask)?;
    pifc_from_foveated(map, &foveated, roi, mask, metric, kl)
}

/// Pointwise `foveated - plain` over the ROI; masked pixels are 0.
pub fn pifc_map_export(result: &PifcResult) -> ScalarField {
    let mut values = Vec::with_capacity(result.roi_mask.len());
    for (i, (p, r)) in result
        .roi_foveated
        .values()
        .iter()
        .zip(result.roi_plain.values())
        .enumerate()
    {
        values.push(if result.roi_mask[i] { 0.0 } else { p - r });
    }
    let (w, h) = result.roi_plain.dims();
    ScalarField::from_raw(w, h, values, result.roi_plain.deg_per_px())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FoveationConfig {
    pub arch: ArchParams,
    pub roi_deg: f64,
    pub metric: Metric,
    pub kl: KlOptions,
    /// Halve the image (doubling degrees per pixel) before scoring.
    pub half_resolution: bool,
    /// Side of the target box excluded from pooling and means; `None` keeps
    /// every pixel.
    pub target_size_deg: Option<f64>,
}

impl Default for FoveationConfig {
    fn default() -> Self {
        Self {
            arch: ArchParams::default(),
            roi_deg: DEFAULT_ROI_DEG,
            metric: Metric::L1,
            kl: KlOptions::default(),
            half_resolution: true,
            target_size_deg: None,
        }
    }
}

impl FoveationConfig {
    pub fn validate(&self) -> Result<()> {
        self.arch.validate()?;
        if !(self.roi_deg.is_finite() && self.roi_deg > 0.0) {
            return Err(ClutterError::InvalidParameter(format!(
                "ROI side must be positive, got {}",
                self.roi_deg
            )));
        }
        if !(self.kl.epsilon.is_finite() && self.kl.epsilon > 0.0) {
            return Err(ClutterError::InvalidParameter("KL epsilon must be positive".into()));
        }
        if let Some(t) = self.target_size_deg {
            if !(t.is_finite() && t > 0.0) {
                return Err(ClutterError::InvalidParameter(format!(
                    "target size must be positive, got {t}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct FfcConfig {
    pub fc: FcConfig,
    pub foveation: FoveationConfig,
}

impl FfcConfig {
    pub fn validate(&self) -> Result<()> {
        self.fc.validate()?;
        self.foveation.validate()
    }
}

/// Global score, PIFC, and their product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FfcScore {
    pub fc: f64,
    pub pifc: f64,
    pub ffc: f64,
    pub metric: Metric,
}

/// Reuses one dense map and one architecture across many
/// (fixation, target) pairs.
#[derive(Debug, Clone)]
pub struct FoveatedScorer {
    map: ScalarField,
    arch: PeripheralArchitecture,
    cfg: FoveationConfig,
    /// Size of the image that fixations and targets refer to.
    input_dims: (usize, usize),
    /// Maps input-image pixel coordinates onto `map`.
    coord_scale: f64,
}

impl FoveatedScorer {
    /// Scorer for a map at the input resolution.
    pub fn new(map: ScalarField, cfg: &FoveationConfig) -> Result<Self> {
        let dims = map.dims();
        Self::with_input_dims(map, cfg, dims, 1.0)
    }

    /// `map` is at the working resolution; points are given on an input
    /// image of `input_dims`, scaled by `coord_scale` (1 or 1/2).
    pub fn with_input_dims(
        map: ScalarField,
        cfg: &FoveationConfig,
        input_dims: (usize, usize),
        coord_scale: f64,
    ) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            map,
            arch: PeripheralArchitecture::build(cfg.arch)?,
            cfg: *cfg,
            input_dims,
            coord_scale,
        })
    }

    pub fn map(&self) -> &ScalarField {
        &self.map
    }

    pub fn architecture(&self) -> &PeripheralArchitecture {
        &self.arch
    }

    pub fn config(&self) -> &FoveationConfig {
        &self.cfg
    }

    /// Converts an input-image point to map coordinates.
    pub fn to_map_point(&self, p: Point) -> Point {
        if self.coord_scale == 1.0 {
            return p;
        }
        // Pixel centres of a 2x2 box reduction sit half a pixel in.
        let s = self.coord_scale;
        let (w, h) = self.map.dims();
        Point::new(
            ((p.x + 0.5) * s - 0.5).clamp(0.0, (w - 1) as f64),
            ((p.y + 0.5) * s - 0.5).clamp(0.0, (h - 1) as f64),
        )
    }

    pub fn mask_for(&self, target: Point) -> TargetMask {
        match self.cfg.target_size_deg {
            Some(side) => TargetMask::around(
                self.to_map_point(target),
                side,
                self.map.width(),
                self.map.height(),
                self.map.deg_per_px(),
            ),
            None => TargetMask::none(),
        }
    }

    /// Full PIFC result for one pair, in map coordinates.
    /// Foveated map for one fixation, the target mask, and the ROI centre,
    /// all in map coordinates.
    pub fn foveate_at(&self, fixation: Point, target: Point) -> Result<(ScalarField, TargetMask, Point)> {
        fixation.check_inside(self.input_dims.0, self.input_dims.1)?;
        target.check_inside(self.input_dims.0, self.input_dims.1)?;
        let fix = self.to_map_point(fixation);
        let mask = self.mask_for(target);
        let raster = rasterize(
            &self.arch,
            self.map.width(),
            self.map.height(),
            fix,
            self.map.deg_per_px(),
        )?;
        let foveated = foveate_map(&self.map, &raster, &mask)?;
        Ok((foveated, mask, self.to_map_point(target)))
    }

    /// Full PIFC result for one pair, plus the foveated map, in map
    /// coordinates.
    pub fn pifc_detail(
        &self,
        fixation: Point,
        target: Point,
        roi_deg: f64,
        metric: Metric,
    ) -> Result<(PifcResult, ScalarField)> {
        let (foveated, mask, tgt) = self.foveate_at(fixation, target)?;
        let roi = RoiSpec::new(tgt, roi_deg)?;
        let result = pifc_from_foveated(&self.map, &foveated, &roi, &mask, metric, &self.cfg.kl)?;
        Ok((result, foveated))
    }

    pub fn score_with(&self, fixation: Point, target: Point, roi_deg: f64, metric: Metric) -> Result<FfcScore> {
        Ok(self.score_grid(fixation, target, &[roi_deg], &[metric])?[0])
    }

    /// Scores for every `(roi, metric)` combination, ROI-major, from a
    /// single pooling pass.
    pub fn score_grid(
        &self,
        fixation: Point,
        target: Point,
        rois: &[f64],
        metrics: &[Metric],
    ) -> Result<Vec<FfcScore>> {
        let (foveated, mask, tgt) = self.foveate_at(fixation, target)?;
        let fc = masked_mean(&self.map, &mask)?;
        let mut out = Vec::with_capacity(rois.len() * metrics.len());
        for &side in rois {
            let roi = RoiSpec::new(tgt, side)?;
            for &metric in metrics {
                let r = pifc_from_foveated(&self.map, &foveated, &roi, &mask, metric, &self.cfg.kl)?;
                out.push(FfcScore {
                    fc,
                    pifc: r.coefficient,
                    ffc: fc * r.coefficient,
                    metric,
                });
            }
        }
        Ok(out)
    }

    pub fn score(&self, fixation: Point, target: Point) -> Result<FfcScore> {
        self.score_with(fixation, target, self.cfg.roi_deg, self.cfg.metric)
    }

    /// Scores many pairs in parallel; order follows `pairs`.
    pub fn score_many(&self, pairs: &[(Point, Point)]) -> Result<Vec<FfcScore>> {
        pairs.par_iter().map(|&(f, t)| self.score(f, t)).collect()
    }
}

/// Applies the configured resolution change; returns the working image and
/// the coordinate scale.
pub fn working_image(img: &RasterImage, cfg: &FoveationConfig) -> Result<(RasterImage, f64)> {
    if cfg.half_resolution {
        Ok((img.half_resolution()?, 0.5))
    } else {
        Ok((img.clone(), 1.0))
    }
}

/// Builds a scorer from a dense map computed on the working image of `img`.
pub fn scorer_for(
    img: &RasterImage,
    cfg: &FoveationConfig,
    dense: impl FnOnce(&RasterImage) -> Result<ScalarField>,
) -> Result<FoveatedScorer> {
    let (work, scale) = working_image(img, cfg)?;
    let map = dense(&work)?;
    FoveatedScorer::with_input_dims(map, cfg, img.dims(), scale)
}

/// Foveated Feature Congestion for one fixation and target.
pub fn ffc(img: &RasterImage, fixation: Point, target: Point, cfg: &FfcConfig) -> Result<FfcScore> {
    cfg.validate()?;
    scorer_for(img, &cfg.foveation, |work| Ok(fc_map(work, &cfg.fc)?.map))?.score(fixation, target)
}
