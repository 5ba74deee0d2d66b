//! Edge Density and subband-based clutter models, and the common dense-model
//! interface used by the foveated pipeline.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::congestion::{fc_map, FcConfig};
use crate::error::{ClutterError, Result};
use crate::foveation::{scorer_for, FfcScore, FoveationConfig};
use crate::imagecore::{
    centre_on_first, gaussian_pyramid, srgb_to_lab, upsample_level, OrientedFilterBank, Point, RasterImage,
    ScalarField, DEFAULT_ORIENT_SIGMA_PX,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EdgeThresholds {
    /// Seed threshold as a fraction of the maximum gradient magnitude.
    pub high: f64,
    /// Continuation threshold, same units.
    pub low: f64,
}

impl Default for EdgeThresholds {
    fn default() -> Self {
        Self { high: 0.3, low: 0.1 }
    }
}

impl EdgeThresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.low > 0.0 && self.low <= self.high && self.high <= 1.0) {
            return Err(ClutterError::InvalidParameter(format!(
                "edge thresholds need 0 < low <= high <= 1, got low={} high={}",
                self.low, self.high
            )));
        }
        Ok(())
    }
}

/// Binary edge map from forward-difference gradient magnitude with
/// hysteresis (8-connected).
pub fn edge_map(img: &RasterImage, th: &EdgeThresholds) -> Result<Vec<bool>> {
    th.validate()?;
    let g = img.to_gray();
    let (w, h) = g.dims();
    let mut mag = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let v = g.get(x, y);
            let gx = if x + 1 < w { g.get(x + 1, y) - v } else { 0.0 };
            let gy = if y + 1 < h { g.get(x, y + 1) - v } else { 0.0 };
            mag[y * w + x] = gx.hypot(gy);
        }
    }
    let peak = mag.iter().copied().fold(0.0, f64::max);
    let mut edges = vec![false; w * h];
    if peak <= 0.0 {
        return Ok(edges);
    }
    let (hi, lo) = (th.high * peak, th.low * peak);
    let mut stack: Vec<usize> = (0..w * h).filter(|&i| mag[i] >= hi).collect();
    for &i in &stack {
        edges[i] = true;
    }
    while let Some(i) = stack.pop() {
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if !edges[j] && mag[j] >= lo {
                    edges[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    Ok(edges)
}

/// Fraction of pixels marked as edges.
pub fn edge_density_score(img: &RasterImage, th: &EdgeThresholds) -> Result<f64> {
    let edges = edge_map(img, th)?;
    Ok(edges.iter().filter(|&&e| e).count() as f64 / edges.len() as f64)
}

/// Gradient magnitude of the grayscale image by central differences
/// (one-sided at the border).
pub fn edge_density_dense(img: &RasterImage) -> ScalarField {
    let g = img.to_gray();
    let (w, h) = g.dims();
    let diff = |a: f64, b: f64, span: usize| if span == 0 { 0.0 } else { (a - b) / span as f64 };
    let mut values = Vec::with_capacity(w * h);
    for y in 0..h {
        let (ya, yb) = (y.saturating_sub(1), (y + 1).min(h - 1));
        for x in 0..w {
            let (xa, xb) = (x.saturating_sub(1), (x + 1).min(w - 1));
            let gx = diff(g.get(xb, y), g.get(xa, y), xb - xa);
            let gy = diff(g.get(x, yb), g.get(x, ya), yb - ya);
            values.push(gx.hypot(gy));
        }
    }
    ScalarField::new(w, h, values, g.deg_per_px()).expect("finite gradients")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SubbandConfig {
    pub n_scales: usize,
    pub n_orients: usize,
    /// Weight of each chrominance channel relative to luminance.
    pub chroma_weight: f64,
    pub bins: usize,
    /// Per-level weights of the dense energy sum; missing entries count 1.
    pub level_weights: Vec<f64>,
}

impl Default for SubbandConfig {
    fn default() -> Self {
        Self {
            n_scales: 3,
            n_orients: 4,
            chroma_weight: 0.08,
            bins: 256,
            level_weights: vec![1.0; 3],
        }
    }
}

impl SubbandConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_scales == 0 || self.n_orients < 2 || self.bins < 2 {
            return Err(ClutterError::InvalidParameter(format!(
                "subband config needs n_scales >= 1, n_orients >= 2, bins >= 2; got {}, {}, {}",
                self.n_scales, self.n_orients, self.bins
            )));
        }
        if !(self.chroma_weight.is_finite() && self.chroma_weight >= 0.0) {
            return Err(ClutterError::InvalidParameter(
                "chroma weight must be non-negative".into(),
            ));
        }
        if self.level_weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(ClutterError::InvalidParameter(
                "level weights must be non-negative".into(),
            ));
        }
        Ok(())
    }

    fn level_weight(&self, k: usize) -> f64 {
        self.level_weights.get(k).copied().unwrap_or(1.0)
    }
}

/// Even (G2) subband coefficients for every level and orientation.
fn subbands(channel: &ScalarField, cfg: &SubbandConfig) -> Result<Vec<Vec<ScalarField>>> {
    let pyr = gaussian_pyramid(&centre_on_first(channel), cfg.n_scales)?;
    let bank = OrientedFilterBank::evenly_spaced(cfg.n_orients, DEFAULT_ORIENT_SIGMA_PX);
    Ok(pyr
        .iter()
        .map(|level| bank.responses(level).into_iter().map(|r| r.even).collect())
        .collect())
}

/// Shannon entropy in bits of a uniform-bin histogram over the observed
/// range; 0 for a (numerically) constant band.
pub fn histogram_entropy(values: &[f64], bins: usize) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if values.is_empty() || hi - lo <= 1e-9 {
        return 0.0;
    }
    let mut counts = vec![0usize; bins];
    let scale = bins as f64 / (hi - lo);
    for &v in values {
        let b = (((v - lo) * scale) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let n = values.len() as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

fn channel_entropy(channel: &ScalarField, cfg: &SubbandConfig) -> Result<f64> {
    let bands = subbands(channel, cfg)?;
    let all: Vec<f64> = bands
        .iter()
        .flatten()
        .map(|b| histogram_entropy(b.values(), cfg.bins))
        .collect();
    Ok(all.iter().sum::<f64>() / all.len() as f64)
}

/// Mean subband entropy of L, a and b, with chrominance weighted by
/// `chroma_weight`.
pub fn subband_entropy_score(img: &RasterImage, cfg: &SubbandConfig) -> Result<f64> {
    cfg.validate()?;
    let lab = srgb_to_lab(img);
    let hl = channel_entropy(&lab.l, cfg)?;
    let ha = channel_entropy(&lab.a, cfg)?;
    let hb = channel_entropy(&lab.b, cfg)?;
    let wc = cfg.chroma_weight;
    Ok((hl + wc * (ha + hb)) / (1.0 + 2.0 * wc))
}

/// Weighted sum over levels and orientations of squared subband
/// coefficients of the grayscale image, at full resolution.
pub fn subband_energy_dense(img: &RasterImage, cfg: &SubbandConfig) -> Result<ScalarField> {
    cfg.validate()?;
    let gray = img.to_gray();
    let (w, h) = gray.dims();
    let dpp = gray.deg_per_px();
    let bands = subbands(&gray, cfg)?;
    let mut acc = vec![0.0; w * h];
    for (k, level) in bands.iter().enumerate() {
        let wk = cfg.level_weight(k);
        if wk == 0.0 {
            continue;
        }
        let (lw, lh) = level[0].dims();
        let mut energy = vec![0.0; lw * lh];
        for band in level {
            for (e, c) in energy.iter_mut().zip(band.values()) {
                *e += c * c;
            }
        }
        let energy = ScalarField::new(lw, lh, energy, level[0].deg_per_px())?;
        let up = upsample_level(&energy, k, w, h, dpp);
        for (a, v) in acc.iter_mut().zip(up.values()) {
            *a += wk * v;
        }
    }
    ScalarField::new(w, h, acc, dpp)
}

/// A clutter model that yields a non-negative dense map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum DenseModel {
    FeatureCongestion(FcConfig),
    EdgeDensity(EdgeThresholds),
    SubbandEnergy(SubbandConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Fc,
    Ed,
    Se,
}

impl FromStr for ModelKind {
    type Err = ClutterError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fc" => Ok(ModelKind::Fc),
            "ed" => Ok(ModelKind::Ed),
            "se" => Ok(ModelKind::Se),
            other => Err(ClutterError::InvalidParameter(format!(
                "unknown model '{other}' (expected fc, ed or se)"
            ))),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Fc => "fc",
            ModelKind::Ed => "ed",
            ModelKind::Se => "se",
        })
    }
}

impl DenseModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            DenseModel::FeatureCongestion(_) => ModelKind::Fc,
            DenseModel::EdgeDensity(_) => ModelKind::Ed,
            DenseModel::SubbandEnergy(_) => ModelKind::Se,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DenseModel::FeatureCongestion(_) => "feature_congestion",
            DenseModel::EdgeDensity(_) => "edge_density",
            DenseModel::SubbandEnergy(_) => "subband_energy",
        }
    }

    pub fn dense_map(&self, img: &RasterImage) -> Result<ScalarField> {
        match self {
            DenseModel::FeatureCongestion(cfg) => Ok(fc_map(img, cfg)?.map),
            DenseModel::EdgeDensity(_) => Ok(edge_density_dense(img)),
            DenseModel::SubbandEnergy(cfg) => subband_energy_dense(img, cfg),
        }
    }

    /// The model's own global score: the FC map mean, the edge ratio, or the
    /// subband entropy.
    pub fn global_score(&self, img: &RasterImage) -> Result<f64> {
        match self {
            DenseModel::FeatureCongestion(cfg) => Ok(fc_map(img, cfg)?.score),
            DenseModel::EdgeDensity(th) => edge_density_score(img, th),
            DenseModel::SubbandEnergy(cfg) => subband_entropy_score(img, cfg),
        }
    }
}

/// Foveated score of any dense model: the map mean times the PIFC.
pub fn foveated_score(
    model: &DenseModel,
    img: &RasterImage,
    fixation: Point,
    target: Point,
    cfg: &FoveationConfig,
) -> Result<FfcScore> {
    scorer_for(img, cfg, |work| model.dense_map(work))?.score(fixation, target)
}
