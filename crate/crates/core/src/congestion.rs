//! Feature Congestion: local variability of color, contrast and orientation
//! features across a Gaussian pyramid, collapsed by a per-feature max over
//! scales and combined by a weighted sum. The global score is the map mean.

use serde::{Deserialize, Serialize};

use crate::error::{ClutterError, Result};
use crate::imagecore::{
    centre_on_first, check_levels, gaussian_blur, gaussian_pyramid, srgb_to_lab, upsample_level, LabImage,
    OrientedFilterBank, RasterImage, ScalarField,
};
use crate::roi::{RoiSpec, TargetMask};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureWeights {
    pub color: f64,
    pub contrast: f64,
    pub orientation: f64,
}

impl Default for FeatureWeights {
    fn default() -> Self {
        Self {
            color: 1.0 / 3.0,
            contrast: 1.0 / 3.0,
            orientation: 1.0 / 3.0,
        }
    }
}

/// Divisors applied to each collapsed feature plane before weighting.
///
/// The defaults are the pixel standard deviations of each collapsed plane
/// over the synthetic calibration scenes in [`crate::synth::calibration_set`],
/// measured with all other settings at their defaults (see the
/// `calibrate_normalizers` example).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureNormalizers {
    pub color: f64,
    pub contrast: f64,
    pub orientation: f64,
}

impl Default for FeatureNormalizers {
    fn default() -> Self {
        Self {
            color: 10.90,
            contrast: 1.398,
            orientation: 16634.0,
        }
    }
}

/// Summary statistic of the local (a, b) covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ColorStatistic {
    /// `sqrt(var_a + var_b)`: total chroma spread.
    #[default]
    Trace,
    /// `det(cov)^(1/4)`: geometric-mean spread, the 2-D analogue of an
    /// ellipse-volume measure.
    Volume,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FcConfig {
    pub n_scales: usize,
    pub weights: FeatureWeights,
    pub normalizers: FeatureNormalizers,
    /// Std of the Gaussian pooling window, in degrees of visual angle. The
    /// window keeps this angular size at every pyramid level.
    pub pool_sigma_deg: f64,
    pub color_statistic: ColorStatistic,
    /// Difference-of-Gaussians centre and surround std, in pixels of the
    /// level being processed.
    pub dog_center_px: f64,
    pub dog_surround_px: f64,
    /// Std of the oriented filters, in pixels of the level being processed.
    pub orient_sigma_px: f64,
}

impl Default for FcConfig {
    fn default() -> Self {
        Self {
            n_scales: 3,
            weights: FeatureWeights::default(),
            normalizers: FeatureNormalizers::default(),
            pool_sigma_deg: 2.0,
            color_statistic: ColorStatistic::Trace,
            dog_center_px: 1.0,
            dog_surround_px: 3.0,
            orient_sigma_px: 2.0,
        }
    }
}

impl FcConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(ClutterError::InvalidParameter(msg));
        if self.n_scales == 0 {
            return bad("n_scales must be at least 1".into());
        }
        let w = self.weights;
        if [w.color, w.contrast, w.orientation]
            .iter()
            .any(|v| !v.is_finite() || *v < 0.0)
        {
            return bad(format!("feature weights must be non-negative, got {w:?}"));
        }
        if w.color + w.contrast + w.orientation == 0.0 {
            return bad("feature weights are all zero".into());
        }
        let n = self.normalizers;
        if [n.color, n.contrast, n.orientation]
            .iter()
            .any(|v| !v.is_finite() || *v <= 0.0)
        {
            return bad(format!("feature normalizers must be positive, got {n:?}"));
        }
        for (name, v) in [
            ("pool_sigma_deg", self.pool_sigma_deg),
            ("dog_center_px", self.dog_center_px),
            ("dog_surround_px", self.dog_surround_px),
            ("orient_sigma_px", self.orient_sigma_px),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if self.dog_surround_px <= self.dog_center_px {
            return bad("DoG surround must be wider than its centre".into());
        }
        Ok(())
    }

    fn pool_sigma_px(&self, deg_per_px: f64) -> f64 {
        self.pool_sigma_deg / deg_per_px
    }
}

/// The dense Feature Congestion map and its mean.
#[derive(Debug, Clone)]
pub struct FcResult {
    pub map: ScalarField,
    pub score: f64,
    /// Collapsed, normalized (but unweighted) feature planes.
    pub color: ScalarField,
    pub contrast: ScalarField,
    pub orientation: ScalarField,
}

/// Local spread of one or more channels under a Gaussian window: the square
/// root of the summed local variances, or the fourth root of the covariance
/// determinant for two channels under [`ColorStatistic::Volume`].
fn local_spread(channels: &[ScalarField], sigma_px: f64, stat: ColorStatistic) -> ScalarField {
    let centred: Vec<ScalarField> = channels.iter().map(centre_on_first).collect();
    let means: Vec<ScalarField> = centred.iter().map(|c| gaussian_blur(c, sigma_px)).collect();
    let vars: Vec<ScalarField> = centred
        .iter()
        .zip(&means)
        .map(|(c, m)| {
            let sq = gaussian_blur(&c.map(|v| v * v), sigma_px);
            sq.zip_map(m, |s, m| (s - m * m).max(0.0))
        })
        .collect();
    match stat {
        ColorStatistic::Trace => {
            let mut total = vars[0].clone();
            for v in &vars[1..] {
                total = total.zip_map(v, |a, b| a + b);
            }
            total.map(f64::sqrt)
        }
        ColorStatistic::Volume => {
            assert_eq!(channels.len(), 2, "volume statistic needs two channels");
            let cross = gaussian_blur(&centred[0].zip_map(&centred[1], |a, b| a * b), sigma_px);
            let (w, h) = cross.dims();
            let mut values = Vec::with_capacity(w * h);
            for i in 0..w * h {
                let cov = cross.values()[i] - means[0].values()[i] * means[1].values()[i];
                let det = vars[0].values()[i] * vars[1].values()[i] - cov * cov;
                values.push(det.max(0.0).sqrt().sqrt());
            }
            ScalarField::from_raw(w, h, values, cross.deg_per_px())
        }
    }
}

fn color_level(a: &ScalarField, b: &ScalarField, cfg: &FcConfig) -> ScalarField {
    local_spread(
        &[a.clone(), b.clone()],
        cfg.pool_sigma_px(a.deg_per_px()),
        cfg.color_statistic,
    )
}

fn contrast_level(l: &ScalarField, cfg: &FcConfig) -> ScalarField {
    let d = centre_on_first(l);
    let center = gaussian_blur(&d, cfg.dog_center_px);
    let surround = gaussian_blur(&d, cfg.dog_surround_px);
    let dog = center.zip_map(&surround, |c, s| c - s);
    local_spread(&[dog], cfg.pool_sigma_px(l.deg_per_px()), ColorStatistic::Trace)
}

fn orientation_level(l: &ScalarField, cfg: &FcConfig) -> ScalarField {
    let bank = OrientedFilterBank::evenly_spaced(4, cfg.orient_sigma_px);
    let e = bank.energy(&centre_on_first(l));
    let opp_a = e[0].zip_map(&e[2], |p, q| p - q);
    let opp_b = e[1].zip_map(&e[3], |p, q| p - q);
    local_spread(
        &[opp_a, opp_b],
        cfg.pool_sigma_px(l.deg_per_px()),
        ColorStatistic::Trace,
    )
}

fn level_of(lab: &LabImage, scale: usize, cfg: &FcConfig) -> Result<LabImage> {
    cfg.validate()?;
    if scale >= cfg.n_scales {
        return Err(ClutterError::InvalidParameter(format!(
            "scale {scale} out of range for {} scales",
            cfg.n_scales
        )));
    }
    let pick = |f: &ScalarField| -> Result<ScalarField> {
        Ok(gaussian_pyramid(&centre_on_first(f), scale + 1)?.swap_remove(scale))
    };
    Ok(LabImage {
        l: pick(&lab.l)?,
        a: pick(&lab.a)?,
        b: pick(&lab.b)?,
    })
}

/// Chromatic variability at pyramid level `scale`, at that level's
/// resolution.
pub fn color_clutter(lab: &LabImage, scale: usize, cfg: &FcConfig) -> Result<ScalarField> {
    let level = level_of(lab, scale, cfg)?;
    Ok(color_level(&level.a, &level.b, cfg))
}

/// Local std of a centre-surround response on L at pyramid level `scale`.
pub fn contrast_clutter(lab: &LabImage, scale: usize, cfg: &FcConfig) -> Result<ScalarField> {
    let level = level_of(lab, scale, cfg)?;
    Ok(contrast_level(&level.l, cfg))
}

/// Local variability of the opponent energies (0°-90°, 45°-135°) at pyramid
/// level `scale`.
pub fn orientation_clutter(lab: &LabImage, scale: usize, cfg: &FcConfig) -> Result<ScalarField> {
    let level = level_of(lab, scale, cfg)?;
    Ok(orientation_level(&level.l, cfg))
}

pub fn fc_map(img: &RasterImage, cfg: &FcConfig) -> Result<FcResult> {
    fc_map_lab(&srgb_to_lab(img), cfg)
}

pub fn fc_map_lab(lab: &LabImage, cfg: &FcConfig) -> Result<FcResult> {
    cfg.validate()?;
    let (w, h) = lab.dims();
    let dpp = lab.deg_per_px();
    check_levels(w, h, cfg.n_scales)?;
    // Every feature is offset-invariant; centring first keeps constant
    // inputs at exact zeros through the pyramid.
    let pl = gaussian_pyramid(&centre_on_first(&lab.l), cfg.n_scales)?;
    let pa = gaussian_pyramid(&centre_on_first(&lab.a), cfg.n_scales)?;
    let pb = gaussian_pyramid(&centre_on_first(&lab.b), cfg.n_scales)?;

    let mut collapsed: Option<[ScalarField; 3]> = None;
    for k in 0..cfg.n_scales {
        let planes = [
            color_level(&pa[k], &pb[k], cfg),
            contrast_level(&pl[k], cfg),
            orientation_level(&pl[k], cfg),
        ]
        .map(|p| upsample_level(&p, k, w, h, dpp));
        collapsed = Some(match collapsed {
            None => planes,
            Some(prev) => {
                let [c0, c1, c2] = prev;
                let [n0, n1, n2] = planes;
                [
                    c0.zip_map(&n0, f64::max),
                    c1.zip_map(&n1, f64::max),
                    c2.zip_map(&n2, f64::max),
                ]
            }
        });
    }
    let [color, contrast, orientation] = collapsed.expect("n_scales >= 1");
    let n = cfg.normalizers;
    let color = color.map(|v| v / n.color);
    let contrast = contrast.map(|v| v / n.contrast);
    let orientation = orientation.map(|v| v / n.orientation);

    let wt = cfg.weights;
    let mut values = Vec::with_capacity(w * h);
    for i in 0..w * h {
        values.push(
            wt.color * color.values()[i]
                + wt.contrast * contrast.values()[i]
                + wt.orientation * orientation.values()[i],
        );
    }
    let map = ScalarField::from_raw(w, h, values, dpp);
    let score = map.mean();
    Ok(FcResult {
        map,
        score,
        color,
        contrast,
        orientation,
    })
}

/// Mean of `map` over the clipped ROI, skipping masked pixels.
pub fn roi_mean(map: &ScalarField, roi: &RoiSpec, mask: &TargetMask) -> Result<f64> {
    let rect = roi.pixel_rect(map.width(), map.height(), map.deg_per_px())?;
    let (mut acc, mut n) = (0.0, 0usize);
    for y in rect.y0..rect.y1 {
        for x in rect.x0..rect.x1 {
            if !mask.is_masked(x, y) {
                acc += map.get(x, y);
                n += 1;
            }
        }
    }
    if n == 0 {
        return Err(ClutterError::FullyMaskedRoi);
    }
    Ok(acc / n as f64)
}

/// ROI clutter score: the map mean over a target-centred window.
pub fn fc_roi_score(result: &FcResult, roi: &RoiSpec, mask: &TargetMask) -> Result<f64> {
    roi_mean(&result.map, roi, mask)
}

/// Mean over all unmasked pixels of the map.
pub fn masked_mean(map: &ScalarField, mask: &TargetMask) -> Result<f64> {
    let Some(rect) = mask.rect else {
        return Ok(map.mean());
    };
    let total = map.width() * map.height();
    if rect.area() >= total {
        return Err(ClutterError::InvalidParameter(
            "target mask covers the whole image".into(),
        ));
    }
    let mut acc = 0.0;
    for y in 0..map.height() {
        for (x, v) in map.row(y).iter().enumerate() {
            if !rect.contains(x, y) {
                acc += v;
            }
        }
    }
    Ok(acc / (total - rect.area()) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imagecore::Point;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn plane(w: usize, h: usize, dpp: f64, f: impl FnMut(usize, usize) -> f64) -> ScalarField {
        ScalarField::from_fn(w, h, dpp, f).unwrap()
    }

    fn lab_from(l: ScalarField, a: ScalarField, b: ScalarField) -> LabImage {
        LabImage::new(l, a, b).unwrap()
    }

    /// Pooling window of 4 px at 0.5 deg/px.
    fn small_pool() -> FcConfig {
        FcConfig {
            pool_sigma_deg: 2.0,
            ..FcConfig::default()
        }
    }

    #[test]
    fn uniform_color_is_zero() {
        let lab = lab_from(
            plane(48, 40, 0.5, |_, _| 61.3),
            plane(48, 40, 0.5, |_, _| 17.2),
            plane(48, 40, 0.5, |_, _| -40.7),
        );
        for k in 0..3 {
            let c = color_clutter(&lab, k, &small_pool()).unwrap();
            assert!(c.max() < 1e-9);
            assert!(contrast_clutter(&lab, k, &small_pool()).unwrap().max() < 1e-9);
            assert!(orientation_clutter(&lab, k, &small_pool()).unwrap().max() < 1e-9);
        }
    }

    #[test]
    fn two_tone_boundary_dominates() {
        let (w, h) = (64, 32);
        let lab = lab_from(
            plane(w, h, 0.5, |_, _| 50.0),
            plane(w, h, 0.5, |x, _| if x < 32 { -10.0 } else { 10.0 }),
            plane(w, h, 0.5, |_, _| 0.0),
        );
        let c = color_clutter(&lab, 0, &small_pool()).unwrap();
        let boundary = c.get(31, 16).min(c.get(32, 16));
        assert!(boundary > c.get(4, 16) && boundary > c.get(60, 16));
    }

    #[test]
    fn chroma_noise_matches_analytic_spread() {
        // a, b uniform on [-A, A] have std A/sqrt(3) each; the trace
        // statistic estimates sqrt(2) * A/sqrt(3).
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let amp = 12.0;
        let (w, h) = (96, 96);
        let mut noise = || plane(w, h, 0.25, |_, _| rng.random_range(-amp..amp));
        let a = noise();
        let b = noise();
        let lab = lab_from(plane(w, h, 0.25, |_, _| 50.0), a, b);
        let c = color_clutter(&lab, 0, &small_pool()).unwrap();
        let analytic = (2.0f64).sqrt() * amp / 3f64.sqrt();
        assert!(
            (c.mean() - analytic).abs() / analytic < 0.10,
            "{} vs {analytic}",
            c.mean()
        );
    }

    #[test]
    fn contrast_is_homogeneous() {
        let checker = |amp: f64| {
            plane(64, 64, 0.5, move |x, y| {
                50.0 + if (x / 4 + y / 4) % 2 == 0 { amp } else { -amp }
            })
        };
        let zeros = plane(64, 64, 0.5, |_, _| 0.0);
        let full = lab_from(checker(20.0), zeros.clone(), zeros.clone());
        let half = lab_from(checker(10.0), zeros.clone(), zeros);
        let a = contrast_clutter(&full, 0, &small_pool()).unwrap().mean();
        let b = contrast_clutter(&half, 0, &small_pool()).unwrap().mean();
        assert!((a / b - 2.0).abs() < 0.1, "{a} / {b}");
    }

    #[test]
    fn contrast_peaks_at_step_edge() {
        let cfg = small_pool();
        let l = plane(80, 40, 0.5, |x, _| if x < 40 { 30.0 } else { 70.0 });
        let zeros = plane(80, 40, 0.5, |_, _| 0.0);
        let c = contrast_clutter(&lab_from(l, zeros.clone(), zeros), 0, &cfg).unwrap();
        let row = c.row(20);
        let argmax = (0..row.len())
            .max_by(|&i, &j| row[i].partial_cmp(&row[j]).unwrap())
            .unwrap();
        let sigma_px = cfg.pool_sigma_deg / 0.5;
        assert!((argmax as f64 - 39.5).abs() <= sigma_px, "max at {argmax}");
    }

    fn grating(angle: f64, x: usize, y: usize) -> f64 {
        let k = std::f64::consts::SQRT_2 / 2.0;
        let (s, c) = angle.sin_cos();
        10.0 * (k * (x as f64 * c + y as f64 * s)).cos()
    }

    #[test]
    fn uniform_orientation_has_little_variability() {
        let (w, h) = (96, 96);
        let zeros = plane(w, h, 0.5, |_, _| 0.0);
        let single = plane(w, h, 0.5, |x, y| 50.0 + grating(0.0, x, y));
        let plaid = plane(w, h, 0.5, |x, y| {
            50.0 + grating(0.0, x, y) + grating(std::f64::consts::FRAC_PI_2, x, y)
        });
        let cfg = small_pool();
        let o1 = orientation_clutter(&lab_from(single, zeros.clone(), zeros.clone()), 0, &cfg).unwrap();
        let o2 = orientation_clutter(&lab_from(plaid, zeros.clone(), zeros), 0, &cfg).unwrap();
        let interior = |f: &ScalarField| f.crop(28, 28, 68, 68).unwrap().mean();
        assert!(
            interior(&o1) < 0.05 * interior(&o2),
            "{} vs {}",
            interior(&o1),
            interior(&o2)
        );
    }

    #[test]
    fn plaid_beats_blank() {
        let (w, h) = (128, 64);
        let zeros = plane(w, h, 0.5, |_, _| 0.0);
        let l = plane(w, h, 0.5, |x, y| {
            if x < 64 {
                50.0 + grating(0.0, x, y) + grating(std::f64::consts::FRAC_PI_2, x, y)
            } else {
                50.0
            }
        });
        let o = orientation_clutter(&lab_from(l, zeros.clone(), zeros), 0, &small_pool()).unwrap();
        assert!(o.crop(0, 0, 64, 64).unwrap().mean() > o.crop(64, 0, 128, 64).unwrap().mean());
    }

    fn textured(seed: u64, w: usize, h: usize) -> RasterImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        RasterImage::from_fn(w, h, 0.1, |x, y| {
            let base = 0.5 + 0.3 * ((x as f64 * 0.37).sin() * (y as f64 * 0.21).cos());
            let j: f64 = rng.random_range(-0.15..0.15);
            [
                (base + j).clamp(0.0, 1.0),
                (0.4 + j * 0.5).clamp(0.0, 1.0),
                (0.6 - j).clamp(0.0, 1.0),
            ]
        })
        .unwrap()
    }

    #[test]
    fn uniform_gray_scores_zero() {
        let img = RasterImage::uniform(64, 48, [0.5, 0.5, 0.5], 0.044).unwrap();
        let r = fc_map(&img, &FcConfig::default()).unwrap();
        assert!(r.score < 1e-6);
    }

    #[test]
    fn score_is_map_mean_and_non_negative() {
        let r = fc_map(&textured(3, 80, 60), &FcConfig::default()).unwrap();
        assert!((r.score - r.map.mean()).abs() < 1e-9);
        assert!(r.map.min() >= 0.0);
        for p in [&r.color, &r.contrast, &r.orientation] {
            assert!(p.min() >= 0.0);
        }
    }

    #[test]
    fn added_chroma_texture_raises_score() {
        let (w, h) = (96, 64);
        let base = RasterImage::from_fn(w, h, 0.1, |x, _| {
            let v = 0.3 + 0.4 * x as f64 / w as f64;
            [v, v, v]
        })
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let tex = RasterImage::from_fn(w, h, 0.1, |x, y| {
            let p = base.get(x, y);
            if x < w / 2 {
                let d: f64 = rng.random_range(-0.2..0.2);
                [(p[0] + d).clamp(0.0, 1.0), p[1], (p[2] - d).clamp(0.0, 1.0)]
            } else {
                p
            }
        })
        .unwrap();
        let cfg = FcConfig::default();
        assert!(fc_map(&tex, &cfg).unwrap().score > fc_map(&base, &cfg).unwrap().score);
    }

    #[test]
    fn weights_scale_linearly() {
        let img = textured(5, 64, 64);
        let cfg = FcConfig::default();
        let mut doubled = cfg.clone();
        doubled.weights = FeatureWeights {
            color: 2.0 * cfg.weights.color,
            contrast: 2.0 * cfg.weights.contrast,
            orientation: 2.0 * cfg.weights.orientation,
        };
        let a = fc_map(&img, &cfg).unwrap().score;
        let b = fc_map(&img, &doubled).unwrap().score;
        assert!((b - 2.0 * a).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn collapse_dominates_each_scale() {
        let img = textured(9, 64, 64);
        let cfg = FcConfig::default();
        let r = fc_map(&img, &cfg).unwrap();
        let lab = srgb_to_lab(&img);
        for k in 0..cfg.n_scales {
            let c = upsample_level(&color_clutter(&lab, k, &cfg).unwrap(), k, 64, 64, 0.1);
            for (full, s) in r.color.values().iter().zip(c.values()) {
                assert!(*full >= s / cfg.normalizers.color - 1e-12);
            }
        }
    }

    #[test]
    fn rotation_by_ninety_degrees_keeps_score() {
        // Odd sizes keep even-sample decimation aligned under rotation.
        let img = textured(13, 129, 97);
        let rot = RasterImage::from_fn(97, 129, 0.1, |x, y| img.get(y, 96 - x)).unwrap();
        let cfg = FcConfig::default();
        let a = fc_map(&img, &cfg).unwrap().score;
        let b = fc_map(&rot, &cfg).unwrap().score;
        assert!((a - b).abs() / a < 0.01, "{a} vs {b}");
    }

    #[test]
    fn roi_scores() {
        let map = plane(24, 24, 1.0, |x, y| match (x < 12, y < 12) {
            (true, true) => 1.0,
            (false, true) => 2.0,
            (true, false) => 3.0,
            (false, false) => 4.0,
        });
        let result = FcResult {
            score: map.mean(),
            color: map.clone(),
            contrast: map.clone(),
            orientation: map.clone(),
            map: map.clone(),
        };
        let none = TargetMask::none();
        let roi = RoiSpec::new(Point::new(12.0, 12.0), 6.0).unwrap();
        assert!((fc_roi_score(&result, &roi, &none).unwrap() - 2.5).abs() < 1e-12);
        let full = RoiSpec::new(Point::new(12.0, 12.0), 24.0).unwrap();
        assert!((fc_roi_score(&result, &full, &none).unwrap() - result.score).abs() < 1e-12);

        let half_zero = plane(24, 24, 1.0, |x, _| if x < 12 { 0.0 } else { 5.0 });
        let left = RoiSpec::new(Point::new(5.0, 12.0), 6.0).unwrap();
        assert_eq!(roi_mean(&half_zero, &left, &none).unwrap(), 0.0);
        let off = RoiSpec::new(Point::new(-20.0, 12.0), 6.0).unwrap();
        assert!(matches!(roi_mean(&half_zero, &off, &none), Err(ClutterError::EmptyRoi)));
    }

    #[test]
    fn config_validation() {
        let cfg = FcConfig {
            weights: FeatureWeights {
                color: 0.0,
                contrast: 0.0,
                orientation: 0.0,
            },
            ..FcConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = FcConfig {
            n_scales: 0,
            ..FcConfig::default()
        };
        assert!(cfg.validate().is_err());
        let lab = srgb_to_lab(&RasterImage::uniform(8, 8, [0.1, 0.2, 0.3], 1.0).unwrap());
        assert!(color_clutter(&lab, 3, &FcConfig::default()).is_err());
    }
}
