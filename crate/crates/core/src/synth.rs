//! Deterministic synthetic scenes and forced-fixation trial layouts.
//!
//! Scenes are layered rectangles, discs, grating patches and strokes over a
//! smooth background, with a small target disc drawn last. Object count sets
//! how cluttered a scene is.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::congestion::fc_map;
use crate::error::{ClutterError, Result};
use crate::foveation::{scorer_for, FfcConfig};
use crate::imagecore::{Point, RasterImage};
use crate::stats::TrialRecord;

pub const FIXTURE_WIDTH: usize = 512;
pub const FIXTURE_HEIGHT: usize = 380;
pub const FIXTURE_DEG_PER_PX: f64 = 0.044;
pub const FIXTURE_COUNT: usize = 12;
pub const FIXTURE_ECCENTRICITIES: [f64; 4] = [1.0, 4.0, 9.0, 15.0];
pub const TARGET_DIAMETER_DEG: f64 = 0.6;

pub const SYNTH_TRIAL_COUNT: usize = 46;
pub const SYNTH_ALPHA: f64 = 0.3;
pub const SYNTH_SIGMA: f64 = 0.05;
pub const SYNTH_SEED: u64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneParams {
    pub width: usize,
    pub height: usize,
    pub deg_per_px: f64,
    pub n_objects: usize,
    pub seed: u64,
    /// Target disc centre, if any.
    pub target: Option<Point>,
}

fn lerp3(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
    [
        a[0] + (b[0] - a[0]) * t,
        a[1] + (b[1] - a[1]) * t,
        a[2] + (b[2] - a[2]) * t,
    ]
}

fn random_color(rng: &mut ChaCha8Rng) -> [f64; 3] {
    [
        rng.random_range(0.05..0.95),
        rng.random_range(0.05..0.95),
        rng.random_range(0.05..0.95),
    ]
}

pub fn synth_scene(p: &SceneParams) -> Result<RasterImage> {
    let (w, h) = (p.width, p.height);
    if w < 8 || h < 8 {
        return Err(ClutterError::InvalidParameter(format!("scene {w}x{h} is too small")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let c0 = random_color(&mut rng).map(|c| 0.3 + 0.4 * c);
    let c1 = random_color(&mut rng).map(|c| 0.3 + 0.4 * c);
    let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let (s, c) = angle.sin_cos();
    let span = (w as f64).hypot(h as f64);
    let mut px: Vec<[f64; 3]> = (0..w * h)
        .map(|i| {
            let (x, y) = ((i % w) as f64, (i / w) as f64);
            lerp3(c0, c1, 0.5 + (x * c + y * s) / span)
        })
        .collect();

    let max_side = (w.min(h) as f64 * 0.25).max(8.0);
    for _ in 0..p.n_objects {
        let color = random_color(&mut rng);
        let cx = rng.random_range(0.0..w as f64);
        let cy = rng.random_range(0.0..h as f64);
        let kind = rng.random_range(0..4u8);
        let size = rng.random_range(4.0..max_side);
        let (x0, x1) = ((cx - size).max(0.0) as usize, ((cx + size).ceil() as usize).min(w));
        let (y0, y1) = ((cy - size).max(0.0) as usize, ((cy + size).ceil() as usize).min(h));
        match kind {
            0 => {
                let (hw, hh) = (size * rng.random_range(0.3..1.0), size * rng.random_range(0.3..1.0));
                for y in y0..y1 {
                    for x in x0..x1 {
                        if (x as f64 - cx).abs() <= hw && (y as f64 - cy).abs() <= hh {
                            px[y * w + x] = color;
                        }
                    }
                }
            }
            1 => {
                let r = size * rng.random_range(0.3..1.0);
                for y in y0..y1 {
                    for x in x0..x1 {
                        if (x as f64 - cx).hypot(y as f64 - cy) <= r {
                            px[y * w + x] = color;
                        }
                    }
                }
            }
            2 => {
                let other = random_color(&mut rng);
                let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
                let period = rng.random_range(3.0..16.0);
                let (gs, gc) = theta.sin_cos();
                for y in y0..y1 {
                    for x in x0..x1 {
                        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                        if dx.abs() <= size * 0.8 && dy.abs() <= size * 0.8 {
                            let phase = (dx * gc + dy * gs) * std::f64::consts::TAU / period;
                            px[y * w + x] = lerp3(color, other, 0.5 + 0.5 * phase.sin());
                        }
                    }
                }
            }
            _ => {
                let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
                let half_width = rng.random_range(0.5..2.0);
                let (ls, lc) = theta.sin_cos();
                for y in y0..y1 {
                    for x in x0..x1 {
                        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                        let along = dx * lc + dy * ls;
                        let across = -dx * ls + dy * lc;
                        if along.abs() <= size && across.abs() <= half_width {
                            px[y * w + x] = color;
                        }
                    }
                }
            }
        }
    }

    if let Some(t) = p.target {
        let r = TARGET_DIAMETER_DEG / p.deg_per_px / 2.0;
        for (i, v) in px.iter_mut().enumerate() {
            let (x, y) = ((i % w) as f64, (i / w) as f64);
            if (x - t.x).hypot(y - t.y) <= r {
                *v = [0.95, 0.9, 0.1];
            }
        }
    }
    RasterImage::new(w, h, px, p.deg_per_px)
}

/// One fixture scene with its target and the fixation used at each
/// eccentricity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub image_id: String,
    pub params: SceneParams,
    pub target: Point,
    /// `(eccentricity_deg, fixation)` pairs, in increasing eccentricity.
    pub fixations: Vec<(f64, Point)>,
}

impl Fixture {
    pub fn render(&self) -> Result<RasterImage> {
        synth_scene(&self.params)
    }
}

/// Horizontal fixation offsets: targets sit near one side and fixations move
/// away towards the other side.
fn place(target: Point, ecc: &[f64], leftward: bool, dpp: f64) -> Vec<(f64, Point)> {
    ecc.iter()
        .map(|&e| {
            let d = e / dpp;
            let x = if leftward { target.x - d } else { target.x + d };
            (e, Point::new(x, target.y))
        })
        .collect()
}

/// The bundled fixture set: [`FIXTURE_COUNT`] scenes of increasing object
/// count at the 0.044 deg/px operating point.
pub fn fixture_set() -> Vec<Fixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_F1C5);
    let (w, h, dpp) = (FIXTURE_WIDTH, FIXTURE_HEIGHT, FIXTURE_DEG_PER_PX);
    // Keep a 6 deg ROI on the image: half-width 3 deg plus a pixel.
    let margin = (3.0 / dpp).ceil() + 1.0;
    (0..FIXTURE_COUNT)
        .map(|i| {
            let leftward = i % 2 == 0;
            let tx = if leftward {
                w as f64 - margin - 2.0
            } else {
                margin + 2.0
            };
            let ty = rng.random_range(margin..h as f64 - margin).round();
            let target = Point::new(tx, ty);
            let params = SceneParams {
                width: w,
                height: h,
                deg_per_px: dpp,
                n_objects: 20 + 15 * i,
                seed: 1000 + i as u64,
                target: Some(target),
            };
            Fixture {
                image_id: format!("scene_{i:02}"),
                params,
                target,
                fixations: place(target, &FIXTURE_ECCENTRICITIES, leftward, dpp),
            }
        })
        .collect()
}

/// Images used to calibrate the Feature Congestion normalizers.
pub fn calibration_set() -> Result<Vec<RasterImage>> {
    fixture_set().iter().map(Fixture::render).collect()
}

/// `clamp(1 - alpha * score + N(0, sigma), 0, 1)` per score.
pub fn synthetic_hit_rates(scores: &[f64], alpha: f64, sigma: f64, seed: u64) -> Result<Vec<f64>> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(ClutterError::InvalidParameter(format!(
            "noise sigma must be non-negative, got {sigma}"
        )));
    }
    let normal = Normal::new(0.0, sigma).expect("validated sigma");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(scores
        .iter()
        .map(|s| (1.0 - alpha * s + normal.sample(&mut rng)).clamp(0.0, 1.0))
        .collect())
}

/// Trial skeletons (hit rate 0) for every fixture and eccentricity, in
/// fixture order, truncated to `n`.
pub fn trial_layout(fixtures: &[Fixture], n: usize) -> Vec<TrialRecord> {
    fixtures
        .iter()
        .flat_map(|f| {
            f.fixations.iter().map(move |&(ecc, fix)| TrialRecord {
                image_id: f.image_id.clone(),
                fixation: fix,
                target: f.target,
                ecc_deg: ecc,
                hit_rate: 0.0,
            })
        })
        .take(n)
        .collect()
}

/// Rendered fixture images with generated trials.
#[derive(Debug, Clone)]
pub struct SyntheticTrials {
    pub images: Vec<(String, RasterImage)>,
    pub trials: Vec<TrialRecord>,
    /// Foveated scores the hit rates were generated from, one per trial.
    pub scores: Vec<f64>,
}

/// The first `n` fixture trials with hit rates drawn from their FFC under
/// `cfg` via [`synthetic_hit_rates`].
pub fn synthetic_trials(n: usize, cfg: &FfcConfig, alpha: f64, sigma: f64, seed: u64) -> Result<SyntheticTrials> {
    cfg.validate()?;
    let fixtures = fixture_set();
    let mut trials = trial_layout(&fixtures, n);
    let mut images = Vec::new();
    let mut scores = Vec::with_capacity(trials.len());
    for f in &fixtures {
        let mine: Vec<usize> = (0..trials.len())
            .filter(|&i| trials[i].image_id == f.image_id)
            .collect();
        if mine.is_empty() {
            continue;
        }
        let img = f.render()?;
        let scorer = scorer_for(&img, &cfg.foveation, |w| Ok(fc_map(w, &cfg.fc)?.map))?;
        for i in mine {
            scores.push(scorer.score(trials[i].fixation, trials[i].target)?.ffc);
        }
        images.push((f.image_id.clone(), img));
    }
    let hits = synthetic_hit_rates(&scores, alpha, sigma, seed)?;
    for (t, h) in trials.iter_mut().zip(hits) {
        t.hit_rate = h;
    }
    Ok(SyntheticTrials { images, trials, scores })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenes_are_deterministic_and_valid() {
        let f = &fixture_set()[3];
        let a = f.render().unwrap();
        let b = f.render().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dims(), (FIXTURE_WIDTH, FIXTURE_HEIGHT));
        let t = f.target;
        assert_eq!(a.get(t.x as usize, t.y as usize), [0.95, 0.9, 0.1]);
    }

    #[test]
    fn fixture_geometry() {
        let set = fixture_set();
        assert_eq!(set.len(), FIXTURE_COUNT);
        for f in &set {
            for &(ecc, fix) in &f.fixations {
                assert!(fix.x >= 0.0 && fix.x <= (FIXTURE_WIDTH - 1) as f64, "{fix:?}");
                assert!((fix.distance(&f.target) * FIXTURE_DEG_PER_PX - ecc).abs() < 1e-9);
            }
            let half = 3.0 / FIXTURE_DEG_PER_PX;
            assert!(f.target.x - half >= 0.0 && f.target.x + half <= FIXTURE_WIDTH as f64);
            assert!(f.target.y - half >= 0.0 && f.target.y + half <= FIXTURE_HEIGHT as f64);
        }
        assert_eq!(trial_layout(&set, 46).len(), 46);
    }

    #[test]
    fn hit_rates_are_clamped_and_seeded() {
        let s = [0.0, 0.5, 1.0, 10.0];
        let a = synthetic_hit_rates(&s, 1.0, 0.05, 3).unwrap();
        assert_eq!(a, synthetic_hit_rates(&s, 1.0, 0.05, 3).unwrap());
        assert!(a.iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(a[3], 0.0);
        assert!(synthetic_hit_rates(&s, 1.0, -1.0, 3).is_err());
    }
}
