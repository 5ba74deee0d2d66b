//! ROI size x distance metric sweep of score/hit-rate correlations.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::RwLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ClutterError, Result};
use crate::foveation::{scorer_for, FfcScore, FoveationConfig, Metric};
use crate::imagecore::RasterImage;
use crate::models::DenseModel;
use crate::stats::{bootstrap_correlation, CorrelationReport, TrialRecord, DEFAULT_BOOTSTRAP_B};

/// Resolves trial image ids to images.
pub trait ImageSource: Sync {
    fn load(&self, image_id: &str) -> Result<RasterImage>;
}

/// Images in a directory, found as `<dir>/<id>` or `<dir>/<id>.png`.
#[derive(Debug, Clone)]
pub struct DirImageSource {
    pub dir: PathBuf,
    pub deg_per_px: f64,
}

impl DirImageSource {
    pub fn new(dir: impl Into<PathBuf>, deg_per_px: f64) -> Self {
        Self {
            dir: dir.into(),
            deg_per_px,
        }
    }
}

impl ImageSource for DirImageSource {
    fn load(&self, image_id: &str) -> Result<RasterImage> {
        let direct = self.dir.join(image_id);
        let with_ext = self.dir.join(format!("{image_id}.png"));
        let path = [direct, with_ext]
            .into_iter()
            .find(|p| p.is_file())
            .ok_or_else(|| ClutterError::MissingImage(image_id.to_owned()))?;
        RasterImage::load(path, self.deg_per_px)
    }
}

/// In-memory images keyed by id.
#[derive(Debug, Clone, Default)]
pub struct MemoryImageSource(pub HashMap<String, RasterImage>);

impl ImageSource for MemoryImageSource {
    fn load(&self, image_id: &str) -> Result<RasterImage> {
        self.0
            .get(image_id)
            .cloned()
            .ok_or_else(|| ClutterError::MissingImage(image_id.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub roi_sides_deg: Vec<f64>,
    pub metrics: Vec<Metric>,
    pub bootstrap_b: usize,
    pub seed: u64,
    pub use_cache: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            roi_sides_deg: vec![4.0, 6.0, 8.0, 10.0, 12.0],
            metrics: Metric::ALL.to_vec(),
            bootstrap_b: DEFAULT_BOOTSTRAP_B,
            seed: 0,
            use_cache: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub roi_deg: f64,
    pub metric: Metric,
    pub report: CorrelationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub model: String,
    pub roi_sides_deg: Vec<f64>,
    pub metrics: Vec<Metric>,
    /// ROI-major, one per (roi, metric).
    pub cells: Vec<SweepCell>,
    /// Correlation of the non-foveated global score with hit rate.
    pub baseline: CorrelationReport,
}

type CacheKey = (String, [u64; 5], Metric);

/// Scores keyed by image, fixation, target, ROI side and metric. Reads are
/// shared; inserts take the write lock.
#[derive(Debug, Default)]
pub struct ScoreCache {
    inner: RwLock<HashMap<CacheKey, FfcScore>>,
}

impl ScoreCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn key(t: &TrialRecord, roi: f64, metric: Metric) -> CacheKey {
        let bits = [t.fixation.x, t.fixation.y, t.target.x, t.target.y, roi].map(f64::to_bits);
        (t.image_id.clone(), bits, metric)
    }

    fn get_all(&self, t: &TrialRecord, rois: &[f64], metrics: &[Metric]) -> Option<Vec<FfcScore>> {
        let map = self.inner.read().expect("cache lock");
        let mut out = Vec::with_capacity(rois.len() * metrics.len());
        for &r in rois {
            for &m in metrics {
                out.push(*map.get(&Self::key(t, r, m))?);
            }
        }
        Some(out)
    }

    fn insert_all(&self, t: &TrialRecord, rois: &[f64], metrics: &[Metric], scores: &[FfcScore]) {
        let mut map = self.inner.write().expect("cache lock");
        let mut it = scores.iter();
        for &r in rois {
            for &m in metrics {
                map.insert(Self::key(t, r, m), *it.next().expect("grid size"));
            }
        }
    }
}

/// Foveated scores of every trial at every (roi, metric), ROI-major per
/// trial. Images are processed in parallel; each is loaded and mapped once.
pub fn score_trials(
    trials: &[TrialRecord],
    model: &DenseModel,
    source: &dyn ImageSource,
    foveation: &FoveationConfig,
    rois: &[f64],
    metrics: &[Metric],
    cache: Option<&ScoreCache>,
) -> Result<Vec<Vec<FfcScore>>> {
    let mut by_image: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, t) in trials.iter().enumerate() {
        by_image.entry(t.image_id.as_str()).or_default().push(i);
    }
    let groups: Vec<(&str, Vec<usize>)> = by_image.into_iter().collect();
    let per_image: Vec<Vec<(usize, Vec<FfcScore>)>> = groups
        .par_iter()
        .map(|(id, idx)| -> Result<Vec<(usize, Vec<FfcScore>)>> {
            let pending: Vec<usize> = idx
                .iter()
                .copied()
                .filter(|&i| cache.is_none_or(|c| c.get_all(&trials[i], rois, metrics).is_none()))
                .collect();
            let scorer = if pending.is_empty() {
                None
            } else {
                let img = source.load(id)?;
                Some(scorer_for(&img, foveation, |work| model.dense_map(work))?)
            };
            idx.iter()
                .map(|&i| {
                    let t = &trials[i];
                    if let Some(hit) = cache.and_then(|c| c.get_all(t, rois, metrics)) {
                        return Ok((i, hit));
                    }
                    let scores = scorer
                        .as_ref()
                        .expect("scorer exists for uncached trials")
                        .score_grid(t.fixation, t.target, rois, metrics)?;
                    if let Some(c) = cache {
                        c.insert_all(t, rois, metrics, &scores);
                    }
                    Ok((i, scores))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut out = vec![Vec::new(); trials.len()];
    for (i, s) in per_image.into_iter().flatten() {
        out[i] = s;
    }
    Ok(out)
}

/// Bootstrap correlation of each (roi, metric) foveated score with hit rate,
/// plus the non-foveated baseline. Every cell uses the same seed.
pub fn sweep(
    trials: &[TrialRecord],
    model: &DenseModel,
    source: &dyn ImageSource,
    foveation: &FoveationConfig,
    cfg: &SweepConfig,
) -> Result<SweepTable> {
    if cfg.roi_sides_deg.is_empty() || cfg.metrics.is_empty() {
        return Err(ClutterError::InvalidParameter(
            "sweep needs at least one ROI size and metric".into(),
        ));
    }
    let cache = cfg.use_cache.then(ScoreCache::new);
    let scores = score_trials(
        trials,
        model,
        source,
        foveation,
        &cfg.roi_sides_deg,
        &cfg.metrics,
        cache.as_ref(),
    )?;
    let hits: Vec<f64> = trials.iter().map(|t| t.hit_rate).collect();
    let n_metrics = cfg.metrics.len();
    let jobs: Vec<(usize, f64, Metric)> = cfg
        .roi_sides_deg
        .iter()
        .enumerate()
        .flat_map(|(ri, &r)| {
            cfg.metrics
                .iter()
                .enumerate()
                .map(move |(mi, &m)| (ri * n_metrics + mi, r, m))
        })
        .collect();
    let cells = jobs
        .par_iter()
        .map(|&(k, roi_deg, metric)| {
            let x: Vec<f64> = scores.iter().map(|s| s[k].ffc).collect();
            Ok(SweepCell {
                roi_deg,
                metric,
                report: bootstrap_correlation(&x, &hits, cfg.bootstrap_b, cfg.seed)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let plain: Vec<f64> = scores.iter().map(|s| s[0].fc).collect();
    let baseline = bootstrap_correlation(&plain, &hits, cfg.bootstrap_b, cfg.seed)?;
    Ok(SweepTable {
        model: model.name().to_owned(),
        roi_sides_deg: cfg.roi_sides_deg.clone(),
        metrics: cfg.metrics.clone(),
        cells,
        baseline,
    })
}

pub const SWEEP_CSV_HEADER: [&str; 12] = [
    "roi_deg",
    "metric",
    "r_observed",
    "r_mean",
    "r_std",
    "ci_low",
    "ci_high",
    "p_value",
    "n",
    "df",
    "bootstrap_b",
    "seed",
];

impl SweepTable {
    pub fn cell(&self, roi_deg: f64, metric: Metric) -> Option<&SweepCell> {
        self.cells.iter().find(|c| c.roi_deg == roi_deg && c.metric == metric)
    }

    /// One row per cell.
    pub fn write_csv(&self, writer: impl std::io::Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(SWEEP_CSV_HEADER)?;
        for c in &self.cells {
            let r = &c.report;
            w.write_record([
                c.roi_deg.to_string(),
                c.metric.to_string(),
                r.r_observed.to_string(),
                r.r_mean.to_string(),
                r.r_std.to_string(),
                r.ci_low.to_string(),
                r.ci_high.to_string(),
                r.p_value.to_string(),
                r.n.to_string(),
                r.df.to_string(),
                r.bootstrap_b.to_string(),
                r.seed.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// ROI sizes down, metrics across; entries are `r_mean ± r_std`.
    pub fn to_text(&self) -> String {
        let col = 18;
        let mut s = String::new();
        let b = &self.baseline;
        let _ = writeln!(
            s,
            "model: {}  n = {}  B = {}  seed = {}  (r_mean ± bootstrap std)",
            self.model, b.n, b.bootstrap_b, b.seed
        );
        let _ = write!(s, "{:<10}", "ROI (deg)");
        for m in &self.metrics {
            let _ = write!(s, "{:>col$}", m.as_str().to_uppercase());
        }
        s.push('\n');
        for &roi in &self.roi_sides_deg {
            let _ = write!(s, "{:<10}", roi);
            for &m in &self.metrics {
                let entry = match self.cell(roi, m) {
                    Some(c) => format!("{:.3} ± {:.3}", c.report.r_mean, c.report.r_std),
                    None => "-".to_owned(),
                };
                let _ = write!(s, "{entry:>col$}");
            }
            s.push('\n');
        }
        let _ = writeln!(
            s,
            "non-foveated baseline: {:.3} ± {:.3} (p = {:.4})",
            b.r_mean, b.r_std, b.p_value
        );
        s
    }
}
