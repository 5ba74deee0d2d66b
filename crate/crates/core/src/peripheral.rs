//! Log-polar peripheral pooling architecture.
//!
//! Each pooling region is the product of an angular window `h_n(theta)` and
//! a log-eccentricity window `g_n(e)`, both built from the same raised-cosine
//! profile [`window_f`]. Neighbouring windows cross-fade so that each family
//! sums to one. Regions lying wholly inside the fovea are dropped; the fovea
//! is left unpooled.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{ClutterError, Result};
use crate::imagecore::{check_deg_per_px, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ArchParams {
    /// Radial/angular scaling factor; smaller means more, smaller regions.
    pub scale: f64,
    /// Outer visual radius covered by the windows, degrees.
    pub visual_radius_deg: f64,
    pub fovea_deg: f64,
    /// Log-eccentricity origin, degrees.
    pub e0_deg: f64,
    /// Cross-fade width as a fraction of the window spacing.
    pub t0: f64,
    /// Overrides for the region counts derived from `scale`.
    pub n_theta: Option<usize>,
    pub n_ecc: Option<usize>,
    /// Extra rotation applied to every angular window centre, radians.
    pub rotation_rad: f64,
}

impl Default for ArchParams {
    fn default() -> Self {
        Self {
            scale: 0.25,
            visual_radius_deg: 24.0,
            fovea_deg: 2.0,
            e0_deg: 0.25,
            t0: 0.5,
            n_theta: None,
            n_ecc: None,
            rotation_rad: 0.0,
        }
    }
}

impl ArchParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ClutterError::InvalidParameter(m));
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return bad(format!("scale must be positive, got {}", self.scale));
        }
        if !(self.e0_deg > 0.0 && self.e0_deg < self.fovea_deg && self.fovea_deg < self.visual_radius_deg)
            || !self.visual_radius_deg.is_finite()
        {
            return bad(format!(
                "need 0 < e0 < fovea < visual radius, got e0={} fovea={} radius={}",
                self.e0_deg, self.fovea_deg, self.visual_radius_deg
            ));
        }
        if !(self.t0 > 0.0 && self.t0 <= 1.0) {
            return bad(format!("t0 must lie in (0, 1], got {}", self.t0));
        }
        if self.n_theta == Some(0) || self.n_ecc == Some(0) {
            return bad("region counts must be positive".into());
        }
        if !self.rotation_rad.is_finite() {
            return bad("rotation must be finite".into());
        }
        if self.n_theta() == 0 || self.n_ecc() == 0 {
            return bad(format!("scale {} yields no regions", self.scale));
        }
        Ok(())
    }

    /// Number of angular windows, `round(2 pi / s)` unless overridden.
    pub fn n_theta(&self) -> usize {
        self.n_theta.unwrap_or_else(|| (TAU / self.scale).round() as usize)
    }

    /// Number of eccentricity windows, `round(ln(e_r / e_0) / s)` unless
    /// overridden.
    pub fn n_ecc(&self) -> usize {
        self.n_ecc
            .unwrap_or_else(|| ((self.visual_radius_deg / self.e0_deg).ln() / self.scale).round() as usize)
    }

    pub fn w_theta(&self) -> f64 {
        TAU / self.n_theta() as f64
    }

    pub fn w_ecc(&self) -> f64 {
        (self.visual_radius_deg.ln() - self.e0_deg.ln()) / self.n_ecc() as f64
    }
}

/// Raised-cosine window profile: a `cos^2` rise on
/// `(-(1+t0)/2, (t0-1)/2]`, a unit plateau up to `(1-t0)/2`, and a
/// `1 - cos^2` fall that reaches zero at `(1+t0)/2`.
pub fn window_f(x: f64, t0: f64) -> f64 {
    let rise_start = -(1.0 + t0) / 2.0;
    let plateau_start = (t0 - 1.0) / 2.0;
    let plateau_end = (1.0 - t0) / 2.0;
    let fall_end = (1.0 + t0) / 2.0;
    if x > rise_start && x <= plateau_start {
        (PI / 2.0 * ((x - plateau_start) / t0)).cos().powi(2)
    } else if x > plateau_start && x <= plateau_end {
        1.0
    } else if x > plateau_end && x <= fall_end {
        1.0 - (PI / 2.0 * ((x - fall_end) / t0)).cos().powi(2)
    } else {
        0.0
    }
}

/// Wraps an angle into `(-pi, pi]`.
fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(TAU) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

/// Angular window `n`, centred on `w_theta * n + w_theta / 2` (+ rotation).
pub fn h_window(theta: f64, n: usize, params: &ArchParams) -> f64 {
    let w = params.w_theta();
    let center = w * n as f64 + w / 2.0 + params.rotation_rad;
    window_f(wrap_angle(theta - center) / w, params.t0)
}

/// Log-eccentricity window `n`, centred on `ln e_0 + w_e (n + 1)`.
pub fn g_window(e: f64, n: usize, params: &ArchParams) -> f64 {
    if e <= 0.0 {
        return 0.0;
    }
    let w = params.w_ecc();
    window_f((e.ln() - (params.e0_deg.ln() + w * (n as f64 + 1.0))) / w, params.t0)
}

/// One pooling region and its window geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoolingRegion {
    pub id: usize,
    pub angle_index: usize,
    pub ecc_index: usize,
    pub angle_center_rad: f64,
    pub angle_width_rad: f64,
    pub log_ecc_center: f64,
    pub log_ecc_width: f64,
    /// Eccentricity at which the radial window support starts and ends.
    pub ecc_inner_deg: f64,
    pub ecc_outer_deg: f64,
}

/// Immutable set of pooling regions for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeripheralArchitecture {
    params: ArchParams,
    n_theta: usize,
    n_ecc: usize,
    regions: Vec<PoolingRegion>,
    #[serde(skip)]
    lookup: Vec<Option<usize>>,
}

impl PeripheralArchitecture {
    pub fn build(params: ArchParams) -> Result<Self> {
        params.validate()?;
        let (n_theta, n_ecc) = (params.n_theta(), params.n_ecc());
        let (w_theta, w_ecc) = (params.w_theta(), params.w_ecc());
        let half_support = (1.0 + params.t0) / 2.0;
        let log_e0 = params.e0_deg.ln();
        let mut regions = Vec::new();
        let mut lookup = vec![None; n_theta * n_ecc];
        for ecc_index in 0..n_ecc {
            let log_center = log_e0 + w_ecc * (ecc_index as f64 + 1.0);
            let outer = (log_center + half_support * w_ecc).exp();
            if outer <= params.fovea_deg {
                continue;
            }
            let inner = (log_center - half_support * w_ecc).exp();
            for angle_index in 0..n_theta {
                let id = regions.len();
                lookup[ecc_index * n_theta + angle_index] = Some(id);
                regions.push(PoolingRegion {
                    id,
                    angle_index,
                    ecc_index,
                    angle_center_rad: w_theta * angle_index as f64 + w_theta / 2.0 + params.rotation_rad,
                    angle_width_rad: w_theta,
                    log_ecc_center: log_center,
                    log_ecc_width: w_ecc,
                    ecc_inner_deg: inner,
                    ecc_outer_deg: outer,
                });
            }
        }
        Ok(Self {
            params,
            n_theta,
            n_ecc,
            regions,
            lookup,
        })
    }

    pub fn params(&self) -> &ArchParams {
        &self.params
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_ecc(&self) -> usize {
        self.n_ecc
    }

    pub fn regions(&self) -> &[PoolingRegion] {
        &self.regions
    }

    pub fn region_at(&self, angle_index: usize, ecc_index: usize) -> Option<&PoolingRegion> {
        if angle_index >= self.n_theta || ecc_index >= self.n_ecc {
            return None;
        }
        self.lookup[ecc_index * self.n_theta + angle_index].map(|id| &self.regions[id])
    }

    /// Eccentricity bands that survived the foveal cut, ascending.
    pub fn ecc_bands(&self) -> Vec<usize> {
        let mut bands: Vec<usize> = self.regions.iter().map(|r| r.ecc_index).collect();
        bands.dedup();
        bands
    }

    /// Window weight of region `id` at polar position `(theta, e)`.
    pub fn weight(&self, id: usize, theta: f64, e: f64) -> f64 {
        let r = &self.regions[id];
        h_window(theta, r.angle_index, &self.params) * g_window(e, r.ecc_index, &self.params)
    }

    /// Best angular window at `theta`; ties go to the lower index.
    fn best_angle(&self, theta: f64) -> usize {
        let w = self.params.w_theta();
        let u = (theta - self.params.rotation_rad).rem_euclid(TAU) / w - 0.5;
        let lo = (u.floor() as isize).rem_euclid(self.n_theta as isize) as usize;
        let hi = (lo + 1) % self.n_theta;
        let (a, b) = (lo.min(hi), lo.max(hi));
        if h_window(theta, b, &self.params) > h_window(theta, a, &self.params) {
            b
        } else {
            a
        }
    }

    /// Best eccentricity window at `e` with its weight; ties go to the lower
    /// index.
    fn best_ecc(&self, e: f64) -> (usize, f64) {
        let w = self.params.w_ecc();
        let v = (e.ln() - self.params.e0_deg.ln()) / w - 1.0;
        let lo = v.floor();
        let mut best = (0usize, 0.0f64);
        for cand in [lo, lo + 1.0] {
            if cand < 0.0 || cand >= self.n_ecc as f64 {
                continue;
            }
            let n = cand as usize;
            let g = g_window(e, n, &self.params);
            if g > best.1 {
                best = (n, g);
            }
        }
        best
    }

    /// Hard region assignment for a polar position outside the fovea.
    pub fn assign(&self, theta: f64, e: f64) -> Label {
        if e <= self.params.fovea_deg {
            return Label::Fovea;
        }
        let (ecc_index, g) = self.best_ecc(e);
        if g <= 0.0 {
            return Label::Outside;
        }
        let angle_index = self.best_angle(theta);
        match self.lookup[ecc_index * self.n_theta + angle_index] {
            Some(id) => Label::Region(id as u32),
            None => Label::Outside,
        }
    }
}

/// Per-pixel assignment of a rasterized architecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Fovea,
    Region(u32),
    Outside,
}

/// Polar coordinates `(theta, e)` of pixel `(x, y)` relative to a fixation.
/// `theta` is measured counter-clockwise on screen (y up) in `[0, 2 pi)`.
pub fn polar_of(x: f64, y: f64, fixation: Point, deg_per_px: f64) -> (f64, f64) {
    let dx = x - fixation.x;
    let dy = fixation.y - y;
    let e = dx.hypot(dy) * deg_per_px;
    let theta = dy.atan2(dx).rem_euclid(TAU);
    (theta, e)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RasterizedArch {
    width: usize,
    height: usize,
    fixation: Point,
    deg_per_px: f64,
    labels: Vec<Label>,
    region_count: usize,
}

impl RasterizedArch {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn fixation(&self) -> Point {
        self.fixation
    }

    pub fn deg_per_px(&self) -> f64 {
        self.deg_per_px
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, x: usize, y: usize) -> Label {
        self.labels[y * self.width + x]
    }

    /// Number of regions in the architecture (not just those present here).
    pub fn region_count(&self) -> usize {
        self.region_count
    }

    /// Pixel count per region id.
    pub fn region_pixel_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.region_count];
        for l in &self.labels {
            if let Label::Region(id) = l {
                counts[*id as usize] += 1;
            }
        }
        counts
    }

    /// Whether each region has a pixel on the raster border, i.e. whether
    /// the image clips it.
    pub fn region_touches_border(&self) -> Vec<bool> {
        let mut touches = vec![false; self.region_count];
        let (w, h) = (self.width, self.height);
        let mut mark = |x: usize, y: usize| {
            if let Label::Region(id) = self.label(x, y) {
                touches[id as usize] = true;
            }
        };
        for x in 0..w {
            mark(x, 0);
            mark(x, h - 1);
        }
        for y in 0..h {
            mark(0, y);
            mark(w - 1, y);
        }
        touches
    }
}

/// Assigns every pixel of a `width x height` raster to the fovea, one
/// pooling region (maximum window weight), or the outside.
pub fn rasterize(
    arch: &PeripheralArchitecture,
    width: usize,
    height: usize,
    fixation: Point,
    deg_per_px: f64,
) -> Result<RasterizedArch> {
    if width == 0 || height == 0 {
        return Err(ClutterError::InvalidParameter("raster must be non-empty".into()));
    }
    check_deg_per_px(deg_per_px)?;
    fixation.check_inside(width, height)?;
    let mut labels = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let (theta, e) = polar_of(x as f64, y as f64, fixation, deg_per_px);
            labels.push(arch.assign(theta, e));
        }
    }
    Ok(RasterizedArch {
        width,
        height,
        fixation,
        deg_per_px,
        labels,
        region_count: arch.regions.len(),
    })
}
