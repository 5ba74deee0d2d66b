//! On-disk artifacts: the CMAP binary float map, heatmap PNGs with a value
//! range sidecar, and label-map PNGs of a rasterized architecture.
//!
//! CMAP layout (little-endian): `b"CMAP"`, `u16` version, `u32` width,
//! `u32` height, `u16` reserved (0), then `width * height` row-major `f32`
//! values, then one `f64` degrees per pixel.

use std::io::{Read, Write};
use std::path::Path;

use image::{Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use crate::error::{ClutterError, Result};
use crate::imagecore::ScalarField;
use crate::peripheral::{Label, RasterizedArch};

pub const CMAP_MAGIC: &[u8; 4] = b"CMAP";
pub const CMAP_VERSION: u16 = 1;
pub const CMAP_HEADER_LEN: usize = 16;

pub fn write_cmap(mut w: impl Write, field: &ScalarField) -> Result<()> {
    let (width, height) = field.dims();
    let to_u32 = |v: usize| u32::try_from(v).map_err(|_| ClutterError::Cmap(format!("dimension {v} exceeds u32")));
    let mut buf = Vec::with_capacity(CMAP_HEADER_LEN + width * height * 4 + 8);
    buf.extend_from_slice(CMAP_MAGIC);
    buf.extend_from_slice(&CMAP_VERSION.to_le_bytes());
    buf.extend_from_slice(&to_u32(width)?.to_le_bytes());
    buf.extend_from_slice(&to_u32(height)?.to_le_bytes());
    buf.extend_from_slice(&0u16.to_le_bytes());
    for &v in field.values() {
        buf.extend_from_slice(&(v as f32).to_le_bytes());
    }
    buf.extend_from_slice(&field.deg_per_px().to_le_bytes());
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_cmap(mut r: impl Read) -> Result<ScalarField> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < CMAP_HEADER_LEN + 8 {
        return Err(ClutterError::Cmap(format!(
            "{} bytes is shorter than the header",
            bytes.len()
        )));
    }
    if &bytes[..4] != CMAP_MAGIC {
        return Err(ClutterError::Cmap("bad magic".into()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != CMAP_VERSION {
        return Err(ClutterError::Cmap(format!("unsupported version {version}")));
    }
    let width = u32::from_le_bytes(bytes[6..10].try_into().expect("4 bytes")) as usize;
    let height = u32::from_le_bytes(bytes[10..14].try_into().expect("4 bytes")) as usize;
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(4))
        .map(|n| n + CMAP_HEADER_LEN + 8)
        .ok_or_else(|| ClutterError::Cmap("dimensions overflow".into()))?;
    if bytes.len() != expected {
        return Err(ClutterError::Cmap(format!(
            "{width}x{height} map needs {expected} bytes, file has {}",
            bytes.len()
        )));
    }
    let payload = &bytes[CMAP_HEADER_LEN..expected - 8];
    let values = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64)
        .collect();
    let dpp = f64::from_le_bytes(bytes[expected - 8..].try_into().expect("8 bytes"));
    ScalarField::new(width, height, values, dpp).map_err(|e| ClutterError::Cmap(e.to_string()))
}

pub fn save_cmap(path: impl AsRef<Path>, field: &ScalarField) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_cmap(&mut f, field)?;
    f.flush()?;
    Ok(())
}

pub fn load_cmap(path: impl AsRef<Path>) -> Result<ScalarField> {
    read_cmap(std::io::BufReader::new(std::fs::File::open(path)?))
}

/// Viridis sampled every 16 entries of its 256-entry table, plus the last.
const VIRIDIS: [(f64, [f64; 3]); 17] = [
    (0.0, [0.267004, 0.004874, 0.329415]),
    (16.0, [0.282327, 0.094955, 0.417331]),
    (32.0, [0.278826, 0.175490, 0.483397]),
    (48.0, [0.258965, 0.251537, 0.524736]),
    (64.0, [0.229739, 0.322361, 0.545706]),
    (80.0, [0.199430, 0.387607, 0.554642]),
    (96.0, [0.172719, 0.448791, 0.557885]),
    (112.0, [0.149039, 0.508051, 0.557250]),
    (128.0, [0.127568, 0.566949, 0.550556]),
    (144.0, [0.120638, 0.625828, 0.533488]),
    (160.0, [0.157851, 0.683765, 0.501686]),
    (176.0, [0.246070, 0.738910, 0.452024]),
    (192.0, [0.369214, 0.788888, 0.382914]),
    (208.0, [0.515992, 0.831158, 0.294279]),
    (224.0, [0.678489, 0.863742, 0.189503]),
    (240.0, [0.845561, 0.887322, 0.099702]),
    (255.0, [0.993248, 0.906157, 0.143936]),
];

/// Viridis colour at `t` in `[0, 1]` (clamped), piecewise linear between
/// anchors.
pub fn viridis(t: f64) -> [f64; 3] {
    let pos = t.clamp(0.0, 1.0) * 255.0;
    let i = VIRIDIS.partition_point(|(p, _)| *p <= pos).clamp(1, VIRIDIS.len() - 1);
    let ((p0, c0), (p1, c1)) = (VIRIDIS[i - 1], VIRIDIS[i]);
    let f = ((pos - p0) / (p1 - p0)).clamp(0.0, 1.0);
    [0, 1, 2].map(|k| c0[k] + (c1[k] - c0[k]) * f)
}

/// Value range a heatmap was normalized with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatmapRange {
    pub min: f64,
    pub max: f64,
}

fn to_u8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Field rendered with viridis, normalized to its own min and max. A flat
/// field renders at the bottom of the ramp.
pub fn heatmap(field: &ScalarField) -> (RgbImage, HeatmapRange) {
    let range = HeatmapRange {
        min: field.min(),
        max: field.max(),
    };
    let span = range.max - range.min;
    let (w, h) = field.dims();
    let img = RgbImage::from_fn(w as u32, h as u32, |x, y| {
        let v = field.get(x as usize, y as usize);
        let t = if span > 0.0 { (v - range.min) / span } else { 0.0 };
        Rgb(viridis(t).map(to_u8))
    });
    (img, range)
}

/// Writes `<path>` as a heatmap PNG and `<path>.json` with its range.
pub fn save_heatmap(path: impl AsRef<Path>, field: &ScalarField) -> Result<HeatmapRange> {
    let path = path.as_ref();
    let (img, range) = heatmap(field);
    img.save_with_format(path, image::ImageFormat::Png)?;
    let mut sidecar = path.as_os_str().to_owned();
    sidecar.push(".json");
    std::fs::write(sidecar, serde_json::to_string_pretty(&range)? + "\n")?;
    Ok(range)
}

fn hsv(h: f64, s: f64, v: f64) -> [f64; 3] {
    let h6 = h.rem_euclid(1.0) * 6.0;
    let i = h6.floor();
    let f = h6 - i;
    let (p, q, t) = (v * (1.0 - s), v * (1.0 - s * f), v * (1.0 - s * (1.0 - f)));
    match i as u8 {
        0 => [v, t, p],
        1 => [q, v, p],
        2 => [p, v, t],
        3 => [p, q, v],
        4 => [t, p, v],
        _ => [v, p, q],
    }
}

/// Colour of a region id: golden-ratio hue steps, alternating brightness so
/// neighbours in id order differ.
pub fn region_color(id: u32) -> [u8; 3] {
    let hue = (id as f64 * 0.618_033_988_749_895).fract();
    let value = if id.is_multiple_of(2) { 0.95 } else { 0.7 };
    hsv(hue, 0.75, value).map(to_u8)
}

/// Fovea white, outside black, regions by [`region_color`].
pub fn label_image(raster: &RasterizedArch) -> RgbImage {
    let (w, h) = raster.dims();
    RgbImage::from_fn(w as u32, h as u32, |x, y| {
        Rgb(match raster.label(x as usize, y as usize) {
            Label::Fovea => [255, 255, 255],
            Label::Outside => [0, 0, 0],
            Label::Region(id) => region_color(id),
        })
    })
}

pub fn save_labels(path: impl AsRef<Path>, raster: &RasterizedArch) -> Result<()> {
    label_image(raster).save_with_format(path, image::ImageFormat::Png)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imagecore::Point;
    use crate::peripheral::{rasterize, ArchParams, PeripheralArchitecture};

    #[test]
    fn cmap_round_trip_and_layout() {
        let f = ScalarField::from_fn(5, 3, 0.044, |x, y| x as f64 * 0.5 - y as f64).unwrap();
        let mut buf = Vec::new();
        write_cmap(&mut buf, &f).unwrap();
        assert_eq!(buf.len(), CMAP_HEADER_LEN + 5 * 3 * 4 + 8);
        assert_eq!(&buf[..4], b"CMAP");
        assert_eq!(u16::from_le_bytes([buf[4], buf[5]]), 1);
        assert_eq!(u32::from_le_bytes(buf[6..10].try_into().unwrap()), 5);
        assert_eq!(u32::from_le_bytes(buf[10..14].try_into().unwrap()), 3);
        assert_eq!(&buf[14..16], &[0, 0]);
        let back = read_cmap(buf.as_slice()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn cmap_rejects_corruption() {
        let f = ScalarField::filled(2, 2, 1.0, 0.1).unwrap();
        let mut buf = Vec::new();
        write_cmap(&mut buf, &f).unwrap();
        assert!(read_cmap(&buf[..buf.len() - 1]).is_err());
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_cmap(bad.as_slice()).is_err());
        let mut v2 = buf.clone();
        v2[4] = 2;
        assert!(read_cmap(v2.as_slice()).is_err());
    }

    #[test]
    fn viridis_endpoints_and_anchor() {
        assert_eq!(viridis(0.0), VIRIDIS[0].1);
        assert_eq!(viridis(1.0), VIRIDIS[16].1);
        assert_eq!(viridis(128.0 / 255.0), VIRIDIS[8].1);
        assert_eq!(viridis(-3.0), viridis(0.0));
    }

    #[test]
    fn heatmap_range_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let f = ScalarField::from_fn(4, 4, 0.1, |x, _| x as f64).unwrap();
        let path = dir.path().join("h.png");
        let r = save_heatmap(&path, &f).unwrap();
        assert_eq!((r.min, r.max), (0.0, 3.0));
        let side: HeatmapRange =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("h.png.json")).unwrap()).unwrap();
        assert_eq!(side, r);
        let img = image::open(&path).unwrap().to_rgb8();
        assert_eq!(img.get_pixel(3, 0).0, viridis(1.0).map(to_u8));
    }

    #[test]
    fn label_image_colors() {
        let arch = PeripheralArchitecture::build(ArchParams::default()).unwrap();
        let r = rasterize(&arch, 64, 48, Point::new(2.0, 2.0), 0.2).unwrap();
        let img = label_image(&r);
        assert_eq!(img.get_pixel(2, 2).0, [255, 255, 255]);
        assert_ne!(region_color(0), region_color(1));
    }
}
