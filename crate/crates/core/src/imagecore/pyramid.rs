use super::field::ScalarField;
use super::filter::{convolve_separable, Border};
use crate::error::{ClutterError, Result};

/// Burt-Adelson 5-tap binomial.
pub const BINOMIAL5: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

/// Blur with [`BINOMIAL5`] (renormalized borders) and keep even samples.
pub fn reduce(field: &ScalarField) -> ScalarField {
    let blurred = convolve_separable(field, &BINOMIAL5, &BINOMIAL5, Border::Renormalize);
    let (w, h) = field.dims();
    let (nw, nh) = (w.div_ceil(2), h.div_ceil(2));
    let mut values = Vec::with_capacity(nw * nh);
    for y in (0..h).step_by(2) {
        let row = blurred.row(y);
        values.extend(row.iter().step_by(2));
    }
    ScalarField::from_raw(nw, nh, values, field.deg_per_px() * 2.0)
}

/// Level 0 is `field` itself; each further level is [`reduce`] of the
/// previous one.
pub fn gaussian_pyramid(field: &ScalarField, levels: usize) -> Result<Vec<ScalarField>> {
    check_levels(field.width(), field.height(), levels)?;
    let mut out = Vec::with_capacity(levels);
    out.push(field.clone());
    for _ in 1..levels {
        let next = reduce(out.last().expect("non-empty"));
        out.push(next);
    }
    Ok(out)
}

pub(crate) fn check_levels(width: usize, height: usize, levels: usize) -> Result<()> {
    if levels == 0 {
        return Err(ClutterError::InvalidParameter(
            "pyramid needs at least one level".into(),
        ));
    }
    let need = 1usize.checked_shl((levels - 1) as u32).unwrap_or(usize::MAX);
    if width < need || height < need {
        return Err(ClutterError::DimensionTooSmall { width, height, levels });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_survives_every_level() {
        let f = ScalarField::filled(37, 23, 0.7, 0.05).unwrap();
        let pyr = gaussian_pyramid(&f, 3).unwrap();
        for level in &pyr {
            assert!(level.values().iter().all(|v| (v - 0.7).abs() < 1e-12));
        }
    }

    #[test]
    fn level_sizes_and_sampling() {
        let f = ScalarField::filled(64, 64, 1.0, 0.044).unwrap();
        let pyr = gaussian_pyramid(&f, 3).unwrap();
        let dims: Vec<_> = pyr.iter().map(|l| l.dims()).collect();
        assert_eq!(dims, vec![(64, 64), (32, 32), (16, 16)]);
        assert!((pyr[2].deg_per_px() - 0.176).abs() < 1e-12);
    }

    #[test]
    fn impulse_mass_matches_direct_convolution() {
        // Oracle: direct 2D convolution with the outer-product kernel, then
        // keep even samples.
        let (w, h) = (64usize, 64usize);
        let mut v = vec![0.0; w * h];
        v[32 * w + 32] = 1.0;
        let f = ScalarField::new(w, h, v, 1.0).unwrap();
        let pyr = gaussian_pyramid(&f, 2).unwrap();
        let mut oracle = 0.0;
        for y in (0..h).step_by(2) {
            for x in (0..w).step_by(2) {
                let (dx, dy) = (x as isize - 32, y as isize - 32);
                if dx.abs() <= 2 && dy.abs() <= 2 {
                    oracle += BINOMIAL5[(dx + 2) as usize] * BINOMIAL5[(dy + 2) as usize];
                }
            }
        }
        let got: f64 = pyr[1].values().iter().sum();
        assert!((oracle - 0.25).abs() < 1e-15);
        assert!((got - oracle).abs() < 1e-6);
    }

    #[test]
    fn too_small_is_an_error() {
        let f = ScalarField::filled(3, 64, 1.0, 1.0).unwrap();
        assert!(matches!(
            gaussian_pyramid(&f, 3),
            Err(ClutterError::DimensionTooSmall { .. })
        ));
        assert!(gaussian_pyramid(&f, 0).is_err());
        assert!(gaussian_pyramid(&f, 2).is_ok());
    }

    #[test]
    fn shift_equivariant_on_interior() {
        // Shifting the input by 2^k pixels shifts level k by one sample.
        let (w, h) = (96usize, 80usize);
        let base = |x: isize, y: isize| ((x * 31 + y * 17) % 23) as f64 + (x as f64 * 0.3).sin();
        let a = ScalarField::from_fn(w, h, 1.0, |x, y| base(x as isize, y as isize)).unwrap();
        let b = ScalarField::from_fn(w, h, 1.0, |x, y| base(x as isize - 4, y as isize - 4)).unwrap();
        let pa = gaussian_pyramid(&a, 3).unwrap();
        let pb = gaussian_pyramid(&b, 3).unwrap();
        let (la, lb) = (&pa[2], &pb[2]);
        for y in 4..la.height() - 4 {
            for x in 4..la.width() - 4 {
                assert!((lb.get(x + 1, y + 1) - la.get(x, y)).abs() < 1e-9);
            }
        }
    }
}
