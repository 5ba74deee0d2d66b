//! sRGB (D65) to CIELab.

use super::field::{LabImage, RasterImage, ScalarField};

/// Linear sRGB to XYZ, D65.
const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];

const XYZ_TO_RGB: [[f64; 3]; 3] = [
    [3.2404542, -1.5371385, -0.4985314],
    [-0.9692660, 1.8760108, 0.0415560],
    [0.0556434, -0.2040259, 1.0572252],
];

// White point taken as the row sums of RGB_TO_XYZ so that (1,1,1) lands on
// a = b = 0 exactly.
const WHITE: [f64; 3] = [
    RGB_TO_XYZ[0][0] + RGB_TO_XYZ[0][1] + RGB_TO_XYZ[0][2],
    RGB_TO_XYZ[1][0] + RGB_TO_XYZ[1][1] + RGB_TO_XYZ[1][2],
    RGB_TO_XYZ[2][0] + RGB_TO_XYZ[2][1] + RGB_TO_XYZ[2][2],
];

const EPSILON: f64 = 216.0 / 24389.0;
const KAPPA: f64 = 24389.0 / 27.0;

#[inline]
fn decode_gamma(c: f64) -> f64 {
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

#[inline]
fn encode_gamma(c: f64) -> f64 {
    if c <= 0.0031308 {
        12.92 * c
    } else {
        1.055 * c.powf(1.0 / 2.4) - 0.055
    }
}

#[inline]
fn lab_f(t: f64) -> f64 {
    if t > EPSILON {
        t.cbrt()
    } else {
        (KAPPA * t + 16.0) / 116.0
    }
}

#[inline]
fn lab_f_inv(f: f64) -> f64 {
    let cube = f * f * f;
    if cube > EPSILON {
        cube
    } else {
        (116.0 * f - 16.0) / KAPPA
    }
}

fn mul(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// One gamma-encoded sRGB triplet to `[L, a, b]`.
pub fn srgb_pixel_to_lab(rgb: [f64; 3]) -> [f64; 3] {
    let xyz = mul(&RGB_TO_XYZ, rgb.map(decode_gamma));
    let fx = lab_f(xyz[0] / WHITE[0]);
    let fy = lab_f(xyz[1] / WHITE[1]);
    let fz = lab_f(xyz[2] / WHITE[2]);
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

/// Inverse of [`srgb_pixel_to_lab`]; no gamut clipping.
pub fn lab_pixel_to_srgb(lab: [f64; 3]) -> [f64; 3] {
    let fy = (lab[0] + 16.0) / 116.0;
    let fx = fy + lab[1] / 500.0;
    let fz = fy - lab[2] / 200.0;
    let xyz = [
        lab_f_inv(fx) * WHITE[0],
        lab_f_inv(fy) * WHITE[1],
        lab_f_inv(fz) * WHITE[2],
    ];
    mul(&XYZ_TO_RGB, xyz).map(encode_gamma)
}

pub fn srgb_to_lab(img: &RasterImage) -> LabImage {
    let n = img.width() * img.height();
    let (mut l, mut a, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for &p in img.pixels() {
        let lab = srgb_pixel_to_lab(p);
        l.push(lab[0]);
        a.push(lab[1]);
        b.push(lab[2]);
    }
    let (w, h, dpp) = (img.width(), img.height(), img.deg_per_px());
    LabImage {
        l: ScalarField::from_raw(w, h, l, dpp),
        a: ScalarField::from_raw(w, h, a, dpp),
        b: ScalarField::from_raw(w, h, b, dpp),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn white_and_black() {
        let w = srgb_pixel_to_lab([1.0, 1.0, 1.0]);
        assert!((w[0] - 100.0).abs() < 1e-9);
        assert!(w[1].abs() < 0.01 && w[2].abs() < 0.01);
        let k = srgb_pixel_to_lab([0.0, 0.0, 0.0]);
        assert!(k.iter().all(|v| v.abs() < 1e-12), "{k:?}");
    }

    #[test]
    fn primaries_match_reference_conversion() {
        // Reference values from an independent sRGB -> XYZ(D65) -> Lab
        // conversion (scikit-image `rgb2lab`).
        let red = srgb_pixel_to_lab([1.0, 0.0, 0.0]);
        for (got, want) in red.iter().zip([53.2405879437449, 80.0923082256922, 67.2027510444287]) {
            assert!((got - want).abs() < 0.05, "{red:?}");
        }
        let green = srgb_pixel_to_lab([0.0, 1.0, 0.0]);
        for (got, want) in green
            .iter()
            .zip([87.73509948831895, -86.18302974439501, 83.17970317538452])
        {
            assert!((got - want).abs() < 0.05, "{green:?}");
        }
    }

    #[test]
    fn image_conversion_preserves_geometry() {
        let img = RasterImage::uniform(3, 2, [0.2, 0.4, 0.6], 0.05).unwrap();
        let lab = srgb_to_lab(&img);
        assert_eq!(lab.dims(), (3, 2));
        assert_eq!(lab.deg_per_px(), 0.05);
        assert!(lab.l.values().iter().all(|&v| (0.0..=100.0).contains(&v)));
    }

    proptest! {
        #[test]
        fn lab_round_trips_on_gamut(r in 0.0f64..=1.0, g in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let back = lab_pixel_to_srgb(srgb_pixel_to_lab([r, g, b]));
            prop_assert!((back[0] - r).abs() < 1e-4);
            prop_assert!((back[1] - g).abs() < 1e-4);
            prop_assert!((back[2] - b).abs() < 1e-4);
        }
    }
}
