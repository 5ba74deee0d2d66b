//! Separable convolution primitives.
//!
//! Both passes are written as "accumulate one shifted row per tap" so the
//! inner loops run over contiguous memory.

use super::field::ScalarField;

/// How taps falling outside the field are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Border {
    /// Drop out-of-range taps and divide by the in-range kernel mass.
    /// Preserves constants; meant for smoothing kernels.
    Renormalize,
    /// Whole-sample mirror (`c b | a b c`). Meant for zero-mean kernels.
    Reflect,
}

/// Sampled, unit-mass Gaussian truncated at `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    assert!(sigma > 0.0, "sigma must be positive");
    let radius = (3.0 * sigma).ceil().max(1.0) as isize;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= total);
    k
}

pub fn gaussian_blur(field: &ScalarField, sigma: f64) -> ScalarField {
    let k = gaussian_kernel(sigma);
    convolve_separable(field, &k, &k, Border::Renormalize)
}

/// Convolves rows with `kx` then columns with `ky`. Kernels have odd length
/// and are centred.
pub fn convolve_separable(field: &ScalarField, kx: &[f64], ky: &[f64], border: Border) -> ScalarField {
    let (w, h) = field.dims();
    let horizontal = convolve_rows(field.values(), w, h, kx, border);
    let values = convolve_cols(&horizontal, w, h, ky, border);
    ScalarField::from_raw(w, h, values, field.deg_per_px())
}

fn reflect(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let mut m = i.rem_euclid(period);
    if m >= n as isize {
        m = period - m;
    }
    m as usize
}

/// In-range kernel mass at each output position (for `Renormalize`).
fn border_mass(kernel: &[f64], n: usize) -> Vec<f64> {
    let r = (kernel.len() / 2) as isize;
    (0..n as isize)
        .map(|i| {
            kernel
                .iter()
                .enumerate()
                .filter(|(j, _)| {
                    let src = i + *j as isize - r;
                    src >= 0 && src < n as isize
                })
                .map(|(_, k)| k)
                .sum()
        })
        .collect()
}

fn convolve_rows(src: &[f64], w: usize, h: usize, kernel: &[f64], border: Border) -> Vec<f64> {
    debug_assert!(kernel.len() % 2 == 1);
    let r = kernel.len() / 2;
    let mut out = vec![0.0; w * h];
    match border {
        Border::Renormalize => {
            let mass = border_mass(kernel, w);
            for y in 0..h {
                let row = &src[y * w..(y + 1) * w];
                let acc = &mut out[y * w..(y + 1) * w];
                for (j, &k) in kernel.iter().enumerate() {
                    let d = j as isize - r as isize;
                    let lo = (-d).max(0) as usize;
                    let hi = (w as isize - d).min(w as isize).max(0) as usize;
                    if lo >= hi {
                        continue;
                    }
                    let shifted = &row[(lo as isize + d) as usize..(hi as isize + d) as usize];
                    for (a, &s) in acc[lo..hi].iter_mut().zip(shifted) {
                        *a += k * s;
                    }
                }
                for (a, m) in acc.iter_mut().zip(&mass) {
                    *a /= m;
                }
            }
        }
        Border::Reflect => {
            let mut padded = vec![0.0; w + 2 * r];
            for y in 0..h {
                let row = &src[y * w..(y + 1) * w];
                for (i, p) in padded.iter_mut().enumerate() {
                    *p = row[reflect(i as isize - r as isize, w)];
                }
                let acc = &mut out[y * w..(y + 1) * w];
                for (j, &k) in kernel.iter().enumerate() {
                    for (a, &s) in acc.iter_mut().zip(&padded[j..j + w]) {
                        *a += k * s;
                    }
                }
            }
        }
    }
    out
}

fn convolve_cols(src: &[f64], w: usize, h: usize, kernel: &[f64], border: Border) -> Vec<f64> {
    debug_assert!(kernel.len() % 2 == 1);
    let r = kernel.len() / 2;
    let mut out = vec![0.0; w * h];
    let mass = match border {
        Border::Renormalize => Some(border_mass(kernel, h)),
        Border::Reflect => None,
    };
    for y in 0..h {
        let acc = &mut out[y * w..(y + 1) * w];
        for (j, &k) in kernel.iter().enumerate() {
            let src_y = y as isize + j as isize - r as isize;
            let src_y = match border {
                Border::Renormalize if src_y < 0 || src_y >= h as isize => continue,
                Border::Renormalize => src_y as usize,
                Border::Reflect => reflect(src_y, h),
            };
            let row = &src[src_y * w..(src_y + 1) * w];
            for (a, &s) in acc.iter_mut().zip(row) {
                *a += k * s;
            }
        }
        if let Some(mass) = &mass {
            let m = mass[y];
            acc.iter_mut().for_each(|a| *a /= m);
        }
    }
    out
}

/// Bilinear resampling of a pyramid level back onto the `width x height`
/// grid of level 0. Level-`k` sample `i` sits at level-0 coordinate `i * 2^k`.
pub fn upsample_level(field: &ScalarField, level: usize, width: usize, height: usize, deg_per_px: f64) -> ScalarField {
    if level == 0 && field.dims() == (width, height) {
        return field.clone().with_deg_per_px(deg_per_px).expect("valid deg_per_px");
    }
    let scale = (1u64 << level) as f64;
    let (fw, fh) = field.dims();
    let axis = |n: usize, src_n: usize| -> Vec<(usize, usize, f64)> {
        (0..n)
            .map(|i| {
                let u = (i as f64 / scale).min((src_n - 1) as f64);
                let i0 = u.floor() as usize;
                let i1 = (i0 + 1).min(src_n - 1);
                (i0, i1, u - i0 as f64)
            })
            .collect()
    };
    let xs = axis(width, fw);
    let ys = axis(height, fh);
    let mut values = Vec::with_capacity(width * height);
    for &(y0, y1, ty) in &ys {
        let r0 = field.row(y0);
        let r1 = field.row(y1);
        for &(x0, x1, tx) in &xs {
            let top = r0[x0] + (r0[x1] - r0[x0]) * tx;
            let bottom = r1[x0] + (r1[x1] - r1[x0]) * tx;
            values.push(top + (bottom - top) * ty);
        }
    }
    ScalarField::from_raw(width, height, values, deg_per_px)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(field: &ScalarField, kx: &[f64], ky: &[f64], border: Border) -> ScalarField {
        let (w, h) = field.dims();
        let (rx, ry) = ((kx.len() / 2) as isize, (ky.len() / 2) as isize);
        ScalarField::from_fn(w, h, field.deg_per_px(), |x, y| {
            let (mut acc, mut mass) = (0.0, 0.0);
            for (j, &b) in ky.iter().enumerate() {
                for (i, &a) in kx.iter().enumerate() {
                    let sx = x as isize + i as isize - rx;
                    let sy = y as isize + j as isize - ry;
                    let (sx, sy) = match border {
                        Border::Renormalize => {
                            if sx < 0 || sy < 0 || sx >= w as isize || sy >= h as isize {
                                continue;
                            }
                            (sx as usize, sy as usize)
                        }
                        Border::Reflect => (reflect(sx, w), reflect(sy, h)),
                    };
                    acc += a * b * field.get(sx, sy);
                    mass += a * b;
                }
            }
            match border {
                Border::Renormalize => acc / mass,
                Border::Reflect => acc,
            }
        })
        .unwrap()
    }

    fn test_field(w: usize, h: usize) -> ScalarField {
        ScalarField::from_fn(w, h, 1.0, |x, y| {
            ((x * 7 + y * 13) % 11) as f64 - 3.0 * (y as f64).sin()
        })
        .unwrap()
    }

    #[test]
    fn separable_matches_direct_2d() {
        let f = test_field(13, 9);
        let kx = [0.1, 0.2, 0.4, 0.2, 0.1];
        let ky = [-1.0, 0.5, 2.0, 0.5, -1.0];
        for border in [Border::Renormalize, Border::Reflect] {
            let fast = convolve_separable(&f, &kx, &kx, border);
            let slow = naive(&f, &kx, &kx, border);
            for (a, b) in fast.values().iter().zip(slow.values()) {
                assert!((a - b).abs() < 1e-12, "{border:?}");
            }
        }
        let fast = convolve_separable(&f, &kx, &ky, Border::Reflect);
        let slow = naive(&f, &kx, &ky, Border::Reflect);
        for (a, b) in fast.values().iter().zip(slow.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_wider_than_field() {
        let f = test_field(3, 2);
        let k = gaussian_kernel(2.0);
        let fast = convolve_separable(&f, &k, &k, Border::Reflect);
        let slow = naive(&f, &k, &k, Border::Reflect);
        for (a, b) in fast.values().iter().zip(slow.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        let blurred = gaussian_blur(&ScalarField::filled(3, 2, 4.0, 1.0).unwrap(), 5.0);
        assert!(blurred.values().iter().all(|v| (v - 4.0).abs() < 1e-12));
    }

    #[test]
    fn reflect_indices() {
        let idx: Vec<usize> = (-4..8).map(|i| reflect(i, 4)).collect();
        assert_eq!(idx, vec![2, 3, 2, 1, 0, 1, 2, 3, 2, 1, 0, 1]);
    }

    #[test]
    fn upsample_hits_samples_and_interpolates() {
        let f = ScalarField::from_fn(3, 2, 2.0, |x, y| (x + 3 * y) as f64).unwrap();
        let up = upsample_level(&f, 1, 6, 4, 1.0);
        assert_eq!(up.get(0, 0), 0.0);
        assert_eq!(up.get(2, 0), 1.0);
        assert_eq!(up.get(1, 0), 0.5);
        assert_eq!(up.get(4, 2), 5.0);
        assert_eq!(up.get(5, 3), 5.0);
    }
}
