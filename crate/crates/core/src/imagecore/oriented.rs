//! Steerable second-derivative-of-Gaussian filters (G2) and their Hilbert
//! pair (H2), both built from separable basis kernels.
//!
//! Channel angle `theta` differentiates along the direction
//! `(cos theta, sin theta)` in `(x, y)` pixel coordinates, so the 0° channel
//! responds to vertical stripes.

use super::field::ScalarField;
use super::filter::{convolve_separable, Border};

/// Quadrature filter bank steered to a fixed set of orientations.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedFilterBank {
    sigma: f64,
    angles: Vec<f64>,
    factors: Factors,
}

/// Even and odd responses of one orientation channel.
#[derive(Debug, Clone)]
pub struct QuadratureResponse {
    pub angle: f64,
    pub even: ScalarField,
    pub odd: ScalarField,
}

#[derive(Debug, Clone, PartialEq)]
struct Factors {
    gauss: Vec<f64>,
    first: Vec<f64>,
    second: Vec<f64>,
    cubic: Vec<f64>,
    quad: Vec<f64>,
    /// Odd-filter gain that equalizes the even and odd amplitude responses
    /// at the peak frequency `sqrt(2) / sigma`, so energy is phase-invariant
    /// there.
    odd_gain: f64,
}

const G2_NORM: f64 = 0.9213;
const H2_NORM: f64 = 0.9780;
const H2_LINEAR: f64 = 2.254;

impl Factors {
    fn new(sigma: f64) -> Self {
        let radius = (5.0 * sigma).ceil() as isize;
        // exp(-t^2) with t = px / (sigma * sqrt 2) is a Gaussian of std sigma.
        let ts: Vec<f64> = (-radius..=radius)
            .map(|i| i as f64 / (sigma * std::f64::consts::SQRT_2))
            .collect();
        let env: Vec<f64> = ts.iter().map(|t| (-t * t).exp()).collect();
        let gauss = env.clone();
        let first: Vec<f64> = ts.iter().zip(&env).map(|(t, e)| t * e).collect();
        let mut second: Vec<f64> = ts.iter().zip(&env).map(|(t, e)| (2.0 * t * t - 1.0) * e).collect();
        // The sampled even factor must reject DC exactly: remove its mean
        // along the Gaussian envelope.
        let dc = second.iter().sum::<f64>() / gauss.iter().sum::<f64>();
        second.iter_mut().zip(&gauss).for_each(|(s, g)| *s -= dc * g);
        let cubic: Vec<f64> = ts
            .iter()
            .zip(&env)
            .map(|(t, e)| (t * t * t - H2_LINEAR * t) * e)
            .collect();
        let quad = ts
            .iter()
            .zip(&env)
            .map(|(t, e)| (t * t - H2_LINEAR / 3.0) * e)
            .collect::<Vec<f64>>();
        let peak = std::f64::consts::SQRT_2 / sigma;
        let even_amp: f64 = (-radius..=radius)
            .zip(&second)
            .map(|(i, k)| k * (peak * i as f64).cos())
            .sum::<f64>()
            * G2_NORM;
        let odd_amp: f64 = (-radius..=radius)
            .zip(&cubic)
            .map(|(i, k)| k * (peak * i as f64).sin())
            .sum::<f64>()
            * H2_NORM;
        let odd_gain = (even_amp / odd_amp).abs();
        Self {
            gauss,
            first,
            second,
            cubic,
            quad,
            odd_gain,
        }
    }
}

impl OrientedFilterBank {
    /// `n` orientations evenly spaced over `[0, pi)`.
    pub fn evenly_spaced(n: usize, sigma: f64) -> Self {
        assert!(n >= 1, "need at least one orientation");
        let angles = (0..n).map(|i| std::f64::consts::PI * i as f64 / n as f64).collect();
        Self::with_angles(angles, sigma)
    }

    pub fn with_angles(angles: Vec<f64>, sigma: f64) -> Self {
        assert!(sigma > 0.0, "sigma must be positive");
        Self {
            sigma,
            factors: Factors::new(sigma),
            angles,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Even (G2) and odd (H2) responses per orientation. Borders mirror.
    pub fn responses(&self, field: &ScalarField) -> Vec<QuadratureResponse> {
        let f = &self.factors;
        let conv = |kx: &[f64], ky: &[f64]| convolve_separable(field, kx, ky, Border::Reflect);
        let g2a = conv(&f.second, &f.gauss);
        let g2b = conv(&f.first, &f.first);
        let g2c = conv(&f.gauss, &f.second);
        let h2a = conv(&f.cubic, &f.gauss);
        let h2b = conv(&f.quad, &f.first);
        let h2c = conv(&f.first, &f.quad);
        let h2d = conv(&f.gauss, &f.cubic);

        let (w, h, dpp) = (field.width(), field.height(), field.deg_per_px());
        self.angles
            .iter()
            .map(|&angle| {
                let (s, c) = angle.sin_cos();
                let (ke0, ke1, ke2) = (c * c, 4.0 * c * s, s * s);
                let (ko0, ko1, ko2, ko3) = (c * c * c, 3.0 * c * c * s, 3.0 * c * s * s, s * s * s);
                let odd_norm = H2_NORM * f.odd_gain;
                let mut even = Vec::with_capacity(w * h);
                let mut odd = Vec::with_capacity(w * h);
                for i in 0..w * h {
                    even.push(G2_NORM * (ke0 * g2a.values()[i] + ke1 * g2b.values()[i] + ke2 * g2c.values()[i]));
                    odd.push(
                        odd_norm
                            * (ko0 * h2a.values()[i]
                                + ko1 * h2b.values()[i]
                                + ko2 * h2c.values()[i]
                                + ko3 * h2d.values()[i]),
                    );
                }
                QuadratureResponse {
                    angle,
                    even: ScalarField::from_raw(w, h, even, dpp),
                    odd: ScalarField::from_raw(w, h, odd, dpp),
                }
            })
            .collect()
    }

    /// Phase-invariant energy `even^2 + odd^2` per orientation.
    pub fn energy(&self, field: &ScalarField) -> Vec<ScalarField> {
        self.responses(field)
            .into_iter()
            .map(|r| r.even.zip_map(&r.odd, |e, o| e * e + o * o))
            .collect()
    }
}

/// Default bank: four channels at 0°, 45°, 90° and 135°.
pub const DEFAULT_ORIENTATIONS: usize = 4;
pub const DEFAULT_ORIENT_SIGMA_PX: f64 = 2.0;

/// Oriented energy planes for `n_orientations` evenly spaced channels.
pub fn oriented_energy(luminance: &ScalarField, n_orientations: usize) -> Vec<ScalarField> {
    oriented_energy_with_sigma(luminance, n_orientations, DEFAULT_ORIENT_SIGMA_PX)
}

pub fn oriented_energy_with_sigma(luminance: &ScalarField, n_orientations: usize, sigma: f64) -> Vec<ScalarField> {
    assert!(n_orientations >= 2, "need at least two orientations");
    // Filters are DC-free, so shifting by a reference value changes nothing
    // mathematically but makes a constant input produce exact zeros.
    let centred = centre_on_first(luminance);
    OrientedFilterBank::evenly_spaced(n_orientations, sigma).energy(&centred)
}

pub(crate) fn centre_on_first(field: &ScalarField) -> ScalarField {
    let r = field.values()[0];
    field.map(|v| v - r)
}
