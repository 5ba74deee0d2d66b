//! Rasters, color conversion and the multiscale filtering primitives shared
//! by every clutter model.

mod color;
mod field;
mod filter;
mod oriented;
mod pyramid;

pub use color::{lab_pixel_to_srgb, srgb_pixel_to_lab, srgb_to_lab};
pub use field::{LabImage, Point, RasterImage, ScalarField};
pub use filter::{convolve_separable, gaussian_blur, gaussian_kernel, upsample_level, Border};
pub use oriented::{
    oriented_energy, oriented_energy_with_sigma, OrientedFilterBank, QuadratureResponse, DEFAULT_ORIENTATIONS,
    DEFAULT_ORIENT_SIGMA_PX,
};
pub use pyramid::{gaussian_pyramid, reduce, BINOMIAL5};

pub(crate) use field::check_deg_per_px;
pub(crate) use oriented::centre_on_first;
pub(crate) use pyramid::check_levels;
