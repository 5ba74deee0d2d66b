//! Prints the per-feature pixel standard deviation of the raw (unit
//! normalizer) Feature Congestion planes over the synthetic calibration set.

use clutter_core::congestion::{fc_map, FcConfig, FeatureNormalizers};
use clutter_core::synth::calibration_set;

fn std_of(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n).sqrt()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = FcConfig {
        normalizers: FeatureNormalizers {
            color: 1.0,
            contrast: 1.0,
            orientation: 1.0,
        },
        ..FcConfig::default()
    };
    let (mut color, mut contrast, mut orientation) = (Vec::new(), Vec::new(), Vec::new());
    for img in calibration_set()? {
        let r = fc_map(&img, &cfg)?;
        color.extend_from_slice(r.color.values());
        contrast.extend_from_slice(r.contrast.values());
        orientation.extend_from_slice(r.orientation.values());
    }
    println!("color       {:.6}", std_of(&color));
    println!("contrast    {:.6}", std_of(&contrast));
    println!("orientation {:.6}", std_of(&orientation));
    Ok(())
}
