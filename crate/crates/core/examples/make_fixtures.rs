//! Writes the synthetic fixture scenes and a 46-trial table:
//! `cargo run --release -p clutter-core --example make_fixtures -- [OUT_DIR]`

use std::path::PathBuf;

use clutter_core::foveation::FfcConfig;
use clutter_core::stats::write_trials;
use clutter_core::synth::{synthetic_trials, SYNTH_ALPHA, SYNTH_SEED, SYNTH_SIGMA, SYNTH_TRIAL_COUNT};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    let images = out.join("images");
    std::fs::create_dir_all(&images)?;
    let synth = synthetic_trials(
        SYNTH_TRIAL_COUNT,
        &FfcConfig::default(),
        SYNTH_ALPHA,
        SYNTH_SIGMA,
        SYNTH_SEED,
    )?;
    for (id, img) in &synth.images {
        img.save_png(images.join(format!("{id}.png")))?;
    }
    write_trials(std::fs::File::create(out.join("trials.csv"))?, &synth.trials)?;
    println!(
        "{} images, {} trials in {}",
        synth.images.len(),
        synth.trials.len(),
        out.display()
    );
    Ok(())
}
