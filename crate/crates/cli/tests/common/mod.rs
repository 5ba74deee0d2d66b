#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use clutter_core::foveation::FfcConfig;
use clutter_core::stats::write_trials;
use clutter_core::synth::{synthetic_trials, SyntheticTrials, SYNTH_ALPHA, SYNTH_SEED, SYNTH_SIGMA};

pub fn clutter(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clutter"))
        .args(args)
        .output()
        .expect("run clutter")
}

/// Writes the fixture PNGs of the first `n` synthetic trials into
/// `dir/images` and their trial table into `dir/trials.csv`.
pub fn write_trial_fixtures(dir: &Path, n: usize) -> (PathBuf, PathBuf, SyntheticTrials) {
    let synth = synthetic_trials(n, &FfcConfig::default(), SYNTH_ALPHA, SYNTH_SIGMA, SYNTH_SEED).unwrap();
    let images = dir.join("images");
    std::fs::create_dir_all(&images).unwrap();
    for (id, img) in &synth.images {
        img.save_png(images.join(format!("{id}.png"))).unwrap();
    }
    let trials = dir.join("trials.csv");
    write_trials(std::fs::File::create(&trials).unwrap(), &synth.trials).unwrap();
    (images, trials, synth)
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
