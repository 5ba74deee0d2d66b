mod common;

use std::path::Path;

use clutter_core::export::load_cmap;
use clutter_core::imagecore::RasterImage;
use clutter_core::synth::fixture_set;
use common::{clutter, s, write_trial_fixtures};
use serde_json::Value;

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn blank_png(dir: &Path) -> std::path::PathBuf {
    let p = dir.join("blank.png");
    RasterImage::uniform(96, 72, [0.4, 0.4, 0.4], 0.044)
        .unwrap()
        .save_png(&p)
        .unwrap();
    p
}

fn fixture_png(dir: &Path) -> (std::path::PathBuf, clutter_core::synth::Fixture) {
    let f = fixture_set()[2].clone();
    let p = dir.join("scene.png");
    f.render().unwrap().save_png(&p).unwrap();
    (p, f)
}

#[test]
fn fc_on_blank_image_is_zero_with_default_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let img = blank_png(dir.path());
    let out = dir.path().join("out");
    let o = clutter(&["fc", s(&img), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&out.join("blank_fc.json"));
    assert!(v["score"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["deg_per_px"].as_f64(), Some(0.044));
    let map = load_cmap(out.join("blank_fc.cmap")).unwrap();
    assert_eq!(map.dims(), (96, 72));
    assert!(out.join("blank_fc.png").exists() && out.join("blank_fc.png.json").exists());
    assert!(out.join("run_config.json").exists());
    let hash = v["config_hash"].as_str().unwrap();
    assert!(String::from_utf8_lossy(&o.stderr).contains(hash));
}

#[test]
fn ffc_reports_product_and_zero_inside_fovea() {
    let dir = tempfile::tempdir().unwrap();
    let (img, f) = fixture_png(dir.path());
    let out = dir.path().join("out");
    let t = format!("{},{}", f.target.x, f.target.y);
    let far = f.fixations[3].1;
    let fix = format!("{},{}", far.x, far.y);

    let o = clutter(&["ffc", s(&img), "--fix", &fix, "--target", &t, "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&out.join("scene_ffc.json"));
    let (fc, pifc, ffc) = (
        v["fc"].as_f64().unwrap(),
        v["pifc"].as_f64().unwrap(),
        v["ffc"].as_f64().unwrap(),
    );
    assert!(pifc > 0.0);
    assert_eq!(ffc, fc * pifc);
    assert_eq!(v["metric"], "l1");

    let o = clutter(&[
        "ffc",
        s(&img),
        "--fix",
        &t,
        "--target",
        &t,
        "--roi-deg",
        "2",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success());
    let v = read_json(&out.join("scene_ffc.json"));
    assert_eq!(v["pifc"].as_f64(), Some(0.0));
    assert_eq!(v["ffc"].as_f64(), Some(0.0));
}

#[test]
fn arch_writes_default_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let o = clutter(&["arch", "--out", s(dir.path())]);
    assert!(o.status.success());
    let v = read_json(&dir.path().join("arch.json"));
    assert_eq!(v["n_theta"], 25);
    assert_eq!(v["n_ecc"], 18);
    assert_eq!(v["region_count"], 275);
    let labels = RasterImage::load(dir.path().join("arch_labels.png"), 0.044).unwrap();
    assert_eq!(labels.dims(), (512, 380));
}

#[test]
fn pifc_and_score_commands() {
    let dir = tempfile::tempdir().unwrap();
    let (img, f) = fixture_png(dir.path());
    let out = dir.path().join("out");
    let t = format!("{},{}", f.target.x, f.target.y);
    let fix = format!("{},{}", f.fixations[2].1.x, f.fixations[2].1.y);
    let pifc = [
        "pifc",
        s(&img),
        "--fix",
        &fix,
        "--target",
        &t,
        "--metric",
        "l2",
        "--out",
        s(&out),
    ];
    let o = clutter(&pifc);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&out.join("scene_pifc.json"));
    assert!(v["pifc"].as_f64().unwrap() > 0.0);
    // Half resolution: 6 / 0.088 = 68.2 px.
    let diff = load_cmap(out.join("scene_pifc_diff.cmap")).unwrap();
    assert_eq!(diff.width(), 68);
    assert_eq!(diff.deg_per_px(), 0.088);

    let mut full = pifc.to_vec();
    full.push("--full-resolution");
    assert!(clutter(&full).status.success());
    // 6 / 0.044 = 136.4 px around an integral target: pixels x - 68 ..= x + 68.
    let diff = load_cmap(out.join("scene_pifc_diff.cmap")).unwrap();
    assert_eq!(diff.dims(), (137, 137));

    for model in ["fc", "ed", "se"] {
        let o = clutter(&["score", s(&img), "--model", model, "--out", s(&out), "--format", "csv"]);
        assert!(o.status.success());
        let text = String::from_utf8(o.stdout).unwrap();
        assert!(text.lines().next().unwrap().contains("score"), "{text}");
        let v = read_json(&out.join(format!("scene_{model}_score.json")));
        assert!(v["score"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn sweep_writes_fifteen_cells() {
    let dir = tempfile::tempdir().unwrap();
    let (images, trials, _) = write_trial_fixtures(dir.path(), 8);
    let out = dir.path().join("out");
    let o = clutter(&[
        "sweep",
        s(&trials),
        "--images",
        s(&images),
        "--bootstrap",
        "300",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 16);
    let v = read_json(&out.join("sweep.json"));
    assert_eq!(v["cells"].as_array().unwrap().len(), 15);
    assert_eq!(v["baseline"]["bootstrap_b"], 300);
    assert!(out.join("sweep.txt").exists());

    let o = clutter(&[
        "eval",
        s(&trials),
        "--images",
        s(&images),
        "--bootstrap",
        "300",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success());
    let v = read_json(&out.join("eval.json"));
    assert_eq!(v["foveated"]["n"], 8);
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let (img, f) = fixture_png(dir.path());
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"foveation": {"roi_deg": 4.0, "metric": "kl"}}"#).unwrap();
    let t = format!("{},{}", f.target.x, f.target.y);
    let fix = format!("{},{}", f.fixations[1].1.x, f.fixations[1].1.y);
    let out = dir.path().join("out");
    let base = [
        "ffc",
        s(&img),
        "--fix",
        &fix,
        "--target",
        &t,
        "--config",
        s(&cfg),
        "--out",
        s(&out),
    ];

    assert!(clutter(&base).status.success());
    let v = read_json(&out.join("scene_ffc.json"));
    assert_eq!(v["roi_deg"].as_f64(), Some(4.0));
    assert_eq!(v["metric"], "kl");
    let h1 = v["config_hash"].clone();

    let mut args = base.to_vec();
    args.extend(["--metric", "l1"]);
    assert!(clutter(&args).status.success());
    let v = read_json(&out.join("scene_ffc.json"));
    assert_eq!(v["roi_deg"].as_f64(), Some(4.0));
    assert_eq!(v["metric"], "l1");
    assert_ne!(v["config_hash"], h1);
    let rc = read_json(&out.join("run_config.json"));
    assert_eq!(rc["config"]["foveation"]["metric"], "l1");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let img = blank_png(dir.path());
    let out = s(dir.path());

    let missing = dir.path().join("nope.png");
    assert_eq!(clutter(&["fc", s(&missing), "--out", out]).status.code(), Some(1));

    let o = clutter(&[
        "ffc",
        s(&img),
        "--fix",
        "5,5",
        "--target",
        "20,20",
        "--roi-deg",
        "-1",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = clutter(&["ffc", s(&img), "--fix", "5,5", "--target", "2000,20", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(
        clutter(&["fc", s(&img), "--deg-per-px", "0", "--out", out])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        clutter(&["ffc", s(&img), "--fix", "5;5", "--target", "1,1"])
            .status
            .code(),
        Some(2)
    );

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"unknown_key": 1}"#).unwrap();
    assert_eq!(
        clutter(&["fc", s(&img), "--config", s(&bad), "--out", out])
            .status
            .code(),
        Some(2)
    );

    let trials = dir.path().join("t.csv");
    std::fs::write(
        &trials,
        "image_id,fix_x,fix_y,tgt_x,tgt_y,ecc_deg,hit_rate\nblank,1,1,2,2,0.044,1.5\n",
    )
    .unwrap();
    let o = clutter(&["eval", s(&trials), "--images", out, "--out", out]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}
