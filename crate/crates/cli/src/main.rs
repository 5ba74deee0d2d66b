//! `clutter`: dense clutter maps, peripheral pooling, foveated scores and
//! behavioural correlation sweeps from the command line.

mod config;
mod error;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use clutter_core::congestion::fc_map;
use clutter_core::export::{save_cmap, save_heatmap, save_labels};
use clutter_core::foveation::{pifc_map_export, scorer_for, FoveatedScorer, Metric};
use clutter_core::imagecore::{Point, RasterImage, ScalarField};
use clutter_core::models::ModelKind;
use clutter_core::peripheral::{rasterize, PeripheralArchitecture};
use clutter_core::stats::{bootstrap_correlation, load_trials};
use clutter_core::sweep::{score_trials, sweep, DirImageSource, ScoreCache, SweepConfig};
use rayon::prelude::*;
use serde_json::{json, Value};

use config::RunConfig;
use error::CliError;

#[derive(Parser)]
#[command(
    name = "clutter",
    version,
    about = "Foveated visual clutter maps, scores and statistics"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Degrees of visual angle per pixel [default: 0.044]
    #[arg(long, global = true)]
    deg_per_px: Option<f64>,
    /// Output directory
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// JSON file overriding built-in defaults (flags override it)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for batch work
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Score at the input resolution instead of halving images first
    #[arg(long, global = true)]
    full_resolution: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct Gaze {
    /// Fixation as x,y pixels
    #[arg(long, value_parser = parse_point)]
    fix: Point,
    /// Target as x,y pixels
    #[arg(long, value_parser = parse_point)]
    target: Point,
    /// ROI side in degrees
    #[arg(long)]
    roi_deg: Option<f64>,
    #[arg(long)]
    metric: Option<Metric>,
}

#[derive(Subcommand)]
enum Command {
    /// Feature Congestion map and score
    Fc {
        #[arg(required = true)]
        images: Vec<PathBuf>,
    },
    /// Peripheral architecture as JSON plus a label-map PNG
    Arch {
        #[arg(long, default_value_t = 512)]
        width: usize,
        #[arg(long, default_value_t = 380)]
        height: usize,
        /// Fixation as x,y pixels [default: image centre]
        #[arg(long, value_parser = parse_point)]
        fix: Option<Point>,
    },
    /// Pool a model's dense map through the architecture at a fixation
    Foveate {
        image: PathBuf,
        #[arg(long, value_parser = parse_point)]
        fix: Point,
        /// Target whose mask is excluded from pooling, as x,y pixels
        #[arg(long, value_parser = parse_point)]
        target: Option<Point>,
        #[arg(long)]
        model: Option<ModelKind>,
    },
    /// Peripheral integration coefficient around a target
    Pifc {
        image: PathBuf,
        #[command(flatten)]
        gaze: Gaze,
        #[arg(long)]
        model: Option<ModelKind>,
    },
    /// Foveated Feature Congestion
    Ffc {
        image: PathBuf,
        #[command(flatten)]
        gaze: Gaze,
        /// Also write the foveated and difference maps
        #[arg(long)]
        maps: bool,
    },
    /// Global or foveated score of any model
    Score {
        image: PathBuf,
        #[arg(long)]
        model: Option<ModelKind>,
        #[arg(long)]
        foveated: bool,
        #[arg(long, value_parser = parse_point)]
        fix: Option<Point>,
        #[arg(long, value_parser = parse_point)]
        target: Option<Point>,
        #[arg(long)]
        roi_deg: Option<f64>,
        #[arg(long)]
        metric: Option<Metric>,
    },
    /// Correlate foveated and plain scores with trial hit rates
    Eval {
        trials: PathBuf,
        /// Directory holding the trial images
        #[arg(long)]
        images: PathBuf,
        #[arg(long)]
        model: Option<ModelKind>,
        #[arg(long)]
        roi_deg: Option<f64>,
        #[arg(long)]
        metric: Option<Metric>,
        #[arg(long)]
        bootstrap: Option<usize>,
    },
    /// ROI size x metric correlation table
    Sweep {
        trials: PathBuf,
        #[arg(long)]
        images: PathBuf,
        #[arg(long)]
        model: Option<ModelKind>,
        #[arg(long)]
        bootstrap: Option<usize>,
        /// Recompute every score instead of reusing cached ones
        #[arg(long)]
        no_cache: bool,
    },
}

fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected x,y but got '{s}'"))?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("'{v}' is not a number"));
    Ok(Point::new(p(x)?, p(y)?))
}

struct Ctx {
    cfg: RunConfig,
    hash: String,
    out: PathBuf,
    format: Format,
}

impl Ctx {
    fn write_json(&self, name: &str, value: &Value) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value)? + "\n";
        std::fs::write(self.out.join(name), text)?;
        Ok(())
    }

    /// Writes `<name>.json` and prints the result in the requested format.
    fn emit(&self, name: &str, mut value: Value) -> Result<(), CliError> {
        if let Value::Object(m) = &mut value {
            m.insert("fc_weights".into(), serde_json::to_value(self.cfg.fc.weights)?);
            m.insert("config_hash".into(), Value::String(self.hash.clone()));
        }
        self.write_json(&format!("{name}.json"), &value)?;
        match self.format {
            Format::Json => println!("{}", serde_json::to_string_pretty(&value)?),
            Format::Csv => print!("{}", flat_csv(&value)),
        }
        Ok(())
    }

    fn map_artifacts(&self, stem: &str, field: &ScalarField) -> Result<(), CliError> {
        save_cmap(self.out.join(format!("{stem}.cmap")), field)?;
        save_heatmap(self.out.join(format!("{stem}.png")), field)?;
        Ok(())
    }

    fn load(&self, path: &Path) -> Result<RasterImage, CliError> {
        Ok(RasterImage::load(path, self.cfg.deg_per_px)?)
    }

    fn scorer(&self, img: &RasterImage) -> Result<FoveatedScorer, CliError> {
        let model = self.cfg.dense_model();
        Ok(scorer_for(img, &self.cfg.foveation, |w| model.dense_map(w))?)
    }
}

/// Header plus one row of the scalar top-level fields.
fn flat_csv(value: &Value) -> String {
    let Value::Object(m) = value else {
        return format!("{value}\n");
    };
    let fields: Vec<(&String, String)> = m
        .iter()
        .filter_map(|(k, v)| match v {
            Value::String(s) => Some((k, s.clone())),
            Value::Number(_) | Value::Bool(_) => Some((k, v.to_string())),
            _ => None,
        })
        .collect();
    let header: Vec<&str> = fields.iter().map(|(k, _)| k.as_str()).collect();
    let row: Vec<&str> = fields.iter().map(|(_, v)| v.as_str()).collect();
    format!("{}\n{}\n", header.join(","), row.join(","))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "image".to_owned(), |s| s.to_string_lossy().into_owned())
}

fn resolve(common: &Common, command: &Command) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(d) = common.deg_per_px {
        cfg.deg_per_px = d;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if common.full_resolution {
        cfg.foveation.half_resolution = false;
    }
    let mut set = |model: &Option<ModelKind>, roi: &Option<f64>, metric: &Option<Metric>| {
        if let Some(m) = model {
            cfg.model = *m;
        }
        if let Some(r) = roi {
            cfg.foveation.roi_deg = *r;
        }
        if let Some(m) = metric {
            cfg.foveation.metric = *m;
        }
    };
    match command {
        Command::Fc { .. } | Command::Arch { .. } => {}
        Command::Foveate { model, .. } => set(model, &None, &None),
        Command::Pifc { gaze, model, .. } => set(model, &gaze.roi_deg, &gaze.metric),
        Command::Ffc { gaze, .. } => set(&Some(ModelKind::Fc), &gaze.roi_deg, &gaze.metric),
        Command::Score {
            model, roi_deg, metric, ..
        } => set(model, roi_deg, metric),
        Command::Eval {
            model,
            roi_deg,
            metric,
            bootstrap,
            ..
        } => {
            set(model, roi_deg, metric);
            if let Some(b) = bootstrap {
                cfg.bootstrap_b = *b;
            }
        }
        Command::Sweep { model, bootstrap, .. } => {
            set(model, &None, &None);
            if let Some(b) = bootstrap {
                cfg.bootstrap_b = *b;
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = resolve(&cli.common, &cli.command)?;
    if let Some(j) = cli.common.jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    std::fs::create_dir_all(&cli.common.out)?;
    let ctx = Ctx {
        hash: cfg.hash(),
        cfg,
        out: cli.common.out.clone(),
        format: cli.common.format,
    };
    eprintln!("config_hash {}", ctx.hash);
    ctx.write_json(
        "run_config.json",
        &json!({ "config": ctx.cfg, "config_hash": ctx.hash }),
    )?;

    match cli.command {
        Command::Fc { images } => cmd_fc(&ctx, &images),
        Command::Arch { width, height, fix } => cmd_arch(&ctx, width, height, fix),
        Command::Foveate { image, fix, target, .. } => cmd_foveate(&ctx, &image, fix, target),
        Command::Pifc { image, gaze, .. } => cmd_pifc(&ctx, &image, &gaze),
        Command::Ffc { image, gaze, maps } => cmd_ffc(&ctx, &image, &gaze, maps),
        Command::Score {
            image,
            foveated,
            fix,
            target,
            ..
        } => cmd_score(&ctx, &image, foveated, fix, target),
        Command::Eval { trials, images, .. } => cmd_eval(&ctx, &trials, &images),
        Command::Sweep {
            trials,
            images,
            no_cache,
            ..
        } => cmd_sweep(&ctx, &trials, &images, no_cache),
    }
}

fn cmd_fc(ctx: &Ctx, images: &[PathBuf]) -> Result<(), CliError> {
    let results: Vec<(String, Value, ScalarField)> = images
        .par_iter()
        .map(|path| -> Result<_, CliError> {
            let img = ctx.load(path)?;
            let r = fc_map(&img, &ctx.cfg.fc)?;
            let s = stem(path);
            let v = json!({
                "image": s,
                "width": img.width(),
                "height": img.height(),
                "deg_per_px": ctx.cfg.deg_per_px,
                "score": r.score,
            });
            Ok((s, v, r.map))
        })
        .collect::<Result<_, _>>()?;
    for (s, v, map) in results {
        ctx.map_artifacts(&format!("{s}_fc"), &map)?;
        ctx.emit(&format!("{s}_fc"), v)?;
    }
    Ok(())
}

fn cmd_arch(ctx: &Ctx, width: usize, height: usize, fix: Option<Point>) -> Result<(), CliError> {
    let arch = PeripheralArchitecture::build(ctx.cfg.foveation.arch)?;
    let fix = fix.unwrap_or_else(|| Point::new((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0));
    let raster = rasterize(&arch, width, height, fix, ctx.cfg.deg_per_px)?;
    save_labels(ctx.out.join("arch_labels.png"), &raster)?;
    let counts = raster.region_pixel_counts();
    let mut v = serde_json::to_value(&arch)?;
    if let Value::Object(m) = &mut v {
        m.insert("region_count".into(), json!(arch.regions().len()));
        m.insert(
            "raster".into(),
            json!({
                "width": width,
                "height": height,
                "fixation": fix,
                "deg_per_px": ctx.cfg.deg_per_px,
                "region_pixel_counts": counts,
            }),
        );
    }
    ctx.emit("arch", v)
}

fn cmd_foveate(ctx: &Ctx, path: &Path, fix: Point, target: Option<Point>) -> Result<(), CliError> {
    let img = ctx.load(path)?;
    let scorer = ctx.scorer(&img)?;
    let (foveated, _, _) = scorer.foveate_at(fix, target.unwrap_or(fix))?;
    let s = stem(path);
    ctx.map_artifacts(&format!("{s}_foveated"), &foveated)?;
    ctx.map_artifacts(&format!("{s}_dense"), scorer.map())?;
    ctx.emit(
        &format!("{s}_foveate"),
        json!({
            "image": s,
            "model": ctx.cfg.model,
            "fixation": fix,
            "dense_mean": scorer.map().mean(),
            "foveated_mean": foveated.mean(),
            "deg_per_px": scorer.map().deg_per_px(),
        }),
    )
}

fn cmd_pifc(ctx: &Ctx, path: &Path, gaze: &Gaze) -> Result<(), CliError> {
    let img = ctx.load(path)?;
    let scorer = ctx.scorer(&img)?;
    let fov = &ctx.cfg.foveation;
    let (result, _) = scorer.pifc_detail(gaze.fix, gaze.target, fov.roi_deg, fov.metric)?;
    let s = stem(path);
    ctx.map_artifacts(&format!("{s}_pifc_diff"), &pifc_map_export(&result))?;
    ctx.emit(
        &format!("{s}_pifc"),
        json!({
            "image": s,
            "model": ctx.cfg.model,
            "pifc": result.coefficient,
            "metric": result.metric,
            "roi_deg": fov.roi_deg,
            "roi_rect": result.rect,
            "fixation": gaze.fix,
            "target": gaze.target,
        }),
    )
}

fn cmd_ffc(ctx: &Ctx, path: &Path, gaze: &Gaze, maps: bool) -> Result<(), CliError> {
    let img = ctx.load(path)?;
    let scorer = ctx.scorer(&img)?;
    let fov = &ctx.cfg.foveation;
    let score = scorer.score_with(gaze.fix, gaze.target, fov.roi_deg, fov.metric)?;
    if score.ffc != score.fc * score.pifc {
        return Err(CliError::Internal("ffc differs from fc x pifc".into()));
    }
    let s = stem(path);
    if maps {
        let (result, foveated) = scorer.pifc_detail(gaze.fix, gaze.target, fov.roi_deg, fov.metric)?;
        ctx.map_artifacts(&format!("{s}_ffc_foveated"), &foveated)?;
        ctx.map_artifacts(&format!("{s}_ffc_diff"), &pifc_map_export(&result))?;
    }
    ctx.emit(
        &format!("{s}_ffc"),
        json!({
            "image": s,
            "fc": score.fc,
            "pifc": score.pifc,
            "ffc": score.ffc,
            "metric": score.metric,
            "roi_deg": fov.roi_deg,
            "deg_per_px": ctx.cfg.deg_per_px,
            "fixation": gaze.fix,
            "target": gaze.target,
        }),
    )
}

fn cmd_score(
    ctx: &Ctx,
    path: &Path,
    foveated: bool,
    fix: Option<Point>,
    target: Option<Point>,
) -> Result<(), CliError> {
    let img = ctx.load(path)?;
    let s = stem(path);
    let model = ctx.cfg.dense_model();
    let name = format!("{s}_{}_score", ctx.cfg.model);
    if !foveated {
        let score = model.global_score(&img)?;
        return ctx.emit(&name, json!({ "image": s, "model": ctx.cfg.model, "score": score }));
    }
    let (Some(fix), Some(target)) = (fix, target) else {
        return Err(CliError::Usage("--foveated needs --fix and --target".into()));
    };
    let score = ctx.scorer(&img)?.score(fix, target)?;
    ctx.emit(
        &name,
        json!({
            "image": s,
            "model": ctx.cfg.model,
            "fc": score.fc,
            "pifc": score.pifc,
            "ffc": score.ffc,
            "metric": score.metric,
            "roi_deg": ctx.cfg.foveation.roi_deg,
            "fixation": fix,
            "target": target,
        }),
    )
}

fn load_checked_trials(ctx: &Ctx, path: &Path) -> Result<Vec<clutter_core::stats::TrialRecord>, CliError> {
    let set = load_trials(path, ctx.cfg.deg_per_px)?;
    for w in &set.warnings {
        eprintln!("warning: trials line {}: {}", w.line, w.message);
    }
    Ok(set.records)
}

fn cmd_eval(ctx: &Ctx, trials_path: &Path, images: &Path) -> Result<(), CliError> {
    let trials = load_checked_trials(ctx, trials_path)?;
    let source = DirImageSource::new(images, ctx.cfg.deg_per_px);
    let fov = &ctx.cfg.foveation;
    let cache = ScoreCache::new();
    let scores = score_trials(
        &trials,
        &ctx.cfg.dense_model(),
        &source,
        fov,
        &[fov.roi_deg],
        &[fov.metric],
        Some(&cache),
    )?;
    let hits: Vec<f64> = trials.iter().map(|t| t.hit_rate).collect();
    let x: Vec<f64> = scores.iter().map(|s| s[0].ffc).collect();
    let plain: Vec<f64> = scores.iter().map(|s| s[0].fc).collect();
    let foveated = bootstrap_correlation(&x, &hits, ctx.cfg.bootstrap_b, ctx.cfg.seed)?;
    let baseline = bootstrap_correlation(&plain, &hits, ctx.cfg.bootstrap_b, ctx.cfg.seed)?;
    let value = json!({
        "model": ctx.cfg.model,
        "roi_deg": fov.roi_deg,
        "metric": fov.metric,
        "r_std_meaning": "bootstrap standard deviation",
        "foveated": foveated,
        "baseline": baseline,
    });
    if ctx.format == Format::Csv {
        let mut text = String::from("score,r_observed,r_mean,r_std,ci_low,ci_high,p_value,n,df,bootstrap_b,seed\n");
        for (label, r) in [("foveated", &foveated), ("baseline", &baseline)] {
            text += &format!(
                "{label},{},{},{},{},{},{},{},{},{},{}\n",
                r.r_observed, r.r_mean, r.r_std, r.ci_low, r.ci_high, r.p_value, r.n, r.df, r.bootstrap_b, r.seed
            );
        }
        std::fs::write(ctx.out.join("eval.csv"), &text)?;
    }
    ctx.emit("eval", value)
}

fn cmd_sweep(ctx: &Ctx, trials_path: &Path, images: &Path, no_cache: bool) -> Result<(), CliError> {
    let trials = load_checked_trials(ctx, trials_path)?;
    let source = DirImageSource::new(images, ctx.cfg.deg_per_px);
    let sweep_cfg = SweepConfig {
        roi_sides_deg: ctx.cfg.roi_sides_deg.clone(),
        metrics: Metric::ALL.to_vec(),
        bootstrap_b: ctx.cfg.bootstrap_b,
        seed: ctx.cfg.seed,
        use_cache: !no_cache,
    };
    let table = sweep(&trials, &ctx.cfg.dense_model(), &source, &ctx.cfg.foveation, &sweep_cfg)?;
    let mut csv = Vec::new();
    table.write_csv(&mut csv)?;
    std::fs::write(ctx.out.join("sweep.csv"), &csv)?;
    let text = table.to_text();
    std::fs::write(ctx.out.join("sweep.txt"), &text)?;
    let mut value = serde_json::to_value(&table)?;
    if let Value::Object(m) = &mut value {
        m.insert("fc_weights".into(), serde_json::to_value(ctx.cfg.fc.weights)?);
        m.insert("config_hash".into(), Value::String(ctx.hash.clone()));
        m.insert("r_std_meaning".into(), json!("bootstrap standard deviation"));
    }
    ctx.write_json("sweep.json", &value)?;
    match ctx.format {
        Format::Json => print!("{text}"),
        Format::Csv => print!("{}", String::from_utf8_lossy(&csv)),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => ExitCode::from(3),
    }
}
