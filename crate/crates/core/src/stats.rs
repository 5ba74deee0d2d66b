//! Behavioural trial ingestion and score/hit-rate correlation statistics.

use std::io::Read;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ClutterError, Result, RowIssue};
use crate::imagecore::Point;

pub const TRIAL_HEADER: [&str; 7] = ["image_id", "fix_x", "fix_y", "tgt_x", "tgt_y", "ecc_deg", "hit_rate"];

/// Largest tolerated gap between the recorded eccentricity and the one implied
/// by the fixation/target geometry, degrees.
pub const ECC_TOLERANCE_DEG: f64 = 0.5;

/// One forced-fixation condition: an image, a fixation, a target and the
/// observed hit rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub image_id: String,
    pub fixation: Point,
    pub target: Point,
    pub ecc_deg: f64,
    pub hit_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSet {
    pub records: Vec<TrialRecord>,
    /// Rows whose eccentricity disagrees with their geometry.
    pub warnings: Vec<RowIssue>,
}

pub fn load_trials(path: impl AsRef<Path>, deg_per_px: f64) -> Result<TrialSet> {
    read_trials(std::fs::File::open(path)?, deg_per_px)
}

/// Parses trial CSV. Malformed fields fail immediately with their line;
/// rows breaking value invariants are gathered and rejected together.
pub fn read_trials(reader: impl Read, deg_per_px: f64) -> Result<TrialSet> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != TRIAL_HEADER {
        return Err(ClutterError::TrialParse {
            line: 1,
            message: format!("expected header {}, got {}", TRIAL_HEADER.join(","), header.join(",")),
        });
    }
    let mut records = Vec::new();
    let mut rejected = Vec::new();
    let mut warnings = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        if row.len() != TRIAL_HEADER.len() {
            return Err(ClutterError::TrialParse {
                line,
                message: format!("expected {} fields, got {}", TRIAL_HEADER.len(), row.len()),
            });
        }
        let num = |i: usize| -> Result<f64> {
            row[i].parse::<f64>().map_err(|_| ClutterError::TrialParse {
                line,
                message: format!("{} is not a number: '{}'", TRIAL_HEADER[i], &row[i]),
            })
        };
        let rec = TrialRecord {
            image_id: row[0].to_owned(),
            fixation: Point::new(num(1)?, num(2)?),
            target: Point::new(num(3)?, num(4)?),
            ecc_deg: num(5)?,
            hit_rate: num(6)?,
        };
        let mut problems = Vec::new();
        if rec.image_id.is_empty() {
            problems.push("empty image_id".to_owned());
        }
        if ![rec.fixation.x, rec.fixation.y, rec.target.x, rec.target.y]
            .iter()
            .all(|v| v.is_finite())
        {
            problems.push("non-finite coordinate".to_owned());
        }
        if !(0.0..=1.0).contains(&rec.hit_rate) {
            problems.push(format!("hit_rate {} outside [0, 1]", rec.hit_rate));
        }
        if !(rec.ecc_deg.is_finite() && rec.ecc_deg >= 0.0) {
            problems.push(format!("ecc_deg {} must be non-negative", rec.ecc_deg));
        }
        if !problems.is_empty() {
            rejected.push(RowIssue {
                line,
                message: problems.join(", "),
            });
            continue;
        }
        let geometric = rec.fixation.distance(&rec.target) * deg_per_px;
        if (geometric - rec.ecc_deg).abs() > ECC_TOLERANCE_DEG {
            warnings.push(RowIssue {
                line,
                message: format!(
                    "ecc_deg {} but fixation-target distance is {:.3} deg",
                    rec.ecc_deg, geometric
                ),
            });
        }
        records.push(rec);
    }
    if !rejected.is_empty() {
        return Err(ClutterError::InvalidTrials(rejected));
    }
    Ok(TrialSet { records, warnings })
}

/// Writes trials with the canonical header.
pub fn write_trials(writer: impl std::io::Write, trials: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(TRIAL_HEADER)?;
    for t in trials {
        w.write_record([
            t.image_id.clone(),
            t.fixation.x.to_string(),
            t.fixation.y.to_string(),
            t.target.x.to_string(),
            t.target.y.to_string(),
            t.ecc_deg.to_string(),
            t.hit_rate.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Sample Pearson correlation.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(ClutterError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(ClutterError::TooFewSamples {
            needed: 3,
            got: x.len(),
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(ClutterError::ConstantInput);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Bootstrap summary of a correlation. `r_std` is the standard deviation of
/// the bootstrap distribution, not a confidence half-width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub r_observed: f64,
    pub r_mean: f64,
    pub r_std: f64,
    /// 2.5th and 97.5th percentiles of the bootstrap distribution.
    pub ci_low: f64,
    pub ci_high: f64,
    /// One-sided permutation p-value for a negative correlation.
    pub p_value: f64,
    pub n: usize,
    pub df: usize,
    pub bootstrap_b: usize,
    pub seed: u64,
}

pub const DEFAULT_BOOTSTRAP_B: usize = 10_000;

/// Redraws allowed for a single bootstrap sample that came out constant.
const MAX_REDRAWS: usize = 1000;

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Resamples whole (x, y) pairs `b` times, then permutes y `b` times for the
/// p-value. Fully determined by `seed`.
pub fn bootstrap_correlation(x: &[f64], y: &[f64], b: usize, seed: u64) -> Result<CorrelationReport> {
    if x.len() != y.len() {
        return Err(ClutterError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 5 {
        return Err(ClutterError::TooFewSamples { needed: 5, got: n });
    }
    if b < 2 {
        return Err(ClutterError::InvalidParameter(format!(
            "bootstrap B must be at least 2, got {b}"
        )));
    }
    let r_observed = pearson_r(x, y)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut rs = Vec::with_capacity(b);
    let (mut bx, mut by) = (vec![0.0; n], vec![0.0; n]);
    for _ in 0..b {
        let mut tries = 0;
        let r = loop {
            for i in 0..n {
                let j = rng.random_range(0..n);
                bx[i] = x[j];
                by[i] = y[j];
            }
            match pearson_r(&bx, &by) {
                Ok(r) => break r,
                Err(ClutterError::ConstantInput) if tries < MAX_REDRAWS => tries += 1,
                Err(e) => return Err(e),
            }
        };
        rs.push(r);
    }
    let r_mean = rs.iter().sum::<f64>() / b as f64;
    let r_std = (rs.iter().map(|r| (r - r_mean).powi(2)).sum::<f64>() / (b - 1) as f64).sqrt();
    let mut sorted = rs;
    sorted.sort_by(f64::total_cmp);

    let mut perm = y.to_vec();
    let mut at_most = 0usize;
    for _ in 0..b {
        perm.shuffle(&mut rng);
        if pearson_r(x, &perm)? <= r_observed {
            at_most += 1;
        }
    }

    Ok(CorrelationReport {
        r_observed,
        r_mean,
        r_std,
        ci_low: percentile(&sorted, 0.025),
        ci_high: percentile(&sorted, 0.975),
        p_value: (1 + at_most) as f64 / (b + 1) as f64,
        n,
        df: n - 2,
        bootstrap_b: b,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    const CSV_OK: &str = "image_id,fix_x,fix_y,tgt_x,tgt_y,ecc_deg,hit_rate\n\
                          a,0,0,100,0,4.4,0.5\n\
                          b,10,10,10,10,0,1\n";

    #[test]
    fn parses_well_formed_rows() {
        let t = read_trials(CSV_OK.as_bytes(), 0.044).unwrap();
        assert_eq!(t.records.len(), 2);
        assert!(t.warnings.is_empty());
        assert_eq!(t.records[0].target, Point::new(100.0, 0.0));
    }

    #[test]
    fn out_of_range_hit_rate_names_row() {
        let csv = format!("{CSV_OK}c,0,0,1,1,0.05,1.2\n");
        match read_trials(csv.as_bytes(), 0.044) {
            Err(ClutterError::InvalidTrials(rows)) => {
                assert_eq!(rows.len(), 1);
                assert_eq!(rows[0].line, 4);
                assert!(rows[0].message.contains("hit_rate"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn eccentricity_mismatch_warns() {
        // 100 px at 0.044 is 4.4 deg; recording 6.4 is a 2 deg discrepancy.
        let csv = "image_id,fix_x,fix_y,tgt_x,tgt_y,ecc_deg,hit_rate\nz,0,0,100,0,6.4,0.5\nz,0,0,100,0,4.5,0.5\n";
        let t = read_trials(csv.as_bytes(), 0.044).unwrap();
        assert_eq!(t.warnings.len(), 1);
        assert_eq!(t.warnings[0].line, 2);
    }

    #[test]
    fn parse_errors_carry_line() {
        let bad_num = format!("{CSV_OK}c,zero,0,1,1,0.05,0.2\n");
        assert!(matches!(
            read_trials(bad_num.as_bytes(), 0.044),
            Err(ClutterError::TrialParse { line: 4, .. })
        ));
        let short = format!("{CSV_OK}c,0,0\n");
        assert!(matches!(
            read_trials(short.as_bytes(), 0.044),
            Err(ClutterError::TrialParse { line: 4, .. })
        ));
        assert!(matches!(
            read_trials("id,x\n".as_bytes(), 0.044),
            Err(ClutterError::TrialParse { line: 1, .. })
        ));
    }

    #[test]
    fn write_then_read() {
        let t = read_trials(CSV_OK.as_bytes(), 0.044).unwrap();
        let mut buf = Vec::new();
        write_trials(&mut buf, &t.records).unwrap();
        assert_eq!(read_trials(buf.as_slice(), 0.044).unwrap().records, t.records);
    }

    #[test]
    fn pearson_perfect_lines() {
        let x: Vec<f64> = (0..10).map(|i| i as f64 * 0.7).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert!((pearson_r(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson_r(&x, &neg).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_ten_point_fixture() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
        let y = [2.0, 1.0, 4.0, 3.0, 7.0, 8.0, 6.0, 9.0, 12.0, 10.0];
        // Desk computation: sum dx^2 = 82.5, sum dy^2 = 119.6, sum dxdy = 92.
        let expect = 92.0 / (82.5f64 * 119.6).sqrt();
        assert!((pearson_r(&x, &y).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn pearson_errors() {
        assert!(matches!(
            pearson_r(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]),
            Err(ClutterError::ConstantInput)
        ));
        assert!(matches!(
            pearson_r(&[1.0, 2.0], &[1.0, 2.0]),
            Err(ClutterError::TooFewSamples { .. })
        ));
        assert!(matches!(
            pearson_r(&[1.0, 2.0, 3.0], &[1.0, 2.0]),
            Err(ClutterError::LengthMismatch(3, 2))
        ));
    }

    #[test]
    fn bootstrap_on_perfect_correlation() {
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 2.0).collect();
        let r = bootstrap_correlation(&x, &y, 2000, 7).unwrap();
        assert!((r.r_mean - 1.0).abs() < 1e-12);
        assert!(r.r_std < 1e-12);
        assert_eq!(r.df, 18);
        // Nothing beats a perfect positive correlation from below.
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn bootstrap_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..30).map(|_| rng.random()).collect();
        let y: Vec<f64> = x.iter().map(|v| -v + rng.random::<f64>()).collect();
        let a = bootstrap_correlation(&x, &y, 500, 11).unwrap();
        let b = bootstrap_correlation(&x, &y, 500, 11).unwrap();
        assert_eq!(a, b);
        let c = bootstrap_correlation(&x, &y, 500, 12).unwrap();
        assert!((a.r_mean - c.r_mean).abs() < 3.0 * a.r_std);
        assert!(a.r_mean < 0.0 && a.p_value < 0.05);
    }

    #[test]
    fn independent_samples_are_not_significant() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let x: Vec<f64> = (0..46).map(|_| rng.random()).collect();
        let y: Vec<f64> = (0..46).map(|_| rng.random()).collect();
        let r = bootstrap_correlation(&x, &y, 2000, 1).unwrap();
        assert!(r.r_mean.abs() < 0.15, "{r:?}");
        assert!(r.p_value > 0.05, "{r:?}");
    }

    proptest! {
        #[test]
        fn pearson_affine_and_sign(
            xs in prop::collection::vec(-100.0f64..100.0, 5..40),
            noise in prop::collection::vec(-10.0f64..10.0, 40),
            a in 0.01f64..50.0, b in -100.0f64..100.0,
            c in 0.01f64..50.0, d in -100.0f64..100.0,
        ) {
            let ys: Vec<f64> = xs.iter().zip(&noise).map(|(x, e)| 0.5 * x + e).collect();
            prop_assume!(pearson_r(&xs, &ys).is_ok());
            let r = pearson_r(&xs, &ys).unwrap();
            let xt: Vec<f64> = xs.iter().map(|v| a * v + b).collect();
            let yt: Vec<f64> = ys.iter().map(|v| c * v + d).collect();
            prop_assert!((pearson_r(&xt, &yt).unwrap() - r).abs() < 1e-9);
            let yn: Vec<f64> = ys.iter().map(|v| -v).collect();
            prop_assert!((pearson_r(&xs, &yn).unwrap() + r).abs() < 1e-12);
        }
    }
}
