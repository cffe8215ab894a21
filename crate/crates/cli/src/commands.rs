//! Subcommand implementations: each writes its artifacts into the output
//! directory and prints the JSON envelope to stdout.

use rayon::prelude::*;
use serde::Serialize;

use lyjump_core::jumps::{self, ComparisonReport, PeriodStats, Trajectory};
use lyjump_core::kato::{self, ClosedFormPredictions};
use lyjump_core::lambshift::{self, InversionKnowns};
use lyjump_core::nophoton::{build_cache, SpectralCache};
use lyjump_core::ratemodel;
use lyjump_core::Complex64;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{csv_header, write_csv, write_json, Envelope};

#[derive(Debug, Clone, Copy, Serialize)]
struct ComplexOut {
    re_per_s: f64,
    im_per_s: f64,
}

impl From<Complex64> for ComplexOut {
    fn from(z: Complex64) -> Self {
        Self {
            re_per_s: z.re,
            im_per_s: z.im,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct PredictOut {
    alpha_re: f64,
    alpha_im: f64,
    re_lambda2_per_s: f64,
    lambda3_zeroth: ComplexOut,
    tau_l_s: f64,
    t_dark_s: f64,
    t_light_s: f64,
    p_dark: f64,
    p_dark_inverse: f64,
    t0_s: f64,
}

impl From<&ClosedFormPredictions> for PredictOut {
    fn from(p: &ClosedFormPredictions) -> Self {
        Self {
            alpha_re: p.alpha.re,
            alpha_im: p.alpha.im,
            re_lambda2_per_s: p.re_lambda2,
            lambda3_zeroth: p.lambda3_zeroth.into(),
            tau_l_s: p.tau_l,
            t_dark_s: p.t_dark,
            t_light_s: p.t_light,
            p_dark: p.p_dark,
            p_dark_inverse: 1.0 / p.p_dark,
            t0_s: p.t0,
        }
    }
}

fn predictions_for(cfg: &RunConfig) -> Result<ClosedFormPredictions, kato::Error> {
    match cfg.t0_s {
        Some(t0) => kato::predictions_with_t0(&cfg.params, t0),
        None => kato::predictions(&cfg.params),
    }
}

pub fn predict(cfg: &RunConfig) -> Result<(), CliError> {
    let pred = predictions_for(cfg).map_err(|e| CliError::Numeric(e.to_string()))?;
    let envelope = Envelope::new("predict", cfg, PredictOut::from(&pred));
    let json = envelope.to_json();
    write_json(&cfg.out_dir.join("predict.json"), &json)?;
    println!("{json}");
    Ok(())
}

#[derive(Debug, Serialize)]
struct ExactOut {
    /// Eigenvalues of the 4×4 generator, ascending real part.
    eigenvalues: Vec<ComplexOut>,
    lambda2_exact: ComplexOut,
    re_lambda2_formula_per_s: f64,
    /// |formula − exact| / formula for Re λ₂.
    rel_deviation: f64,
    /// In-regime error budget 3(Ω/Δ₃)² + 3(Ω_L/Δ₄)².
    perturbative_bound: f64,
    /// Whether the spectral decomposition is in use (vs. expm fallback).
    spectral: bool,
}

pub fn exact(cfg: &RunConfig) -> Result<(), CliError> {
    let cache = build_cache(&cfg.params).map_err(|e| CliError::Numeric(e.to_string()))?;
    let l2 = kato::lambda2_exact(&cache);
    let formula = kato::re_lambda2(&cfg.params).map_err(|e| CliError::Numeric(e.to_string()))?;
    let p = &cfg.params;
    let result = ExactOut {
        eigenvalues: cache.eigenvalues().iter().map(|&z| z.into()).collect(),
        lambda2_exact: l2.into(),
        re_lambda2_formula_per_s: formula,
        rel_deviation: if formula != 0.0 {
            ((formula - l2.re) / formula).abs()
        } else {
            f64::NAN
        },
        perturbative_bound: 3.0 * (p.omega / p.delta3).powi(2)
            + 3.0 * (p.omega_l / p.delta4).powi(2),
        spectral: cache.is_spectral(),
    };
    let envelope = Envelope::new("exact", cfg, result);
    let json = envelope.to_json();
    write_json(&cfg.out_dir.join("exact.json"), &json)?;
    println!("{json}");
    Ok(())
}

/// Sample `n` intervals deterministically, fanning out across worker
/// threads in fixed index ranges (ordered merge keeps the stream identical
/// to a serial run).
pub fn sample_intervals(
    cache: &SpectralCache,
    n: u64,
    seed: u64,
) -> Result<Vec<f64>, jumps::Error> {
    const CHUNK: u64 = 1 << 14;
    let ranges: Vec<(u64, u64)> = (0..n)
        .step_by(CHUNK as usize)
        .map(|start| (start, (start + CHUNK).min(n)))
        .collect();
    let chunks: Result<Vec<Vec<f64>>, jumps::Error> = ranges
        .into_par_iter()
        .map(|(start, end)| jumps::simulate_range(cache, seed, start, end))
        .collect();
    let mut intervals = Vec::with_capacity(n as usize);
    for chunk in chunks? {
        intervals.extend(chunk);
    }
    Ok(intervals)
}

#[derive(Debug, Serialize)]
struct SimulateOut {
    n_intervals: u64,
    t0_s: f64,
    intervals_csv: String,
    stats: PeriodStats,
    predictions: Option<PredictOut>,
    comparison: Option<ComparisonReport>,
}

pub fn simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let cache = build_cache(&cfg.params).map_err(|e| CliError::Numeric(e.to_string()))?;
    let intervals = sample_intervals(&cache, cfg.n_intervals, cfg.seed)
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    let traj = Trajectory::from_intervals(intervals, cfg.seed, Some(cfg.params));

    // Threshold: explicit t0 wins; otherwise the closed-form default.
    let (predictions, pred_warning) = match predictions_for(cfg) {
        Ok(p) => (Some(p), None),
        Err(e) => (
            None,
            Some(format!("closed-form predictions unavailable: {e}")),
        ),
    };
    let t0 = match (cfg.t0_s, &predictions) {
        (Some(t0), _) => t0,
        (None, Some(pred)) => pred.t0,
        (None, None) => {
            return Err(CliError::Numeric(
                "closed-form T0 unavailable (omega = 0?); pass --t0 explicitly".into(),
            ))
        }
    };
    let stats = jumps::classify(&traj, t0).map_err(|e| CliError::Numeric(e.to_string()))?;
    let comparison = predictions.as_ref().map(|p| jumps::compare(&stats, p));

    let csv_path = cfg.out_dir.join("intervals.csv");
    let mut header = csv_header("simulate", cfg);
    header.push(format!("n_intervals: {}", cfg.n_intervals));
    write_csv(
        &csv_path,
        &header,
        "interval_s",
        traj.intervals().iter().map(|&dt| vec![dt]),
    )?;

    let result = SimulateOut {
        n_intervals: cfg.n_intervals,
        t0_s: t0,
        intervals_csv: csv_path.display().to_string(),
        stats: stats.clone(),
        predictions: predictions.as_ref().map(PredictOut::from),
        comparison,
    };
    let mut envelope = Envelope::new("simulate", cfg, result);
    if let Some(warning) = pred_warning {
        envelope.push_warning(warning);
    }
    if let Some(pred) = &predictions {
        let expected_dark = pred.p_dark * cfg.n_intervals as f64;
        if expected_dark < 10.0 {
            envelope.push_warning(format!(
                "expected dark periods ≈ {expected_dark:.2} at n_intervals = {}; statistics will be poor (the physical He+ numbers need ~1e7+ intervals)",
                cfg.n_intervals
            ));
        }
    }
    let json = envelope.to_json();
    write_json(&cfg.out_dir.join("simulate.json"), &json)?;
    println!("{json}");
    Ok(())
}

#[derive(Debug, Serialize)]
struct RateOut {
    gamma_per_s: f64,
    r_b_per_s: f64,
    r_r_per_s: f64,
    mu1_per_s: f64,
    mu2_per_s: f64,
    mu3_per_s: f64,
    closed_form_valid: bool,
    /// Max |closed − RK4| over the integration window.
    max_closed_form_deviation: Option<f64>,
    csv: String,
}

pub fn ratemodel_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let rp = cfg.rate;
    let (mu1, mu2, mu3) = ratemodel::mus(&rp);
    let t_end = 20.0 / rp.gamma;
    let dt = 0.05 / mu1;
    let traj =
        ratemodel::integrate(&rp, t_end, dt).map_err(|e| CliError::Numeric(e.to_string()))?;

    let max_dev = traj
        .iter()
        .filter_map(|(t, s)| {
            ratemodel::closed_form(&rp, *t).ok().map(|cf| {
                (cf.p1 - s.p1)
                    .abs()
                    .max((cf.p2 - s.p2).abs())
                    .max((cf.p3 - s.p3).abs())
            })
        })
        .fold(None, |acc: Option<f64>, d| {
            Some(acc.map_or(d, |a| a.max(d)))
        });

    let csv_path = cfg.out_dir.join("ratemodel.csv");
    write_csv(
        &csv_path,
        &csv_header("ratemodel", cfg),
        "t_s,p1,p2,p3,total",
        traj.iter()
            .map(|(t, s)| vec![*t, s.p1, s.p2, s.p3, s.total()]),
    )?;

    let result = RateOut {
        gamma_per_s: rp.gamma,
        r_b_per_s: rp.r_b,
        r_r_per_s: rp.r_r,
        mu1_per_s: mu1,
        mu2_per_s: mu2,
        mu3_per_s: mu3,
        closed_form_valid: rp.closed_form_valid(),
        max_closed_form_deviation: max_dev,
        csv: csv_path.display().to_string(),
    };
    let mut envelope = Envelope::new("ratemodel", cfg, result);
    if !rp.closed_form_valid() {
        envelope.push_warning(
            "rate closed forms assume R_R << R_B and R_R << gamma; outside that regime only the RK4 curves are meaningful".into(),
        );
    }
    let json = envelope.to_json();
    write_json(&cfg.out_dir.join("ratemodel.json"), &json)?;
    println!("{json}");
    Ok(())
}

#[derive(Debug, Serialize)]
struct InvertOut {
    td_s: f64,
    /// delta3 of the input parameter set is ignored; only the remaining
    /// parameters enter the inversion.
    candidates: Vec<CandidateOut>,
    admissible_delta3_rad_s: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct CandidateOut {
    delta3_rad_s: f64,
    forward_residual: f64,
    admissible: bool,
}

pub fn invert_lamb(cfg: &RunConfig) -> Result<(), CliError> {
    let td = cfg.td_s.ok_or_else(|| {
        CliError::Validation("invert-lamb requires --td <seconds> (or td_s in the config)".into())
    })?;
    let knowns = InversionKnowns::from(&cfg.params);
    let result = lambshift::invert_td(td, &knowns).map_err(|e| CliError::Numeric(e.to_string()))?;
    let out = InvertOut {
        td_s: td,
        candidates: result
            .candidates
            .iter()
            .map(|c| CandidateOut {
                delta3_rad_s: c.delta3,
                forward_residual: c.forward_residual,
                admissible: c.admissible,
            })
            .collect(),
        admissible_delta3_rad_s: result.admissible(),
    };
    let envelope = Envelope::new("invert-lamb", cfg, out);
    let json = envelope.to_json();
    write_json(&cfg.out_dir.join("invert_lamb.json"), &json)?;
    println!("{json}");
    Ok(())
}

#[derive(Debug, Serialize)]
struct P0Out {
    points: usize,
    t_min_s: f64,
    t_max_s: f64,
    csv: String,
    spectral: bool,
}

pub fn p0_curve(cfg: &RunConfig) -> Result<(), CliError> {
    let cache = build_cache(&cfg.params).map_err(|e| CliError::Numeric(e.to_string()))?;
    let slow = cache.eigenvalues()[0].re;
    let gamma = cfg.params.gamma;
    let t_min = 1e-3 / gamma;
    let t_max = if slow > 1e-12 * gamma {
        8.0 / (2.0 * slow)
    } else {
        100.0 / gamma
    };
    const POINTS: usize = 400;
    let log_min = t_min.ln();
    let log_max = t_max.ln();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(POINTS + 1);
    rows.push(vec![0.0, 1.0, 0.0]);
    for i in 0..POINTS {
        let t = (log_min + (log_max - log_min) * i as f64 / (POINTS - 1) as f64).exp();
        let p0 = cache.p0(t).map_err(|e| CliError::Numeric(e.to_string()))?;
        let w = cache
            .waiting_density(t)
            .map_err(|e| CliError::Numeric(e.to_string()))?;
        rows.push(vec![t, p0, w]);
    }
    let csv_path = cfg.out_dir.join("p0.csv");
    write_csv(
        &csv_path,
        &csv_header("p0", cfg),
        "t_s,p0,w_per_s",
        rows.into_iter(),
    )?;
    let result = P0Out {
        points: POINTS + 1,
        t_min_s: t_min,
        t_max_s: t_max,
        csv: csv_path.display().to_string(),
        spectral: cache.is_spectral(),
    };
    let envelope = Envelope::new("p0", cfg, result);
    let json = envelope.to_json();
    write_json(&cfg.out_dir.join("p0.json"), &json)?;
    println!("{json}");
    Ok(())
}
