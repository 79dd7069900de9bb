//! Reproducible experiments: semicircle convergence, moment convergence,
//! exhaustive lemma counts, fourth-moment scaling, the Toeplitz counterexample
//! and covariance decay.

mod experiments;
mod plan;
mod result;

use std::path::Path;

pub use experiments::monte_carlo_trace_moments;
pub use plan::{preset, EnsembleEntry, ExperimentKind, ExperimentPlan, Tolerances, MIN_VARIANCE_REPLICAS, PRESETS};
pub use result::{
    evaluate, plan_digest, ConvergencePoint, ConvergenceSeries, CovarianceSample, CovarianceSeries, ExperimentResult,
    LemmaOrder, LemmaPoint, MomentPoint, MomentSeries, MomentStat, Provenance, Statistics, VariancePoint,
    VarianceSeries, Verdict,
};

use crate::error::Result;
use crate::io::{write_counts_csv, write_histogram_csv, write_json, write_moments_csv, write_spectrum_csv, CountRow};
use crate::spectral::{empirical_distribution, Bins, MomentReport, MomentRow};

pub const RESULT_FILE: &str = "result.json";

pub fn run_convergence(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    finish(plan, experiments::convergence(plan)?)
}

/// Same statistics as [`run_convergence`], judged as a non-semicircle ensemble.
pub fn run_counterexample(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    finish(plan, experiments::convergence(plan)?)
}

pub fn run_moments(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    finish(plan, experiments::moments(plan)?)
}

pub fn run_lemma_counts(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    finish(plan, (experiments::lemma_counts(plan)?, Vec::new()))
}

pub fn run_variance_scaling(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    finish(plan, (experiments::variance_scaling(plan)?, Vec::new()))
}

pub fn run_covariance_decay(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    finish(plan, (experiments::covariance_decay(plan)?, Vec::new()))
}

/// Dispatches on `plan.kind`.
pub fn run_plan(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    match plan.kind {
        ExperimentKind::Convergence => run_convergence(plan),
        ExperimentKind::Counterexample => run_counterexample(plan),
        ExperimentKind::Moments => run_moments(plan),
        ExperimentKind::LemmaCounts => run_lemma_counts(plan),
        ExperimentKind::VarianceScaling => run_variance_scaling(plan),
        ExperimentKind::CovarianceDecay => run_covariance_decay(plan),
    }
}

fn finish(plan: &ExperimentPlan, (result, artifacts): (ExperimentResult, experiments::Artifacts)) -> Result<ExperimentResult> {
    if let Some(dir) = &plan.output_dir {
        write_outputs(dir, &result, &artifacts)?;
    }
    Ok(result)
}

fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}

fn write_outputs(dir: &Path, result: &ExperimentResult, artifacts: &experiments::Artifacts) -> Result<()> {
    for (label, n, spectrum) in artifacts {
        let stem = format!("{}_n{n}", file_stem(label));
        write_spectrum_csv(&dir.join(format!("spectrum_{stem}.csv")), spectrum)?;
        let emp = empirical_distribution(spectrum, Bins::Auto)?;
        write_histogram_csv(&dir.join(format!("histogram_{stem}.csv")), emp.histogram())?;
    }
    match &result.statistics {
        Statistics::Moments(series) => {
            for s in series {
                for p in &s.points {
                    let report = MomentReport {
                        rows: p
                            .moments
                            .iter()
                            .map(|m| MomentRow {
                                k: m.k,
                                empirical: m.estimate.mean,
                                limit: m.limit,
                                abs_error: (m.estimate.mean - m.limit).abs(),
                            })
                            .collect(),
                        entry_moment_bounds: None,
                    };
                    let path = dir.join(format!("moments_{}_n{}.csv", file_stem(&s.label), p.n));
                    write_moments_csv(&path, &report)?;
                }
            }
        }
        Statistics::LemmaCounts(orders) => {
            let rows: Vec<CountRow> = orders
                .iter()
                .flat_map(|o| {
                    o.points.iter().flat_map(move |p| {
                        p.pair_classes.iter().map(move |c| CountRow {
                            k: o.k,
                            n: p.n,
                            class: c.clone(),
                            ratio_star: c.s_n_star as f64 / (p.n as f64).powi(o.k as i32 / 2 + 1),
                        })
                    })
                })
                .collect();
            write_counts_csv(&dir.join("counts.csv"), &rows)?;
        }
        _ => {}
    }
    write_json(&dir.join(RESULT_FILE), result)
}
