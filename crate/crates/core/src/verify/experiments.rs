use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::plan::{ExperimentKind, ExperimentPlan};
use super::result::*;
use crate::combinatorics::{
    enumerate_ncpp, enumerate_pair_partitions, enumerate_partitions, star_abs_expectation, tally_classes,
    ClassCount,
};
use crate::ensemble::{
    covariance_model, generate_diagonal, sample_matrix, EnsembleConfig, ProcessSpec, SymmetricMatrix,
};
use crate::error::{config_err, Result};
use crate::rng::Stream;
use crate::spectral::{
    eigenvalues, empirical_distribution, kolmogorov_distance, semicircle_moment, trace_moment, Bins,
    SemicircleLaw, Spectrum,
};
use crate::stats::{fit_line, fourth_central_moment, pairwise_sum, Estimate};

/// Replica 0 spectra kept for CSV output, keyed by ensemble label and size.
pub(crate) type Artifacts = Vec<(String, usize, Spectrum)>;

fn require_kind(plan: &ExperimentPlan, kinds: &[ExperimentKind]) -> Result<()> {
    plan.validate()?;
    if !kinds.contains(&plan.kind) {
        return config_err(format!("plan kind {:?} does not match this experiment", plan.kind));
    }
    Ok(())
}

/// `f(spectrum of replica j)` for `j < replicas`, in replica order.
fn map_spectra<T, F>(config: &EnsembleConfig, replicas: u32, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u32, Spectrum) -> T + Sync,
{
    (0..replicas)
        .into_par_iter()
        .map(|j| {
            let spectrum = eigenvalues(&sample_matrix(config, j)?)?;
            Ok(f(j, spectrum))
        })
        .collect()
}

fn limit_moment(k: u32) -> f64 {
    semicircle_moment(k).to_f64().unwrap_or(f64::INFINITY)
}

pub(crate) fn convergence(plan: &ExperimentPlan) -> Result<(ExperimentResult, Artifacts)> {
    require_kind(plan, &[ExperimentKind::Convergence, ExperimentKind::Counterexample])?;
    let mut artifacts = Vec::new();
    let mut series = Vec::new();
    for entry in &plan.ensembles {
        let mut points = Vec::new();
        for &n in &plan.ladder {
            let config = EnsembleConfig::new(n, entry.process.clone(), plan.seed);
            let per = map_spectra(&config, plan.replicas, |j, s| -> Result<_> {
                let ks = kolmogorov_distance(&empirical_distribution(&s, Bins::Count(1))?, &SemicircleLaw);
                let m4 = trace_moment(&s, 4);
                Ok((ks, m4, (j == 0).then_some(s)))
            })?;
            let mut ks = Vec::new();
            let mut m4 = Vec::new();
            for item in per {
                let (d, m, s) = item?;
                ks.push(d);
                m4.push(m);
                if let Some(s) = s {
                    artifacts.push((entry.label.clone(), n, s));
                }
            }
            points.push(ConvergencePoint {
                n,
                ks_mean: Estimate::from_samples(&ks),
                ks,
                m4,
            });
        }
        series.push(ConvergenceSeries {
            label: entry.label.clone(),
            points,
        });
    }
    Ok((ExperimentResult::new(plan.clone(), Statistics::Convergence(series))?, artifacts))
}

pub(crate) fn moments(plan: &ExperimentPlan) -> Result<(ExperimentResult, Artifacts)> {
    require_kind(plan, &[ExperimentKind::Moments])?;
    let mut artifacts = Vec::new();
    let mut series = Vec::new();
    for entry in &plan.ensembles {
        let mut points = Vec::new();
        for &n in &plan.ladder {
            let config = EnsembleConfig::new(n, entry.process.clone(), plan.seed);
            let per = map_spectra(&config, plan.replicas, |j, s| {
                let ms: Vec<f64> = plan.orders.iter().map(|&k| trace_moment(&s, k)).collect();
                (ms, (j == 0).then_some(s))
            })?;
            let mut moments: Vec<MomentStat> = plan
                .orders
                .iter()
                .map(|&k| MomentStat {
                    k,
                    limit: limit_moment(k),
                    values: Vec::new(),
                    estimate: Estimate::from_samples(&[]),
                })
                .collect();
            for (ms, s) in per {
                for (stat, v) in moments.iter_mut().zip(ms) {
                    stat.values.push(v);
                }
                if let Some(s) = s {
                    artifacts.push((entry.label.clone(), n, s));
                }
            }
            for stat in &mut moments {
                stat.estimate = Estimate::from_samples(&stat.values);
            }
            points.push(MomentPoint { n, moments });
        }
        series.push(MomentSeries {
            label: entry.label.clone(),
            points,
        });
    }
    Ok((ExperimentResult::new(plan.clone(), Statistics::Moments(series))?, artifacts))
}

pub(crate) fn lemma_counts(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    require_kind(plan, &[ExperimentKind::LemmaCounts])?;
    let weight = plan.ensembles.iter().find(|e| e.process.is_gaussian());
    let (weight_model, model) = match weight {
        Some(e) => (e.label.clone(), covariance_model(&e.process)),
        None => ("iid".to_string(), covariance_model(&ProcessSpec::Iid)),
    };
    let mut orders = Vec::new();
    for &k in &plan.orders {
        let k = k as usize;
        let pairs: Vec<_> = enumerate_pair_partitions(k)?.collect();
        let crossing: Vec<_> = pairs.iter().filter(|p| p.is_crossing()).collect();
        let mut points = Vec::new();
        for &n in &plan.ladder {
            let tally = tally_classes(n, k)?;
            let tuples_classified = tally.iter().map(|c| c.s_n).sum();
            let pair_classes = pairs
                .iter()
                .map(|pp| {
                    tally
                        .iter()
                        .find(|c| &c.partition == pp.partition())
                        .cloned()
                        .unwrap_or(ClassCount {
                            partition: pp.partition().clone(),
                            s_n: 0,
                            s_n_star: 0,
                        })
                })
                .collect();
            let crossing_weights = crossing
                .iter()
                .map(|pp| Ok((pp.to_string(), star_abs_expectation(pp.partition(), n, &model)?.0)))
                .collect::<Result<Vec<_>>>()?;
            points.push(LemmaPoint {
                n,
                tuples_classified,
                pair_classes,
                crossing_weights,
            });
        }
        orders.push(LemmaOrder {
            k,
            partitions: enumerate_partitions(k)?.count() as u64,
            pair_partitions: pairs.len() as u64,
            noncrossing_pair_partitions: enumerate_ncpp(k)?.count() as u64,
            weight_model: weight_model.clone(),
            points,
        });
    }
    ExperimentResult::new(plan.clone(), Statistics::LemmaCounts(orders))
}

pub(crate) fn variance_scaling(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    variance_scaling_with(plan, sample_matrix)
}

/// Variance scaling with a replaceable matrix sampler.
pub(crate) fn variance_scaling_with<S>(plan: &ExperimentPlan, sampler: S) -> Result<ExperimentResult>
where
    S: Fn(&EnsembleConfig, u32) -> Result<SymmetricMatrix> + Sync,
{
    require_kind(plan, &[ExperimentKind::VarianceScaling])?;
    let powers = plan.trace_powers();
    let mut series = Vec::new();
    for entry in &plan.ensembles {
        let mut per_n = Vec::new();
        for &n in &plan.ladder {
            let config = EnsembleConfig::new(n, entry.process.clone(), plan.seed);
            let traces: Vec<Vec<f64>> = (0..plan.replicas)
                .into_par_iter()
                .map(|j| {
                    let s = eigenvalues(&sampler(&config, j)?)?;
                    Ok(powers.iter().map(|&k| n as f64 * trace_moment(&s, k)).collect())
                })
                .collect::<Result<_>>()?;
            per_n.push((n, traces));
        }
        for (idx, &k) in powers.iter().enumerate() {
            let points: Vec<VariancePoint> = per_n
                .iter()
                .map(|(n, traces)| {
                    let t: Vec<f64> = traces.iter().map(|row| row[idx]).collect();
                    VariancePoint {
                        n: *n,
                        fourth_central: fourth_central_moment(&t),
                        traces: t,
                    }
                })
                .collect();
            let fit = if points.iter().all(|p| p.fourth_central > 0.0) {
                let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
                let ys: Vec<f64> = points.iter().map(|p| p.fourth_central.ln()).collect();
                fit_line(&xs, &ys)
            } else {
                None
            };
            series.push(VarianceSeries {
                label: entry.label.clone(),
                k,
                points,
                fit,
            });
        }
    }
    ExperimentResult::new(plan.clone(), Statistics::VarianceScaling(series))
}

/// Lag-`τ` sample autocovariances `(1/(L-τ)) Σ_t a_t a_{t+τ}` of one path.
fn autocovariances(path: &[f64], max_tau: usize) -> Vec<f64> {
    (0..=max_tau)
        .map(|tau| {
            if tau >= path.len() {
                return f64::NAN;
            }
            let prods: Vec<f64> = path.iter().zip(&path[tau..]).map(|(a, b)| a * b).collect();
            pairwise_sum(&prods) / prods.len() as f64
        })
        .collect()
}

pub(crate) fn covariance_decay(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    require_kind(plan, &[ExperimentKind::CovarianceDecay])?;
    if plan.ladder.iter().any(|&l| l <= plan.max_tau) {
        return config_err("diagonal lengths must exceed max_tau");
    }
    let mut series = Vec::new();
    for entry in &plan.ensembles {
        let model = covariance_model(&entry.process);
        let exact = model.sequence(plan.max_tau);
        let geometric = match &entry.process {
            ProcessSpec::GaussAr1 { .. } | ProcessSpec::ConstantDiagonal => true,
            ProcessSpec::FiniteMarkov(c) => c.num_states() == 2,
            ProcessSpec::Iid => false,
        };
        let log_fit = if geometric && exact.iter().all(|&c| c != 0.0) {
            let taus: Vec<f64> = (0..exact.len()).map(|t| t as f64).collect();
            let logs: Vec<f64> = exact.iter().map(|c| c.abs().ln()).collect();
            fit_line(&taus, &logs)
        } else {
            None
        };
        let slem = match &entry.process {
            ProcessSpec::FiniteMarkov(c) => Some(c.slem()),
            _ => None,
        };
        let mut samples = Vec::new();
        for &length in &plan.ladder {
            let per: Vec<Vec<f64>> = (0..plan.replicas)
                .into_par_iter()
                .map(|j| {
                    let mut stream = Stream::new(plan.seed, j, 0);
                    let path = generate_diagonal(&entry.process, length, &mut stream)?;
                    Ok(autocovariances(&path, plan.max_tau))
                })
                .collect::<Result<_>>()?;
            let estimates = (0..=plan.max_tau)
                .map(|tau| {
                    let xs: Vec<f64> = per.iter().map(|row| row[tau]).collect();
                    Estimate::from_samples(&xs)
                })
                .collect();
            samples.push(CovarianceSample { length, estimates });
        }
        series.push(CovarianceSeries {
            label: entry.label.clone(),
            exact,
            summability: model.abs_sum(),
            log_fit,
            slem,
            samples,
        });
    }
    ExperimentResult::new(plan.clone(), Statistics::CovarianceDecay(series))
}

/// Replica means of `(1/n) tr X^k` for each `k` in `orders`.
pub fn monte_carlo_trace_moments(config: &EnsembleConfig, replicas: u32, orders: &[u32]) -> Result<Vec<Estimate>> {
    config.validate()?;
    if replicas == 0 {
        return config_err("replicas must be at least 1");
    }
    let per = map_spectra(config, replicas, |_, s| {
        orders.iter().map(|&k| trace_moment(&s, k)).collect::<Vec<f64>>()
    })?;
    Ok((0..orders.len())
        .map(|i| {
            let xs: Vec<f64> = per.iter().map(|row| row[i]).collect();
            Estimate::from_samples(&xs)
        })
        .collect())
}
