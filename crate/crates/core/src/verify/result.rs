use serde::{Deserialize, Serialize};

use super::plan::{ExperimentKind, ExperimentPlan, Tolerances};
use crate::combinatorics::ClassCount;
use crate::ensemble::Summability;
use crate::error::Result;
use crate::stats::{Estimate, LineFit};

/// Seed and a SHA-256 digest of the plan's canonical JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub config_sha256: String,
    pub version: String,
}

/// One pass/fail outcome. Ungated verdicts are reported as supporting
/// evidence and do not affect [`ExperimentResult::passed`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub gated: bool,
    pub detail: String,
}

impl Verdict {
    fn gate(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            gated: true,
            detail: detail.into(),
        }
    }

    fn evidence(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            gated: false,
            ..Self::gate(name, passed, detail)
        }
    }
}

/// Per-replica spectral statistics at one size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub n: usize,
    pub ks: Vec<f64>,
    pub m4: Vec<f64>,
    pub ks_mean: Estimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSeries {
    pub label: String,
    pub points: Vec<ConvergencePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentStat {
    pub k: u32,
    pub limit: f64,
    /// `(1/n) tr X^k` per replica.
    pub values: Vec<f64>,
    pub estimate: Estimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentPoint {
    pub n: usize,
    pub moments: Vec<MomentStat>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSeries {
    pub label: String,
    pub points: Vec<MomentPoint>,
}

/// Counts for every pair partition of `{1, ..., k}` at one `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaPoint {
    pub n: usize,
    /// Sum of `#S_n(π)` over every partition class that occurs.
    pub tuples_classified: u64,
    pub pair_classes: Vec<ClassCount>,
    /// Crossing `π` with `Σ_{S_n*(π)} |E[a(P_1) ... a(P_k)]|`.
    pub crossing_weights: Vec<(String, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaOrder {
    pub k: usize,
    pub partitions: u64,
    pub pair_partitions: u64,
    pub noncrossing_pair_partitions: u64,
    /// Names the Gaussian ensemble used for the crossing weights.
    pub weight_model: String,
    pub points: Vec<LemmaPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariancePoint {
    pub n: usize,
    /// `tr X^k` per replica.
    pub traces: Vec<f64>,
    pub fourth_central: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceSeries {
    pub label: String,
    pub k: u32,
    pub points: Vec<VariancePoint>,
    /// Fit of `log fourth_central` on `log n`; absent if any value is zero.
    pub fit: Option<LineFit>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceSample {
    pub length: usize,
    /// Replica mean and standard error of the lag-`τ` sample autocovariance.
    pub estimates: Vec<Estimate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceSeries {
    pub label: String,
    /// `Cov(0), ..., Cov(max_tau)`.
    pub exact: Vec<f64>,
    pub summability: Summability,
    /// Fit of `log |Cov(τ)|` on `τ`, for laws that are exactly geometric.
    pub log_fit: Option<LineFit>,
    /// Second-largest eigenvalue modulus, for chains.
    pub slem: Option<f64>,
    pub samples: Vec<CovarianceSample>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "series", rename_all = "snake_case")]
pub enum Statistics {
    Convergence(Vec<ConvergenceSeries>),
    Moments(Vec<MomentSeries>),
    LemmaCounts(Vec<LemmaOrder>),
    VarianceScaling(Vec<VarianceSeries>),
    CovarianceDecay(Vec<CovarianceSeries>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub plan: ExperimentPlan,
    pub provenance: Provenance,
    pub statistics: Statistics,
    pub verdicts: Vec<Verdict>,
}

impl ExperimentResult {
    pub(crate) fn new(plan: ExperimentPlan, statistics: Statistics) -> Result<Self> {
        let provenance = Provenance {
            seed: plan.seed,
            config_sha256: plan_digest(&plan)?,
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        let verdicts = evaluate(&plan, &statistics);
        Ok(Self {
            plan,
            provenance,
            statistics,
            verdicts,
        })
    }

    /// Whether every gated verdict passed.
    pub fn passed(&self) -> bool {
        self.verdicts.iter().filter(|v| v.gated).all(|v| v.passed)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    /// Verdicts derived afresh from the stored plan and statistics.
    pub fn recompute_verdicts(&self) -> Vec<Verdict> {
        evaluate(&self.plan, &self.statistics)
    }
}

pub fn plan_digest(plan: &ExperimentPlan) -> Result<String> {
    use sha2::{Digest, Sha256};
    let bytes = serde_json::to_vec(plan)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] > w[0])
}

fn fmt_list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

/// The verdicts implied by `stats` under `plan`'s tolerances.
pub fn evaluate(plan: &ExperimentPlan, stats: &Statistics) -> Vec<Verdict> {
    let tol = &plan.tolerances;
    match stats {
        Statistics::Convergence(series) if plan.kind == ExperimentKind::Counterexample => {
            series.iter().flat_map(|s| counterexample_verdicts(s, tol)).collect()
        }
        Statistics::Convergence(series) => series.iter().flat_map(|s| convergence_verdicts(s, tol)).collect(),
        Statistics::Moments(series) => series.iter().flat_map(|s| moment_verdicts(s, tol)).collect(),
        Statistics::LemmaCounts(orders) => orders.iter().flat_map(|o| lemma_verdicts(o, tol)).collect(),
        Statistics::VarianceScaling(series) => series.iter().map(|s| variance_verdict(s, tol)).collect(),
        Statistics::CovarianceDecay(series) => series.iter().flat_map(|s| covariance_verdicts(s, tol)).collect(),
    }
}

fn convergence_verdicts(s: &ConvergenceSeries, tol: &Tolerances) -> Vec<Verdict> {
    let means: Vec<f64> = s.points.iter().map(|p| p.ks_mean.mean).collect();
    let first: Vec<f64> = s.points.iter().map(|p| p.ks[0]).collect();
    let last = s.points.last().expect("nonempty ladder");
    let worst = last.ks.iter().cloned().fold(0.0, f64::max);
    vec![
        Verdict::gate(
            format!("{}: mean KS distance decreasing", s.label),
            strictly_decreasing(&means),
            fmt_list(&means),
        ),
        Verdict::gate(
            format!("{}: KS distance below {} at n={}", s.label, tol.ks_max, last.n),
            worst < tol.ks_max,
            format!("largest single-replica distance {worst:.6}"),
        ),
        Verdict::evidence(
            format!("{}: single-trajectory KS distance decreasing", s.label),
            strictly_decreasing(&first),
            fmt_list(&first),
        ),
    ]
}

fn counterexample_verdicts(s: &ConvergenceSeries, tol: &Tolerances) -> Vec<Verdict> {
    let last = s.points.last().expect("nonempty ladder");
    let ks_min = last.ks.iter().cloned().fold(f64::INFINITY, f64::min);
    let m4_min = last.m4.iter().cloned().fold(f64::INFINITY, f64::min);
    let means: Vec<f64> = s.points.iter().map(|p| p.ks_mean.mean).collect();
    vec![
        Verdict::gate(
            format!(
                "{}: KS distance at least {} at n={} (no semicircle limit)",
                s.label, tol.counterexample_ks_min, last.n
            ),
            ks_min >= tol.counterexample_ks_min,
            format!("smallest single-replica distance {ks_min:.6}; means {}", fmt_list(&means)),
        ),
        Verdict::gate(
            format!("{}: m4 above {} at n={}", s.label, tol.counterexample_m4_min, last.n),
            m4_min > tol.counterexample_m4_min,
            format!("smallest single-replica m4 {m4_min:.6}"),
        ),
    ]
}

fn moment_verdicts(s: &MomentSeries, tol: &Tolerances) -> Vec<Verdict> {
    let mut out = Vec::new();
    let last = s.points.last().expect("nonempty ladder");
    for p in &s.points {
        if let Some(m2) = p.moments.iter().find(|m| m.k == 2) {
            out.push(Verdict::gate(
                format!("{}: mean m2 within {} SE of 1 at n={}", s.label, tol.moment_se_factor, p.n),
                m2.estimate.agrees_with(1.0, tol.moment_se_factor),
                format!("{:.6} ± {:.2e}", m2.estimate.mean, m2.estimate.se),
            ));
        }
    }
    for m in &last.moments {
        let worst = m.values.iter().map(|v| (v - m.limit).abs()).fold(0.0, f64::max);
        let bound = match m.k {
            1 | 3 | 5 => tol.odd_moment_abs,
            4 => tol.m4_abs,
            _ => continue,
        };
        out.push(Verdict::gate(
            format!("{}: |m{} - {}| below {} at n={}", s.label, m.k, m.limit, bound, last.n),
            worst < bound,
            format!("largest single-replica deviation {worst:.6}"),
        ));
    }
    if s.points.len() >= 2 {
        for m in &last.moments {
            let errs: Vec<f64> = s
                .points
                .iter()
                .filter_map(|p| p.moments.iter().find(|x| x.k == m.k))
                .map(|x| (x.values[0] - x.limit).abs())
                .collect();
            out.push(Verdict::evidence(
                format!("{}: single-trajectory m{} error decreasing", s.label, m.k),
                strictly_decreasing(&errs),
                fmt_list(&errs),
            ));
        }
    }
    out
}

fn lemma_verdicts(o: &LemmaOrder, tol: &Tolerances) -> Vec<Verdict> {
    let k = o.k;
    let mut out = Vec::new();
    let power = |n: usize| (n as f64).powi(k as i32 / 2 + 1);
    let m = k / 2;
    out.push(Verdict::gate(
        format!("k={k}: non-crossing pair partitions number Catalan({m})"),
        num_bigint::BigUint::from(o.noncrossing_pair_partitions) == crate::spectral::catalan(m as u32),
        format!("{} of {}", o.noncrossing_pair_partitions, o.pair_partitions),
    ));
    let exhaustive = o
        .points
        .iter()
        .all(|p| Some(p.tuples_classified) == (p.n as u64).checked_pow(k as u32));
    out.push(Verdict::gate(
        format!("k={k}: partition classes exhaust T_n(k)"),
        exhaustive,
        "sum of #S_n(π) over all π equals n^k",
    ));
    let Some(first) = o.points.first() else {
        return out;
    };
    for (idx, class) in first.pair_classes.iter().enumerate() {
        let name = class.partition.to_string();
        let rows: Vec<&ClassCount> = o.points.iter().map(|p| &p.pair_classes[idx]).collect();
        let crossing = crate::combinatorics::PairPartition::try_from(class.partition.clone())
            .map(|pp| pp.is_crossing())
            .unwrap_or(false);
        let ratios: Vec<f64> = o
            .points
            .iter()
            .zip(&rows)
            .map(|(p, c)| c.s_n_star as f64 / power(p.n))
            .collect();
        if !crossing {
            let exact_one = o.points.iter().zip(&rows).all(|(p, c)| c.s_n_star as f64 == power(p.n));
            if exact_one {
                out.push(Verdict::gate(
                    format!("k={k} {name}: #S_n* / n^{} equals 1", m + 1),
                    true,
                    fmt_list(&ratios),
                ));
            } else {
                let last = *ratios.last().unwrap();
                let mut passed = strictly_increasing(&ratios) && last <= 1.0;
                let mut detail = fmt_list(&ratios);
                if k == 4 {
                    passed &= last >= tol.lemma4_final_min;
                    detail.push_str(&format!("; final at least {}", tol.lemma4_final_min));
                }
                out.push(Verdict::gate(
                    format!("k={k} {name}: #S_n* / n^{} increasing toward 1", m + 1),
                    passed,
                    detail,
                ));
            }
        }
        // S_n \ S_n*: non-increasing, and either strictly smaller at the end or identically zero
        let gaps: Vec<f64> = o
            .points
            .iter()
            .zip(&rows)
            .map(|(p, c)| (c.s_n - c.s_n_star) as f64 / power(p.n))
            .collect();
        let nonincreasing = gaps.windows(2).all(|w| w[1] <= w[0]);
        let vanishing = gaps.iter().all(|&g| g == 0.0) || gaps.last() < gaps.first();
        out.push(Verdict::gate(
            format!("k={k} {name}: (#S_n - #S_n*) / n^{} decreasing toward 0", m + 1),
            nonincreasing && vanishing,
            fmt_list(&gaps),
        ));
    }
    let names: Vec<&String> = first.crossing_weights.iter().map(|(s, _)| s).collect();
    for (idx, name) in names.into_iter().enumerate() {
        let weights: Vec<f64> = o
            .points
            .iter()
            .map(|p| p.crossing_weights[idx].1 / power(p.n))
            .collect();
        out.push(Verdict::gate(
            format!(
                "k={k} {name}: crossing weight under {} / n^{} decreasing",
                o.weight_model,
                m + 1
            ),
            strictly_decreasing(&weights),
            fmt_list(&weights),
        ));
    }
    out
}

fn variance_verdict(s: &VarianceSeries, tol: &Tolerances) -> Verdict {
    let name = format!("{}: fourth central moment of tr X^{} grows at most like n^{}", s.label, s.k, tol.slope_max);
    match s.fit {
        Some(fit) => Verdict::gate(
            name,
            fit.slope <= tol.slope_max,
            format!("log-log slope {:.4}", fit.slope),
        ),
        None => {
            let zero = s.points.iter().all(|p| p.fourth_central == 0.0);
            Verdict::gate(
                name,
                zero,
                if zero { "identically zero" } else { "slope undefined: some but not all values are zero" },
            )
        }
    }
}

fn covariance_verdicts(s: &CovarianceSeries, tol: &Tolerances) -> Vec<Verdict> {
    let mut out = Vec::new();
    if s.exact.len() > 1 && s.exact[1..].iter().all(|&c| c == 0.0) {
        out.push(Verdict::gate(
            format!("{}: Cov(τ) = 0 for τ >= 1", s.label),
            true,
            format!("Cov(0) = {}", s.exact[0]),
        ));
    }
    if let Some(fit) = s.log_fit {
        out.push(Verdict::gate(
            format!("{}: log |Cov(τ)| affine in τ", s.label),
            fit.max_residual < tol.log_fit_residual,
            format!("slope {:.12}, max residual {:.2e}", fit.slope, fit.max_residual),
        ));
        let c1 = s.exact.get(1).copied().unwrap_or(0.0);
        let worst = s
            .exact
            .iter()
            .enumerate()
            .map(|(t, c)| (c - c1.powi(t as i32)).abs())
            .fold(0.0, f64::max);
        out.push(Verdict::gate(
            format!("{}: Cov(τ) = Cov(1)^τ", s.label),
            worst <= 1e-12,
            format!("largest deviation {worst:.2e}"),
        ));
    }
    if let Some(lambda) = s.slem {
        let worst = s
            .exact
            .iter()
            .enumerate()
            .map(|(t, c)| c.abs() - s.exact[0] * lambda.powi(t as i32))
            .fold(f64::NEG_INFINITY, f64::max);
        out.push(Verdict::gate(
            format!("{}: |Cov(τ)| bounded by Cov(0) λ^τ", s.label),
            worst <= 1e-12,
            format!("λ = {lambda:.12}"),
        ));
    }
    for sample in &s.samples {
        let bad: Vec<usize> = sample
            .estimates
            .iter()
            .zip(&s.exact)
            .enumerate()
            .filter(|(_, (e, &c))| !e.agrees_with(c, tol.covariance_se_factor))
            .map(|(t, _)| t)
            .collect();
        out.push(Verdict::gate(
            format!(
                "{}: sampled Cov(τ) within {} SE of exact at length {}",
                s.label, tol.covariance_se_factor, sample.length
            ),
            bad.is_empty(),
            if bad.is_empty() { "all lags agree".to_string() } else { format!("lags {bad:?} disagree") },
        ));
    }
    out
}
