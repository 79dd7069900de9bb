use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::ensemble::{MarkovChainSpec, ProcessSpec};
use crate::error::{config_err, Result};
use crate::DEFAULT_SEED;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Convergence,
    Moments,
    LemmaCounts,
    VarianceScaling,
    Counterexample,
    CovarianceDecay,
}

/// A named diagonal process.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleEntry {
    pub label: String,
    pub process: ProcessSpec,
}

impl EnsembleEntry {
    pub fn new(label: impl Into<String>, process: ProcessSpec) -> Self {
        Self {
            label: label.into(),
            process,
        }
    }
}

/// Calibrated thresholds. None of these is a property of the limit law; each
/// is a finite-size margin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Largest single-replica Kolmogorov distance at the top of the ladder.
    pub ks_max: f64,
    /// Smallest Kolmogorov distance expected from a non-semicircle ensemble.
    pub counterexample_ks_min: f64,
    /// Smallest single-replica `m_4` expected from a non-semicircle ensemble.
    pub counterexample_m4_min: f64,
    /// Largest single-replica `|m_4 - 2|` at the top of the ladder.
    pub m4_abs: f64,
    /// Largest single-replica `|m_k|`, odd `k <= 5`, at the top of the ladder.
    pub odd_moment_abs: f64,
    /// Standard errors allowed between the replica mean of `m_2` and 1.
    pub moment_se_factor: f64,
    /// Standard errors allowed between sampled and exact covariances.
    pub covariance_se_factor: f64,
    /// Largest log-log slope of the fourth central moment of the trace.
    pub slope_max: f64,
    /// Smallest final `#S_n*(π) / n^3` for non-crossing `π` at `k = 4`.
    pub lemma4_final_min: f64,
    /// Largest residual of the affine fit to `log |Cov(τ)|`.
    pub log_fit_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ks_max: 0.05,
            counterexample_ks_min: 0.05,
            counterexample_m4_min: 2.3,
            m4_abs: 0.3,
            odd_moment_abs: 0.2,
            moment_se_factor: 3.0,
            covariance_se_factor: 4.0,
            slope_max: 2.5,
            lemma4_final_min: 0.9,
            log_fit_residual: 1e-6,
        }
    }
}

/// Everything needed to rerun an experiment bit for bit.
///
/// `ladder` holds matrix sizes, or diagonal lengths for covariance decay.
/// `orders` holds moment orders: the reported `k` for moments, the tuple
/// lengths for lemma counts, and the trace power for variance scaling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub kind: ExperimentKind,
    pub ensembles: Vec<EnsembleEntry>,
    pub ladder: Vec<usize>,
    pub replicas: u32,
    #[serde(default)]
    pub orders: Vec<u32>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Largest lag for covariance decay.
    #[serde(default = "default_max_tau")]
    pub max_tau: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub output_dir: Option<PathBuf>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_max_tau() -> usize {
    10
}

pub const MIN_VARIANCE_REPLICAS: u32 = 200;

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.ladder.is_empty() {
            return config_err("size ladder must not be empty");
        }
        if self.ladder[0] == 0 || self.ladder.windows(2).any(|w| w[0] >= w[1]) {
            return config_err("size ladder must be positive and strictly increasing");
        }
        if self.replicas == 0 {
            return config_err("replicas must be at least 1");
        }
        let needs_ensemble = self.kind != ExperimentKind::LemmaCounts;
        if needs_ensemble && self.ensembles.is_empty() {
            return config_err("plan lists no ensembles");
        }
        for e in &self.ensembles {
            e.process.validate()?;
        }
        match self.kind {
            ExperimentKind::LemmaCounts => {
                if self.orders.is_empty() || self.orders.iter().any(|k| ![2, 4, 6].contains(k)) {
                    return config_err("lemma counts take orders in {2, 4, 6}");
                }
            }
            ExperimentKind::VarianceScaling => {
                if self.replicas < MIN_VARIANCE_REPLICAS {
                    return config_err(format!(
                        "variance scaling needs at least {MIN_VARIANCE_REPLICAS} replicas"
                    ));
                }
                if self.ladder.len() < 2 {
                    return config_err("variance scaling needs at least two sizes");
                }
                if self.orders.contains(&0) {
                    return config_err("trace power must be at least 1");
                }
            }
            ExperimentKind::Moments => {
                if self.orders.is_empty() || self.orders.contains(&0) {
                    return config_err("moments need positive orders");
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Trace powers for variance scaling; 4 when none are given.
    pub(crate) fn trace_powers(&self) -> Vec<u32> {
        if self.orders.is_empty() {
            vec![4]
        } else {
            self.orders.clone()
        }
    }
}

pub const PRESETS: [&str; 6] = ["theorem1", "moments", "lemmas", "variance", "toeplitz", "covariance"];

fn two_state(flip: f64) -> ProcessSpec {
    ProcessSpec::FiniteMarkov(MarkovChainSpec::two_state(flip).expect("valid flip probability"))
}

/// Built-in plans. `None` for an unknown name.
pub fn preset(name: &str) -> Option<ExperimentPlan> {
    use ExperimentKind::*;
    let plan = |kind, ensembles, ladder: &[usize], replicas, orders: &[u32]| ExperimentPlan {
        kind,
        ensembles,
        ladder: ladder.to_vec(),
        replicas,
        orders: orders.to_vec(),
        seed: DEFAULT_SEED,
        max_tau: default_max_tau(),
        tolerances: Tolerances::default(),
        output_dir: None,
    };
    let iid = || EnsembleEntry::new("iid", ProcessSpec::Iid);
    let ar = |rho: f64| EnsembleEntry::new(format!("ar1-{rho}"), ProcessSpec::GaussAr1 { rho });
    let markov = || EnsembleEntry::new("markov2-0.25", two_state(0.25));
    Some(match name {
        "theorem1" => plan(
            Convergence,
            vec![iid(), ar(0.3), ar(0.7), markov()],
            &[200, 800, 3200],
            3,
            &[],
        ),
        "moments" => plan(Moments, vec![iid(), ar(0.5)], &[500, 2000], 3, &[1, 2, 3, 4, 5, 6]),
        "lemmas" => plan(LemmaCounts, vec![ar(0.5)], &[5, 10, 20, 40], 1, &[2, 4]),
        "variance" => plan(VarianceScaling, vec![iid(), ar(0.5)], &[64, 128, 256, 512], 200, &[4]),
        "toeplitz" => plan(
            Counterexample,
            vec![EnsembleEntry::new("toeplitz", ProcessSpec::ConstantDiagonal)],
            &[200, 800, 3200],
            3,
            &[],
        ),
        "covariance" => plan(
            CovarianceDecay,
            vec![ar(0.5), markov(), iid()],
            &[100_000],
            64,
            &[],
        ),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for name in PRESETS {
            preset(name).unwrap().validate().unwrap();
        }
        assert!(preset("nope").is_none());
    }

    #[test]
    fn ladder_rules() {
        let mut p = preset("theorem1").unwrap();
        p.ladder = vec![200, 200];
        assert!(p.validate().is_err());
        p.ladder = vec![];
        assert!(p.validate().is_err());
        p.ladder = vec![10];
        p.replicas = 0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn kind_rules() {
        let mut p = preset("lemmas").unwrap();
        p.orders = vec![3];
        assert!(p.validate().is_err());
        let mut v = preset("variance").unwrap();
        v.replicas = 199;
        assert!(v.validate().is_err());
    }

    #[test]
    fn json_defaults() {
        let p: ExperimentPlan = serde_json::from_str(
            r#"{"kind": "convergence", "ensembles": [{"label": "a", "process": {"kind": "iid"}}],
                "ladder": [4, 8], "replicas": 2}"#,
        )
        .unwrap();
        assert_eq!(p.seed, DEFAULT_SEED);
        assert_eq!(p.tolerances, Tolerances::default());
        p.validate().unwrap();
        let back: ExperimentPlan = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }
}
