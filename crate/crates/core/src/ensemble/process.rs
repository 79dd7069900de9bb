use serde::{Deserialize, Serialize};

use super::markov::MarkovChainSpec;
use crate::error::{config_err, Result};

/// The stochastic process run along every diagonal. Each variant has mean 0
/// and variance 1 per entry.
///
/// JSON form: `{"kind": "iid"}`, `{"kind": "ar1", "rho": 0.5}`,
/// `{"kind": "markov", "states": [...], "transition": [[...]]}`,
/// `{"kind": "toeplitz"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ProcessSpec {
    /// Independent standard normals.
    #[serde(rename = "iid")]
    Iid,
    /// Stationary Gaussian AR(1) with lag-one correlation `rho`, `|rho| < 1`.
    #[serde(rename = "ar1")]
    GaussAr1 { rho: f64 },
    /// Stationary reversible ergodic finite chain.
    #[serde(rename = "markov")]
    FiniteMarkov(MarkovChainSpec),
    /// One standard normal repeated along the whole diagonal.
    #[serde(rename = "toeplitz")]
    ConstantDiagonal,
}

impl ProcessSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ProcessSpec::GaussAr1 { rho } => check_rho(*rho),
            _ => Ok(()),
        }
    }

    /// Whether the field is jointly Gaussian.
    pub fn is_gaussian(&self) -> bool {
        !matches!(self, ProcessSpec::FiniteMarkov(_))
    }

    /// Short human-readable tag, stable across runs.
    pub fn label(&self) -> String {
        match self {
            ProcessSpec::Iid => "iid".into(),
            ProcessSpec::GaussAr1 { rho } => format!("ar1(rho={rho})"),
            ProcessSpec::FiniteMarkov(c) => format!("markov(states={})", c.num_states()),
            ProcessSpec::ConstantDiagonal => "toeplitz".into(),
        }
    }
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if !(rho.is_finite() && rho.abs() < 1.0) {
        return config_err(format!("AR(1) coefficient must satisfy |rho| < 1, got {rho}"));
    }
    Ok(())
}

/// Dimension, diagonal process and master seed of one ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n: usize,
    pub seed: u64,
    pub process: ProcessSpec,
}

impl EnsembleConfig {
    pub fn new(n: usize, process: ProcessSpec, seed: u64) -> Self {
        Self { n, seed, process }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return config_err("matrix dimension n must be at least 1");
        }
        if self.n > u32::MAX as usize {
            return config_err("matrix dimension exceeds the stream index range");
        }
        self.process.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_schema() {
        let c: EnsembleConfig =
            serde_json::from_str(r#"{"n": 10, "seed": 3, "process": {"kind": "ar1", "rho": 0.5}}"#)
                .unwrap();
        assert_eq!(c.process, ProcessSpec::GaussAr1 { rho: 0.5 });
        let m: ProcessSpec = serde_json::from_str(
            r#"{"kind": "markov", "states": [0, 1], "transition": [[0.9, 0.1], [0.1, 0.9]]}"#,
        )
        .unwrap();
        assert!(matches!(m, ProcessSpec::FiniteMarkov(_)));
        let t: ProcessSpec = serde_json::from_str(r#"{"kind": "toeplitz"}"#).unwrap();
        assert_eq!(t, ProcessSpec::ConstantDiagonal);
        let s = serde_json::to_string(&ProcessSpec::Iid).unwrap();
        assert_eq!(s, r#"{"kind":"iid"}"#);
        assert!(serde_json::from_str::<ProcessSpec>(r#"{"kind": "cauchy"}"#).is_err());
    }

    #[test]
    fn validation() {
        assert!(EnsembleConfig::new(0, ProcessSpec::Iid, 1).validate().is_err());
        assert!(EnsembleConfig::new(3, ProcessSpec::GaussAr1 { rho: 1.0 }, 1).validate().is_err());
        assert!(EnsembleConfig::new(3, ProcessSpec::GaussAr1 { rho: -1.2 }, 1).validate().is_err());
        assert!(EnsembleConfig::new(3, ProcessSpec::GaussAr1 { rho: f64::NAN }, 1).validate().is_err());
        assert!(EnsembleConfig::new(3, ProcessSpec::GaussAr1 { rho: -0.99 }, 1).validate().is_ok());
    }
}
