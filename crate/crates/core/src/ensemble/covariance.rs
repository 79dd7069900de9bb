use serde::{Deserialize, Serialize};

use super::markov::{markov_covariance, MarkovChainSpec};
use super::process::ProcessSpec;

/// Stop summing a chain's covariances once the certified tail is below this.
pub const MARKOV_TAIL_TOL: f64 = 1e-12;
const MARKOV_MAX_TERMS: usize = 50_000_000;

/// Whether `Σ_τ |Cov(τ)|` is finite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Summability {
    /// `sum` includes `terms` lags, the remaining tail being at most `tail_bound`.
    /// `terms = 0` marks a closed-form sum over all lags.
    Finite {
        sum: f64,
        terms: usize,
        tail_bound: f64,
    },
    Divergent,
}

impl Summability {
    pub fn is_finite(&self) -> bool {
        matches!(self, Summability::Finite { .. })
    }

    pub fn sum(&self) -> Option<f64> {
        match self {
            Summability::Finite { sum, .. } => Some(*sum),
            Summability::Divergent => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Law {
    White,
    Geometric(f64),
    Chain(Box<MarkovChainSpec>),
    Constant,
}

/// Along-diagonal covariance `τ -> Cov(τ)` of a diagonal process.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceModel {
    law: Law,
    gaussian: bool,
    abs_sum: Summability,
}

impl CovarianceModel {
    pub fn cov(&self, tau: usize) -> f64 {
        match &self.law {
            Law::White => {
                if tau == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            Law::Geometric(rho) => rho.powi(tau.min(i32::MAX as usize) as i32),
            Law::Chain(c) => markov_covariance(c, tau as u64),
            Law::Constant => 1.0,
        }
    }

    /// `Cov(0), ..., Cov(max_tau)`.
    pub fn sequence(&self, max_tau: usize) -> Vec<f64> {
        match &self.law {
            Law::Chain(c) => c.covariance_sequence(max_tau),
            _ => (0..=max_tau).map(|t| self.cov(t)).collect(),
        }
    }

    /// Whether the generating process is jointly Gaussian.
    pub fn is_gaussian(&self) -> bool {
        self.gaussian
    }

    pub fn abs_sum(&self) -> Summability {
        self.abs_sum
    }
}

pub fn covariance_model(process: &ProcessSpec) -> CovarianceModel {
    match process {
        ProcessSpec::Iid => CovarianceModel {
            law: Law::White,
            gaussian: true,
            abs_sum: Summability::Finite {
                sum: 1.0,
                terms: 1,
                tail_bound: 0.0,
            },
        },
        ProcessSpec::GaussAr1 { rho } => CovarianceModel {
            law: Law::Geometric(*rho),
            gaussian: true,
            abs_sum: Summability::Finite {
                sum: 1.0 / (1.0 - rho.abs()),
                terms: 0,
                tail_bound: 0.0,
            },
        },
        ProcessSpec::FiniteMarkov(chain) => CovarianceModel {
            abs_sum: markov_abs_sum(chain),
            law: Law::Chain(Box::new(chain.clone())),
            gaussian: false,
        },
        ProcessSpec::ConstantDiagonal => CovarianceModel {
            law: Law::Constant,
            gaussian: true,
            abs_sum: Summability::Divergent,
        },
    }
}

/// Sums `|Cov(τ)|` until the tail bound `λ^{T+1} / (1 - λ)` falls below
/// [`MARKOV_TAIL_TOL`], where `λ` is the second-largest eigenvalue modulus.
/// In the symmetrized basis `Cov(τ) = <u, S^τ u>` with `|u| = 1` orthogonal to
/// the Perron vector, so `|Cov(τ)| <= λ^τ`.
fn markov_abs_sum(chain: &MarkovChainSpec) -> Summability {
    let lambda = chain.slem();
    let n = chain.num_states();
    let pi = chain.stationary();
    let s = chain.states();
    let p = chain.transition();
    let mut w = s.to_vec();
    let mut next = vec![0.0; n];
    let mut sum = 0.0;
    let mut tail = f64::INFINITY;
    let mut power = 1.0f64;
    let mut terms = 0;
    while terms < MARKOV_MAX_TERMS {
        if terms > 0 {
            for (i, row) in p.iter().enumerate() {
                next[i] = row.iter().zip(&w).map(|(a, x)| a * x).sum();
            }
            std::mem::swap(&mut w, &mut next);
        }
        let c: f64 = (0..n).map(|i| pi[i] * s[i] * w[i]).sum();
        sum += c.abs();
        terms += 1;
        power *= lambda;
        tail = if lambda < 1.0 { power / (1.0 - lambda) } else { f64::INFINITY };
        if tail < MARKOV_TAIL_TOL {
            break;
        }
    }
    Summability::Finite {
        sum,
        terms,
        tail_bound: tail,
    }
}
