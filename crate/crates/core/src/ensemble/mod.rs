//! The random field `a(p, q)`, its diagonal processes and the scaled matrix.

mod conditions;
mod covariance;
mod field;
mod markov;
mod matrix;
mod process;

pub use conditions::{check_conditions, ConditionCheck, ConditionReport, MAX_ENTRY_MOMENT};
pub use covariance::{covariance_model, CovarianceModel, Summability, MARKOV_TAIL_TOL};
pub use field::{generate_ar1_diagonal, generate_diagonal, generate_field, generate_field_replica, RandomField};
pub use markov::{generate_markov_diagonal, markov_covariance, MarkovChainSpec, RawChain};
pub use matrix::{assemble_matrix, SymmetricMatrix};
pub use process::{EnsembleConfig, ProcessSpec};

use crate::error::Result;

/// Convenience: assembled matrix of replica `replica`.
pub fn sample_matrix(config: &EnsembleConfig, replica: u32) -> Result<SymmetricMatrix> {
    Ok(assemble_matrix(&generate_field_replica(config, replica)?))
}
