//! Symmetric random matrices whose diagonals are independent stationary
//! processes, scaled by `1/sqrt(n)`.
//!
//! - [`ensemble`]: diagonal processes (i.i.d., Gaussian AR(1), reversible
//!   finite Markov chains, constant diagonals) and matrix assembly.
//! - [`spectral`]: a Householder/QL eigensolver, empirical spectral
//!   distributions and the semicircle law.
//! - [`combinatorics`]: exact enumeration of partitions, pairings and
//!   consistent index tuples behind the moment method.
//! - [`verify`]: reproducible experiments comparing all of the above.

pub mod combinatorics;
pub mod ensemble;
pub mod error;
pub mod io;
pub mod rng;
pub mod spectral;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_917;
