use super::markov::generate_markov_diagonal;
use super::process::{check_rho, EnsembleConfig, ProcessSpec};
use crate::error::{config_err, Result};
use crate::rng::{Stream, StreamKey};

/// The field `a(p, q)`, `1 <= p <= q <= n`, stored by diagonal: diagonal `r`
/// holds `a(p, p + r)` for `p = 1..=n-r`.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomField {
    n: usize,
    diagonals: Vec<Vec<f64>>,
}

impl RandomField {
    pub fn from_diagonals(diagonals: Vec<Vec<f64>>) -> Result<Self> {
        let n = diagonals.len();
        if n == 0 {
            return config_err("field needs at least one diagonal");
        }
        for (r, d) in diagonals.iter().enumerate() {
            if d.len() != n - r {
                return config_err(format!("diagonal {r} must have {} entries", n - r));
            }
        }
        Ok(Self { n, diagonals })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diagonals(&self) -> &[Vec<f64>] {
        &self.diagonals
    }

    pub fn diagonal(&self, r: usize) -> &[f64] {
        &self.diagonals[r]
    }

    /// `a(p, q)` with 1-based `p <= q`.
    pub fn get(&self, p: usize, q: usize) -> f64 {
        assert!(1 <= p && p <= q && q <= self.n, "field index out of range");
        self.diagonals[q - p][p - 1]
    }
}

/// `a_1 ~ N(0, 1)` and `a_{p+1} = rho a_p + sqrt(1 - rho^2) ξ_{p+1}`.
pub fn generate_ar1_diagonal(length: usize, rho: f64, stream: &mut Stream) -> Result<Vec<f64>> {
    check_rho(rho)?;
    if length == 0 {
        return config_err("diagonal length must be at least 1");
    }
    let innovation = (1.0 - rho * rho).sqrt();
    let mut out = Vec::with_capacity(length);
    let mut a = stream.normal();
    out.push(a);
    for _ in 1..length {
        a = rho * a + innovation * stream.normal();
        out.push(a);
    }
    Ok(out)
}

/// `length` consecutive values of `process`, started in its stationary law.
pub fn generate_diagonal(
    process: &ProcessSpec,
    length: usize,
    stream: &mut Stream,
) -> Result<Vec<f64>> {
    match process {
        ProcessSpec::Iid => {
            let mut v = vec![0.0; length];
            stream.fill_normal(&mut v);
            Ok(v)
        }
        ProcessSpec::GaussAr1 { rho } => generate_ar1_diagonal(length, *rho, stream),
        ProcessSpec::FiniteMarkov(chain) => generate_markov_diagonal(length, chain, stream),
        ProcessSpec::ConstantDiagonal => Ok(vec![stream.normal(); length]),
    }
}

/// Replica 0 of the ensemble.
pub fn generate_field(config: &EnsembleConfig) -> Result<RandomField> {
    generate_field_replica(config, 0)
}

/// Diagonal `r` of replica `j` reads stream `(seed, j, r)`.
pub fn generate_field_replica(config: &EnsembleConfig, replica: u32) -> Result<RandomField> {
    config.validate()?;
    let n = config.n;
    let key = StreamKey::new(config.seed);
    let diagonals = (0..n)
        .map(|r| {
            let mut stream = key.stream(replica, r as u32);
            generate_diagonal(&config.process, n - r, &mut stream)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RandomField { n, diagonals })
}
