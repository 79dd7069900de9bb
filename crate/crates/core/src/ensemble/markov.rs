//! Finite-state stationary reversible Markov chains used as diagonal processes.

use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};
use crate::rng::Stream;
use crate::spectral::eigen::packed_eigenvalues;

const ROW_SUM_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-10;
const BALANCE_TOL: f64 = 1e-10;

/// Wire form of a chain: raw state values and a row-stochastic transition matrix.
/// The stationary law is always computed, never supplied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawChain {
    pub states: Vec<f64>,
    pub transition: Vec<Vec<f64>>,
}

/// A validated ergodic reversible chain whose state values have been
/// affinely rescaled to mean 0 and variance 1 under the stationary law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChain", into = "RawChain")]
pub struct MarkovChainSpec {
    states: Vec<f64>,
    transition: Vec<Vec<f64>>,
    stationary: Vec<f64>,
    slem: f64,
    row_cdf: Vec<Vec<f64>>,
    stationary_cdf: Vec<f64>,
}

impl TryFrom<RawChain> for MarkovChainSpec {
    type Error = crate::error::Error;

    fn try_from(raw: RawChain) -> Result<Self> {
        Self::new(raw.states, raw.transition)
    }
}

impl From<MarkovChainSpec> for RawChain {
    fn from(c: MarkovChainSpec) -> Self {
        RawChain {
            states: c.states,
            transition: c.transition,
        }
    }
}

impl MarkovChainSpec {
    /// Validates `transition`, solves for the stationary law, checks detailed
    /// balance and ergodicity, then normalizes `states`.
    pub fn new(states: Vec<f64>, transition: Vec<Vec<f64>>) -> Result<Self> {
        let n = states.len();
        if n < 2 {
            return config_err("a Markov chain needs at least two states");
        }
        if transition.len() != n || transition.iter().any(|row| row.len() != n) {
            return config_err(format!("transition matrix must be {n}x{n}"));
        }
        if states.iter().any(|s| !s.is_finite()) {
            return config_err("state values must be finite");
        }
        for (i, row) in transition.iter().enumerate() {
            if row.iter().any(|&p| !p.is_finite() || p < 0.0) {
                return config_err(format!("row {i} has a negative or non-finite entry"));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return config_err(format!("row {i} sums to {sum}, not 1"));
            }
        }
        check_ergodic(&transition)?;
        let stationary = solve_stationary(&transition)?;

        for j in 0..n {
            let pj: f64 = (0..n).map(|i| stationary[i] * transition[i][j]).sum();
            if (pj - stationary[j]).abs() > STATIONARY_TOL {
                return config_err("stationary solve is inaccurate (pi P != pi)");
            }
        }
        for i in 0..n {
            for j in 0..n {
                let flow = stationary[i] * transition[i][j] - stationary[j] * transition[j][i];
                if flow.abs() > BALANCE_TOL {
                    return config_err(format!(
                        "chain is not reversible: detailed balance fails at ({}, {})",
                        i + 1,
                        j + 1
                    ));
                }
            }
        }

        let mean: f64 = stationary.iter().zip(&states).map(|(p, s)| p * s).sum();
        let var: f64 = stationary
            .iter()
            .zip(&states)
            .map(|(p, s)| p * (s - mean) * (s - mean))
            .sum();
        if !(var > 1e-300) {
            return config_err("state values have zero variance under the stationary law");
        }
        let sd = var.sqrt();
        let states: Vec<f64> = states.iter().map(|s| (s - mean) / sd).collect();

        let slem = second_largest_modulus(&transition, &stationary)?;
        let row_cdf = transition.iter().map(|row| cumulative(row)).collect();
        let stationary_cdf = cumulative(&stationary);
        Ok(Self {
            states,
            transition,
            stationary,
            slem,
            row_cdf,
            stationary_cdf,
        })
    }

    /// Two-state chain on `{-1, +1}` that switches state with probability `flip`.
    pub fn two_state(flip: f64) -> Result<Self> {
        Self::new(
            vec![-1.0, 1.0],
            vec![vec![1.0 - flip, flip], vec![flip, 1.0 - flip]],
        )
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// Normalized state values.
    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    /// Second-largest eigenvalue modulus of the transition matrix.
    pub fn slem(&self) -> f64 {
        self.slem
    }

    pub(crate) fn sample_initial(&self, stream: &mut Stream) -> usize {
        pick(&self.stationary_cdf, stream.uniform())
    }

    pub(crate) fn sample_next(&self, state: usize, stream: &mut Stream) -> usize {
        pick(&self.row_cdf[state], stream.uniform())
    }

    /// `Cov(0), ..., Cov(max_tau)` by iterating `w <- P w` from `w = s`.
    pub fn covariance_sequence(&self, max_tau: usize) -> Vec<f64> {
        let n = self.num_states();
        let mut w = self.states.clone();
        let mut next = vec![0.0; n];
        let mut out = Vec::with_capacity(max_tau + 1);
        for tau in 0..=max_tau {
            if tau > 0 {
                for (i, row) in self.transition.iter().enumerate() {
                    next[i] = row.iter().zip(&w).map(|(p, x)| p * x).sum();
                }
                std::mem::swap(&mut w, &mut next);
            }
            out.push(self.weighted_inner(&w));
        }
        out
    }

    fn weighted_inner(&self, w: &[f64]) -> f64 {
        self.stationary
            .iter()
            .zip(&self.states)
            .zip(w)
            .map(|((p, s), x)| p * s * x)
            .sum()
    }
}

fn cumulative(weights: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

fn pick(cdf: &[f64], u: f64) -> usize {
    // last index absorbs rounding in the final cumulative sum
    cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1)
}

/// `Cov(tau) = Σ_ij s_i s_j π_i P^tau(i, j)`, with `P^tau` by repeated squaring.
pub fn markov_covariance(chain: &MarkovChainSpec, tau: u64) -> f64 {
    let power = matrix_power(chain.transition(), tau);
    let s = chain.states();
    let pi = chain.stationary();
    let mut total = 0.0;
    for i in 0..s.len() {
        let inner: f64 = power[i].iter().zip(s).map(|(p, sj)| p * sj).sum();
        total += s[i] * pi[i] * inner;
    }
    total
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub(crate) fn matrix_power(m: &[Vec<f64>], mut exp: u64) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut result: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut base = m.to_vec();
    while exp > 0 {
        if exp & 1 == 1 {
            result = matmul(&result, &base);
        }
        exp >>= 1;
        if exp > 0 {
            base = matmul(&base, &base);
        }
    }
    result
}

fn check_ergodic(p: &[Vec<f64>]) -> Result<()> {
    let n = p.len();
    let reach = |forward: bool| -> Vec<Option<usize>> {
        let mut level = vec![None; n];
        level[0] = Some(0);
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                let w = if forward { p[u][v] } else { p[v][u] };
                if w > 0.0 && level[v].is_none() {
                    level[v] = Some(level[u].unwrap() + 1);
                    queue.push_back(v);
                }
            }
        }
        level
    };
    let fwd = reach(true);
    if fwd.iter().any(Option::is_none) || reach(false).iter().any(Option::is_none) {
        return config_err("chain is not irreducible");
    }
    let level: Vec<i64> = fwd.into_iter().map(|l| l.unwrap() as i64).collect();
    let mut period = 0i64;
    for u in 0..n {
        for v in 0..n {
            if p[u][v] > 0.0 {
                period = gcd(period, (level[u] + 1 - level[v]).abs());
            }
        }
    }
    if period != 1 {
        return config_err(format!("chain is periodic with period {period}"));
    }
    Ok(())
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Solves `(P^T - I) x = 0`, `Σ x = 1` by Gaussian elimination with partial pivoting.
fn solve_stationary(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = p.len();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| p[j][i] - if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut rhs = vec![0.0; n];
    m[n - 1].iter_mut().for_each(|x| *x = 1.0);
    rhs[n - 1] = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        if m[pivot][col].abs() < 1e-14 {
            return config_err("stationary distribution is not unique");
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            if f != 0.0 {
                for k in col..n {
                    m[row][k] -= f * m[col][k];
                }
                rhs[row] -= f * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| m[i][k] * x[k]).sum();
        x[i] = (rhs[i] - s) / m[i][i];
    }
    if x.iter().any(|&v| v < -STATIONARY_TOL) {
        return config_err("stationary solve produced negative mass");
    }
    Ok(x.into_iter().map(|v| v.max(0.0)).collect())
}

/// For reversible `P`, `D^{1/2} P D^{-1/2}` is symmetric with the same spectrum.
fn second_largest_modulus(p: &[Vec<f64>], pi: &[f64]) -> Result<f64> {
    let n = p.len();
    let root: Vec<f64> = pi.iter().map(|x| x.sqrt()).collect();
    let mut packed = Vec::with_capacity(n * (n + 1) / 2);
    for q in 0..n {
        for r in 0..=q {
            let a = root[r] * p[r][q] / root[q];
            let b = root[q] * p[q][r] / root[r];
            packed.push(0.5 * (a + b));
        }
    }
    let ev = packed_eigenvalues(n, packed)?;
    // drop the Perron eigenvalue 1, the largest in sorted order
    Ok(ev[..n - 1].iter().map(|x| x.abs()).fold(0.0, f64::max))
}

/// `length` consecutive emitted values of the chain started from its stationary law.
pub fn generate_markov_diagonal(
    length: usize,
    chain: &MarkovChainSpec,
    stream: &mut Stream,
) -> Result<Vec<f64>> {
    if length == 0 {
        return config_err("diagonal length must be at least 1");
    }
    let mut out = Vec::with_capacity(length);
    let mut state = chain.sample_initial(stream);
    out.push(chain.states[state]);
    for _ in 1..length {
        state = chain.sample_next(state, stream);
        out.push(chain.states[state]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_state() -> MarkovChainSpec {
        // birth-death chains are reversible
        MarkovChainSpec::new(
            vec![0.0, 2.0, 5.0],
            vec![
                vec![0.5, 0.5, 0.0],
                vec![0.25, 0.5, 0.25],
                vec![0.0, 0.6, 0.4],
            ],
        )
        .unwrap()
    }

    #[test]
    fn normalization_enforced() {
        let c = three_state();
        let pi = c.stationary();
        let mean: f64 = pi.iter().zip(c.states()).map(|(p, s)| p * s).sum();
        let var: f64 = pi.iter().zip(c.states()).map(|(p, s)| p * s * s).sum();
        assert!(mean.abs() < 1e-10);
        assert!((var - 1.0).abs() < 1e-10);
        assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_state_is_uniform() {
        let c = MarkovChainSpec::two_state(0.25).unwrap();
        assert!((c.stationary()[0] - 0.5).abs() < 1e-15);
        assert_eq!(c.states(), &[-1.0, 1.0]);
        assert!((c.slem() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn covariance_two_state_flip() {
        let c = MarkovChainSpec::two_state(0.25).unwrap();
        assert!((markov_covariance(&c, 0) - 1.0).abs() < 1e-15);
        // Σ s_i s_j π_i P_ij = 2 * 0.5 * (0.75 - 0.25)
        assert!((markov_covariance(&c, 1) - 0.5).abs() < 1e-15);
        assert!((markov_covariance(&c, 2) - 0.25).abs() < 1e-15);
        for k in 0..12 {
            assert!((markov_covariance(&c, k) - 0.5f64.powi(k as i32)).abs() < 1e-14);
        }
    }

    #[test]
    fn squaring_matches_iteration() {
        let c = three_state();
        let seq = c.covariance_sequence(40);
        for (tau, &v) in seq.iter().enumerate() {
            assert!((markov_covariance(&c, tau as u64) - v).abs() < 1e-12);
            assert!(v.abs() <= c.slem().powi(tau as i32) + 1e-12);
        }
        assert!(markov_covariance(&c, 200).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_chains() {
        // row sum
        assert!(MarkovChainSpec::new(vec![0.0, 1.0], vec![vec![0.5, 0.6], vec![0.5, 0.5]]).is_err());
        // negative
        assert!(MarkovChainSpec::new(vec![0.0, 1.0], vec![vec![1.5, -0.5], vec![0.5, 0.5]]).is_err());
        // periodic flip chain
        assert!(MarkovChainSpec::two_state(1.0).is_err());
        // reducible
        assert!(MarkovChainSpec::two_state(0.0).is_err());
        // constant states
        assert!(MarkovChainSpec::new(vec![3.0, 3.0], vec![vec![0.5, 0.5], vec![0.5, 0.5]]).is_err());
        // non-reversible cyclic chain on three states
        let cyc = vec![
            vec![0.1, 0.8, 0.1],
            vec![0.1, 0.1, 0.8],
            vec![0.8, 0.1, 0.1],
        ];
        assert!(MarkovChainSpec::new(vec![0.0, 1.0, 2.0], cyc).is_err());
        // single state
        assert!(MarkovChainSpec::new(vec![0.0], vec![vec![1.0]]).is_err());
    }

    #[test]
    fn wire_format_round_trip() {
        let json = r#"{"states":[-1.0,1.0],"transition":[[0.75,0.25],[0.25,0.75]]}"#;
        let c: MarkovChainSpec = serde_json::from_str(json).unwrap();
        assert_eq!(c, MarkovChainSpec::two_state(0.25).unwrap());
        let back: RawChain = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back.states, vec![-1.0, 1.0]);
        let bad = r#"{"states":[1.0,1.0],"transition":[[0.5,0.5],[0.5,0.5]]}"#;
        assert!(serde_json::from_str::<MarkovChainSpec>(bad).is_err());
    }

    #[test]
    fn sampled_marginal_is_stationary() {
        let c = MarkovChainSpec::two_state(0.25).unwrap();
        let mut s = Stream::new(11, 0, 0);
        let xs = generate_markov_diagonal(100_000, &c, &mut s).unwrap();
        assert!(xs.iter().all(|&x| x == 1.0 || x == -1.0));
        let up = xs.iter().filter(|&&x| x > 0.0).count() as f64 / xs.len() as f64;
        // long-run SE for a chain with Cov(τ)=0.5^τ: sqrt(3/m)/2
        assert!((up - 0.5).abs() < 4.0 * (3.0f64 / 100_000.0).sqrt() / 2.0);
    }
}
