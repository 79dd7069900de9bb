//! Eigenvalues, empirical spectral distributions and the semicircle law.

pub mod eigen;
mod empirical;
mod moments;
pub mod quad;
mod semicircle;

pub use eigen::eigenvalues;
pub use empirical::{empirical_distribution, kolmogorov_distance, Bins, ContinuousLaw, EmpiricalDistribution, Histogram};
pub use moments::{moment_report, MomentReport, MomentRow};
pub use semicircle::{catalan, semicircle_cdf, semicircle_density, semicircle_moment, SemicircleLaw};

use crate::stats::pairwise_sum;

/// Eigenvalues `λ_1 <= ... <= λ_n` of one matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    /// Sorts `values` ascending.
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self { eigenvalues: values }
    }

    pub(crate) fn from_sorted_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        Self { eigenvalues: values }
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.n() - 1]
    }
}

/// `(1/n) Σ λ_i^k`, which equals `(1/n) tr X^k`.
pub fn trace_moment(spectrum: &Spectrum, k: u32) -> f64 {
    let powers: Vec<f64> = spectrum.values().iter().map(|x| x.powi(k as i32)).collect();
    pairwise_sum(&powers) / spectrum.n() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_moment_simple() {
        let ones = Spectrum::from_values(vec![1.0; 5]);
        for k in 1..6 {
            assert_eq!(trace_moment(&ones, k), 1.0);
        }
        let pm = Spectrum::from_values(vec![1.0, -1.0]);
        assert_eq!(trace_moment(&pm, 2), 1.0);
        assert_eq!(trace_moment(&pm, 3), 0.0);
        assert_eq!(pm.values(), &[-1.0, 1.0]);
    }
}
