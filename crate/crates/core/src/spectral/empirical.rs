use serde::{Deserialize, Serialize};

use super::semicircle::SemicircleLaw;
use super::Spectrum;
use crate::error::{config_err, Result};
use crate::stats::pairwise_sum;

const MAX_AUTO_BINS: usize = 100_000;

/// Bin count for [`empirical_distribution`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bins {
    Count(usize),
    /// Freedman-Diaconis width `2 IQR / n^{1/3}`, at least one bin.
    Auto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `counts.len() + 1` increasing edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// `count / (n · width)`, so that `Σ density · width = 1`.
    pub densities: Vec<f64>,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges.windows(2).map(|w| w[1] - w[0])
    }
}

/// Sorted sample with its ECDF, histogram and raw moments.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDistribution {
    values: Vec<f64>,
    histogram: Histogram,
}

pub fn empirical_distribution(spectrum: &Spectrum, bins: Bins) -> Result<EmpiricalDistribution> {
    EmpiricalDistribution::from_sorted(spectrum.values().to_vec(), bins)
}

impl EmpiricalDistribution {
    pub fn from_samples(mut values: Vec<f64>, bins: Bins) -> Result<Self> {
        values.sort_by(f64::total_cmp);
        Self::from_sorted(values, bins)
    }

    fn from_sorted(values: Vec<f64>, bins: Bins) -> Result<Self> {
        if values.is_empty() {
            return config_err("empirical distribution needs at least one value");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return config_err("empirical distribution values must be finite");
        }
        let histogram = build_histogram(&values, bins)?;
        Ok(Self { values, histogram })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn histogram(&self) -> &Histogram {
        &self.histogram
    }

    /// `#{v <= x} / n` (right-continuous).
    pub fn ecdf(&self, x: f64) -> f64 {
        self.values.partition_point(|&v| v <= x) as f64 / self.len() as f64
    }

    /// Left limit `#{v < x} / n`.
    pub fn ecdf_left(&self, x: f64) -> f64 {
        self.values.partition_point(|&v| v < x) as f64 / self.len() as f64
    }

    /// Raw moments `(1/n) Σ v^k` for `k = 1..=max_k`.
    pub fn moments(&self, max_k: u32) -> Vec<f64> {
        (1..=max_k)
            .map(|k| {
                let p: Vec<f64> = self.values.iter().map(|v| v.powi(k as i32)).collect();
                pairwise_sum(&p) / self.len() as f64
            })
            .collect()
    }

}

/// Linear-interpolation quantile of a sorted sample.
fn quantile(sorted: &[f64], prob: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * prob;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn build_histogram(values: &[f64], bins: Bins) -> Result<Histogram> {
    let n = values.len();
    let (min, max) = (values[0], values[n - 1]);
    if min == max {
        // degenerate sample: one unit-width bin centred on the atom
        return Ok(Histogram {
            edges: vec![min - 0.5, min + 0.5],
            counts: vec![n as u64],
            densities: vec![1.0],
        });
    }
    let count = match bins {
        Bins::Count(0) => return config_err("bin count must be positive"),
        Bins::Count(b) => b,
        Bins::Auto => {
            let iqr = quantile(values, 0.75) - quantile(values, 0.25);
            let width = 2.0 * iqr / (n as f64).cbrt();
            if width > 0.0 && width.is_finite() {
                (((max - min) / width).ceil() as usize).clamp(1, MAX_AUTO_BINS)
            } else {
                1
            }
        }
    };
    let width = (max - min) / count as f64;
    let mut edges: Vec<f64> = (0..count).map(|i| min + width * i as f64).collect();
    edges.push(max);
    let mut counts = vec![0u64; count];
    for &v in values {
        let idx = (((v - min) / width) as usize).min(count - 1);
        counts[idx] += 1;
    }
    let densities = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, w)| c as f64 / (n as f64 * (w[1] - w[0])))
        .collect();
    Ok(Histogram {
        edges,
        counts,
        densities,
    })
}

/// A law with a continuous CDF.
pub trait ContinuousLaw {
    fn cdf(&self, x: f64) -> f64;
}

impl ContinuousLaw for SemicircleLaw {
    fn cdf(&self, x: f64) -> f64 {
        SemicircleLaw::cdf(self, x)
    }
}

/// `sup_x |ECDF(x) - F(x)|`, evaluated at every jump from both sides.
pub fn kolmogorov_distance<L: ContinuousLaw + ?Sized>(empirical: &EmpiricalDistribution, law: &L) -> f64 {
    let v = empirical.values();
    let n = v.len() as f64;
    let mut sup = 0.0f64;
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[i] {
            j += 1;
        }
        let f = law.cdf(v[i]);
        let below = i as f64 / n;
        let at = (j + 1) as f64 / n;
        sup = sup.max((f - below).abs()).max((at - f).abs());
        i = j + 1;
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    fn dist(v: Vec<f64>) -> EmpiricalDistribution {
        EmpiricalDistribution::from_samples(v, Bins::Auto).unwrap()
    }

    #[test]
    fn single_atom() {
        let d = dist(vec![0.0]);
        assert_eq!(d.ecdf(-1e-12), 0.0);
        assert_eq!(d.ecdf(0.0), 1.0);
        assert_eq!(d.ecdf_left(0.0), 0.0);
        assert_eq!(kolmogorov_distance(&d, &SemicircleLaw), 0.5);
        let h = d.histogram();
        assert_eq!(h.bins(), 1);
        assert_eq!(h.densities[0] * (h.edges[1] - h.edges[0]), 1.0);
    }

    #[test]
    fn symmetric_pair() {
        let d = dist(vec![1.0, -1.0]);
        assert_eq!(d.ecdf(0.0), 0.5);
        assert_eq!(d.ecdf(1.0), 1.0);
        assert_eq!(d.ecdf(5.0), 1.0);
        assert_eq!(d.ecdf(-3.0), 0.0);
    }

    #[test]
    fn disjoint_support() {
        let d = dist(vec![3.0, 3.5, 4.0]);
        assert_eq!(kolmogorov_distance(&d, &SemicircleLaw), 1.0);
    }

    #[test]
    fn quantile_sample_is_close() {
        // invert the CDF by bisection
        let n = 1000;
        let inv = |p: f64| {
            let (mut lo, mut hi) = (-2.0, 2.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if crate::spectral::semicircle_cdf(mid) < p {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let v: Vec<f64> = (1..=n).map(|i| inv((i as f64 - 0.5) / n as f64)).collect();
        let d = dist(v);
        let ks = kolmogorov_distance(&d, &SemicircleLaw);
        assert!(ks < 1e-3, "{ks}");
        assert!((ks - 0.5 / n as f64).abs() < 1e-9);
    }

    #[test]
    fn histogram_normalized() {
        let mut s = Stream::new(3, 0, 0);
        let v: Vec<f64> = (0..5000).map(|_| s.normal()).collect();
        for bins in [Bins::Auto, Bins::Count(1), Bins::Count(37)] {
            let d = dist_bins(v.clone(), bins);
            let h = d.histogram();
            let total: f64 = h.densities.iter().zip(h.widths()).map(|(a, w)| a * w).sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert_eq!(h.counts.iter().sum::<u64>(), 5000);
            assert_eq!(h.edges.len(), h.bins() + 1);
        }
        assert!(EmpiricalDistribution::from_samples(v, Bins::Count(0)).is_err());
        assert!(EmpiricalDistribution::from_samples(vec![], Bins::Auto).is_err());
    }

    fn dist_bins(v: Vec<f64>, b: Bins) -> EmpiricalDistribution {
        EmpiricalDistribution::from_samples(v, b).unwrap()
    }

    #[test]
    fn ties_use_both_limits() {
        let d = dist(vec![0.0, 0.0, 0.0, 1.0]);
        // at 0: left 0, right 0.75 vs F=0.5
        let f1 = SemicircleLaw.cdf(1.0);
        let want = 0.5f64.max(0.25).max((0.75 - f1).abs()).max((1.0 - f1).abs());
        assert!((kolmogorov_distance(&d, &SemicircleLaw) - want).abs() < 1e-15);
    }

    #[test]
    fn moments_of_sample() {
        let d = dist(vec![-1.0, 1.0, 2.0]);
        let m = d.moments(3);
        assert!((m[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((m[1] - 2.0).abs() < 1e-15);
        assert!((m[2] - 8.0 / 3.0).abs() < 1e-15);
    }
}
