//! Order-stable summation and the small amount of statistics the experiments need.

use serde::{Deserialize, Serialize};

/// Pairwise (cascade) summation. The result depends only on the order of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    pairwise_sum(xs) / xs.len() as f64
}

/// Neumaier-compensated running sum for streams too long to buffer.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// A sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    /// NaN for a single sample; serialized as `null`.
    #[serde(with = "nullable_f64")]
    pub se: f64,
    pub samples: usize,
}

impl Estimate {
    /// Mean and standard error `s / sqrt(m)` over independent samples.
    pub fn from_samples(xs: &[f64]) -> Self {
        let m = xs.len();
        let mu = mean(xs);
        let se = if m > 1 {
            let dev: Vec<f64> = xs.iter().map(|x| (x - mu) * (x - mu)).collect();
            (pairwise_sum(&dev) / (m - 1) as f64 / m as f64).sqrt()
        } else {
            f64::NAN
        };
        Self {
            mean: mu,
            se,
            samples: m,
        }
    }

    /// Whether `target` lies within `factor` standard errors of the mean.
    /// A zero standard error requires exact agreement up to rounding.
    pub fn agrees_with(&self, target: f64, factor: f64) -> bool {
        let slack = 1e-12 * (1.0 + target.abs());
        (self.mean - target).abs() <= factor * self.se + slack
    }
}

mod nullable_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// Fourth central moment about the sample mean, `(1/m) Σ (x - x̄)^4`.
pub fn fourth_central_moment(xs: &[f64]) -> f64 {
    let mu = mean(xs);
    let dev: Vec<f64> = xs.iter().map(|x| (x - mu).powi(4)).collect();
    mean(&dev)
}

/// Ordinary least squares fit `y ≈ intercept + slope·x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual.
    pub max_residual: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    assert_eq!(xs.len(), ys.len());
    if xs.len() < 2 {
        return None;
    }
    let mx = mean(xs);
    let my = mean(ys);
    let sxy: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    let sxx: Vec<f64> = xs.iter().map(|x| (x - mx) * (x - mx)).collect();
    let sxx = pairwise_sum(&sxx);
    if sxx == 0.0 {
        return None;
    }
    let slope = pairwise_sum(&sxy) / sxx;
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Some(LineFit {
        slope,
        intercept,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_sample_estimate_round_trips() {
        let e = Estimate::from_samples(&[2.0]);
        let text = serde_json::to_string(&e).unwrap();
        assert_eq!(text, r#"{"mean":2.0,"se":null,"samples":1}"#);
        let back: Estimate = serde_json::from_str(&text).unwrap();
        assert!(back.se.is_nan() && back.mean == 2.0);
    }

    #[test]
    fn pairwise_matches_naive_on_small_integers() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let mut s = CompensatedSum::new();
        for x in [1e16, 1.0, -1e16, 1.0] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn estimate_of_constant_has_zero_se() {
        let e = Estimate::from_samples(&[2.0; 10]);
        assert_eq!(e.mean, 2.0);
        assert_eq!(e.se, 0.0);
        assert!(e.agrees_with(2.0, 3.0));
        assert!(!e.agrees_with(2.1, 3.0));
    }

    #[test]
    fn fourth_central_moment_of_symmetric_pair() {
        assert_eq!(fourth_central_moment(&[-1.0, 1.0]), 1.0);
        assert_eq!(fourth_central_moment(&[3.0, 3.0, 3.0]), 0.0);
    }

    #[test]
    fn line_fit_exact() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 0.5 * x).collect();
        let f = fit_line(&xs, &ys).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-15);
        assert!((f.intercept - 2.0).abs() < 1e-15);
        assert!(f.max_residual < 1e-15);
        assert!(fit_line(&[1.0], &[1.0]).is_none());
    }
}
