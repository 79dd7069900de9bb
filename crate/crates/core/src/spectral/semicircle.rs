use std::f64::consts::PI;

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// The standard semicircle law on `[-2, 2]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SemicircleLaw;

impl SemicircleLaw {
    pub fn density(&self, x: f64) -> f64 {
        semicircle_density(x)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        semicircle_cdf(x)
    }

    pub fn moment(&self, k: u32) -> BigUint {
        semicircle_moment(k)
    }

    pub fn support(&self) -> (f64, f64) {
        (-2.0, 2.0)
    }
}

/// `sqrt(4 - x^2) / (2π)` on `[-2, 2]`, zero elsewhere.
pub fn semicircle_density(x: f64) -> f64 {
    if x.abs() <= 2.0 {
        (4.0 - x * x).max(0.0).sqrt() / (2.0 * PI)
    } else {
        0.0
    }
}

/// `1/2 + x sqrt(4 - x^2) / (4π) + arcsin(x/2) / π` on `(-2, 2)`.
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        let v = 0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI;
        v.clamp(0.0, 1.0)
    }
}

/// `C_m = (2m)! / (m! (m+1)!)`, exact, via `C_{i+1} = C_i · 2(2i+1) / (i+2)`.
pub fn catalan(m: u32) -> BigUint {
    let mut c = BigUint::one();
    for i in 0..m as u64 {
        c = c * BigUint::from(2 * (2 * i + 1)) / BigUint::from(i + 2);
    }
    c
}

/// `E[Y^k]` for the standard semicircle: 0 for odd `k`, `C_{k/2}` for even `k`.
pub fn semicircle_moment(k: u32) -> BigUint {
    if k % 2 == 1 {
        BigUint::zero()
    } else {
        catalan(k / 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::quad::integrate;

    #[test]
    #[allow(clippy::approx_constant)]
    fn density_values() {
        assert!((semicircle_density(0.0) - 0.31830988618).abs() < 1e-11);
        assert_eq!(semicircle_density(2.0), 0.0);
        assert_eq!(semicircle_density(-2.0), 0.0);
        assert_eq!(semicircle_density(2.5), 0.0);
    }

    #[test]
    fn cdf_values() {
        assert_eq!(semicircle_cdf(0.0), 0.5);
        assert_eq!(semicircle_cdf(-2.0), 0.0);
        assert_eq!(semicircle_cdf(2.0), 1.0);
        // quadrature of the density over [-2, 1] in θ = arcsin(x/2)
        let q = integrate(
            |t: f64| semicircle_density(2.0 * t.sin()) * 2.0 * t.cos(),
            -PI / 2.0,
            0.5f64.asin(),
            1e-12,
        );
        assert!((semicircle_cdf(1.0) - q).abs() < 1e-8);
        assert!((semicircle_cdf(1.0) - 0.80450).abs() < 1e-5);
    }

    #[test]
    fn cdf_derivative_is_density() {
        let h = 1e-5;
        for i in 0..=380 {
            let x = -1.9 + 0.01 * i as f64;
            let d = (semicircle_cdf(x + h) - semicircle_cdf(x - h)) / (2.0 * h);
            assert!((d - semicircle_density(x)).abs() < 1e-6, "x={x}");
        }
    }

    #[test]
    fn cdf_monotone_on_grid() {
        let mut prev = 0.0;
        for i in 0..=10_000 {
            let x = -2.5 + 5.0 * i as f64 / 10_000.0;
            let v = semicircle_cdf(x);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn catalan_small() {
        let want = [1u32, 1, 2, 5, 14, 42, 132, 429, 1430, 4862];
        for (m, &c) in want.iter().enumerate() {
            assert_eq!(catalan(m as u32), BigUint::from(c));
        }
        assert_eq!(semicircle_moment(3), BigUint::zero());
        assert_eq!(semicircle_moment(2), BigUint::one());
        assert_eq!(semicircle_moment(6), BigUint::from(5u32));
        assert_eq!(semicircle_moment(0), BigUint::one());
    }

    #[test]
    fn catalan_large_by_recurrence() {
        // C_{m+1} = Σ C_i C_{m-i}
        let mut c = vec![BigUint::one()];
        for m in 0..60usize {
            let next = (0..=m).map(|i| &c[i] * &c[m - i]).sum::<BigUint>();
            c.push(next);
        }
        for (m, v) in c.iter().enumerate() {
            assert_eq!(&catalan(m as u32), v);
        }
    }
}
