use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::covariance::{covariance_model, Summability};
use super::field::generate_field_replica;
use super::process::EnsembleConfig;
use crate::error::{config_err, Result};
use crate::stats::Estimate;

/// Highest absolute moment estimated.
pub const MAX_ENTRY_MOMENT: usize = 8;
const SE_FACTOR: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Monte Carlo and analytic checks of the model assumptions for one ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub replicas: usize,
    pub entry_mean: Estimate,
    pub entry_second_moment: Estimate,
    /// `E|a|^k` for `k = 1..=8`, averaged over positions.
    pub abs_moments: Vec<Estimate>,
    pub covariance_sum: Summability,
    pub checks: Vec<ConditionCheck>,
}

impl ConditionReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Per-replica position averages become independent samples across replicas,
/// so standard errors are valid despite along-diagonal correlation.
pub fn check_conditions(config: &EnsembleConfig, replicas: usize) -> Result<ConditionReport> {
    config.validate()?;
    if replicas < 100 {
        return config_err("condition checks need at least 100 replicas");
    }
    if replicas > u32::MAX as usize {
        return config_err("too many replicas");
    }
    let per_replica: Vec<[f64; MAX_ENTRY_MOMENT + 1]> = (0..replicas as u32)
        .into_par_iter()
        .map(|j| {
            let field = generate_field_replica(config, j)?;
            let mut acc = [0.0; MAX_ENTRY_MOMENT + 1];
            let mut count = 0usize;
            for d in field.diagonals() {
                for &a in d {
                    acc[0] += a;
                    let mut pw = 1.0;
                    for slot in acc.iter_mut().skip(1) {
                        pw *= a.abs();
                        *slot += pw;
                    }
                    count += 1;
                }
            }
            for x in &mut acc {
                *x /= count as f64;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;

    let column = |k: usize| -> Estimate {
        let xs: Vec<f64> = per_replica.iter().map(|r| r[k]).collect();
        Estimate::from_samples(&xs)
    };
    let entry_mean = column(0);
    let entry_second_moment = column(2);
    let abs_moments: Vec<Estimate> = (1..=MAX_ENTRY_MOMENT).map(column).collect();
    let covariance_sum = covariance_model(&config.process).abs_sum();

    let mut checks = vec![
        ConditionCheck {
            name: "C1: mean zero".into(),
            passed: entry_mean.agrees_with(0.0, SE_FACTOR),
            detail: format!("{:.6} ± {:.6}", entry_mean.mean, entry_mean.se),
        },
        ConditionCheck {
            name: "C1: unit variance".into(),
            passed: entry_second_moment.agrees_with(1.0, SE_FACTOR),
            detail: format!("{:.6} ± {:.6}", entry_second_moment.mean, entry_second_moment.se),
        },
        ConditionCheck {
            name: "C1: bounded moments".into(),
            passed: abs_moments.iter().all(|e| e.mean.is_finite()),
            detail: format!("m_8 ≈ {:.4}", abs_moments[MAX_ENTRY_MOMENT - 1].mean),
        },
        ConditionCheck {
            name: "C2: independent diagonals".into(),
            passed: true,
            detail: "each diagonal reads its own stream".into(),
        },
        ConditionCheck {
            name: "C3: stationary diagonals".into(),
            passed: true,
            detail: "processes start in their stationary law".into(),
        },
    ];
    checks.push(match covariance_sum {
        Summability::Finite { sum, .. } => ConditionCheck {
            name: "C4: summable covariance".into(),
            passed: true,
            detail: format!("Σ|Cov(τ)| = {sum:.12}"),
        },
        Summability::Divergent => ConditionCheck {
            name: "C4: summable covariance".into(),
            passed: false,
            detail: "Σ|Cov(τ)| diverges".into(),
        },
    });
    Ok(ConditionReport {
        replicas,
        entry_mean,
        entry_second_moment,
        abs_moments,
        covariance_sum,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::ProcessSpec;

    #[test]
    fn iid_passes() {
        let r = check_conditions(&EnsembleConfig::new(8, ProcessSpec::Iid, 1), 10_000).unwrap();
        assert!(r.all_passed(), "{:#?}", r.checks);
        // E|Z|^4 = 3
        assert!((r.abs_moments[3].mean - 3.0).abs() < 5.0 * r.abs_moments[3].se);
    }

    #[test]
    fn ar1_passes_with_sum_two() {
        let r = check_conditions(&EnsembleConfig::new(16, ProcessSpec::GaussAr1 { rho: 0.5 }, 2), 2000)
            .unwrap();
        assert!(r.all_passed(), "{:#?}", r.checks);
        assert_eq!(r.covariance_sum.sum(), Some(2.0));
    }

    #[test]
    fn toeplitz_fails_summability() {
        let r = check_conditions(&EnsembleConfig::new(16, ProcessSpec::ConstantDiagonal, 3), 2000).unwrap();
        assert!(!r.all_passed());
        assert!(!r.check("C4: summable covariance").unwrap().passed);
        assert!(r.check("C1: mean zero").unwrap().passed);
    }

    #[test]
    fn too_few_replicas() {
        assert!(check_conditions(&EnsembleConfig::new(4, ProcessSpec::Iid, 1), 99).is_err());
    }
}
