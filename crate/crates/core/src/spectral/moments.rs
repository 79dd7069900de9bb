use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::semicircle::semicircle_moment;
use super::{trace_moment, Spectrum};
use crate::error::{config_err, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub k: u32,
    pub empirical: f64,
    pub limit: f64,
    pub abs_error: f64,
}

/// Empirical spectral moments against the semicircle limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub rows: Vec<MomentRow>,
    /// Entry absolute moments `m_k`, when attached from a condition report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entry_moment_bounds: Option<Vec<f64>>,
}

impl MomentReport {
    pub fn row(&self, k: u32) -> Option<&MomentRow> {
        self.rows.iter().find(|r| r.k == k)
    }
}

pub fn moment_report(spectrum: &Spectrum, max_k: u32) -> Result<MomentReport> {
    if max_k == 0 {
        return config_err("max_k must be at least 1");
    }
    let rows = (1..=max_k)
        .map(|k| {
            let empirical = trace_moment(spectrum, k);
            let limit = semicircle_moment(k).to_f64().unwrap_or(f64::INFINITY);
            MomentRow {
                k,
                empirical,
                limit,
                abs_error: (empirical - limit).abs(),
            }
        })
        .collect();
    Ok(MomentReport {
        rows,
        entry_moment_bounds: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_spectrum() {
        let r = moment_report(&Spectrum::from_values(vec![0.0; 4]), 6).unwrap();
        for row in &r.rows {
            assert_eq!(row.empirical, 0.0);
            assert_eq!(row.abs_error, row.limit);
        }
        assert_eq!(r.row(4).unwrap().limit, 2.0);
        assert_eq!(r.row(6).unwrap().limit, 5.0);
        assert!(moment_report(&Spectrum::from_values(vec![0.0]), 0).is_err());
    }
}
