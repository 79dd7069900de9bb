use super::field::RandomField;
use crate::error::{config_err, Result};

/// The scaled symmetric matrix `X(p, q) = X(q, p) = a(p, q) / sqrt(n)`.
///
/// Storage is the upper triangle packed column by column: column `q`
/// holds `X(1, q), ..., X(q, q)` contiguously. Read as rows, the same buffer
/// is the lower triangle packed row by row, which is what the eigensolver
/// works on. Indices in the public accessors are 1-based.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    packed: Vec<f64>,
}

#[inline]
pub(crate) fn packed_index(p: usize, q: usize) -> usize {
    // 0-based, p <= q
    q * (q + 1) / 2 + p
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            packed: vec![0.0; n * (n + 1) / 2],
        }
    }

    /// Wraps a packed upper triangle of length `n(n+1)/2`.
    pub fn from_packed(n: usize, packed: Vec<f64>) -> Result<Self> {
        if packed.len() != n * (n + 1) / 2 {
            return config_err(format!(
                "packed storage for n={n} needs {} values, got {}",
                n * (n + 1) / 2,
                packed.len()
            ));
        }
        Ok(Self { n, packed })
    }

    /// Builds from a row-major dense matrix, reading only its upper triangle.
    pub fn from_dense_upper(n: usize, dense: &[f64]) -> Result<Self> {
        if dense.len() != n * n {
            return config_err(format!("dense storage for n={n} needs {} values", n * n));
        }
        let mut m = Self::zeros(n);
        for q in 0..n {
            for p in 0..=q {
                m.packed[packed_index(p, q)] = dense[p * n + q];
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn packed(&self) -> &[f64] {
        &self.packed
    }

    pub fn into_packed(self) -> Vec<f64> {
        self.packed
    }

    /// Entry `X(p, q)`, 1-based, symmetric in its arguments.
    pub fn get(&self, p: usize, q: usize) -> f64 {
        assert!(p >= 1 && q >= 1 && p <= self.n && q <= self.n, "index out of range");
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        self.packed[packed_index(lo - 1, hi - 1)]
    }

    pub fn set(&mut self, p: usize, q: usize, value: f64) {
        assert!(p >= 1 && q >= 1 && p <= self.n && q <= self.n, "index out of range");
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        self.packed[packed_index(lo - 1, hi - 1)] = value;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.packed[packed_index(i, i)]).sum()
    }

    /// Squared Frobenius norm, counting each off-diagonal entry twice.
    pub fn frobenius_sq(&self) -> f64 {
        let mut s = 0.0;
        for q in 0..self.n {
            for p in 0..q {
                let x = self.packed[packed_index(p, q)];
                s += 2.0 * x * x;
            }
            let x = self.packed[packed_index(q, q)];
            s += x * x;
        }
        s
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for q in 0..n {
            for p in 0..=q {
                let x = self.packed[packed_index(p, q)];
                out[p * n + q] = x;
                out[q * n + p] = x;
            }
        }
        out
    }
}

/// `X(p, q) = a(p, q) / sqrt(n)` for all `p <= q`.
pub fn assemble_matrix(field: &RandomField) -> SymmetricMatrix {
    let n = field.n();
    let scale = 1.0 / (n as f64).sqrt();
    let mut m = SymmetricMatrix::zeros(n);
    for (r, diag) in field.diagonals().iter().enumerate() {
        for (p, &a) in diag.iter().enumerate() {
            m.packed[packed_index(p, p + r)] = a * scale;
        }
    }
    m
}
