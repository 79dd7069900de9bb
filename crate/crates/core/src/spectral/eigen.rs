//! Eigenvalues of real symmetric matrices.
//!
//! Householder reduction to tridiagonal form (eigenvalues only, working on the
//! packed lower triangle from the last row upward), followed by the implicit
//! QL iteration with Wilkinson shifts. Off-diagonal entries are deflated when
//! `|e_m| <= 1e-14 (|d_m| + |d_{m+1}|)`.

use crate::ensemble::SymmetricMatrix;
use crate::error::{Error, Result};

use super::Spectrum;

const DEFLATION_TOL: f64 = 1e-14;
const SWEEPS_PER_DIM: usize = 30;

#[inline]
fn row_start(i: usize) -> usize {
    i * (i + 1) / 2
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

#[inline]
fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `row -= uj q + qj u` over the stored part of one row.
#[inline]
fn rank2_row(row: &mut [f64], uj: f64, qj: f64, u: &[f64], q: &[f64]) {
    for ((x, &uk), &qk) in row.iter_mut().zip(u).zip(q) {
        *x -= uj * qk + qj * uk;
    }
}

/// Reduces the packed lower triangle `a` (row `i` holds `A[i][0..=i]`) to
/// tridiagonal form. Returns `(diag, sub)` with `sub[i]` coupling rows
/// `i - 1` and `i`; `sub[0] = 0`. `a` is overwritten.
///
/// Rows are reduced from the last upward. The rank-2 update of step `i` is
/// applied lazily, fused with the matrix-vector product of step `i - 1`, so
/// each step streams the leading block through memory once.
pub(crate) fn tridiagonalize(n: usize, a: &mut [f64]) -> (Vec<f64>, Vec<f64>) {
    debug_assert_eq!(a.len(), n * (n + 1) / 2);
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    if n == 0 {
        return (d, e);
    }
    // pending update A -= u q^T + q u^T on the leading `pending` rows
    let mut u_prev = vec![0.0; n];
    let mut q_prev = vec![0.0; n];
    let mut pending = 0usize;
    let mut u = vec![0.0; n];
    let mut p = vec![0.0; n];
    for i in (1..n).rev() {
        let ri = row_start(i);
        if pending > 0 {
            rank2_row(&mut a[ri..=ri + i], u_prev[i], q_prev[i], &u_prev[..=i], &q_prev[..=i]);
        }
        d[i] = a[ri + i];
        let scale: f64 = if i > 1 { a[ri..ri + i].iter().map(|x| x.abs()).sum() } else { 0.0 };
        if scale == 0.0 {
            e[i] = a[ri + i - 1];
            if pending > 0 {
                for j in 0..i {
                    let rj = row_start(j);
                    rank2_row(&mut a[rj..=rj + j], u_prev[j], q_prev[j], &u_prev[..=j], &q_prev[..=j]);
                }
            }
            pending = 0;
            continue;
        }
        let mut h = 0.0;
        for x in &mut a[ri..ri + i] {
            *x /= scale;
            h += *x * *x;
        }
        let f = a[ri + i - 1];
        let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
        e[i] = scale * g;
        h -= f * g;
        a[ri + i - 1] = f - g;

        let uu = &mut u[..i];
        uu.copy_from_slice(&a[ri..ri + i]);
        let pp = &mut p[..i];
        pp.fill(0.0);
        for j in 0..i {
            let rj = row_start(j);
            let row = &mut a[rj..=rj + j];
            if pending > 0 {
                rank2_row(row, u_prev[j], q_prev[j], &u_prev[..=j], &q_prev[..=j]);
            }
            let uj = uu[j];
            let s = dot(&row[..j], &uu[..j]);
            axpy(&mut pp[..j], uj, &row[..j]);
            pp[j] += s + row[j] * uj;
        }
        let inv_h = 1.0 / h;
        for x in pp.iter_mut() {
            *x *= inv_h;
        }
        let k = dot(uu, pp) * 0.5 * inv_h;
        for (pj, uj) in pp.iter_mut().zip(uu.iter()) {
            *pj -= k * uj;
        }
        std::mem::swap(&mut u, &mut u_prev);
        std::mem::swap(&mut p, &mut q_prev);
        pending = i;
    }
    if pending > 0 {
        rank2_row(&mut a[0..1], u_prev[0], q_prev[0], &u_prev[..1], &q_prev[..1]);
    }
    d[0] = a[0];
    e[0] = 0.0;
    (d, e)
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
/// `sub[i]` couples `i - 1` and `i`. Eigenvalues are returned unsorted.
pub(crate) fn tridiagonal_eigenvalues(mut d: Vec<f64>, sub: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    if n <= 1 {
        return Ok(d);
    }
    let mut e: Vec<f64> = sub[1..].to_vec();
    e.push(0.0);
    let budget = SWEEPS_PER_DIM * n;
    let mut iterations = 0usize;
    for l in 0..n {
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= DEFLATION_TOL * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > budget {
                return Err(Error::Numerical(format!(
                    "QL iteration did not converge within {budget} sweeps (n={n})"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

/// Eigenvalues of a packed symmetric matrix (upper triangle by column).
pub fn packed_eigenvalues(n: usize, mut packed: Vec<f64>) -> Result<Vec<f64>> {
    if packed.len() != n * (n + 1) / 2 {
        return Err(Error::Config(format!("packed length mismatch for n={n}")));
    }
    if packed.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }
    let (d, e) = tridiagonalize(n, &mut packed);
    let mut ev = tridiagonal_eigenvalues(d, &e)?;
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// All eigenvalues of `matrix`, sorted ascending.
pub fn eigenvalues(matrix: &SymmetricMatrix) -> Result<Spectrum> {
    if matrix.n() == 0 {
        return Err(Error::Config("matrix dimension must be at least 1".into()));
    }
    let ev = packed_eigenvalues(matrix.n(), matrix.packed().to_vec())?;
    Ok(Spectrum::from_sorted_unchecked(ev))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(n: usize, dense: &[f64]) -> SymmetricMatrix {
        SymmetricMatrix::from_dense_upper(n, dense).unwrap()
    }

    #[test]
    fn diagonal_matrix() {
        let m = sym(3, &[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]);
        assert_eq!(eigenvalues(&m).unwrap().values(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn swap_matrix() {
        let m = sym(2, &[0.0, 1.0, 1.0, 0.0]);
        let s = eigenvalues(&m).unwrap();
        assert!((s.values()[0] + 1.0).abs() < 1e-15);
        assert!((s.values()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn one_by_one_and_zero() {
        let m = sym(1, &[-4.5]);
        assert_eq!(eigenvalues(&m).unwrap().values(), &[-4.5]);
        let z = SymmetricMatrix::zeros(5);
        assert_eq!(eigenvalues(&z).unwrap().values(), &[0.0; 5]);
        assert!(eigenvalues(&SymmetricMatrix::zeros(0)).is_err());
    }

    #[test]
    fn path_graph_laplacian_closed_form() {
        // Tridiagonal [-1, 2, -1] has eigenvalues 2 - 2 cos(k pi / (n+1)).
        let n = 12;
        let mut dense = vec![0.0; n * n];
        for i in 0..n {
            dense[i * n + i] = 2.0;
            if i + 1 < n {
                dense[i * n + i + 1] = -1.0;
                dense[(i + 1) * n + i] = -1.0;
            }
        }
        let got = eigenvalues(&sym(n, &dense)).unwrap();
        let mut want: Vec<f64> = (1..=n)
            .map(|k| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in got.values().iter().zip(&want) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn rejects_nan() {
        let m = sym(2, &[f64::NAN, 0.0, 0.0, 1.0]);
        assert!(matches!(eigenvalues(&m), Err(Error::Numerical(_))));
    }

    #[test]
    fn repeated_eigenvalues() {
        // all-ones 4x4: eigenvalues 0,0,0,4
        let m = sym(4, &[1.0; 16]);
        let s = eigenvalues(&m).unwrap();
        let want = [0.0, 0.0, 0.0, 4.0];
        for (a, b) in s.values().iter().zip(&want) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
