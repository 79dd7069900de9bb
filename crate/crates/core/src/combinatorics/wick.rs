use super::tuple::{check_guard, for_each_tuple, ConsistentTuple};
use crate::ensemble::CovarianceModel;
use crate::error::{Error, Result};
use crate::stats::CompensatedSum;

/// Largest tuple length accepted by the pairing sum.
pub const MAX_WICK_K: usize = 16;

/// `(diagonal, position)` of each entry `a(P_j)`.
fn locate(starts: &[usize], out: &mut Vec<(usize, usize)>) {
    let k = starts.len();
    out.clear();
    out.extend((0..k).map(|j| {
        let (p, q) = (starts[j], starts[(j + 1) % k]);
        (p.abs_diff(q), p.min(q))
    }));
}

/// Sum over perfect matchings of `entries` of products of covariances.
/// The first remaining element is paired with each other in turn.
fn pairing_sum(entries: &mut [(usize, usize)], cov: &dyn Fn(usize) -> f64) -> f64 {
    if entries.is_empty() {
        return 1.0;
    }
    let (r0, x0) = entries[0];
    let mut total = 0.0;
    for j in 1..entries.len() {
        let (r, x) = entries[j];
        if r != r0 {
            continue;
        }
        let c = cov(x0.abs_diff(x));
        if c == 0.0 {
            continue;
        }
        entries.swap(1, j);
        total += c * pairing_sum(&mut entries[2..], cov);
        entries.swap(1, j);
    }
    total
}

fn require_gaussian(model: &CovarianceModel) -> Result<()> {
    if model.is_gaussian() {
        Ok(())
    } else {
        Err(Error::UnsupportedModel(
            "the pairing formula requires a jointly Gaussian field".into(),
        ))
    }
}

/// `E[a(P_1) ... a(P_k)]` for a jointly Gaussian field with the given covariance.
pub fn expected_product_gaussian(tuple: &ConsistentTuple, model: &CovarianceModel) -> Result<f64> {
    require_gaussian(model)?;
    let k = tuple.k();
    if k > MAX_WICK_K {
        return Err(Error::Guard(format!("k = {k} exceeds {MAX_WICK_K}")));
    }
    if k % 2 == 1 {
        return Ok(0.0);
    }
    let starts: Vec<usize> = tuple.pairs().iter().map(|p| p.0).collect();
    let mut entries = Vec::with_capacity(k);
    locate(&starts, &mut entries);
    Ok(pairing_sum(&mut entries, &|tau| model.cov(tau)))
}

/// `n^{-(1 + k/2)} Σ_{T_n(k)} E[a(P_1) ... a(P_k)]`, i.e. `E[(1/n) tr X_n^k]`.
pub fn exact_expected_trace_moment(n: usize, k: usize, model: &CovarianceModel) -> Result<f64> {
    require_gaussian(model)?;
    check_guard(n, k)?;
    if k > MAX_WICK_K {
        return Err(Error::Guard(format!("k = {k} exceeds {MAX_WICK_K}")));
    }
    if k % 2 == 1 {
        return Ok(0.0);
    }
    // displacements along a diagonal never exceed n - 1
    let table = model.sequence(n);
    let cov = |tau: usize| table[tau];
    let mut entries = Vec::with_capacity(k);
    let mut sum = CompensatedSum::new();
    for_each_tuple(n, k, |starts, _| {
        locate(starts, &mut entries);
        sum.add(pairing_sum(&mut entries, &cov));
    })?;
    Ok(sum.value() / (n as f64).powf(1.0 + k as f64 / 2.0))
}

/// `Σ_{S_n*(π)} |E[a(P_1) ... a(P_k)]|`, together with `#S_n*(π)`.
pub fn star_abs_expectation(
    pi: &super::Partition,
    n: usize,
    model: &CovarianceModel,
) -> Result<(f64, u64)> {
    require_gaussian(model)?;
    let k = pi.k();
    if k > MAX_WICK_K {
        return Err(Error::Guard(format!("k = {k} exceeds {MAX_WICK_K}")));
    }
    let table = model.sequence(n);
    let cov = |tau: usize| table[tau];
    let mut labels = Vec::with_capacity(k);
    let mut entries = Vec::with_capacity(k);
    let mut sum = CompensatedSum::new();
    let mut count = 0u64;
    for_each_tuple(n, k, |starts, gaps| {
        super::tuple::induced_labels(gaps, &mut labels);
        if labels != pi.labels() || !super::tuple::star_condition(gaps, &labels) {
            return;
        }
        count += 1;
        if k.is_multiple_of(2) {
            locate(starts, &mut entries);
            sum.add(pairing_sum(&mut entries, &cov).abs());
        }
    })?;
    Ok((sum.value(), count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{covariance_model, generate_ar1_diagonal, MarkovChainSpec, ProcessSpec};
    use crate::rng::Stream;
    use crate::stats::Estimate;

    fn iid() -> CovarianceModel {
        covariance_model(&ProcessSpec::Iid)
    }

    fn tuple(pairs: &[(usize, usize)]) -> ConsistentTuple {
        ConsistentTuple::from_pairs(pairs).unwrap()
    }

    #[test]
    fn second_moments() {
        assert_eq!(expected_product_gaussian(&tuple(&[(1, 2), (2, 1)]), &iid()).unwrap(), 1.0);
        assert_eq!(expected_product_gaussian(&tuple(&[(1, 1), (1, 1)]), &iid()).unwrap(), 1.0);
        let odd = tuple(&[(1, 2), (2, 3), (3, 1)]);
        assert_eq!(expected_product_gaussian(&odd, &iid()).unwrap(), 0.0);
    }

    #[test]
    fn distinct_diagonals_vanish() {
        // a(1,2), a(2,2), a(2,2), a(2,1)
        let t = ConsistentTuple::from_starts(vec![1, 2, 2, 2]).unwrap();
        assert_eq!(expected_product_gaussian(&t, &iid()).unwrap(), 1.0);
        // a(1,3), a(3,2), a(2,1), a(1,1): diagonals 2, 1, 1, 0
        let t = ConsistentTuple::from_starts(vec![1, 3, 2, 1]).unwrap();
        assert_eq!(expected_product_gaussian(&t, &iid()).unwrap(), 0.0);
        let rho = covariance_model(&ProcessSpec::GaussAr1 { rho: 0.9 });
        assert_eq!(expected_product_gaussian(&t, &rho).unwrap(), 0.0);
    }

    #[test]
    fn fourth_moment_of_one_entry() {
        let t = ConsistentTuple::from_starts(vec![1, 1, 1, 1]).unwrap();
        assert_eq!(expected_product_gaussian(&t, &iid()).unwrap(), 3.0);
        let t = ConsistentTuple::from_starts(vec![1, 2, 1, 2]).unwrap();
        assert_eq!(expected_product_gaussian(&t, &iid()).unwrap(), 3.0);
    }

    #[test]
    fn ar1_two_diagonals() {
        // a(2,2), a(2,5), a(5,5), a(5,2): main diagonal at 2 and 5, third diagonal at 2 twice
        let rho: f64 = 0.5;
        let m = covariance_model(&ProcessSpec::GaussAr1 { rho });
        let t = ConsistentTuple::from_starts(vec![2, 2, 5, 5]).unwrap();
        assert!((expected_product_gaussian(&t, &m).unwrap() - rho.powi(3)).abs() < 1e-15);
    }

    #[test]
    fn ar1_one_diagonal_against_sampling() {
        // a(1,3), a(3,5), a(5,3), a(3,1): second diagonal at positions 1, 3, 3, 1
        let rho: f64 = 0.6;
        let m = covariance_model(&ProcessSpec::GaussAr1 { rho });
        let t = ConsistentTuple::from_starts(vec![1, 3, 5, 3]).unwrap();
        let exact = expected_product_gaussian(&t, &m).unwrap();
        let c13 = rho.powi(2);
        assert!((exact - (c13 * c13 + c13 * c13 + 1.0)).abs() < 1e-14);

        let mut stream = Stream::new(7, 0, 0);
        let draws = 1_000_000;
        let samples: Vec<f64> = (0..draws)
            .map(|_| {
                let d = generate_ar1_diagonal(3, rho, &mut stream).unwrap();
                d[0] * d[2] * d[2] * d[0]
            })
            .collect();
        let est = Estimate::from_samples(&samples);
        assert!(est.agrees_with(exact, 4.0), "{est:?} vs {exact}");
    }

    #[test]
    fn rejects_non_gaussian() {
        let chain = MarkovChainSpec::two_state(0.25).unwrap();
        let m = covariance_model(&ProcessSpec::FiniteMarkov(chain));
        let t = tuple(&[(1, 2), (2, 1)]);
        assert!(matches!(expected_product_gaussian(&t, &m), Err(Error::UnsupportedModel(_))));
        assert!(matches!(exact_expected_trace_moment(3, 2, &m), Err(Error::UnsupportedModel(_))));
    }

    #[test]
    fn exact_second_moment_is_one() {
        for n in 1..=6 {
            let v = exact_expected_trace_moment(n, 2, &iid()).unwrap();
            assert!((v - 1.0).abs() < 1e-14, "{n}: {v}");
        }
        assert_eq!(exact_expected_trace_moment(4, 3, &iid()).unwrap(), 0.0);
    }

    #[test]
    fn iid_fourth_moment_closed_form() {
        // independent entries: E of a product of four is the number of matchings
        // pairing equal entries
        for n in 1..=5usize {
            let mut total = 0.0;
            for t in crate::combinatorics::enumerate_consistent_tuples(n, 4).unwrap() {
                let e: Vec<(usize, usize)> = t
                    .pairs()
                    .iter()
                    .map(|&(p, q)| (p.min(q), p.max(q)))
                    .collect();
                let same = |i: usize, j: usize| (e[i] == e[j]) as i32 as f64;
                total += same(0, 1) * same(2, 3) + same(0, 2) * same(1, 3) + same(0, 3) * same(1, 2);
            }
            let want = total / (n as f64).powi(3);
            let got = exact_expected_trace_moment(n, 4, &iid()).unwrap();
            assert!((got - want).abs() < 1e-12, "{n}: {got} vs {want}");
        }
    }
}
