use semicircle::combinatorics::{
    count_s_n, count_s_n_star, enumerate_consistent_tuples, enumerate_ncpp, enumerate_pair_partitions,
    enumerate_partitions, exact_expected_trace_moment, expected_product_gaussian, induced_partition, satisfies_star,
    star_abs_expectation, Partition,
};
use semicircle::ensemble::{covariance_model, EnsembleConfig, ProcessSpec};
use semicircle::verify::monte_carlo_trace_moments;

fn part(s: &str) -> Partition {
    s.parse().unwrap()
}

#[test]
fn classes_cover_every_tuple() {
    for (n, k) in [(2, 2), (4, 3), (5, 4), (3, 6), (6, 5)] {
        let total: u64 = enumerate_partitions(k).unwrap().map(|p| count_s_n(&p, n).unwrap()).sum();
        assert_eq!(total, (n as u64).pow(k as u32), "n={n} k={k}");
    }
}

#[test]
fn pair_star_counts_for_k2() {
    for n in 2..=10u64 {
        assert_eq!(count_s_n_star(&part("{1,2}"), n as usize).unwrap(), n * n);
        assert_eq!(count_s_n(&part("{1}{2}"), n as usize).unwrap(), 0);
    }
}

#[test]
fn noncrossing_star_ratio_grows_toward_one() {
    let pi = part("{1,2}{3,4}");
    let ratios: Vec<f64> = [5usize, 10, 15, 20]
        .iter()
        .map(|&n| count_s_n_star(&pi, n).unwrap() as f64 / (n as f64).powi(3))
        .collect();
    assert!(ratios[1] > 0.8 && ratios[1] <= 1.0, "{ratios:?}");
    assert!(ratios.windows(2).all(|w| w[1] > w[0]), "{ratios:?}");
}

#[test]
fn star_gap_is_negligible_for_k4() {
    for pp in enumerate_pair_partitions(4).unwrap() {
        let gaps: Vec<f64> = [5usize, 10, 20, 40]
            .iter()
            .map(|&n| {
                let p = pp.partition();
                (count_s_n(p, n).unwrap() - count_s_n_star(p, n).unwrap()) as f64 / (n as f64).powi(3)
            })
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] <= w[0]), "{pp}: {gaps:?}");
    }
}

#[test]
fn noncrossing_star_terms_have_unit_expectation() {
    let iid = covariance_model(&ProcessSpec::Iid);
    for k in [2usize, 4, 6] {
        let n = if k == 6 { 5 } else { 7 };
        let ncpp: Vec<Partition> = enumerate_ncpp(k).unwrap().map(|p| p.into_partition()).collect();
        let mut seen = 0;
        for t in enumerate_consistent_tuples(n, k).unwrap() {
            let pi = induced_partition(&t);
            if ncpp.contains(&pi) && satisfies_star(&t, &pi) {
                assert_eq!(expected_product_gaussian(&t, &iid).unwrap(), 1.0, "{t:?}");
                seen += 1;
            }
        }
        assert!(seen > 0);
    }
}

#[test]
fn crossing_weight_is_suppressed() {
    let ar = covariance_model(&ProcessSpec::GaussAr1 { rho: 0.5 });
    let pi = part("{1,3}{2,4}");
    let w: Vec<f64> = [10usize, 20, 40]
        .iter()
        .map(|&n| star_abs_expectation(&pi, n, &ar).unwrap().0 / (n as f64).powi(3))
        .collect();
    assert!(w.windows(2).all(|x| x[1] < x[0]), "{w:?}");
}

#[test]
fn exact_fourth_moment_approaches_catalan() {
    let iid = covariance_model(&ProcessSpec::Iid);
    let at8 = exact_expected_trace_moment(8, 4, &iid).unwrap();
    let at32 = exact_expected_trace_moment(32, 4, &iid).unwrap();
    assert!((at32 - 2.0).abs() < 0.15);
    assert!((at32 - 2.0).abs() < (at8 - 2.0).abs());
    assert_eq!(exact_expected_trace_moment(1, 2, &iid).unwrap(), 1.0);
    assert!((exact_expected_trace_moment(2, 2, &iid).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn exact_moments_agree_with_sampling_small() {
    // the full-size version of this check is part of the acceptance suite
    for process in [ProcessSpec::Iid, ProcessSpec::GaussAr1 { rho: 0.5 }] {
        let model = covariance_model(&process);
        let config = EnsembleConfig::new(4, process, 77);
        let est = monte_carlo_trace_moments(&config, 20_000, &[2, 4]).unwrap();
        for (e, k) in est.iter().zip([2usize, 4]) {
            let exact = exact_expected_trace_moment(4, k, &model).unwrap();
            assert!(e.agrees_with(exact, 4.0), "k={k}: {e:?} vs {exact}");
        }
    }
}
