use crate::schemes::{simulate_replicates, theoretical_mean, theoretical_var_sum, SchemeSpec};

fn sample_moments(sums: &[f64]) -> (f64, f64) {
    let n = sums.len() as f64;
    let mean = sums.iter().sum::<f64>() / n;
    let var = sums.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

pub(crate) fn all_schemes() -> Vec<SchemeSpec> {
    vec![
        SchemeSpec::IidBernoulli { p: 0.6 },
        SchemeSpec::PoissonFixed {
            probs: vec![0.2, 0.4, 0.9],
        },
        SchemeSpec::PoissonCauses {
            probs: vec![0.1, 0.5, 0.6],
        },
        SchemeSpec::BienaymePersistence {
            probs: vec![0.3, 0.5, 0.7],
            block_len: 50,
        },
        SchemeSpec::FiniteMarkov {
            matrix: vec![vec![0.9, 0.1], vec![0.2, 0.8]],
            initial: vec![0.5, 0.5],
            values: vec![0.0, 1.0],
        },
    ]
}

#[test]
fn empirical_means_match_theory() {
    for spec in all_schemes() {
        let run = simulate_replicates(&spec, 10_000, 1000, None, 2024).unwrap();
        let (_, var) = sample_moments(&run.replicate_sums);
        let se = (var / 1000.0).sqrt() / 10_000.0;
        let target = crate::schemes::expected_average(&spec, 10_000).unwrap();
        assert!((run.mean - target).abs() <= 3.0 * se, "{}: {} vs {target}", spec.name(), run.mean);
        let long_run = theoretical_mean(&spec).unwrap();
        assert!((target - long_run).abs() < 1e-3, "{}", spec.name());
    }
}

#[test]
fn persistence_with_one_cause_is_iid() {
    let blocks = SchemeSpec::BienaymePersistence {
        probs: vec![0.35],
        block_len: 20,
    };
    let iid = SchemeSpec::IidBernoulli { p: 0.35 };
    let a = simulate_replicates(&blocks, 400, 1000, None, 5).unwrap();
    let b = simulate_replicates(&iid, 400, 1000, None, 6).unwrap();
    let se = (2.0 * 0.35 * 0.65 / (400.0 * 1000.0f64)).sqrt();
    assert!((a.mean - b.mean).abs() <= 3.0 * se);
}

#[test]
fn simulated_variances_match_theory() {
    for spec in all_schemes() {
        let run = simulate_replicates(&spec, 500, 4000, None, 77).unwrap();
        let (_, var) = sample_moments(&run.replicate_sums);
        let theory = theoretical_var_sum(&spec, 500).unwrap();
        // sample variance has sd about var sqrt(2/(R-1)) for near-normal sums
        let sd = theory * (2.0 / 3999.0f64).sqrt();
        assert!((var - theory).abs() <= 4.0 * sd, "{}: {var} vs {theory}", spec.name());
    }
}

#[test]
fn equiprobable_causes_look_like_iid() {
    // coarse chi-square on the distribution of S over 4000 replicates
    let causes = SchemeSpec::PoissonCauses {
        probs: vec![0.2, 0.5, 0.8],
    };
    let iid = SchemeSpec::IidBernoulli { p: 0.5 };
    let a = simulate_replicates(&causes, 100, 4000, None, 10).unwrap();
    let b = simulate_replicates(&iid, 100, 4000, None, 11).unwrap();
    let edges = [0.0, 42.5, 46.5, 49.5, 52.5, 55.5, 59.5, 101.0];
    let hist = |sums: &[f64]| -> Vec<f64> {
        edges
            .windows(2)
            .map(|w| sums.iter().filter(|&&s| s >= w[0] && s < w[1]).count() as f64)
            .collect()
    };
    let (ha, hb) = (hist(&a.replicate_sums), hist(&b.replicate_sums));
    let chi2: f64 = ha
        .iter()
        .zip(&hb)
        .filter(|(x, y)| *x + *y > 0.0)
        .map(|(x, y)| (x - y) * (x - y) / (x + y))
        .sum();
    // 6 degrees of freedom; 22.46 is the 0.999 quantile
    assert!(chi2 < 22.46, "chi2 = {chi2}, {ha:?} vs {hb:?}");
}
