use crate::approx::{
    demoivre_clt, laplace_corrected, uspensky_bracket,
    StandardizedRange,
};
use crate::exact::{big_rational_to_f64, interval_prob, BinomialModel, IntegerInterval, RationalOracle};
use crate::special::normal_two_sided;
use crate::Rational;
use proptest::prelude::*;

/// Lattice points in `t1 s <= x - np <= t2 s`, from the same floats the
/// bracket sees.
fn lattice(model: &BinomialModel, range: &StandardizedRange) -> Option<IntegerInterval> {
    let (np, s) = (model.mean_f64(), model.sd());
    let lo = (np + range.t1() * s).ceil().max(0.0) as i64;
    let hi = (np + range.t2() * s).floor().min(model.n() as f64) as i64;
    IntegerInterval::new(lo, hi).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn uspensky_encloses_the_oracle(
        n in 100u64..=5000,
        num in 1i128..100,
        a in -3.5f64..3.0,
        width in 0.1f64..4.0,
    ) {
        let model = BinomialModel::new(n, Rational::new(num, 100)).unwrap();
        prop_assume!(model.variance() >= 25.0);
        let range = StandardizedRange::new(a, a + width).unwrap();
        let bracket = uspensky_bracket(&model, &range).unwrap();
        let exact = match lattice(&model, &range) {
            Some(iv) => big_rational_to_f64(&RationalOracle::default().interval(&model, iv).unwrap()),
            None => 0.0,
        };
        prop_assert!(bracket.contains(exact), "n={} p={}/100 t=({}, {}): {:?} vs {}", n, num, a, a + width, bracket, exact);
    }

    #[test]
    fn demoivre_is_monotone_in_t(t in 0.01f64..7.0, dt in 0.0001f64..1.0) {
        let a = demoivre_clt(&StandardizedRange::symmetric(t).unwrap());
        let b = demoivre_clt(&StandardizedRange::symmetric(t + dt).unwrap());
        prop_assert!(b >= a);
    }
}

#[test]
fn laplace_error_shrinks_with_n() {
    // p = 1/2, np an integer and t sqrt(npq) an integer at every grid point
    let grid = [200u64, 400, 800, 1600];
    let mut errors = Vec::new();
    for n in grid {
        let model = BinomialModel::parse(n, "1/2").unwrap();
        let sd = model.sd();
        // half-width as close as possible to 1.5 sd, in whole counts
        let k = (1.5 * sd).round();
        let t = k / sd;
        let centre = n as i64 / 2;
        let exact = interval_prob(&model, IntegerInterval::new(centre - k as i64, centre + k as i64).unwrap()).unwrap();
        errors.push((laplace_corrected(&model, t).unwrap() - exact).abs());
    }
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[1] / w[0]).collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!(mean <= 0.75, "errors {errors:?} ratios {ratios:?}");
}

#[test]
fn plain_normal_is_close_on_a_big_model() {
    let model = BinomialModel::parse(14000, "18/35").unwrap();
    let t = 163.0 / model.sd();
    assert!((normal_two_sided(t) - 0.9943058).abs() < 3e-4);
}
