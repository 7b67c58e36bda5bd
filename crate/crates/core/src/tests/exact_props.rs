use crate::exact::{
    big_rational_to_f64, deviation_prob, interval_prob, pmf, BinomialModel, DeviationQuery, IntegerInterval,
    RationalOracle,
};
use crate::special::CompensatedSum;
use crate::Rational;
use proptest::prelude::*;

#[test]
fn pmf_sums_to_one() {
    for (n, p) in [(10u64, "0.3"), (137, "18/35"), (1000, "0.6")] {
        let model = BinomialModel::parse(n, p).unwrap();
        let total: CompensatedSum = (0..=n as i64).map(|x| pmf(&model, x).unwrap()).collect();
        assert!((total.value() - 1.0).abs() <= 1e-12, "n={n}: {}", total.value());
    }
}

#[test]
fn pmf_matches_rational_value_at_fifty() {
    let model = BinomialModel::parse(50, "0.6").unwrap();
    let exact = RationalOracle::default()
        .interval(&model, IntegerInterval::new(30, 30).unwrap())
        .unwrap();
    let exact = big_rational_to_f64(&exact);
    let got = pmf(&model, 30).unwrap();
    assert!(((got - exact) / exact).abs() < 1e-12, "{got} vs {exact}");
}

fn case() -> impl Strategy<Value = (u64, i128, i128, i64, i64)> {
    (2u64..=2000, 2i128..=97)
        .prop_flat_map(|(n, den)| (Just(n), 1..den, Just(den), 0..=n as i64, 0..=n as i64))
        .prop_map(|(n, num, den, a, b)| (n, num, den, a.min(b), a.max(b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn floating_engine_agrees_with_oracle((n, num, den, lo, hi) in case()) {
        let model = BinomialModel::new(n, Rational::new(num, den)).unwrap();
        let iv = IntegerInterval::new(lo, hi).unwrap();
        let exact = big_rational_to_f64(&RationalOracle::default().interval(&model, iv).unwrap());
        let got = interval_prob(&model, iv).unwrap();
        // terms below 1e-25 of the running total are dropped, so tiny sums are
        // compared with an absolute floor
        let err = (got - exact).abs();
        prop_assert!(err <= 1e-12 * exact || err <= 1e-300, "n={} p={}/{} [{}, {}]: {:e} vs {:e}", n, num, den, lo, hi, got, exact);
    }
}

proptest! {
    #[test]
    fn enlarging_an_interval_never_decreases_it(
        n in 5u64..3000,
        p in 0.05f64..0.95,
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
        grow_lo in 0i64..50,
        grow_hi in 0i64..50,
    ) {
        let model = BinomialModel::from_f64(n, (p * 1000.0).round() / 1000.0).unwrap();
        let (x, y) = ((a * n as f64) as i64, (b * n as f64) as i64);
        let inner = IntegerInterval::new(x.min(y), x.max(y)).unwrap();
        let outer = IntegerInterval::new((inner.lo - grow_lo).max(0), (inner.hi + grow_hi).min(n as i64)).unwrap();
        prop_assert!(interval_prob(&model, outer).unwrap() >= interval_prob(&model, inner).unwrap());
    }

    #[test]
    fn deviation_is_the_interval_path(n in 1u64..20000, num in 1i128..99, eps_num in 1i128..50) {
        let model = BinomialModel::new(n, Rational::new(num, 100)).unwrap();
        let bound = num.min(100 - num);
        prop_assume!(eps_num < bound);
        let query = DeviationQuery::new(Rational::new(eps_num, 100)).unwrap();
        let via_query = deviation_prob(&model, &query).unwrap();
        // lo = smallest integer >= n(p - eps), hi = floor(n(p + eps)), from integer arithmetic
        let lo = (n as i128 * (num - eps_num) + 99).div_euclid(100) as i64;
        let hi = ((n as i128 * (num + eps_num)).div_euclid(100) as i64).min(n as i64);
        let via_interval = if lo <= hi {
            interval_prob(&model, IntegerInterval::new(lo, hi).unwrap()).unwrap()
        } else {
            0.0
        };
        prop_assert_eq!(via_query.to_bits(), via_interval.to_bits());
    }
}
