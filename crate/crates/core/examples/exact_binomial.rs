use lln::exact::{deviation_prob, interval_prob, pmf, RationalOracle};
use lln::{BinomialModel, DeviationQuery, IntegerInterval, Rational};

fn main() -> lln::Result<()> {
    // 14000 births with a boy ratio of 18:17
    let births = BinomialModel::parse(14000, "18/35")?;
    let range = IntegerInterval::new(7037, 7363)?;
    let p = interval_prob(&births, range)?;
    println!("P(7037 <= X <= 7363) = {p:.10}");

    let oracle = RationalOracle::with_capacity(14000).interval(&births, range)?;
    println!("rational engine      = {:.10}", lln::exact::big_rational_to_f64(&oracle));

    let query = DeviationQuery::new(Rational::new(1, 50))?;
    for n in [6490, 6491, 6520] {
        let m = BinomialModel::parse(n, "3/5")?;
        println!("n = {n}: P(|X/n - 0.6| <= 0.02) = {:.7}", deviation_prob(&m, &query)?);
    }

    let small = BinomialModel::parse(50, "0.6")?;
    println!("P(X = 30 | n = 50, p = 0.6) = {:.12}", pmf(&small, 30)?);
    Ok(())
}
