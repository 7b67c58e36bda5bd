use lln::bounds::{
    bernoulli_1713_n, bernstein_1911_lower, bernstein_exponential_bound, bienayme_chebyshev_bound, chebyshev_1846_n,
    BernoulliProblem, ChebyshevProblem,
};
use lln::exact::{interval_prob, upper_tail};
use lln::BinomialModel;

fn main() -> lln::Result<()> {
    // 30 fertile and 20 sterile cases, odds 1000 to 1
    let bern = bernoulli_1713_n(&BernoulliProblem::new(30, 20, 1000.0)?);
    println!("Bernoulli: N = {} (arms {:.3}, {:.3})", bern.n, bern.first, bern.second);

    let cheb = chebyshev_1846_n(&ChebyshevProblem::new(0.6, 0.02, 1.0 / 1001.0)?)?;
    println!("Chebyshev: raw {:.4}, n >= {}", cheb.raw, cheb.n_min);

    let m = BinomialModel::parse(6520, "3/5")?;
    let a = 0.02 * 6520.0;
    let var_of_freq = m.variance() / (6520.0 * 6520.0);
    println!("variance bound on P(|X/n - p| >= 0.02): {:.5}", bienayme_chebyshev_bound(var_of_freq, 0.02)?.value);

    let exp = bernstein_exponential_bound(&m, a)?;
    let exact = upper_tail(&m, (m.mean_f64() + a).ceil() as i64);
    println!("exponential bound {:.3e} vs exact tail {exact:.3e}", exp.value);

    let b = bernstein_1911_lower(199, 2.25)?;
    let exact = interval_prob(&BinomialModel::parse(199, "1/2")?, b.event)?;
    println!("1911 lower bound {:.7} <= P({} <= X <= {}) = {exact:.7}", b.bound.value, b.event.lo, b.event.hi);
    Ok(())
}
