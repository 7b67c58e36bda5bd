use lln::bayes::{
    bayes_estimator, bernstein_inversion_bound, beta_cell_masses, chebyshev_discrete_posterior,
    laplace_consistency_scan, posterior_interval_exact, posterior_normal_interval, total_variation, CredibleQuery,
    PosteriorSpec,
};

fn main() -> lln::Result<()> {
    // boys and girls born in Paris, 1745-1784
    let (boys, girls) = (110312u64, 105287u64);
    let n = boys + girls;
    let spec = PosteriorSpec::uniform(boys, girls);
    let query = CredibleQuery::Interval { lo: 0.50715, hi: 0.51615 };
    println!("exact posterior  {:.7}", posterior_interval_exact(&spec, &query)?);
    println!("normal posterior {:.7}", posterior_normal_interval(boys, n, 0.50715, 0.51615)?);

    let est = bayes_estimator(&PosteriorSpec::uniform(7, 3))?;
    println!("7 of 10: mean {:.4}, (r+1)/(n+1) = {:.4}", est.posterior_mean, est.printed_ratio);

    for s in [10, 100, 1000] {
        let tv = total_variation(&chebyshev_discrete_posterior(s, 40, 25)?, &beta_cell_masses(s, 40, 25)?);
        println!("{s} atoms: total variation to Beta cells {tv:.2e}");
    }

    let bound = bernstein_inversion_bound(10000, 100, 0.1)?;
    println!("posterior mass within 0.1 of m/n is at least {:.6}", bound.value);

    let scan = laplace_consistency_scan(1, 1, 0.05, 0.01, 10_000)?;
    println!("k* = {} (mass {:.5})", scan.k, scan.probability);
    Ok(())
}
