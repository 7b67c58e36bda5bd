use lln::special::{
    ln_gamma, log_factorial, normal_cdf, normal_quantile, regularized_incomplete_beta, stirling_bracket,
    stirling_theta, PrecisionConfig,
};

fn main() -> lln::Result<()> {
    let cfg = PrecisionConfig::default();

    for z in [0.5, 1.0, 1.96, 3.290527, 6.0] {
        println!("Phi({z:>8}) = {:.16}", normal_cdf(z));
    }
    let z = normal_quantile(0.9995, &cfg)?;
    println!("quantile(0.9995) = {z:.10}, Phi back = {:.16}", normal_cdf(z));

    // Stirling's series brackets n! with theta in (0, 1)
    for n in [1u64, 10, 100] {
        let (lo, hi) = stirling_bracket(n)?;
        println!(
            "ln {n}! = {:.12}  in [{:.12}, {:.12}]  theta = {:.6}",
            log_factorial(n),
            lo.ln(),
            hi.ln(),
            stirling_theta(n)?
        );
    }
    println!("ln Gamma(0.5) = {:.15}", ln_gamma(0.5));

    // I_x(a, b) with a, b in the tens of thousands, as in posterior work
    let ix = regularized_incomplete_beta(110313.0, 105288.0, 0.51615, &cfg)?;
    println!("I_0.51615(110313, 105288) = {ix:.12}");
    Ok(())
}
