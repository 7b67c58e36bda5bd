use lln::schemes::{
    lln_certificate, pairwise_independence_demo, simulate_replicates, stationary_distribution, SchemeSpec,
};

fn main() -> lln::Result<()> {
    let schemes = [
        SchemeSpec::IidBernoulli { p: 0.6 },
        SchemeSpec::PoissonFixed { probs: vec![0.2, 0.4, 0.9] },
        SchemeSpec::PoissonCauses { probs: vec![0.1, 0.5, 0.6] },
        SchemeSpec::BienaymePersistence { probs: vec![0.3, 0.5, 0.7], block_len: 50 },
        SchemeSpec::FiniteMarkov {
            matrix: vec![vec![0.9, 0.1], vec![0.2, 0.8]],
            initial: vec![0.5, 0.5],
            values: vec![0.0, 1.0],
        },
    ];
    for scheme in &schemes {
        let cert = lln_certificate(scheme, 0.02, 10_000, 1000, 1713)?;
        println!(
            "{:<22} freq {:.3}  bound {:.4}  holds {}",
            cert.scheme, cert.frequency, cert.chebyshev_bound, cert.holds()
        );
    }

    // persistence keeps the spread from shrinking like 1/n
    let run = simulate_replicates(&schemes[3], 10_000, 200, Some(0.02), 7)?;
    println!("persistence: mean {:.4}, deviation share {:.2}", run.mean, run.deviation_frequency);

    println!("stationary {:?}", stationary_distribution(&[vec![0.9, 0.1], vec![0.2, 0.8]])?);

    let demo = pairwise_independence_demo();
    println!(
        "xor triple: covariances {:?}, P(all ones) = {} vs {}, Var sum {} = {}",
        demo.covariances, demo.p_all_ones, demo.product_of_marginals, demo.var_of_sum, demo.sum_of_vars
    );
    Ok(())
}
