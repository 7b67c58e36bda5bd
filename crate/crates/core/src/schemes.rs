//! Seeded simulation of trial schemes with and without independence, and
//! the exact means and variances that the law of large numbers rests on.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bounds::bienayme_chebyshev_bound;
use crate::error::{Error, Result};
use crate::rational::Rational;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The splitmix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Stream for replicate `index`: seeded by `splitmix64(seed ^ index)`.
    pub fn for_replicate(seed: u64, index: u64) -> Self {
        SplitMix64::new(SplitMix64::new(seed ^ index).next_u64())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `[0, 1)` from the high 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn below(&mut self, k: usize) -> usize {
        ((self.next_f64() * k as f64) as usize).min(k - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum SchemeSpec {
    IidBernoulli { p: f64 },
    /// Trial `t` succeeds with `probs[t mod len]`.
    PoissonFixed { probs: Vec<f64> },
    /// Every trial draws one of the causes at random, then succeeds with its
    /// probability.
    PoissonCauses { probs: Vec<f64> },
    /// Each block of `block_len` trials shares one randomly drawn cause.
    BienaymePersistence { probs: Vec<f64>, block_len: u64 },
    /// Trial `t` records `values[state_t]` of a positive Markov chain.
    FiniteMarkov {
        matrix: Vec<Vec<f64>>,
        initial: Vec<f64>,
        values: Vec<f64>,
    },
}

fn check_probabilities(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::domain("need at least one probability"));
    }
    if let Some(p) = probs.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
        return Err(Error::domain(format!("probability {p} outside (0, 1)")));
    }
    Ok(())
}

fn check_distribution(v: &[f64], what: &str) -> Result<()> {
    if v.iter().any(|&x| !(x >= 0.0)) || (v.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!("{what} is not a probability vector")));
    }
    Ok(())
}

fn check_stochastic(matrix: &[Vec<f64>]) -> Result<()> {
    let k = matrix.len();
    if k == 0 {
        return Err(Error::domain("transition matrix is empty"));
    }
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != k {
            return Err(Error::domain(format!("row {i} has {} entries, expected {k}", row.len())));
        }
        if row.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::domain(format!("row {i} has a non-positive entry")));
        }
        if (row.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("row {i} does not sum to 1")));
        }
    }
    Ok(())
}

impl SchemeSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            SchemeSpec::IidBernoulli { p } => check_probabilities(&[*p]),
            SchemeSpec::PoissonFixed { probs } | SchemeSpec::PoissonCauses { probs } => check_probabilities(probs),
            SchemeSpec::BienaymePersistence { probs, block_len } => {
                if *block_len == 0 {
                    return Err(Error::domain("block length must be at least 1"));
                }
                check_probabilities(probs)
            }
            SchemeSpec::FiniteMarkov {
                matrix,
                initial,
                values,
            } => {
                check_stochastic(matrix)?;
                if initial.len() != matrix.len() || values.len() != matrix.len() {
                    return Err(Error::domain("initial distribution and values must match the matrix size"));
                }
                check_distribution(initial, "initial distribution")?;
                if values.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                    return Err(Error::domain("state values must lie in [0, 1]"));
                }
                Ok(())
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SchemeSpec::IidBernoulli { .. } => "iid_bernoulli",
            SchemeSpec::PoissonFixed { .. } => "poisson_fixed",
            SchemeSpec::PoissonCauses { .. } => "poisson_causes",
            SchemeSpec::BienaymePersistence { .. } => "bienayme_persistence",
            SchemeSpec::FiniteMarkov { .. } => "finite_markov",
        }
    }
}

fn mean_of(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Long-run mean of the trials: `p`, the average of the listed
/// probabilities, or the stationary mean of the chain.
pub fn theoretical_mean(scheme: &SchemeSpec) -> Result<f64> {
    scheme.validate()?;
    Ok(match scheme {
        SchemeSpec::IidBernoulli { p } => *p,
        SchemeSpec::PoissonFixed { probs }
        | SchemeSpec::PoissonCauses { probs }
        | SchemeSpec::BienaymePersistence { probs, .. } => mean_of(probs),
        SchemeSpec::FiniteMarkov { matrix, values, .. } => {
            let pi = stationary_distribution(matrix)?;
            pi.iter().zip(values).map(|(a, b)| a * b).sum()
        }
    })
}

/// Distributions of the chain at times `0..len`.
fn marginals(matrix: &[Vec<f64>], initial: &[f64], len: u64) -> Vec<Vec<f64>> {
    let k = initial.len();
    let mut out = Vec::with_capacity(len as usize);
    let mut mu = initial.to_vec();
    for _ in 0..len {
        let next: Vec<f64> = (0..k).map(|j| (0..k).map(|i| mu[i] * matrix[i][j]).sum()).collect();
        out.push(std::mem::replace(&mut mu, next));
    }
    out
}

/// `E[S_N] / N` for the first `N` trials exactly.
pub fn expected_average(scheme: &SchemeSpec, size: u64) -> Result<f64> {
    scheme.validate()?;
    if size == 0 {
        return Err(Error::domain("size must be at least 1"));
    }
    Ok(match scheme {
        SchemeSpec::PoissonFixed { probs } => {
            (0..size).map(|t| probs[(t % probs.len() as u64) as usize]).sum::<f64>() / size as f64
        }
        SchemeSpec::FiniteMarkov {
            matrix,
            initial,
            values,
        } => {
            let total: f64 = marginals(matrix, initial, size)
                .iter()
                .map(|mu| mu.iter().zip(values).map(|(a, b)| a * b).sum::<f64>())
                .sum();
            total / size as f64
        }
        _ => theoretical_mean(scheme)?,
    })
}

/// `Var(S_N)` for the first `N` trials.
///
/// Independent schemes add variances. Under persistence a block of `L`
/// trials has variance `L avg(p(1-p)) + L^2 Var(cause)`; a trailing partial
/// block contributes the same expression with its own length. For a chain
/// the covariances come from `N` successive powers of the transition matrix.
pub fn theoretical_var_sum(scheme: &SchemeSpec, size: u64) -> Result<f64> {
    scheme.validate()?;
    Ok(match scheme {
        SchemeSpec::IidBernoulli { p } => size as f64 * p * (1.0 - p),
        SchemeSpec::PoissonFixed { probs } => (0..size)
            .map(|t| {
                let p = probs[(t % probs.len() as u64) as usize];
                p * (1.0 - p)
            })
            .sum(),
        SchemeSpec::PoissonCauses { probs } => {
            let m = mean_of(probs);
            size as f64 * m * (1.0 - m)
        }
        SchemeSpec::BienaymePersistence { probs, block_len } => {
            let within = mean_of(&probs.iter().map(|p| p * (1.0 - p)).collect::<Vec<_>>());
            let m = mean_of(probs);
            let between = mean_of(&probs.iter().map(|p| (p - m) * (p - m)).collect::<Vec<_>>());
            let block = |len: f64| len * within + len * len * between;
            let (full, rest) = (size / block_len, size % block_len);
            full as f64 * block(*block_len as f64) + block(rest as f64)
        }
        SchemeSpec::FiniteMarkov {
            matrix,
            initial,
            values,
        } => markov_var_sum(matrix, initial, values, size)?,
    })
}

fn markov_var_sum(matrix: &[Vec<f64>], initial: &[f64], values: &[f64], size: u64) -> Result<f64> {
    let k = values.len();
    let n = size as usize;
    if n == 0 {
        return Ok(0.0);
    }
    // shifting every value by a constant leaves the variance alone and keeps
    // the sums small
    let pi = stationary_distribution(matrix)?;
    let c: f64 = pi.iter().zip(values).map(|(a, b)| a * b).sum();
    let u: Vec<f64> = values.iter().map(|v| v - c).collect();

    let mus = marginals(matrix, initial, size);
    let means: Vec<f64> = mus.iter().map(|mu| mu.iter().zip(&u).map(|(a, b)| a * b).sum()).collect();

    // g_d = P^d u, and prefix[L] = sum_{d=1}^{L} g_d
    let mut prefix = vec![vec![0.0; k]; n];
    let mut g = u.clone();
    for d in 1..n {
        g = (0..k).map(|i| (0..k).map(|j| matrix[i][j] * g[j]).sum()).collect();
        for i in 0..k {
            prefix[d][i] = prefix[d - 1][i] + g[i];
        }
    }

    let mut var = 0.0;
    let mut cross = 0.0;
    for (s, mu) in mus.iter().enumerate() {
        let second: f64 = mu.iter().zip(&u).map(|(a, b)| a * b * b).sum();
        var += second - means[s] * means[s];
        let tail = &prefix[n - 1 - s];
        cross += (0..k).map(|i| mu[i] * u[i] * tail[i]).sum::<f64>();
    }
    let total: f64 = means.iter().sum();
    let squares: f64 = means.iter().map(|m| m * m).sum();
    let mean_pairs = 0.5 * (total * total - squares);
    Ok(var + 2.0 * (cross - mean_pairs))
}

/// Left fixed vector of a strictly positive stochastic matrix.
pub fn stationary_distribution(matrix: &[Vec<f64>]) -> Result<Vec<f64>> {
    check_stochastic(matrix)?;
    let k = matrix.len();
    // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1
    let mut a = DMatrix::from_fn(k, k, |i, j| matrix[j][i] - if i == j { 1.0 } else { 0.0 });
    let mut rhs = DVector::zeros(k);
    for j in 0..k {
        a[(k - 1, j)] = 1.0;
    }
    rhs[k - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::domain("transition matrix gives a singular stationary system"))?;
    Ok(pi.iter().map(|x| x.max(0.0)).collect())
}

fn run_once(scheme: &SchemeSpec, size: u64, rng: &mut SplitMix64) -> f64 {
    let mut sum = 0.0;
    let hit = |rng: &mut SplitMix64, p: f64| if rng.next_f64() < p { 1.0 } else { 0.0 };
    match scheme {
        SchemeSpec::IidBernoulli { p } => {
            for _ in 0..size {
                sum += hit(rng, *p);
            }
        }
        SchemeSpec::PoissonFixed { probs } => {
            for t in 0..size {
                sum += hit(rng, probs[(t % probs.len() as u64) as usize]);
            }
        }
        SchemeSpec::PoissonCauses { probs } => {
            for _ in 0..size {
                let p = probs[rng.below(probs.len())];
                sum += hit(rng, p);
            }
        }
        SchemeSpec::BienaymePersistence { probs, block_len } => {
            let mut p = 0.0;
            for t in 0..size {
                if t % block_len == 0 {
                    p = probs[rng.below(probs.len())];
                }
                sum += hit(rng, p);
            }
        }
        SchemeSpec::FiniteMarkov {
            matrix,
            initial,
            values,
        } => {
            let draw = |rng: &mut SplitMix64, dist: &[f64]| {
                let u = rng.next_f64();
                let mut acc = 0.0;
                for (i, w) in dist.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        return i;
                    }
                }
                dist.len() - 1
            };
            let mut state = draw(rng, initial);
            for t in 0..size {
                sum += values[state];
                if t + 1 < size {
                    state = draw(rng, &matrix[state]);
                }
            }
        }
    }
    sum
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub total_trials: u64,
    /// Sum over all replicates of the per-replicate success totals.
    pub sum: f64,
    /// Average of the per-replicate means.
    pub mean: f64,
    pub replicate_count: u64,
    /// Share of replicates whose mean is at least `eps` away from the exact
    /// `E[S_N]/N`; zero when no `eps` is given.
    pub deviation_frequency: f64,
    #[serde(skip)]
    pub replicate_sums: Vec<f64>,
}

/// One replicate of `size` trials.
pub fn simulate(scheme: &SchemeSpec, size: u64, seed: u64) -> Result<RunResult> {
    simulate_replicates(scheme, size, 1, None, seed)
}

pub fn simulate_replicates(
    scheme: &SchemeSpec,
    size: u64,
    replicates: u64,
    epsilon: Option<f64>,
    seed: u64,
) -> Result<RunResult> {
    scheme.validate()?;
    if size == 0 || replicates == 0 {
        return Err(Error::domain("size and replicate count must be at least 1"));
    }
    let centre = expected_average(scheme, size)?;
    let sums: Vec<f64> = (0..replicates)
        .map(|r| run_once(scheme, size, &mut SplitMix64::for_replicate(seed, r)))
        .collect();
    let n = size as f64;
    let deviations = match epsilon {
        Some(eps) => sums.iter().filter(|&&s| (s / n - centre).abs() >= eps).count(),
        None => 0,
    };
    Ok(RunResult {
        total_trials: size,
        sum: sums.iter().sum(),
        mean: sums.iter().map(|s| s / n).sum::<f64>() / replicates as f64,
        replicate_count: replicates,
        deviation_frequency: deviations as f64 / replicates as f64,
        replicate_sums: sums,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LlnCertificate {
    pub scheme: &'static str,
    pub frequency: f64,
    pub chebyshev_bound: f64,
    /// `chebyshev_bound + 3 sqrt(b (1 - b) / R)` with `b` the clamped bound.
    pub tolerance: f64,
    /// `(n, Var(S_n) / n^2)` at a quarter, half and all of the size.
    pub diagnostic: Vec<(u64, f64)>,
}

impl LlnCertificate {
    pub fn holds(&self) -> bool {
        self.frequency <= self.tolerance
    }
}

pub fn lln_certificate(
    scheme: &SchemeSpec,
    epsilon: f64,
    size: u64,
    replicates: u64,
    seed: u64,
) -> Result<LlnCertificate> {
    let run = simulate_replicates(scheme, size, replicates, Some(epsilon), seed)?;
    let var = theoretical_var_sum(scheme, size)?;
    let n = size as f64;
    let bound = bienayme_chebyshev_bound(var / (n * n), epsilon)?;
    let b = bound.value;
    let diagnostic = [size / 4, size / 2, size]
        .into_iter()
        .filter(|&m| m > 0)
        .map(|m| Ok((m, theoretical_var_sum(scheme, m)? / (m as f64 * m as f64))))
        .collect::<Result<Vec<_>>>()?;
    Ok(LlnCertificate {
        scheme: scheme.name(),
        frequency: run.deviation_frequency,
        chebyshev_bound: bound.raw,
        tolerance: b + 3.0 * (b * (1.0 - b) / replicates as f64).sqrt(),
        diagnostic,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseReport {
    /// `Cov(X1, X2)`, `Cov(X1, X3)`, `Cov(X2, X3)`.
    pub covariances: [String; 3],
    pub pairwise_independent: bool,
    pub p_all_ones: String,
    pub product_of_marginals: String,
    pub mutually_independent: bool,
    pub var_of_sum: String,
    pub sum_of_vars: String,
}

/// `X1, X2` fair coins and `X3 = X1 xor X2`, by exact enumeration.
pub fn pairwise_independence_demo() -> PairwiseReport {
    let quarter = Rational::new(1, 4);
    let outcomes: Vec<[i128; 3]> = [(0, 0), (0, 1), (1, 0), (1, 1)]
        .into_iter()
        .map(|(a, b)| [a, b, a ^ b])
        .collect();
    let expect = |f: &dyn Fn(&[i128; 3]) -> i128| -> Rational {
        outcomes.iter().map(|o| Rational::from_integer(f(o)) * quarter).sum()
    };
    let mean: Vec<Rational> = (0..3).map(|i| expect(&|o| o[i])).collect();
    let cov = |i: usize, j: usize| expect(&|o| o[i] * o[j]) - mean[i] * mean[j];
    let covariances = [cov(0, 1), cov(0, 2), cov(1, 2)];

    let pairwise_independent = (0..3).all(|i| {
        (i + 1..3).all(|j| {
            (0..2).all(|a| {
                (0..2).all(|b| {
                    let joint = expect(&|o| (o[i] == a && o[j] == b) as i128);
                    let pi = expect(&|o| (o[i] == a) as i128);
                    let pj = expect(&|o| (o[j] == b) as i128);
                    joint == pi * pj
                })
            })
        })
    });
    let p_all_ones = expect(&|o| (o[0] == 1 && o[1] == 1 && o[2] == 1) as i128);
    let product: Rational = mean.iter().product();
    let s_mean = expect(&|o| o.iter().sum());
    let var_of_sum = expect(&|o| {
        let s: i128 = o.iter().sum();
        s * s
    }) - s_mean * s_mean;
    let sum_of_vars: Rational = (0..3).map(|i| expect(&|o| o[i] * o[i]) - mean[i] * mean[i]).sum();

    PairwiseReport {
        covariances: covariances.map(|c| c.to_string()),
        pairwise_independent,
        p_all_ones: p_all_ones.to_string(),
        product_of_marginals: product.to_string(),
        mutually_independent: p_all_ones == product,
        var_of_sum: var_of_sum.to_string(),
        sum_of_vars: sum_of_vars.to_string(),
    }
}
