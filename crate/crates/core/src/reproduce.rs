//! The regression table: every published number the library can recompute,
//! compared against its reference value.

use serde::Serialize;

use crate::approx::{
    bernstein_1924_bracket, bernstein_1924_event, laplace_corrected, uspensky_bracket, StandardizedRange,
};
use crate::bayes::{bernstein_inversion_bound, posterior_interval_exact, posterior_normal_interval, CredibleQuery, PosteriorSpec};
use crate::bounds::{
    bernoulli_1713_n, bernstein_1911_lower, bernstein_exponential_bound, bienayme_chebyshev_bound, chebyshev_1846_n,
    markov_inequality, BernoulliProblem, ChebyshevProblem,
};
use crate::error::{Error, Result};
use crate::exact::{
    big_rational_to_f64, deviation_prob, interval_prob, lower_tail, upper_tail, BinomialModel, DeviationQuery,
    IntegerInterval, RationalOracle,
};
use crate::inversion::{minimal_n_clt, minimal_n_exact, minimal_n_worstcase, verify_window, PrecisionTarget};
use crate::rational::Rational;
use crate::schemes::{
    lln_certificate, pairwise_independence_demo, simulate_replicates, theoretical_var_sum, SchemeSpec, SplitMix64,
};
use crate::special::normal_two_sided;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    ReferenceOnly,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::ReferenceOnly => "reference_only",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub id: String,
    pub method: String,
    pub computed: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub status: Status,
}

impl ReportRow {
    pub fn check(id: &str, method: &str, computed: f64, reference: f64, tolerance: f64) -> Self {
        let status = if (computed - reference).abs() <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        ReportRow {
            id: id.into(),
            method: method.into(),
            computed,
            reference,
            tolerance,
            status,
        }
    }

    /// A yes/no property, reported as 1 or 0 against reference 1.
    pub fn flag(id: &str, method: &str, holds: bool) -> Self {
        Self::check(id, method, if holds { 1.0 } else { 0.0 }, 1.0, 0.0)
    }

    pub fn reference_only(id: &str, method: &str, computed: f64, reference: f64, tolerance: f64) -> Self {
        ReportRow {
            status: Status::ReferenceOnly,
            ..Self::check(id, method, computed, reference, tolerance)
        }
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

/// Default seed for every simulated row.
pub const DEFAULT_SEED: u64 = 1713;

fn model(n: u64, p: &str) -> Result<BinomialModel> {
    BinomialModel::parse(n, p)
}

fn flagship_target() -> Result<PrecisionTarget> {
    PrecisionTarget::from_odds(Rational::new(1, 50), 1000.0)
}

fn dev(n: u64) -> Result<f64> {
    deviation_prob(&model(n, "3/5")?, &DeviationQuery::new(Rational::new(1, 50))?)
}

fn exact_rows(rows: &mut Vec<ReportRow>) -> Result<()> {
    let nicolaus = interval_prob(&model(14000, "18/35")?, IntegerInterval::new(7037, 7363)?)?;
    rows.push(ReportRow::check("exact.nicolaus_interval", "interval_prob B(14000,18/35) [7037,7363]", nicolaus, 0.9943058, 5e-7));
    for (n, reference) in [(6490, 0.9989679), (6491, 0.9990126), (6520, 0.9990309)] {
        rows.push(ReportRow::check(
            &format!("exact.deviation_{n}"),
            "deviation_prob p=0.6 eps=0.02",
            dev(n)?,
            reference,
            1e-6,
        ));
    }
    let b199 = interval_prob(&model(199, "1/2")?, IntegerInterval::new(77, 122)?)?;
    rows.push(ReportRow::check("exact.b199_interval", "interval_prob B(199,1/2) [77,122]", b199, 0.9989406, 1e-6));
    Ok(())
}

fn inversion_rows(rows: &mut Vec<ReportRow>) -> Result<()> {
    let target = flagship_target()?;
    let p = Rational::new(3, 5);
    let exact = minimal_n_exact(p, &target)?;
    rows.push(ReportRow::check("invert.exact_n", "minimal_n_exact p=0.6 eps=0.02 c=1000", exact.n_min as f64, 6491.0, 0.0));

    let cheb = chebyshev_1846_n(&ChebyshevProblem::new(0.6, 0.02, 1.0 / 1001.0)?)?;
    rows.push(ReportRow::check("bound.chebyshev1846_raw", "chebyshev_1846_n raw", cheb.raw, 12241.293, 0.01));
    rows.push(ReportRow::check("bound.chebyshev1846_n", "chebyshev_1846_n n_min", cheb.n_min as f64, 12242.0, 0.0));

    let worst = minimal_n_worstcase(&PrecisionTarget::new(Rational::new(1, 50), 0.999001)?)?;
    rows.push(ReportRow::check("invert.worst_case_raw", "minimal_n_worstcase conf=0.999001", worst.raw.unwrap_or(f64::NAN), 6767.23, 0.02));
    let worst_999 = minimal_n_worstcase(&PrecisionTarget::new(Rational::new(1, 50), 0.999)?)?;
    rows.push(ReportRow::reference_only("ref.worst_case_conf_0999", "minimal_n_worstcase conf=0.999", worst_999.raw.unwrap_or(f64::NAN), 6767.23, 0.02));

    let plain = minimal_n_clt(p, &target, false)?;
    rows.push(ReportRow::check("invert.clt_plain_n", "minimal_n_clt uncorrected vs printed 6498", plain.n_min as f64, 6498.0, 2.0));
    let corrected = minimal_n_clt(p, &target, true)?;
    rows.push(ReportRow::check("invert.clt_corrected_n", "minimal_n_clt corrected in [6496, 6503]", corrected.n_min as f64, 6499.5, 3.5));
    rows.push(ReportRow::reference_only("ref.pearson_6502", "minimal_n_clt corrected vs Pearson", corrected.n_min as f64, 6502.0, 0.0));

    let window = verify_window(p, &target, 6520, 10)?;
    rows.push(ReportRow::flag("invert.window_6520_6530", "verify_window n=6520 window=10", window.holds));
    let at_6520 = dev(6520)?;
    rows.push(ReportRow::check("invert.markov_interval_contains", "deviation_prob(6520) in [0.999028, 0.999044]", at_6520, 0.999036, 0.000008));
    rows.push(ReportRow::reference_only("ref.markov_interval", "deviation_prob(6520) vs Markov's bounds", at_6520, 0.999036, 0.000008));
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DominanceReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl DominanceReport {
    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

/// Exact `P(lo <= X <= hi)` from the rational engine when `certify` is set
/// and `n` is within its capacity, otherwise from the floating engine.
fn exact_interval(m: &BinomialModel, lo: i64, hi: i64, certify: bool) -> Result<f64> {
    let (lo, hi) = (lo.max(0), hi.min(m.n() as i64));
    if lo > hi {
        return Ok(0.0);
    }
    let iv = IntegerInterval::new(lo, hi)?;
    if certify {
        match RationalOracle::default().interval(m, iv) {
            Ok(r) => return Ok(big_rational_to_f64(&r)),
            Err(Error::Capacity { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    interval_prob(m, iv)
}

/// Randomised dominance checks of the Bienaymé-Chebyshev, Markov and
/// exponential bounds, the 1911 lower bound and the Uspensky bracket.
pub fn dominance_suite(cases: usize, seed: u64, certify: bool) -> Result<DominanceReport> {
    let mut rng = SplitMix64::new(seed);
    let mut report = DominanceReport::default();
    let mut done = 0;
    while done < cases {
        let n = 30 + (rng.next_f64() * 4970.0) as u64;
        let k = 1 + (rng.next_f64() * 98.0) as i128;
        let m = BinomialModel::new(n, Rational::new(k, 100))?;
        let (np, sd) = (m.mean_f64(), m.sd());
        let a = (0.2 + 2.8 * rng.next_f64()) * sd;
        let label = |what: &str| format!("{what} n={n} p={k}/100 a={a:.4}");

        // P(|X - np| >= a)
        let inside = exact_interval(&m, (np - a).floor() as i64 + 1, (np + a).ceil() as i64 - 1, certify)?;
        let outside = 1.0 - inside;
        let cheb = bienayme_chebyshev_bound(m.variance(), a)?;
        report.record(cheb.holds_for(outside), || label("bienayme"));

        // P(X >= np + a)
        let k_hi = (np + a).ceil() as i64;
        let tail = exact_interval(&m, k_hi, n as i64, certify)?;
        report.record(markov_inequality(np, np + a)?.holds_for(tail), || label("markov"));
        report.record(bernstein_exponential_bound(&m, a)?.holds_for(tail), || label("exponential"));

        if m.variance() >= 25.0 {
            let t1 = -3.0 + 5.0 * rng.next_f64();
            let t2 = t1 + 0.1 + 3.0 * rng.next_f64();
            let range = StandardizedRange::new(t1, t2)?;
            let bracket = uspensky_bracket(&m, &range)?;
            let exact = exact_interval(&m, (np + t1 * sd).ceil() as i64, (np + t2 * sd).floor() as i64, certify)?;
            report.record(bracket.contains(exact), || label(&format!("uspensky t=({t1:.3},{t2:.3})")));
        }
        done += 1;
    }
    // 1911 bound: n = 2h - 1 and z = (j - 1/2)/sqrt(h)
    for h in [20u64, 50, 100, 333, 1000] {
        for j in [2u64, 5, 9, 14] {
            let n = 2 * h - 1;
            let z = (j as f64 - 0.5) / (h as f64).sqrt();
            if let Ok(b) = bernstein_1911_lower(n, z) {
                let m = BinomialModel::new(n, Rational::new(1, 2))?;
                let exact = exact_interval(&m, b.event.lo, b.event.hi, certify)?;
                report.record(b.bound.holds_for(exact), || format!("bernstein1911 n={n} j={j}"));
            }
        }
    }
    Ok(report)
}

/// Containment of the shifted-range event in the 1924 bracket, at both ends
/// `alpha = -1` and `alpha = +1`.
pub fn bernstein_1924_suite() -> Result<DominanceReport> {
    let mut report = DominanceReport::default();
    for (n, p, t) in [(2000u64, "1/2", 1.0), (2500, "2/5", 2.0), (4000, "3/10", 2.5), (6520, "3/5", 3.0), (8000, "9/20", 1.5)] {
        let m = model(n, p)?;
        let bracket = bernstein_1924_bracket(&m, t)?;
        for alpha in [-1.0, 1.0] {
            let exact = match bernstein_1924_event(&m, t, alpha) {
                Some(iv) => interval_prob(&m, iv)?,
                None => 0.0,
            };
            report.record(bracket.contains(exact), || {
                format!("n={n} p={p} t={t} alpha={alpha}: exact {exact:.9} outside [{:.9}, {:.9}]", bracket.lo, bracket.hi)
            });
        }
    }
    Ok(report)
}

fn bound_rows(rows: &mut Vec<ReportRow>) -> Result<()> {
    let b1911 = bernstein_1911_lower(199, 2.25)?;
    rows.push(ReportRow::check("bound.bernstein1911", "2 Phi(2.25 sqrt 2) - 1", b1911.bound.value, 0.9985373, 1e-7));
    let exact = interval_prob(&model(199, "1/2")?, b1911.event)?;
    rows.push(ReportRow::flag("bound.bernstein1911_below_exact", "bound <= P(77 <= X <= 122)", b1911.bound.holds_for(exact)));

    let suite = dominance_suite(100, DEFAULT_SEED, false)?;
    rows.push(ReportRow::flag(
        "bound.dominance_suite",
        &format!("{} randomised bound checks", suite.checked),
        suite.failures.is_empty(),
    ));
    let b1924 = bernstein_1924_suite()?;
    rows.push(ReportRow::flag(
        "approx.bernstein1924_contains",
        &format!("{} shifted-event checks", b1924.checked),
        b1924.failures.is_empty(),
    ));
    Ok(())
}

fn uspensky_rows(rows: &mut Vec<ReportRow>) -> Result<()> {
    let m = model(6520, "3/5")?;
    let bracket = uspensky_bracket(&m, &StandardizedRange::around_mean(&m, 0.02 * 6520.0)?)?;
    rows.push(ReportRow::flag("approx.uspensky_contains_6520", "bracket contains 0.9990309", bracket.contains(0.9990309)));
    rows.push(ReportRow::flag("approx.uspensky_omega", "omega_bound <= 1.6e-4", bracket.omega_bound <= 1.6e-4));
    let rejected = matches!(
        uspensky_bracket(&model(99, "1/2")?, &StandardizedRange::symmetric(1.0)?),
        Err(Error::Precondition(_))
    );
    rows.push(ReportRow::flag("approx.uspensky_rejects_small_npq", "npq = 24.75 rejected", rejected));
    Ok(())
}

pub fn bernstein_inversion_suite() -> Result<DominanceReport> {
    let mut report = DominanceReport::default();
    for (n, n0, w) in [(10000u64, 100u64, 0.1), (2000, 50, 0.15), (500, 10, 0.3), (50000, 1000, 0.05), (300, 299, 0.2)] {
        let bound = bernstein_inversion_bound(n, n0, w)?;
        for m in [0, n / 7, n / 4, n / 2, n - n / 3, n] {
            let p = posterior_interval_exact(&PosteriorSpec::uniform(m, n - m), &CredibleQuery::HalfWidth(w))?;
            report.record(p >= bound.value, || format!("n={n} n0={n0} w={w} m={m}: {p} < {}", bound.value));
        }
    }
    Ok(report)
}

fn bayes_rows(rows: &mut Vec<ReportRow>) -> Result<()> {
    let normal = posterior_normal_interval(110312, 215599, 0.50715, 0.51615)?;
    rows.push(ReportRow::check("bayes.posterior_normal", "normal posterior r=110312 n=215599", normal, 0.9999709, 1e-6));
    rows.push(ReportRow::reference_only("ref.chebyshev_0.99996980", "normal posterior vs Chebyshev's table value", normal, 0.99996980, 0.0));
    let suite = bernstein_inversion_suite()?;
    rows.push(ReportRow::flag(
        "bayes.bernstein_inversion_dominance",
        &format!("{} posterior checks", suite.checked),
        suite.failures.is_empty(),
    ));
    Ok(())
}

fn guarantee_rows(rows: &mut Vec<ReportRow>) -> Result<()> {
    let big = BernoulliProblem::new(30, 20, 1000.0)?;
    let n = bernoulli_1713_n(&big).n;
    rows.push(ReportRow::flag(
        "guarantee.bernoulli_30_20_1000",
        &format!("deviation_prob at N={n} >= 1000/1001"),
        dev(n)? >= big.confidence(),
    ));
    let small = BernoulliProblem::new(3, 2, 2.0)?;
    let n_small = bernoulli_1713_n(&small).n;
    let exact = RationalOracle::default().deviation(&model(n_small, "3/5")?, &DeviationQuery::new(Rational::new(1, 5))?)?;
    rows.push(ReportRow::flag(
        "guarantee.bernoulli_3_2_2",
        &format!("exact rational at N={n_small} >= 2/3"),
        big_rational_to_f64(&exact) >= small.confidence(),
    ));
    let cheb = chebyshev_1846_n(&ChebyshevProblem::new(0.6, 0.02, 1.0 / 1001.0)?)?;
    rows.push(ReportRow::flag(
        "guarantee.chebyshev1846",
        &format!("deviation_prob at n={} >= 1000/1001", cheb.n_min),
        dev(cheb.n_min)? >= 1.0 - 1.0 / 1001.0,
    ));
    Ok(())
}

pub fn demo_schemes() -> Vec<SchemeSpec> {
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

pub fn two_state_chain() -> SchemeSpec {
    SchemeSpec::FiniteMarkov {
        matrix: vec![vec![0.7, 0.3], vec![0.4, 0.6]],
        initial: vec![1.0, 0.0],
        values: vec![0.0, 1.0],
    }
}

/// `(theoretical Var S, sample variance, Monte Carlo standard error)`.
pub fn markov_variance_check(size: u64, replicates: u64, seed: u64) -> Result<(f64, f64, f64)> {
    let chain = two_state_chain();
    let run = simulate_replicates(&chain, size, replicates, None, seed)?;
    let r = replicates as f64;
    let mean = run.replicate_sums.iter().sum::<f64>() / r;
    let centred: Vec<f64> = run.replicate_sums.iter().map(|s| (s - mean) * (s - mean)).collect();
    let var = centred.iter().sum::<f64>() / (r - 1.0);
    let fourth = centred.iter().map(|c| c * c).sum::<f64>() / r;
    // sd of the sample variance from the fourth central moment
    let se = ((fourth - var * var) / r).sqrt();
    Ok((theoretical_var_sum(&chain, size)?, var, se))
}

fn simulation_rows(rows: &mut Vec<ReportRow>) -> Result<()> {
    let schemes = demo_schemes();
    let a = simulate_replicates(&schemes[4], 2000, 20, Some(0.02), DEFAULT_SEED)?;
    let b = simulate_replicates(&schemes[4], 2000, 20, Some(0.02), DEFAULT_SEED)?;
    rows.push(ReportRow::flag("sim.determinism", "identical seeds give identical runs", a == b));
    for scheme in &schemes {
        let cert = lln_certificate(scheme, 0.02, 10_000, 1000, DEFAULT_SEED)?;
        rows.push(ReportRow::flag(
            &format!("sim.lln_{}", scheme.name()),
            "frequency <= Chebyshev bound + 3 SE",
            cert.holds(),
        ));
    }
    let (theory, sample, se) = markov_variance_check(100, 100_000, DEFAULT_SEED)?;
    rows.push(ReportRow::check("sim.markov_var_sum", "sample Var(S_100) vs exact, 3 SE", sample, theory, 3.0 * se));
    let demo = pairwise_independence_demo();
    let identities = demo.covariances.iter().all(|c| c == "0")
        && demo.pairwise_independent
        && !demo.mutually_independent
        && demo.var_of_sum == demo.sum_of_vars;
    rows.push(ReportRow::flag("sim.pairwise_identities", "XOR triple: pairwise but not mutually independent", identities));
    Ok(())
}

/// Mean of `error(2n)/error(n)` for the continuity-corrected value at
/// `p = 1/2` on `n = 200, 400, 800, 1600` with lattice-aligned ranges.
pub fn laplace_error_trend() -> Result<f64> {
    let mut errors = Vec::new();
    for n in [200u64, 400, 800, 1600] {
        let m = model(n, "1/2")?;
        let k = (1.5 * m.sd()).round();
        let c = n as i64 / 2;
        let exact = interval_prob(&m, IntegerInterval::new(c - k as i64, c + k as i64)?)?;
        errors.push((laplace_corrected(&m, k / m.sd())? - exact).abs());
    }
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[1] / w[0]).collect();
    Ok(ratios.iter().sum::<f64>() / ratios.len() as f64)
}

fn trend_rows(rows: &mut Vec<ReportRow>) -> Result<()> {
    let trend = laplace_error_trend()?;
    rows.push(ReportRow::check("approx.laplace_error_trend", "mean error ratio on doubling n (<= 0.75)", trend, 0.375, 0.375));
    Ok(())
}

fn reference_rows(rows: &mut Vec<ReportRow>) -> Result<()> {
    let m = model(14000, "18/35")?;
    let outside = lower_tail(&m, 7036) + upper_tail(&m, 7364);
    rows.push(ReportRow::reference_only("ref.nicolaus_1_over_44.58", "1 - P(7037 <= X <= 7363)", outside, 1.0 / 44.58, 0.0));
    let t = 163.0 / m.sd();
    let corrected = laplace_corrected(&m, t)?;
    rows.push(ReportRow::reference_only("ref.laplace_0.994505", "continuity-corrected normal, Nicolaus case", corrected, 0.994505, 0.0));
    rows.push(ReportRow::reference_only("ref.de_morgan_0.99433", "continuity-corrected normal, Nicolaus case", corrected, 0.99433, 0.0));
    rows.push(ReportRow::reference_only("ref.plain_normal_nicolaus", "plain normal, Nicolaus case", normal_two_sided(t), 0.9943058, 0.0));
    Ok(())
}

/// All rows, sorted by id.
pub fn reproduce_rows() -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    exact_rows(&mut rows)?;
    inversion_rows(&mut rows)?;
    bound_rows(&mut rows)?;
    uspensky_rows(&mut rows)?;
    bayes_rows(&mut rows)?;
    guarantee_rows(&mut rows)?;
    simulation_rows(&mut rows)?;
    trend_rows(&mut rows)?;
    reference_rows(&mut rows)?;
    rows.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(rows)
}
