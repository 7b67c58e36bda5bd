use lln::approx::{
    bernstein_1924_bracket, demoivre_clt, laplace_corrected, local_normal_pmf, skew_corrected_tail_1914,
    uspensky_bracket, StandardizedRange,
};
use lln::exact::{pmf, upper_tail};
use lln::BinomialModel;

fn main() -> lln::Result<()> {
    let births = BinomialModel::parse(14000, "18/35")?;
    let range = StandardizedRange::around_mean(&births, 163.0)?;
    println!("plain normal        {:.7}", demoivre_clt(&range));
    println!("continuity-corrected {:.7}", laplace_corrected(&births, range.t2())?);

    let m = BinomialModel::parse(6520, "0.6")?;
    let b = uspensky_bracket(&m, &StandardizedRange::around_mean(&m, 0.02 * 6520.0)?)?;
    println!("Uspensky: {:.7} +- {:.3e}", b.center, b.omega_bound);

    let z = 0.02 * 6520.0 / (2.0 * m.variance()).sqrt();
    let tail = skew_corrected_tail_1914(&m, z)?;
    println!(
        "P(X > 0.62 n): plain {:.3e}, skew-corrected {:.3e}, exact {:.3e}",
        tail.plain,
        tail.value,
        upper_tail(&m, 4043)
    );

    let wide = BinomialModel::parse(8000, "9/20")?;
    let b = bernstein_1924_bracket(&wide, 1.5)?;
    println!("1924 bracket [{:.8}, {:.8}]", b.lo, b.hi);

    println!("local: {:.6} vs exact {:.6}", local_normal_pmf(&m, 3912)?, pmf(&m, 3912)?);
    Ok(())
}
