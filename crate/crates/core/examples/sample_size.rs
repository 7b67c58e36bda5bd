use lln::inversion::{minimal_n_clt, minimal_n_exact, minimal_n_worstcase, verify_window, PrecisionTarget};
use lln::Rational;

fn main() -> lln::Result<()> {
    let p = Rational::new(3, 5);
    let target = PrecisionTarget::from_odds(Rational::new(1, 50), 1000.0)?;

    let exact = minimal_n_exact(p, &target)?;
    println!("exact:          n = {} (P = {:.7})", exact.n_min, exact.criterion_at_n);
    let plain = minimal_n_clt(p, &target, false)?;
    println!("normal:         n = {} (raw {:.2})", plain.n_min, plain.raw.unwrap_or(f64::NAN));
    let corrected = minimal_n_clt(p, &target, true)?;
    println!("corrected:      n = {}", corrected.n_min);
    let worst = minimal_n_worstcase(&target)?;
    println!("any p:          n = {}", worst.n_min);

    // the exact probability oscillates, so a passing n need not be followed
    // by passing n + 1
    let after = verify_window(p, &target, exact.n_min, 40)?;
    println!("window from {}: holds = {}, first failure {:?}", exact.n_min, after.holds, after.first_failure);
    let safe = verify_window(p, &target, 6520, 10)?;
    println!("window 6520..6530: holds = {}", safe.holds);
    Ok(())
}
