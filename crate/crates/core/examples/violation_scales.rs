//! Length scales at which Gaussian spreading would visibly outrun light.

use causal_lab::quantum::{min_violation_halfwidth, Constants};

fn main() -> causal_lab::Result<()> {
    let si = Constants::si();
    for (name, m, lambda) in [
        ("electron, 1 µm", 9.109_383_7e-31, 1e-6),
        ("BEC atom, 1 µm", 1e-26, 1e-6),
        ("C60, 10 nm", 1.2e-24, 1e-8),
    ] {
        let r = min_violation_halfwidth(m, lambda, f64::INFINITY, &si)?;
        println!("{name:16} ℓ ≳ {:.3e} m   (Compton {:.3e} m)", r.ell_min_asymptotic, r.compton);
    }
    let r = min_violation_halfwidth(1e-26, 1e-6, 1e-3, &si)?;
    println!("BEC atom after 1 ms: ell_min = {:.3e} m", r.ell_min.unwrap());
    Ok(())
}
