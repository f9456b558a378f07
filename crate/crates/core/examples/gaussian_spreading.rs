//! Free Schrödinger spreading of a Gaussian: the grid CE verdict on
//! `[−ℓ, ℓ]` against the closed-form threshold.

use causal_lab::quantum::{
    analytic_ce_gaussian, born_measure, evolve_schrodinger_free, gaussian_packet, min_violation_halfwidth,
    Constants, Grid1d,
};
use causal_lab::transport::{check_ce_within, Method};
use causal_lab::Region;

fn main() -> causal_lab::Result<()> {
    let k = Constants::natural();
    let cs = k.causal_structure()?;
    let (m, lambda, t) = (1.0, 1.0, 1.0);
    let report = min_violation_halfwidth(m, lambda, t, &k)?;
    let ell_min = report.ell_min.expect("finite time");
    println!("ell_min = {ell_min:.6} (1 + √2 = {:.6})", 1.0 + 2f64.sqrt());

    let grid = Grid1d::symmetric(40.0, 8192)?;
    let psi = gaussian_packet(lambda, 0.0, 0.0, grid, m, k)?;
    let out = evolve_schrodinger_free(&psi, t)?;
    let mu = born_measure(&psi, 0.0)?;
    let nu = born_measure(&out, t)?;
    for f in [0.5, 0.8, 1.2, 2.0] {
        let ell = f * ell_min;
        let v = check_ce_within(&mu, &nu, &Region::interval(-ell, ell), &cs, Method::Maxflow)?;
        println!(
            "ℓ = {f:.1}·ell_min: grid holds={} (deficit {:.3e}), analytic holds={}",
            v.holds,
            v.deficit,
            analytic_ce_gaussian(m, lambda, t, ell, &k)?
        );
    }
    Ok(())
}
