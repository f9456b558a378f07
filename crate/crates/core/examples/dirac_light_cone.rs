//! Dirac evolution of compactly supported data stays inside the light cone;
//! free Schrödinger evolution of the same data does not.

use causal_lab::quantum::{
    born_measure, evolve_dirac_1p1, evolve_schrodinger_free, smooth_bump, Constants, DiracPacket, Grid1d,
    WavePacket,
};
use causal_lab::Region;
use num_complex::Complex64;

fn main() -> causal_lab::Result<()> {
    let k = Constants::natural();
    let g = Grid1d::symmetric(20.0, 4096)?;
    let bump = smooth_bump(&g, 0.0, 1.0);
    let dirac = DiracPacket::from_components(g, bump.clone(), vec![Complex64::new(0.0, 0.0); g.n], 1.0, k)?;
    let schr = WavePacket::from_amplitudes(g, bump, 1.0, k)?;
    println!("   t   outside j+(supp): Dirac    Schrödinger");
    for t in [0.25, 0.5, 1.0, 2.0, 5.0] {
        let cone = Region::interval(-1.0 - t, 1.0 + t);
        let d = (1.0 - born_measure(&evolve_dirac_1p1(&dirac, t)?, t)?.mass(&cone)?).max(0.0);
        let s = 1.0 - born_measure(&evolve_schrodinger_free(&schr, t)?, t)?.mass(&cone)?;
        println!("{t:5.2}   {d:>22.2e}    {s:.2e}");
    }
    Ok(())
}
