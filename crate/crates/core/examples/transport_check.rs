//! Causal-evolution check between two atomic slices, by max-flow and by
//! enumerating subsets.

use causal_lab::transport::{check_ce, Method};
use causal_lab::{CausalStructure, SliceMeasure};

fn main() -> causal_lab::Result<()> {
    let cs = CausalStructure::natural(1);
    let mu = SliceMeasure::from_atoms(0.0, vec![(vec![0.0], 0.5), (vec![1.5], 0.5)])?;
    let spread = SliceMeasure::from_atoms(1.0, vec![(vec![-0.5], 0.5), (vec![2.0], 0.5)])?;
    let jump = SliceMeasure::from_atoms(1.0, vec![(vec![0.9], 0.25), (vec![2.2], 0.75)])?;

    for (name, nu) in [("spread", &spread), ("jump", &jump)] {
        for method in [Method::Maxflow, Method::Bruteforce] {
            let v = check_ce(&mu, nu, &cs, method)?;
            println!(
                "{name:6} {method:?}: holds={} deficit={:.3} worst_set={:?}",
                v.holds, v.deficit, v.worst_set
            );
        }
    }
    Ok(())
}
