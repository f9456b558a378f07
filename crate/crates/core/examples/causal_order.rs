//! Light-cone predicates and boosts in 1+1 dimensions.

use causal_lab::spacetime::{boost, causally_precedes, interval, spacelike_separated};
use causal_lab::{BoostedFrame, CausalStructure, Event};

fn main() -> causal_lab::Result<()> {
    let cs = CausalStructure::natural(1);
    let a = Event::new(0.0, vec![0.0]);
    let b = Event::new(0.5, vec![2.5]);
    println!("interval(a, b) = {}", interval(&a, &b, &cs)?);
    println!("a ⪯ b: {}", causally_precedes(&a, &b, &cs)?);
    println!("spacelike: {}", spacelike_separated(&a, &b, &cs)?);

    for v in [0.0, 0.1, 0.2, 0.5, 0.8] {
        let f = BoostedFrame::new(v, 0, &cs)?;
        let (a2, b2) = (boost(&a, &f, &cs)?, boost(&b, &f, &cs)?);
        println!("v = {v:.1}: t'(a) = {:+.4}, t'(b) = {:+.4}", a2.t, b2.t);
    }
    Ok(())
}
