//! A CE violation that keeps A1 forces a signalling witness: a set outside
//! the future of K whose probability drops after a click.

use causal_lab::conditions::{check_a1, check_ce_at_k, find_ns_witness, make_abc_scenario};
use causal_lab::Exact;

fn main() -> causal_lab::Result<()> {
    for a in [Exact::from_integer(0), Exact::new(1, 4), Exact::new(2, 5)] {
        let sc = make_abc_scenario(a, Exact::from_integer(1), Exact::new(1, 3))?;
        println!("A = {a}: a1={} ce={}", check_a1(&sc)?, check_ce_at_k(&sc)?);
        if let Some(w) = find_ns_witness(&sc)? {
            let (p0, p1) = (sc.nu0.mass(&w)?, sc.nu1.mass(&w)?);
            println!("  witness {:?}: ν(C|0) = {p0}, ν(C|1) = {p1}", w.boxes());
        }
    }
    Ok(())
}
