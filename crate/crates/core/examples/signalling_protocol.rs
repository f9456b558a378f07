//! From a no-signalling violation to a working channel: build the sender
//! set and readout region, audit it, and estimate bit error rates.

use causal_lab::conditions::{find_ns_witness, make_abc_scenario};
use causal_lab::protocol::{abc_lattice, annulus_scenario, construct_protocol, simulate_signalling, single_senders};
use causal_lab::Exact;

fn main() -> causal_lab::Result<()> {
    let sc = make_abc_scenario(Exact::from_integer(0), Exact::from_integer(1), Exact::from_integer(1))?;
    let w = find_ns_witness(&sc)?.expect("NS fails");
    let proto = construct_protocol(&sc, &w, &abc_lattice())?;
    println!(
        "abc(0,1,1): {} sender(s) at {:?}, q = {:?}, gap {}",
        proto.k_count(),
        proto.senders,
        proto.q,
        proto.channel_gap
    );
    println!("  audit ok: {}", proto.audit(&sc.cs)?.ok());

    let (ann, lattice) = annulus_scenario()?;
    let w = find_ns_witness(&ann)?.expect("NS fails");
    let ring = construct_protocol(&ann, &w, &lattice)?;
    let singles = single_senders(&ann.k, &ring.q, ring.s, &lattice, &ann.cs)?;
    println!(
        "annulus: {} senders, single-sender candidates {}, audit ok: {}",
        ring.k_count(),
        singles.len(),
        ring.audit(&ann.cs)?.ok()
    );

    let mut weak = ring.clone();
    weak.nu1_c = weak.nu0_c * 0.8;
    weak.channel_gap = weak.nu0_c - weak.nu1_c;
    for n in [1, 5, 25, 125] {
        let s = simulate_signalling(&weak, 20_000, n, 7)?;
        println!("  gap {:.2}, block {n:3}: error {:.4} ± {:.4}", weak.channel_gap, s.error_rate, s.stderr);
    }
    Ok(())
}
