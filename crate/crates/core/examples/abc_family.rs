//! The two-point measurement family: every realisable pattern of
//! (NS, A1, A2, CE), evaluated with exact rationals.

use causal_lab::conditions::{evaluate_conditions, make_abc_scenario, truth_table};
use causal_lab::transport::Method;
use causal_lab::Exact;

fn mark(b: bool) -> char {
    if b {
        'T'
    } else {
        'F'
    }
}

fn main() -> causal_lab::Result<()> {
    println!("NS A1 A2 CE | samples (A, B, C)");
    for row in truth_table()? {
        let e = row.expected;
        let samples: Vec<String> = row
            .samples
            .iter()
            .map(|s| format!("({}, {}, {})", s.abc[0], s.abc[1], s.abc[2]))
            .collect();
        print!("{}  {}  {}  {}  | {}", mark(e[0]), mark(e[1]), mark(e[2]), mark(e[3]), samples.join(" "));
        if let Some(err) = &row.erratum {
            let v = err.verdict;
            print!(
                "  [erratum ({}, {}, {}) gives {}{}{}{}]",
                err.abc[0],
                err.abc[1],
                err.abc[2],
                mark(v[0]),
                mark(v[1]),
                mark(v[2]),
                mark(v[3])
            );
        }
        println!("{}", if row.reproduced() { "" } else { "  MISMATCH" });
    }

    let sc = make_abc_scenario(Exact::new(1, 2), Exact::new(3, 4), Exact::new(1, 4))?;
    let r = evaluate_conditions(&sc, Method::Maxflow)?;
    println!("\n(1/2, 3/4, 1/4): ns={} a1={} a2={} ce={}", r.ns, r.a1, r.a2, r.ce);
    for d in &r.diagnostics {
        println!("  {d}");
    }
    Ok(())
}
