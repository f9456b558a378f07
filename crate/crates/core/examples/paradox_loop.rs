//! Two signalling channels, one of them carried in a moving frame, send a
//! reply into the causal past of the original message.

use causal_lab::protocol::round_trip;
use causal_lab::spacetime::causally_precedes;
use causal_lab::{BoostedFrame, CausalStructure, Event};

fn main() -> causal_lab::Result<()> {
    let cs = CausalStructure::natural(1);
    let send = Event::new(0.0, vec![0.0]);
    let receive = Event::new(0.5, vec![2.5]);
    for v in [0.0, 0.3, 0.8] {
        let rt = round_trip(&send, &receive, &BoostedFrame::new(v, 0, &cs)?, &cs)?;
        println!(
            "v = {v}: reply at (t={:+.3}, x={:+.3}), reply ⪯ send: {} (closed loop: {})",
            rt.reply.t,
            rt.reply.x[0],
            causally_precedes(&rt.reply, &send, &cs)?,
            rt.loop_closed
        );
    }
    Ok(())
}
