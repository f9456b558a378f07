//! Monte Carlo estimate of the bit error of a signalling protocol.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::SignallingProtocol;
use crate::error::{Error, Result};

/// Trials per random substream.
const CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignalStats {
    pub block_size: usize,
    pub trials: usize,
    pub error_rate: f64,
    pub stderr: f64,
}

/// Each trial sends one uniformly random bit `b`: the sender measures
/// (`b = 1`) or not, and the receiver counts detections in `C` over `block`
/// independent repetitions, each with probability `ν(C|b)`, then decodes by
/// thresholding the frequency at the midpoint of `ν(C|0)` and `ν(C|1)`.
///
/// Trials are split into fixed chunks with their own ChaCha substream, so the
/// result depends only on `seed`, not on the thread count.
pub fn simulate_signalling(proto: &SignallingProtocol, trials: usize, block: usize, seed: u64) -> Result<SignalStats> {
    let (p0, p1) = (proto.nu0_c, proto.nu1_c);
    if !(p0 - p1 > 0.0) || !(proto.channel_gap > 0.0) {
        return Err(Error::ZeroGap);
    }
    if trials == 0 || block == 0 {
        return Err(Error::OutOfRange {
            name: "trials",
            value: trials.min(block) as f64,
        });
    }
    let mid = 0.5 * (p0 + p1);
    let chunks = trials.div_ceil(CHUNK);
    let errors: Vec<usize> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let n = CHUNK.min(trials - chunk * CHUNK);
            let mut wrong = 0;
            for _ in 0..n {
                let bit: bool = rng.gen();
                let p = if bit { p1 } else { p0 };
                let hits = (0..block).filter(|_| rng.gen_bool(p.clamp(0.0, 1.0))).count();
                let freq = hits as f64 / block as f64;
                // ν(C|1) < ν(C|0): a low count means the sender acted
                let decoded = freq < mid;
                wrong += usize::from(decoded != bit);
            }
            wrong
        })
        .collect();
    let rate = errors.iter().sum::<usize>() as f64 / trials as f64;
    Ok(SignalStats {
        block_size: block,
        trials,
        error_rate: rate,
        stderr: (rate * (1.0 - rate) / trials as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::Region;
    use crate::spacetime::Event;

    fn proto(p0: f64, p1: f64) -> SignallingProtocol {
        SignallingProtocol {
            k: Region::interval(-1.0, 1.0),
            c: Region::point(&[5.0]),
            q: Event::new(2.0, vec![5.0]),
            senders: vec![Event::new(-2.0, vec![0.0])],
            channel_gap: (p0 - p1).max(0.0),
            nu0_c: p0,
            nu1_c: p1,
            s: 0.0,
            t: 1.0,
            cover_cells: vec![],
        }
    }

    #[test]
    fn perfect_channel() {
        let r = simulate_signalling(&proto(1.0, 0.0), 1000, 1, 7).unwrap();
        assert_eq!(r.error_rate, 0.0);
    }

    #[test]
    fn zero_gap_is_rejected() {
        assert!(matches!(simulate_signalling(&proto(0.5, 0.5), 10, 1, 0), Err(Error::ZeroGap)));
    }

    #[test]
    fn reproducible_for_a_seed() {
        let p = proto(0.6, 0.4);
        let a = simulate_signalling(&p, 5000, 5, 11).unwrap();
        let b = simulate_signalling(&p, 5000, 5, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.error_rate > 0.0);
    }
}
