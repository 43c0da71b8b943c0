//! Deterministic stream-splitting random number generation.
//!
//! Every stochastic run is keyed by a single `u64` session seed. Independent
//! substreams are carved out of the ChaCha12 stream space by the rule
//!
//! ```text
//! stream id = (trial index << 16) | role id
//! ```
//!
//! so each (trial, role) pair draws from its own counter-mode keystream and
//! results are bit-reproducible regardless of scheduling — trials may be
//! evaluated in any order or on any number of worker threads without
//! perturbing one another.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Fixed role ids for per-party substreams inside one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamRole {
    /// Key generation, payload sampling, and seal selection.
    Sender,
    /// Receiver-side measurement randomness.
    Receiver,
    /// Attacker spoof and guess draws.
    Attacker,
    /// Noise on hop `h` (sender→first node is hop 0).
    Channel(u16),
    /// Measurement randomness of relay node `r` (first relay is 0).
    Relay(u16),
    /// Harness-level draws that belong to no party (e.g. payload choice).
    Harness,
}

impl StreamRole {
    fn id(self) -> u64 {
        match self {
            StreamRole::Sender => 0,
            StreamRole::Receiver => 1,
            StreamRole::Attacker => 2,
            StreamRole::Harness => 3,
            // Channels occupy 16..4096 and relays 4096.. in the 16-bit
            // role space; the asserts keep the bands disjoint.
            StreamRole::Channel(h) => {
                assert!(h < 4080, "channel role {h} exceeds the role band");
                16 + u64::from(h)
            }
            StreamRole::Relay(r) => {
                assert!(r < 61440 - 4096, "relay role {r} exceeds the role band");
                4096 + u64::from(r)
            }
        }
    }
}

/// The generator for one (seed, trial, role) substream.
pub fn stream(seed: u64, trial: u64, role: StreamRole) -> ChaCha12Rng {
    assert!(trial < 1 << 48, "trial index exceeds the 48-bit substream space");
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream((trial << 16) | role.id());
    rng
}

/// Convenience stream for single-shot tools that need one generator.
pub fn root(seed: u64) -> ChaCha12Rng {
    stream(seed, 0, StreamRole::Harness)
}
