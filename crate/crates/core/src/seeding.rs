//! Counter-based deterministic random streams.
//!
//! A single master seed fans out to one independent ChaCha stream per
//! (domain, index) pair. Streams are pure functions of their key, so
//! simulation blocks and Monte-Carlo trials can run in parallel and still
//! produce bit-identical results regardless of scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent consumers of randomness within one simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamDomain {
    /// Channel gains for a coherence block.
    Channel = 1,
    /// Estimation noise on the forward (Alice -> Bob) probe.
    NoiseForward = 2,
    /// Estimation noise on the reverse (Bob -> Alice) probe.
    NoiseReverse = 3,
    /// Reflection coefficients of the surface, per surface time block.
    Reflection = 4,
    /// Monte-Carlo trial streams.
    Trial = 5,
    /// Per-block timing offsets (surface clock phase).
    Timing = 6,
    /// Miscellaneous scenario sampling (scatterer placement and similar).
    Scatter = 7,
}

/// ChaCha stream keyed by `(master, domain, index)`.
///
/// The domain tag occupies the top bits of the stream id and `index` the
/// low 48, so up to 2^48 blocks/trials per domain never collide.
pub fn stream(master: u64, domain: StreamDomain, index: u64) -> ChaCha8Rng {
    debug_assert!(index < (1 << 48), "stream index exceeds 48 bits");
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(((domain as u64) << 48) | index);
    rng
}
