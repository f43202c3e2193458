//! Desk-scale simulation laboratory for channel-reciprocity-based key
//! generation (CRKG) in the presence of a hostile reconfigurable
//! intelligent surface (RIS).
//!
//! The crate models a two-party TDD probing link with a multipath direct
//! channel and a software-controlled reflecting surface, and provides:
//!
//! - [`scene`]: static geometry, Fresnel reflectivity, and per-path power
//!   gains, including the surface-placement gain map.
//! - [`channel`]: per-coherence-block random channel realizations and the
//!   assembled per-subcarrier frequency response.
//! - [`attack`]: time-indexed reflection schedules for the benign surface
//!   and the two jamming behaviours (asymmetric structure, asynchronous
//!   reconfiguration), plus the probe-corruption timing statistic.
//! - [`probing`]: paired bidirectional least-squares channel estimates.
//! - [`keyrate`]: closed-form secret key rates for the canonical cases,
//!   high-SNR gap approximations, and a Monte-Carlo mutual-information
//!   estimator that cross-validates them.
//! - [`crkg`]: key-material extraction: delay-domain separation,
//!   contaminated-path detection/removal, CDF quantization, and the full
//!   key-generation pipelines (plain, contaminated-path-removal,
//!   frequency-hopping).
//! - [`config`]: JSON scenario documents tying the above together.
//!
//! All randomness flows through counter-based deterministic streams
//! ([`seeding`]), so every simulation is reproducible bit-for-bit from a
//! single master seed, including under parallel execution.

pub mod attack;
pub mod channel;
pub mod config;
pub mod crkg;
pub mod keyrate;
pub mod probing;
pub mod scene;
pub mod seeding;

pub use config::SimConfig;
pub use scene::Scenario;

/// Propagation speed used to map path distances to delays, in m/s.
pub const SPEED_OF_LIGHT: f64 = 2.998e8;
