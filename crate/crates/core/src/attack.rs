//! Reflection schedules: how the surface's diagonal reflection matrix
//! evolves over time for each operating mode.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use thiserror::Error;

use crate::seeding::{stream, StreamDomain};

#[derive(Debug, Error, PartialEq)]
pub enum AttackError {
    #[error("schedule mode {0:?} has no update period")]
    NotAsynchronous(AttackMode),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
}

/// Operating mode of the surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttackMode {
    /// No surface present: the reflection vector is identically zero.
    NoRis,
    /// Honest surface: one constant random configuration, identical in
    /// both link directions.
    Benign,
    /// Non-reciprocal hardware: the forward direction sees the fixed
    /// configuration, the reverse direction is isolated (zero vector).
    AsymmetricStructure,
    /// The surface re-randomizes on its own clock with period `T_r`,
    /// independently of the probing protocol.
    AsyncConfig,
}

/// How per-element coefficients are randomized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AmplitudeMode {
    /// `lambda_i = sqrt(beta) e^{j phi}`, phase uniform on `[0, 2 pi)`.
    ContinuousPhase,
    /// `lambda_i = sqrt(beta) e^{j 0}` or `sqrt(beta) e^{j pi}`, equally likely.
    OneBitPhase,
}

/// Link direction of a probe transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Reverse,
}

/// Time-indexed description of the surface's reflection coefficients.
///
/// Draws come from a counter-based stream keyed by `(seed, time block)`,
/// so evaluations at equal times agree with no shared state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReflectionSchedule {
    pub mode: AttackMode,
    /// Update period in seconds (asynchronous mode only).
    #[serde(rename = "T_r", default, skip_serializing_if = "Option::is_none")]
    pub t_r: Option<f64>,
    /// Initial temporal deviation between the surface clock and the
    /// probing clock, in seconds.
    #[serde(default)]
    pub t_delta: f64,
    pub amplitude_mode: AmplitudeMode,
    /// Per-element power `E{|lambda_i|^2}`.
    pub beta: f64,
    /// Key of the schedule's random stream.
    #[serde(default)]
    pub seed: u64,
}

impl ReflectionSchedule {
    pub fn new(mode: AttackMode, beta: f64, seed: u64) -> Self {
        Self {
            mode,
            t_r: None,
            t_delta: 0.0,
            amplitude_mode: AmplitudeMode::ContinuousPhase,
            beta,
            seed,
        }
    }

    pub fn asynchronous(t_r: f64, t_delta: f64, beta: f64, seed: u64) -> Self {
        Self {
            mode: AttackMode::AsyncConfig,
            t_r: Some(t_r),
            t_delta,
            amplitude_mode: AmplitudeMode::ContinuousPhase,
            beta,
            seed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_t_delta(mut self, t_delta: f64) -> Self {
        self.t_delta = t_delta;
        self
    }

    pub fn validate(&self) -> Result<(), AttackError> {
        if !(self.beta >= 0.0) {
            return Err(AttackError::InvalidSchedule(format!(
                "beta must be non-negative, got {}",
                self.beta
            )));
        }
        if self.mode == AttackMode::AsyncConfig {
            match self.t_r {
                Some(t_r) if t_r > 0.0 => {}
                other => {
                    return Err(AttackError::InvalidSchedule(format!(
                        "asynchronous mode requires T_r > 0, got {other:?}"
                    )))
                }
            }
        }
        Ok(())
    }

    fn draw(&self, m: usize, block: u64) -> Vec<Complex64> {
        let mut rng = stream(self.seed, StreamDomain::Reflection, block);
        let amp = self.beta.sqrt();
        (0..m)
            .map(|_| {
                let lambda = match self.amplitude_mode {
                    AmplitudeMode::ContinuousPhase => {
                        Complex64::from_polar(amp, rng.random_range(0.0..TAU))
                    }
                    AmplitudeMode::OneBitPhase => {
                        let phase = if rng.random::<bool>() { 0.0 } else { PI };
                        Complex64::from_polar(amp, phase)
                    }
                };
                debug_assert!((lambda.norm_sqr() - self.beta).abs() <= 1e-12 * self.beta.max(1.0));
                lambda
            })
            .collect()
    }

    /// Index of the surface time block containing instant `t`.
    pub fn block_index(&self, t: f64) -> u64 {
        match self.t_r {
            Some(t_r) => ((t + self.t_delta) / t_r).floor().max(0.0) as u64,
            None => 0,
        }
    }

    /// Reflection vector seen by a transmission at time `t` in the given
    /// direction.
    pub fn lambda_at(&self, m: usize, t: f64, direction: Direction) -> Vec<Complex64> {
        match self.mode {
            AttackMode::NoRis => vec![Complex64::ZERO; m],
            AttackMode::Benign => self.draw(m, 0),
            AttackMode::AsymmetricStructure => match direction {
                Direction::Forward => self.draw(m, 0),
                Direction::Reverse => vec![Complex64::ZERO; m],
            },
            AttackMode::AsyncConfig => self.draw(m, self.block_index(t)),
        }
    }
}

/// Probability that the surface reconfigures between the ping and the
/// pong of one probing round: `min(f_r / f_p, 1)` under a uniformly
/// random phase offset between the two clocks.
pub fn corruption_probability(t_p: f64, sched: &ReflectionSchedule) -> Result<f64, AttackError> {
    if sched.mode != AttackMode::AsyncConfig {
        return Err(AttackError::NotAsynchronous(sched.mode));
    }
    if !(t_p > 0.0) {
        return Err(AttackError::InvalidSchedule(format!("T_p must be positive, got {t_p}")));
    }
    let t_r = sched.t_r.expect("validated asynchronous schedule");
    Ok((t_p / t_r).min(1.0))
}

/// Fraction of probing rounds whose two probes observed different
/// reflection vectors, measured over `rounds` rounds with a fresh
/// uniformly random clock offset per round.
pub fn measure_corruption_fraction<R: Rng + ?Sized>(
    t_p: f64,
    t_r: f64,
    m: usize,
    rounds: usize,
    beta: f64,
    rng: &mut R,
) -> f64 {
    let mut corrupted = 0usize;
    for round in 0..rounds {
        let t_delta = rng.random_range(0.0..t_r);
        let sched = ReflectionSchedule::asynchronous(t_r, t_delta, beta, rng.random());
        let t1 = round as f64 * t_p;
        let fwd = sched.lambda_at(m, t1, Direction::Forward);
        let rev = sched.lambda_at(m, t1 + t_p, Direction::Reverse);
        if fwd != rev {
            corrupted += 1;
        }
    }
    corrupted as f64 / rounds as f64
}
