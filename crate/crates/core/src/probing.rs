//! Bidirectional TDD channel probing.
//!
//! A probing round is one ping–pong exchange: Alice transmits at `t1`,
//! Bob replies at `t2 = t1 + T_p`, and each side forms a least-squares
//! channel estimate. At this abstraction level an LS estimate is the true
//! per-subcarrier response plus white complex Gaussian error of variance
//! `sigma^2 = 10^(-snr_db / 10)`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;
use thiserror::Error;

use crate::attack::{Direction, ReflectionSchedule};
use crate::channel::{complex_gaussian, frequency_response, ChannelError, ChannelRealization};
use crate::scene::Scenario;
use crate::seeding::{stream, StreamDomain};

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("probing round starting at t = {t1} s straddles a coherence-block boundary")]
    StraddlesCoherenceBlock { t1: f64 },
    #[error("invalid probe config: {0}")]
    InvalidConfig(String),
}

/// Probing protocol parameters. Field names are the on-disk JSON names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeConfig {
    /// Ping-to-pong delay `t2 - t1` in seconds.
    #[serde(rename = "T_p")]
    pub t_p: f64,
    /// Channel coherence time in seconds.
    #[serde(rename = "T_c")]
    pub t_c: f64,
    /// Probe pairs collected per coherence block.
    #[serde(rename = "N_p")]
    pub n_p: usize,
    /// Pilot-to-noise power ratio in dB; estimation error variance is
    /// `10^(-snr_db / 10)`.
    pub snr_db: f64,
    /// Offset of the first round from the block edge, in seconds.
    #[serde(default)]
    pub probe_offset: f64,
}

impl ProbeConfig {
    pub fn sigma2(&self) -> f64 {
        10f64.powf(-self.snr_db / 10.0)
    }

    pub fn validate(&self) -> Result<(), ProbeError> {
        let err = |m: String| Err(ProbeError::InvalidConfig(m));
        if !(self.t_p > 0.0) {
            return err(format!("T_p must be positive, got {}", self.t_p));
        }
        if !(self.t_p < self.t_c) {
            return err(format!("T_p = {} must be smaller than T_c = {}", self.t_p, self.t_c));
        }
        if self.n_p < 1 {
            return err("N_p must be at least 1".into());
        }
        if !(self.probe_offset >= 0.0) {
            return err(format!("probe_offset must be non-negative, got {}", self.probe_offset));
        }
        if self.probe_offset + self.n_p as f64 * self.t_p > self.t_c * (1.0 + 1e-12) {
            return err(format!(
                "N_p = {} rounds of T_p = {} s do not fit into one coherence block of T_c = {} s",
                self.n_p, self.t_p, self.t_c
            ));
        }
        Ok(())
    }
}

/// Paired bidirectional estimates for one coherence block; each matrix
/// holds one column of length `K` per probing round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSeries {
    /// Bob's estimates of the Alice -> Bob channel.
    pub h_ab: Vec<Vec<Complex64>>,
    /// Alice's estimates of the Bob -> Alice channel.
    pub h_ba: Vec<Vec<Complex64>>,
}

impl ProbeSeries {
    pub fn rounds(&self) -> usize {
        self.h_ab.len()
    }

    pub fn subcarriers(&self) -> usize {
        self.h_ab.first().map_or(0, Vec::len)
    }

    fn push_round(&mut self, ab: Vec<Complex64>, ba: Vec<Complex64>) {
        debug_assert_eq!(ab.len(), ba.len());
        debug_assert!(ab.iter().chain(&ba).all(|v| v.re.is_finite() && v.im.is_finite()));
        self.h_ab.push(ab);
        self.h_ba.push(ba);
    }

    /// Long-form CSV: `round,subcarrier,h_ab_re,h_ab_im,h_ba_re,h_ba_im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "round,subcarrier,h_ab_re,h_ab_im,h_ba_re,h_ba_im")?;
        for (n, (ab, ba)) in self.h_ab.iter().zip(&self.h_ba).enumerate() {
            for (k, (a, b)) in ab.iter().zip(ba).enumerate() {
                writeln!(w, "{},{},{},{},{},{}", n, k + 1, a.re, a.im, b.re, b.im)?;
            }
        }
        Ok(())
    }
}

/// Additive estimation noise with per-subcarrier variance `sigma2`.
fn noise_vector<R: Rng + ?Sized>(k: usize, sigma2: f64, rng: &mut R) -> Vec<Complex64> {
    (0..k).map(|_| complex_gaussian(rng, sigma2)).collect()
}

/// One ping–pong round at time `t1`.
///
/// Returns `(h_ab_est, h_ba_est)`: the true responses under the
/// schedule's reflection vectors at `t1` (forward) and `t1 + T_p`
/// (reverse), each plus independent estimation noise. `noise_var`
/// overrides the config's noise variance (used by power-concentrating
/// probes); pass `None` for the standard `sigma^2`.
#[allow(clippy::too_many_arguments)]
pub fn probe_round<R: Rng + ?Sized>(
    c: &ChannelRealization,
    sched: &ReflectionSchedule,
    t1: f64,
    cfg: &ProbeConfig,
    k: usize,
    noise_var: Option<f64>,
    noise_fwd: &mut R,
    noise_rev: &mut R,
) -> Result<(Vec<Complex64>, Vec<Complex64>), ProbeError> {
    let t2 = t1 + cfg.t_p;
    // Tolerant floor: block starts composed as `block * T_c` may divide
    // back to fractionally below the integer.
    let block = (t1 / cfg.t_c * (1.0 + 1e-12)).floor();
    if t2 > (block + 1.0) * cfg.t_c * (1.0 + 1e-9) {
        return Err(ProbeError::StraddlesCoherenceBlock { t1 });
    }
    let sigma2 = noise_var.unwrap_or_else(|| cfg.sigma2());
    let m = c.h_ar.len();
    let lambda_fwd = sched.lambda_at(m, t1, Direction::Forward);
    let lambda_rev = sched.lambda_at(m, t2, Direction::Reverse);
    let mut h_ab = frequency_response(c, k, &lambda_fwd)?.h;
    let mut h_ba = frequency_response(c, k, &lambda_rev)?.h;
    for (v, z) in h_ab.iter_mut().zip(noise_vector(k, sigma2, noise_fwd)) {
        *v += z;
    }
    for (v, z) in h_ba.iter_mut().zip(noise_vector(k, sigma2, noise_rev)) {
        *v += z;
    }
    Ok((h_ab, h_ba))
}

/// Simulates one coherence block: a fresh channel realization and `N_p`
/// probing rounds starting at the block edge plus the configured offset.
pub fn simulate_block(
    s: &Scenario,
    sched: &ReflectionSchedule,
    cfg: &ProbeConfig,
    master_seed: u64,
    block: u64,
    noise_var: Option<f64>,
) -> Result<(ChannelRealization, ProbeSeries), ProbeError> {
    let mut channel_rng = stream(master_seed, StreamDomain::Channel, block);
    let c = crate::channel::sample_realization(s, &mut channel_rng)?;
    let mut noise_fwd = stream(master_seed, StreamDomain::NoiseForward, block);
    let mut noise_rev = stream(master_seed, StreamDomain::NoiseReverse, block);
    let mut series = ProbeSeries { h_ab: Vec::with_capacity(cfg.n_p), h_ba: Vec::with_capacity(cfg.n_p) };
    let block_start = block as f64 * cfg.t_c;
    for round in 0..cfg.n_p {
        let t1 = block_start + cfg.probe_offset + round as f64 * cfg.t_p;
        let (ab, ba) =
            probe_round(&c, sched, t1, cfg, s.k, noise_var, &mut noise_fwd, &mut noise_rev)?;
        series.push_round(ab, ba);
    }
    Ok((c, series))
}

/// Collects one [`ProbeSeries`] per coherence block.
pub fn collect_series(
    s: &Scenario,
    sched: &ReflectionSchedule,
    cfg: &ProbeConfig,
    n_blocks: usize,
    master_seed: u64,
) -> Result<Vec<ProbeSeries>, ProbeError> {
    cfg.validate()?;
    (0..n_blocks as u64)
        .map(|b| simulate_block(s, sched, cfg, master_seed, b, None).map(|(_, series)| series))
        .collect()
}
