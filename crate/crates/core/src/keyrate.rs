//! Secret key rate of the bidirectional probing channel.
//!
//! The per-subcarrier estimates form a pair of zero-mean complex Gaussian
//! variables; the achievable key rate is their mutual information
//!
//! `R = log2(K_ab) + log2(K_ba) - log2(K_ab K_ba - K_c^2)`
//!
//! with `K_ab`, `K_ba` the marginal powers and `K_c` the cross-covariance.
//! Closed forms for the four canonical surface behaviours, their high-SNR
//! gap approximations, and a sample-covariance Monte-Carlo estimator all
//! live here; rates are in bits per channel use.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attack::{Direction, ReflectionSchedule};
use crate::channel::sample_realization;
use crate::probing::ProbeConfig;
use crate::scene::{ris_path_gain, sum_direct_gain, SceneError, Scenario};
use crate::seeding::{stream, StreamDomain};

#[derive(Debug, Error)]
pub enum RateError {
    #[error("invalid rate inputs: {0}")]
    InvalidInputs(String),
    #[error("sample correlation matrix is not positive definite; raise n_trials (got {n_trials})")]
    EstimationFailed { n_trials: usize },
    #[error("n_trials must be at least {min}, got {got}")]
    TooFewTrials { min: usize, got: usize },
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Channel(#[from] crate::channel::ChannelError),
}

/// Second-order statistics that determine the key rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateInputs {
    /// Total direct-link power, summed over paths.
    pub sum_beta: f64,
    /// Forward surface-path gain.
    pub beta_r: f64,
    /// Reverse surface-path gain.
    pub beta_r2: f64,
    /// Cross-covariance of the two surface terms.
    pub beta_cross: f64,
    /// Estimation noise variance.
    pub sigma2: f64,
}

impl RateInputs {
    pub fn validate(&self) -> Result<(), RateError> {
        let fields = [
            ("sum_beta", self.sum_beta),
            ("beta_r", self.beta_r),
            ("beta_r2", self.beta_r2),
            ("beta_cross", self.beta_cross),
            ("sigma2", self.sigma2),
        ];
        for (name, v) in fields {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(RateError::InvalidInputs(format!(
                    "{name} must be non-negative and finite, got {v}"
                )));
            }
        }
        // Cauchy-Schwarz: the cross term cannot exceed the geometric mean
        // of the two marginal surface powers.
        let bound = (self.beta_r * self.beta_r2).sqrt();
        if self.beta_cross > bound * (1.0 + 1e-12) + 1e-300 {
            return Err(RateError::InvalidInputs(format!(
                "beta_cross = {} exceeds sqrt(beta_r * beta_r2) = {bound}",
                self.beta_cross
            )));
        }
        Ok(())
    }
}

/// A key rate in bits per channel use, or the unbounded value reached by
/// a noiseless fully reciprocal channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KeyRate {
    Bits(f64),
    Unbounded,
}

impl KeyRate {
    pub fn bits(self) -> Option<f64> {
        match self {
            KeyRate::Bits(b) => Some(b),
            KeyRate::Unbounded => None,
        }
    }

    /// Finite value, with the unbounded case mapped to `+inf` for sweeps.
    pub fn bits_or_inf(self) -> f64 {
        self.bits().unwrap_or(f64::INFINITY)
    }
}

impl std::fmt::Display for KeyRate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KeyRate::Bits(b) => write!(f, "{b}"),
            KeyRate::Unbounded => write!(f, "inf"),
        }
    }
}

const LN_2: f64 = std::f64::consts::LN_2;

/// `log2(1 + x)` without loss of precision for small `x`.
fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

/// Mutual information of the general Gaussian pair.
///
/// Evaluated as `log2(1 + K_c^2 / det)` with the determinant expanded
/// into non-negative terms (given Cauchy-Schwarz), which keeps the
/// result accurate to machine precision even when the rate is tiny or
/// the matrix nearly singular.
pub fn rate_general(inputs: &RateInputs) -> Result<KeyRate, RateError> {
    inputs.validate()?;
    let RateInputs { sum_beta: s, beta_r: a, beta_r2: b, beta_cross: x, sigma2: n } = *inputs;
    let k_c = s + x;
    // det(K) = (a + s + n)(b + s + n) - (s + x)^2, regrouped so every
    // term is non-negative whenever x^2 <= a b.
    let det = s * (a + b - 2.0 * x) + (a * b - x * x) + (a + b) * n + n * n + 2.0 * s * n;
    if det <= 0.0 {
        return if k_c > 0.0 {
            Ok(KeyRate::Unbounded)
        } else {
            Ok(KeyRate::Bits(0.0))
        };
    }
    Ok(KeyRate::Bits(log2_1p(k_c * k_c / det)))
}

/// Canonical surface behaviours with closed-form rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateCase {
    /// No surface: the baseline rate `R0`.
    NoRis,
    /// Honest constant surface: `R1`, above the baseline.
    Benign,
    /// One-directional surface (asymmetric structure): `R2`.
    Asymmetric,
    /// Independently re-randomized surface (asynchronous configuration): `R3`.
    Async,
}

impl RateCase {
    pub const ALL: [RateCase; 4] = [RateCase::NoRis, RateCase::Benign, RateCase::Asymmetric, RateCase::Async];

    /// The `(beta_r, beta_r2, beta_cross)` substitution realizing this
    /// case in [`rate_general`].
    pub fn substitution(self, beta_r: f64) -> (f64, f64, f64) {
        match self {
            RateCase::NoRis => (0.0, 0.0, 0.0),
            RateCase::Benign => (beta_r, beta_r, beta_r),
            RateCase::Asymmetric => (beta_r, 0.0, 0.0),
            RateCase::Async => (beta_r, beta_r, 0.0),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RateCase::NoRis => "R0",
            RateCase::Benign => "R1",
            RateCase::Asymmetric => "R2",
            RateCase::Async => "R3",
        }
    }
}

/// Closed-form rate of one canonical case.
pub fn rate_case(case: RateCase, sum_beta: f64, beta_r: f64, sigma2: f64) -> Result<KeyRate, RateError> {
    for (name, v) in [("sum_beta", sum_beta), ("beta_r", beta_r), ("sigma2", sigma2)] {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(RateError::InvalidInputs(format!(
                "{name} must be non-negative and finite, got {v}"
            )));
        }
    }
    let (s, a, n) = (sum_beta, beta_r, sigma2);
    let (num, den) = match case {
        RateCase::NoRis => (s * s, n * n + 2.0 * n * s),
        RateCase::Benign => {
            let p = a + s;
            (p * p, n * n + 2.0 * n * p)
        }
        RateCase::Asymmetric => (s * s, n * n + 2.0 * n * s + a * s + a * n),
        RateCase::Async => {
            let q = a + n;
            (s * s, q * q + 2.0 * q * s)
        }
    };
    if den <= 0.0 {
        return if num > 0.0 { Ok(KeyRate::Unbounded) } else { Ok(KeyRate::Bits(0.0)) };
    }
    Ok(KeyRate::Bits(log2_1p(num / den)))
}

/// High-SNR rate-gap approximations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapKind {
    /// `R0 - R2`: cost of the asymmetric-structure surface.
    Delta1,
    /// `R0 - R3`: cost of the asynchronous surface.
    Delta2,
    /// `R2 - R3`: spread between the two behaviours; SNR-independent.
    Delta3,
}

impl GapKind {
    pub const ALL: [GapKind; 3] = [GapKind::Delta1, GapKind::Delta2, GapKind::Delta3];

    pub fn label(self) -> &'static str {
        match self {
            GapKind::Delta1 => "delta1",
            GapKind::Delta2 => "delta2",
            GapKind::Delta3 => "delta3",
        }
    }
}

/// Closed-form high-SNR approximation of the requested gap, in bits.
/// `Delta1` diverges to `-inf` as `beta_r -> 0`.
pub fn rate_gap_approx(kind: GapKind, sum_beta: f64, beta_r: f64, sigma2: f64) -> f64 {
    let (s, a, n) = (sum_beta, beta_r, sigma2);
    let rho = 1.0 + a / s;
    match kind {
        GapKind::Delta1 => (s / (2.0 * n) * a / (a + s)).log2(),
        GapKind::Delta2 => (s * (1.0 - 1.0 / (rho * rho)) / (2.0 * n)).log2(),
        GapKind::Delta3 => log2_1p(1.0 / rho),
    }
}

/// Exact value of the requested gap, from the case closed forms.
pub fn rate_gap_exact(kind: GapKind, sum_beta: f64, beta_r: f64, sigma2: f64) -> Result<f64, RateError> {
    let r = |case| rate_case(case, sum_beta, beta_r, sigma2).map(KeyRate::bits_or_inf);
    Ok(match kind {
        GapKind::Delta1 => r(RateCase::NoRis)? - r(RateCase::Asymmetric)?,
        GapKind::Delta2 => r(RateCase::NoRis)? - r(RateCase::Async)?,
        GapKind::Delta3 => r(RateCase::Asymmetric)? - r(RateCase::Async)?,
    })
}

/// Which subcarriers carry probe power in the Monte-Carlo estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubcarrierMode {
    /// Probe the whole band; average the per-subcarrier rate.
    FullBand,
    /// Frequency hopping: one subcarrier per trial with the entire probe
    /// power (noise variance `sigma^2 / K`) concentrated on it.
    SingleCarrierFH,
}

/// Running second moments of an estimate pair.
///
/// Accumulators merge associatively, so partial sums from parallel
/// workers combine into the same totals in any grouping.
#[derive(Debug, Clone, Copy, Default)]
pub struct MomentAccumulator {
    pub n: u64,
    sum_aa: f64,
    sum_bb: f64,
    sum_ab: Complex64,
}

impl MomentAccumulator {
    pub fn push(&mut self, a: Complex64, b: Complex64) {
        self.n += 1;
        self.sum_aa += a.norm_sqr();
        self.sum_bb += b.norm_sqr();
        self.sum_ab += a * b.conj();
    }

    pub fn merge(&mut self, other: &MomentAccumulator) {
        self.n += other.n;
        self.sum_aa += other.sum_aa;
        self.sum_bb += other.sum_bb;
        self.sum_ab += other.sum_ab;
    }

    /// Sample `(K_ab, K_ba, |K_c|)`.
    pub fn moments(&self) -> (f64, f64, f64) {
        let n = self.n as f64;
        (self.sum_aa / n, self.sum_bb / n, self.sum_ab.norm() / n)
    }

    /// Gaussian plug-in mutual information of the accumulated pair.
    pub fn rate(&self, n_trials: usize) -> Result<KeyRate, RateError> {
        let (kab, kba, kc) = self.moments();
        let det = kab * kba - kc * kc;
        if det < 0.0 || (det == 0.0 && kc == 0.0) {
            return Err(RateError::EstimationFailed { n_trials });
        }
        if det == 0.0 {
            return Ok(KeyRate::Unbounded);
        }
        Ok(KeyRate::Bits(log2_1p(kc * kc / det)))
    }
}

/// Monte-Carlo estimate of the key rate for a scenario under a given
/// reflection schedule.
///
/// Each trial draws a fresh coherence block and one probing round, and
/// contributes per-subcarrier samples to running covariance sums; the
/// Gaussian mutual information of the sampled moments is the estimate.
pub fn rate_monte_carlo(
    s: &Scenario,
    sched: &ReflectionSchedule,
    cfg: &ProbeConfig,
    n_trials: usize,
    mode: SubcarrierMode,
    master_seed: u64,
) -> Result<KeyRate, RateError> {
    const MIN_TRIALS: usize = 1_000;
    if n_trials < MIN_TRIALS {
        return Err(RateError::TooFewTrials { min: MIN_TRIALS, got: n_trials });
    }
    let k = s.k;
    let sigma2 = cfg.sigma2();
    let mut accs = match mode {
        SubcarrierMode::FullBand => vec![MomentAccumulator::default(); k],
        SubcarrierMode::SingleCarrierFH => vec![MomentAccumulator::default()],
    };
    for trial in 0..n_trials as u64 {
        let mut rng = stream(master_seed, StreamDomain::Trial, trial);
        let c = sample_realization(s, &mut rng)?;
        // Each trial occupies its own coherence block on the timeline so
        // the schedule's clock keeps advancing across trials.
        let t1 = trial as f64 * cfg.t_c;
        let t2 = t1 + cfg.t_p;
        let lambda_fwd = sched.lambda_at(s.m, t1, Direction::Forward);
        let lambda_rev = sched.lambda_at(s.m, t2, Direction::Reverse);
        let fwd = crate::channel::frequency_response(&c, k, &lambda_fwd)?.h;
        let rev = crate::channel::frequency_response(&c, k, &lambda_rev)?.h;
        match mode {
            SubcarrierMode::FullBand => {
                for (sc, acc) in accs.iter_mut().enumerate() {
                    let za = crate::channel::complex_gaussian(&mut rng, sigma2);
                    let zb = crate::channel::complex_gaussian(&mut rng, sigma2);
                    acc.push(fwd[sc] + za, rev[sc] + zb);
                }
            }
            SubcarrierMode::SingleCarrierFH => {
                let sc = (trial as usize) % k;
                let concentrated = sigma2 / k as f64;
                let za = crate::channel::complex_gaussian(&mut rng, concentrated);
                let zb = crate::channel::complex_gaussian(&mut rng, concentrated);
                accs[0].push(fwd[sc] + za, rev[sc] + zb);
            }
        }
    }
    let mut total = 0.0;
    for acc in &accs {
        match acc.rate(n_trials)? {
            KeyRate::Bits(b) => total += b,
            KeyRate::Unbounded => return Ok(KeyRate::Unbounded),
        }
    }
    Ok(KeyRate::Bits(total / accs.len() as f64))
}

/// Rate inputs implied by a scenario's geometry for a canonical case.
pub fn scenario_rate_inputs(s: &Scenario, case: RateCase, sigma2: f64) -> Result<RateInputs, RateError> {
    let sum_beta = sum_direct_gain(s)?;
    let beta_r = ris_path_gain(s)?.beta_r;
    let (beta_r, beta_r2, beta_cross) = case.substitution(beta_r);
    Ok(RateInputs { sum_beta, beta_r, beta_r2, beta_cross, sigma2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bits(r: Result<KeyRate, RateError>) -> f64 {
        r.unwrap().bits().expect("finite rate")
    }

    #[test]
    fn baseline_rate_matches_direct_evaluation() {
        // Independent plug-in of the baseline closed form.
        let (s, n) = (1.0f64, 0.1f64);
        let reference = (1.0 + s * s / (n * n + 2.0 * n * s)).log2();
        let general = bits(rate_general(&RateInputs {
            sum_beta: s,
            beta_r: 0.0,
            beta_r2: 0.0,
            beta_cross: 0.0,
            sigma2: n,
        }));
        assert_relative_eq!(general, reference, max_relative = 1e-12);
        assert_relative_eq!(reference, 2.5265, epsilon = 1e-3);
    }

    #[test]
    fn benign_substitution_reduces_to_closed_form() {
        let (s, a, n) = (0.7, 1.3, 0.05);
        let general = bits(rate_general(&RateInputs {
            sum_beta: s,
            beta_r: a,
            beta_r2: a,
            beta_cross: a,
            sigma2: n,
        }));
        let closed = bits(rate_case(RateCase::Benign, s, a, n));
        assert_relative_eq!(general, closed, max_relative = 1e-13);
    }

    #[test]
    fn no_shared_randomness_means_zero_rate() {
        let r = bits(rate_general(&RateInputs {
            sum_beta: 0.0,
            beta_r: 0.0,
            beta_r2: 0.0,
            beta_cross: 0.0,
            sigma2: 0.1,
        }));
        assert_eq!(r, 0.0);
    }

    #[test]
    fn noiseless_reciprocal_inputs_are_unbounded() {
        let r = rate_general(&RateInputs {
            sum_beta: 1.0,
            beta_r: 0.5,
            beta_r2: 0.5,
            beta_cross: 0.5,
            sigma2: 0.0,
        })
        .unwrap();
        assert_eq!(r, KeyRate::Unbounded);
        assert_eq!(rate_case(RateCase::Benign, 1.0, 0.5, 0.0).unwrap(), KeyRate::Unbounded);
    }

    #[test]
    fn cauchy_schwarz_violation_rejected() {
        let r = rate_general(&RateInputs {
            sum_beta: 1.0,
            beta_r: 0.1,
            beta_r2: 0.1,
            beta_cross: 0.5,
            sigma2: 0.1,
        });
        assert!(matches!(r, Err(RateError::InvalidInputs(_))));
    }

    #[test]
    fn attacked_case_values() {
        // Independent evaluations of the two attacked closed forms at
        // sum_beta = 1, beta_r = 1, sigma2 = 0.1.
        let asymmetric = bits(rate_case(RateCase::Asymmetric, 1.0, 1.0, 0.1));
        assert_relative_eq!(asymmetric, (1.0f64 + 1.0 / 1.31).log2(), max_relative = 1e-12);
        assert_relative_eq!(asymmetric, 0.8183, epsilon = 1e-4);
        let asynchronous = bits(rate_case(RateCase::Async, 1.0, 1.0, 0.1));
        assert_relative_eq!(asynchronous, (1.0f64 + 1.0 / 3.41).log2(), max_relative = 1e-12);
        assert_relative_eq!(asynchronous, 0.3710, epsilon = 1e-4);
    }

    #[test]
    fn absent_surface_collapses_all_cases() {
        let (s, n) = (0.8, 0.02);
        let r0 = bits(rate_case(RateCase::NoRis, s, 0.0, n));
        for case in RateCase::ALL {
            assert_relative_eq!(bits(rate_case(case, s, 0.0, n)), r0, max_relative = 1e-14);
        }
    }

    #[test]
    fn gap_delta3_value_and_noise_independence() {
        // beta_r = sum_beta gives rho = 2 and delta3 = log2(1.5).
        let d3 = rate_gap_approx(GapKind::Delta3, 1.0, 1.0, 0.01);
        assert_relative_eq!(d3, 1.5f64.log2(), epsilon = 1e-12);
        assert_relative_eq!(d3, 0.585, epsilon = 1e-3);
        let d3_other = rate_gap_approx(GapKind::Delta3, 1.0, 1.0, 1e-4);
        assert_eq!(d3, d3_other);
    }

    #[test]
    fn gap_approximations_tight_at_high_snr() {
        let (s, a, n) = (1.0, 1.0, 1e-4); // 40 dB
        for kind in GapKind::ALL {
            let exact = rate_gap_exact(kind, s, a, n).unwrap();
            let approx = rate_gap_approx(kind, s, a, n);
            assert!(
                (exact - approx).abs() < 0.1,
                "{kind:?}: exact {exact}, approx {approx}"
            );
        }
    }

    #[test]
    fn delta1_diverges_without_surface() {
        assert_eq!(rate_gap_approx(GapKind::Delta1, 1.0, 0.0, 0.01), f64::NEG_INFINITY);
    }

    #[test]
    fn rate_ordering_on_a_grid() {
        for snr_db in [0.0, 10.0, 20.0, 40.0] {
            let n = 10f64.powf(-snr_db / 10.0);
            for beta_r in [0.01, 0.1, 1.0, 10.0, 100.0] {
                let r0 = bits(rate_case(RateCase::NoRis, 1.0, beta_r, n));
                let r1 = bits(rate_case(RateCase::Benign, 1.0, beta_r, n));
                let r2 = bits(rate_case(RateCase::Asymmetric, 1.0, beta_r, n));
                let r3 = bits(rate_case(RateCase::Async, 1.0, beta_r, n));
                assert!(r3 < r2 && r2 < r0 && r0 < r1, "ordering violated at snr {snr_db}, beta_r {beta_r}");
            }
        }
    }

    #[test]
    fn rates_monotone_in_surface_power_and_noise() {
        let s = 1.0;
        let betas = [0.01, 0.1, 0.5, 1.0, 5.0, 20.0];
        for w in betas.windows(2) {
            let n = 0.05;
            assert!(bits(rate_case(RateCase::Asymmetric, s, w[1], n)) < bits(rate_case(RateCase::Asymmetric, s, w[0], n)));
            assert!(bits(rate_case(RateCase::Async, s, w[1], n)) < bits(rate_case(RateCase::Async, s, w[0], n)));
            assert!(bits(rate_case(RateCase::Benign, s, w[1], n)) > bits(rate_case(RateCase::Benign, s, w[0], n)));
        }
        let noises = [1e-4, 1e-3, 1e-2, 1e-1, 1.0];
        for w in noises.windows(2) {
            for case in RateCase::ALL {
                assert!(bits(rate_case(case, s, 1.0, w[1])) < bits(rate_case(case, s, 1.0, w[0])));
            }
        }
    }

    #[test]
    fn accumulator_merge_is_associative() {
        let mut rng = stream(5, StreamDomain::Trial, 0);
        let samples: Vec<(Complex64, Complex64)> = (0..300)
            .map(|_| {
                (
                    crate::channel::complex_gaussian(&mut rng, 1.0),
                    crate::channel::complex_gaussian(&mut rng, 1.0),
                )
            })
            .collect();
        let mut whole = MomentAccumulator::default();
        for &(a, b) in &samples {
            whole.push(a, b);
        }
        let mut left = MomentAccumulator::default();
        let mut right = MomentAccumulator::default();
        for &(a, b) in &samples[..100] {
            left.push(a, b);
        }
        for &(a, b) in &samples[100..] {
            right.push(a, b);
        }
        left.merge(&right);
        let (waa, wbb, wc) = whole.moments();
        let (laa, lbb, lc) = left.moments();
        assert_relative_eq!(waa, laa, max_relative = 1e-12);
        assert_relative_eq!(wbb, lbb, max_relative = 1e-12);
        assert_relative_eq!(wc, lc, max_relative = 1e-12);
    }

    #[test]
    fn synthetic_gaussian_pair_recovers_known_mi() {
        // K_ab = K_ba = 1, K_c = 0.9: MI = log2(1 / 0.19).
        let mut rng = stream(8, StreamDomain::Trial, 1);
        let mut acc = MomentAccumulator::default();
        let n = 100_000;
        for _ in 0..n {
            let u = crate::channel::complex_gaussian(&mut rng, 1.0);
            let w = crate::channel::complex_gaussian(&mut rng, 1.0);
            let v = u * 0.9 + w * (1.0f64 - 0.81).sqrt();
            acc.push(u, v);
        }
        let est = acc.rate(n).unwrap().bits().unwrap();
        let reference = (1.0f64 / 0.19).log2();
        assert_relative_eq!(reference, 2.396, epsilon = 1e-3);
        assert_relative_eq!(est, reference, max_relative = 0.02);
    }

    #[test]
    fn independent_streams_estimate_near_zero() {
        let mut rng = stream(9, StreamDomain::Trial, 2);
        let mut acc = MomentAccumulator::default();
        let n = 100_000;
        for _ in 0..n {
            let u = crate::channel::complex_gaussian(&mut rng, 1.0);
            let v = crate::channel::complex_gaussian(&mut rng, 1.0);
            acc.push(u, v);
        }
        let est = acc.rate(n).unwrap().bits().unwrap();
        assert!(est.abs() < 0.02, "independent-stream estimate {est}");
    }

    #[test]
    fn too_few_trials_rejected() {
        let s = Scenario {
            d: 1.0,
            h: 0.5,
            d_ar: 0.5,
            l: 1,
            path_distances: vec![1.0],
            m: 2,
            beta: 1.0,
            eps_r: 3.55,
            k: 4,
            bandwidth_hz: 1e8,
            integer_taps: false,
        };
        let cfg = ProbeConfig { t_p: 1e-3, t_c: 0.1, n_p: 1, snr_db: 10.0, probe_offset: 0.0 };
        let sched = ReflectionSchedule::new(crate::attack::AttackMode::NoRis, 1.0, 0);
        assert!(matches!(
            rate_monte_carlo(&s, &sched, &cfg, 10, SubcarrierMode::FullBand, 1),
            Err(RateError::TooFewTrials { .. })
        ));
    }
}
