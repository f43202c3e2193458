//! Random channel realizations and the assembled frequency response.
//!
//! The world is block fading: within one coherence block every gain is
//! constant, across blocks gains are redrawn independently while delays
//! (pure geometry) persist.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

use crate::scene::{ris_path_gain, SceneError, Scenario};
use crate::SPEED_OF_LIGHT;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("reflection vector has length {got}, expected {expected}")]
    LambdaLength { got: usize, expected: usize },
}

/// One coherence block's worth of channel randomness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    /// Complex gain of each direct path; `E{|alpha_l|^2}` equals the
    /// path's power gain.
    pub alpha: Vec<Complex64>,
    /// Direct-path delays in tap units, in `[0, K)`.
    pub tau: Vec<f64>,
    /// Alice -> surface hop coefficients, one per element.
    pub h_ar: Vec<Complex64>,
    /// Surface -> Bob hop coefficients, one per element.
    pub h_rb: Vec<Complex64>,
    /// Surface-path delay in tap units.
    pub tau_r: f64,
}

/// Per-subcarrier channel response, length `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyResponse {
    pub h: Vec<Complex64>,
}

/// Circularly-symmetric complex Gaussian with `E{|x|^2} = variance`.
pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * scale, im * scale)
}

fn delay_taps(s: &Scenario, distance: f64) -> f64 {
    let tau = distance / SPEED_OF_LIGHT * s.bandwidth_hz;
    let tau = if s.integer_taps { tau.round() } else { tau };
    tau.rem_euclid(s.k as f64)
}

/// Draws a fresh realization for one coherence block.
///
/// Direct gains are complex Gaussian with variance `1/d_l^2`. Each hop
/// coefficient is complex Gaussian with per-entry variance
/// `|gamma cos(theta)| / d_r` (the symmetric split), so that the surface
/// path's end-to-end power with unit-power reflection coefficients is
/// `m * beta * |gamma cos(theta)|^2 / d_r^2`.
pub fn sample_realization<R: Rng + ?Sized>(
    s: &Scenario,
    rng: &mut R,
) -> Result<ChannelRealization, ChannelError> {
    let geo = ris_path_gain(s)?;
    let hop_variance = (geo.gamma * geo.theta.cos()).abs() / geo.d_r;
    let alpha = s
        .path_distances
        .iter()
        .map(|&dl| complex_gaussian(rng, 1.0 / (dl * dl)))
        .collect();
    let h_ar = (0..s.m).map(|_| complex_gaussian(rng, hop_variance)).collect();
    let h_rb = (0..s.m).map(|_| complex_gaussian(rng, hop_variance)).collect();
    Ok(ChannelRealization {
        alpha,
        tau: s.path_distances.iter().map(|&dl| delay_taps(s, dl)).collect(),
        h_ar,
        h_rb,
        tau_r: delay_taps(s, geo.d_r),
    })
}

/// Fresh, independent realization for the next coherence block: gains are
/// redrawn, delays are carried over unchanged.
pub fn evolve_block<R: Rng + ?Sized>(
    prev: &ChannelRealization,
    s: &Scenario,
    rng: &mut R,
) -> Result<ChannelRealization, ChannelError> {
    let mut next = sample_realization(s, rng)?;
    next.tau.clone_from(&prev.tau);
    next.tau_r = prev.tau_r;
    Ok(next)
}

/// End-to-end surface term `h_ar^T diag(lambda) h_rb`.
pub fn surface_product(c: &ChannelRealization, lambda: &[Complex64]) -> Complex64 {
    c.h_ar
        .iter()
        .zip(&c.h_rb)
        .zip(lambda)
        .map(|((a, b), l)| a * l * b)
        .sum()
}

/// Per-subcarrier response for subcarriers `k = 1..=K`:
/// `h(k) = sum_l alpha_l e^{-j 2 pi tau_l k / K} + (h_ar^T diag(lambda) h_rb) e^{-j 2 pi tau_r k / K}`.
///
/// An all-zero `lambda` reduces this to the direct link alone.
pub fn frequency_response(
    c: &ChannelRealization,
    k: usize,
    lambda: &[Complex64],
) -> Result<FrequencyResponse, ChannelError> {
    if lambda.len() != c.h_ar.len() {
        return Err(ChannelError::LambdaLength { got: lambda.len(), expected: c.h_ar.len() });
    }
    let surface = surface_product(c, lambda);
    let mut h = vec![Complex64::ZERO; k];
    let mut accumulate = |gain: Complex64, tau: f64| {
        if gain == Complex64::ZERO {
            return;
        }
        // Phase steps by e^{-j 2 pi tau / K} per subcarrier; iterating the
        // product avoids a transcendental call per (path, subcarrier).
        let step = Complex64::from_polar(1.0, -TAU * tau / k as f64);
        let mut phase = step;
        for slot in h.iter_mut() {
            *slot += gain * phase;
            phase *= step;
        }
    };
    for (gain, &tau) in c.alpha.iter().zip(&c.tau) {
        accumulate(*gain, tau);
    }
    accumulate(surface, c.tau_r);
    Ok(FrequencyResponse { h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::{stream, StreamDomain};
    use approx::assert_relative_eq;

    fn test_scenario() -> Scenario {
        Scenario {
            d: 10.0,
            h: 2.0,
            d_ar: 2.0,
            l: 2,
            path_distances: vec![10.0, 14.0],
            m: 8,
            beta: 1.0,
            eps_r: 3.55,
            k: 16,
            bandwidth_hz: 1e8,
            integer_taps: false,
        }
    }

    fn manual_realization(alpha: Vec<Complex64>, tau: Vec<f64>, m: usize) -> ChannelRealization {
        ChannelRealization {
            alpha,
            tau,
            h_ar: vec![Complex64::ZERO; m],
            h_rb: vec![Complex64::ZERO; m],
            tau_r: 0.0,
        }
    }

    #[test]
    fn zero_delay_single_path_is_flat() {
        let c = manual_realization(vec![Complex64::ONE], vec![0.0], 4);
        let r = frequency_response(&c, 8, &vec![Complex64::ZERO; 4]).unwrap();
        for v in r.h {
            assert_relative_eq!(v.re, 1.0, epsilon = 1e-12);
            assert_relative_eq!(v.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_path_response_matches_symbolic_form() {
        // alpha = (1, j), tau = (0, K/4) at K = 8:
        // h(k) = 1 + j e^{-j pi k / 2}, i.e. the period-4 sequence
        // 2, 1-j, 0, 1+j repeated.
        let c = manual_realization(vec![Complex64::ONE, Complex64::I], vec![0.0, 2.0], 4);
        let r = frequency_response(&c, 8, &vec![Complex64::ZERO; 4]).unwrap();
        let expected = [
            Complex64::new(2.0, 0.0),
            Complex64::new(1.0, -1.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 1.0),
        ];
        for (k, v) in r.h.iter().enumerate() {
            let e = expected[k % 4];
            assert_relative_eq!(v.re, e.re, epsilon = 1e-12);
            assert_relative_eq!(v.im, e.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_lambda_equals_direct_only_sum() {
        let s = test_scenario();
        let mut rng = stream(3, StreamDomain::Channel, 0);
        let c = sample_realization(&s, &mut rng).unwrap();
        let with_zero = frequency_response(&c, s.k, &vec![Complex64::ZERO; s.m]).unwrap();
        let mut direct_only = c.clone();
        direct_only.h_ar = vec![Complex64::ZERO; s.m];
        direct_only.h_rb = vec![Complex64::ZERO; s.m];
        let lambda: Vec<_> = (0..s.m).map(|i| Complex64::from_polar(1.0, i as f64)).collect();
        let direct = frequency_response(&direct_only, s.k, &lambda).unwrap();
        for (a, b) in with_zero.h.iter().zip(&direct.h) {
            assert_relative_eq!(a.re, b.re, epsilon = 1e-12);
            assert_relative_eq!(a.im, b.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn lambda_length_mismatch_rejected() {
        let s = test_scenario();
        let mut rng = stream(3, StreamDomain::Channel, 1);
        let c = sample_realization(&s, &mut rng).unwrap();
        assert!(matches!(
            frequency_response(&c, s.k, &vec![Complex64::ZERO; s.m + 1]),
            Err(ChannelError::LambdaLength { .. })
        ));
    }

    #[test]
    fn same_seed_same_realization() {
        let s = test_scenario();
        let a = sample_realization(&s, &mut stream(9, StreamDomain::Channel, 5)).unwrap();
        let b = sample_realization(&s, &mut stream(9, StreamDomain::Channel, 5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn evolve_preserves_delays_and_redraws_gains() {
        let s = test_scenario();
        let first = sample_realization(&s, &mut stream(1, StreamDomain::Channel, 0)).unwrap();
        let second = evolve_block(&first, &s, &mut stream(1, StreamDomain::Channel, 1)).unwrap();
        assert_eq!(first.tau, second.tau);
        assert_eq!(first.tau_r, second.tau_r);
        assert_ne!(first.alpha, second.alpha);
        assert_ne!(first.h_ar, second.h_ar);
    }

    #[test]
    fn integer_tap_mode_rounds_delays() {
        let mut s = test_scenario();
        s.integer_taps = true;
        let c = sample_realization(&s, &mut stream(2, StreamDomain::Channel, 0)).unwrap();
        for &t in c.tau.iter().chain([c.tau_r].iter()) {
            assert_eq!(t, t.round());
            assert!(t >= 0.0 && t < s.k as f64);
        }
    }

    #[test]
    fn response_linear_in_lambda() {
        let s = test_scenario();
        let mut rng = stream(4, StreamDomain::Channel, 0);
        let c = sample_realization(&s, &mut rng).unwrap();
        let l1: Vec<_> = (0..s.m).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
        let l2: Vec<_> = (0..s.m).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
        let sum: Vec<_> = l1.iter().zip(&l2).map(|(a, b)| a + b).collect();
        let zero = vec![Complex64::ZERO; s.m];
        let f = |l: &[Complex64]| frequency_response(&c, s.k, l).unwrap().h;
        let (h12, h2, h1, h0) = (f(&sum), f(&l2), f(&l1), f(&zero));
        for k in 0..s.k {
            let lhs = h12[k] - h2[k];
            let rhs = h1[k] - h0[k];
            assert_relative_eq!(lhs.re, rhs.re, epsilon = 1e-10);
            assert_relative_eq!(lhs.im, rhs.im, epsilon = 1e-10);
        }
    }

    #[test]
    fn direct_only_energy_is_exact() {
        // Mean |h(k)|^2 over subcarriers for one path equals |alpha|^2.
        let alpha = Complex64::new(0.6, -0.3);
        let c = manual_realization(vec![alpha], vec![3.7], 2);
        let r = frequency_response(&c, 32, &vec![Complex64::ZERO; 2]).unwrap();
        let mean: f64 = r.h.iter().map(|v| v.norm_sqr()).sum::<f64>() / 32.0;
        assert_relative_eq!(mean, alpha.norm_sqr(), epsilon = 1e-12);
    }

    #[test]
    fn bidirectional_responses_are_reciprocal() {
        // h_ar^T diag(lambda) h_rb equals h_rb^T diag(lambda) h_ar; one
        // realization plus one reflection vector serves both directions.
        let s = test_scenario();
        let mut rng = stream(5, StreamDomain::Channel, 0);
        let c = sample_realization(&s, &mut rng).unwrap();
        let lambda: Vec<_> = (0..s.m).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
        let mut reversed = c.clone();
        std::mem::swap(&mut reversed.h_ar, &mut reversed.h_rb);
        let fwd = frequency_response(&c, s.k, &lambda).unwrap();
        let rev = frequency_response(&reversed, s.k, &lambda).unwrap();
        assert_eq!(fwd, rev);
    }
}
