//! Ensemble checks of the model's second-order statistics against their
//! configured values: law-of-large-numbers oracles with fixed seeds.

use num_complex::Complex64;
use ris_crkg::attack::{AttackMode, Direction, ReflectionSchedule};
use ris_crkg::channel::sample_realization;
use ris_crkg::crkg::{run_pipeline, CprConfig, Scheme};
use ris_crkg::probing::{collect_series, simulate_block, ProbeConfig};
use ris_crkg::scene::{direct_path_gains, ris_path_gain, Scenario};
use ris_crkg::seeding::{stream, StreamDomain};

fn scenario() -> Scenario {
    Scenario {
        d: 10.0,
        h: 2.0,
        d_ar: 2.0,
        l: 3,
        path_distances: vec![10.0, 12.5, 17.0],
        m: 10,
        beta: 1.0,
        eps_r: 3.55,
        k: 16,
        bandwidth_hz: 1e8,
        integer_taps: false,
    }
}

fn lab_scenario(h: f64, integer_taps: bool) -> Scenario {
    Scenario {
        d: 0.5,
        h,
        d_ar: 0.025,
        l: 4,
        path_distances: vec![0.5, 0.7, 0.9, 1.2],
        m: 16,
        beta: 1.0,
        eps_r: 3.55,
        k: 128,
        bandwidth_hz: 6e9,
        integer_taps,
    }
}

#[test]
fn direct_gain_second_moments_match_path_loss() {
    let s = scenario();
    let betas = direct_path_gains(&s).unwrap();
    let n = 100_000;
    let mut sums = vec![0.0f64; s.l];
    let mut rng = stream(101, StreamDomain::Channel, 0);
    for _ in 0..n {
        let c = sample_realization(&s, &mut rng).unwrap();
        for (sum, a) in sums.iter_mut().zip(&c.alpha) {
            *sum += a.norm_sqr();
        }
    }
    for (l, (&sum, &beta)) in sums.iter().zip(&betas).enumerate() {
        let mean = sum / n as f64;
        let rel = (mean - beta).abs() / beta;
        assert!(rel < 0.02, "path {l}: mean {mean}, expected {beta} (rel {rel})");
    }
}

#[test]
fn surface_product_second_moment_matches_gain() {
    let s = scenario();
    let beta_r = ris_path_gain(&s).unwrap().beta_r;
    let n = 100_000;
    let mut sum = 0.0;
    let mut rng = stream(102, StreamDomain::Channel, 0);
    for trial in 0..n as u64 {
        let c = sample_realization(&s, &mut rng).unwrap();
        let sched = ReflectionSchedule::new(AttackMode::Benign, s.beta, trial);
        let lambda = sched.lambda_at(s.m, 0.0, Direction::Forward);
        sum += ris_crkg::channel::surface_product(&c, &lambda).norm_sqr();
    }
    let mean = sum / n as f64;
    let rel = (mean - beta_r).abs() / beta_r;
    assert!(rel < 0.02, "mean {mean}, expected {beta_r} (rel {rel})");
}

#[test]
fn gains_decorrelate_across_blocks() {
    let s = scenario();
    let n = 10_000;
    let mut cross = Complex64::ZERO;
    let mut power = 0.0;
    for block in 0..n as u64 {
        let a = sample_realization(&s, &mut stream(103, StreamDomain::Channel, 2 * block)).unwrap();
        let b = sample_realization(&s, &mut stream(103, StreamDomain::Channel, 2 * block + 1)).unwrap();
        cross += a.alpha[0] * b.alpha[0].conj();
        power += a.alpha[0].norm_sqr();
    }
    let correlation = cross.norm() / power;
    assert!(correlation < 0.05, "cross-block correlation {correlation}");
}

#[test]
fn estimation_noise_is_independent_between_parties() {
    let s = scenario();
    let cfg = ProbeConfig { t_p: 1e-3, t_c: 0.1, n_p: 50, snr_db: 10.0, probe_offset: 0.0 };
    let sigma2 = cfg.sigma2();
    let sched = ReflectionSchedule::new(AttackMode::NoRis, 1.0, 0);
    let zero = vec![Complex64::ZERO; s.m];
    let mut cross = Complex64::ZERO;
    let mut count = 0usize;
    for block in 0..4u64 {
        let mut channel_rng = stream(104, StreamDomain::Channel, block);
        let c = sample_realization(&s, &mut channel_rng).unwrap();
        let clean = ris_crkg::channel::frequency_response(&c, s.k, &zero).unwrap().h;
        let (_, series) = simulate_block(&s, &sched, &cfg, 104, block, None).unwrap();
        for (ab, ba) in series.h_ab.iter().zip(&series.h_ba) {
            for sc in 0..s.k {
                let z_b = ab[sc] - clean[sc];
                let z_a = ba[sc] - clean[sc];
                cross += z_a * z_b.conj();
                count += 1;
            }
        }
    }
    let cov = cross.norm() / count as f64;
    assert!(count >= 10_000);
    assert!(cov < 0.02 * sigma2, "noise cross-covariance {cov} vs sigma2 {sigma2}");
}

#[test]
fn benign_estimates_strongly_correlated_at_high_snr() {
    let s = scenario();
    let cfg = ProbeConfig { t_p: 1e-3, t_c: 0.1, n_p: 1, snr_db: 30.0, probe_offset: 0.0 };
    let sched = ReflectionSchedule::new(AttackMode::Benign, 1.0, 7);
    let blocks = collect_series(&s, &sched, &cfg, 1000, 105).unwrap();
    for sc in 0..s.k {
        let mut cross = Complex64::ZERO;
        let mut pa = 0.0;
        let mut pb = 0.0;
        for series in &blocks {
            let a = series.h_ab[0][sc];
            let b = series.h_ba[0][sc];
            cross += a * b.conj();
            pa += a.norm_sqr();
            pb += b.norm_sqr();
        }
        let corr = cross.norm() / (pa * pb).sqrt();
        assert!(corr > 0.99, "subcarrier {sc}: correlation {corr}");
    }
}

#[test]
fn cpr_with_clearly_fractional_tap_keeps_a_small_error_floor() {
    // With fractional delays the contaminated tap leaks into its
    // neighbours, so removal cannot be perfect: the disagreement stays
    // nonzero even after path removal.
    let s = lab_scenario(0.125, false); // surface delay 12.38 taps
    let cfg = ProbeConfig { t_p: 1e-3, t_c: 0.1, n_p: 50, snr_db: 10.0, probe_offset: 0.0 };
    let cpr = CprConfig::defaults_for(s.l, cfg.n_p);
    let sched = ReflectionSchedule::asynchronous(5e-4, 0.0, 1.0, 31);
    let out = run_pipeline(&s, &sched, &cfg, &cpr, 400, Scheme::CprCrkg, 77).unwrap();
    assert!(out.bdr > 0.0, "expected a residual error floor, got exactly zero");
    assert!(out.bdr < 0.05, "floor should stay small, got {}", out.bdr);
}

#[test]
fn cpr_under_attack_matches_no_attack_with_integer_taps() {
    let s = lab_scenario(0.11, true);
    let cfg = ProbeConfig { t_p: 1e-3, t_c: 0.1, n_p: 50, snr_db: 10.0, probe_offset: 0.0 };
    let cpr = CprConfig::defaults_for(s.l, cfg.n_p);
    let attacked = ReflectionSchedule::asynchronous(5e-4, 0.0, 1.0, 41);
    let absent = ReflectionSchedule::new(AttackMode::NoRis, 1.0, 41);
    let with_attack = run_pipeline(&s, &attacked, &cfg, &cpr, 200, Scheme::CprCrkg, 13).unwrap();
    let without = run_pipeline(&s, &absent, &cfg, &cpr, 200, Scheme::CprCrkg, 13).unwrap();
    assert!(
        (with_attack.bdr - without.bdr).abs() <= 0.02,
        "attacked {} vs clean {}",
        with_attack.bdr,
        without.bdr
    );
}
