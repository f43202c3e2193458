//! Temporary calibration probe (deleted before release).

use ris_crkg::attack::{AttackMode, ReflectionSchedule};
use ris_crkg::crkg::{run_pipeline, CprConfig, Scheme};
use ris_crkg::keyrate::{rate_case, rate_monte_carlo, scenario_rate_inputs, RateCase, SubcarrierMode};
use ris_crkg::probing::ProbeConfig;
use ris_crkg::scene::{ris_path_gain, sum_direct_gain, Scenario};

fn lab() -> Scenario {
    Scenario {
        d: 0.5,
        h: 0.11,
        d_ar: 0.025,
        l: 4,
        path_distances: vec![0.5, 0.7, 0.9, 1.2],
        m: 16,
        beta: 1.0,
        eps_r: 3.55,
        k: 128,
        bandwidth_hz: 6e9,
        integer_taps: false,
    }
}

fn main() {
    let s = lab();
    let geo = ris_path_gain(&s).unwrap();
    let sum_beta = sum_direct_gain(&s).unwrap();
    println!("beta_r = {:.6}, sum_beta = {:.6}, theta = {:.4}, d_r = {:.4}", geo.beta_r, sum_beta, geo.theta, geo.d_r);
    println!("taps: {:?}", s.path_distances.iter().map(|d| d / ris_crkg::SPEED_OF_LIGHT * s.bandwidth_hz).collect::<Vec<_>>());
    println!("tau_r = {:.4}", geo.d_r / ris_crkg::SPEED_OF_LIGHT * s.bandwidth_hz);

    let blocks = 300;
    for snr in [0.0, 10.0, 20.0, 30.0] {
        let cfg = ProbeConfig { t_p: 1e-3, t_c: 0.1, n_p: 50, snr_db: snr, probe_offset: 0.0 };
        let cpr = CprConfig::defaults_for(s.l, cfg.n_p);
        let none = ReflectionSchedule::new(AttackMode::NoRis, 1.0, 11);
        let a1 = ReflectionSchedule::new(AttackMode::AsymmetricStructure, 1.0, 11);
        let a2 = ReflectionSchedule::asynchronous(5e-4, 0.0, 1.0, 11);
        let t = std::time::Instant::now();
        let plain_none = run_pipeline(&s, &none, &cfg, &cpr, blocks, Scheme::PlainCrkg, 1).unwrap();
        let plain_a1 = run_pipeline(&s, &a1, &cfg, &cpr, blocks, Scheme::PlainCrkg, 1).unwrap();
        let plain_a2 = run_pipeline(&s, &a2, &cfg, &cpr, blocks, Scheme::PlainCrkg, 1).unwrap();
        let cpr_a1 = run_pipeline(&s, &a1, &cfg, &cpr, blocks, Scheme::CprCrkg, 1).unwrap();
        let cpr_a2 = run_pipeline(&s, &a2, &cfg, &cpr, blocks, Scheme::CprCrkg, 1).unwrap();
        let fh_a2 = run_pipeline(&s, &a2, &cfg, &cpr, blocks, Scheme::FhCrkg, 1).unwrap();
        println!(
            "snr {snr:>4}: none {:.4} | a1 {:.4} a2 {:.4} | cpr1 {:.4} (skip {:.2}) cpr2 {:.4} (skip {:.2}) | fh2 {:.4}  [{:?}]",
            plain_none.bdr, plain_a1.bdr, plain_a2.bdr, cpr_a1.bdr, cpr_a1.skip_rate(), cpr_a2.bdr, cpr_a2.skip_rate(), fh_a2.bdr, t.elapsed()
        );
    }

    // Criterion-7-style check: noiseless async, integer taps.
    {
        let mut s7 = lab();
        s7.integer_taps = true;
        let cfg = ProbeConfig { t_p: 1e-3, t_c: 0.1, n_p: 50, snr_db: f64::INFINITY, probe_offset: 0.0 };
        let cpr = CprConfig::defaults_for(s7.l, cfg.n_p);
        let sched = ReflectionSchedule::asynchronous(5e-4, 0.0, 1.0, 3);
        let t = std::time::Instant::now();
        let out = run_pipeline(&s7, &sched, &cfg, &cpr, 1000, Scheme::CprCrkg, 9).unwrap();
        let mut block_bad = std::collections::BTreeMap::<u32, usize>::new();
        for (bit_a, (bit_b, label)) in out
            .key_a
            .bits
            .iter()
            .zip(out.key_b.bits.iter().zip(&out.key_a.source_labels))
        {
            if bit_a != bit_b {
                *block_bad.entry(label.block).or_default() += 1;
            }
        }
        println!(
            "async noiseless integer: overall bdr {:.6}, perfect blocks {}/1000, skip {}  [{:?}]",
            out.bdr,
            1000 - block_bad.len(),
            out.skipped_blocks,
            t.elapsed()
        );
    }

    // Criterion-8-style check: detection rate at SNR 10 dB.
    {
        let s8 = lab();
        let cfg = ProbeConfig { t_p: 1e-3, t_c: 0.1, n_p: 50, snr_db: 10.0, probe_offset: 0.0 };
        let cpr = CprConfig::defaults_for(s8.l, cfg.n_p);
        let ris_tap = 12usize;
        let mut hits = 0;
        let mut false_flags = 0;
        let mut candidates_total = 0;
        let t = std::time::Instant::now();
        for run in 0..1000u64 {
            let sched = ReflectionSchedule::asynchronous(5e-4, 0.0, 1.0, 1000 + run);
            let (_, series) =
                ris_crkg::probing::simulate_block(&s8, &sched, &cfg, 5000 + run, 0, None).unwrap();
            let g = ris_crkg::crkg::delay_transform(&series.h_ab).unwrap();
            let sel = ris_crkg::crkg::select_significant(&g, &cpr);
            let flagged = ris_crkg::crkg::detect_ris_path(&g, &sel, &cpr).unwrap();
            if flagged.contains(&ris_tap) {
                hits += 1;
            }
            false_flags += flagged.iter().filter(|t| **t != ris_tap && **t != ris_tap + 1).count();
            candidates_total += sel.len().saturating_sub(1);
        }
        println!(
            "detection: hit rate {:.3}, false flags {}/{}  [{:?}]",
            hits as f64 / 1000.0,
            false_flags,
            candidates_total,
            t.elapsed()
        );
    }

    // Monte-Carlo rate cross-check at Table-II-like parameters.
    let t2 = Scenario {
        d: 10.0,
        h: 3.0,
        d_ar: 0.0,
        l: 4,
        path_distances: vec![10.0, 13.302, 10.531, 19.38],
        m: 10,
        beta: 1.0,
        eps_r: 3.55,
        k: 128,
        bandwidth_hz: 1e8,
        integer_taps: false,
    };
    let cfg = ProbeConfig { t_p: 1e-3, t_c: 0.1, n_p: 1, snr_db: 10.0, probe_offset: 0.0 };
    let sigma2 = cfg.sigma2();
    let trials = 100_000;
    println!("t2 beta_r {:.6e} sum_beta {:.6}", ris_path_gain(&t2).unwrap().beta_r, sum_direct_gain(&t2).unwrap());
    for (case, mode) in [
        (RateCase::NoRis, AttackMode::NoRis),
        (RateCase::Benign, AttackMode::Benign),
        (RateCase::Asymmetric, AttackMode::AsymmetricStructure),
        (RateCase::Async, AttackMode::AsyncConfig),
    ] {
        let sched = if mode == AttackMode::AsyncConfig {
            ReflectionSchedule::asynchronous(cfg.t_p / 2.0, 0.0, t2.beta, 5)
        } else {
            ReflectionSchedule::new(mode, t2.beta, 5)
        };
        let inputs = scenario_rate_inputs(&t2, case, sigma2).unwrap();
        let analytic = rate_case(case, inputs.sum_beta, inputs.beta_r, sigma2).unwrap().bits_or_inf();
        let t = std::time::Instant::now();
        let mc = rate_monte_carlo(&t2, &sched, &cfg, trials, SubcarrierMode::FullBand, 42)
            .unwrap()
            .bits_or_inf();
        println!(
            "{}: analytic {:.6} mc {:.6} rel {:+.4}%  [{:?}]",
            case.label(),
            analytic,
            mc,
            (mc - analytic) / analytic * 100.0,
            t.elapsed()
        );
    }
}
