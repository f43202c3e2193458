//! Key-material extraction and the contaminated-path-removal pipeline.
//!
//! Three schemes turn probe series into raw keys:
//!
//! - plain: quantize per-subcarrier magnitudes of the raw estimates;
//! - contaminated-path removal (CPR): map estimates to the delay domain,
//!   keep the persistently significant taps, detect and drop the
//!   surface-induced tap, average the survivors per block, then quantize;
//! - frequency hopping (FH): quantize a single per-block rotating
//!   subcarrier probed with the whole pilot power.
//!
//! Quantization is single-bit CDF quantization against the per-source
//! empirical median, applied per path/subcarrier index across blocks.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::sync::Arc;
use thiserror::Error;

use crate::attack::ReflectionSchedule;
use crate::probing::{simulate_block, ProbeConfig, ProbeError};
use crate::scene::Scenario;

#[derive(Debug, Error)]
pub enum CprError {
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error("columns must share length {expected}, found {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("path detection needs at least {min} probing rounds, got {got}")]
    TooFewRounds { min: usize, got: usize },
    #[error("no usable channel paths remain after negotiation")]
    NoUsablePaths,
    #[error("bit strings differ in length: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("quantizer needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("key material is empty (all {0} blocks skipped)")]
    EmptyKey(usize),
    #[error("invalid CPR config: {0}")]
    InvalidConfig(String),
}

/// Contaminated-path-removal parameters. Field names are the on-disk
/// JSON names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CprConfig {
    /// Significant rows kept per probing column.
    #[serde(rename = "N_sel")]
    pub n_sel: usize,
    /// Minimum number of columns in which a row must rank significant.
    pub alpha_min: usize,
    /// Normalized lag-1 autocorrelation below which a path is a
    /// surface-jamming suspect.
    pub detect_eta: f64,
}

impl CprConfig {
    /// Defaults: keep two rows beyond the known path count, require 80%
    /// persistence, flag below 0.5 autocorrelation.
    pub fn defaults_for(l: usize, n_p: usize) -> Self {
        Self {
            n_sel: l + 2,
            alpha_min: ((0.8 * n_p as f64).ceil() as usize).max(1),
            detect_eta: 0.5,
        }
    }

    pub fn validate(&self, k: usize, n_p: usize) -> Result<(), CprError> {
        if self.n_sel < 1 || self.n_sel > k {
            return Err(CprError::InvalidConfig(format!(
                "N_sel = {} must lie in [1, K = {k}]",
                self.n_sel
            )));
        }
        if self.alpha_min < 1 || self.alpha_min > n_p {
            return Err(CprError::InvalidConfig(format!(
                "alpha_min = {} must lie in [1, N_p = {n_p}]",
                self.alpha_min
            )));
        }
        if !(self.detect_eta > 0.0 && self.detect_eta < 1.0) {
            return Err(CprError::InvalidConfig(format!(
                "detect_eta = {} must lie in (0, 1)",
                self.detect_eta
            )));
        }
        Ok(())
    }
}

/// Outcome of the per-block path negotiation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathReport {
    /// Alice's significant taps.
    pub k_a: BTreeSet<usize>,
    /// Bob's significant taps.
    pub k_b: BTreeSet<usize>,
    /// Taps either party flagged as surface-induced.
    pub flagged: BTreeSet<usize>,
    /// Negotiated survivors: the intersection minus flagged taps.
    pub k_final: BTreeSet<usize>,
}

/// Raw key bits plus the (source index, block) provenance of each bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitKey {
    pub bits: Vec<bool>,
    pub source_labels: Vec<BitSource>,
}

/// Where one key bit came from: a delay tap or subcarrier, and the
/// coherence block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitSource {
    pub source: u32,
    pub block: u32,
}

/// Key-generation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    PlainCrkg,
    CprCrkg,
    FhCrkg,
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::PlainCrkg => "PlainCrkg",
            Scheme::CprCrkg => "CprCrkg",
            Scheme::FhCrkg => "FhCrkg",
        }
    }
}

// ---------------------------------------------------------------------------
// Delay-domain transform
// ---------------------------------------------------------------------------

/// Frequency-to-delay mapping `G = F H / K`, where `F(r, c) = e^{j 2 pi r c / K}`
/// for rows `r = 0..K-1` (taps) and columns `c = 1..=K` (subcarriers).
///
/// With the `1/K` scaling a unit-gain path at integer delay `tau` lands
/// at row `tau` with its own magnitude and nothing elsewhere. The
/// subcarrier indexing starting at 1 makes `F H` a cyclically relabeled
/// unnormalized inverse DFT, which is how it is evaluated here; the
/// matching matrix product is kept as a test oracle.
pub struct DelayTransform {
    k: usize,
    inverse: Arc<dyn Fft<f64>>,
    forward: Arc<dyn Fft<f64>>,
}

impl DelayTransform {
    pub fn new(k: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            k,
            inverse: planner.plan_fft_inverse(k),
            forward: planner.plan_fft_forward(k),
        }
    }

    fn check(&self, columns: &[Vec<Complex64>]) -> Result<(), CprError> {
        for col in columns {
            if col.len() != self.k {
                return Err(CprError::ShapeMismatch { expected: self.k, got: col.len() });
            }
        }
        Ok(())
    }

    /// Maps per-subcarrier columns to per-tap columns.
    pub fn transform(&self, columns: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>, CprError> {
        self.check(columns)?;
        let k = self.k;
        let scale = 1.0 / k as f64;
        Ok(columns
            .iter()
            .map(|col| {
                // Subcarrier c occupies DFT bin c mod K, so bin 0 holds
                // the last subcarrier.
                let mut buf = vec![Complex64::ZERO; k];
                buf[0] = col[k - 1];
                buf[1..k].copy_from_slice(&col[..k - 1]);
                self.inverse.process(&mut buf);
                buf.iter_mut().for_each(|v| *v *= scale);
                buf
            })
            .collect())
    }

    /// Exact inverse of [`DelayTransform::transform`].
    pub fn inverse(&self, columns: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>, CprError> {
        self.check(columns)?;
        let k = self.k;
        Ok(columns
            .iter()
            .map(|col| {
                let mut buf = col.clone();
                self.forward.process(&mut buf);
                let mut out = vec![Complex64::ZERO; k];
                for (p, slot) in out.iter_mut().enumerate() {
                    *slot = buf[(p + 1) % k];
                }
                out
            })
            .collect())
    }
}

/// One-shot delay transform of a `K x N_p` column set.
pub fn delay_transform(columns: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>, CprError> {
    let k = columns.first().map_or(0, Vec::len);
    DelayTransform::new(k).transform(columns)
}

/// One-shot inverse of [`delay_transform`].
pub fn inverse_delay_transform(columns: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>, CprError> {
    let k = columns.first().map_or(0, Vec::len);
    DelayTransform::new(k).inverse(columns)
}

// ---------------------------------------------------------------------------
// Path selection, detection, negotiation
// ---------------------------------------------------------------------------

/// Taps that rank among the `N_sel` strongest in at least `alpha_min`
/// columns. Ties at the selection boundary break toward the lower tap.
pub fn select_significant(columns: &[Vec<Complex64>], cfg: &CprConfig) -> BTreeSet<usize> {
    let Some(k) = columns.first().map(Vec::len) else {
        return BTreeSet::new();
    };
    let n_sel = cfg.n_sel.min(k);
    let mut hits = vec![0usize; k];
    let mut order: Vec<usize> = Vec::with_capacity(k);
    for col in columns {
        order.clear();
        order.extend(0..k);
        order.sort_unstable_by(|&i, &j| {
            col[j].norm_sqr().partial_cmp(&col[i].norm_sqr()).unwrap().then(i.cmp(&j))
        });
        for &tap in &order[..n_sel] {
            hits[tap] += 1;
        }
    }
    hits.iter()
        .enumerate()
        .filter(|&(_, &h)| h >= cfg.alpha_min)
        .map(|(tap, _)| tap)
        .collect()
}

/// Normalized lag-1 autocorrelation of each candidate tap's row across
/// probing rounds: the mean lag-1 product over the mean power, so a
/// constant row reports exactly 1. All-zero and single-sample rows also
/// report 1 (never a jamming suspect).
pub fn tap_autocorrelations(
    columns: &[Vec<Complex64>],
    candidates: &BTreeSet<usize>,
) -> Vec<(usize, f64)> {
    candidates
        .iter()
        .map(|&tap| {
            let row: Vec<Complex64> = columns.iter().map(|col| col[tap]).collect();
            let r0: f64 = row.iter().map(|v| v.norm_sqr()).sum();
            if r0 == 0.0 || row.len() < 2 {
                return (tap, 1.0);
            }
            let r1: Complex64 = row.windows(2).map(|w| w[1] * w[0].conj()).sum();
            let mean_r1 = r1.norm() / (row.len() - 1) as f64;
            let mean_r0 = r0 / row.len() as f64;
            (tap, mean_r1 / mean_r0)
        })
        .collect()
}

fn median_of(mut values: Vec<f64>) -> f64 {
    values.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Flags candidate taps whose gain sequence decorrelates across rounds:
/// normalized lag-1 autocorrelation below `detect_eta` and below half
/// the candidate-set median.
pub fn detect_ris_path(
    columns: &[Vec<Complex64>],
    candidates: &BTreeSet<usize>,
    cfg: &CprConfig,
) -> Result<BTreeSet<usize>, CprError> {
    if candidates.is_empty() {
        return Ok(BTreeSet::new());
    }
    const MIN_ROUNDS: usize = 8;
    if columns.len() < MIN_ROUNDS {
        return Err(CprError::TooFewRounds { min: MIN_ROUNDS, got: columns.len() });
    }
    let acf = tap_autocorrelations(columns, candidates);
    let median = median_of(acf.iter().map(|&(_, v)| v).collect());
    Ok(acf
        .into_iter()
        .filter(|&(_, v)| v < cfg.detect_eta && v < 0.5 * median)
        .map(|(tap, _)| tap)
        .collect())
}

/// Combines both parties' selections: survivors are the taps both kept
/// and neither flagged.
pub fn negotiate_paths(
    k_a: &BTreeSet<usize>,
    k_b: &BTreeSet<usize>,
    flagged_a: &BTreeSet<usize>,
    flagged_b: &BTreeSet<usize>,
) -> Result<PathReport, CprError> {
    let flagged: BTreeSet<usize> = flagged_a.union(flagged_b).copied().collect();
    let k_final: BTreeSet<usize> = k_a
        .intersection(k_b)
        .filter(|tap| !flagged.contains(tap))
        .copied()
        .collect();
    if k_final.is_empty() {
        return Err(CprError::NoUsablePaths);
    }
    Ok(PathReport { k_a: k_a.clone(), k_b: k_b.clone(), flagged, k_final })
}

/// Per-tap mean over the probing columns.
pub fn average_paths(columns: &[Vec<Complex64>], k_final: &BTreeSet<usize>) -> Vec<(usize, Complex64)> {
    let n = columns.len() as f64;
    k_final
        .iter()
        .map(|&tap| {
            let sum: Complex64 = columns.iter().map(|col| col[tap]).sum();
            (tap, sum / n)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Quantization and disagreement
// ---------------------------------------------------------------------------

/// Single-bit CDF quantization: bit `m` is 1 iff sample `m` is at least
/// the empirical median. An all-equal input quantizes to all ones.
pub fn cdf_quantize(samples: &[f64]) -> Result<Vec<bool>, CprError> {
    if samples.len() < 2 {
        return Err(CprError::TooFewSamples(samples.len()));
    }
    let median = median_of(samples.to_vec());
    Ok(samples.iter().map(|&s| s >= median).collect())
}

/// Bit disagreement ratio: Hamming distance over length.
pub fn bdr(a: &[bool], b: &[bool]) -> Result<f64, CprError> {
    if a.len() != b.len() {
        return Err(CprError::LengthMismatch { a: a.len(), b: b.len() });
    }
    if a.is_empty() {
        return Err(CprError::LengthMismatch { a: 0, b: 0 });
    }
    let mismatches = a.iter().zip(b).filter(|(x, y)| x != y).count();
    Ok(mismatches as f64 / a.len() as f64)
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

/// Per-block diagnostic record of the CPR stages.
#[derive(Debug, Clone, Serialize)]
pub struct BlockTrace {
    pub block: u64,
    pub acf_a: Vec<(usize, f64)>,
    pub acf_b: Vec<(usize, f64)>,
    pub report: Option<PathReport>,
    pub skipped: bool,
}

/// Result of a full multi-block key-generation run.
#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub key_a: BitKey,
    pub key_b: BitKey,
    pub bdr: f64,
    /// CPR stage traces, one per block; empty for the other schemes.
    pub traces: Vec<BlockTrace>,
    pub skipped_blocks: usize,
    pub total_blocks: usize,
}

impl PipelineResult {
    pub fn skip_rate(&self) -> f64 {
        self.skipped_blocks as f64 / self.total_blocks as f64
    }
}

struct BlockOutput {
    block: u64,
    /// `(source, per-round values for Alice, for Bob)`, sources ascending.
    entries: Vec<(u32, Vec<f64>, Vec<f64>)>,
    trace: Option<BlockTrace>,
    skipped: bool,
}

fn plain_entries(series: &crate::probing::ProbeSeries) -> Vec<(u32, Vec<f64>, Vec<f64>)> {
    let k = series.subcarriers();
    (0..k)
        .map(|sc| {
            let a = series.h_ba.iter().map(|col| col[sc].norm()).collect();
            let b = series.h_ab.iter().map(|col| col[sc].norm()).collect();
            (sc as u32, a, b)
        })
        .collect()
}

fn cpr_block(
    transform: &DelayTransform,
    series: &crate::probing::ProbeSeries,
    cpr: &CprConfig,
    block: u64,
) -> Result<BlockOutput, CprError> {
    let g_a = transform.transform(&series.h_ba)?;
    let g_b = transform.transform(&series.h_ab)?;
    let k_a = select_significant(&g_a, cpr);
    let k_b = select_significant(&g_b, cpr);
    let acf_a = tap_autocorrelations(&g_a, &k_a);
    let acf_b = tap_autocorrelations(&g_b, &k_b);
    let flagged_a = detect_ris_path(&g_a, &k_a, cpr)?;
    let flagged_b = detect_ris_path(&g_b, &k_b, cpr)?;
    match negotiate_paths(&k_a, &k_b, &flagged_a, &flagged_b) {
        Ok(report) => {
            let entries = average_paths(&g_a, &report.k_final)
                .into_iter()
                .zip(average_paths(&g_b, &report.k_final))
                .map(|((tap, avg_a), (_, avg_b))| (tap as u32, vec![avg_a.norm()], vec![avg_b.norm()]))
                .collect();
            let trace =
                BlockTrace { block, acf_a, acf_b, report: Some(report), skipped: false };
            Ok(BlockOutput { block, entries, trace: Some(trace), skipped: false })
        }
        Err(CprError::NoUsablePaths) => Ok(BlockOutput {
            block,
            entries: Vec::new(),
            trace: Some(BlockTrace { block, acf_a, acf_b, report: None, skipped: true }),
            skipped: true,
        }),
        Err(e) => Err(e),
    }
}

/// Runs the selected scheme over `n_blocks` coherence blocks and returns
/// both parties' raw keys, their disagreement ratio, and per-block CPR
/// reports. Blocks are simulated in parallel; every stream is keyed by
/// `(master_seed, block)`, so results do not depend on scheduling.
pub fn run_pipeline(
    s: &Scenario,
    sched: &ReflectionSchedule,
    cfg: &ProbeConfig,
    cpr: &CprConfig,
    n_blocks: usize,
    scheme: Scheme,
    master_seed: u64,
) -> Result<PipelineResult, CprError> {
    cfg.validate()?;
    cpr.validate(s.k, cfg.n_p)?;
    let noise_var = match scheme {
        Scheme::FhCrkg => Some(cfg.sigma2() / s.k as f64),
        _ => None,
    };
    let transform = DelayTransform::new(s.k);
    let blocks: Vec<BlockOutput> = (0..n_blocks as u64)
        .into_par_iter()
        .map(|block| -> Result<BlockOutput, CprError> {
            let (_, series) = simulate_block(s, sched, cfg, master_seed, block, noise_var)?;
            match scheme {
                Scheme::PlainCrkg => Ok(BlockOutput {
                    block,
                    entries: plain_entries(&series),
                    trace: None,
                    skipped: false,
                }),
                Scheme::FhCrkg => {
                    let sc = (block as usize) % s.k;
                    let a = series.h_ba.iter().map(|col| col[sc].norm()).collect();
                    let b = series.h_ab.iter().map(|col| col[sc].norm()).collect();
                    Ok(BlockOutput {
                        block,
                        entries: vec![(sc as u32, a, b)],
                        trace: None,
                        skipped: false,
                    })
                }
                Scheme::CprCrkg => cpr_block(&transform, &series, cpr, block),
            }
        })
        .collect::<Result<_, _>>()?;

    // Per-source thresholds from the pooled series. The hopping scheme
    // visits each subcarrier only every K-th block, so its sources share
    // one threshold: the hopped |h| series is identically distributed
    // across subcarriers and pooling is what keeps the median stable.
    let mut pooled: BTreeMap<u32, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for out in &blocks {
        for (source, a, b) in &out.entries {
            let key = if scheme == Scheme::FhCrkg { 0 } else { *source };
            let slot = pooled.entry(key).or_default();
            slot.0.extend_from_slice(a);
            slot.1.extend_from_slice(b);
        }
    }
    // Sources need at least two samples to quantize against a median.
    let per_source_thresholds: BTreeMap<u32, (f64, f64)> = pooled
        .into_iter()
        .filter(|(_, (a, _))| a.len() >= 2)
        .map(|(source, (a, b))| (source, (median_of(a), median_of(b))))
        .collect();
    let threshold_for = |source: u32| {
        let key = if scheme == Scheme::FhCrkg { 0 } else { source };
        per_source_thresholds.get(&key).copied()
    };

    let mut key_a = BitKey { bits: Vec::new(), source_labels: Vec::new() };
    let mut key_b = BitKey { bits: Vec::new(), source_labels: Vec::new() };
    let mut skipped_blocks = 0usize;
    let mut traces = Vec::new();
    for out in blocks {
        if out.skipped {
            skipped_blocks += 1;
        }
        for (source, a_vals, b_vals) in &out.entries {
            let Some((med_a, med_b)) = threshold_for(*source) else { continue };
            let label = BitSource { source: *source, block: out.block as u32 };
            for (&a, &b) in a_vals.iter().zip(b_vals) {
                key_a.bits.push(a >= med_a);
                key_a.source_labels.push(label);
                key_b.bits.push(b >= med_b);
                key_b.source_labels.push(label);
            }
        }
        if let Some(trace) = out.trace {
            traces.push(trace);
        }
    }
    if key_a.bits.is_empty() {
        return Err(CprError::EmptyKey(n_blocks));
    }
    let ratio = bdr(&key_a.bits, &key_b.bits)?;
    Ok(PipelineResult {
        key_a,
        key_b,
        bdr: ratio,
        traces,
        skipped_blocks,
        total_blocks: n_blocks,
    })
}
