//! Static scenario description.
//!
//! Alice and Bob sit on a horizontal line at distance `D`; the reflecting
//! surface is mounted `H` above that line, `d_ar` along it from Alice.
//! Direct propagation paths are characterized by their lengths only; the
//! surface path is characterized by its total length, incident angle and
//! Fresnel reflectivity. All quantities here are deterministic functions
//! of the geometry — randomness enters in [`crate::channel`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SceneError {
    /// The surface coincides with a terminal; path loss diverges.
    #[error("degenerate geometry: surface coincides with {terminal} (H = 0 and d_ar = {d_ar})")]
    DegenerateGeometry { terminal: &'static str, d_ar: f64 },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid grid range: {0}")]
    InvalidRange(String),
}

/// Static world description: terminal geometry, direct paths, surface
/// parameters and the OFDM dimensioning.
///
/// Field names are the on-disk JSON names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    /// Alice–Bob horizontal distance in meters.
    #[serde(rename = "D")]
    pub d: f64,
    /// Surface height above the Alice–Bob line in meters.
    #[serde(rename = "H")]
    pub h: f64,
    /// Surface horizontal distance from Alice in meters.
    pub d_ar: f64,
    /// Number of direct propagation paths.
    #[serde(rename = "L")]
    pub l: usize,
    /// Length of each direct path in meters; the first entry is the
    /// line-of-sight path with length `D`.
    pub path_distances: Vec<f64>,
    /// Number of surface elements.
    #[serde(rename = "M")]
    pub m: usize,
    /// Per-unit-cell reflection power `E{a_i a_i*}`.
    pub beta: f64,
    /// Relative permittivity of the reflecting medium.
    pub eps_r: f64,
    /// Number of OFDM subcarriers.
    #[serde(rename = "K")]
    pub k: usize,
    /// System bandwidth in Hz; maps path delays to tap units.
    pub bandwidth_hz: f64,
    /// Round path delays to integer tap indices (exact delay-domain
    /// separation) instead of keeping fractional taps.
    #[serde(default)]
    pub integer_taps: bool,
}

impl Scenario {
    /// Checks the structural invariants of the scenario.
    pub fn validate(&self) -> Result<(), SceneError> {
        let err = |m: String| Err(SceneError::InvalidScenario(m));
        if !(self.d > 0.0) {
            return err(format!("D must be positive, got {}", self.d));
        }
        if !(self.h >= 0.0) {
            return err(format!("H must be non-negative, got {}", self.h));
        }
        if !(0.0..=self.d).contains(&self.d_ar) {
            return err(format!("d_ar must lie in [0, D], got {}", self.d_ar));
        }
        if self.l < 1 {
            return err("L must be at least 1".into());
        }
        if self.path_distances.len() != self.l {
            return err(format!(
                "path_distances has {} entries, expected L = {}",
                self.path_distances.len(),
                self.l
            ));
        }
        for &dl in &self.path_distances {
            if !(dl > 0.0) || !dl.is_finite() {
                return err(format!("path distance must be positive and finite, got {dl}"));
            }
        }
        // When the first path is the line-of-sight at distance D, no other
        // path can be shorter than it.
        if (self.path_distances[0] - self.d).abs() < 1e-12 * self.d {
            if let Some(&bad) = self.path_distances.iter().find(|&&dl| dl < self.d) {
                return err(format!("path distance {bad} is shorter than the LOS distance {}", self.d));
            }
        }
        if self.m < 1 {
            return err("M must be at least 1".into());
        }
        if !(self.beta >= 0.0) {
            return err(format!("beta must be non-negative, got {}", self.beta));
        }
        if !(self.eps_r >= 1.0) {
            return err(format!("eps_r must be at least 1, got {}", self.eps_r));
        }
        if self.k < 2 {
            return err("K must be at least 2".into());
        }
        if !(self.bandwidth_hz > 0.0) {
            return err(format!("bandwidth_hz must be positive, got {}", self.bandwidth_hz));
        }
        Ok(())
    }

    /// Horizontal distance between the surface and Bob.
    pub fn d_rb(&self) -> f64 {
        self.d - self.d_ar
    }
}

/// Geometry and power gain of the surface path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RisGeometry {
    /// Total surface path length (Alice -> surface -> Bob) in meters.
    pub d_r: f64,
    /// Incident angle measured from the surface normal, in radians.
    pub theta: f64,
    /// Fresnel reflection coefficient (signed real).
    pub gamma: f64,
    /// Statistical power gain of the surface path.
    pub beta_r: f64,
}

/// Surface path length and incident angle only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Incidence {
    pub d_r: f64,
    pub theta: f64,
}

/// Path length and incident angle of the surface path.
///
/// The incident angle is half the angle subtended at the surface by the
/// two terminals, which is the specular-reflection angle measured from
/// the (beam-steered) surface normal.
pub fn incident_geometry(s: &Scenario) -> Result<Incidence, SceneError> {
    incidence_at(s.d, s.d_ar, s.h)
}

fn incidence_at(d: f64, d_ar: f64, h: f64) -> Result<Incidence, SceneError> {
    let da = (d_ar * d_ar + h * h).sqrt();
    let db = ((d - d_ar) * (d - d_ar) + h * h).sqrt();
    if da == 0.0 {
        return Err(SceneError::DegenerateGeometry { terminal: "Alice", d_ar });
    }
    if db == 0.0 {
        return Err(SceneError::DegenerateGeometry { terminal: "Bob", d_ar });
    }
    let cos_2theta = ((d_ar * d_ar + h * h - d_ar * d) / (da * db)).clamp(-1.0, 1.0);
    Ok(Incidence {
        d_r: da + db,
        theta: 0.5 * cos_2theta.acos(),
    })
}

/// Fresnel reflection coefficient of a dielectric with relative
/// permittivity `eps_r` at incident angle `theta` (from the normal).
///
/// This is the parallel-polarization form; it crosses zero at the
/// Brewster angle `atan(sqrt(eps_r))` and tends to -1 at grazing
/// incidence.
pub fn fresnel_coefficient(eps_r: f64, theta: f64) -> f64 {
    let (sin_t, cos_t) = theta.sin_cos();
    let root = (eps_r - sin_t * sin_t).sqrt();
    (eps_r * cos_t - root) / (eps_r * cos_t + root)
}

/// Surface path power gain for `m` elements of per-cell power `beta`.
pub fn surface_gain(m: usize, beta: f64, gamma: f64, theta: f64, d_r: f64) -> f64 {
    let g = gamma * theta.cos();
    m as f64 * beta * g * g / (d_r * d_r)
}

/// Complete surface-path geometry: length, angle, reflectivity and gain.
pub fn ris_path_gain(s: &Scenario) -> Result<RisGeometry, SceneError> {
    let inc = incident_geometry(s)?;
    let gamma = fresnel_coefficient(s.eps_r, inc.theta);
    Ok(RisGeometry {
        d_r: inc.d_r,
        theta: inc.theta,
        gamma,
        beta_r: surface_gain(s.m, s.beta, gamma, inc.theta, inc.d_r),
    })
}

/// Per-path power gains `1 / d^2` of the direct link.
pub fn direct_path_gains(s: &Scenario) -> Result<Vec<f64>, SceneError> {
    s.path_distances
        .iter()
        .map(|&dl| {
            if dl > 0.0 {
                Ok(1.0 / (dl * dl))
            } else {
                Err(SceneError::InvalidScenario(format!(
                    "path distance must be positive, got {dl}"
                )))
            }
        })
        .collect()
}

/// Total direct-link power gain.
pub fn sum_direct_gain(s: &Scenario) -> Result<f64, SceneError> {
    Ok(direct_path_gains(s)?.iter().sum())
}

/// Surface-path gain evaluated over a `(d_ar, H)` placement grid.
///
/// Degenerate cells (surface on a terminal) hold `None` rather than a
/// silently zeroed gain.
#[derive(Debug, Clone)]
pub struct DeploymentGrid {
    pub d_ar: Vec<f64>,
    pub h: Vec<f64>,
    /// Row-major over `h` (rows) then `d_ar` (columns).
    pub beta_r: Vec<Option<f64>>,
}

impl DeploymentGrid {
    pub fn cell(&self, h_idx: usize, d_ar_idx: usize) -> Option<f64> {
        self.beta_r[h_idx * self.d_ar.len() + d_ar_idx]
    }

    /// Grid coordinates and value of the largest finite cell.
    pub fn max_cell(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for hi in 0..self.h.len() {
            for di in 0..self.d_ar.len() {
                if let Some(v) = self.cell(hi, di) {
                    if best.map_or(true, |(_, _, b)| v > b) {
                        best = Some((hi, di, v));
                    }
                }
            }
        }
        best
    }
}

/// Inclusive linear range with `steps` points (`steps >= 1`).
fn linspace(start: f64, stop: f64, steps: usize) -> Result<Vec<f64>, SceneError> {
    if steps == 0 {
        return Err(SceneError::InvalidRange("empty range".into()));
    }
    if stop < start {
        return Err(SceneError::InvalidRange(format!("range [{start}, {stop}] is reversed")));
    }
    if steps == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (steps - 1) as f64;
    Ok((0..steps).map(|i| start + i as f64 * step).collect())
}

/// Surface-path gain over a placement grid, with the rest of the
/// scenario taken from `template`.
pub fn deployment_grid(
    template: &Scenario,
    d_ar_range: (f64, f64),
    h_range: (f64, f64),
    resolution: (usize, usize),
) -> Result<DeploymentGrid, SceneError> {
    let d_ar = linspace(d_ar_range.0, d_ar_range.1, resolution.0)?;
    let h = linspace(h_range.0, h_range.1, resolution.1)?;
    let mut beta_r = Vec::with_capacity(d_ar.len() * h.len());
    for &hv in &h {
        for &dv in &d_ar {
            let cell = incidence_at(template.d, dv, hv).ok().map(|inc| {
                let gamma = fresnel_coefficient(template.eps_r, inc.theta);
                surface_gain(template.m, template.beta, gamma, inc.theta, inc.d_r)
            });
            beta_r.push(cell);
        }
    }
    Ok(DeploymentGrid { d_ar, h, beta_r })
}

/// Direct-path lengths induced by scatterers placed uniformly in a
/// `width x height` area with Alice at the origin and Bob at `(d, 0)`.
/// Each length is `|A - S| + |S - B|`, hence never shorter than `d`.
pub fn sample_scatter_distances<R: rand::Rng>(
    d: f64,
    width: f64,
    height: f64,
    count: usize,
    rng: &mut R,
) -> Vec<f64> {
    (0..count)
        .map(|_| {
            let x: f64 = rng.random_range(0.0..width);
            let y: f64 = rng.random_range(0.0..height);
            (x * x + y * y).sqrt() + ((d - x) * (d - x) + y * y).sqrt()
        })
        .collect()
}
