//! Gravcat phase from geometrized Newtonian gravity.
//!
//! The energy put into a gravcat branch that sits in potential `φ'` rather
//! than `φ` reduces to `m ∫ (φ' − φ) dt`; for a static difference this is
//! `m Δφ T`, and the phase is that energy divided by `ħ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gie::{phase_rate, redshift_phase, GravcatConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialDifference {
    /// J/kg
    Constant(f64),
    Sampled { times: Vec<f64>, values: Vec<f64> },
}

impl PotentialDifference {
    pub fn sampled(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let p = PotentialDifference::Sampled { times, values };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialDifference::Constant(v) if v.is_finite() => Ok(()),
            PotentialDifference::Constant(_) => Err(Error::param("delta_phi", "must be finite")),
            PotentialDifference::Sampled { times, values } => {
                if times.len() != values.len() {
                    return Err(Error::DimensionMismatch {
                        expected: times.len(),
                        actual: values.len(),
                    });
                }
                if times.len() < 2 {
                    return Err(Error::param("samples", "need at least 2"));
                }
                if times.iter().chain(values).any(|x| !x.is_finite()) {
                    return Err(Error::param("samples", "must be finite"));
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::param("times", "must be strictly increasing"));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NcPhaseReport {
    /// J
    pub energy: f64,
    /// rad
    pub phase: f64,
    /// rad; filled when compared against the direct Newtonian phase
    pub comparison_phase: Option<f64>,
}

pub fn static_differential_phase(mass: f64, delta_phi: f64, duration: f64, hbar: f64) -> Result<NcPhaseReport> {
    if !(hbar > 0.0) {
        return Err(Error::param("hbar", "must be positive"));
    }
    let energy = mass * delta_phi * duration;
    Ok(NcPhaseReport {
        energy,
        phase: energy / hbar,
        comparison_phase: None,
    })
}

/// `G m (1/δ_near − 1/δ_far)`; `δ_far = ∞` drops the second term.
pub fn gravcat_potential_difference(cfg: &GravcatConfig, far: f64) -> f64 {
    let g_m = cfg.constants.g * cfg.mass;
    g_m / cfg.delta() - if far.is_infinite() { 0.0 } else { g_m / far }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quadrature {
    Trapezoid,
    /// Needs uniform spacing and an even number of intervals.
    Simpson,
}

/// `m ∫ Δφ dt` by composite quadrature.
pub fn worldline_energy_integral(mass: f64, dphi: &PotentialDifference, rule: Quadrature) -> Result<f64> {
    dphi.validate()?;
    let (times, values) = match dphi {
        PotentialDifference::Constant(_) => {
            return Err(Error::param("delta_phi", "sampled potential difference required"))
        }
        PotentialDifference::Sampled { times, values } => (times, values),
    };
    let integral = match rule {
        Quadrature::Trapezoid => times
            .windows(2)
            .zip(values.windows(2))
            .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
            .sum(),
        Quadrature::Simpson => simpson(times, values)?,
    };
    Ok(mass * integral)
}

fn simpson(times: &[f64], values: &[f64]) -> Result<f64> {
    let intervals = times.len() - 1;
    if !intervals.is_multiple_of(2) {
        return Err(Error::param("samples", "Simpson needs an even number of intervals"));
    }
    let h = (times[intervals] - times[0]) / intervals as f64;
    let uniform = times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
    if !uniform {
        return Err(Error::param("times", "Simpson needs uniform spacing"));
    }
    let mut s = values[0] + values[intervals];
    for (k, v) in values.iter().enumerate().take(intervals).skip(1) {
        s += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    Ok(s * h / 3.0)
}

/// `∂_t S + (∂_x S)²/2m + V` for `S = p x − E t`.
pub fn hamilton_jacobi_residual(p: f64, energy: f64, potential: f64, mass: f64) -> Result<f64> {
    if !(mass > 0.0) {
        return Err(Error::param("mass", "must be positive"));
    }
    Ok(-energy + p * p / (2.0 * mass) + potential)
}

/// The closest-pair relative phase three ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThreeWayComparison {
    pub newtonian: f64,
    pub redshift: f64,
    pub newton_cartan: f64,
    pub max_relative_spread: f64,
}

pub fn three_way_comparison(cfg: &GravcatConfig, body_radius: f64) -> Result<ThreeWayComparison> {
    cfg.validate()?;
    let newtonian = phase_rate(cfg) * cfg.duration;
    let redshift = redshift_phase(cfg, body_radius)?;
    let dphi = gravcat_potential_difference(cfg, f64::INFINITY);
    let mut nc = static_differential_phase(cfg.mass, dphi, cfg.duration, cfg.constants.hbar)?;
    nc.comparison_phase = Some(newtonian);
    let phases = [newtonian, redshift, nc.phase];
    let hi = phases.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = phases.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = newtonian.abs().max(f64::MIN_POSITIVE);
    Ok(ThreeWayComparison {
        newtonian,
        redshift,
        newton_cartan: nc.phase,
        max_relative_spread: (hi - lo) / scale,
    })
}

/// Uniform sample grid on `[0, duration]` with `intervals` steps.
pub fn sample_uniform(f: impl Fn(f64) -> f64, duration: f64, intervals: usize) -> Result<PotentialDifference> {
    if intervals == 0 {
        return Err(Error::param("intervals", "must be at least 1"));
    }
    let times: Vec<f64> = (0..=intervals)
        .map(|k| duration * k as f64 / intervals as f64)
        .collect();
    let values = times.iter().map(|&t| f(t)).collect();
    PotentialDifference::sampled(times, values)
}
