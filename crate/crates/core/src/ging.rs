//! Gravitationally induced non-Gaussianity of a single condensate mode.
//!
//! The mode lives in a truncated Fock space `|0⟩..|N_max⟩`. Quantum gravity
//! gives the Kerr term `(λ/2) a†a†aa`; a classical field gives `λ a†a`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{diag_phase_evolve, CMatrix, CVector, PureState};
use crate::units::Constants;

pub const LEAKAGE_BOUND: f64 = 1e-8;

/// Smallest `N_max` accepted for coherent amplitude `α`.
pub fn min_cutoff(alpha: C64) -> usize {
    let a = alpha.norm();
    (a * a + 6.0 * a + 10.0).ceil() as usize
}

/// State of one bosonic mode truncated at `N_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState(PureState);

impl FockState {
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n = amps.len();
        Ok(FockState(PureState::new(vec![n], amps)?))
    }

    pub fn number(n: usize, cutoff: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::param("n", format!("{n} above cutoff {cutoff}")));
        }
        Ok(FockState(PureState::basis(vec![cutoff + 1], n)?))
    }

    pub fn cutoff(&self) -> usize {
        self.0.len() - 1
    }

    pub fn amplitudes(&self) -> &CVector {
        self.0.amplitudes()
    }

    pub fn as_pure(&self) -> &PureState {
        &self.0
    }

    /// Population of the top retained level.
    pub fn leakage(&self) -> f64 {
        self.amplitudes()[self.cutoff()].norm_sqr()
    }

    /// Phase-space rotation `a ↦ a e^{−iφ}`.
    pub fn rotate(&self, phi: f64) -> FockState {
        let energies: Vec<f64> = (0..=self.cutoff()).map(|n| n as f64).collect();
        FockState(diag_phase_evolve(&self.0, &energies, phi).expect("length matches"))
    }
}

pub fn coherent_state(alpha: C64, cutoff: usize) -> Result<FockState> {
    let need = min_cutoff(alpha);
    if cutoff < need {
        return Err(Error::param(
            "cutoff",
            format!("{cutoff} too small for |alpha| = {}; need at least {need}", alpha.norm()),
        ));
    }
    let mut amps = Vec::with_capacity(cutoff + 1);
    let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    amps.push(c);
    for n in 1..=cutoff {
        c *= alpha / (n as f64).sqrt();
        amps.push(c);
    }
    FockState::from_amplitudes(amps)
}

/// Kerr spectrum `(λ/2) n(n−1)`.
pub fn kerr_energies(lambda: f64, cutoff: usize) -> Vec<f64> {
    (0..=cutoff).map(|n| 0.5 * lambda * (n * n.saturating_sub(1)) as f64).collect()
}

/// Number-operator spectrum `λ n`.
pub fn number_energies(lambda: f64, cutoff: usize) -> Vec<f64> {
    (0..=cutoff).map(|n| lambda * n as f64).collect()
}

/// `(H_QG, H_CG)` as dense diagonal matrices.
pub fn build_hamiltonians(lambda: f64, cutoff: usize) -> (CMatrix, CMatrix) {
    let diag = |e: Vec<f64>| {
        CMatrix::from_diagonal(&CVector::from_iterator(e.len(), e.into_iter().map(|x| C64::new(x, 0.0))))
    };
    (diag(kerr_energies(lambda, cutoff)), diag(number_energies(lambda, cutoff)))
}

/// `λ_QG = −Gm²/(ħ√π σ)` for a normalized isotropic Gaussian density of
/// per-axis standard deviation `σ`.
pub fn gaussian_coupling(mass: f64, sigma: f64, k: &Constants) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::param("sigma", "must be positive"));
    }
    Ok(-k.g * mass * mass / (k.hbar * PI.sqrt() * sigma))
}

/// Monte-Carlo estimate of `−Gm²/ħ ∫∫ |ψ(r)|²|ψ(r')|²/|r − r'|` with
/// independent Gaussian samples for `r` and `r'`.
pub fn monte_carlo_coupling(mass: f64, sigma: f64, k: &Constants, samples: usize, seed: u64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::param("sigma", "must be positive"));
    }
    if samples == 0 {
        return Err(Error::param("samples", "must be at least 1"));
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::param("sigma", e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    for _ in 0..samples {
        let mut d2 = 0.0;
        for _ in 0..3 {
            let d = normal.sample(&mut rng) - normal.sample(&mut rng);
            d2 += d * d;
        }
        sum += 1.0 / d2.sqrt();
    }
    Ok(-k.g * mass * mass / k.hbar * sum / samples as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dynamics {
    /// Kerr term from a quantized gravitational self-interaction.
    Qg,
    /// Number-operator term from a classical potential.
    Cg,
}

fn default_cutoff() -> usize {
    40
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BecConfig {
    /// atom mass, kg
    pub atom_mass: f64,
    /// width of `|ψ|²`, m
    pub sigma: f64,
    /// condensate radius, m
    pub radius: f64,
    /// condensate mass, kg
    pub total_mass: f64,
    /// s
    pub duration: f64,
    /// rad/s; derived from `σ` when absent
    #[serde(default)]
    pub coupling: Option<f64>,
    #[serde(default = "default_cutoff")]
    pub cutoff: usize,
    pub alpha: f64,
    #[serde(default)]
    pub alpha_phase: f64,
    #[serde(default)]
    pub constants: Constants,
}

impl BecConfig {
    pub fn alpha(&self) -> C64 {
        C64::from_polar(self.alpha, self.alpha_phase)
    }

    pub fn lambda(&self) -> Result<f64> {
        match self.coupling {
            Some(l) if l.is_finite() => Ok(l),
            Some(_) => Err(Error::param("coupling", "must be finite")),
            None => gaussian_coupling(self.atom_mass, self.sigma, &self.constants),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("atom_mass", self.atom_mass),
            ("sigma", self.sigma),
            ("radius", self.radius),
            ("total_mass", self.total_mass),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be positive"));
            }
        }
        if !(self.duration >= 0.0 && self.duration.is_finite()) {
            return Err(Error::param("duration", "must be non-negative"));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::param("alpha", "modulus must be non-negative"));
        }
        self.lambda()?;
        let need = min_cutoff(self.alpha());
        if self.cutoff < need {
            return Err(Error::param("cutoff", format!("need at least {need}")));
        }
        Ok(())
    }
}

/// Evolves a coherent state for `t` under `λ`, rejecting states whose top
/// level is populated beyond [`LEAKAGE_BOUND`].
pub fn evolve_coherent(alpha: C64, cutoff: usize, lambda: f64, t: f64, which: Dynamics) -> Result<FockState> {
    let start = coherent_state(alpha, cutoff)?;
    let energies = match which {
        Dynamics::Qg => kerr_energies(lambda, cutoff),
        Dynamics::Cg => number_energies(lambda, cutoff),
    };
    let out = FockState(diag_phase_evolve(start.as_pure(), &energies, t)?);
    let leakage = out.leakage();
    if leakage >= LEAKAGE_BOUND {
        return Err(Error::Leakage {
            leakage,
            bound: LEAKAGE_BOUND,
        });
    }
    Ok(out)
}

pub fn evolve_bec(cfg: &BecConfig, which: Dynamics) -> Result<FockState> {
    cfg.validate()?;
    evolve_coherent(cfg.alpha(), cfg.cutoff, cfg.lambda()?, cfg.duration, which)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonGaussianityReport {
    /// `⟨a⟩` as `[re, im]`
    pub mean_a: [f64; 2],
    /// `⟨a²⟩` as `[re, im]`
    pub mean_a2: [f64; 2],
    pub mean_n: f64,
    pub nu: f64,
    /// nats
    pub delta_g: f64,
}

fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// Von Neumann entropy of a single-mode Gaussian state with symplectic
/// eigenvalue `ν` (vacuum-normalized so that `ν = 1` is pure).
pub fn gaussian_entropy(nu: f64) -> f64 {
    let nu = nu.max(1.0);
    xlnx((nu + 1.0) / 2.0) - xlnx((nu - 1.0) / 2.0)
}

/// Entropy of the Gaussian state with the same first and second moments.
///
/// With `N = ⟨a†a⟩ − |⟨a⟩|²` and `M = ⟨a²⟩ − ⟨a⟩²` the quadrature covariance
/// has symplectic eigenvalue `ν = sqrt((2N+1)² − 4|M|²)`.
pub fn non_gaussianity(state: &FockState) -> NonGaussianityReport {
    let c = state.amplitudes();
    let top = state.cutoff();
    let mut a = C64::new(0.0, 0.0);
    let mut a2 = C64::new(0.0, 0.0);
    let mut n_mean = 0.0;
    for n in 0..=top {
        n_mean += n as f64 * c[n].norm_sqr();
        if n < top {
            a += c[n].conj() * c[n + 1] * ((n + 1) as f64).sqrt();
        }
        if n + 1 < top {
            a2 += c[n].conj() * c[n + 2] * (((n + 1) * (n + 2)) as f64).sqrt();
        }
    }
    let big_n = n_mean - a.norm_sqr();
    let big_m = a2 - a * a;
    let nu = ((2.0 * big_n + 1.0).powi(2) - 4.0 * big_m.norm_sqr()).max(0.0).sqrt();
    NonGaussianityReport {
        mean_a: [a.re, a.im],
        mean_a2: [a2.re, a2.im],
        mean_n: n_mean,
        nu,
        delta_g: gaussian_entropy(nu),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnrReport {
    /// `(ct/R)(m/M_P)²`
    pub ging_snr: f64,
    /// `(ct/δ)(m/M_P)²`, equal to `Gm²t/(ħδ)`
    pub gie_phase: f64,
    /// `sqrt(2/π) GMt/(Rc²)`, s
    pub delta_tau: f64,
    /// `(M/M_P)(δτ/t_P)`
    pub mass_time_ratio: f64,
}

impl SnrReport {
    /// The two quantities differ only through `R` versus `δ`.
    pub fn matched(&self, rel_tol: f64) -> bool {
        (self.ging_snr - self.gie_phase).abs() <= rel_tol * self.gie_phase.abs()
    }
}

pub fn snr_identity(
    total_mass: f64,
    atom_mass: f64,
    radius: f64,
    delta: f64,
    t: f64,
    k: &Constants,
) -> Result<SnrReport> {
    for (name, v) in [
        ("total_mass", total_mass),
        ("atom_mass", atom_mass),
        ("radius", radius),
        ("delta", delta),
        ("t", t),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::param(name, "must be positive"));
        }
    }
    let mp = k.planck_mass();
    let ratio2 = (atom_mass / mp).powi(2);
    let delta_tau = (2.0 / PI).sqrt() * k.g * total_mass * t / (radius * k.c * k.c);
    Ok(SnrReport {
        ging_snr: k.c * t / radius * ratio2,
        gie_phase: k.c * t / delta * ratio2,
        delta_tau,
        mass_time_ratio: total_mass / mp * delta_tau / k.planck_time(),
    })
}
