//! Gravitationally induced entanglement between two gravcats.
//!
//! Each gravcat is a qubit whose basis states `|L⟩ = |0⟩`, `|R⟩ = |1⟩` label
//! the two wavepacket locations. Gravcat 1 sits at `-D ∓ Δ`, gravcat 2 at
//! `D ∓ Δ`, so the closest pair (`R₁`, `L₂`) is `δ = 2(D − Δ)` apart.
//! Branch index is `2·x₁ + x₂`: LL = 0, LR = 1, RL = 2, RR = 3.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{
    chsh_max, negativity, partial_trace, Bipartition, CVector, DensityMatrix, PureState,
};
use crate::units::Constants;

pub const LL: usize = 0;
pub const LR: usize = 1;
pub const RL: usize = 2;
pub const RR: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GravcatConfig {
    /// kg
    pub mass: f64,
    /// `D`, m
    pub half_separation: f64,
    /// `Δ`, m
    pub packet_offset: f64,
    /// s
    pub duration: f64,
    #[serde(default)]
    pub constants: Constants,
}

impl GravcatConfig {
    pub fn new(mass: f64, half_separation: f64, packet_offset: f64, duration: f64) -> Result<Self> {
        let cfg = GravcatConfig {
            mass,
            half_separation,
            packet_offset,
            duration,
            constants: Constants::CODATA,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Configuration with closest-pair separation `δ` and the packets split by
    /// `2Δ = D` (so `D = δ`, `Δ = δ/2`).
    pub fn from_closest_separation(mass: f64, delta: f64, duration: f64) -> Result<Self> {
        Self::new(mass, delta, delta / 2.0, duration)
    }

    pub fn with_constants(mut self, constants: Constants) -> Self {
        self.constants = constants;
        self
    }

    pub fn with_duration(mut self, duration: f64) -> Self {
        self.duration = duration;
        self
    }

    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.mass, self.half_separation, self.packet_offset, self.duration]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::param("gravcat", "parameters must be finite"));
        }
        if self.mass <= 0.0 {
            return Err(Error::param("mass", "must be positive"));
        }
        if self.packet_offset <= 0.0 {
            return Err(Error::param("packet_offset", "must be positive"));
        }
        if self.packet_offset >= self.half_separation {
            return Err(Error::param(
                "packet_offset",
                "must be smaller than half_separation (coincident packets are singular)",
            ));
        }
        if self.constants.hbar <= 0.0 {
            return Err(Error::param("hbar", "must be positive"));
        }
        Ok(())
    }

    /// Closest-pair separation `δ = 2(D − Δ)`.
    pub fn delta(&self) -> f64 {
        2.0 * (self.half_separation - self.packet_offset)
    }

    /// Pair energies `[E_LL, E_LR, E_RL, E_RR]` in joules (magnitudes of the
    /// Newtonian interaction; the common sign is a convention).
    pub fn branch_energies(&self) -> [f64; 4] {
        let gm2 = self.constants.g * self.mass * self.mass;
        let (d, o) = (self.half_separation, self.packet_offset);
        let same = gm2 / (2.0 * d);
        [same, gm2 / (2.0 * d + 2.0 * o), gm2 / (2.0 * d - 2.0 * o), same]
    }

    /// Relative phase of the short-time form, `θ = −Gm²t/ħδ`.
    pub fn approx_theta(&self) -> f64 {
        -phase_rate(self) * self.duration
    }

    /// Branch-phase combination `φ_LR + φ_RL − φ_LL − φ_RR` of the exact
    /// state, sign-aligned with [`approx_theta`](Self::approx_theta).
    pub fn exact_theta(&self) -> f64 {
        let e = self.branch_energies();
        -(e[LR] + e[RL] - e[LL] - e[RR]) * self.duration / self.constants.hbar
    }
}

/// `Gm²/(ħδ)` in rad/s.
pub fn phase_rate(cfg: &GravcatConfig) -> f64 {
    cfg.constants.g * cfg.mass * cfg.mass / (cfg.constants.hbar * cfg.delta())
}

fn two_qubit(amps: [C64; 4]) -> PureState {
    PureState::new(vec![2, 2], amps.to_vec()).expect("four nonzero amplitudes")
}

pub fn exact_state(cfg: &GravcatConfig) -> Result<PureState> {
    cfg.validate()?;
    let e = cfg.branch_energies();
    let w = cfg.duration / cfg.constants.hbar;
    Ok(two_qubit(e.map(|ek| C64::from_polar(0.5, -ek * w))))
}

/// `(|LL⟩ + |LR⟩ + e^{iθ}|RL⟩ + |RR⟩)/2` for an explicit `θ`.
pub fn approx_state_from_theta(theta: f64) -> PureState {
    let one = C64::new(0.5, 0.0);
    two_qubit([one, one, C64::from_polar(0.5, theta), one])
}

pub fn approx_state(cfg: &GravcatConfig) -> Result<PureState> {
    cfg.validate()?;
    Ok(approx_state_from_theta(cfg.approx_theta()))
}

/// Packet positions `[L, R]` of gravcat 1 and 2.
fn packet_positions(cfg: &GravcatConfig) -> [[f64; 2]; 2] {
    let (d, o) = (cfg.half_separation, cfg.packet_offset);
    [[-d - o, -d + o], [d - o, d + o]]
}

/// One-body mean-field potentials `[[V_L1, V_R1], [V_L2, V_R2]]` in rad/s,
/// each gravcat feeling the other's 50/50 packet distribution.
pub fn newton_schrodinger_potentials(cfg: &GravcatConfig) -> [[f64; 2]; 2] {
    let pos = packet_positions(cfg);
    let gm2 = cfg.constants.g * cfg.mass * cfg.mass;
    let mut v = [[0.0; 2]; 2];
    for (i, row) in v.iter_mut().enumerate() {
        let other = pos[1 - i];
        for (x, slot) in row.iter_mut().enumerate() {
            let here = pos[i][x];
            let field: f64 = other.iter().map(|p| 1.0 / (here - p).abs()).sum();
            *slot = -0.5 * gm2 * field / cfg.constants.hbar;
        }
    }
    v
}

pub fn newton_schrodinger_state(cfg: &GravcatConfig) -> Result<PureState> {
    cfg.validate()?;
    let v = newton_schrodinger_potentials(cfg);
    let t = cfg.duration;
    let single = |vv: [f64; 2]| {
        PureState::new(
            vec![2],
            vec![C64::from_polar(1.0, -vv[0] * t), C64::from_polar(1.0, -vv[1] * t)],
        )
        .expect("unit-modulus amplitudes")
    };
    Ok(crate::quantum::tensor(&single(v[0]), &single(v[1])))
}

/// Four unit vectors in `C⁴` with pairwise overlap `η`: the columns of
/// `sqrt((1−η)I + ηJ) = sqrt(1−η) I + (sqrt(1+3η) − sqrt(1−η))/4 · J`.
pub fn mediator_vectors(eta: f64) -> Result<[[f64; 4]; 4]> {
    if !(-1.0 / 3.0..=1.0).contains(&eta) {
        return Err(Error::param("eta", format!("{eta} outside [-1/3, 1]")));
    }
    let a = (1.0 - eta).sqrt();
    let b = ((1.0 + 3.0 * eta).sqrt() - a) / 4.0;
    let mut v = [[b; 4]; 4];
    for (k, col) in v.iter_mut().enumerate() {
        col[k] += a;
    }
    Ok(v)
}

/// Gravcat ⊗ mediator ⊗ gravcat state and its gravcat-gravcat reduction.
#[derive(Debug, Clone)]
pub struct TripartiteState {
    /// dims `[2, 4, 2]`
    pub full: PureState,
    /// dims `[2, 2]`
    pub reduced: DensityMatrix,
}

impl TripartiteState {
    pub fn density(&self) -> DensityMatrix {
        self.full.to_density()
    }
}

pub fn tripartite_state(cfg: &GravcatConfig, eta: f64) -> Result<TripartiteState> {
    cfg.validate()?;
    tripartite_state_from_theta(cfg.approx_theta(), eta)
}

pub fn tripartite_state_from_theta(theta: f64, eta: f64) -> Result<TripartiteState> {
    let gamma = mediator_vectors(eta)?;
    let branch = approx_state_from_theta(theta);
    let mut amps = CVector::zeros(16);
    for x in 0..2 {
        for y in 0..2 {
            let xy = 2 * x + y;
            for k in 0..4 {
                amps[x * 8 + k * 2 + y] = branch.amplitudes()[xy] * gamma[xy][k];
            }
        }
    }
    let full = PureState::from_vector(vec![2, 4, 2], amps)?;
    let reduced = partial_trace(&full.to_density(), &[0, 2])?;
    Ok(TripartiteState { full, reduced })
}

/// Spin read-out state `(|↑↑⟩ + |↑↓⟩ + e^{iθ}|↓↑⟩ + |↓↓⟩)/2` with `↑ = 0`.
pub fn spin_protocol_state(cfg: &GravcatConfig) -> Result<PureState> {
    approx_state(cfg)
}

/// Proper time `T(1 − Gm/Rc² − Gm/sc²)` of a gravcat of radius `R` at
/// distance `s` from its partner.
pub fn proper_time(cfg: &GravcatConfig, radius: f64, separation: f64) -> f64 {
    let k = cfg.constants;
    let c2 = k.c * k.c;
    cfg.duration * (1.0 - k.g * cfg.mass / (radius * c2) - k.g * cfg.mass / (separation * c2))
}

/// Separation-dependent part of the mass-energy phase `mc²τ/ħ` for the
/// closest pair, `(mc²/ħ)·T·Gm/(δc²)`. The self term `Gm/R` is common to all
/// branches and drops out.
pub fn redshift_phase(cfg: &GravcatConfig, radius: f64) -> Result<f64> {
    cfg.validate()?;
    if !(radius > 0.0) {
        return Err(Error::param("radius", "must be positive"));
    }
    let delta = cfg.delta();
    if delta <= radius {
        return Err(Error::param(
            "radius",
            format!("closest separation {delta} must exceed body radius {radius}"),
        ));
    }
    let k = cfg.constants;
    let c2 = k.c * k.c;
    let rest_rate = cfg.mass * c2 / k.hbar;
    let dilation = k.g * cfg.mass / (delta * c2);
    Ok(rest_rate * cfg.duration * dilation)
}

/// Tolerance on the negativity comparison inside [`onset_time`].
const ONSET_TOL: f64 = 1e-14;

/// Smallest `t > 0` at which the short-time state reaches negativity `ε`.
pub fn onset_time(cfg: &GravcatConfig, eps: f64) -> Result<f64> {
    cfg.validate()?;
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::param("epsilon", format!("{eps} outside (0, 0.5]")));
    }
    let rate = phase_rate(cfg);
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::param("phase_rate", "must be positive"));
    }
    let cut = Bipartition::first();
    let reached = |t: f64| -> bool {
        let psi = approx_state_from_theta(-rate * t);
        negativity(&psi.to_density(), &cut).unwrap_or(0.0) >= eps - ONSET_TOL
    };
    let (mut lo, mut hi) = (0.0, PI / rate);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if reached(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "eta", rename_all = "snake_case")]
pub enum MediatorModel {
    NewtonianDirect,
    NewtonSchrodinger,
    /// Mediator states with uniform pairwise overlap `η`.
    QuantumMediator(f64),
    /// Which-branch record in a superselected (dephased) mediator.
    ClassicalBit,
}

impl MediatorModel {
    pub fn name(&self) -> &'static str {
        match self {
            MediatorModel::NewtonianDirect => "newtonian_direct",
            MediatorModel::NewtonSchrodinger => "newton_schrodinger",
            MediatorModel::QuantumMediator(_) => "quantum_mediator",
            MediatorModel::ClassicalBit => "classical_bit",
        }
    }
}

#[derive(Debug, Clone)]
pub struct GieResult {
    pub model: MediatorModel,
    /// gravcat-gravcat state
    pub state: DensityMatrix,
    pub theta: f64,
    pub negativity: f64,
    pub chsh: Option<f64>,
}

/// Runs one model; `with_chsh` adds the spin read-out CHSH value.
pub fn simulate(cfg: &GravcatConfig, model: MediatorModel, with_chsh: bool) -> Result<GieResult> {
    cfg.validate()?;
    let (state, theta) = match model {
        MediatorModel::NewtonianDirect => (exact_state(cfg)?.to_density(), cfg.exact_theta()),
        MediatorModel::NewtonSchrodinger => (newton_schrodinger_state(cfg)?.to_density(), 0.0),
        MediatorModel::QuantumMediator(eta) => {
            (tripartite_state(cfg, eta)?.reduced, cfg.approx_theta())
        }
        MediatorModel::ClassicalBit => {
            let full = tripartite_state(cfg, 0.0)?.density().dephase(1)?;
            (partial_trace(&full, &[0, 2])?, cfg.approx_theta())
        }
    };
    let neg = negativity(&state, &Bipartition::first())?;
    let chsh = if with_chsh {
        Some(chsh_max(&state)?)
    } else {
        None
    };
    Ok(GieResult {
        model,
        state,
        theta,
        negativity: neg,
        chsh,
    })
}
