//! Scenario configuration files.
//!
//! A config is one JSON object:
//!
//! ```json
//! {
//!   "scenario": "gie-sweep",
//!   "seed": 7,
//!   "output": "sweep.csv",
//!   "sweep": { "axis": "t", "start": 0.0, "stop": 10.0, "steps": 100, "scale": "linear" },
//!   "params": { "m": 1e-14, "D": 1e-4, "Delta": 5e-5, "t": 1.0 }
//! }
//! ```
//!
//! Only `scenario` is required. Missing `params` fall back to the scenario's
//! demo defaults; missing fields inside `params` take their documented
//! defaults. Unknown fields are rejected at every level.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gravlab_core::gedanken::{GridSpec, DEFAULT_CRR_MARGIN};
use gravlab_core::gie::{GravcatConfig, MediatorModel};
use gravlab_core::ging::{BecConfig, Dynamics};
use gravlab_core::precursors::CowConfig;
use gravlab_core::Constants;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    GieState,
    GieSweep,
    NogoVerify,
    GedankenScan,
    Cow,
    Cavendish,
    GingEvolve,
    NcCheck,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::GieState,
        Scenario::GieSweep,
        Scenario::NogoVerify,
        Scenario::GedankenScan,
        Scenario::Cow,
        Scenario::Cavendish,
        Scenario::GingEvolve,
        Scenario::NcCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::GieState => "gie-state",
            Scenario::GieSweep => "gie-sweep",
            Scenario::NogoVerify => "nogo-verify",
            Scenario::GedankenScan => "gedanken-scan",
            Scenario::Cow => "cow",
            Scenario::Cavendish => "cavendish",
            Scenario::GingEvolve => "ging-evolve",
            Scenario::NcCheck => "nc-check",
        }
    }

    pub fn uses_randomness(self) -> bool {
        matches!(self, Scenario::NogoVerify | Scenario::Cavendish)
    }

    /// Sweep axes the scenario understands; empty if it takes no sweep.
    pub fn sweep_axes(self) -> &'static [&'static str] {
        match self {
            Scenario::GieSweep => &["t", "m", "D", "Delta"],
            Scenario::GingEvolve => &["t"],
            _ => &[],
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| CliError::schema(format!("unknown scenario `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl SweepSpec {
    pub fn linear(axis: &str, start: f64, stop: f64, steps: usize) -> Self {
        SweepSpec {
            axis: axis.to_string(),
            start,
            stop,
            steps,
            scale: Scale::Linear,
        }
    }

    pub fn validate(&self, scenario: Scenario) -> Result<()> {
        let axes = scenario.sweep_axes();
        if !axes.contains(&self.axis.as_str()) {
            return Err(CliError::schema(format!(
                "sweep.axis: `{}` is not a sweep axis of {scenario} (expected one of {axes:?})",
                self.axis
            )));
        }
        if self.steps == 0 {
            return Err(CliError::schema("sweep.steps: must be at least 1"));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(CliError::schema("sweep.start/stop: must be finite"));
        }
        if self.scale == Scale::Log && !(self.start > 0.0 && self.stop > 0.0) {
            return Err(CliError::schema("sweep.scale: log sweeps need positive start and stop"));
        }
        Ok(())
    }

    /// Sweep points, endpoints included, in sweep order.
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                let f = k as f64 / last;
                match self.scale {
                    Scale::Linear => self.start + (self.stop - self.start) * f,
                    Scale::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * f).exp(),
                }
            })
            .collect()
    }
}

fn yes() -> bool {
    true
}

/// Gravcat pair; shared by `gie-state` and `gie-sweep`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GieParams {
    #[serde(alias = "m")]
    pub mass: f64,
    #[serde(alias = "D")]
    pub half_separation: f64,
    #[serde(alias = "Delta")]
    pub packet_offset: f64,
    #[serde(alias = "t")]
    pub duration: f64,
    #[serde(default)]
    pub constants: Constants,
    /// Empty means the scenario default.
    #[serde(default)]
    pub models: Vec<MediatorModel>,
    #[serde(default = "yes")]
    pub chsh: bool,
}

impl GieParams {
    pub fn gravcat(&self) -> GravcatConfig {
        GravcatConfig {
            mass: self.mass,
            half_separation: self.half_separation,
            packet_offset: self.packet_offset,
            duration: self.duration,
            constants: self.constants,
        }
    }
}

fn default_trials() -> usize {
    1000
}
fn default_coupling() -> f64 {
    1.0
}
fn default_counter_time() -> f64 {
    FRAC_PI_2
}
fn default_zeno_steps() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NogoParams {
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Counterexample coupling `g`.
    #[serde(default = "default_coupling")]
    pub coupling: f64,
    /// Counterexample evolution time.
    #[serde(default = "default_counter_time")]
    pub time: f64,
    #[serde(default = "default_zeno_steps")]
    pub zeno_steps: usize,
}

fn default_margin() -> f64 {
    DEFAULT_CRR_MARGIN
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanParams {
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "default_margin")]
    pub crr_margin: f64,
    /// One row per grid point instead of the summary row.
    #[serde(default)]
    pub emit_points: bool,
}

fn default_runs() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavendishParams {
    #[serde(default = "default_runs")]
    pub runs: usize,
}

fn default_dynamics() -> Dynamics {
    Dynamics::Qg
}
fn default_samples() -> usize {
    101
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GingParams {
    pub bec: BecConfig,
    #[serde(default = "default_dynamics")]
    pub dynamics: Dynamics,
    /// Points on `[0, duration]` when no sweep is given.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NcParams {
    #[serde(alias = "m")]
    pub mass: f64,
    #[serde(alias = "D")]
    pub half_separation: f64,
    #[serde(alias = "Delta")]
    pub packet_offset: f64,
    #[serde(alias = "t")]
    pub duration: f64,
    #[serde(default)]
    pub constants: Constants,
    /// Radius of the sourcing bodies; defaults to 1% of the closest separation.
    #[serde(default)]
    pub body_radius: Option<f64>,
}

impl NcParams {
    pub fn gravcat(&self) -> GravcatConfig {
        GravcatConfig {
            mass: self.mass,
            half_separation: self.half_separation,
            packet_offset: self.packet_offset,
            duration: self.duration,
            constants: self.constants,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    Gie(GieParams),
    Nogo(NogoParams),
    Scan(ScanParams),
    Cow(CowConfig),
    Cavendish(CavendishParams),
    Ging(GingParams),
    Nc(NcParams),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    pub params: Params,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Scenario,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    output: Option<PathBuf>,
    #[serde(default)]
    sweep: Option<SweepSpec>,
    #[serde(default)]
    params: Option<serde_json::Value>,
}

fn demo_gravcat() -> (f64, f64, f64, f64) {
    // 10⁻¹⁴ kg, 100 µm closest approach, far branches 2 cm apart; θ ≈ π after 5 s
    (1e-14, 1e-2, 9.95e-3, 5.0)
}

fn demo_params(scenario: Scenario) -> Params {
    let (mass, half_separation, packet_offset, duration) = demo_gravcat();
    match scenario {
        Scenario::GieState | Scenario::GieSweep => Params::Gie(GieParams {
            mass,
            half_separation,
            packet_offset,
            duration,
            constants: Constants::CODATA,
            models: Vec::new(),
            chsh: true,
        }),
        Scenario::NogoVerify => Params::Nogo(NogoParams {
            trials: default_trials(),
            coupling: default_coupling(),
            time: default_counter_time(),
            zeno_steps: default_zeno_steps(),
        }),
        Scenario::GedankenScan => Params::Scan(ScanParams {
            grid: GridSpec::default(),
            crr_margin: DEFAULT_CRR_MARGIN,
            emit_points: false,
        }),
        Scenario::Cow => Params::Cow(CowConfig::neutron_example()),
        Scenario::Cavendish => Params::Cavendish(CavendishParams { runs: default_runs() }),
        Scenario::GingEvolve => Params::Ging(GingParams {
            // unit Kerr rate so one revival fits in the window
            bec: BecConfig {
                atom_mass: 1.443e-25,
                sigma: 1e-6,
                radius: 1e-5,
                total_mass: 1e-20,
                duration: std::f64::consts::TAU,
                coupling: Some(1.0),
                cutoff: 40,
                alpha: 2.0,
                alpha_phase: 0.0,
                constants: Constants::CODATA,
            },
            dynamics: Dynamics::Qg,
            samples: default_samples(),
        }),
        Scenario::NcCheck => Params::Nc(NcParams {
            mass,
            half_separation,
            packet_offset,
            duration,
            constants: Constants::CODATA,
            body_radius: None,
        }),
    }
}

fn parse_params<T: DeserializeOwned>(value: serde_json::Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| CliError::schema(format!("params: {e}")))
}

impl ScenarioConfig {
    /// Demo configuration for a scenario, with defaults filled.
    pub fn default_for(scenario: Scenario) -> Self {
        let mut cfg = ScenarioConfig {
            scenario,
            seed: None,
            output: None,
            sweep: None,
            params: demo_params(scenario),
        };
        cfg.fill_defaults();
        cfg
    }

    fn fill_defaults(&mut self) {
        match &mut self.params {
            Params::Gie(p) if p.models.is_empty() => {
                p.models = match self.scenario {
                    Scenario::GieSweep => vec![MediatorModel::NewtonianDirect],
                    _ => vec![
                        MediatorModel::NewtonianDirect,
                        MediatorModel::NewtonSchrodinger,
                        MediatorModel::QuantumMediator(0.5),
                        MediatorModel::ClassicalBit,
                    ],
                }
            }
            Params::Nc(p) if p.body_radius.is_none() => {
                let cfg = p.gravcat();
                p.body_radius = Some(cfg.delta() / 100.0);
            }
            _ => {}
        }
        if self.sweep.is_none() && self.scenario == Scenario::GieSweep {
            if let Params::Gie(p) = &self.params {
                self.sweep = Some(SweepSpec::linear("t", 0.0, 2.0 * p.duration, 100));
            }
        }
    }

    /// Schema checks plus the physics validators of the target module.
    pub fn validate(&self) -> Result<()> {
        if self.scenario.uses_randomness() && self.seed.is_none() {
            return Err(CliError::schema(format!(
                "seed: required for scenario `{}`",
                self.scenario
            )));
        }
        match &self.sweep {
            Some(s) => s.validate(self.scenario)?,
            None if self.scenario == Scenario::GieSweep => {
                return Err(CliError::schema("sweep: required for scenario `gie-sweep`"))
            }
            None => {}
        }
        let invalid = CliError::Invalid;
        match (&self.params, self.scenario) {
            (Params::Gie(p), Scenario::GieState | Scenario::GieSweep) => {
                p.gravcat().validate().map_err(invalid)?;
                for m in &p.models {
                    if let MediatorModel::QuantumMediator(eta) = m {
                        if !(0.0..=1.0).contains(eta) {
                            return Err(CliError::schema("params.models: eta must lie in [0, 1]"));
                        }
                    }
                }
            }
            (Params::Nogo(p), Scenario::NogoVerify) => {
                if p.trials == 0 {
                    return Err(CliError::schema("params.trials: must be at least 1"));
                }
                if !(p.coupling.is_finite() && p.time.is_finite() && p.time >= 0.0) {
                    return Err(CliError::schema("params.coupling/time: must be finite, time ≥ 0"));
                }
                if p.zeno_steps == 0 {
                    return Err(CliError::schema("params.zeno_steps: must be at least 1"));
                }
            }
            (Params::Scan(p), Scenario::GedankenScan) => {
                p.grid.validate().map_err(invalid)?;
                if !(p.crr_margin > 0.0 && p.crr_margin.is_finite()) {
                    return Err(CliError::schema("params.crr_margin: must be positive"));
                }
            }
            (Params::Cow(p), Scenario::Cow) => p.validate().map_err(invalid)?,
            (Params::Cavendish(p), Scenario::Cavendish) => {
                if p.runs == 0 {
                    return Err(CliError::schema("params.runs: must be at least 1"));
                }
            }
            (Params::Ging(p), Scenario::GingEvolve) => {
                p.bec.validate().map_err(invalid)?;
                if self.sweep.is_none() && p.samples == 0 {
                    return Err(CliError::schema("params.samples: must be at least 1"));
                }
            }
            (Params::Nc(p), Scenario::NcCheck) => {
                p.gravcat().validate().map_err(invalid)?;
                match p.body_radius {
                    Some(r) if r > 0.0 && r.is_finite() => {}
                    _ => return Err(CliError::schema("params.body_radius: must be positive")),
                }
            }
            _ => {
                return Err(CliError::schema(format!(
                    "params: block does not belong to scenario `{}`",
                    self.scenario
                )))
            }
        }
        Ok(())
    }

    /// Compact JSON of everything that determines the result. The output
    /// path is excluded.
    pub fn canonical_json(&self) -> Result<String> {
        let mut c = self.clone();
        c.output = None;
        serde_json::to_string(&c).map_err(|e| CliError::Serialize(e.to_string()))
    }

    pub fn hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.canonical_json()?.as_bytes())))
    }
}

/// Parses and fills defaults; does not run [`ScenarioConfig::validate`].
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let params = match raw.params {
        None => demo_params(raw.scenario),
        Some(v) => match raw.scenario {
            Scenario::GieState | Scenario::GieSweep => Params::Gie(parse_params(v)?),
            Scenario::NogoVerify => Params::Nogo(parse_params(v)?),
            Scenario::GedankenScan => Params::Scan(parse_params(v)?),
            Scenario::Cow => Params::Cow(parse_params(v)?),
            Scenario::Cavendish => Params::Cavendish(parse_params(v)?),
            Scenario::GingEvolve => Params::Ging(parse_params(v)?),
            Scenario::NcCheck => Params::Nc(parse_params(v)?),
        },
    };
    let mut cfg = ScenarioConfig {
        scenario: raw.scenario,
        seed: raw.seed,
        output: raw.output,
        sweep: raw.sweep,
        params,
    };
    cfg.fill_defaults();
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
        path: path.to_path_buf(),
        source,
    })?;
    let cfg = parse_config(&text)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn save_config(cfg: &ScenarioConfig, path: &Path) -> Result<()> {
    let mut text =
        serde_json::to_string_pretty(cfg).map_err(|e| CliError::Serialize(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}
