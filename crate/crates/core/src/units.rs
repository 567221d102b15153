//! Physical constants.

use serde::{Deserialize, Serialize};

/// Newtonian constant of gravitation, CODATA 2018 [m^3 kg^-1 s^-2].
pub const G_CODATA: f64 = 6.674_30e-11;
/// Reduced Planck constant, CODATA 2018 [J s].
pub const HBAR_CODATA: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum [m/s].
pub const C_CODATA: f64 = 299_792_458.0;

/// The constants every experiment needs. Injectable so that tests can run in
/// natural units (`G = ħ = c = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub g: f64,
    pub hbar: f64,
    pub c: f64,
}

impl Constants {
    pub const CODATA: Constants = Constants {
        g: G_CODATA,
        hbar: HBAR_CODATA,
        c: C_CODATA,
    };

    pub const NATURAL: Constants = Constants {
        g: 1.0,
        hbar: 1.0,
        c: 1.0,
    };

    /// Planck mass `sqrt(ħc/G)`.
    pub fn planck_mass(&self) -> f64 {
        (self.hbar * self.c / self.g).sqrt()
    }

    /// Planck time `sqrt(ħG/c^5)`.
    pub fn planck_time(&self) -> f64 {
        (self.hbar * self.g / self.c.powi(5)).sqrt()
    }
}

impl Default for Constants {
    fn default() -> Self {
        Constants::CODATA
    }
}
