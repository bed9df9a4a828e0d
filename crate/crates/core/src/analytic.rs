//! Closed-form Landau-Zener/Klein predictions and the laboratory-to-Dirac map.
//!
//! The laboratory side is parameterized by the Lamb-Dicke factor η and the
//! bichromatic Rabi frequencies and detunings of the two drives. With Δ as
//! the unit of length and ħ = 1 the identifications are
//!
//! * c   = 2 η Ω̃₁           (Δ/μs)
//! * mc² = Ω₁                (rad/μs)
//! * g   = η Ω̃₂             (linear slope, rad/μs per Δ)
//! * q   = η² Ω̃₂² / (2 Ω₂)  (quadratic curvature, rad/μs per Δ²)

use std::f64::consts::PI;

use crate::dirac::{DiracParams, Potential};
use crate::units::khz_to_rad_per_us;
use crate::{Error, Result};

/// Above this ratio ηΩ̃₂/Ω₂ the effective quadratic potential is a poor model.
pub const QUADRATIC_ADIABATICITY_WARN: f64 = 0.15;

/// Which potential the second drive realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IonScenario {
    Free,
    Linear,
    Quadratic,
}

impl IonScenario {
    pub fn as_str(self) -> &'static str {
        match self {
            IonScenario::Free => "free",
            IonScenario::Linear => "linear",
            IonScenario::Quadratic => "quadratic",
        }
    }
}

impl std::str::FromStr for IonScenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" | "none" => Ok(IonScenario::Free),
            "linear" => Ok(IonScenario::Linear),
            "quadratic" => Ok(IonScenario::Quadratic),
            other => Err(Error::InvalidParams(format!("unknown potential '{other}'"))),
        }
    }
}

/// Laboratory-side knobs. All frequencies are angular, in rad/μs.
#[derive(Clone, Debug, PartialEq)]
pub struct IonParams {
    pub eta: f64,
    /// Ground-state width in nm. Metadata only; Δ is the internal length unit.
    pub delta_nm: f64,
    pub omega_tilde1: f64,
    pub omega1: f64,
    pub omega_tilde2: f64,
    pub omega2: f64,
    pub omega_prep2: f64,
    pub fock_cutoff: usize,
}

impl IonParams {
    /// Linear-slope settings used for the tunneling sequences; `omega_tilde2_khz`
    /// selects the slope.
    pub fn linear_slope(omega_tilde2_khz: f64) -> Self {
        Self {
            eta: 0.044,
            delta_nm: 7.0,
            omega_tilde1: khz_to_rad_per_us(17.5),
            omega1: khz_to_rad_per_us(1.3),
            omega_tilde2: khz_to_rad_per_us(omega_tilde2_khz),
            omega2: 0.0,
            omega_prep2: 0.0,
            fock_cutoff: 256,
        }
    }

    /// Quadratic-potential settings (rest mass 2π·0.65 kHz, detuning 2π·33 kHz).
    pub fn quadratic_well(omega_tilde2_khz: f64) -> Self {
        Self {
            eta: 0.044,
            delta_nm: 7.0,
            omega_tilde1: khz_to_rad_per_us(17.5),
            omega1: khz_to_rad_per_us(0.65),
            omega_tilde2: khz_to_rad_per_us(omega_tilde2_khz),
            omega2: khz_to_rad_per_us(33.0),
            omega_prep2: khz_to_rad_per_us(83.0),
            fock_cutoff: 256,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta < 0.3) {
            return Err(Error::InvalidParams(format!(
                "eta must lie in (0, 0.3), got {}",
                self.eta
            )));
        }
        let freqs = [
            ("omega_tilde1", self.omega_tilde1),
            ("omega1", self.omega1),
            ("omega_tilde2", self.omega_tilde2),
            ("omega2", self.omega2),
            ("omega_prep2", self.omega_prep2),
        ];
        for (name, w) in freqs {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "{name} must be >= 0, got {w}"
                )));
            }
        }
        if self.fock_cutoff < 8 {
            return Err(Error::InvalidParams(format!(
                "fock_cutoff must be >= 8, got {}",
                self.fock_cutoff
            )));
        }
        Ok(())
    }

    /// Scenario implied by the drive settings: no second drive is free, an
    /// undetuned second drive is linear and a detuned one is quadratic.
    pub fn implied_scenario(&self) -> IonScenario {
        if self.omega_tilde2 == 0.0 {
            IonScenario::Free
        } else if self.omega2 == 0.0 {
            IonScenario::Linear
        } else {
            IonScenario::Quadratic
        }
    }

    /// ηΩ̃₂/Ω₂, the small parameter of the quadratic-potential elimination.
    pub fn quadratic_adiabaticity(&self) -> Option<f64> {
        (self.omega2 > 0.0).then(|| self.eta * self.omega_tilde2 / self.omega2)
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(r) = self.quadratic_adiabaticity() {
            if self.implied_scenario() == IonScenario::Quadratic && r > QUADRATIC_ADIABATICITY_WARN
            {
                out.push(format!(
                    "eta*omega_tilde2/omega2 = {r:.3} > {QUADRATIC_ADIABATICITY_WARN}; \
                     quadratic potential is not a good effective model"
                ));
            }
        }
        out
    }

    pub fn speed_of_light(&self) -> f64 {
        2.0 * self.eta * self.omega_tilde1
    }

    pub fn rest_energy(&self) -> f64 {
        self.omega1
    }

    pub fn slope(&self) -> f64 {
        self.eta * self.omega_tilde2
    }

    pub fn curvature(&self) -> Result<f64> {
        if self.omega2 <= 0.0 {
            return Err(Error::InvalidParams(
                "quadratic potential needs omega2 > 0".into(),
            ));
        }
        Ok(self.eta * self.eta * self.omega_tilde2 * self.omega_tilde2 / (2.0 * self.omega2))
    }
}

/// Map laboratory parameters to the simulated Dirac particle, using the
/// scenario implied by the drive settings.
pub fn map_ion_to_dirac(ion: &IonParams) -> Result<DiracParams> {
    map_ion_to_dirac_as(ion, ion.implied_scenario())
}

pub fn map_ion_to_dirac_as(ion: &IonParams, scenario: IonScenario) -> Result<DiracParams> {
    ion.validate()?;
    let potential = match scenario {
        IonScenario::Free => Potential::None,
        IonScenario::Linear => Potential::Linear { g: ion.slope() },
        IonScenario::Quadratic => Potential::Quadratic {
            q: ion.curvature()?,
        },
    };
    DiracParams::new(ion.speed_of_light(), ion.rest_energy(), potential)
}

/// Adiabaticity parameter Γ = (mc²)² / (2 c g) (ħ = 1), equal to m²c³/2ħg.
pub fn klein_gamma(mc2: f64, c: f64, g: f64) -> Result<f64> {
    if !(g > 0.0) {
        return Err(Error::InvalidParams(format!(
            "slope g must be > 0, got {g}"
        )));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidParams(format!("c must be > 0, got {c}")));
    }
    Ok(mc2 * mc2 / (2.0 * c * g))
}

/// Γ = Ω₁² / (4 η² Ω̃₁ Ω̃₂) straight from the laboratory settings.
pub fn ion_gamma(ion: &IonParams) -> Result<f64> {
    let denom = 4.0 * ion.eta * ion.eta * ion.omega_tilde1 * ion.omega_tilde2;
    if !(denom > 0.0) {
        return Err(Error::InvalidParams(
            "ion_gamma needs eta, omega_tilde1, omega_tilde2 > 0".into(),
        ));
    }
    Ok(ion.omega1 * ion.omega1 / denom)
}

/// Landau-Zener tunneling probability e^(−2πΓ).
pub fn tunnel_prob_analytic(gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "Gamma must be >= 0, got {gamma}"
        )));
    }
    Ok((-2.0 * PI * gamma).exp())
}

/// Analytic tunneling probability for a parameter set; zero slope means no
/// tunneling at all.
pub fn analytic_tunneling(ion: &IonParams) -> Result<f64> {
    if ion.omega_tilde2 == 0.0 {
        return Ok(0.0);
    }
    tunnel_prob_analytic(ion_gamma(ion)?)
}
