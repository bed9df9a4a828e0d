use crate::{Error, Result};

/// Electrostatic potential energy V(x) seen by the particle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Potential {
    None,
    /// V(x) = g·x, g in rad/μs per Δ.
    Linear {
        g: f64,
    },
    /// V(x) = q·x², q in rad/μs per Δ². Either sign is accepted.
    Quadratic {
        q: f64,
    },
}

impl Potential {
    pub fn at(&self, x: f64) -> f64 {
        match *self {
            Potential::None => 0.0,
            Potential::Linear { g } => g * x,
            Potential::Quadratic { q } => q * x * x,
        }
    }

    pub fn slope_at(&self, x: f64) -> f64 {
        match *self {
            Potential::None => 0.0,
            Potential::Linear { g } => g,
            Potential::Quadratic { q } => 2.0 * q * x,
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, Potential::None)
    }
}

/// Simulated-particle parameters: c in Δ/μs, mc² in rad/μs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiracParams {
    pub c: f64,
    pub mc2: f64,
    pub potential: Potential,
}

impl DiracParams {
    pub fn new(c: f64, mc2: f64, potential: Potential) -> Result<Self> {
        let p = Self { c, mc2, potential };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::InvalidParams(format!(
                "c must be > 0, got {}",
                self.c
            )));
        }
        if !(self.mc2 >= 0.0) || !self.mc2.is_finite() {
            return Err(Error::InvalidParams(format!(
                "mc2 must be >= 0, got {}",
                self.mc2
            )));
        }
        match self.potential {
            Potential::Linear { g } if !(g >= 0.0) => Err(Error::InvalidParams(format!(
                "slope g must be >= 0, got {g}"
            ))),
            Potential::Quadratic { q } if !q.is_finite() => Err(Error::InvalidParams(format!(
                "curvature q must be finite, got {q}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn free(&self) -> Self {
        Self {
            potential: Potential::None,
            ..*self
        }
    }

    /// Free-particle energy √(c²p² + (mc²)²).
    pub fn energy(&self, p: f64) -> f64 {
        (self.c * self.c * p * p + self.mc2 * self.mc2).sqrt()
    }

    /// Rest momentum mc in ħ/Δ.
    pub fn rest_momentum(&self) -> f64 {
        self.mc2 / self.c
    }
}
