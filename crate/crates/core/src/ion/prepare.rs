use std::f64::consts::FRAC_1_SQRT_2;

use super::fock::FockVector;
use super::hamiltonian::{HamiltonianSpec, LambDickeMode, Motion, Pauli};
use super::krylov::KrylovPropagator;
use crate::analytic::{IonParams, IonScenario};
use crate::{Error, Result, C64};

/// Initial-state recipes, all starting from the motional ground state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Recipe {
    /// Qubit₁ in (1,1)/√2, then a displacement along the momentum quadrature.
    MomentumKick { p0: f64 },
    /// Qubit₁ in (1,0), then the preparation coupling ηΩ_prep·x̂·σx⁽¹⁾ for
    /// `duration` μs.
    Prep2 { duration: f64 },
    /// `Prep2` followed by a momentum displacement.
    Prep2PlusKick { duration: f64, p0: f64 },
}

/// Qubit₂ starts in the +1 eigenstate of the operator that turns its
/// coupling into a potential: σx for the linear slope, σz for the quadratic well.
pub fn qubit2_preparation(scenario: IonScenario) -> [C64; 2] {
    match scenario {
        IonScenario::Free | IonScenario::Linear => [C64::new(FRAC_1_SQRT_2, 0.0); 2],
        IonScenario::Quadratic => [C64::new(1.0, 0.0), C64::default()],
    }
}

/// Applies the displacement D(α) with α = x/2 + i·p, i.e. exp(−i(x·p̂ − p·x̂)),
/// to the motion regardless of the qubit states.
pub fn displace(state: &FockVector, x: f64, p: f64) -> Result<FockVector> {
    let h = HamiltonianSpec::new(state.cutoff(), 0.0, LambDickeMode::Ideal)
        .with_term(1, Pauli::I, Motion::Momentum, x)
        .with_term(1, Pauli::I, Motion::Position, -p);
    let prop = KrylovPropagator::from_spec(&h)?;
    let mut out = state.clone();
    out.amplitudes = prop.apply(&state.amplitudes, 1.0)?;
    Ok(out)
}

/// Builds the initial joint state for a scenario. The preparation pulse uses
/// the bichromatic phase for which the pulse creates positive-energy spinors:
/// H_prep = −ηΩ_prep x̂ σx⁽¹⁾, so the pulse is exp(+iηΩ_prep t x̂ σx⁽¹⁾).
pub fn prepare_initial(
    ion: &IonParams,
    scenario: IonScenario,
    recipe: Recipe,
) -> Result<FockVector> {
    ion.validate()?;
    let n = ion.fock_cutoff;
    let q2 = qubit2_preparation(scenario);
    let state = match recipe {
        Recipe::MomentumKick { p0 } => {
            let s = FockVector::ground(n, [C64::new(FRAC_1_SQRT_2, 0.0); 2], q2)?;
            if p0 == 0.0 {
                s
            } else {
                displace(&s, 0.0, p0)?
            }
        }
        Recipe::Prep2 { duration } => prep2(ion, q2, duration)?,
        Recipe::Prep2PlusKick { duration, p0 } => displace(&prep2(ion, q2, duration)?, 0.0, p0)?,
    };
    state.check_cutoff(0).map_err(|e| match e {
        Error::CutoffOverflow { tail, .. } => Error::InvalidParams(format!(
            "cutoff {n} too small for the requested preparation (tail {tail:e})"
        )),
        other => other,
    })?;
    Ok(state)
}

fn prep2(ion: &IonParams, q2: [C64; 2], duration: f64) -> Result<FockVector> {
    if !(duration >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "duration must be >= 0, got {duration}"
        )));
    }
    let s = FockVector::ground(ion.fock_cutoff, [C64::new(1.0, 0.0), C64::default()], q2)?;
    let h = HamiltonianSpec::new(ion.fock_cutoff, ion.eta, LambDickeMode::Ideal).with_term(
        1,
        Pauli::X,
        Motion::Position,
        -ion.eta * ion.omega_prep2,
    );
    let prop = KrylovPropagator::from_spec(&h)?;
    let mut out = s.clone();
    out.amplitudes = prop.apply(&s.amplitudes, duration)?;
    Ok(out)
}
