#![allow(dead_code)]

use kleinsim::analytic::{map_ion_to_dirac_as, IonParams, IonScenario};
use kleinsim::dirac::{make_gaussian_spinor, DiracParams, SpinorField};
use kleinsim::{Grid, C64};

pub fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// Dirac parameters of the linear-slope sequence at the given drive.
pub fn slope_params(omega_tilde2_khz: f64) -> DiracParams {
    let scenario = if omega_tilde2_khz == 0.0 {
        IonScenario::Free
    } else {
        IonScenario::Linear
    };
    map_ion_to_dirac_as(&IonParams::linear_slope(omega_tilde2_khz), scenario).unwrap()
}

/// The kicked ground-state packet of the tunneling runs.
pub fn kicked_packet(grid: &Grid) -> SpinorField {
    make_gaussian_spinor(grid, 0.0, 3.5, 1.0, [one(), one()]).unwrap()
}

pub fn flat(s: &SpinorField) -> Vec<C64> {
    s.upper.iter().chain(&s.lower).copied().collect()
}
