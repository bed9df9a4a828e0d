use super::{DiracParams, Spectral, SpinorField};
use crate::C64;

/// Energy branch of the free Dirac Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Positive,
    Negative,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Positive => 1.0,
            Branch::Negative => -1.0,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Branch::Positive => Branch::Negative,
            Branch::Negative => Branch::Positive,
        }
    }
}

/// Entries (p00, p01, p11) of the symmetric projector (1 ± H_free(p)/E(p))/2.
/// At E = 0 (massless, p = 0) the mode is split half/half.
pub(crate) fn projector(params: &DiracParams, p: f64, branch: Branch) -> (f64, f64, f64) {
    let e = params.energy(p);
    if e == 0.0 {
        return (0.5, 0.0, 0.5);
    }
    let s = branch.sign();
    (
        0.5 * (1.0 + s * params.mc2 / e),
        0.5 * s * params.c * p / e,
        0.5 * (1.0 - s * params.mc2 / e),
    )
}

pub(crate) fn project_momentum(
    grid: &crate::Grid,
    params: &DiracParams,
    branch: Branch,
    u: &mut [C64],
    l: &mut [C64],
) {
    for k in 0..u.len() {
        let (a, b, d) = projector(params, grid.p(k), branch);
        let (x, y) = (u[k], l[k]);
        u[k] = x * a + y * b;
        l[k] = x * b + y * d;
    }
}

pub(crate) fn project_with(
    state: &SpinorField,
    params: &DiracParams,
    branch: Branch,
    fft: &Spectral,
) -> SpinorField {
    let (mut u, mut l) = state.to_momentum(fft);
    project_momentum(&state.grid, params, branch, &mut u, &mut l);
    fft.inverse(&mut u);
    fft.inverse(&mut l);
    SpinorField {
        grid: state.grid.clone(),
        upper: u,
        lower: l,
        time: state.time,
    }
}

/// Applies the free-particle branch projector P± per momentum component. The
/// result is not renormalized; its norm is the branch population.
pub fn branch_project(state: &SpinorField, params: &DiracParams, branch: Branch) -> SpinorField {
    let fft = Spectral::new(state.grid.len());
    project_with(state, params, branch, &fft)
}

/// Fraction of the state's norm in the given branch.
pub fn branch_population(
    state: &SpinorField,
    params: &DiracParams,
    branch: Branch,
    fft: &Spectral,
) -> f64 {
    let (mut u, mut l) = state.to_momentum(fft);
    let total: f64 = u.iter().chain(&l).map(|v| v.norm_sqr()).sum();
    project_momentum(&state.grid, params, branch, &mut u, &mut l);
    let part: f64 = u.iter().chain(&l).map(|v| v.norm_sqr()).sum();
    part / total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::{make_gaussian_spinor, Potential};
    use crate::Grid;

    fn fig2_params() -> DiracParams {
        DiracParams::new(0.009676, 0.008168, Potential::None).unwrap()
    }

    fn random_state(grid: &Grid) -> SpinorField {
        let mut s = make_gaussian_spinor(
            grid,
            0.5,
            -1.2,
            1.3,
            [C64::new(0.3, 0.4), C64::new(-0.7, 0.1)],
        )
        .unwrap();
        for j in 0..grid.len() {
            let x = grid.x(j);
            s.upper[j] *= C64::from_polar(1.0, 0.3 * x * x);
            s.lower[j] *= C64::new(1.0 + 0.1 * x.sin(), 0.2 * x.cos());
        }
        s.normalize();
        s
    }

    #[test]
    fn projectors_complete() {
        let g = Grid::new(512, -32.0, 32.0).unwrap();
        let s = random_state(&g);
        let params = fig2_params();
        let plus = branch_project(&s, &params, Branch::Positive);
        let minus = branch_project(&s, &params, Branch::Negative);
        for j in 0..g.len() {
            assert!((plus.upper[j] + minus.upper[j] - s.upper[j]).norm() < 1e-12);
            assert!((plus.lower[j] + minus.lower[j] - s.lower[j]).norm() < 1e-12);
        }
    }

    #[test]
    fn projectors_idempotent_and_orthogonal() {
        let g = Grid::new(512, -32.0, 32.0).unwrap();
        let s = random_state(&g);
        let params = fig2_params();
        let plus = branch_project(&s, &params, Branch::Positive);
        let twice = branch_project(&plus, &params, Branch::Positive);
        assert!(plus.distance(&twice) < 1e-12);
        let cross = branch_project(&plus, &params, Branch::Negative);
        assert!(cross.norm_sqr().sqrt() < 1e-12);
    }

    #[test]
    fn massless_plane_wave_is_positive() {
        // For mc² = 0 the positive eigenvector at p > 0 is (1, 1)/√2.
        let g = Grid::new(1024, -40.0, 40.0).unwrap();
        let params = DiracParams::new(1.0, 0.0, Potential::None).unwrap();
        let s = make_gaussian_spinor(&g, 0.0, 8.0, 2.0, [C64::new(1.0, 0.0), C64::new(1.0, 0.0)])
            .unwrap();
        let fft = Spectral::new(g.len());
        let pop = branch_population(&s, &params, Branch::Positive, &fft);
        assert!((pop - 1.0).abs() < 1e-12, "pop = {pop}");
    }

    #[test]
    fn zero_energy_mode_splits_evenly() {
        let params = DiracParams::new(1.0, 0.0, Potential::None).unwrap();
        assert_eq!(projector(&params, 0.0, Branch::Positive), (0.5, 0.0, 0.5));
        assert_eq!(projector(&params, 0.0, Branch::Negative), (0.5, 0.0, 0.5));
    }

    #[test]
    fn kicked_packet_is_mostly_positive() {
        let g = Grid::default_scattering();
        let s = make_gaussian_spinor(&g, 0.0, 3.5, 1.0, [C64::new(1.0, 0.0), C64::new(1.0, 0.0)])
            .unwrap();
        let fft = Spectral::new(g.len());
        let pop = branch_population(&s, &fig2_params(), Branch::Positive, &fft);
        assert!(pop > 0.98, "pop = {pop}");
    }
}
