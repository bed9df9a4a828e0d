//! Strang-split propagator: half potential kick, exact free step in momentum
//! space, half potential kick.
//!
//! Both factors are exactly unitary, so the scheme is unconditionally stable.
//! The local error is O(dt³·‖[H_free,[H_free,V]]‖), which for the potentials
//! used here scales like dt³·c²·|V''| + dt³·c·|V'|². The only hard limit is
//! that one potential kick must not alias in momentum space:
//! dt·max|V'(x)| < p_max/4 over the grid.

use super::spinor::edge_mass;
use super::{DiracParams, Spectral, SpinorField};
use crate::{Error, Grid, Result, C64};

/// Maximum |‖ψ‖² − ‖ψ₀‖²| tolerated before a run is declared unstable.
pub const NORM_DRIFT_MAX: f64 = 1e-6;
/// Maximum probability in the outer grid margins (position or momentum).
pub const BOUNDARY_DENSITY_MAX: f64 = 1e-8;

/// Precomputed step factors for a fixed grid, parameter set and time step.
#[derive(Clone, Debug)]
pub struct SplitOperator {
    grid: Grid,
    dt: f64,
    fft: Spectral,
    /// exp(−i dt H_free(p)) as (u00, u01, u11); u10 = u01.
    kinetic: Vec<(C64, C64, C64)>,
    half_kick: Vec<C64>,
}

impl SplitOperator {
    pub fn new(grid: &Grid, params: &DiracParams, dt: f64) -> Result<Self> {
        params.validate()?;
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParams(format!("dt must be > 0, got {dt}")));
        }
        let max_slope = (0..grid.len())
            .map(|j| params.potential.slope_at(grid.x(j)).abs())
            .fold(0.0, f64::max);
        if dt * max_slope >= grid.p_max() / 4.0 {
            return Err(Error::InvalidParams(format!(
                "potential kick per step {:.3} aliases on a grid with p_max {:.3}",
                dt * max_slope,
                grid.p_max()
            )));
        }
        let kinetic = (0..grid.len())
            .map(|k| {
                let p = grid.p(k);
                let e = params.energy(p);
                let (cos, sinc) = if e == 0.0 {
                    (1.0, dt)
                } else {
                    ((e * dt).cos(), (e * dt).sin() / e)
                };
                let i = C64::i();
                (
                    C64::new(cos, 0.0) - i * sinc * params.mc2,
                    -i * sinc * params.c * p,
                    C64::new(cos, 0.0) + i * sinc * params.mc2,
                )
            })
            .collect();
        let half_kick = (0..grid.len())
            .map(|j| C64::from_polar(1.0, -0.5 * dt * params.potential.at(grid.x(j))))
            .collect();
        Ok(Self {
            grid: grid.clone(),
            dt,
            fft: Spectral::new(grid.len()),
            kinetic,
            half_kick,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn spectral(&self) -> &Spectral {
        &self.fft
    }

    /// One Strang step in place. Returns the probability found in the outer
    /// momentum bands, which signals aliasing when it grows.
    pub fn step(&self, state: &mut SpinorField) -> f64 {
        for j in 0..self.grid.len() {
            state.upper[j] *= self.half_kick[j];
            state.lower[j] *= self.half_kick[j];
        }
        self.fft.forward(&mut state.upper);
        self.fft.forward(&mut state.lower);
        let n = self.grid.len();
        let mut band = 0.0;
        let mut total = 0.0;
        let margin = (n / 32).max(1);
        for k in 0..n {
            let (a, b, d) = self.kinetic[k];
            let (u, l) = (state.upper[k], state.lower[k]);
            state.upper[k] = a * u + b * l;
            state.lower[k] = b * u + d * l;
            let w = state.upper[k].norm_sqr() + state.lower[k].norm_sqr();
            total += w;
            // bins n/2 ± margin hold |p| closest to p_max
            if k.abs_diff(n / 2) < margin {
                band += w;
            }
        }
        self.fft.inverse(&mut state.upper);
        self.fft.inverse(&mut state.lower);
        for j in 0..n {
            state.upper[j] *= self.half_kick[j];
            state.lower[j] *= self.half_kick[j];
        }
        state.time += self.dt;
        band / total
    }

    /// Advances `n_steps`, checking norm drift and boundary leakage after every
    /// step. `step_offset` only labels errors.
    pub fn advance(
        &self,
        state: &mut SpinorField,
        n_steps: usize,
        step_offset: usize,
    ) -> Result<()> {
        let norm0 = state.norm_sqr();
        for s in 0..n_steps {
            let band = self.step(state);
            let step = step_offset + s + 1;
            let rho = state.density();
            let norm = rho.iter().sum::<f64>() * self.grid.dx();
            let drift = (norm - norm0).abs();
            if drift > NORM_DRIFT_MAX || !norm.is_finite() {
                return Err(Error::Instability { step, drift });
            }
            if band > BOUNDARY_DENSITY_MAX {
                return Err(Error::BoundaryLeak {
                    step,
                    space: "momentum",
                    density: band,
                });
            }
            let edge = edge_mass(&rho, self.grid.dx());
            if edge > BOUNDARY_DENSITY_MAX {
                return Err(Error::BoundaryLeak {
                    step,
                    space: "position",
                    density: edge,
                });
            }
        }
        Ok(())
    }
}

/// Advances `state` by `n_steps·dt` under the full Dirac Hamiltonian.
pub fn evolve(
    state: &SpinorField,
    params: &DiracParams,
    dt: f64,
    n_steps: usize,
) -> Result<SpinorField> {
    let drift = (state.norm_sqr() - 1.0).abs();
    if drift > NORM_DRIFT_MAX {
        return Err(Error::InvalidParams(format!(
            "input state is not normalized (|norm-1| = {drift:e})"
        )));
    }
    let op = SplitOperator::new(&state.grid, params, dt)?;
    let mut out = state.clone();
    op.advance(&mut out, n_steps, 0)?;
    Ok(out)
}
