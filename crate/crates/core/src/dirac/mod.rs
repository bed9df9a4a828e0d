//! Grid-based solver for the 1D Dirac equation
//! iψ̇ = (c p̂ σx + mc² σz + V(x)) ψ.

mod branch;
mod frames;
mod params;
mod propagator;
mod spectral;
mod spinor;

pub use branch::{branch_population, branch_project, Branch};
pub use frames::{
    record_frames, tunnel_probability, tunnel_probability_position, turning_point_tail, Frame,
    FrameSeries,
    SEPARATION_OVERLAP_MAX,
};
pub use params::{DiracParams, Potential};
pub use propagator::{evolve, SplitOperator, BOUNDARY_DENSITY_MAX, NORM_DRIFT_MAX};
pub use spectral::Spectral;
pub use spinor::{make_gaussian_spinor, prep2_spinor, SpinorField, GAUSSIAN_TAIL_MAX};
