//! Truncated-Fock-space emulation of the two-ion analogue simulator.
//!
//! The joint state lives in qubit₁ ⊗ qubit₂ ⊗ oscillator with N motional
//! levels. Qubit basis state 0 is (1, 0), the upper spinor component. With Δ
//! as the unit of length the motional quadratures are x̂ = a + a† and
//! p̂ = i(a† − a)/2, so [x̂, p̂] = i.

mod decode;
mod fock;
mod hamiltonian;
mod krylov;
mod operators;
mod prepare;

pub use decode::{decode_spinor, encode_spinor, Decoded, HermiteBasis, QUBIT2_PURITY_MIN};
pub use fock::{FockVector, MotionalState, CUTOFF_TAIL_FRACTION, CUTOFF_TAIL_MAX};
pub use hamiltonian::{
    build_hamiltonian, lamb_dicke_corrected_couplings, HamiltonianSpec, LambDickeMode, Motion,
    Pauli, SparseMatrix, Term,
};
pub use krylov::{propagate, KrylovPropagator, KRYLOV_TOL};
pub use operators::{
    coherent_amplitude, ladder_elements, laguerre, lamb_dicke_factor, phase_space_point,
    sideband_element, MotionOp,
};
pub use prepare::{displace, prepare_initial, qubit2_preparation, Recipe};
