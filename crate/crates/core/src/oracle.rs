//! Slow, independent reference computations used to pin conventions and to
//! cross-check the fast propagators: dense matrix exponentials, the exact free
//! Dirac evolution built from a naive DFT, and closed-form coherent states.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::analytic::{IonParams, IonScenario};
use crate::dirac::{
    evolve, make_gaussian_spinor, DiracParams, Potential, SpinorField,
};
use crate::ion::{
    build_hamiltonian, ladder_elements, laguerre, prepare_initial, FockVector,
    KrylovPropagator, LambDickeMode, MotionOp, MotionalState, Recipe,
};
use crate::reconstruction::{acquire_fringes_at, COS_SIGN, SIN_SIGN};
use crate::{Error, Grid, Result, C64};

/// Largest matrix the dense exponential accepts.
pub const DENSE_DIM_CAP: usize = 256;

/// exp(−iHt) by scaling and squaring a Taylor series.
pub fn dense_expm(h: &DMatrix<C64>, t: f64) -> Result<DMatrix<C64>> {
    let n = h.nrows();
    if n != h.ncols() {
        return Err(Error::InvalidParams("Hamiltonian must be square".into()));
    }
    if n > DENSE_DIM_CAP {
        return Err(Error::DimensionCap {
            dim: n,
            cap: DENSE_DIM_CAP,
        });
    }
    let a = h * C64::new(0.0, -t);
    let norm1 = (0..n)
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 {
        (norm1 / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let a = a / C64::from(2f64.powi(squarings));
    let mut result = DMatrix::<C64>::identity(n, n);
    let mut term = DMatrix::<C64>::identity(n, n);
    for k in 1..40 {
        term = &term * &a / C64::from(k as f64);
        result += &term;
        if term.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-20 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

pub fn dense_expm_propagate(state: &[C64], h: &DMatrix<C64>, t: f64) -> Result<Vec<C64>> {
    if state.len() != h.nrows() {
        return Err(Error::InvalidParams(format!(
            "state length {} does not match Hamiltonian dimension {}",
            state.len(),
            h.nrows()
        )));
    }
    let u = dense_expm(h, t)?;
    let v = nalgebra::DVector::from_column_slice(state);
    Ok((u * v).iter().copied().collect())
}

/// Textbook O(N²) transform ψ̃(p_k) = Σ_j ψ(x_j) e^{−i p_k x_j}.
fn naive_dft(grid: &Grid, psi: &[C64], sign: f64) -> Vec<C64> {
    let n = grid.len();
    (0..n)
        .map(|k| {
            let p = grid.p(k);
            (0..n)
                .map(|j| psi[j] * C64::from_polar(1.0, sign * p * grid.x(j)))
                .sum()
        })
        .collect()
}

fn naive_idft(grid: &Grid, phi: &[C64]) -> Vec<C64> {
    let n = grid.len();
    (0..n)
        .map(|j| {
            let x = grid.x(j);
            (0..n)
                .map(|k| phi[k] * C64::from_polar(1.0, grid.p(k) * x))
                .sum::<C64>()
                / n as f64
        })
        .collect()
}

/// Exact free evolution: each momentum component evolves as
/// e^{−iEt}P₊ + e^{+iEt}P₋ with the eigenprojectors of cpσx + mc²σz.
pub fn free_dirac_momentum_solution(
    state: &SpinorField,
    params: &DiracParams,
    t: f64,
) -> Result<SpinorField> {
    if !params.potential.is_none() {
        return Err(Error::InvalidParams(
            "free solution requires a vanishing potential".into(),
        ));
    }
    let grid = &state.grid;
    let up = naive_dft(grid, &state.upper, -1.0);
    let lo = naive_dft(grid, &state.lower, -1.0);
    let mut new_up = vec![C64::default(); grid.len()];
    let mut new_lo = vec![C64::default(); grid.len()];
    for k in 0..grid.len() {
        let p = grid.p(k);
        let hx = params.c * p;
        let hz = params.mc2;
        let e = (hx * hx + hz * hz).sqrt();
        // P± = (1 ± H/E)/2
        let (nx, nz) = if e > 0.0 { (hx / e, hz / e) } else { (0.0, 0.0) };
        let plus = C64::from_polar(1.0, -e * t);
        let minus = C64::from_polar(1.0, e * t);
        let proj = |s: f64| {
            [
                [0.5 * (1.0 + s * nz), 0.5 * s * nx],
                [0.5 * s * nx, 0.5 * (1.0 - s * nz)],
            ]
        };
        let (pp, pm) = (proj(1.0), proj(-1.0));
        let u = |a: usize, b: usize| plus * pp[a][b] + minus * pm[a][b];
        new_up[k] = u(0, 0) * up[k] + u(0, 1) * lo[k];
        new_lo[k] = u(1, 0) * up[k] + u(1, 1) * lo[k];
    }
    let mut out = SpinorField::new(grid.clone(), naive_idft(grid, &new_up), naive_idft(grid, &new_lo))?;
    out.time = state.time + t;
    Ok(out)
}

/// Closed-form coherent state |α⟩ truncated at `cutoff` levels.
#[derive(Clone, Debug)]
pub struct CoherentReference {
    pub alpha: C64,
    pub amplitudes: Vec<C64>,
}

impl CoherentReference {
    /// ⟨e^{ikx̂}⟩ = exp(ik·2Re α − k²/2) for x̂ = a + a†.
    pub fn characteristic(&self, k: f64) -> C64 {
        C64::from_polar((-k * k / 2.0).exp(), 2.0 * k * self.alpha.re)
    }

    pub fn mean_phonons(&self) -> f64 {
        self.alpha.norm_sqr()
    }
}

pub fn coherent_state_reference(alpha: C64, cutoff: usize) -> Result<CoherentReference> {
    if cutoff == 0 {
        return Err(Error::InvalidParams("cutoff must be > 0".into()));
    }
    let mut amplitudes = Vec::with_capacity(cutoff);
    let mut c = C64::from((-alpha.norm_sqr() / 2.0).exp());
    for n in 0..cutoff {
        if n > 0 {
            c *= alpha / (n as f64).sqrt();
        }
        amplitudes.push(c);
    }
    let missing = 1.0 - amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if missing > 1e-12 {
        return Err(Error::CutoffOverflow {
            step: 0,
            cutoff,
            tail: missing,
            profile: Vec::new(),
        });
    }
    Ok(CoherentReference { alpha, amplitudes })
}

/// One cross-check between a fast path and a reference routine.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleCase {
    pub name: &'static str,
    pub description: &'static str,
    pub inputs: String,
    pub reference: Vec<f64>,
    pub observed: Vec<f64>,
    pub tolerance: f64,
    pub routine: &'static str,
}

impl OracleCase {
    pub fn error(&self) -> f64 {
        if self.reference.len() != self.observed.len() {
            return f64::INFINITY;
        }
        self.reference
            .iter()
            .zip(&self.observed)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.error() <= self.tolerance
    }
}

fn overlap(a: &[C64], b: &[C64]) -> f64 {
    let ip: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    ip.norm_sqr() / (na * nb)
}

/// Desk-scale ion parameters: the Fig. 2(c) couplings at a small cutoff.
pub fn desk_ion(cutoff: usize) -> IonParams {
    IonParams {
        fock_cutoff: cutoff,
        ..IonParams::linear_slope(50.0)
    }
}

fn krylov_vs_dense() -> Result<OracleCase> {
    let ion = desk_ion(30);
    let spec = build_hamiltonian(&ion, IonScenario::Linear, LambDickeMode::Ideal)?;
    let h = spec.assemble()?;
    let psi = prepare_initial(&ion, IonScenario::Linear, Recipe::MomentumKick { p0: 1.0 })?;
    let t = 100.0;
    let fast = KrylovPropagator::new(h.clone()).apply(&psi.amplitudes, t)?;
    let slow = dense_expm_propagate(&psi.amplitudes, &h.to_dense(), t)?;
    Ok(OracleCase {
        name: "krylov-vs-dense",
        description: "Krylov propagation of the linear-slope Hamiltonian against the dense exponential",
        inputs: format!("N=30, slope 50 kHz, p0=1, t={t} us"),
        reference: vec![1.0],
        observed: vec![overlap(&fast, &slow)],
        tolerance: 1e-8,
        routine: "dense_expm_propagate",
    })
}

fn free_dirac_case() -> Result<OracleCase> {
    let ion = IonParams::linear_slope(0.0);
    let params = DiracParams::new(ion.speed_of_light(), ion.rest_energy(), Potential::None)?;
    let grid = Grid::default_scattering();
    let s0 = make_gaussian_spinor(&grid, 0.0, 3.5, 1.0, [C64::new(1.0, 0.0); 2])?;
    let t = 1500.0;
    let fast = evolve(&s0, &params, 1.0, 1500)?;
    let exact = free_dirac_momentum_solution(&s0, &params, t)?;
    let a: Vec<C64> = fast.upper.iter().chain(&fast.lower).copied().collect();
    let b: Vec<C64> = exact.upper.iter().chain(&exact.lower).copied().collect();
    Ok(OracleCase {
        name: "free-dirac",
        description: "split-operator free evolution against the exact per-momentum solution",
        inputs: format!("default grid, p0=3.5, t={t} us, dt=1 us"),
        reference: vec![1.0],
        observed: vec![overlap(&a, &b)],
        tolerance: 1e-8,
        routine: "free_dirac_momentum_solution",
    })
}

fn coherent_kick_case() -> Result<OracleCase> {
    let ion = IonParams {
        fock_cutoff: 80,
        ..IonParams::linear_slope(0.0)
    };
    let s = prepare_initial(&ion, IonScenario::Free, Recipe::MomentumKick { p0: 3.5 })?;
    let reference = coherent_state_reference(C64::new(0.0, 3.5), 80)?;
    let motion: Vec<C64> = (0..80).map(|n| s.amp(0, 0, n) * 2.0).collect();
    Ok(OracleCase {
        name: "coherent-kick",
        description: "momentum kick of the ground state against the closed-form coherent state",
        inputs: "N=80, alpha=3.5i".into(),
        reference: vec![1.0, reference.mean_phonons()],
        observed: vec![overlap(&motion, &reference.amplitudes), s.mean_phonons()],
        tolerance: 1e-9,
        routine: "coherent_state_reference",
    })
}

fn fringe_case() -> Result<OracleCase> {
    let alpha = C64::new(0.7, 0.4);
    let cutoff = 60;
    let reference = coherent_state_reference(alpha, cutoff)?;
    let state = MotionalState::pure(reference.amplitudes.clone());
    let ks: Vec<f64> = (0..13).map(|i| i as f64 * 0.5).collect();
    let scan = acquire_fringes_at(&state, &ks)?;
    let mut expected = Vec::new();
    let mut observed = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        let chi = reference.characteristic(k);
        expected.extend([chi.re, chi.im]);
        observed.extend([COS_SIGN * scan.cos_signal[i], SIN_SIGN * scan.sin_signal[i]]);
    }
    Ok(OracleCase {
        name: "fringe-signals",
        description: "probe fringes of a coherent state against its characteristic function",
        inputs: format!("N={cutoff}, alpha={alpha}, k=0..6"),
        reference: expected,
        observed,
        tolerance: 1e-6,
        routine: "coherent_state_reference",
    })
}

fn lamb_dicke_case() -> Result<OracleCase> {
    let cutoff = 200;
    let eta = 0.044;
    let x = MotionOp::Position.dense(&ladder_elements(cutoff, None));
    let u = dense_expm(&(x * C64::from(-eta)), 1.0)?;
    // exp(iηX) = exp(−i(−ηX)·1)
    let levels = [0usize, 10, 50, 100];
    let mut reference = Vec::new();
    let mut observed = Vec::new();
    for &n in &levels {
        let exact = u[(n + 1, n)];
        let closed = C64::new(0.0, eta)
            * (-eta * eta / 2.0).exp()
            * laguerre(n, 1.0, eta * eta)
            / ((n + 1) as f64).sqrt();
        reference.extend([exact.re, exact.im]);
        observed.extend([closed.re, closed.im]);
    }
    Ok(OracleCase {
        name: "lamb-dicke-elements",
        description: "Laguerre sideband elements against the dense exponential of i*eta*X",
        inputs: format!("N={cutoff}, eta={eta}, n in {levels:?}"),
        reference,
        observed,
        tolerance: 1e-10,
        routine: "dense_expm",
    })
}

fn rabi_case() -> Result<OracleCase> {
    let strength = 0.3;
    let h = DMatrix::from_row_slice(
        2,
        2,
        &[C64::default(), C64::from(strength), C64::from(strength), C64::default()],
    );
    let out = dense_expm_propagate(&[C64::new(1.0, 0.0), C64::default()], &h, PI / (2.0 * strength))?;
    Ok(OracleCase {
        name: "rabi-flip",
        description: "sigma_x drive for half a Rabi period flips the qubit",
        inputs: format!("strength={strength}"),
        reference: vec![0.0, 1.0],
        observed: vec![out[0].norm_sqr(), out[1].norm_sqr()],
        tolerance: 1e-12,
        routine: "dense_expm_propagate",
    })
}

/// All convention-fixing and cross-check cases, in dependency order.
pub fn oracle_suite() -> Result<Vec<OracleCase>> {
    Ok(vec![
        rabi_case()?,
        coherent_kick_case()?,
        fringe_case()?,
        lamb_dicke_case()?,
        krylov_vs_dense()?,
        free_dirac_case()?,
    ])
}

/// Overlap |⟨a|b⟩|² / (‖a‖²‖b‖²) of two joint states.
pub fn fock_overlap(a: &FockVector, b: &FockVector) -> f64 {
    overlap(&a.amplitudes, &b.amplitudes)
}
