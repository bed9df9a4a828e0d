use std::f64::consts::PI;

use super::fock::FockVector;
use crate::dirac::SpinorField;
use crate::{Error, Grid, Result, C64};

/// Qubit₂ counts as disentangled when its reduced purity exceeds this.
pub const QUBIT2_PURITY_MIN: f64 = 1.0 - 1e-3;

/// Oscillator eigenfunctions φ_n(x) tabulated on a grid, x in units of Δ
/// (so |φ₀|² is a Gaussian of unit variance).
#[derive(Clone, Debug)]
pub struct HermiteBasis {
    grid: Grid,
    cutoff: usize,
    /// table[n * len + j] = φ_n(x_j)
    table: Vec<f64>,
}

impl HermiteBasis {
    pub fn new(grid: &Grid, cutoff: usize) -> Self {
        let len = grid.len();
        let mut table = vec![0.0; cutoff * len];
        for j in 0..len {
            let vals = hermite_functions(cutoff, grid.x(j));
            for (n, v) in vals.into_iter().enumerate() {
                table[n * len + j] = v;
            }
        }
        Self {
            grid: grid.clone(),
            cutoff,
            table,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn row(&self, n: usize) -> &[f64] {
        let len = self.grid.len();
        &self.table[n * len..(n + 1) * len]
    }

    /// ψ(x_j) = Σ_n c_n φ_n(x_j).
    pub fn synthesize(&self, coeffs: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::default(); self.grid.len()];
        for (n, c) in coeffs.iter().enumerate().take(self.cutoff) {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            out.iter_mut()
                .zip(self.row(n))
                .for_each(|(o, phi)| *o += c * phi);
        }
        out
    }

    /// c_n = Σ_j φ_n(x_j) ψ(x_j) dx.
    pub fn project(&self, psi: &[C64]) -> Vec<C64> {
        let dx = self.grid.dx();
        (0..self.cutoff)
            .map(|n| {
                self.row(n)
                    .iter()
                    .zip(psi)
                    .map(|(phi, v)| v * *phi)
                    .sum::<C64>()
                    * dx
            })
            .collect()
    }
}

/// φ_0..φ_{count−1} at x (x in Δ), via the normalized Hermite recurrence in
/// u = x/√2 with running rescaling so that far tails do not underflow early.
fn hermite_functions(count: usize, x: f64) -> Vec<f64> {
    let u = x / 2f64.sqrt();
    // log of the common prefactor 2^{-1/4} π^{-1/4} e^{−u²/2}
    let mut log_scale = -0.25 * (2.0f64).ln() - 0.25 * PI.ln() - 0.5 * u * u;
    let mut out = Vec::with_capacity(count);
    let mut prev = 0.0;
    let mut cur = 1.0;
    for n in 0..count {
        out.push(cur * log_scale.exp());
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * u * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > 1e200 {
            prev *= 1e-200;
            cur *= 1e-200;
            log_scale += 200.0 * 10f64.ln();
        }
    }
    out
}

/// Result of mapping a joint Fock state back onto the grid.
#[derive(Clone, Debug)]
pub struct Decoded {
    /// Present when qubit₂ is disentangled from the rest.
    pub spinor: Option<SpinorField>,
    /// Motional density with both qubits traced out, integrating to one.
    pub density: Vec<f64>,
    pub qubit2: [[C64; 2]; 2],
    pub qubit2_purity: f64,
}

impl Decoded {
    pub fn entangled(&self) -> bool {
        self.spinor.is_none()
    }
}

fn purity(rho: &[[C64; 2]; 2]) -> f64 {
    let mut s = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            s += (rho[a][b] * rho[b][a]).re;
        }
    }
    s
}

/// Dominant eigenvector of a 2×2 Hermitian matrix.
fn dominant_eigvec(rho: &[[C64; 2]; 2]) -> [C64; 2] {
    let a = rho[0][0].re;
    let d = rho[1][1].re;
    let b = rho[0][1];
    let tr = a + d;
    let disc = ((a - d) * (a - d) / 4.0 + b.norm_sqr()).sqrt();
    let lam = tr / 2.0 + disc;
    // (ρ − λ)v = 0 → v = (b, λ − a) or (λ − d, b*)
    let v1 = [b, C64::new(lam - a, 0.0)];
    let v2 = [C64::new(lam - d, 0.0), b.conj()];
    let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
    let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
    let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
    if n == 0.0 {
        return [C64::new(1.0, 0.0), C64::default()];
    }
    let s = n.sqrt();
    [v[0] / s, v[1] / s]
}

/// Maps a joint state onto the grid: qubit₁ basis states pair with the upper
/// and lower spinor components, the motional amplitudes become position
/// wavefunctions through the Hermite functions.
pub fn decode_spinor(state: &FockVector, basis: &HermiteBasis) -> Result<Decoded> {
    if basis.cutoff() < state.cutoff() {
        return Err(Error::InvalidParams(format!(
            "Hermite basis has {} levels, state needs {}",
            basis.cutoff(),
            state.cutoff()
        )));
    }
    let grid = basis.grid().clone();
    let dx = grid.dx();
    let mut density = vec![0.0; grid.len()];
    let mut waves = [[Vec::new(), Vec::new()], [Vec::new(), Vec::new()]];
    for q1 in 0..2 {
        for q2 in 0..2 {
            let psi = basis.synthesize(state.block(q1, q2));
            density
                .iter_mut()
                .zip(&psi)
                .for_each(|(r, v)| *r += v.norm_sqr());
            waves[q1][q2] = psi;
        }
    }
    let total: f64 = density.iter().sum::<f64>() * dx;
    if total > 0.0 {
        density.iter_mut().for_each(|r| *r /= total);
    }
    let qubit2 = state.reduced_qubit(2);
    let p2 = purity(&qubit2) / state.norm_sqr().powi(2);
    let spinor = if p2 > QUBIT2_PURITY_MIN {
        let chi = dominant_eigvec(&qubit2);
        let comp = |q1: usize| -> Vec<C64> {
            (0..grid.len())
                .map(|j| chi[0].conj() * waves[q1][0][j] + chi[1].conj() * waves[q1][1][j])
                .collect()
        };
        let mut s = SpinorField::new(grid.clone(), comp(0), comp(1))?;
        s.time = state.time;
        s.normalize();
        Some(s)
    } else {
        None
    };
    Ok(Decoded {
        spinor,
        density,
        qubit2,
        qubit2_purity: p2,
    })
}

/// Projects a spinor onto the Hermite basis and pairs it with a qubit₂ state.
pub fn encode_spinor(
    spinor: &SpinorField,
    basis: &HermiteBasis,
    qubit2: [C64; 2],
) -> Result<FockVector> {
    if spinor.grid != *basis.grid() {
        return Err(Error::InvalidGrid(
            "spinor and Hermite basis use different grids".into(),
        ));
    }
    let n = basis.cutoff();
    let up = basis.project(&spinor.upper);
    let lo = basis.project(&spinor.lower);
    let mut v = FockVector::zeros(n)?;
    for (q1, comp) in [up, lo].into_iter().enumerate() {
        for (q2, &z) in qubit2.iter().enumerate() {
            for (k, c) in comp.iter().enumerate() {
                v.amplitudes[FockVector::index_of(n, q1, q2, k)] = c * z;
            }
        }
    }
    v.time = spinor.time;
    Ok(v)
}
