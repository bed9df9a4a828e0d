//! Lanczos approximation of exp(−i t H) v for sparse Hermitian H.
//!
//! The subspace grows until the a-posteriori estimate β₀·β_m·|[e^{−itT_m}e₁]_m|
//! drops below the tolerance; if `max_dim` is reached first the interval is
//! halved and each half is retried.

use nalgebra::{DMatrix, SymmetricEigen};

use super::fock::FockVector;
use super::hamiltonian::{HamiltonianSpec, SparseMatrix};
use crate::{Error, Result, C64};

/// Per-step error tolerance of the exponential action.
pub const KRYLOV_TOL: f64 = 1e-10;
/// Norm change allowed per propagation step.
pub const STEP_NORM_DRIFT_MAX: f64 = 1e-10;

const MAX_HALVINGS: usize = 20;

#[derive(Clone, Debug)]
pub struct KrylovPropagator {
    h: SparseMatrix,
    pub tol: f64,
    pub max_dim: usize,
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl KrylovPropagator {
    pub fn new(h: SparseMatrix) -> Self {
        Self {
            h,
            tol: KRYLOV_TOL,
            max_dim: 40,
        }
    }

    pub fn from_spec(spec: &HamiltonianSpec) -> Result<Self> {
        Ok(Self::new(spec.assemble()?))
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.h
    }

    /// exp(−i t H) v.
    pub fn apply(&self, v: &[C64], t: f64) -> Result<Vec<C64>> {
        self.apply_split(v, t, 0)
    }

    fn apply_split(&self, v: &[C64], t: f64, depth: usize) -> Result<Vec<C64>> {
        match self.try_apply(v, t) {
            Ok(out) => Ok(out),
            Err(e) if depth >= MAX_HALVINGS => Err(e),
            Err(_) => {
                let half = self.apply_split(v, 0.5 * t, depth + 1)?;
                self.apply_split(&half, 0.5 * t, depth + 1)
            }
        }
    }

    fn try_apply(&self, v: &[C64], t: f64) -> Result<Vec<C64>> {
        let dim = v.len();
        let beta0 = norm(v);
        if beta0 == 0.0 || t == 0.0 {
            return Ok(v.to_vec());
        }
        let mut basis: Vec<Vec<C64>> = vec![v.iter().map(|z| z / beta0).collect()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut w = vec![C64::default(); dim];
        let max_dim = self.max_dim.min(dim);
        let mut last_residual = f64::INFINITY;
        for j in 0..max_dim {
            self.h.matvec(&basis[j], &mut w);
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            // full reorthogonalization, twice
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = norm(&w);
            let m = j + 1;
            let coeffs = small_exponential(&alpha, &beta, t);
            let residual = beta0 * b * coeffs[m - 1].norm();
            last_residual = residual;
            if b < 1e-13 || residual < self.tol || m == dim {
                let mut out = vec![C64::default(); dim];
                for (q, c) in basis.iter().zip(&coeffs) {
                    let s = c * beta0;
                    out.iter_mut().zip(q).for_each(|(o, x)| *o += s * x);
                }
                return Ok(out);
            }
            beta.push(b);
            basis.push(w.iter().map(|z| z / b).collect());
        }
        Err(Error::KrylovBreakdown {
            residual: last_residual,
        })
    }
}

/// exp(−i t T) e₁ for the real symmetric tridiagonal T(alpha, beta).
fn small_exponential(alpha: &[f64], beta: &[f64], t: f64) -> Vec<C64> {
    let m = alpha.len();
    let mut tri = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        tri[(i, i)] = alpha[i];
        if i + 1 < m {
            tri[(i, i + 1)] = beta[i];
            tri[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(tri);
    (0..m)
        .map(|i| {
            (0..m)
                .map(|k| {
                    let q = eig.eigenvectors[(i, k)] * eig.eigenvectors[(0, k)];
                    C64::from_polar(q, -t * eig.eigenvalues[k])
                })
                .sum()
        })
        .collect()
}

/// Advances `state` by `n_steps·dt` under `h`, checking norm and the Fock
/// cutoff guard after each step.
pub fn propagate(
    state: &FockVector,
    h: &HamiltonianSpec,
    dt: f64,
    n_steps: usize,
) -> Result<FockVector> {
    if h.cutoff != state.cutoff() {
        return Err(Error::InvalidParams(format!(
            "Hamiltonian cutoff {} does not match state cutoff {}",
            h.cutoff,
            state.cutoff()
        )));
    }
    let prop = KrylovPropagator::from_spec(h)?;
    let mut out = state.clone();
    prop.advance(&mut out, dt, n_steps, 0)?;
    Ok(out)
}

impl KrylovPropagator {
    /// In-place stepping with guards. `step_offset` only labels errors.
    pub fn advance(
        &self,
        state: &mut FockVector,
        dt: f64,
        n_steps: usize,
        step_offset: usize,
    ) -> Result<()> {
        if !(dt > 0.0) && n_steps > 0 {
            return Err(Error::InvalidParams(format!("dt must be > 0, got {dt}")));
        }
        if step_offset == 0 {
            state.check_cutoff(0)?;
        }
        for s in 0..n_steps {
            let step = step_offset + s + 1;
            let before = state.norm_sqr();
            state.amplitudes = self.apply(&state.amplitudes, dt)?;
            state.time += dt;
            let drift = (state.norm_sqr() - before).abs();
            if drift > STEP_NORM_DRIFT_MAX {
                return Err(Error::Instability { step, drift });
            }
            state.check_cutoff(step)?;
        }
        Ok(())
    }
}
