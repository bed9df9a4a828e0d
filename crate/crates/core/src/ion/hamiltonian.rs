use super::fock::FockVector;
use super::operators::{ladder_elements, MotionOp};
use crate::analytic::{IonParams, IonScenario};
use crate::{Error, Result, C64};

/// Hermitian matrices are rejected when max|H − H†| exceeds this.
pub const HERMITICITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn matrix(self) -> [[C64; 2]; 2] {
        let o = C64::default();
        let one = C64::new(1.0, 0.0);
        let i = C64::i();
        match self {
            Pauli::I => [[one, o], [o, one]],
            Pauli::X => [[o, one], [one, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[one, o], [o, -one]],
        }
    }
}

pub type Motion = MotionOp;

/// strength · σ⁽ⁱᵒⁿ⁾ ⊗ motion. `ion` is 1 or 2; with `Pauli::I` the term acts
/// on the motion only.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub ion: u8,
    pub pauli: Pauli,
    pub motion: Motion,
    /// rad/μs
    pub strength: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LambDickeMode {
    /// Sideband couplings linear in a, a†.
    Ideal,
    /// Sideband matrix elements from the exact e^{iη x̂} coupling.
    Corrected,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    pub cutoff: usize,
    pub eta: f64,
    pub mode: LambDickeMode,
    pub terms: Vec<Term>,
}

impl HamiltonianSpec {
    pub fn new(cutoff: usize, eta: f64, mode: LambDickeMode) -> Self {
        Self {
            cutoff,
            eta,
            mode,
            terms: Vec::new(),
        }
    }

    pub fn with_term(mut self, ion: u8, pauli: Pauli, motion: Motion, strength: f64) -> Self {
        if strength != 0.0 {
            self.terms.push(Term {
                ion,
                pauli,
                motion,
                strength,
            });
        }
        self
    }

    pub fn ladder(&self) -> Vec<f64> {
        match self.mode {
            LambDickeMode::Ideal => ladder_elements(self.cutoff, None),
            LambDickeMode::Corrected => ladder_elements(self.cutoff, Some(self.eta)),
        }
    }

    /// Compressed sparse-row matrix in the qubit₁ ⊗ qubit₂ ⊗ Fock basis.
    pub fn assemble(&self) -> Result<SparseMatrix> {
        let n = self.cutoff;
        let dim = 4 * n;
        let ladder = self.ladder();
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); dim];
        for t in &self.terms {
            if t.ion != 1 && t.ion != 2 {
                return Err(Error::InvalidParams(format!(
                    "ion index must be 1 or 2, got {}",
                    t.ion
                )));
            }
            let pm = t.pauli.matrix();
            let motion = t.motion.entries(&ladder);
            for a in 0..2 {
                for b in 0..2 {
                    let z = pm[a][b];
                    if z == C64::default() {
                        continue;
                    }
                    for other in 0..2 {
                        let (row_q, col_q) = if t.ion == 1 {
                            ((a, other), (b, other))
                        } else {
                            ((other, a), (other, b))
                        };
                        for &(i, j, m) in &motion {
                            let r = FockVector::index_of(n, row_q.0, row_q.1, i);
                            let c = FockVector::index_of(n, col_q.0, col_q.1, j);
                            rows[r].push((c, z * m * t.strength));
                        }
                    }
                }
            }
        }
        let mut out = SparseMatrix {
            dim,
            row_ptr: Vec::with_capacity(dim + 1),
            cols: Vec::new(),
            vals: Vec::new(),
        };
        out.row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|(c, _)| *c);
            let mut merged: Vec<(usize, C64)> = Vec::with_capacity(row.len());
            for (c, v) in row {
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv += v,
                    _ => merged.push((c, v)),
                }
            }
            for (c, v) in merged {
                if v != C64::default() {
                    out.cols.push(c);
                    out.vals.push(v);
                }
            }
            out.row_ptr.push(out.cols.len());
        }
        let herm = out.hermiticity_error();
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidParams(format!(
                "assembled Hamiltonian is not Hermitian ({herm:e})"
            )));
        }
        Ok(out)
    }
}

/// Assemble the simulator Hamiltonian for a scenario:
///
/// * Dirac part on ion 1: 2ηΩ̃₁ σx⁽¹⁾ p̂ + Ω₁ σz⁽¹⁾
/// * linear potential on ion 2: ηΩ̃₂ σx⁽²⁾ x̂
/// * quadratic potential on ion 2: ηΩ̃₂ σx⁽²⁾ x̂ + Ω₂ σz⁽²⁾
pub fn build_hamiltonian(
    ion: &IonParams,
    scenario: IonScenario,
    mode: LambDickeMode,
) -> Result<HamiltonianSpec> {
    ion.validate()?;
    match scenario {
        IonScenario::Free if ion.omega_tilde2 != 0.0 => {
            return Err(Error::InconsistentScenario(
                "free scenario with a nonzero second drive".into(),
            ))
        }
        IonScenario::Linear if ion.omega2 != 0.0 => {
            return Err(Error::InconsistentScenario(
                "linear scenario with a detuned second drive".into(),
            ))
        }
        IonScenario::Quadratic if ion.omega2 <= 0.0 => {
            return Err(Error::InconsistentScenario(
                "quadratic scenario needs omega2 > 0".into(),
            ))
        }
        _ => {}
    }
    let mut h = HamiltonianSpec::new(ion.fock_cutoff, ion.eta, mode)
        .with_term(
            1,
            Pauli::X,
            Motion::Momentum,
            2.0 * ion.eta * ion.omega_tilde1,
        )
        .with_term(1, Pauli::Z, Motion::Identity, ion.omega1);
    match scenario {
        IonScenario::Free => {}
        IonScenario::Linear => {
            h = h.with_term(2, Pauli::X, Motion::Position, ion.eta * ion.omega_tilde2);
        }
        IonScenario::Quadratic => {
            h = h
                .with_term(2, Pauli::X, Motion::Position, ion.eta * ion.omega_tilde2)
                .with_term(2, Pauli::Z, Motion::Identity, ion.omega2);
        }
    }
    Ok(h)
}

/// The scenario Hamiltonian with sideband couplings beyond the Lamb-Dicke
/// approximation.
pub fn lamb_dicke_corrected_couplings(ion: &IonParams) -> Result<HamiltonianSpec> {
    build_hamiltonian(ion, ion.implied_scenario(), LambDickeMode::Corrected)
}

/// Complex CSR matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseMatrix {
    /// CSR copy of a square dense matrix, keeping every entry.
    pub fn from_dense(m: &nalgebra::DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidParams(format!(
                "matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let dim = m.nrows();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::with_capacity(dim * dim);
        let mut vals = Vec::with_capacity(dim * dim);
        row_ptr.push(0);
        for r in 0..dim {
            for c in 0..dim {
                cols.push(c);
                vals.push(m[(r, c)]);
            }
            row_ptr.push(cols.len());
        }
        Ok(Self { dim, row_ptr, cols, vals })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = C64::default();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => C64::default(),
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<C64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k])] = self.vals[k];
            }
        }
        m
    }

    /// max |H_rc − conj(H_cr)|.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[k];
                worst = worst.max((self.vals[k] - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}
