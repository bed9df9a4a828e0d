use crate::{Error, Result, C64};

/// Occupation allowed in the highest [`CUTOFF_TAIL_FRACTION`] of Fock levels.
pub const CUTOFF_TAIL_MAX: f64 = 1e-6;
pub const CUTOFF_TAIL_FRACTION: f64 = 0.05;

/// Joint state of both qubits and the shared motional mode.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    cutoff: usize,
    pub amplitudes: Vec<C64>,
    /// Simulation time in μs.
    pub time: f64,
}

impl FockVector {
    /// |q1⟩ ⊗ |q2⟩ ⊗ |0⟩ for normalized single-qubit states.
    pub fn ground(cutoff: usize, q1: [C64; 2], q2: [C64; 2]) -> Result<Self> {
        let mut v = Self::zeros(cutoff)?;
        for a in 0..2 {
            for b in 0..2 {
                v.amplitudes[Self::index_of(cutoff, a, b, 0)] = q1[a] * q2[b];
            }
        }
        let n = v.norm_sqr().sqrt();
        if !(n > 0.0) {
            return Err(Error::InvalidParams("qubit states must be nonzero".into()));
        }
        v.amplitudes.iter_mut().for_each(|z| *z /= n);
        Ok(v)
    }

    pub fn zeros(cutoff: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::InvalidParams(format!(
                "cutoff must be >= 2, got {cutoff}"
            )));
        }
        Ok(Self {
            cutoff,
            amplitudes: vec![C64::default(); 4 * cutoff],
            time: 0.0,
        })
    }

    pub fn from_amplitudes(cutoff: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != 4 * cutoff {
            return Err(Error::InvalidParams(format!(
                "expected {} amplitudes, got {}",
                4 * cutoff,
                amplitudes.len()
            )));
        }
        Ok(Self {
            cutoff,
            amplitudes,
            time: 0.0,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        4 * self.cutoff
    }

    pub(crate) fn index_of(cutoff: usize, q1: usize, q2: usize, n: usize) -> usize {
        ((q1 << 1) | q2) * cutoff + n
    }

    pub fn index(&self, q1: usize, q2: usize, n: usize) -> usize {
        Self::index_of(self.cutoff, q1, q2, n)
    }

    pub fn amp(&self, q1: usize, q2: usize, n: usize) -> C64 {
        self.amplitudes[self.index(q1, q2, n)]
    }

    /// Motional amplitudes conditioned on the qubit pair (q1, q2).
    pub fn block(&self, q1: usize, q2: usize) -> &[C64] {
        let start = self.index(q1, q2, 0);
        &self.amplitudes[start..start + self.cutoff]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &FockVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Occupation of each Fock level summed over the qubits.
    pub fn level_populations(&self) -> Vec<f64> {
        (0..self.cutoff)
            .map(|n| {
                (0..4)
                    .map(|blk| self.amplitudes[blk * self.cutoff + n].norm_sqr())
                    .sum()
            })
            .collect()
    }

    pub fn mean_phonons(&self) -> f64 {
        self.level_populations()
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum::<f64>()
            / self.norm_sqr()
    }

    /// Occupation of the highest 5% of levels.
    pub fn top_tail(&self) -> f64 {
        let pops = self.level_populations();
        let k = ((self.cutoff as f64 * CUTOFF_TAIL_FRACTION).ceil() as usize).max(1);
        pops[self.cutoff - k..].iter().sum()
    }

    /// Occupation summed over 20 equal blocks of levels.
    pub fn occupancy_profile(&self) -> Vec<f64> {
        let pops = self.level_populations();
        let blocks = 20.min(self.cutoff);
        let size = self.cutoff.div_ceil(blocks);
        pops.chunks(size).map(|c| c.iter().sum()).collect()
    }

    pub fn check_cutoff(&self, step: usize) -> Result<()> {
        let tail = self.top_tail();
        if tail > CUTOFF_TAIL_MAX {
            return Err(Error::CutoffOverflow {
                step,
                cutoff: self.cutoff,
                tail,
                profile: self.occupancy_profile(),
            });
        }
        Ok(())
    }

    /// Reduced 2×2 density matrix of qubit `ion` (1 or 2).
    pub fn reduced_qubit(&self, ion: u8) -> [[C64; 2]; 2] {
        let mut rho = [[C64::default(); 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                let mut s = C64::default();
                for other in 0..2 {
                    let (ia, ib) = if ion == 1 {
                        ((a, other), (b, other))
                    } else {
                        ((other, a), (other, b))
                    };
                    let ba = self.block(ia.0, ia.1);
                    let bb = self.block(ib.0, ib.1);
                    s += ba.iter().zip(bb).map(|(x, y)| x * y.conj()).sum::<C64>();
                }
                rho[a][b] = s;
            }
        }
        rho
    }

    /// Motional state after tracing out both qubits.
    pub fn trace_qubits(&self) -> MotionalState {
        MotionalState {
            cutoff: self.cutoff,
            components: (0..4)
                .map(|blk| self.amplitudes[blk * self.cutoff..(blk + 1) * self.cutoff].to_vec())
                .filter(|c| c.iter().any(|z| z.norm_sqr() > 0.0))
                .collect(),
        }
    }

    /// Conditions qubit₁ on basis state `q1` and returns the post-selected
    /// state together with the outcome probability.
    pub fn project_qubit1(&self, q1: usize) -> (FockVector, f64) {
        let mut out = self.clone();
        for a in 0..2 {
            if a != q1 {
                for b in 0..2 {
                    let start = self.index(a, b, 0);
                    out.amplitudes[start..start + self.cutoff].fill(C64::default());
                }
            }
        }
        let p = out.norm_sqr() / self.norm_sqr();
        if p > 0.0 {
            let s = 1.0 / out.norm_sqr().sqrt();
            out.amplitudes.iter_mut().for_each(|z| *z *= s);
        }
        (out, p)
    }

    /// Applies a 2×2 unitary to qubit₁.
    pub fn rotate_qubit1(&self, u: [[C64; 2]; 2]) -> FockVector {
        let mut out = self.clone();
        for b in 0..2 {
            for n in 0..self.cutoff {
                let x0 = self.amp(0, b, n);
                let x1 = self.amp(1, b, n);
                out.amplitudes[self.index(0, b, n)] = u[0][0] * x0 + u[0][1] * x1;
                out.amplitudes[self.index(1, b, n)] = u[1][0] * x0 + u[1][1] * x1;
            }
        }
        out
    }
}

/// Motional reduced density operator, stored as an ensemble ρ = Σ |c⟩⟨c| of
/// unnormalized pure components (the blocks left by a partial trace).
#[derive(Clone, Debug, PartialEq)]
pub struct MotionalState {
    pub cutoff: usize,
    pub components: Vec<Vec<C64>>,
}

impl MotionalState {
    pub fn pure(amplitudes: Vec<C64>) -> Self {
        Self {
            cutoff: amplitudes.len(),
            components: vec![amplitudes],
        }
    }

    pub fn trace(&self) -> f64 {
        self.components.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    pub fn density_matrix(&self) -> nalgebra::DMatrix<C64> {
        let mut rho = nalgebra::DMatrix::<C64>::zeros(self.cutoff, self.cutoff);
        for c in &self.components {
            for i in 0..self.cutoff {
                for j in 0..self.cutoff {
                    rho[(i, j)] += c[i] * c[j].conj();
                }
            }
        }
        rho
    }
}
