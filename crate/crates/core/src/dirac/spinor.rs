use std::f64::consts::PI;

use super::{DiracParams, Spectral};
use crate::{Error, Grid, Result, C64};

/// Largest density allowed in the outer grid margins of a freshly built packet.
pub const GAUSSIAN_TAIL_MAX: f64 = 1e-12;

/// Two-component Dirac wavefunction sampled on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorField {
    pub grid: Grid,
    pub upper: Vec<C64>,
    pub lower: Vec<C64>,
    /// Simulation time in μs.
    pub time: f64,
}

impl SpinorField {
    pub fn new(grid: Grid, upper: Vec<C64>, lower: Vec<C64>) -> Result<Self> {
        if upper.len() != grid.len() || lower.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "component lengths {}/{} do not match grid of {}",
                upper.len(),
                lower.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            upper,
            lower,
            time: 0.0,
        })
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        Self {
            grid,
            upper: vec![C64::default(); n],
            lower: vec![C64::default(); n],
            time: 0.0,
        }
    }

    /// Σ(|upper|² + |lower|²)·dx.
    pub fn norm_sqr(&self) -> f64 {
        self.density().iter().sum::<f64>() * self.grid.dx()
    }

    pub fn density(&self) -> Vec<f64> {
        self.upper
            .iter()
            .zip(&self.lower)
            .map(|(u, l)| u.norm_sqr() + l.norm_sqr())
            .collect()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            let s = 1.0 / n;
            self.upper
                .iter_mut()
                .chain(self.lower.iter_mut())
                .for_each(|v| *v *= s);
        }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let mut out = self.clone();
        out.upper
            .iter_mut()
            .chain(out.lower.iter_mut())
            .for_each(|v| *v *= factor);
        out
    }

    pub fn mean_x(&self) -> f64 {
        let rho = self.density();
        let num: f64 = rho
            .iter()
            .enumerate()
            .map(|(j, r)| self.grid.x(j) * r)
            .sum();
        num / rho.iter().sum::<f64>()
    }

    pub fn variance_x(&self) -> f64 {
        let rho = self.density();
        let total: f64 = rho.iter().sum();
        let m = self.mean_x();
        rho.iter()
            .enumerate()
            .map(|(j, r)| (self.grid.x(j) - m).powi(2) * r)
            .sum::<f64>()
            / total
    }

    /// ⟨σx⟩ = 2 Re Σ ū l dx, normalized by the norm.
    pub fn mean_sigma_x(&self) -> f64 {
        let s: f64 = self
            .upper
            .iter()
            .zip(&self.lower)
            .map(|(u, l)| 2.0 * (u.conj() * l).re)
            .sum();
        s * self.grid.dx() / self.norm_sqr()
    }

    /// Components in momentum space (unnormalized DFT, FFT order).
    pub fn to_momentum(&self, fft: &Spectral) -> (Vec<C64>, Vec<C64>) {
        let mut u = self.upper.clone();
        let mut l = self.lower.clone();
        fft.forward(&mut u);
        fft.forward(&mut l);
        (u, l)
    }

    pub fn mean_p(&self, fft: &Spectral) -> f64 {
        let (u, l) = self.to_momentum(fft);
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..u.len() {
            let w = u[k].norm_sqr() + l[k].norm_sqr();
            num += self.grid.p(k) * w;
            den += w;
        }
        num / den
    }

    /// ⟨c p̂ σx + mc² σz + V(x)⟩ for a normalized or unnormalized state.
    pub fn energy(&self, params: &DiracParams, fft: &Spectral) -> f64 {
        let (u, l) = self.to_momentum(fft);
        let mut kinetic = 0.0;
        let mut weight = 0.0;
        for k in 0..u.len() {
            let p = self.grid.p(k);
            kinetic += params.mc2 * (u[k].norm_sqr() - l[k].norm_sqr())
                + params.c * p * 2.0 * (u[k].conj() * l[k]).re;
            weight += u[k].norm_sqr() + l[k].norm_sqr();
        }
        let rho = self.density();
        let potential: f64 = rho
            .iter()
            .enumerate()
            .map(|(j, r)| params.potential.at(self.grid.x(j)) * r)
            .sum();
        kinetic / weight + potential / rho.iter().sum::<f64>()
    }

    /// Multiplies by e^{i p x}, shifting the momentum by `p`.
    pub fn kick(&mut self, p: f64) {
        for j in 0..self.grid.len() {
            let phase = C64::from_polar(1.0, p * self.grid.x(j));
            self.upper[j] *= phase;
            self.lower[j] *= phase;
        }
    }

    /// Inner product ⟨self|other⟩ with the grid measure.
    pub fn inner(&self, other: &SpinorField) -> C64 {
        let s: C64 = self
            .upper
            .iter()
            .zip(&other.upper)
            .chain(self.lower.iter().zip(&other.lower))
            .map(|(a, b)| a.conj() * b)
            .sum();
        s * self.grid.dx()
    }

    /// L2 distance with the grid measure.
    pub fn distance(&self, other: &SpinorField) -> f64 {
        let s: f64 = self
            .upper
            .iter()
            .zip(&other.upper)
            .chain(self.lower.iter().zip(&other.lower))
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        (s * self.grid.dx()).sqrt()
    }

    /// Probability mass in the outer 1/32 of the grid on each side.
    pub fn edge_mass(&self) -> f64 {
        edge_mass(&self.density(), self.grid.dx())
    }
}

pub(crate) fn edge_mass(density: &[f64], dx: f64) -> f64 {
    let margin = (density.len() / 32).max(1);
    let n = density.len();
    (density[..margin].iter().sum::<f64>() + density[n - margin..].iter().sum::<f64>()) * dx
}

/// Gaussian packet ∝ e^{i p0 (x−x0)} e^{−(x−x0)²/4w²} times a fixed internal
/// spinor, normalized on the grid. `width` is the position standard deviation.
pub fn make_gaussian_spinor(
    grid: &Grid,
    x0: f64,
    p0: f64,
    width: f64,
    internal: [C64; 2],
) -> Result<SpinorField> {
    if !(width > 0.0) {
        return Err(Error::InvalidParams(format!(
            "width must be > 0, got {width}"
        )));
    }
    let inorm = (internal[0].norm_sqr() + internal[1].norm_sqr()).sqrt();
    if !(inorm > 0.0) {
        return Err(Error::InvalidParams(
            "internal spinor must be nonzero".into(),
        ));
    }
    let amp = (2.0 * PI * width * width).powf(-0.25);
    let n = grid.len();
    let mut upper = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n);
    for j in 0..n {
        let d = grid.x(j) - x0;
        let env = amp * (-d * d / (4.0 * width * width)).exp();
        let psi = C64::from_polar(env, p0 * d);
        upper.push(psi * internal[0] / inorm);
        lower.push(psi * internal[1] / inorm);
    }
    let mut state = SpinorField::new(grid.clone(), upper, lower)?;
    let tail = state.edge_mass();
    if tail > GAUSSIAN_TAIL_MAX {
        return Err(Error::GridTooNarrow {
            density: tail,
            threshold: GAUSSIAN_TAIL_MAX,
        });
    }
    state.normalize();
    Ok(state)
}

/// Ground-state packet with internal state (1, 0) after the preparation pulse
/// exp(iκ x σx): upper = cos(κx)·ψ₀, lower = i sin(κx)·ψ₀, κ = η Ω_prep t.
pub fn prep2_spinor(grid: &Grid, kappa: f64) -> Result<SpinorField> {
    let mut s = make_gaussian_spinor(grid, 0.0, 0.0, 1.0, [C64::new(1.0, 0.0), C64::default()])?;
    for j in 0..grid.len() {
        let x = grid.x(j);
        let psi = s.upper[j];
        s.upper[j] = psi * (kappa * x).cos();
        s.lower[j] = psi * C64::new(0.0, (kappa * x).sin());
    }
    s.normalize();
    Ok(s)
}
