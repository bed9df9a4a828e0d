use std::f64::consts::PI;

use crate::{Error, Result};

/// Uniform periodic grid in position (units of Δ) and its discrete Fourier dual
/// in momentum (units of ħ/Δ).
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    n_points: usize,
    x_min: f64,
    x_max: f64,
}

impl Grid {
    pub fn new(n_points: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n_points < 16 || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_points must be a power of two >= 16, got {n_points}"
            )));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "need x_max > x_min, got [{x_min}, {x_max}]"
            )));
        }
        Ok(Self {
            n_points,
            x_min,
            x_max,
        })
    }

    /// x ∈ [−64, 64) Δ with 2048 points.
    pub fn default_scattering() -> Self {
        Self::new(2048, -64.0, 64.0).expect("valid default grid")
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.width() / self.n_points as f64
    }

    pub fn dp(&self) -> f64 {
        2.0 * PI / self.width()
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Momentum of FFT bin `k` in standard (unshifted) FFT order.
    pub fn p(&self, k: usize) -> f64 {
        let n = self.n_points;
        let signed = if k < n / 2 {
            k as f64
        } else {
            k as f64 - n as f64
        };
        signed * self.dp()
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.p(k)).collect()
    }

    pub fn p_max(&self) -> f64 {
        PI / self.dx()
    }
}
