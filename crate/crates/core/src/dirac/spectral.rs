use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::C64;

/// Forward/inverse FFT pair of one length. The inverse is normalized so that
/// `inverse(forward(v)) == v`.
#[derive(Clone)]
pub struct Spectral {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl Spectral {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            scale: 1.0 / n as f64,
        }
    }

    pub fn forward(&self, data: &mut [C64]) {
        self.forward.process(data);
    }

    pub fn inverse(&self, data: &mut [C64]) {
        self.inverse.process(data);
        for v in data.iter_mut() {
            *v *= self.scale;
        }
    }
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral")
            .field("len", &self.forward.len())
            .finish()
    }
}
