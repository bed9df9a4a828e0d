//! Motional-mode operators and the phase-space convention.
//!
//! Convention: α = x/2 + i·p, i.e. ⟨x̂⟩ = 2 Re α and ⟨p̂⟩ = Im α for a coherent
//! state |α⟩ (x in Δ, p in ħ/Δ). The displacement D(α) = exp(α a† − α* a)
//! equals exp(−iH) with H = x·p̂ − p·x̂.

use crate::C64;

pub fn coherent_amplitude(x: f64, p: f64) -> C64 {
    C64::new(0.5 * x, p)
}

pub fn phase_space_point(alpha: C64) -> (f64, f64) {
    (2.0 * alpha.re, alpha.im)
}

/// Generalized Laguerre polynomial L_n^a(x) by the three-term recurrence.
pub fn laguerre(n: usize, a: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Ratio of the exact first-sideband coupling |⟨n+1|e^{iη x̂}|n⟩| to its
/// Lamb-Dicke value η√(n+1): e^{−η²/2} L_n^1(η²)/(n+1).
pub fn lamb_dicke_factor(n: usize, eta: f64) -> f64 {
    let e2 = eta * eta;
    (-0.5 * e2).exp() * laguerre(n, 1.0, e2) / (n as f64 + 1.0)
}

/// ⟨n+1| e^{iη x̂} |n⟩ = i η e^{−η²/2} L_n^1(η²)/√(n+1).
pub fn sideband_element(n: usize, eta: f64) -> C64 {
    let e2 = eta * eta;
    C64::new(
        0.0,
        eta * (-0.5 * e2).exp() * laguerre(n, 1.0, e2) / (n as f64 + 1.0).sqrt(),
    )
}

/// Elements ⟨n+1|a†|n⟩ for n = 0..cutoff−1, optionally dressed with the
/// exact sideband factor.
pub fn ladder_elements(cutoff: usize, corrected_eta: Option<f64>) -> Vec<f64> {
    (0..cutoff.saturating_sub(1))
        .map(|n| {
            let s = (n as f64 + 1.0).sqrt();
            match corrected_eta {
                Some(eta) => s * lamb_dicke_factor(n, eta),
                None => s,
            }
        })
        .collect()
}

/// Tridiagonal motional operator built from a ladder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MotionOp {
    Identity,
    /// x̂ = a + a†
    Position,
    /// p̂ = i(a† − a)/2
    Momentum,
}

impl MotionOp {
    /// Nonzero entries (row, col, value).
    pub fn entries(self, ladder: &[f64]) -> Vec<(usize, usize, C64)> {
        let cutoff = ladder.len() + 1;
        match self {
            MotionOp::Identity => (0..cutoff).map(|n| (n, n, C64::new(1.0, 0.0))).collect(),
            MotionOp::Position => ladder
                .iter()
                .enumerate()
                .flat_map(|(n, &s)| [(n + 1, n, C64::new(s, 0.0)), (n, n + 1, C64::new(s, 0.0))])
                .collect(),
            MotionOp::Momentum => ladder
                .iter()
                .enumerate()
                .flat_map(|(n, &s)| {
                    [
                        (n + 1, n, C64::new(0.0, 0.5 * s)),
                        (n, n + 1, C64::new(0.0, -0.5 * s)),
                    ]
                })
                .collect(),
        }
    }

    pub fn dense(self, ladder: &[f64]) -> nalgebra::DMatrix<C64> {
        let n = ladder.len() + 1;
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for (i, j, v) in self.entries(ladder) {
            m[(i, j)] += v;
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_low_orders() {
        let x = 0.37;
        assert_eq!(laguerre(0, 1.0, x), 1.0);
        assert!((laguerre(1, 1.0, x) - (2.0 - x)).abs() < 1e-15);
        // L_2^1(x) = (x² − 6x + 6)/2
        assert!((laguerre(2, 1.0, x) - (x * x - 6.0 * x + 6.0) / 2.0).abs() < 1e-14);
        // L_n^1(0) = n + 1
        assert!((laguerre(150, 1.0, 0.0) - 151.0).abs() < 1e-9);
    }

    #[test]
    fn factor_limits() {
        for n in [0, 10, 150, 400] {
            assert!((lamb_dicke_factor(n, 1e-6) - 1.0).abs() < 1e-9);
        }
        let f = lamb_dicke_factor(150, 0.044);
        // First-order estimate e^{−η²/2}(1 − nη²/2) ≈ 0.853; exact value is slightly higher.
        assert!(f > 0.85 && f < 0.87, "f = {f}");
    }

    #[test]
    fn canonical_commutator_on_truncated_space() {
        let ladder = ladder_elements(20, None);
        let x = MotionOp::Position.dense(&ladder);
        let p = MotionOp::Momentum.dense(&ladder);
        let comm = &x * &p - &p * &x;
        for i in 0..20 {
            for j in 0..20 {
                let expect = if i == j && i < 19 {
                    C64::new(0.0, 1.0)
                } else {
                    C64::default()
                };
                if i == 19 && j == 19 {
                    // truncation artefact: −i(N−1)
                    assert!((comm[(i, j)] - C64::new(0.0, -19.0)).norm() < 1e-12);
                } else {
                    assert!(
                        (comm[(i, j)] - expect).norm() < 1e-12,
                        "({i},{j}) {}",
                        comm[(i, j)]
                    );
                }
            }
        }
    }

    #[test]
    fn phase_space_round_trip() {
        let a = coherent_amplitude(1.5, -3.5);
        assert_eq!(phase_space_point(a), (1.5, -3.5));
    }
}
