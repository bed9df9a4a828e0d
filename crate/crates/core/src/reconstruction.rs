//! The measurement protocol: a state-dependent probe displacement
//! exp(−ik x̂ σy⁽²⁾/2) turns ⟨σz⁽²⁾⟩ into Fourier components of the motional
//! density, which are then inverted on a grid. Also the energy-branch filter
//! and the local momentum map used for the colour-scale panels.
//!
//! Fringe scans start at k = 0 and are uniform in k; negative k follows from
//! cos being even and sin odd.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::dirac::{Branch, Spectral, SpinorField};
use crate::ion::{FockVector, MotionalState};
use crate::{Error, Grid, Result, C64};

pub const DEFAULT_K_MAX: f64 = 6.0;
pub const DEFAULT_N_K: usize = 256;

/// ⟨σz⁽²⁾⟩ = SIN_SIGN·⟨sin kx̂⟩ after preparing qubit₂ in (1,1)/√2.
pub const SIN_SIGN: f64 = -1.0;
/// ⟨σz⁽²⁾⟩ = COS_SIGN·⟨cos kx̂⟩ after preparing qubit₂ in (0,1).
pub const COS_SIGN: f64 = -1.0;

pub const SIN_PREPARATION: [C64; 2] = [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)];
pub const COS_PREPARATION: [C64; 2] = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];

/// Qubit₁ counts as a σx eigenstate when 1 − |⟨σx⁽¹⁾⟩| stays below this.
pub const FILTER_SIGMA_X_MARGIN: f64 = 0.02;

/// Window width (Δ) of the local momentum map.
pub const DEFAULT_PROFILE_WINDOW: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct FringeScan {
    /// Probe wavenumbers in 1/Δ.
    pub k_values: Vec<f64>,
    /// ⟨σz⁽²⁾⟩ with qubit₂ prepared in (1,1)/√2.
    pub sin_signal: Vec<f64>,
    /// ⟨σz⁽²⁾⟩ with qubit₂ prepared in (0,1).
    pub cos_signal: Vec<f64>,
    pub sin_preparation: &'static str,
    pub cos_preparation: &'static str,
    pub warnings: Vec<String>,
}

impl FringeScan {
    pub fn len(&self) -> usize {
        self.k_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_values.is_empty()
    }

    /// ⟨e^{ikx̂}⟩ at sample `i`, with the probe signs removed.
    pub fn characteristic(&self, i: usize) -> C64 {
        C64::new(COS_SIGN * self.cos_signal[i], SIN_SIGN * self.sin_signal[i])
    }

    /// Columns k, sin, cos.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,sin,cos\n");
        for i in 0..self.len() {
            let _ = writeln!(
                out,
                "{:e},{:e},{:e}",
                self.k_values[i], self.sin_signal[i], self.cos_signal[i]
            );
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut scan = FringeScan {
            k_values: Vec::new(),
            sin_signal: Vec::new(),
            cos_signal: Vec::new(),
            sin_preparation: "(1,1)/sqrt2",
            cos_preparation: "(0,1)",
            warnings: Vec::new(),
        };
        for (i, line) in text.lines().enumerate() {
            if i == 0 {
                if line.trim() != "k,sin,cos" {
                    return Err(Error::Config {
                        line: 1,
                        msg: format!("expected header k,sin,cos, got {line:?}"),
                    });
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config {
                    line: i + 1,
                    msg: e.to_string(),
                })?;
            if vals.len() != 3 {
                return Err(Error::Config {
                    line: i + 1,
                    msg: format!("expected 3 columns, got {}", vals.len()),
                });
            }
            scan.k_values.push(vals[0]);
            scan.sin_signal.push(vals[1]);
            scan.cos_signal.push(vals[2]);
        }
        Ok(scan)
    }
}

/// exp(−iθσy/2) applied to `chi`, then ⟨σz⟩.
fn probe_sigma_z(chi: [C64; 2], theta: f64) -> f64 {
    let (s, c) = (theta / 2.0).sin_cos();
    let a = chi[0] * c - chi[1] * s;
    let b = chi[0] * s + chi[1] * c;
    a.norm_sqr() - b.norm_sqr()
}

/// Position eigenvalues of the truncated x̂ and the weight of the state on each.
fn position_weights(state: &MotionalState) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = state.cutoff;
    let trace = state.trace();
    if !(trace > 0.0) {
        return Err(Error::InvalidParams("motional state has zero trace".into()));
    }
    let mut x = DMatrix::<f64>::zeros(n, n);
    for k in 0..n.saturating_sub(1) {
        let s = ((k + 1) as f64).sqrt();
        x[(k, k + 1)] = s;
        x[(k + 1, k)] = s;
    }
    let eig = SymmetricEigen::new(x);
    let mut weights = vec![0.0; n];
    for comp in &state.components {
        for (j, w) in weights.iter_mut().enumerate() {
            let v = eig.eigenvectors.column(j);
            let amp: C64 = v.iter().zip(comp).map(|(a, c)| c * *a).sum();
            *w += amp.norm_sqr();
        }
    }
    weights.iter_mut().for_each(|w| *w /= trace);
    Ok((eig.eigenvalues.iter().copied().collect(), weights))
}

/// Runs the probe for each k in `k_values` and records ⟨σz⁽²⁾⟩ for both
/// qubit₂ preparations.
pub fn acquire_fringes_at(state: &MotionalState, k_values: &[f64]) -> Result<FringeScan> {
    let (xi, w) = position_weights(state)?;
    let signal = |chi: [C64; 2], k: f64| -> f64 {
        xi.iter()
            .zip(&w)
            .map(|(x, w)| w * probe_sigma_z(chi, k * x))
            .sum::<f64>()
            .clamp(-1.0, 1.0)
    };
    let (sin_signal, cos_signal): (Vec<f64>, Vec<f64>) = k_values
        .par_iter()
        .map(|&k| (signal(SIN_PREPARATION, k), signal(COS_PREPARATION, k)))
        .unzip();
    let mut warnings = Vec::new();
    if k_values.len() > 1 {
        let dk = (k_values[1] - k_values[0]).abs();
        let extent = xi
            .iter()
            .zip(&w)
            .filter(|(_, w)| **w > 1e-12)
            .map(|(x, _)| x.abs())
            .fold(0.0, f64::max);
        if dk > 0.0 && 2.0 * PI / dk < 2.0 * extent {
            warnings.push(format!(
                "k spacing {dk} aliases a state extending to |x| = {extent:.1}"
            ));
        }
    }
    Ok(FringeScan {
        k_values: k_values.to_vec(),
        sin_signal,
        cos_signal,
        sin_preparation: "(1,1)/sqrt2",
        cos_preparation: "(0,1)",
        warnings,
    })
}

/// Uniform scan over k = 0..k_max with `n_k` samples.
pub fn acquire_fringes(state: &MotionalState, k_max: f64, n_k: usize) -> Result<FringeScan> {
    if n_k < 2 || !(k_max > 0.0) {
        return Err(Error::InvalidParams(format!(
            "need n_k >= 2 and k_max > 0, got {n_k} and {k_max}"
        )));
    }
    let dk = k_max / (n_k - 1) as f64;
    let ks: Vec<f64> = (0..n_k).map(|i| i as f64 * dk).collect();
    acquire_fringes_at(state, &ks)
}

/// Reconstructed density on a grid.
#[derive(Clone, Debug)]
pub struct Inversion {
    /// Clipped at zero and normalized to integrate to one.
    pub density: Vec<f64>,
    /// Direct transform before clipping.
    pub raw: Vec<f64>,
    /// ∫ max(−raw, 0) dx relative to ∫ raw dx.
    pub negativity: f64,
}

/// ρ(x) = (1/π) ∫₀^{k_max} [C(k) cos kx + S(k) sin kx] dk by the trapezoid rule.
pub fn invert_fringes(scan: &FringeScan, grid: &Grid) -> Result<Inversion> {
    let n = scan.len();
    if n < 2 || scan.k_values[0] != 0.0 {
        return Err(Error::UndersampledScan(
            "scan must start at k = 0 with at least two samples".into(),
        ));
    }
    let dk = scan.k_values[1] - scan.k_values[0];
    let uniform = scan
        .k_values
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dk).abs() < 1e-9 * dk.abs().max(1.0));
    if !(dk > 0.0) || !uniform {
        return Err(Error::UndersampledScan("k samples must be uniform and increasing".into()));
    }
    if 2.0 * PI / dk < grid.width() {
        return Err(Error::UndersampledScan(format!(
            "k spacing {dk} repeats every {:.2}, grid is {:.2} wide",
            2.0 * PI / dk,
            grid.width()
        )));
    }
    let chi: Vec<C64> = (0..n).map(|i| scan.characteristic(i)).collect();
    let raw: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|j| {
            let x = grid.x(j);
            let mut acc = 0.0;
            for (i, (k, c)) in scan.k_values.iter().zip(&chi).enumerate() {
                let weight = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                let (s, co) = (k * x).sin_cos();
                acc += weight * (c.re * co + c.im * s);
            }
            acc * dk / PI
        })
        .collect();
    let dx = grid.dx();
    let total_raw: f64 = raw.iter().sum::<f64>() * dx;
    let negative: f64 = raw.iter().map(|r| (-r).max(0.0)).sum::<f64>() * dx;
    let mut density: Vec<f64> = raw.iter().map(|r| r.max(0.0)).collect();
    let total: f64 = density.iter().sum::<f64>() * dx;
    if total > 0.0 {
        density.iter_mut().for_each(|r| *r /= total);
    }
    Ok(Inversion {
        density,
        raw,
        negativity: if total_raw.abs() > 0.0 { negative / total_raw.abs() } else { 0.0 },
    })
}

/// Fringe acquisition followed by inversion with the default scan.
pub fn reconstruct_density(state: &MotionalState, grid: &Grid) -> Result<Inversion> {
    let scan = acquire_fringes(state, DEFAULT_K_MAX, DEFAULT_N_K)?;
    invert_fringes(&scan, grid)
}

/// ∫|a − b| dx.
pub fn l1_distance(a: &[f64], b: &[f64], dx: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() * dx
}

/// ⟨p̂⟩ of the motion, summed over all qubit blocks.
pub fn fock_mean_momentum(state: &FockVector) -> f64 {
    let n = state.cutoff();
    let mut p = 0.0;
    for q1 in 0..2 {
        for q2 in 0..2 {
            let b = state.block(q1, q2);
            for k in 0..n - 1 {
                p -= ((k + 1) as f64).sqrt() * (b[k + 1].conj() * b[k]).im;
            }
        }
    }
    p / state.norm_sqr()
}

#[derive(Clone, Debug)]
pub struct BranchFilter {
    /// Post-selected state, qubit₁ in (1,0).
    pub state: FockVector,
    pub probability: f64,
    /// Qubit₁ was not close to a σx eigenstate, so branch and σx sign do not
    /// map one to one and the filtered state is only approximate.
    pub entangled: bool,
    /// Sign of the σx eigenvalue that was kept.
    pub sigma_x_sign: f64,
}

/// For |cp| ≫ mc² the branch of each momentum component is fixed by its σx
/// eigenvalue, +1 for a positive-energy state moving with p > 0. A π/2 pulse
/// maps that σx eigenstate onto (1,0) and the other one onto (0,1), which is
/// then discarded. The sign of p is taken from ⟨p̂⟩.
pub fn filter_energy_branch(state: &FockVector, branch: Branch) -> Result<BranchFilter> {
    let norm = state.norm_sqr();
    if !(norm > 0.0) {
        return Err(Error::InvalidParams("state has zero norm".into()));
    }
    let p = fock_mean_momentum(state);
    let sigma_x_sign = branch.sign() * if p < 0.0 { -1.0 } else { 1.0 };
    let h = FRAC_1_SQRT_2;
    let u = if sigma_x_sign > 0.0 {
        [[C64::from(h), C64::from(h)], [C64::from(-h), C64::from(h)]]
    } else {
        [[C64::from(h), C64::from(-h)], [C64::from(h), C64::from(h)]]
    };
    let rho = state.reduced_qubit(1);
    let sx = 2.0 * rho[0][1].re / norm;
    let entangled = 1.0 - sx.abs() > FILTER_SIGMA_X_MARGIN;
    let (filtered, probability) = state.rotate_qubit1(u).project_qubit1(0);
    Ok(BranchFilter {
        state: filtered,
        probability,
        entangled,
        sigma_x_sign,
    })
}

/// Windowed local momentum Re[ψ†(−i∂ₓ)ψ]/|ψ|² with a Gaussian window of the
/// given width. Zero where the windowed density is negligible.
pub fn branch_momentum_profile(state: &SpinorField, window: f64) -> Vec<f64> {
    let grid = &state.grid;
    let n = grid.len();
    let fft = Spectral::new(n);
    let mut current = vec![0.0; n];
    let mut density = vec![0.0; n];
    for comp in [&state.upper, &state.lower] {
        let mut d = comp.clone();
        fft.forward(&mut d);
        for (k, v) in d.iter_mut().enumerate() {
            *v *= grid.p(k);
        }
        fft.inverse(&mut d);
        for j in 0..n {
            current[j] += (comp[j].conj() * d[j]).re;
            density[j] += comp[j].norm_sqr();
        }
    }
    let dx = grid.dx();
    let half = if window > 0.0 {
        ((4.0 * window / dx).ceil() as usize).min(n)
    } else {
        0
    };
    let kernel: Vec<f64> = (0..=half)
        .map(|m| {
            let x = m as f64 * dx;
            if window > 0.0 {
                (-x * x / (2.0 * window * window)).exp()
            } else {
                1.0
            }
        })
        .collect();
    let smooth = |v: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|j| {
                let lo = j.saturating_sub(half);
                let hi = (j + half).min(n - 1);
                (lo..=hi).map(|i| v[i] * kernel[i.abs_diff(j)]).sum()
            })
            .collect()
    };
    let cur = smooth(&current);
    let den = smooth(&density);
    let floor = den.iter().copied().fold(0.0, f64::max) * 1e-10;
    cur.iter()
        .zip(&den)
        .map(|(c, d)| if *d > floor { c / d } else { 0.0 })
        .collect()
}
