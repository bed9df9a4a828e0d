mod common;

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use common::{kicked_packet, one, slope_params};
use kleinsim::dirac::{evolve, make_gaussian_spinor};
use kleinsim::ion::{
    decode_spinor, encode_spinor, ladder_elements, FockVector, HermiteBasis, MotionOp,
    MotionalState,
};
use kleinsim::oracle::{coherent_state_reference, dense_expm};
use kleinsim::reconstruction::{
    acquire_fringes, acquire_fringes_at, branch_momentum_profile, filter_energy_branch,
    invert_fringes, l1_distance, reconstruct_density, FringeScan, COS_PREPARATION, COS_SIGN,
    DEFAULT_PROFILE_WINDOW, SIN_PREPARATION, SIN_SIGN,
};
use kleinsim::dirac::Branch;
use kleinsim::scenarios::{run_scenario, shipped, SHIPPED};
use kleinsim::{Error, Grid, C64};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn coherent(alpha: C64, cutoff: usize) -> MotionalState {
    MotionalState::pure(coherent_state_reference(alpha, cutoff).unwrap().amplitudes)
}

/// ⟨σz⁽²⁾⟩ after exp(−ik x̂ σy/2) on qubit₂ ⊗ motion, by dense exponentiation.
fn dense_probe(prep: [C64; 2], motion: &[C64], k: f64) -> f64 {
    let n = motion.len();
    let x = MotionOp::Position.dense(&ladder_elements(n, None));
    let sy = DMatrix::from_row_slice(2, 2, &[C64::default(), -C64::i(), C64::i(), C64::default()]);
    let g = sy.kronecker(&x) * C64::from(k / 2.0);
    let u = dense_expm(&g, 1.0).unwrap();
    let psi = DVector::from_fn(2 * n, |i, _| prep[i / n] * motion[i % n]);
    let out = u * psi;
    (0..2 * n)
        .map(|i| if i < n { out[i].norm_sqr() } else { -out[i].norm_sqr() })
        .sum()
}

#[test]
fn signal_signs_are_frozen_against_dense_probe() {
    assert_eq!(SIN_SIGN, -1.0);
    assert_eq!(COS_SIGN, -1.0);
    let n = 20;
    let reference = coherent_state_reference(C64::new(0.6, -0.3), n).unwrap();
    let state = MotionalState::pure(reference.amplitudes.clone());
    let ks = [0.0, 0.4, 1.1, 2.5];
    let scan = acquire_fringes_at(&state, &ks).unwrap();
    for (i, &k) in ks.iter().enumerate() {
        let s = dense_probe(SIN_PREPARATION, &reference.amplitudes, k);
        let c = dense_probe(COS_PREPARATION, &reference.amplitudes, k);
        assert!((scan.sin_signal[i] - s).abs() < 1e-10, "k={k}: {} vs {s}", scan.sin_signal[i]);
        assert!((scan.cos_signal[i] - c).abs() < 1e-10, "k={k}: {} vs {c}", scan.cos_signal[i]);
    }
    // sign of the sin signal for a packet sitting at positive x
    let right = coherent(C64::new(1.0, 0.0), 40);
    let scan = acquire_fringes_at(&right, &[0.5]).unwrap();
    assert!(SIN_SIGN * scan.sin_signal[0] > 0.0);
}

#[test]
fn zero_k_signals() {
    let scan = acquire_fringes_at(&coherent(C64::new(0.3, 1.2), 60), &[0.0]).unwrap();
    assert!(scan.sin_signal[0].abs() < 1e-12);
    assert!((scan.cos_signal[0].abs() - 1.0).abs() < 1e-12);
}

#[test]
fn ground_state_cos_signal_is_gaussian() {
    let ks: Vec<f64> = (0..25).map(|i| i as f64 * 0.25).collect();
    let scan = acquire_fringes_at(&coherent(C64::default(), 40), &ks).unwrap();
    for (i, &k) in ks.iter().enumerate() {
        let expected = COS_SIGN * (-k * k / 2.0).exp();
        assert!((scan.cos_signal[i] - expected).abs() < 1e-9, "k={k}");
    }
}

#[test]
fn displaced_cos_signal() {
    let x0 = 1.6;
    let ks: Vec<f64> = (0..13).map(|i| i as f64 * 0.5).collect();
    let scan = acquire_fringes_at(&coherent(C64::new(x0 / 2.0, 0.0), 60), &ks).unwrap();
    for (i, &k) in ks.iter().enumerate() {
        let expected = COS_SIGN * (k * x0).cos() * (-k * k / 2.0).exp();
        assert!((scan.cos_signal[i] - expected).abs() < 1e-6, "k={k}");
    }
}

#[test]
fn ground_state_inversion() {
    let grid = Grid::new(512, -16.0, 16.0).unwrap();
    let inv = reconstruct_density(&coherent(C64::default(), 40), &grid).unwrap();
    let exact: Vec<f64> = grid
        .positions()
        .iter()
        .map(|x| (-x * x / 2.0).exp() / (2.0 * PI).sqrt())
        .collect();
    let l1 = l1_distance(&inv.density, &exact, grid.dx());
    assert!(l1 < 0.02, "{l1}");
    let total: f64 = inv.density.iter().sum::<f64>() * grid.dx();
    assert!((total - 1.0).abs() < 1e-9);
    assert!(inv.density.iter().all(|r| *r >= 0.0));
}

#[test]
fn first_excited_level_has_a_node() {
    let grid = Grid::new(512, -16.0, 16.0).unwrap();
    let mut amps = vec![C64::default(); 60];
    amps[1] = one();
    let inv = reconstruct_density(&MotionalState::pure(amps), &grid).unwrap();
    let mid = grid.len() / 2;
    let peak = inv.density.iter().cloned().fold(0.0, f64::max);
    assert!(inv.density[mid] < 0.02 * peak, "{} vs {peak}", inv.density[mid]);
    let left = inv.density[..mid].iter().cloned().fold(0.0, f64::max);
    let right = inv.density[mid..].iter().cloned().fold(0.0, f64::max);
    assert!((left - right).abs() < 1e-3 * peak);
}

#[test]
fn scan_sampling_is_checked() {
    let grid = Grid::default_scattering();
    let coarse = acquire_fringes(&coherent(C64::default(), 20), 6.0, 16).unwrap();
    assert!(matches!(invert_fringes(&coarse, &grid), Err(Error::UndersampledScan(_))));
    let shifted = FringeScan {
        k_values: coarse.k_values.iter().map(|k| k + 0.1).collect(),
        ..coarse.clone()
    };
    assert!(invert_fringes(&shifted, &grid).is_err());
}

#[test]
fn fringe_csv_round_trip() {
    let scan = acquire_fringes(&coherent(C64::new(0.5, 0.5), 40), 6.0, 32).unwrap();
    let text = scan.to_csv();
    assert!(text.starts_with("k,sin,cos\n"));
    let back = FringeScan::from_csv(&text).unwrap();
    assert_eq!(back.k_values, scan.k_values);
    assert_eq!(back.sin_signal, scan.sin_signal);
    assert_eq!(back.cos_signal, scan.cos_signal);
}

#[test]
fn free_run_round_trip() {
    let report = run_scenario(&shipped("fig2a").unwrap()).unwrap();
    let check = report.reconstruction.expect("reconstruction is on");
    assert!(check.l1 < 0.05, "{}", check.l1);
}

#[test]
fn every_shipped_config_round_trips() {
    for (name, _) in SHIPPED {
        let r = run_scenario(&shipped(name).unwrap()).unwrap();
        let l1 = r.reconstruction.map(|c| c.l1).unwrap_or(f64::NAN);
        assert!(l1 < 0.05, "{name}: {l1}");
    }
}

/// Smallest separation of two equal coherent peaks whose inversion shows a dip
/// between them.
fn resolved_separation(k_max: f64) -> f64 {
    let grid = Grid::new(1024, -48.0, 48.0).unwrap();
    let resolved = |d: f64| -> bool {
        let a = coherent_state_reference(C64::new(d / 4.0, 0.0), 120).unwrap().amplitudes;
        let b = coherent_state_reference(C64::new(-d / 4.0, 0.0), 120).unwrap().amplitudes;
        let h = FRAC_1_SQRT_2;
        let mix = MotionalState {
            cutoff: 120,
            components: vec![a.iter().map(|z| z * h).collect(), b.iter().map(|z| z * h).collect()],
        };
        let scan = acquire_fringes(&mix, k_max, 512).unwrap();
        let rho = invert_fringes(&scan, &grid).unwrap().raw;
        let mid = grid.len() / 2;
        let peak = rho.iter().cloned().fold(f64::MIN, f64::max);
        rho[mid] < 0.95 * peak
    };
    let (mut lo, mut hi) = (0.5, 40.0);
    for _ in 0..30 {
        let m = 0.5 * (lo + hi);
        if resolved(m) {
            hi = m;
        } else {
            lo = m;
        }
    }
    hi
}

#[test]
fn halving_k_max_doubles_resolution_width() {
    let fine = resolved_separation(0.5);
    let coarse = resolved_separation(0.25);
    let ratio = coarse / fine;
    assert!((ratio - 2.0).abs() < 0.2, "{fine} {coarse} ratio {ratio}");
}

fn encoded(spinor: &kleinsim::dirac::SpinorField, cutoff: usize) -> FockVector {
    let basis = HermiteBasis::new(&spinor.grid, cutoff);
    encode_spinor(spinor, &basis, [C64::new(FRAC_1_SQRT_2, 0.0); 2]).unwrap()
}

#[test]
fn positive_packet_passes_the_filter() {
    let grid = Grid::default_scattering();
    let state = encoded(&kicked_packet(&grid), 80);
    let f = filter_energy_branch(&state, Branch::Positive).unwrap();
    assert!(f.probability > 0.98, "{}", f.probability);
    assert!(!f.entangled);
    let basis = HermiteBasis::new(&grid, 80);
    let before = decode_spinor(&state, &basis).unwrap().density;
    let after = decode_spinor(&f.state, &basis).unwrap().density;
    assert!(l1_distance(&before, &after, grid.dx()) < 1e-6);
}

#[test]
fn equal_branch_superposition_splits_evenly() {
    let grid = Grid::default_scattering();
    let s = make_gaussian_spinor(&grid, 0.0, 1.0, 1.0, [one(), C64::default()]).unwrap();
    let state = encoded(&s, 60);
    for b in [Branch::Positive, Branch::Negative] {
        let f = filter_energy_branch(&state, b).unwrap();
        assert!((f.probability - 0.5).abs() < 1e-6, "{b:?}: {}", f.probability);
        assert!(f.entangled);
    }
}

#[test]
fn steep_slope_lobes_have_opposite_branches() {
    let report = run_scenario(&shipped("fig2d").unwrap()).unwrap();
    let f = report.branch_filter.expect("filter is on");
    // reflected part moves back to the left, transmitted part continues right
    assert!(f.positive_mean_x < 0.0, "{}", f.positive_mean_x);
    assert!(f.negative_mean_x > 0.0, "{}", f.negative_mean_x);
    assert!(f.negative_mean_x - f.positive_mean_x > 10.0);
    assert!((f.positive_probability + f.negative_probability - 1.0).abs() < 1e-6);
}

fn weighted_profile(spinor: &kleinsim::dirac::SpinorField, keep: impl Fn(f64) -> bool) -> f64 {
    let profile = branch_momentum_profile(spinor, DEFAULT_PROFILE_WINDOW);
    let rho = spinor.density();
    let grid = &spinor.grid;
    let (mut num, mut den) = (0.0, 0.0);
    for j in 0..grid.len() {
        if keep(grid.x(j)) {
            num += profile[j] * rho[j];
            den += rho[j];
        }
    }
    num / den
}

#[test]
fn momentum_profile_examples() {
    let grid = Grid::default_scattering();
    let wide = make_gaussian_spinor(&grid, 0.0, 3.5, 4.0, [one(), one()]).unwrap();
    let profile = branch_momentum_profile(&wide, DEFAULT_PROFILE_WINDOW);
    let rho = wide.density();
    let peak = rho.iter().cloned().fold(0.0, f64::max);
    for j in 0..grid.len() {
        if rho[j] > 0.1 * peak {
            assert!((profile[j] - 3.5).abs() < 1e-6, "x={} p={}", grid.x(j), profile[j]);
        }
    }

    let rest = make_gaussian_spinor(&grid, 0.0, 0.0, 1.0, [one(), one()]).unwrap();
    let profile = branch_momentum_profile(&rest, DEFAULT_PROFILE_WINDOW);
    assert!(profile.iter().all(|p| p.abs() < 1e-9));

    // after the turn the reflected lobe on the left moves left
    let reflected = evolve(&kicked_packet(&grid), &slope_params(22.0), 1.0, 1700).unwrap();
    let p_left = weighted_profile(&reflected, |x| x < 0.0);
    assert!(p_left < -1.0, "{p_left}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cos_even_sin_odd(re in -1.5..1.5f64, im in -1.5..1.5f64, k in 0.0..6.0f64) {
        let state = coherent(C64::new(re, im), 60);
        let scan = acquire_fringes_at(&state, &[k, -k]).unwrap();
        prop_assert!((scan.cos_signal[0] - scan.cos_signal[1]).abs() < 1e-9);
        prop_assert!((scan.sin_signal[0] + scan.sin_signal[1]).abs() < 1e-9);
        for v in scan.sin_signal.iter().chain(&scan.cos_signal) {
            prop_assert!(v.abs() <= 1.0);
        }
    }
}
