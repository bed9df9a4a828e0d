mod common;

use common::{kicked_packet, one, slope_params};
use kleinsim::analytic::{klein_gamma, tunnel_prob_analytic};
use kleinsim::dirac::{
    branch_population, branch_project, evolve, make_gaussian_spinor, record_frames,
    tunnel_probability, Branch, DiracParams, Potential, Spectral, SplitOperator,
};
use kleinsim::{Error, Grid, C64};

fn default_grid() -> Grid {
    Grid::default_scattering()
}

#[test]
fn gaussian_spinor_examples() {
    let g = default_grid();
    let fft = Spectral::new(g.len());
    let p = slope_params(0.0);

    let s = kicked_packet(&g);
    assert!(branch_population(&s, &p, Branch::Positive, &fft) > 0.98);
    assert!((s.mean_p(&fft) - 3.5).abs() < 1e-6);

    let s = make_gaussian_spinor(&g, 0.0, 0.0, 1.0, [one(), C64::default()]).unwrap();
    assert!(s.mean_x().abs() < 1e-12);
    assert!(s.mean_p(&fft).abs() < 1e-12);
    assert!((s.norm_sqr() - 1.0).abs() < 1e-12);

    let s = make_gaussian_spinor(&g, 2.0, 1.0, 1.0, [one(), C64::default()]).unwrap();
    assert!((s.mean_x() - 2.0).abs() < 1e-6);
    assert!((s.mean_p(&fft) - 1.0).abs() < 1e-6);
    assert!(s.lower.iter().all(|z| *z == C64::default()));
}

#[test]
fn narrow_grid_reports_tail() {
    let g = Grid::new(64, -3.0, 3.0).unwrap();
    let e = make_gaussian_spinor(&g, 0.0, 0.0, 1.0, [one(), one()]).unwrap_err();
    assert!(matches!(e, Error::GridTooNarrow { .. }), "{e}");
}

#[test]
fn projectors_complete_on_arbitrary_state() {
    let g = default_grid();
    let p = slope_params(50.0);
    let s = make_gaussian_spinor(&g, -3.0, 1.7, 2.0, [C64::new(0.3, 0.8), C64::new(-0.5, 0.1)]).unwrap();
    let plus = branch_project(&s, &p, Branch::Positive);
    let minus = branch_project(&s, &p, Branch::Negative);
    let err = (0..g.len())
        .map(|j| {
            (plus.upper[j] + minus.upper[j] - s.upper[j]).norm()
                + (plus.lower[j] + minus.lower[j] - s.lower[j]).norm()
        })
        .fold(0.0, f64::max);
    assert!(err < 1e-12, "{err}");
}

#[test]
fn massless_plane_wave_like_packet_is_positive() {
    let g = default_grid();
    let fft = Spectral::new(g.len());
    let p = DiracParams::new(0.0097, 0.0, Potential::None).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s = make_gaussian_spinor(&g, 0.0, 2.0, 6.0, [C64::new(h, 0.0), C64::new(h, 0.0)]).unwrap();
    assert!(branch_population(&s, &p, Branch::Positive, &fft) > 1.0 - 1e-12);
}

#[test]
fn norm_drift_per_thousand_steps() {
    let g = default_grid();
    for khz in [0.0, 50.0, 76.0] {
        let p = slope_params(khz);
        let s = evolve(&kicked_packet(&g), &p, 1.0, 1000).unwrap();
        let drift = (s.norm_sqr() - 1.0).abs();
        assert!(drift < 1e-9, "{khz} kHz: {drift:e}");
    }
    let q = DiracParams::new(0.0097, 0.004, Potential::Quadratic { q: 4.6e-4 }).unwrap();
    let s = evolve(&kicked_packet(&g), &q, 1.0, 1000).unwrap();
    assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
}

#[test]
fn ehrenfest_momentum_slope() {
    // A linear potential shifts every momentum component by −g·t, so the
    // finite-difference slope of ⟨p⟩ is −g.
    let g = default_grid();
    let p = slope_params(50.0);
    let Potential::Linear { g: slope } = p.potential else { unreachable!() };
    let series = record_frames(&kicked_packet(&g), &p, 1.0, 600, 50).unwrap();
    let f = &series.frames;
    for i in 1..f.len() - 1 {
        let d = (f[i + 1].mean_p - f[i - 1].mean_p) / (f[i + 1].time - f[i - 1].time);
        assert!((d + slope).abs() < 1e-3 * slope, "t={} d<p>/dt={d} g={slope}", f[i].time);
    }
}

#[test]
fn ehrenfest_velocity_is_c_sigma_x() {
    let g = default_grid();
    let p = slope_params(50.0);
    let dt = 0.5;
    let series = record_frames(&kicked_packet(&g), &p, dt, 800, 1).unwrap();
    let f = &series.frames;
    let scale = p.c * f.iter().map(|fr| fr.mean_sigma_x.abs()).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for i in 1..f.len() - 1 {
        let d = (f[i + 1].mean_x - f[i - 1].mean_x) / (2.0 * dt);
        worst = worst.max((d - p.c * f[i].mean_sigma_x).abs());
    }
    assert!(worst < 1e-3 * scale, "worst {worst:e} vs scale {scale:e}");
}

fn max_energy_drift(p: &DiracParams, dt: f64) -> f64 {
    let g = default_grid();
    let op = SplitOperator::new(&g, p, dt).unwrap();
    let mut s = kicked_packet(&g);
    let e0 = s.energy(p, op.spectral());
    let n = (100.0 / dt).round() as usize;
    let mut worst: f64 = 0.0;
    for chunk in 0..8 {
        op.advance(&mut s, n, chunk * n).unwrap();
        worst = worst.max((s.energy(p, op.spectral()) - e0).abs() / e0.abs());
    }
    worst
}

#[test]
fn energy_is_conserved_at_reference_step() {
    for khz in [0.0, 22.0, 50.0, 76.0] {
        let drift = max_energy_drift(&slope_params(khz), 0.25);
        assert!(drift < 1e-6, "{khz} kHz: relative drift {drift:e}");
    }
}

#[test]
fn energy_error_shrinks_with_step_squared() {
    // At the default step the excursion during the turn is a splitting error.
    let p = slope_params(76.0);
    let ratio = max_energy_drift(&p, 1.0) / max_energy_drift(&p, 0.5);
    assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}");
}

#[test]
fn free_branch_populations_over_full_run() {
    let g = default_grid();
    let p = slope_params(0.0);
    let series = record_frames(&kicked_packet(&g), &p, 1.0, 1500, 100).unwrap();
    let first = series.first().positive_population;
    for f in &series.frames {
        assert!((f.positive_population - first).abs() < 1e-6);
        assert!((f.mean_p - series.first().mean_p).abs() < 1e-6);
    }
}

#[test]
fn free_packet_moves_at_light_speed() {
    let g = default_grid();
    let p = slope_params(0.0);
    let series = record_frames(&kicked_packet(&g), &p, 1.0, 1000, 1000).unwrap();
    let v = (series.last().mean_x - series.first().mean_x) / 1000.0;
    assert!(v < p.c && v > 0.9 * p.c, "v={v} c={}", p.c);
}

#[test]
fn strang_splitting_is_second_order() {
    let g = default_grid();
    let p = slope_params(50.0);
    let s0 = kicked_packet(&g);
    let t = 400.0;
    let run = |dt: f64| evolve(&s0, &p, dt, (t / dt).round() as usize).unwrap();
    let coarse = run(2.0);
    let fine = run(1.0);
    // reference at a quarter of the finer step
    let reference = run(0.25);
    let ratio = coarse.distance(&reference) / fine.distance(&reference);
    assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}");
}

#[test]
fn zero_slope_does_not_tunnel() {
    let g = default_grid();
    let series = record_frames(&kicked_packet(&g), &slope_params(0.0), 1.0, 1000, 100).unwrap();
    let p = tunnel_probability(&series).unwrap();
    assert!(p < 0.02, "{p}");
}

#[test]
fn slope_50_matches_landau_zener() {
    let g = default_grid();
    let series = record_frames(&kicked_packet(&g), &slope_params(50.0), 1.0, 1000, 100).unwrap();
    let p = tunnel_probability(&series).unwrap();
    assert!((p - 0.21).abs() < 0.05, "{p}");
}

#[test]
fn massless_particle_always_tunnels() {
    let g = default_grid();
    let mut p = slope_params(50.0);
    p.mc2 = 0.0;
    let series = record_frames(&kicked_packet(&g), &p, 1.0, 1000, 100).unwrap();
    let t = tunnel_probability(&series).unwrap();
    assert!((t - 1.0).abs() < 0.02, "{t}");
}

#[test]
fn light_particle_follows_landau_zener() {
    let g = default_grid();
    let mut p = slope_params(50.0);
    p.mc2 /= 10.0;
    let Potential::Linear { g: slope } = p.potential else { unreachable!() };
    let series = record_frames(&kicked_packet(&g), &p, 1.0, 1000, 100).unwrap();
    let t = tunnel_probability(&series).unwrap();
    let lz = tunnel_prob_analytic(klein_gamma(p.mc2, p.c, slope).unwrap()).unwrap();
    assert!((t - lz).abs() < 0.02, "numeric {t} vs {lz}");
}

#[test]
fn unseparated_frame_is_rejected() {
    let g = default_grid();
    let series = record_frames(&kicked_packet(&g), &slope_params(50.0), 1.0, 200, 200).unwrap();
    assert!(matches!(tunnel_probability(&series), Err(Error::NotSeparated { .. })));
}

#[test]
fn frame_series_invariants() {
    let g = default_grid();
    let series = record_frames(&kicked_packet(&g), &slope_params(76.0), 1.0, 800, 80).unwrap();
    let times = series.times();
    assert!(times.windows(2).all(|w| w[1] > w[0]));
    for f in &series.frames {
        let total: f64 = f.density.iter().sum::<f64>() * g.dx();
        let split: f64 = f
            .density_plus
            .iter()
            .zip(&f.density_minus)
            .map(|(a, b)| a + b)
            .sum::<f64>()
            * g.dx();
        assert!((total - 1.0).abs() < 1e-6);
        assert!((split - total).abs() < 1e-6);
    }
}
