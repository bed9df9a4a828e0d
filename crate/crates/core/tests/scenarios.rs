use std::fs;

use kleinsim::scenarios::{
    emit_frames, load_config, run_scenario, shipped, sign_changes, summary_json, tunneling_table,
    write_summary, Engine, FrameFormat, ScenarioConfig, PUBLISHED_ANALYTIC, TUNNELING_SET,
};
use kleinsim::Error;

#[test]
fn free_packet_moves_right_without_tunneling() {
    let r = run_scenario(&shipped("fig2a").unwrap()).unwrap();
    assert!(r.last().mean_x > r.first().mean_x + 5.0);
    let p = r.tunneling.branch.expect("parts are separated");
    assert!(p.abs() < 0.02, "{p}");
    assert_eq!(r.analytic, Some(0.0));
}

#[test]
fn free_dispersion_grows_and_the_well_slows_it() {
    let free = run_scenario(&shipped("fig3a").unwrap()).unwrap();
    let well = run_scenario(&shipped("fig3b").unwrap()).unwrap();
    let v: Vec<f64> = free.frames.iter().map(|f| f.variance_x).collect();
    assert!(v.windows(2).all(|w| w[1] > w[0]), "variance not monotone");
    assert_eq!(free.times(), well.times());
    assert!(well.last().variance_x < free.last().variance_x);
}

#[test]
fn quadratic_kick_oscillates() {
    let r = run_scenario(&shipped("fig3c").unwrap()).unwrap();
    let n = sign_changes(&r.mean_x_series(), 1e-6);
    assert!(n >= 2, "{n} sign changes");
}

#[test]
fn sign_change_counting() {
    assert_eq!(sign_changes(&[0.0, 1.0, -1.0, 2.0], 1e-6), 2);
    assert_eq!(sign_changes(&[0.0, 1e-9, -1e-9, 1.0], 1e-6), 0);
    assert_eq!(sign_changes(&[], 1e-6), 0);
}

#[test]
fn tunneling_table_columns() {
    let configs: Vec<ScenarioConfig> = TUNNELING_SET.iter().map(|n| shipped(n).unwrap()).collect();
    let table = tunneling_table(&configs).unwrap();
    assert_eq!(table.rows.len(), 4);
    for (row, expected) in table.rows.iter().zip(PUBLISHED_ANALYTIC) {
        let a = row.analytic.unwrap();
        assert!((a - expected).abs() < 0.005, "{}: {a}", row.name);
        assert!(row.dirac.is_some() && row.ion_ideal.is_some() && row.ion_corrected.is_some());
    }
    for row in &table.rows[2..] {
        let d = row.dirac.unwrap();
        assert!((d - row.analytic.unwrap()).abs() < 0.05, "{}: {d}", row.name);
    }
    let csv = table.to_csv();
    assert_eq!(csv.lines().count(), 5);
    assert!(table.to_string().contains("fig2d"));
}

fn two_frame_config() -> ScenarioConfig {
    let mut cfg = shipped("desk-free").unwrap();
    cfg.n_frames = 1;
    cfg.validate().unwrap();
    cfg
}

#[test]
fn two_frames_give_two_files_and_an_index() {
    let r = run_scenario(&two_frame_config()).unwrap();
    assert_eq!(r.frames.len(), 2);
    for format in [FrameFormat::Csv, FrameFormat::Ndjson] {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_frames(&r, dir.path(), format).unwrap();
        assert_eq!(files.len(), 3);
        let ext = format.extension();
        let index = fs::read_to_string(dir.path().join(format!("index.{ext}"))).unwrap();
        match format {
            FrameFormat::Csv => {
                assert_eq!(index.lines().next(), Some("frame,time_us,file"));
                assert_eq!(index.lines().count(), 3);
                let first = fs::read_to_string(&files[0]).unwrap();
                assert_eq!(first.lines().next(), Some("x,density,density_plus,density_minus,local_p"));
                assert_eq!(first.lines().count(), r.grid().len() + 1);
            }
            FrameFormat::Ndjson => {
                let last: serde_json::Value =
                    serde_json::from_str(index.lines().last().unwrap()).unwrap();
                assert_eq!(last["time_us"], 200.0);
            }
        }
    }
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = two_frame_config();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let r = run_scenario(&cfg).unwrap();
        emit_frames(&r, dir, FrameFormat::Csv).unwrap();
        write_summary(&r, dir).unwrap();
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 4);
    for n in names {
        assert_eq!(fs::read(a.path().join(&n)).unwrap(), fs::read(b.path().join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn steep_slope_frames_carry_branch_columns() {
    let r = run_scenario(&shipped("fig2d").unwrap()).unwrap();
    for f in [r.first(), r.last()] {
        assert!(f.density_plus.is_some() && f.density_minus.is_some() && f.local_p.is_some());
    }
    let dir = tempfile::tempdir().unwrap();
    let files = emit_frames(&r, dir.path(), FrameFormat::Csv).unwrap();
    let last = fs::read_to_string(&files[files.len() - 2]).unwrap();
    let row = last.lines().nth(1).unwrap();
    assert!(row.split(',').all(|c| !c.is_empty()), "{row}");
}

#[test]
fn emulator_frames_without_spinor_leave_columns_empty() {
    // the quadratic run entangles qubit₂ with the motion
    let cfg = shipped("fig3b").unwrap().with_engine(Engine::IonIdeal).unwrap();
    let r = run_scenario(&cfg).unwrap();
    assert!(r.frames.iter().any(|f| f.density_plus.is_none()));
    let dir = tempfile::tempdir().unwrap();
    let files = emit_frames(&r, dir.path(), FrameFormat::Csv).unwrap();
    let last = fs::read_to_string(&files[files.len() - 2]).unwrap();
    assert!(last.lines().nth(1).unwrap().ends_with(",,,"));
}

#[test]
fn config_hash_tracks_inputs() {
    let a = shipped("fig2c").unwrap();
    let b = shipped("fig2c").unwrap();
    assert_eq!(a.hash(), b.hash());
    assert_eq!(a.hash().len(), 64);
    let ion = a.clone().with_engine(Engine::IonIdeal).unwrap();
    assert_ne!(a.hash(), ion.hash());
    let r = run_scenario(&a).unwrap();
    assert_eq!(r.config_hash, a.hash());
    let s = summary_json(&r);
    assert_eq!(s["config_hash"], a.hash());
    assert!(s.get("wall_clock").is_none());
}

#[test]
fn configs_load_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("custom.cfg");
    let text = kleinsim::scenarios::SHIPPED
        .iter()
        .find(|(n, _)| *n == "desk-linear")
        .unwrap()
        .1
        .replace("name = desk-linear", "name = custom");
    fs::write(&path, &text).unwrap();
    let cfg = load_config(path.to_str().unwrap()).unwrap();
    assert_eq!(cfg.name, "custom");
    assert_eq!(cfg.engine, Engine::IonIdeal);

    fs::write(&path, format!("{text}omega3_kHz = 1\n")).unwrap();
    let e = load_config(path.to_str().unwrap()).unwrap_err();
    assert!(e.to_string().contains("omega3_kHz"), "{e}");
    assert!(load_config("no-such-config").is_err());
}

#[test]
fn dirac_form_cannot_run_on_the_emulator() {
    let text = "name = t\nengine = dirac\nc_delta_per_us = 0.01\nmc2_rad_per_us = 0.008\n\
                p0_hbar_per_delta = 1\nduration_us = 10\nframes = 2\n\
                grid_points = 256\nx_min_delta = -16\nx_max_delta = 16\n";
    let cfg = ScenarioConfig::parse(text).unwrap();
    assert!(matches!(cfg.with_engine(Engine::IonIdeal), Err(Error::InconsistentScenario(_))));
}

#[test]
fn errors_name_the_scenario() {
    let mut cfg = shipped("fig2d").unwrap().with_engine(Engine::IonIdeal).unwrap();
    if let kleinsim::scenarios::Physics::Ion { ion, .. } = &mut cfg.physics {
        ion.fock_cutoff = 256;
    }
    let e = run_scenario(&cfg).unwrap_err();
    assert!(matches!(e, Error::Scenario { .. }), "{e}");
    assert!(e.to_string().contains("fig2d"));
}
