use std::time::{Duration, Instant};

use serde::Serialize;

use super::config::{Engine, Physics, ScenarioConfig};
use crate::analytic::{analytic_tunneling, IonScenario};
use crate::dirac::{
    make_gaussian_spinor, prep2_spinor, record_frames, tunnel_probability,
    tunnel_probability_position, turning_point_tail, Branch, DiracParams, Frame, FrameSeries,
    Spectral, SpinorField,
};
use crate::ion::{
    build_hamiltonian, decode_spinor, encode_spinor, prepare_initial, qubit2_preparation,
    FockVector, HermiteBasis, KrylovPropagator, LambDickeMode, Recipe,
};
use crate::reconstruction::{
    branch_momentum_profile, filter_energy_branch, fock_mean_momentum, l1_distance,
    reconstruct_density, DEFAULT_PROFILE_WINDOW,
};
use crate::{Error, Grid, Result, C64};

/// One captured time. Branch-resolved columns and the local momentum map
/// exist whenever the simulated state is a spinor, i.e. for the Dirac engine
/// and for emulator states whose qubit₂ is not entangled with the rest.
#[derive(Clone, Debug)]
pub struct FrameRecord {
    pub time: f64,
    pub density: Vec<f64>,
    pub density_plus: Option<Vec<f64>>,
    pub density_minus: Option<Vec<f64>>,
    pub local_p: Option<Vec<f64>>,
    pub mean_x: f64,
    pub variance_x: f64,
    pub mean_p: f64,
    pub negative_population: Option<f64>,
    pub branch_overlap: Option<f64>,
    pub mean_phonons: Option<f64>,
    pub cutoff_tail: Option<f64>,
    pub qubit2_purity: Option<f64>,
}

fn moments(density: &[f64], grid: &Grid) -> (f64, f64) {
    let dx = grid.dx();
    let mean: f64 = density.iter().enumerate().map(|(j, r)| r * grid.x(j)).sum::<f64>() * dx;
    let var: f64 = density
        .iter()
        .enumerate()
        .map(|(j, r)| r * (grid.x(j) - mean).powi(2))
        .sum::<f64>()
        * dx;
    (mean, var)
}

impl FrameRecord {
    fn from_frame(f: &Frame) -> Self {
        let (_, variance_x) = moments(&f.density, &f.state.grid);
        Self {
            time: f.time,
            density: f.density.clone(),
            density_plus: Some(f.density_plus.clone()),
            density_minus: Some(f.density_minus.clone()),
            local_p: Some(branch_momentum_profile(&f.state, DEFAULT_PROFILE_WINDOW)),
            mean_x: f.mean_x,
            variance_x,
            mean_p: f.mean_p,
            negative_population: Some(f.negative_population()),
            branch_overlap: Some(f.branch_overlap()),
            mean_phonons: None,
            cutoff_tail: None,
            qubit2_purity: None,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TunnelingEstimates {
    /// Negative-branch population of the final frame, when the branches have
    /// separated.
    pub branch: Option<f64>,
    pub branch_note: Option<String>,
    /// Weight beyond the classical turning point at the final frame.
    pub position: Option<f64>,
    /// Post-selection probability of the negative-branch filter.
    pub filter: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReconstructionCheck {
    pub time_us: f64,
    /// ∫|reconstructed − direct| dx.
    pub l1: f64,
    pub negativity: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchFilterSummary {
    pub positive_probability: f64,
    pub negative_probability: f64,
    pub positive_mean_x: f64,
    pub negative_mean_x: f64,
    pub entangled: bool,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub config: ScenarioConfig,
    pub config_hash: String,
    pub params: DiracParams,
    pub frames: Vec<FrameRecord>,
    pub tunneling: TunnelingEstimates,
    pub analytic: Option<f64>,
    pub reconstruction: Option<ReconstructionCheck>,
    pub branch_filter: Option<BranchFilterSummary>,
    pub warnings: Vec<String>,
    pub wall_clock: Duration,
    /// Final joint state; for the Dirac engine the final spinor encoded in
    /// the oscillator basis.
    pub final_state: FockVector,
}

impl RunReport {
    pub fn name(&self) -> &str {
        &self.config.name
    }

    pub fn engine(&self) -> Engine {
        self.config.engine
    }

    pub fn grid(&self) -> &Grid {
        &self.config.grid
    }

    pub fn first(&self) -> &FrameRecord {
        &self.frames[0]
    }

    pub fn last(&self) -> &FrameRecord {
        self.frames.last().expect("reports hold at least one frame")
    }

    pub fn times(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.time).collect()
    }

    pub fn mean_x_series(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.mean_x).collect()
    }
}

/// Frame-by-frame ∫|ρ_a − ρ_b| dx between two runs of the same scenario.
pub fn frame_l1(a: &RunReport, b: &RunReport) -> Result<Vec<f64>> {
    if a.grid() != b.grid() || a.times() != b.times() {
        return Err(Error::InvalidParams(format!(
            "runs {} and {} differ in grid or frame times",
            a.name(),
            b.name()
        )));
    }
    let dx = a.grid().dx();
    Ok(a.frames
        .iter()
        .zip(&b.frames)
        .map(|(fa, fb)| l1_distance(&fa.density, &fb.density, dx))
        .collect())
}

/// Sign changes of a series, ignoring entries with |v| ≤ `floor`.
pub fn sign_changes(values: &[f64], floor: f64) -> usize {
    let signs: Vec<bool> = values
        .iter()
        .filter(|v| v.abs() > floor)
        .map(|v| *v > 0.0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn initial_spinor(cfg: &ScenarioConfig) -> Result<SpinorField> {
    match &cfg.physics {
        Physics::Ion { ion, recipe, .. } => {
            let kappa = |duration: f64| ion.eta * ion.omega_prep2 * duration;
            match *recipe {
                Recipe::MomentumKick { p0 } => {
                    make_gaussian_spinor(&cfg.grid, 0.0, p0, 1.0, [C64::new(1.0, 0.0); 2])
                }
                Recipe::Prep2 { duration } => prep2_spinor(&cfg.grid, kappa(duration)),
                Recipe::Prep2PlusKick { duration, p0 } => {
                    let mut s = prep2_spinor(&cfg.grid, kappa(duration))?;
                    s.kick(p0);
                    Ok(s)
                }
            }
        }
        Physics::Dirac { x0, p0, width, internal, .. } => {
            make_gaussian_spinor(&cfg.grid, *x0, *p0, *width, *internal)
        }
    }
}

fn qubit2_for(cfg: &ScenarioConfig) -> [C64; 2] {
    match &cfg.physics {
        Physics::Ion { scenario, .. } => qubit2_preparation(*scenario),
        Physics::Dirac { .. } => qubit2_preparation(IonScenario::Free),
    }
}

struct EngineRun {
    frames: Vec<FrameRecord>,
    branch: Option<std::result::Result<f64, Error>>,
    position: f64,
    final_state: FockVector,
    warnings: Vec<String>,
}

fn run_dirac(cfg: &ScenarioConfig, params: &DiracParams, basis: &HermiteBasis) -> Result<EngineRun> {
    let s0 = initial_spinor(cfg)?;
    let stride = cfg.steps_per_frame();
    let series = record_frames(&s0, params, cfg.dirac_dt, stride * cfg.n_frames, stride)?;
    let final_state = encode_spinor(&series.last().state, basis, qubit2_for(cfg))?;
    let mut warnings = Vec::new();
    let lost = 1.0 - final_state.norm_sqr();
    if lost > 1e-6 {
        warnings.push(format!(
            "final spinor loses {lost:.2e} of its norm in {} oscillator levels",
            basis.cutoff()
        ));
    }
    Ok(EngineRun {
        frames: series.frames.iter().map(FrameRecord::from_frame).collect(),
        branch: Some(tunnel_probability(&series)),
        position: tunnel_probability_position(&series),
        final_state,
        warnings,
    })
}

fn run_ion(cfg: &ScenarioConfig, params: &DiracParams, basis: &HermiteBasis) -> Result<EngineRun> {
    let Physics::Ion { ion, scenario, recipe } = &cfg.physics else {
        return Err(Error::InconsistentScenario(format!(
            "engine {} needs ion settings",
            cfg.engine
        )));
    };
    let mode = if cfg.engine == Engine::IonCorrected {
        LambDickeMode::Corrected
    } else {
        LambDickeMode::Ideal
    };
    let prop = KrylovPropagator::from_spec(&build_hamiltonian(ion, *scenario, mode)?)?;
    let mut state = prepare_initial(ion, *scenario, *recipe)?;
    let fft = Spectral::new(cfg.grid.len());
    let stride = cfg.steps_per_frame();
    let mut frames = Vec::with_capacity(cfg.n_frames + 1);
    let mut spinor_frames = Vec::with_capacity(cfg.n_frames + 1);
    let mut warnings = Vec::new();
    for i in 0..=cfg.n_frames {
        if i > 0 {
            prop.advance(&mut state, cfg.ion_dt, stride, (i - 1) * stride)?;
        }
        let decoded = decode_spinor(&state, basis)?;
        let mean_p = fock_mean_momentum(&state);
        let record = match &decoded.spinor {
            Some(spinor) => {
                let f = Frame::capture_with(spinor, params, &fft);
                let mut r = FrameRecord::from_frame(&f);
                r.density = decoded.density.clone();
                r.mean_p = mean_p;
                spinor_frames.push(f);
                r
            }
            None => {
                let (mean_x, variance_x) = moments(&decoded.density, &cfg.grid);
                FrameRecord {
                    time: state.time,
                    density: decoded.density.clone(),
                    density_plus: None,
                    density_minus: None,
                    local_p: None,
                    mean_x,
                    variance_x,
                    mean_p,
                    negative_population: None,
                    branch_overlap: None,
                    mean_phonons: None,
                    cutoff_tail: None,
                    qubit2_purity: None,
                }
            }
        };
        frames.push(FrameRecord {
            time: state.time,
            mean_phonons: Some(state.mean_phonons()),
            cutoff_tail: Some(state.top_tail()),
            qubit2_purity: Some(decoded.qubit2_purity),
            ..record
        });
    }
    if spinor_frames.len() < frames.len() {
        warnings.push(format!(
            "qubit 2 entangled with the motion in {} of {} frames; branch columns omitted there",
            frames.len() - spinor_frames.len(),
            frames.len()
        ));
    }
    let first = &frames[0];
    let last = frames.last().expect("at least one frame");
    let position = turning_point_tail(params, first.mean_x, first.mean_p, &last.density, &cfg.grid);
    let branch = if spinor_frames.len() == frames.len() {
        Some(tunnel_probability(&FrameSeries {
            params: *params,
            frames: spinor_frames,
        }))
    } else {
        None
    };
    Ok(EngineRun {
        frames,
        branch,
        position,
        final_state: state,
        warnings,
    })
}

fn branch_filter_summary(state: &FockVector, basis: &HermiteBasis) -> Result<BranchFilterSummary> {
    let plus = filter_energy_branch(state, Branch::Positive)?;
    let minus = filter_energy_branch(state, Branch::Negative)?;
    let center = |s: &FockVector| -> Result<f64> {
        let d = decode_spinor(s, basis)?;
        Ok(moments(&d.density, basis.grid()).0)
    };
    Ok(BranchFilterSummary {
        positive_probability: plus.probability,
        negative_probability: minus.probability,
        positive_mean_x: center(&plus.state)?,
        negative_mean_x: center(&minus.state)?,
        entangled: plus.entangled,
    })
}

/// Runs one scenario with its configured engine.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunReport> {
    run_inner(cfg).map_err(|e| e.in_scenario(&cfg.name))
}

fn run_inner(cfg: &ScenarioConfig) -> Result<RunReport> {
    let start = Instant::now();
    cfg.validate()?;
    let params = cfg.dirac_params()?;
    let basis = HermiteBasis::new(&cfg.grid, cfg.fock_cutoff());
    let run = match cfg.engine {
        Engine::Dirac => run_dirac(cfg, &params, &basis)?,
        Engine::IonIdeal | Engine::IonCorrected => run_ion(cfg, &params, &basis)?,
    };
    let mut warnings = cfg.warnings();
    warnings.extend(run.warnings);
    let mut tunneling = TunnelingEstimates {
        position: Some(run.position),
        ..Default::default()
    };
    match run.branch {
        Some(Ok(p)) => tunneling.branch = Some(p),
        Some(Err(e)) => tunneling.branch_note = Some(e.to_string()),
        None => tunneling.branch_note = Some("no spinor available for the final frame".into()),
    }
    let analytic = match &cfg.physics {
        Physics::Ion { ion, scenario, .. } if *scenario != IonScenario::Quadratic => {
            Some(analytic_tunneling(ion)?)
        }
        _ => None,
    };
    let last = run.frames.last().expect("at least one frame");
    let reconstruction = if cfg.reconstruction {
        let inv = reconstruct_density(&run.final_state.trace_qubits(), &cfg.grid)?;
        Some(ReconstructionCheck {
            time_us: last.time,
            l1: l1_distance(&inv.density, &last.density, cfg.grid.dx()),
            negativity: inv.negativity,
        })
    } else {
        None
    };
    let branch_filter = if cfg.branch_filter {
        let s = branch_filter_summary(&run.final_state, &basis)?;
        tunneling.filter = Some(s.negative_probability);
        if s.entangled {
            warnings.push(
                "qubit 1 is not in a sigma_x eigenstate; branch filter is approximate".into(),
            );
        }
        Some(s)
    } else {
        None
    };
    Ok(RunReport {
        config: cfg.clone(),
        config_hash: cfg.hash(),
        params,
        frames: run.frames,
        tunneling,
        analytic,
        reconstruction,
        branch_filter,
        warnings,
        wall_clock: start.elapsed(),
        final_state: run.final_state,
    })
}
