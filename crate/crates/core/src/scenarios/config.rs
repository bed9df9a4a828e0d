//! Flat `key = value` scenario files. Units are part of the key names.
//!
//! ```text
//! # comment
//! name = fig2c
//! engine = dirac
//! scenario = linear
//! omega_tilde2_kHz = 50
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::analytic::{IonParams, IonScenario};
use crate::dirac::{DiracParams, Potential};
use crate::ion::Recipe;
use crate::units::khz_to_rad_per_us;
use crate::{Error, Grid, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Engine {
    Dirac,
    IonIdeal,
    IonCorrected,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Dirac, Engine::IonIdeal, Engine::IonCorrected];

    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Dirac => "dirac",
            Engine::IonIdeal => "ion-ideal",
            Engine::IonCorrected => "ion-corrected",
        }
    }

    pub fn is_ion(self) -> bool {
        self != Engine::Dirac
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirac" => Ok(Engine::Dirac),
            "ion-ideal" | "ion" => Ok(Engine::IonIdeal),
            "ion-corrected" => Ok(Engine::IonCorrected),
            other => Err(Error::InvalidParams(format!(
                "unknown engine '{other}' (dirac, ion-ideal, ion-corrected)"
            ))),
        }
    }
}

/// What is being simulated: either laboratory settings or a Dirac particle
/// given directly.
#[derive(Clone, Debug, PartialEq)]
pub enum Physics {
    Ion {
        ion: IonParams,
        scenario: IonScenario,
        recipe: Recipe,
    },
    Dirac {
        params: DiracParams,
        x0: f64,
        p0: f64,
        width: f64,
        internal: [C64; 2],
        /// Fock levels used when the final state is handed to the
        /// measurement protocol.
        fock_cutoff: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub engine: Engine,
    pub physics: Physics,
    pub duration: f64,
    /// Number of equal intervals; frames are taken at their boundaries.
    pub n_frames: usize,
    pub dirac_dt: f64,
    pub ion_dt: f64,
    pub grid: Grid,
    pub reconstruction: bool,
    pub branch_filter: bool,
    pub out_dir: Option<PathBuf>,
}

const KNOWN_KEYS: &[&str] = &[
    "name",
    "engine",
    "scenario",
    "eta",
    "delta_nm",
    "omega_tilde1_kHz",
    "omega1_kHz",
    "omega_tilde2_kHz",
    "omega2_kHz",
    "omega_prep2_kHz",
    "fock_cutoff",
    "recipe",
    "p0_hbar_per_delta",
    "prep_duration_us",
    "c_delta_per_us",
    "mc2_rad_per_us",
    "potential",
    "slope_rad_per_us_per_delta",
    "curvature_rad_per_us_per_delta2",
    "x0_delta",
    "width_delta",
    "spinor",
    "duration_us",
    "frames",
    "dirac_dt_us",
    "ion_dt_us",
    "grid_points",
    "x_min_delta",
    "x_max_delta",
    "reconstruction",
    "branch_filter",
    "out_dir",
];

struct Table {
    values: BTreeMap<String, (usize, String)>,
}

impl Table {
    fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Config {
                line: line_no,
                msg: format!("expected key = value, got {raw:?}"),
            })?;
            let (k, v) = (k.trim(), v.trim());
            if !KNOWN_KEYS.contains(&k) {
                return Err(Error::Config {
                    line: line_no,
                    msg: format!("unknown key '{k}'"),
                });
            }
            if values.insert(k.to_owned(), (line_no, v.to_owned())).is_some() {
                return Err(Error::Config {
                    line: line_no,
                    msg: format!("duplicate key '{k}'"),
                });
            }
        }
        Ok(Self { values })
    }

    fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    fn line(&self, key: &str) -> usize {
        self.values.get(key).map(|(l, _)| *l).unwrap_or(0)
    }

    fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.values.get(key).map(|(_, v)| v.as_str()).unwrap_or(default)
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.values
            .get(key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::Config {
                line: 0,
                msg: format!("missing key '{key}'"),
            })
    }

    fn parse_as<T: FromStr>(&self, key: &str, value: &str) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        value.parse::<T>().map_err(|e| Error::Config {
            line: self.line(key),
            msg: format!("{key}: {e}"),
        })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        let v = self.required(key)?;
        self.parse_as(key, v)
    }

    fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        match self.values.get(key) {
            Some((_, v)) => self.parse_as(key, v),
            None => Ok(default),
        }
    }

    fn switch(&self, key: &str, default: bool) -> Result<bool> {
        match self.values.get(key).map(|(_, v)| v.as_str()) {
            None => Ok(default),
            Some("on" | "true" | "yes") => Ok(true),
            Some("off" | "false" | "no") => Ok(false),
            Some(other) => Err(Error::Config {
                line: self.line(key),
                msg: format!("{key}: expected on/off, got '{other}'"),
            }),
        }
    }
}

fn parse_recipe(t: &Table) -> Result<Recipe> {
    let p0 = t.get_or("p0_hbar_per_delta", 0.0)?;
    let duration = t.get_or("prep_duration_us", 16.0)?;
    match t.str_or("recipe", "momentum_kick") {
        "momentum_kick" => Ok(Recipe::MomentumKick { p0 }),
        "prep2" => Ok(Recipe::Prep2 { duration }),
        "prep2_plus_kick" => Ok(Recipe::Prep2PlusKick { duration, p0 }),
        other => Err(Error::Config {
            line: t.line("recipe"),
            msg: format!("unknown recipe '{other}' (momentum_kick, prep2, prep2_plus_kick)"),
        }),
    }
}

fn parse_spinor(t: &Table) -> Result<[C64; 2]> {
    let text = t.str_or("spinor", "1,1");
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(Error::Config {
            line: t.line("spinor"),
            msg: format!("spinor: expected two comma-separated numbers, got '{text}'"),
        });
    }
    let a: f64 = t.parse_as("spinor", parts[0])?;
    let b: f64 = t.parse_as("spinor", parts[1])?;
    Ok([C64::new(a, 0.0), C64::new(b, 0.0)])
}

fn parse_physics(t: &Table) -> Result<Physics> {
    let ion_form = t.has("eta");
    let dirac_form = t.has("c_delta_per_us");
    match (ion_form, dirac_form) {
        (true, true) => Err(Error::Config {
            line: t.line("c_delta_per_us"),
            msg: "give either ion settings (eta, ...) or Dirac settings (c_delta_per_us, ...), not both".into(),
        }),
        (false, false) => Err(Error::Config {
            line: 0,
            msg: "missing physics: set eta (ion form) or c_delta_per_us (Dirac form)".into(),
        }),
        (true, false) => {
            let ion = IonParams {
                eta: t.get("eta")?,
                delta_nm: t.get_or("delta_nm", 7.0)?,
                omega_tilde1: khz_to_rad_per_us(t.get("omega_tilde1_kHz")?),
                omega1: khz_to_rad_per_us(t.get("omega1_kHz")?),
                omega_tilde2: khz_to_rad_per_us(t.get_or("omega_tilde2_kHz", 0.0)?),
                omega2: khz_to_rad_per_us(t.get_or("omega2_kHz", 0.0)?),
                omega_prep2: khz_to_rad_per_us(t.get_or("omega_prep2_kHz", 0.0)?),
                fock_cutoff: t.get_or("fock_cutoff", 256)?,
            };
            let scenario = match t.values.get("scenario") {
                Some((_, v)) => t.parse_as("scenario", v)?,
                None => ion.implied_scenario(),
            };
            Ok(Physics::Ion {
                ion,
                scenario,
                recipe: parse_recipe(t)?,
            })
        }
        (false, true) => {
            let potential = match t.str_or("potential", "none") {
                "none" => Potential::None,
                "linear" => Potential::Linear {
                    g: t.get("slope_rad_per_us_per_delta")?,
                },
                "quadratic" => Potential::Quadratic {
                    q: t.get("curvature_rad_per_us_per_delta2")?,
                },
                other => {
                    return Err(Error::Config {
                        line: t.line("potential"),
                        msg: format!("unknown potential '{other}'"),
                    })
                }
            };
            Ok(Physics::Dirac {
                params: DiracParams::new(t.get("c_delta_per_us")?, t.get("mc2_rad_per_us")?, potential)?,
                x0: t.get_or("x0_delta", 0.0)?,
                p0: t.get_or("p0_hbar_per_delta", 0.0)?,
                width: t.get_or("width_delta", 1.0)?,
                internal: parse_spinor(t)?,
                fock_cutoff: t.get_or("fock_cutoff", 256)?,
            })
        }
    }
}

fn whole_steps(interval: f64, dt: f64) -> Option<usize> {
    let n = interval / dt;
    let r = n.round();
    ((n - r).abs() < 1e-9 * r.max(1.0) && r >= 1.0).then_some(r as usize)
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let t = Table::parse(text)?;
        let grid = Grid::new(
            t.get_or("grid_points", 2048)?,
            t.get_or("x_min_delta", -64.0)?,
            t.get_or("x_max_delta", 64.0)?,
        )?;
        let cfg = Self {
            name: t.required("name")?.to_owned(),
            engine: t.get_or("engine", Engine::Dirac)?,
            physics: parse_physics(&t)?,
            duration: t.get("duration_us")?,
            n_frames: t.get_or("frames", 10)?,
            dirac_dt: t.get_or("dirac_dt_us", 1.0)?,
            ion_dt: t.get_or("ion_dt_us", 2.0)?,
            grid,
            reconstruction: t.switch("reconstruction", false)?,
            branch_filter: t.switch("branch_filter", false)?,
            out_dir: t.values.get("out_dir").map(|(_, v)| PathBuf::from(v)),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn with_engine(mut self, engine: Engine) -> Result<Self> {
        self.engine = engine;
        self.validate()?;
        Ok(self)
    }

    pub fn frame_interval(&self) -> f64 {
        self.duration / self.n_frames as f64
    }

    /// Propagator steps per frame interval for the configured engine.
    pub fn steps_per_frame(&self) -> usize {
        let dt = if self.engine.is_ion() { self.ion_dt } else { self.dirac_dt };
        whole_steps(self.frame_interval(), dt).unwrap_or(0)
    }

    pub fn frame_times(&self) -> Vec<f64> {
        (0..=self.n_frames)
            .map(|i| i as f64 * self.frame_interval())
            .collect()
    }

    pub fn fock_cutoff(&self) -> usize {
        match &self.physics {
            Physics::Ion { ion, .. } => ion.fock_cutoff,
            Physics::Dirac { fock_cutoff, .. } => *fock_cutoff,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return bad(format!("name '{}' must be non-empty without path separators", self.name));
        }
        if !(self.duration > 0.0) {
            return bad(format!("duration_us must be > 0, got {}", self.duration));
        }
        if self.n_frames == 0 {
            return bad("frames must be >= 1".into());
        }
        if self.engine.is_ion() && matches!(self.physics, Physics::Dirac { .. }) {
            return Err(Error::InconsistentScenario(format!(
                "engine {} needs ion settings (eta, omega_*_kHz)",
                self.engine
            )));
        }
        for (key, dt) in [("dirac_dt_us", self.dirac_dt), ("ion_dt_us", self.ion_dt)] {
            if !(dt > 0.0) {
                return bad(format!("{key} must be > 0, got {dt}"));
            }
            // only the active engine's step has to tile the frame interval
            let active = (key == "ion_dt_us") == self.engine.is_ion();
            if active && whole_steps(self.frame_interval(), dt).is_none() {
                return bad(format!(
                    "frame interval {} us is not a whole number of {key} steps of {dt}",
                    self.frame_interval()
                ));
            }
        }
        match &self.physics {
            Physics::Ion { ion, scenario, .. } => {
                ion.validate()?;
                crate::ion::build_hamiltonian(ion, *scenario, crate::ion::LambDickeMode::Ideal)?;
            }
            Physics::Dirac { params, width, fock_cutoff, .. } => {
                params.validate()?;
                if !(*width > 0.0) {
                    return bad(format!("width_delta must be > 0, got {width}"));
                }
                if *fock_cutoff < 8 {
                    return bad(format!("fock_cutoff must be >= 8, got {fock_cutoff}"));
                }
            }
        }
        Ok(())
    }

    /// Dirac parameters of the simulated particle.
    pub fn dirac_params(&self) -> Result<DiracParams> {
        match &self.physics {
            Physics::Ion { ion, scenario, .. } => crate::analytic::map_ion_to_dirac_as(ion, *scenario),
            Physics::Dirac { params, .. } => Ok(*params),
        }
    }

    /// Lint-level notes that do not stop a run.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Physics::Ion { ion, .. } = &self.physics {
            out.extend(ion.warnings());
        }
        if self.duration > 1500.0 {
            out.push(format!(
                "duration {} us exceeds the 1.5 ms experimental envelope",
                self.duration
            ));
        }
        out
    }

    /// Canonical text: every setting that influences the numbers, one per
    /// line in a fixed order. The output directory is left out.
    pub fn canonical(&self) -> String {
        let mut lines = vec![
            format!("name = {}", self.name),
            format!("engine = {}", self.engine),
        ];
        match &self.physics {
            Physics::Ion { ion, scenario, recipe } => {
                lines.push(format!("scenario = {}", scenario.as_str()));
                lines.push(format!("eta = {}", ion.eta));
                lines.push(format!("delta_nm = {}", ion.delta_nm));
                lines.push(format!("omega_tilde1_rad_per_us = {}", ion.omega_tilde1));
                lines.push(format!("omega1_rad_per_us = {}", ion.omega1));
                lines.push(format!("omega_tilde2_rad_per_us = {}", ion.omega_tilde2));
                lines.push(format!("omega2_rad_per_us = {}", ion.omega2));
                lines.push(format!("omega_prep2_rad_per_us = {}", ion.omega_prep2));
                lines.push(format!("fock_cutoff = {}", ion.fock_cutoff));
                lines.push(format!("recipe = {recipe:?}"));
            }
            Physics::Dirac { params, x0, p0, width, internal, fock_cutoff } => {
                lines.push(format!("c_delta_per_us = {}", params.c));
                lines.push(format!("mc2_rad_per_us = {}", params.mc2));
                lines.push(format!("potential = {:?}", params.potential));
                lines.push(format!("x0_delta = {x0}"));
                lines.push(format!("p0_hbar_per_delta = {p0}"));
                lines.push(format!("width_delta = {width}"));
                lines.push(format!("spinor = {},{}", internal[0].re, internal[1].re));
                lines.push(format!("fock_cutoff = {fock_cutoff}"));
            }
        }
        lines.push(format!("duration_us = {}", self.duration));
        lines.push(format!("frames = {}", self.n_frames));
        lines.push(format!("dirac_dt_us = {}", self.dirac_dt));
        lines.push(format!("ion_dt_us = {}", self.ion_dt));
        lines.push(format!("grid_points = {}", self.grid.len()));
        lines.push(format!("x_min_delta = {}", self.grid.x_min()));
        lines.push(format!("x_max_delta = {}", self.grid.x_max()));
        lines.push(format!("reconstruction = {}", self.reconstruction));
        lines.push(format!("branch_filter = {}", self.branch_filter));
        let mut s = lines.join("\n");
        s.push('\n');
        s
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
