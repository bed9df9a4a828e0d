//! Config-driven runs of the tunneling and quadratic-well sequences, with
//! frame export and comparison tables.

mod config;
mod output;
mod run;
mod table;

use std::path::Path;

use rayon::prelude::*;

pub use config::{Engine, Physics, ScenarioConfig};
pub use output::{emit_frames, summary_json, write_summary, FrameFormat};
pub use run::{
    frame_l1, run_scenario, sign_changes, BranchFilterSummary, FrameRecord, ReconstructionCheck,
    RunReport, TunnelingEstimates,
};
pub use table::{
    tunneling_estimate, tunneling_table, TableRow, TunnelingTable, PUBLISHED_ANALYTIC,
    PUBLISHED_MEASURED, PUBLISHED_NUMERIC, PUBLISHED_SLOPES_KHZ,
};

use crate::{Error, Result};

/// Configs that ship with the crate, by name.
pub const SHIPPED: &[(&str, &str)] = &[
    ("fig2a", include_str!("../../configs/fig2a.cfg")),
    ("fig2b", include_str!("../../configs/fig2b.cfg")),
    ("fig2c", include_str!("../../configs/fig2c.cfg")),
    ("fig2d", include_str!("../../configs/fig2d.cfg")),
    ("fig3a", include_str!("../../configs/fig3a.cfg")),
    ("fig3b", include_str!("../../configs/fig3b.cfg")),
    ("fig3c", include_str!("../../configs/fig3c.cfg")),
    ("desk-free", include_str!("../../configs/desk-free.cfg")),
    ("desk-linear", include_str!("../../configs/desk-linear.cfg")),
];

/// The four slope settings of the tunneling table.
pub const TUNNELING_SET: [&str; 4] = ["fig2a", "fig2b", "fig2c", "fig2d"];

pub fn shipped(name: &str) -> Result<ScenarioConfig> {
    let (_, text) = SHIPPED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::InvalidParams(format!("no shipped config named '{name}'")))?;
    ScenarioConfig::parse(text).map_err(|e| e.in_scenario(name))
}

/// Loads a config file, or a shipped config when `spec` names one and is not
/// an existing path.
pub fn load_config(spec: &str) -> Result<ScenarioConfig> {
    let path = Path::new(spec);
    if path.exists() {
        ScenarioConfig::load(path).map_err(|e| e.in_scenario(spec))
    } else {
        shipped(spec)
    }
}

/// Runs independent scenarios on the current rayon pool.
pub fn run_batch(configs: &[ScenarioConfig]) -> Vec<Result<RunReport>> {
    configs.par_iter().map(run_scenario).collect()
}
