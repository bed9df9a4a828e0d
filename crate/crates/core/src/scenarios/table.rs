use std::fmt;

use rayon::prelude::*;

use super::config::{Engine, Physics, ScenarioConfig};
use super::run::{run_scenario, RunReport};
use crate::units::rad_per_us_to_khz;
use crate::Result;

/// Published values for the four slope settings 0, 22, 50 and 76 kHz:
/// Landau-Zener prediction, full numerics and measurement.
pub const PUBLISHED_SLOPES_KHZ: [f64; 4] = [0.0, 22.0, 50.0, 76.0];
pub const PUBLISHED_ANALYTIC: [f64; 4] = [0.0, 0.03, 0.21, 0.36];
pub const PUBLISHED_NUMERIC: [f64; 4] = [0.0, 0.07, 0.22, 0.39];
pub const PUBLISHED_MEASURED: [f64; 4] = [0.017, 0.10, 0.32, 0.45];

#[derive(Clone, Debug)]
pub struct TableRow {
    pub name: String,
    pub omega_tilde2_khz: f64,
    pub analytic: Option<f64>,
    pub dirac: Option<f64>,
    pub ion_ideal: Option<f64>,
    pub ion_corrected: Option<f64>,
    pub published_analytic: Option<f64>,
    pub published_numeric: Option<f64>,
    pub published_measured: Option<f64>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct TunnelingTable {
    pub rows: Vec<TableRow>,
}

fn published(khz: f64, values: &[f64; 4]) -> Option<f64> {
    PUBLISHED_SLOPES_KHZ
        .iter()
        .position(|s| (s - khz).abs() < 0.5)
        .map(|i| values[i])
}

/// Best tunneling estimate of a run: the branch population when the parts
/// have separated, else the turning-point estimate.
pub fn tunneling_estimate(report: &RunReport) -> Option<f64> {
    report.tunneling.branch.or(report.tunneling.position)
}

/// Runs every config with each applicable engine and tabulates tunneling
/// against the published values.
pub fn tunneling_table(configs: &[ScenarioConfig]) -> Result<TunnelingTable> {
    let jobs: Vec<(usize, ScenarioConfig)> = configs
        .iter()
        .enumerate()
        .flat_map(|(i, c)| {
            Engine::ALL
                .iter()
                .filter(|e| !e.is_ion() || matches!(c.physics, Physics::Ion { .. }))
                .filter_map(move |e| c.clone().with_engine(*e).ok().map(|c| (i, c)))
                .collect::<Vec<_>>()
        })
        .collect();
    let reports: Vec<(usize, RunReport)> = jobs
        .par_iter()
        .map(|(i, c)| run_scenario(c).map(|r| (*i, r)))
        .collect::<Result<_>>()?;
    let rows = configs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let khz = match &c.physics {
                Physics::Ion { ion, .. } => rad_per_us_to_khz(ion.omega_tilde2),
                Physics::Dirac { .. } => f64::NAN,
            };
            let mut row = TableRow {
                name: c.name.clone(),
                omega_tilde2_khz: khz,
                analytic: None,
                dirac: None,
                ion_ideal: None,
                ion_corrected: None,
                published_analytic: published(khz, &PUBLISHED_ANALYTIC),
                published_numeric: published(khz, &PUBLISHED_NUMERIC),
                published_measured: published(khz, &PUBLISHED_MEASURED),
                notes: Vec::new(),
            };
            for (_, r) in reports.iter().filter(|(j, _)| *j == i) {
                row.analytic = row.analytic.or(r.analytic);
                let p = tunneling_estimate(r);
                if r.tunneling.branch.is_none() {
                    if let Some(n) = &r.tunneling.branch_note {
                        row.notes.push(format!("{}: {n}; turning-point estimate used", r.engine()));
                    }
                }
                match r.engine() {
                    Engine::Dirac => row.dirac = p,
                    Engine::IonIdeal => row.ion_ideal = p,
                    Engine::IonCorrected => row.ion_corrected = p,
                }
            }
            row
        })
        .collect();
    Ok(TunnelingTable { rows })
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into())
}

impl TunnelingTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "name,omega_tilde2_kHz,analytic,dirac,ion_ideal,ion_corrected,published_analytic,published_numeric,published_measured\n",
        );
        for r in &self.rows {
            let f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.name,
                r.omega_tilde2_khz,
                f(r.analytic),
                f(r.dirac),
                f(r.ion_ideal),
                f(r.ion_corrected),
                f(r.published_analytic),
                f(r.published_numeric),
                f(r.published_measured),
            ));
        }
        out
    }
}

impl fmt::Display for TunnelingTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<8} {:>9} {:>9} {:>9} {:>9} {:>9} | {:>9} {:>9} {:>9}",
            "name", "Ω̃₂ kHz", "analytic", "dirac", "ion", "ion+LD", "pub.LZ", "pub.num", "measured"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<8} {:>9.1} {:>9} {:>9} {:>9} {:>9} | {:>9} {:>9} {:>9}",
                r.name,
                r.omega_tilde2_khz,
                cell(r.analytic),
                cell(r.dirac),
                cell(r.ion_ideal),
                cell(r.ion_corrected),
                cell(r.published_analytic),
                cell(r.published_numeric),
                cell(r.published_measured),
            )?;
        }
        for r in &self.rows {
            for n in &r.notes {
                writeln!(f, "note {}: {n}", r.name)?;
            }
        }
        Ok(())
    }
}
