use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use super::run::{BranchFilterSummary, ReconstructionCheck, RunReport, TunnelingEstimates};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameFormat {
    Csv,
    Ndjson,
}

impl FrameFormat {
    pub fn extension(self) -> &'static str {
        match self {
            FrameFormat::Csv => "csv",
            FrameFormat::Ndjson => "ndjson",
        }
    }
}

impl FromStr for FrameFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(FrameFormat::Csv),
            "ndjson" => Ok(FrameFormat::Ndjson),
            other => Err(Error::InvalidParams(format!("unknown format '{other}' (csv, ndjson)"))),
        }
    }
}

fn column(v: &Option<Vec<f64>>, j: usize) -> Option<f64> {
    v.as_ref().map(|c| c[j])
}

fn csv_field(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes one file per frame plus `index.<ext>` into `dir`. Contents depend
/// only on the report's numbers, so equal configs give identical bytes.
/// Missing columns are left empty (CSV) or null (NDJSON).
pub fn emit_frames(report: &RunReport, dir: &Path, format: FrameFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let grid = report.grid();
    let ext = format.extension();
    let mut written = Vec::with_capacity(report.frames.len() + 1);
    let mut index = match format {
        FrameFormat::Csv => String::from("frame,time_us,file\n"),
        FrameFormat::Ndjson => String::new(),
    };
    for (i, f) in report.frames.iter().enumerate() {
        let file = format!("frame_{i:04}.{ext}");
        let mut body = String::new();
        match format {
            FrameFormat::Csv => {
                body.push_str("x,density,density_plus,density_minus,local_p\n");
                for j in 0..grid.len() {
                    let _ = writeln!(
                        body,
                        "{},{},{},{},{}",
                        grid.x(j),
                        f.density[j],
                        csv_field(column(&f.density_plus, j)),
                        csv_field(column(&f.density_minus, j)),
                        csv_field(column(&f.local_p, j)),
                    );
                }
                let _ = writeln!(index, "{i},{},{file}", f.time);
            }
            FrameFormat::Ndjson => {
                for j in 0..grid.len() {
                    let row = json!({
                        "x": grid.x(j),
                        "density": f.density[j],
                        "density_plus": column(&f.density_plus, j),
                        "density_minus": column(&f.density_minus, j),
                        "local_p": column(&f.local_p, j),
                    });
                    body.push_str(&row.to_string());
                    body.push('\n');
                }
                let row = json!({ "frame": i, "time_us": f.time, "file": file });
                index.push_str(&row.to_string());
                index.push('\n');
            }
        }
        let path = dir.join(&file);
        fs::write(&path, body)?;
        written.push(path);
    }
    let path = dir.join(format!("index.{ext}"));
    fs::write(&path, index)?;
    written.push(path);
    Ok(written)
}

#[derive(Serialize)]
struct FrameSummary {
    time_us: f64,
    mean_x: f64,
    variance_x: f64,
    mean_p: f64,
    negative_population: Option<f64>,
    branch_overlap: Option<f64>,
    mean_phonons: Option<f64>,
    cutoff_tail: Option<f64>,
    qubit2_purity: Option<f64>,
}

#[derive(Serialize)]
struct Summary<'a> {
    name: &'a str,
    engine: &'static str,
    config_hash: &'a str,
    config: &'a str,
    speed_of_light_delta_per_us: f64,
    rest_energy_rad_per_us: f64,
    potential: String,
    tunneling: &'a TunnelingEstimates,
    analytic: Option<f64>,
    reconstruction: &'a Option<ReconstructionCheck>,
    branch_filter: &'a Option<BranchFilterSummary>,
    warnings: &'a [String],
    frames: Vec<FrameSummary>,
}

/// Report summary as JSON. Wall-clock time is left out so the file is
/// reproducible.
pub fn summary_json(report: &RunReport) -> Value {
    let canonical = report.config.canonical();
    let s = Summary {
        name: report.name(),
        engine: report.engine().as_str(),
        config_hash: &report.config_hash,
        config: &canonical,
        speed_of_light_delta_per_us: report.params.c,
        rest_energy_rad_per_us: report.params.mc2,
        potential: format!("{:?}", report.params.potential),
        tunneling: &report.tunneling,
        analytic: report.analytic,
        reconstruction: &report.reconstruction,
        branch_filter: &report.branch_filter,
        warnings: &report.warnings,
        frames: report
            .frames
            .iter()
            .map(|f| FrameSummary {
                time_us: f.time,
                mean_x: f.mean_x,
                variance_x: f.variance_x,
                mean_p: f.mean_p,
                negative_population: f.negative_population,
                branch_overlap: f.branch_overlap,
                mean_phonons: f.mean_phonons,
                cutoff_tail: f.cutoff_tail,
                qubit2_purity: f.qubit2_purity,
            })
            .collect(),
    };
    serde_json::to_value(s).expect("summary serializes")
}

pub fn write_summary(report: &RunReport, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(&summary_json(report))?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}
