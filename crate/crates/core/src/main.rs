use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kleinsim::oracle::oracle_suite;
use kleinsim::scenarios::{
    emit_frames, load_config, run_batch, tunneling_table, write_summary, Engine, FrameFormat,
    RunReport, ScenarioConfig, SHIPPED, TUNNELING_SET,
};
use kleinsim::Result;

#[derive(Parser)]
#[command(name = "kleinsim", version, about = "Dirac-particle and trapped-ion tunneling simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Config file, or the name of a shipped config (repeatable)
    #[arg(long = "config", short = 'c')]
    configs: Vec<String>,
    /// Override the engine: dirac, ion-ideal or ion-corrected
    #[arg(long)]
    engine: Option<Engine>,
    /// Output root; each scenario writes into <out>/<name>
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for scenario batches
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenarios and write summary.json
    Run(Common),
    /// Run scenarios and write per-frame data, an index and summary.json
    Frames {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "csv")]
        format: FrameFormat,
    },
    /// Tunneling table for the slope sequence (all engines)
    Table(Common),
    /// Check configs without running them
    Validate(Common),
    /// Run the reference cross-checks
    Oracle,
    /// List shipped configs
    List,
}

fn load_all(common: &Common, default: &[&str]) -> Result<Vec<ScenarioConfig>> {
    let names: Vec<String> = if common.configs.is_empty() {
        default.iter().map(|s| s.to_string()).collect()
    } else {
        common.configs.clone()
    };
    names
        .iter()
        .map(|n| {
            let cfg = load_config(n)?;
            match common.engine {
                Some(e) => cfg.with_engine(e),
                None => Ok(cfg),
            }
        })
        .collect()
}

fn out_dir(common: &Common, cfg: &ScenarioConfig) -> Option<PathBuf> {
    match &common.out {
        Some(root) => Some(root.join(&cfg.name)),
        None => cfg.out_dir.clone(),
    }
}

fn print_report(r: &RunReport) {
    let f = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
    println!(
        "{} [{}] {:.2}s hash {}",
        r.name(),
        r.engine(),
        r.wall_clock.as_secs_f64(),
        &r.config_hash[..16]
    );
    let last = r.last();
    println!(
        "  final t={} us  <x>={:.4}  var={:.3}  <p>={:.4}",
        last.time, last.mean_x, last.variance_x, last.mean_p
    );
    println!(
        "  tunneling: branch {}  position {}  filter {}  analytic {}",
        f(r.tunneling.branch),
        f(r.tunneling.position),
        f(r.tunneling.filter),
        f(r.analytic)
    );
    if let Some(n) = &r.tunneling.branch_note {
        println!("  branch estimate unavailable: {n}");
    }
    if let Some(rc) = &r.reconstruction {
        println!(
            "  reconstruction L1 {:.4} (negativity {:.2e})",
            rc.l1, rc.negativity
        );
    }
    for w in &r.warnings {
        println!("  warning: {w}");
    }
}

fn run_and_write(common: &Common, format: Option<FrameFormat>) -> Result<bool> {
    let configs = load_all(common, &[])?;
    if configs.is_empty() {
        eprintln!("no configs given (use --config)");
        return Ok(false);
    }
    let mut ok = true;
    for (cfg, result) in configs.iter().zip(run_batch(&configs)) {
        match result {
            Ok(report) => {
                print_report(&report);
                if let Some(dir) = out_dir(common, cfg) {
                    write_summary(&report, &dir)?;
                    if let Some(fmt) = format {
                        let files = emit_frames(&report, &dir, fmt)?;
                        println!("  wrote {} files to {}", files.len() + 1, dir.display());
                    }
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ok = false;
            }
        }
    }
    Ok(ok)
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run(common) => run_and_write(&common, None),
        Command::Frames { common, format } => {
            if common.out.is_none() && load_all(&common, &[])?.iter().any(|c| c.out_dir.is_none()) {
                eprintln!("frames needs --out or out_dir in every config");
                return Ok(false);
            }
            run_and_write(&common, Some(format))
        }
        Command::Table(common) => {
            let configs = load_all(&common, &TUNNELING_SET)?;
            let table = tunneling_table(&configs)?;
            print!("{table}");
            if let Some(root) = &common.out {
                std::fs::create_dir_all(root)?;
                std::fs::write(root.join("tunneling.csv"), table.to_csv())?;
            }
            Ok(true)
        }
        Command::Validate(common) => {
            let names: Vec<String> = if common.configs.is_empty() {
                SHIPPED.iter().map(|(n, _)| n.to_string()).collect()
            } else {
                common.configs.clone()
            };
            let mut ok = true;
            for n in &names {
                match load_config(n).and_then(|c| match common.engine {
                    Some(e) => c.with_engine(e),
                    None => Ok(c),
                }) {
                    Ok(c) => {
                        println!("ok   {n} (hash {})", &c.hash()[..16]);
                        for w in c.warnings() {
                            println!("     warning: {w}");
                        }
                    }
                    Err(e) => {
                        println!("FAIL {n}: {e}");
                        ok = false;
                    }
                }
            }
            Ok(ok)
        }
        Command::Oracle => {
            let mut ok = true;
            for case in oracle_suite()? {
                let status = if case.passed() { "pass" } else { "FAIL" };
                ok &= case.passed();
                println!(
                    "{status} {:<20} err {:.2e} (tol {:.0e})  {}",
                    case.name,
                    case.error(),
                    case.tolerance,
                    case.inputs
                );
            }
            Ok(ok)
        }
        Command::List => {
            for (n, text) in SHIPPED {
                let first = text.lines().next().unwrap_or("").trim_start_matches("# ");
                println!("{n:<12} {first}");
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match &cli.command {
        Command::Run(c) | Command::Table(c) | Command::Validate(c) => c.threads,
        Command::Frames { common, .. } => common.threads,
        _ => None,
    };
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
