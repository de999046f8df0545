//! Command-line surface: `ramp`, `run`, `sweep`, `check`, `spectrum`, `diff`.
//!
//! Exit codes: 0 success, 1 configuration/format/IO error, 2 usage error,
//! 3 blow-up.

use crate::config::{self, RunConfig};
use crate::csvio;
use crate::error::{Error, Result};
use crate::experiment::{self, CheckpointSpec, ResumePoint, RunOptions};
use crate::field::SpectralField;
use crate::snapshot;
use clap::{Parser, Subcommand};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;

#[derive(Parser)]
#[command(
    name = "ndas",
    version,
    about = "Pseudospectral Navier-Stokes solver with windowed nudging data assimilation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ramp up a reference state from the seeded spectrum profile and write
    /// its snapshot.
    Ramp {
        /// Path to a key=value run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Snapshot output path (default: <out_dir>/reference.nds).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a twin experiment: time-series CSV plus final snapshots.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Start from an existing reference snapshot instead of ramping.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Write a checkpoint file at every observation instant.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Resume from a checkpoint written by --checkpoint.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Run every scheme/mu/tau combination from one ramped reference.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated nudging strengths.
        #[arg(long, value_delimiter = ',', required = true)]
        mu: Vec<f64>,
        /// Comma-separated window lengths.
        #[arg(long, value_delimiter = ',', required = true)]
        tau: Vec<f64>,
        /// Comma-separated schemes (none, nudge_window, hot).
        #[arg(long, value_delimiter = ',', required = true)]
        schemes: Vec<String>,
        /// Sweep CSV output path (default: <out_dir>/sweep.csv).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the convergence-condition report for a configuration
    /// (advisory: always exits 0 on a well-formed config).
    Check {
        #[arg(long)]
        config: PathBuf,
        /// Also write one CSV row per condition.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Shell-binned energy spectrum of a snapshot as CSV.
    Spectrum {
        snapshot: PathBuf,
        /// CSV output path (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Box side used to reconstruct the grid (not stored in snapshots).
        #[arg(long, default_value_t = 1.0)]
        length: f64,
    },
    /// Error norms between two snapshots on the same grid.
    Diff {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        length: f64,
    },
}

fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    config::parse_config(&text)
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BlowUp { .. } => EXIT_BLOWUP,
        _ => EXIT_ERROR,
    }
}

pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.exit_code() == 0 { EXIT_OK } else { EXIT_USAGE };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Ramp { config, out } => cmd_ramp(&config, out),
        Command::Run {
            config,
            reference,
            checkpoint,
            resume,
        } => cmd_run(&config, reference, checkpoint, resume),
        Command::Sweep {
            config,
            mu,
            tau,
            schemes,
            out,
        } => cmd_sweep(&config, &mu, &tau, &schemes, out),
        Command::Check { config, csv } => cmd_check(&config, csv),
        Command::Spectrum {
            snapshot,
            out,
            length,
        } => cmd_spectrum(&snapshot, out, length),
        Command::Diff { a, b, length } => cmd_diff(&a, &b, length),
    }
}

fn cmd_ramp(config_path: &Path, out: Option<PathBuf>) -> Result<i32> {
    let cfg = load_config(config_path)?;
    let exp = cfg.to_experiment()?;
    let state = experiment::ramp_up(&exp)?;
    let out = out.unwrap_or_else(|| Path::new(&cfg.out_dir).join("reference.nds"));
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    snapshot::write_snapshot(&out, &state, cfg.nu, exp.ramp.t_ramp)?;
    println!("wrote {}", out.display());
    Ok(EXIT_OK)
}

fn load_reference(cfg: &RunConfig, path: &Path) -> Result<SpectralField> {
    let snap = snapshot::read_snapshot_with_length(path, cfg.length)?;
    let grid = snap.field.grid();
    if grid.dim() != cfg.dim || grid.n() != cfg.n {
        return Err(Error::Config(format!(
            "snapshot grid {}^{} does not match configured {}^{}",
            grid.n(),
            grid.dim(),
            cfg.n,
            cfg.dim
        )));
    }
    Ok(snap.field)
}

fn cmd_run(
    config_path: &Path,
    reference: Option<PathBuf>,
    checkpoint: Option<PathBuf>,
    resume: Option<PathBuf>,
) -> Result<i32> {
    let cfg = load_config(config_path)?;
    let exp = cfg.to_experiment()?;
    let hash = config::config_hash(&cfg);

    let reference_state = match &reference {
        Some(path) => load_reference(&cfg, path)?,
        None => experiment::ramp_up(&exp)?,
    };

    let resume_point = match &resume {
        Some(path) => {
            let ck = snapshot::read_checkpoint_with_length(path, cfg.length)?;
            if ck.config_hash != hash {
                return Err(Error::Config(
                    "checkpoint was written by a different configuration".into(),
                ));
            }
            Some(ResumePoint {
                t: ck.t,
                step: ck.step,
                reference: ck.reference.field,
                twin: ck.twin.field,
            })
        }
        None => None,
    };

    let opts = RunOptions {
        checkpoint: checkpoint.map(|path| CheckpointSpec {
            path,
            config_hash: hash,
        }),
        resume: resume_point,
        twin_initial: None,
    };
    let outcome = experiment::run_twin_full(&exp, &reference_state, opts)?;

    let out_dir = Path::new(&cfg.out_dir);
    std::fs::create_dir_all(out_dir)?;
    let series_path = out_dir.join("timeseries.csv");
    csvio::write_text(&series_path, &csvio::timeseries_csv(&outcome.series))?;
    let t_final = outcome.series.rows.last().map(|r| r.t).unwrap_or(0.0);
    snapshot::write_snapshot(
        &out_dir.join("reference_final.nds"),
        &outcome.reference,
        cfg.nu,
        t_final,
    )?;
    snapshot::write_snapshot(&out_dir.join("twin_final.nds"), &outcome.twin, cfg.nu, t_final)?;
    // Vorticity-magnitude scalar exports for external rendering.
    let grid = outcome.reference.grid();
    for (name, field) in [
        ("vorticity_ref.nds", &outcome.reference),
        ("vorticity_twin.nds", &outcome.twin),
    ] {
        let vort = SpectralField::from_physical_raw(grid, &[field.vorticity_magnitude()]);
        snapshot::write_snapshot(&out_dir.join(name), &vort, cfg.nu, t_final)?;
    }
    println!("wrote {}", series_path.display());
    if let Some(msg) = &outcome.series.failure {
        eprintln!("blow-up: {msg}");
        return Ok(EXIT_BLOWUP);
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(
    config_path: &Path,
    mu: &[f64],
    tau: &[f64],
    schemes: &[String],
    out: Option<PathBuf>,
) -> Result<i32> {
    let cfg = load_config(config_path)?;
    let exp = cfg.to_experiment()?;
    let schemes: Vec<_> = schemes
        .iter()
        .map(|s| {
            config::parse_scheme(s)
                .ok_or_else(|| Error::Config(format!("unknown scheme {s:?} in --schemes")))
        })
        .collect::<Result<_>>()?;
    let rows = experiment::sweep(&exp, mu, tau, &schemes)?;
    let out = out.unwrap_or_else(|| Path::new(&cfg.out_dir).join("sweep.csv"));
    csvio::write_text(&out, &csvio::sweep_csv(&rows))?;
    println!("wrote {}", out.display());
    Ok(EXIT_OK)
}

fn cmd_check(config_path: &Path, csv: Option<PathBuf>) -> Result<i32> {
    let cfg = load_config(config_path)?;
    let report = cfg.theory_report()?;
    print!("{}", report.to_kv_text());
    if let Some(path) = csv {
        csvio::write_text(&path, &report.to_csv())?;
    }
    Ok(EXIT_OK)
}

fn cmd_spectrum(snapshot_path: &Path, out: Option<PathBuf>, length: f64) -> Result<i32> {
    let snap = snapshot::read_snapshot_with_length(snapshot_path, length)?;
    let csv = csvio::spectrum_csv(&snap.field.energy_spectrum());
    match out {
        Some(path) => {
            csvio::write_text(&path, &csv)?;
            println!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(EXIT_OK)
}

fn cmd_diff(a: &Path, b: &Path, length: f64) -> Result<i32> {
    let sa = snapshot::read_snapshot_with_length(a, length)?;
    let sb = snapshot::read_snapshot_with_length(b, length)?;
    if sa.field.grid().dim() != sb.field.grid().dim()
        || sa.field.grid().n() != sb.field.grid().n()
        || sa.field.ncomp() != sb.field.ncomp()
    {
        return Err(Error::Config("snapshots live on different grids".into()));
    }
    let err = sa.field.error_norms(&sb.field);
    let base = sa.field.norms();
    let rel = |e: f64, b: f64| if b > 0.0 { e / b } else { 0.0 };
    println!("err_l2 = {:.16e} (relative {:.3e})", err.l2, rel(err.l2, base.l2));
    println!("err_h1 = {:.16e} (relative {:.3e})", err.h1, rel(err.h1, base.h1));
    println!(
        "err_laplacian = {:.16e} (relative {:.3e})",
        err.l2_of_laplacian,
        rel(err.l2_of_laplacian, base.l2_of_laplacian)
    );
    Ok(EXIT_OK)
}
