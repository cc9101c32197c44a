use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use swaptest::{bootstrap_errors, fit, FitModel, FitModelKind, FitResult64};

use crate::bundled;
use crate::calibrate::{fit_calibration, run_calibration};
use crate::config::{load_config, CalibrationSpec, Experiment, DEFAULT_PULSE_STEPS};
use crate::csvio::{real, write_calibration, write_sweep, CsvTable};
use crate::error::{Result, RunnerError};
use crate::sweep::run_sweep;

#[derive(Parser, Debug)]
#[command(name = "swaptest", version, about = "Trapped-ion SWAP-test simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a sweep or calibration config (file path or bundled name).
    Run {
        config: String,
        /// Write the CSV here instead of the config's `output` or stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Simulate the beam-splitter calibration scan and fit P₀sin²(Ω₀T).
    Calibrate {
        #[arg(long, default_value_t = 680.0)]
        omega0_hz: f64,
        /// Envelope ramp time in s; 0 gives a square pulse.
        #[arg(long, default_value_t = 0.0)]
        ramp_tau: f64,
        /// Longest gate duration in s.
        #[arg(long, default_value_t = 1.5e-3)]
        t_max: f64,
        #[arg(long, default_value_t = 31)]
        points: usize,
        #[arg(long, default_value_t = 500, conflicts_with = "exact")]
        shots: u64,
        /// Skip shot sampling and fit the exact probabilities.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_PULSE_STEPS)]
        steps: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Fit a model (sine-squared, sinusoid, gaussian, cat-eq2) to a CSV.
    Fit {
        model: FitModelKind,
        csv: PathBuf,
        /// x column; defaults to the first column.
        #[arg(long)]
        x: Option<String>,
        /// y column; defaults to the sampled overlap or excitation when
        /// present, else the exact one. `overlap_sampled` means |1 − 2p̂|.
        #[arg(long)]
        y: Option<String>,
        /// Column of per-point standard deviations for weighting.
        #[arg(long)]
        sigma: Option<String>,
        /// Bootstrap replicas (≥ 100) for parameter spreads.
        #[arg(long)]
        bootstrap: Option<usize>,
        /// Shots per point for the bootstrap; defaults to the CSV's `shots`.
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a config without running it.
    Validate { config: String },
    /// List the bundled figure configs.
    ListConfigs,
}

/// Where the human-readable summary goes: stdout unless the CSV does.
fn summary_sink(csv_to_stdout: bool) -> Box<dyn Write> {
    if csv_to_stdout {
        Box::new(io::stderr())
    } else {
        Box::new(io::stdout())
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| RunnerError::io(dir, e))?;
            }
            Box::new(BufWriter::new(File::create(p).map_err(|e| RunnerError::io(p, e))?))
        }
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn say(out: &mut dyn Write, text: String) -> Result<()> {
    writeln!(out, "{text}").map_err(|e| RunnerError::io("<output>", e))
}

fn report_fit(out: &mut dyn Write, r: &FitResult64, points: usize) -> Result<()> {
    say(out, format!("model: {} ({points} points)", r.kind))?;
    say(out, format!("converged: {} after {} iterations", r.converged, r.iterations))?;
    say(out, format!("residual_norm: {}", real(r.residual_norm)))?;
    for (i, name) in r.kind.parameter_names().iter().enumerate() {
        let err = r.std_errors[i].map_or("undetermined".to_string(), real);
        say(out, format!("{name} = {} ± {err}", real(r.parameters[i])))?;
    }
    if !r.degenerate.is_empty() {
        say(out, format!("degenerate: {}", r.degenerate.join(", ")))?;
    }
    Ok(())
}

fn calibrate(spec: &CalibrationSpec, shots: Option<u64>, seed: u64, output: Option<&Path>) -> Result<()> {
    let rows = run_calibration(spec, shots, seed)?;
    let mut csv = open_output(output)?;
    write_calibration(&mut csv, &rows)?;
    csv.flush().map_err(|e| RunnerError::io("<output>", e))?;
    let fit = fit_calibration(&rows)?;
    let mut out = summary_sink(output.is_none());
    report_fit(&mut *out, &fit, rows.len())?;
    say(&mut *out, format!("omega0/2pi = {} Hz", real(fit.parameters[1] / std::f64::consts::TAU)))
}

fn run(config: &str, output: Option<PathBuf>) -> Result<()> {
    let cfg = load_config(config)?;
    let output = output.or_else(|| cfg.output.clone());
    match &cfg.experiment {
        Experiment::Calibration(spec) => calibrate(spec, cfg.shots, cfg.seed, output.as_deref()),
        Experiment::Sweep(_) => {
            let table = run_sweep(&cfg)?;
            let mut csv = open_output(output.as_deref())?;
            write_sweep(&mut csv, &table)?;
            csv.flush().map_err(|e| RunnerError::io("<output>", e))?;
            if let Some(p) = output {
                say(&mut io::stdout(), format!("{}: {} rows -> {}", cfg.name, table.rows.len(), p.display()))?;
            }
            Ok(())
        }
    }
}

/// Picks the y values for a fit.
fn fit_targets(table: &CsvTable, y: Option<&str>) -> Result<(String, Vec<f64>)> {
    let all = |v: Vec<Option<f64>>| v.into_iter().collect::<Option<Vec<f64>>>();
    let name = match y {
        Some(n) => n.to_string(),
        None if table.is_calibration() => {
            if all(table.column("p_e_sampled")?).is_some() { "p_e_sampled" } else { "p_e_exact" }.to_string()
        }
        None if table.index_of("p_g_sampled").is_some() && all(table.column("p_g_sampled")?).is_some() => {
            "overlap_sampled".to_string()
        }
        None => "overlap_from_pg".to_string(),
    };
    let values = if name == "overlap_sampled" && table.index_of(&name).is_none() {
        all(table.column("p_g_sampled")?).map(|p| p.into_iter().map(|p| (1.0 - 2.0 * p).abs()).collect())
    } else {
        all(table.column(&name)?)
    };
    let values = values.ok_or_else(|| RunnerError::Csv { path: table.origin.clone(), message: format!("`{name}` has empty cells") })?;
    Ok((name, values))
}

#[allow(clippy::too_many_arguments)]
fn fit_csv(
    model: FitModelKind,
    path: &Path,
    x: Option<String>,
    y: Option<String>,
    sigma: Option<String>,
    bootstrap: Option<usize>,
    shots: Option<u64>,
    seed: u64,
) -> Result<()> {
    let table = CsvTable::from_path(path)?;
    let x_name = x.unwrap_or_else(|| table.header[0].clone());
    let xs = table
        .column(&x_name)?
        .into_iter()
        .collect::<Option<Vec<f64>>>()
        .ok_or_else(|| RunnerError::Csv { path: table.origin.clone(), message: format!("`{x_name}` has empty cells") })?;
    let (y_name, ys) = fit_targets(&table, y.as_deref())?;
    let sigmas = match &sigma {
        Some(s) => Some(
            table
                .column(s)?
                .into_iter()
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| RunnerError::Csv { path: table.origin.clone(), message: format!("`{s}` has empty cells") })?,
        ),
        None => None,
    };
    let fit_err = |e: swaptest::Error| RunnerError::Fit(e.to_string());
    let model = FitModel::new(model);
    let result = fit(&model, &xs, &ys, sigmas.as_deref()).map_err(fit_err)?;
    let mut out = io::stdout();
    say(&mut out, format!("data: {} vs {} from {}", y_name, x_name, path.display()))?;
    report_fit(&mut out, &result, xs.len())?;
    if let Some(replicas) = bootstrap {
        let shots = match shots {
            Some(s) => s,
            None => table
                .column("shots")
                .ok()
                .and_then(|c| c.into_iter().flatten().next())
                .map(|s| s as u64)
                .ok_or_else(|| RunnerError::Usage("bootstrap needs --shots (the CSV has no shot counts)".into()))?,
        };
        let b = bootstrap_errors(&model, &xs, &ys, shots, replicas, seed).map_err(fit_err)?;
        say(&mut out, format!("bootstrap: {} replicas, {} failed, {shots} shots/point, seed {seed}", b.replicas, b.failures))?;
        for (i, name) in b.kind.parameter_names().iter().enumerate() {
            say(&mut out, format!("{name}: mean {} sd {}", real(b.means[i]), real(b.std_devs[i])))?;
        }
    }
    Ok(())
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, output } => run(&config, output),
        Command::Calibrate { omega0_hz, ramp_tau, t_max, points, shots, exact, seed, steps, output } => {
            if !(omega0_hz > 0.0 && ramp_tau >= 0.0 && t_max > 0.0 && points >= 2 && steps >= 1) {
                return Err(RunnerError::Usage(
                    "calibrate needs omega0-hz > 0, ramp-tau ≥ 0, t-max > 0, points ≥ 2, steps ≥ 1".into(),
                ));
            }
            let durations = (0..points).map(|i| t_max * i as f64 / (points - 1) as f64).collect();
            let spec = CalibrationSpec { omega0: std::f64::consts::TAU * omega0_hz, ramp_tau, steps, durations };
            calibrate(&spec, (!exact).then_some(shots), seed, output.as_deref())
        }
        Command::Fit { model, csv, x, y, sigma, bootstrap, shots, seed } => fit_csv(model, &csv, x, y, sigma, bootstrap, shots, seed),
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            let detail = match &cfg.experiment {
                Experiment::Sweep(s) => format!("sweep, {} points", s.point_count()),
                Experiment::Calibration(c) => format!("calibration, {} durations", c.durations.len()),
            };
            say(&mut io::stdout(), format!("ok: {} ({detail})", cfg.name))
        }
        Command::ListConfigs => {
            let mut out = io::stdout();
            for name in bundled::names() {
                let cfg = load_config(name)?;
                say(&mut out, format!("{name:<8} {}", cfg.description))?;
            }
            Ok(())
        }
    }
}

/// Parses `args`, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
