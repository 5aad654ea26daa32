use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use noise_budget::calibration::{fit_sidebands, read_spectrum_csv, synthetic_sidebands};
use noise_budget::sweep::{
    calibration_table, emit_table, limits_table, parse_config, reproduce_figure, run_sweep_with,
    write_table, DataTable, FigureId, Format, ReadoutKind, SweepSpec,
};
use noise_budget::{Error, ErrorKind, Execution, Result};

#[derive(Parser, Debug)]
#[command(name = "noise-budget", version, about = "Quantum noise budget of optomechanical displacement readout")]
struct Cli {
    /// Sweep configuration (flat TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; a directory when the command produces several tables.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or jsonl.
    #[arg(long, global = true, default_value = "csv", value_parser = parse_format)]
    format: Format,
    /// Reject unknown config keys instead of warning.
    #[arg(long, global = true)]
    strict: bool,
    /// Evaluate rows on a single thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Displacement PSD components for the configured readout.
    Spectrum,
    /// SQL and QL curves with the optimal powers.
    Limits,
    /// Variational readout (optimal angle per frequency).
    Variational,
    /// Two-tone synodyne readout.
    Synodyne {
        /// Sideband ratio of the two LO tones; overrides `beta`.
        #[arg(long)]
        beta: Option<f64>,
        /// LO phase in degrees; overrides `synodyne_phi_deg`.
        #[arg(long)]
        phi_deg: Option<f64>,
    },
    /// Sideband-asymmetry thermometry from red and blue sideband spectra.
    Calibrate(CalibrateArgs),
    /// Model curves for one of the built-in figures.
    ReproduceFigure {
        /// One of 1a, 1b, 1d, 2a-model, 2b-model, 3a-model, 3b-model, S2a, S2b.
        id: String,
    },
}

#[derive(Args, Debug)]
struct CalibrateArgs {
    /// Red sideband CSV (frequency_hz, psd_shotnoise_units).
    #[arg(long, requires = "blue", conflicts_with = "synthesize")]
    red: Option<PathBuf>,
    /// Blue sideband CSV, same layout.
    #[arg(long, requires = "red", conflicts_with = "synthesize")]
    blue: Option<PathBuf>,
    /// Fit seeded synthetic sidebands instead of measured spectra.
    #[arg(long)]
    synthesize: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Absolute noise level of the synthetic spectra, shot-noise units.
    #[arg(long, default_value_t = 0.01)]
    sigma: f64,
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn load_spec(cli: &Cli) -> Result<SweepSpec> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Error::Config("this command needs --config <path>".into()))?;
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parsed = parse_config(&text, cli.strict)?;
    for key in &parsed.ignored_keys {
        eprintln!("warning: ignoring unknown config key `{key}`");
    }
    Ok(parsed.spec)
}

fn tables(cli: &Cli, exec: Execution) -> Result<Vec<DataTable>> {
    let table = match &cli.command {
        Command::Spectrum => run_sweep_with(&load_spec(cli)?, exec)?.to_data(),
        Command::Limits => limits_table(&load_spec(cli)?, exec)?,
        Command::Variational => {
            let mut spec = load_spec(cli)?;
            spec.readout = ReadoutKind::Variational;
            run_sweep_with(&spec, exec)?.to_data()
        }
        Command::Synodyne { beta, phi_deg } => {
            let mut spec = load_spec(cli)?;
            spec.readout = ReadoutKind::Synodyne;
            if beta.is_some() {
                spec.beta = *beta;
            }
            if phi_deg.is_some() {
                spec.synodyne_phi_deg = *phi_deg;
            }
            spec.validate()?;
            run_sweep_with(&spec, exec)?.to_data()
        }
        Command::Calibrate(args) => {
            let (red, blue, seed) = match (&args.red, &args.blue) {
                (Some(r), Some(b)) => (read_spectrum_csv(r)?, read_spectrum_csv(b)?, None),
                _ if args.synthesize => {
                    let (r, b) = synthetic_sidebands(args.seed, args.sigma)?;
                    (r, b, Some(args.seed))
                }
                _ => {
                    return Err(Error::Config(
                        "calibrate needs --red and --blue, or --synthesize".into(),
                    ))
                }
            };
            calibration_table(&fit_sidebands(&red, &blue)?, seed)?
        }
        Command::ReproduceFigure { id } => return reproduce_figure(id.parse::<FigureId>()?, exec),
    };
    Ok(vec![table])
}

fn write_all(tables: &[DataTable], format: Format, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) if tables.len() == 1 => write_table(&tables[0], format, path),
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            for t in tables {
                let path = dir.join(format!("{}.{}", t.metadata.name, format.extension()));
                write_table(t, format, &path)?;
            }
            Ok(())
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            let label = Path::new("<stdout>");
            for t in tables {
                if tables.len() > 1 {
                    writeln!(lock, "# {}", t.metadata.name).map_err(|e| Error::io(label, e))?;
                }
                emit_table(t, format, &mut lock).map_err(|e| Error::io(label, e))?;
            }
            lock.flush().map_err(|e| Error::io(label, e))
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let tables = tables(cli, exec)?;
    write_all(&tables, cli.format, cli.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Validation => 2,
                ErrorKind::Domain => 3,
                ErrorKind::Io => 4,
            })
        }
    }
}
