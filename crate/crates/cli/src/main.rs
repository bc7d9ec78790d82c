use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nls_modulation::analysis::AnalysisError;
use nls_modulation::modulation::Perturbation;
use nls_modulation::WaveParams;
use nls_modulation_cli::report::{self, PointSpec, SpectrumConfig, SpectrumError};
use nls_modulation_cli::{
    run_check, run_sweep, write_check, write_sweep, CaseFamily, GridWindow, OutputFormat, SweepConfig,
};

const EXIT_DOMAIN: u8 = 2;
const EXIT_DEGENERACY: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "nls-modulation",
    version,
    about = "Modulational stability of periodic NLS travelling waves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full analytic pipeline at one point, as JSON.
    Analyze {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value = "longitudinal")]
        perturbation: Perturbation,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stability classification over a parameter grid.
    Sweep {
        #[command(flatten)]
        grid: GridArgs,
        /// Append the four slope roots to each row.
        #[arg(long)]
        roots: bool,
    },
    /// Oracle eigenvalues near the origin with pencil slope lines for overlay.
    Spectrum {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value = "longitudinal")]
        perturbation: Perturbation,
        #[arg(long, default_value_t = nls_modulation::floquet_oracle::DEFAULT_MODES)]
        modes: usize,
        /// Number of Floquet (or transverse wavenumber) samples.
        #[arg(long, default_value_t = 200)]
        mu_samples: usize,
        /// Largest |mu| or k; defaults to the Brillouin-zone edge (longitudinal) or 0.1.
        #[arg(long)]
        range: Option<f64>,
        /// Keep eigenvalues with |lambda| below this.
        #[arg(long, default_value_t = 5.0)]
        window: f64,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
    },
    /// Genericity map: sigma, det M2 sign, D4 and transverse-elliptic class.
    Check {
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Args)]
struct PointArgs {
    #[arg(long, requires = "p", conflicts_with = "raw")]
    case: Option<CaseFamily>,
    /// Case coordinates.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    p: Option<Vec<f64>>,
    /// Raw wave constants.
    #[arg(long, num_args = 4, value_names = ["E", "KAPPA", "OMEGA", "ZETA"], allow_negative_numbers = true)]
    raw: Option<Vec<f64>>,
    #[arg(long, default_value = "cubic")]
    nonlinearity: String,
    /// Positivity interval index (0 = rightmost) for raw constants.
    #[arg(long)]
    bracket: Option<usize>,
}

impl PointArgs {
    fn resolve(&self) -> Result<PointSpec, String> {
        match (&self.case, &self.p, &self.raw) {
            (Some(family), Some(p), None) => Ok(PointSpec::Case {
                family: *family,
                p1: p[0],
                p2: p[1],
            }),
            (None, None, Some(r)) => {
                let nl = report::parse_nonlinearity(&self.nonlinearity)?;
                Ok(PointSpec::Raw {
                    params: WaveParams::new(r[0], r[1], r[2], r[3], nl),
                    bracket: self.bracket,
                })
            }
            _ => Err("give either --case with --p, or --raw".into()),
        }
    }

    fn default_threshold(&self) -> f64 {
        self.case.map_or(nls_modulation::pencil_solver::DEFAULT_THRESHOLD, |c| {
            c.default_threshold()
        })
    }
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    case: CaseFamily,
    #[arg(long, default_value = "longitudinal")]
    perturbation: Perturbation,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long, num_args = 2, value_names = ["N1", "N2"], default_values_t = [50, 50])]
    grid: Vec<usize>,
    /// Distance from the domain boundary, in normalized coordinates.
    #[arg(long, default_value_t = 1e-3)]
    inset: f64,
    /// Raw coordinate box instead of the normalized domain.
    #[arg(long = "box", num_args = 4, value_names = ["P1MIN", "P1MAX", "P2MIN", "P2MAX"], allow_negative_numbers = true)]
    window: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

impl GridArgs {
    fn config(&self, include_roots: bool) -> Result<SweepConfig, String> {
        let window = match &self.window {
            None => GridWindow::Unit { inset: self.inset },
            Some(b) => GridWindow::Box {
                p1: (b[0], b[1]),
                p2: (b[2], b[3]),
                inset: self.inset,
            },
        };
        let cfg = SweepConfig {
            family: self.case,
            grid: (self.grid[0], self.grid[1]),
            window,
            perturbation: self.perturbation,
            threshold: self.threshold.unwrap_or_else(|| self.case.default_threshold()),
            include_roots,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

enum Failure {
    Usage(String),
    Analysis(AnalysisError),
    Numerical(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Numerical(format!("i/o error: {e}"))
    }
}

fn open_out(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze {
            point,
            perturbation,
            threshold,
            out,
        } => {
            let spec = point.resolve().map_err(Failure::Usage)?;
            let thr = threshold.unwrap_or_else(|| point.default_threshold());
            let a = report::analyze_point(&spec, perturbation, thr).map_err(Failure::Analysis)?;
            let mut w = open_out(&out)?;
            serde_json::to_writer_pretty(&mut w, &report::analysis_json(&spec, &a))
                .map_err(|e| Failure::Numerical(e.to_string()))?;
            writeln!(w)?;
            w.flush()?;
        }
        Command::Sweep { grid, roots } => {
            let cfg = grid.config(roots).map_err(Failure::Usage)?;
            let result = run_sweep(&cfg);
            let mut w = open_out(&grid.out)?;
            write_sweep(&mut w, &result, grid.format)?;
            w.flush()?;
            eprintln!("{}", result.summary_line());
        }
        Command::Spectrum {
            point,
            perturbation,
            modes,
            mu_samples,
            range,
            window,
            threshold,
            out,
            format,
        } => {
            let spec = point.resolve().map_err(Failure::Usage)?;
            let cfg = SpectrumConfig {
                perturbation,
                modes,
                samples: mu_samples,
                range,
                window,
                threshold: threshold.unwrap_or_else(|| point.default_threshold()),
            };
            let table = report::spectrum_table(&spec, &cfg).map_err(|e| match e {
                SpectrumError::Analysis(a) => Failure::Analysis(a),
                SpectrumError::Oracle(o) => Failure::Numerical(o.to_string()),
            })?;
            let mut w = open_out(&out)?;
            report::write_spectrum(&mut w, &spec, &cfg, &table, format)?;
            w.flush()?;
        }
        Command::Check { grid } => {
            let cfg = grid.config(false).map_err(Failure::Usage)?;
            let rows = run_check(&cfg);
            let mut w = open_out(&grid.out)?;
            write_check(&mut w, &cfg, &rows, grid.format)?;
            w.flush()?;
            let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
            let positive = rows
                .iter()
                .filter(|r| matches!(&r.outcome, Ok((s, _)) if s.det_m2 > 0.0))
                .count();
            let negative = rows
                .iter()
                .filter(|r| matches!(&r.outcome, Ok((s, _)) if s.det_m2 < 0.0))
                .count();
            eprintln!("det_m2 sign: positive={positive} negative={negative} failed={failed}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DOMAIN)
        }
        Err(Failure::Analysis(e)) => {
            eprintln!("error [{}]: {e}", e.kind());
            ExitCode::from(if e.is_domain() {
                EXIT_DOMAIN
            } else if e.is_degeneracy() {
                EXIT_DEGENERACY
            } else {
                EXIT_NUMERICAL
            })
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
