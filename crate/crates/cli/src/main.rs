use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chargequbit::config::{parse_entries, ConfigEntries};
use chargequbit::csv::write_csv;
use chargequbit::sweep::{
    find_crossover, minimize_geometry, oracle_check, run_sweep, Crossover, GeometryBounds,
    OracleReport, SweepConfig,
};
use chargequbit::{CouplingChannel, Error};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_ORACLE: u8 = 3;
const EXIT_NONCONVERGENCE: u8 = 4;

/// Phonon decoherence and gate errors of double-dot charge qubits.
#[derive(Parser, Debug)]
#[command(name = "chargequbit", version)]
struct Cli {
    /// Key=value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file (default: standard output).
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(flatten)]
    keys: ConfigFlags,

    #[command(subcommand)]
    command: Command,
}

/// Overrides for individual configuration keys.
#[derive(Args, Debug, Default)]
struct ConfigFlags {
    #[arg(long, global = true)]
    preset: Option<String>,
    #[arg(long, global = true)]
    name: Option<String>,
    #[arg(long = "xi-eV", global = true)]
    xi_ev: Option<String>,
    #[arg(long = "s-mps", global = true)]
    s_mps: Option<String>,
    #[arg(long = "rho-gcc", global = true)]
    rho_gcc: Option<String>,
    #[arg(long = "e14-cpm2", global = true)]
    e14_cpm2: Option<String>,
    #[arg(long, global = true)]
    kappa: Option<String>,
    #[arg(long = "a-nm", global = true)]
    a_nm: Option<String>,
    #[arg(long = "L-nm", global = true)]
    l_nm: Option<String>,
    #[arg(long, global = true)]
    shape: Option<String>,
    /// Comma-separated channel names.
    #[arg(long, global = true)]
    channels: Option<String>,
    #[arg(long = "dt-min-ps", global = true)]
    dt_min_ps: Option<String>,
    #[arg(long = "dt-max-ps", global = true)]
    dt_max_ps: Option<String>,
    #[arg(long = "points-per-decade", global = true)]
    points_per_decade: Option<String>,
    #[arg(long = "log-spaced", global = true)]
    log_spaced: Option<String>,
    #[arg(long = "regime-threshold", global = true)]
    regime_threshold: Option<String>,
    #[arg(long = "rel-tol", global = true)]
    rel_tol: Option<String>,
    #[arg(long = "abs-tol", global = true)]
    abs_tol: Option<String>,
    #[arg(long = "max-subdivisions", global = true)]
    max_subdivisions: Option<String>,
    #[arg(long = "radial-cutoff-factor", global = true)]
    radial_cutoff_factor: Option<String>,
    /// Add a row with rates and exponents summed over channels.
    #[arg(long, global = true)]
    combined: bool,
    #[arg(long = "b2-time-ps", global = true)]
    b2_time_ps: Option<String>,
}

impl ConfigFlags {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        let all = [
            ("preset", &self.preset),
            ("name", &self.name),
            ("xi_eV", &self.xi_ev),
            ("s_mps", &self.s_mps),
            ("rho_gcc", &self.rho_gcc),
            ("e14_cpm2", &self.e14_cpm2),
            ("kappa", &self.kappa),
            ("a_nm", &self.a_nm),
            ("L_nm", &self.l_nm),
            ("shape", &self.shape),
            ("channels", &self.channels),
            ("dt_min_ps", &self.dt_min_ps),
            ("dt_max_ps", &self.dt_max_ps),
            ("points_per_decade", &self.points_per_decade),
            ("log_spaced", &self.log_spaced),
            ("regime_threshold", &self.regime_threshold),
            ("rel_tol", &self.rel_tol),
            ("abs_tol", &self.abs_tol),
            ("max_subdivisions", &self.max_subdivisions),
            ("radial_cutoff_factor", &self.radial_cutoff_factor),
            ("b2_time_ps", &self.b2_time_ps),
        ];
        let mut out: Vec<(&'static str, &str)> = all
            .into_iter()
            .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
            .collect();
        if self.combined {
            out.push(("combined", "true"));
        }
        out
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Error budget at a single cycle time, as CSV.
    Rates {
        /// Cycle time [ps].
        #[arg(long = "dt-ps")]
        dt_ps: String,
    },
    /// Error budget over the cycle-time grid, as CSV.
    Sweep,
    /// Cycle time at which relaxation and dephasing errors are equal.
    Crossover {
        /// Channel to examine (default: every configured channel).
        #[arg(long)]
        channel: Option<String>,
    },
    /// Dot size and separation minimising the error at a fixed cycle time.
    Optimize {
        #[arg(long)]
        channel: Option<String>,
        /// Cycle time [ps].
        #[arg(long = "dt-ps")]
        dt_ps: f64,
        #[arg(long = "a-min-nm", default_value_t = 1.0)]
        a_min_nm: f64,
        #[arg(long = "a-max-nm", default_value_t = 100.0)]
        a_max_nm: f64,
        #[arg(long = "L-min-nm", default_value_t = 10.0)]
        l_min_nm: f64,
        #[arg(long = "L-max-nm", default_value_t = 500.0)]
        l_max_nm: f64,
    },
    /// Compare the closed forms with their quadrature oracles.
    OracleCheck,
}

enum Failure {
    Lib(Error),
    Oracle,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. }
        | Error::InvalidParameter { .. }
        | Error::UnknownPreset(_)
        | Error::UnknownChannel(_)
        | Error::MissingPiezoModulus(_)
        | Error::ShapeMismatch { .. } => EXIT_CONFIG,
        Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
        _ => EXIT_FAILURE,
    }
}

fn load_entries(cli: &Cli) -> Result<ConfigEntries, Error> {
    let mut entries = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Config {
                line: None,
                key: None,
                message: format!("cannot read {}: {e}", path.display()),
            })?;
            parse_entries(&text)?
        }
        None => ConfigEntries::default(),
    };
    for (key, value) in cli.keys.pairs() {
        entries.set(key, value)?;
    }
    Ok(entries)
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn channels_for(
    config: &SweepConfig,
    channel: Option<&str>,
) -> Result<Vec<CouplingChannel>, Error> {
    match channel {
        Some(name) => {
            let c: CouplingChannel = name.parse()?;
            c.check(&config.material, &config.geometry)?;
            Ok(vec![c])
        }
        None => Ok(config.ordered_channels()),
    }
}

fn print_oracle_report(report: &OracleReport, out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "B2 oracle time: {:e} s", report.b2_time)?;
    for c in &report.channels {
        writeln!(
            out,
            "{}: {} gamma max rel dev {:.3e} over {} points (tol {:.0e})",
            if c.passed() { "PASS" } else { "FAIL" },
            c.channel,
            c.gamma_max_rel_dev,
            c.gamma_points,
            c.gamma_tol
        )?;
        let b2 = match (c.b2_oracle, c.b2_rel_dev) {
            (Some(o), Some(d)) => format!(
                "oracle {o:.6e} vs closed {:.6e}, rel dev {d:.3e}",
                c.b2_closed
            ),
            _ => format!("oracle unavailable, closed {:.6e}", c.b2_closed),
        };
        let tol = match c.b2_tol {
            Some(t) => format!("tol {t}"),
            None => "diagnostic".to_string(),
        };
        writeln!(out, "    B2 {b2} ({tol})")?;
        for f in &c.failures {
            let at =
                f.dt.map_or("B2 check".to_string(), |dt| format!("dt = {dt:e} s"));
            writeln!(out, "    error at {at}: {}", f.message)?;
        }
    }
    writeln!(
        out,
        "overall: {}",
        if report.passed() { "PASS" } else { "FAIL" }
    )
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let mut entries = load_entries(cli)?;
    if let Command::Rates { dt_ps } = &cli.command {
        entries.set("dt_min_ps", dt_ps.as_str())?;
        entries.set("dt_max_ps", dt_ps.as_str())?;
    }
    let config = entries.build()?;
    let mut out = open_output(cli.output.as_deref())?;

    match &cli.command {
        Command::Rates { .. } | Command::Sweep => {
            let rows = run_sweep(&config)?;
            write_csv(&rows, &mut out)?;
        }
        Command::Crossover { channel } => {
            for c in channels_for(&config, channel.as_deref())? {
                match find_crossover(&config, c)? {
                    Crossover::Found { dt, d_a, d_p } => writeln!(
                        out,
                        "{c}: crossover at dt = {dt:.9e} s (D_A = {d_a:.6e}, D_P = {d_p:.6e})"
                    ),
                    Crossover::NotFound {
                        dt_min,
                        dt_max,
                        d_a_at_min,
                        d_a_at_max,
                        d_p,
                    } => writeln!(
                        out,
                        "{c}: no crossover in [{dt_min:e}, {dt_max:e}] s \
                         (D_A = {d_a_at_min:.6e} .. {d_a_at_max:.6e}, D_P = {d_p:.6e})"
                    ),
                }
                .map_err(Error::from)?;
            }
        }
        Command::Optimize {
            channel,
            dt_ps,
            a_min_nm,
            a_max_nm,
            l_min_nm,
            l_max_nm,
        } => {
            let bounds = GeometryBounds {
                a: (a_min_nm * 1e-9, a_max_nm * 1e-9),
                l: (l_min_nm * 1e-9, l_max_nm * 1e-9),
            };
            for c in channels_for(&config, channel.as_deref())? {
                let r = minimize_geometry(&config, &bounds, c, dt_ps * 1e-12)?;
                writeln!(
                    out,
                    "{c}: a = {:.6} nm, L = {:.6} nm, D = {:.6e} (D_A = {:.6e}, D_P = {:.6e}), \
                     {} evaluations, {} discarded",
                    r.a * 1e9,
                    r.l * 1e9,
                    r.d,
                    r.d_a,
                    r.d_p,
                    r.evaluations,
                    r.discarded
                )
                .map_err(Error::from)?;
            }
        }
        Command::OracleCheck => {
            let report = oracle_check(&config)?;
            print_oracle_report(&report, &mut out).map_err(Error::from)?;
            out.flush().map_err(Error::from)?;
            if report.nonconvergence() {
                return Err(Failure::Lib(Error::NonConvergence {
                    value: f64::NAN,
                    error_estimate: f64::NAN,
                    subdivisions: config.quadrature.max_subdivisions,
                }));
            }
            if !report.passed() {
                return Err(Failure::Oracle);
            }
        }
    }
    out.flush().map_err(Error::from)?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Oracle) => {
            log::error!("oracle check failed");
            ExitCode::from(EXIT_ORACLE)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
