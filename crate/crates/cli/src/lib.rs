//! Command-line front end: every scan and cross-check of the quench toolkit
//! as a subcommand that writes a CSV table.
//!
//! Exit codes: 0 on success, 2 on argument errors (usage on stderr), 1 on
//! numerical failures.

pub mod args;
pub mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use quench_core::numerics::{uniform_grid, OdeSpec, QuadratureSpec};
use quench_core::spin::{self, Branch, RotorConfig, ScanSpec};
use quench_core::well::{self, QuenchRatio, WellConfig, DEFAULT_LEVELS};
use quench_core::Error as CoreError;

use crate::args::{parse_angle, parse_positive, parse_range, Range};
use crate::table::{format_real, Cell, ScanTable};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(CoreError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { .. } => CliError::Usage(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "quench", version, about = "Sudden-quench scans for a particle in a box and a driven spin-1/2")]
pub struct Cli {
    #[command(flatten)]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Infinitely deep well whose wall jumps from Q0 to gamma * Q0
    Well {
        #[command(subcommand)]
        command: WellCommand,
    },
    /// Spin-1/2 in a magnetic field rotating at omega with tilt alpha
    Spin {
        #[command(subcommand)]
        command: SpinCommand,
    },
}

#[derive(Debug, Args)]
struct Output {
    /// Write the table here instead of standard output
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WellConstants {
    /// Particle mass [kg]
    #[arg(long, default_value = "1e-27", value_parser = parse_positive)]
    mass: f64,
    /// Planck constant h [J s]
    #[arg(long, default_value = "6.626e-34", value_parser = parse_positive)]
    planck: f64,
    /// Initial well width Q0 [m]
    #[arg(long, default_value = "1e-9", value_parser = parse_positive)]
    q0: f64,
}

impl WellConstants {
    fn config(&self) -> Result<WellConfig<f64>, CliError> {
        Ok(WellConfig::new(self.mass, self.planck, self.q0)?)
    }
}

#[derive(Debug, Args)]
struct RotorConstants {
    /// Field strength B0 [T]
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    field: f64,
    /// Charge magnitude |e| [C]
    #[arg(long, default_value = "1.6e-19", value_parser = parse_positive)]
    charge: f64,
    /// Particle mass [kg]
    #[arg(long, default_value = "9.3e-31", value_parser = parse_positive)]
    mass: f64,
    /// Planck constant h [J s]
    #[arg(long, default_value = "6.626e-34", value_parser = parse_positive)]
    planck: f64,
}

impl RotorConstants {
    fn config(&self, tilt: f64) -> Result<RotorConfig<f64>, CliError> {
        let base = RotorConfig::new(self.field, self.charge, self.mass, self.planck, tilt, 1.0)?;
        Ok(base.with_drive(base.larmor())?)
    }
}

const DEFAULT_GAMMAS: &str = "0.1,0.3,0.5,0.9,1.5,2,2.5,4.9,5,10.1";

#[derive(Debug, Subcommand)]
enum WellCommand {
    /// Expansion coefficients of the frozen ground state
    #[command(after_help = "Columns: n,b_n,rho_n")]
    Coeffs {
        #[arg(long, value_parser = parse_positive)]
        gamma: f64,
        #[arg(long, default_value_t = DEFAULT_LEVELS)]
        levels: usize,
    },
    /// Population of each post-quench level
    #[command(name = "pop-scan", after_help = "Columns: n,rho_n")]
    PopScan {
        #[arg(long, value_parser = parse_positive)]
        gamma: f64,
        #[arg(long, default_value_t = DEFAULT_LEVELS)]
        levels: usize,
    },
    /// Probability captured by the first N levels versus gamma
    #[command(after_help = "Columns: gamma,captured,projection_norm")]
    Captured {
        #[arg(long, default_value = "0.1:5", value_parser = parse_range)]
        gamma: Range,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_LEVELS)]
        levels: usize,
    },
    /// Re-normalized post-quench energy in units of E1 versus gamma
    #[command(name = "energy-scan", after_help = "Columns: gamma,E_over_E1")]
    EnergyScan {
        #[arg(long, default_value = "0.1:5", value_parser = parse_range)]
        gamma: Range,
        #[arg(long, default_value_t = 500)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_LEVELS)]
        levels: usize,
    },
    /// Energy and wall force F = -dE/dQ in units of E1/Q0 versus gamma
    #[command(
        name = "force-scan",
        after_help = "Columns: gamma,E_over_E1,F_over_E1_per_Q0\nGrid points at exact integer gamma are omitted."
    )]
    ForceScan {
        #[arg(long, default_value = "0.1:5", value_parser = parse_range)]
        gamma: Range,
        #[arg(long, default_value_t = 500)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_LEVELS)]
        levels: usize,
        /// Finite-difference step in gamma
        #[arg(long, default_value = "1e-4", value_parser = parse_positive)]
        step: f64,
    },
    /// Closed-form coefficients against the quadrature overlap integral
    #[command(name = "oracle-check", after_help = "Columns: gamma,n,closed_form,oracle,abs_diff")]
    OracleCheck {
        #[arg(long, value_delimiter = ',', default_value = DEFAULT_GAMMAS, value_parser = parse_positive)]
        gamma: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        levels: usize,
        /// Absolute quadrature tolerance
        #[arg(long, default_value = "1e-11", value_parser = parse_positive)]
        tol: f64,
        #[command(flatten)]
        constants: WellConstants,
    },
}

#[derive(Debug, Subcommand)]
enum SpinCommand {
    /// Return probability to the initial eigenstate over time
    #[command(name = "return-prob", after_help = "Columns: t_over_period,t_s,rho1,rho2_prime")]
    ReturnProb {
        #[arg(long, default_value = "pi/4", value_parser = parse_angle)]
        alpha: f64,
        /// Drive frequency in units of omega0
        #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
        ratio: f64,
        /// Number of field revolutions to cover
        #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
        cycles: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[command(flatten)]
        constants: RotorConstants,
    },
    /// Return probability after one revolution versus omega/omega0
    #[command(
        name = "omega-scan",
        after_help = "Columns: omega_over_omega0,rho1 (one alpha)\n         omega_over_omega0,rho1@alpha=<A>,... (several alphas)"
    )]
    OmegaScan {
        #[arg(long, value_delimiter = ',', default_value = "pi/4", value_parser = parse_angle)]
        alpha: Vec<f64>,
        #[arg(long, default_value = "0.05:20", value_parser = parse_range)]
        ratio: Range,
        #[arg(long, default_value_t = 10_000)]
        points: usize,
        #[command(flatten)]
        constants: RotorConstants,
    },
    /// Drive ratios where the one-revolution return probability turns monotone and freezes
    #[command(after_help = "Output: monotone_onset_ratio,<value>\n        frozen_ratio,<value>")]
    Threshold {
        #[arg(long, default_value = "pi/4", value_parser = parse_angle)]
        alpha: f64,
        /// Allowed deficit 1 - rho1 for the frozen regime
        #[arg(long, default_value_t = 0.02, value_parser = parse_positive)]
        epsilon: f64,
        #[arg(long, default_value = "0.05:20", value_parser = parse_range)]
        ratio: Range,
        #[arg(long, default_value_t = 10_000)]
        points: usize,
        #[command(flatten)]
        constants: RotorConstants,
    },
    /// Closed-form evolution against RK4 integration over one revolution
    #[command(
        name = "ode-check",
        after_help = "Columns: alpha,omega_over_omega0,branch,max_component_error,norm_drift"
    )]
    OdeCheck {
        #[arg(long, value_delimiter = ',', default_value = "pi/12,pi/4,pi/3", value_parser = parse_angle)]
        alpha: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.3,1,1.442,5,15", value_parser = parse_positive)]
        ratio: Vec<f64>,
        /// RK4 steps per drive period
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        #[command(flatten)]
        constants: RotorConstants,
    },
    /// Return probabilities of the two branches side by side
    #[command(
        name = "symmetry-check",
        after_help = "Columns: alpha,omega_over_omega0,t_over_period,rho1,rho2_prime,abs_diff"
    )]
    SymmetryCheck {
        #[arg(long, value_delimiter = ',', default_value = "pi/12,pi/6,pi/4,pi/3", value_parser = parse_angle)]
        alpha: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.3,1,1.442,5,15", value_parser = parse_positive)]
        ratio: Vec<f64>,
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[command(flatten)]
        constants: RotorConstants,
    },
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    2
                }
            };
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.exit_code() == 2 {
                let _ = writeln!(err, "\nFor more information, try '--help'.");
            }
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let text = match cli.command {
        Command::Well { command } => well_command(command)?,
        Command::Spin { command } => spin_command(command)?,
    };
    match cli.output.output {
        Some(path) => std::fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn at_least(name: &str, value: usize, min: usize) -> Result<(), CliError> {
    if value < min {
        return Err(CliError::Usage(format!("--{name} must be at least {min}, got {value}")));
    }
    Ok(())
}

fn well_command(cmd: WellCommand) -> Result<String, CliError> {
    let table = match cmd {
        WellCommand::Coeffs { gamma, levels } => {
            let d = well::decompose(&QuenchRatio::new(gamma)?, levels)?;
            let mut t = ScanTable::new(["n", "b_n", "rho_n"]);
            for (i, (b, p)) in d.coefficients().iter().zip(d.populations()).enumerate() {
                t.push(vec![(i + 1).into(), (*b).into(), (*p).into()]);
            }
            t
        }
        WellCommand::PopScan { gamma, levels } => {
            let mut t = ScanTable::new(["n", "rho_n"]);
            for (n, p) in well::population_scan(&QuenchRatio::new(gamma)?, levels)? {
                t.push(vec![n.into(), p.into()]);
            }
            t
        }
        WellCommand::Captured { gamma, points, levels } => {
            at_least("points", points, 2)?;
            let mut t = ScanTable::new(["gamma", "captured", "projection_norm"]);
            for (g, c, p) in well::captured_scan(gamma.min, gamma.max, points, levels)? {
                t.push(vec![g.into(), c.into(), p.into()]);
            }
            t
        }
        WellCommand::EnergyScan { gamma, points, levels } => {
            at_least("points", points, 2)?;
            let mut t = ScanTable::new(["gamma", "E_over_E1"]);
            for (g, e) in well::energy_scan(gamma.min, gamma.max, points, levels)? {
                t.push(vec![g.into(), e.into()]);
            }
            t
        }
        WellCommand::ForceScan { gamma, points, levels, step } => {
            at_least("points", points, 2)?;
            let prof = well::force_scan(gamma.min, gamma.max, points, levels, step)?;
            let mut t = ScanTable::new(["gamma", "E_over_E1", "F_over_E1_per_Q0"]);
            for r in prof.rows {
                t.push(vec![r.gamma.into(), r.energy.into(), r.force.into()]);
            }
            t
        }
        WellCommand::OracleCheck { gamma, levels, tol, constants } => {
            let cfg = constants.config()?;
            let spec = QuadratureSpec::new(tol, 500_000)?;
            let mut t = ScanTable::new(["gamma", "n", "closed_form", "oracle", "abs_diff"]);
            for g in gamma {
                let ratio = QuenchRatio::new(g)?;
                for n in 1..=levels {
                    let closed = well::expansion_coefficient(n, &ratio)?;
                    let oracle = well::overlap_oracle(n, &ratio, &cfg, &spec)?;
                    t.push(vec![g.into(), n.into(), closed.into(), oracle.into(), (closed - oracle).abs().into()]);
                }
            }
            t
        }
    };
    Ok(table.to_csv())
}

fn spin_command(cmd: SpinCommand) -> Result<String, CliError> {
    let text = match cmd {
        SpinCommand::ReturnProb { alpha, ratio, cycles, points, constants } => {
            at_least("points", points, 2)?;
            let cfg = constants.config(alpha)?.with_drive_ratio(ratio)?;
            let period = cfg.drive_period();
            let mut t = ScanTable::new(["t_over_period", "t_s", "rho1", "rho2_prime"]);
            for x in uniform_grid(0.0, cycles, points)? {
                let time = x * period;
                let s = spin::branch_symmetry_check(time, &cfg);
                t.push(vec![x.into(), time.into(), s.upper.into(), s.lower.into()]);
            }
            t.to_csv()
        }
        SpinCommand::OmegaScan { alpha, ratio, points, constants } => {
            at_least("points", points, 2)?;
            let cfg = constants.config(0.0)?;
            let curves = spin::omega_scan(ratio.min, ratio.max, points, &alpha, &cfg)?;
            let mut header = vec!["omega_over_omega0".to_owned()];
            if curves.len() == 1 {
                header.push("rho1".to_owned());
            } else {
                header.extend(curves.iter().map(|c| format!("rho1@alpha={}", format_real(c.tilt))));
            }
            let mut t = ScanTable::new(header);
            for i in 0..points {
                let mut row: Vec<Cell> = vec![curves[0].rows[i].0.into()];
                row.extend(curves.iter().map(|c| Cell::Real(c.rows[i].1)));
                t.push(row);
            }
            t.to_csv()
        }
        SpinCommand::Threshold { alpha, epsilon, ratio, points, constants } => {
            at_least("points", points, 2)?;
            let cfg = constants.config(alpha)?;
            let scan = ScanSpec { ratio_min: ratio.min, ratio_max: ratio.max, points };
            let th = spin::anti_adiabatic_threshold(epsilon, &cfg, &scan)?;
            format!(
                "monotone_onset_ratio,{}\nfrozen_ratio,{}\n",
                format_real(th.monotone_onset),
                format_real(th.frozen_onset)
            )
        }
        SpinCommand::OdeCheck { alpha, ratio, steps, constants } => {
            let spec = OdeSpec::new(steps)?;
            let mut t = ScanTable::new(["alpha", "omega_over_omega0", "branch", "max_component_error", "norm_drift"]);
            for &a in &alpha {
                for &r in &ratio {
                    let cfg = constants.config(a)?.with_drive_ratio(r)?;
                    for (branch, name) in [(Branch::Upper, "psi1"), (Branch::Lower, "psi2")] {
                        let dev = spin::oracle_deviation(branch, &cfg, &spec)?;
                        t.push(vec![
                            a.into(),
                            r.into(),
                            name.into(),
                            dev.max_component_error.into(),
                            dev.norm_drift.into(),
                        ]);
                    }
                }
            }
            t.to_csv()
        }
        SpinCommand::SymmetryCheck { alpha, ratio, points, constants } => {
            at_least("points", points, 2)?;
            let mut t =
                ScanTable::new(["alpha", "omega_over_omega0", "t_over_period", "rho1", "rho2_prime", "abs_diff"]);
            for &a in &alpha {
                for &r in &ratio {
                    let cfg = constants.config(a)?.with_drive_ratio(r)?;
                    for x in uniform_grid(0.0, 1.0, points)? {
                        let s = spin::branch_symmetry_check(x * cfg.drive_period(), &cfg);
                        t.push(vec![a.into(), r.into(), x.into(), s.upper.into(), s.lower.into(), s.difference.into()]);
                    }
                }
            }
            t.to_csv()
        }
    };
    Ok(text)
}
