//! `gravphase` — atom-interferometer gravimetry from a TOML scenario.
//!
//! Every command reads one configuration file, writes a sorted-key JSON
//! record (and CSV data files where they make sense) into the output
//! directory, and prints the same JSON to stdout.  Outputs carry no
//! timestamps: identical runs produce identical bytes.
//!
//! Exit codes: 0 success, 2 configuration error (the message names the
//! field), 3 numerical-verification failure.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use gravphase::clocks::{compare_clocks, ClockComparison, ClockStation};
use gravphase::gravimeter::{
    ep_sweep, invert_g, monte_carlo_fringe_trials, sensitivity_ratio, EpSweepReport,
    GravimeterEstimate, MonteCarloReport, SensitivityReport,
};
use gravphase::interferometer::{
    fringe_fall_check, fringe_scan, spatial_fringes, FringeFallReport, FringePattern,
    ScanPoint, ScanVariable,
};
use gravphase::phase::{EquivalenceReport, PhaseBreakdown};
use gravphase::quantities::{Frequency, Length, Phase, Time, Velocity};
use gravphase::sequence::recoil_velocity;

use config::{Config, ConfigError};
use output::ResultRecord;

#[derive(Parser)]
#[command(
    name = "gravphase",
    version,
    about = "Atom-interferometer gravimetry: phases, fringes, clocks, and fits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory for the JSON record and CSV data files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Seed for the stochastic commands.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the interferometer and write the phase breakdown.
    Phase(Common),
    /// Check the closed-form expression chain against the integrator.
    Verify(Common),
    /// Spatial interference pattern of the recoil-split waves.
    Fringes(Common),
    /// Scan a parameter and record the fringe it traces.
    Scan(Common),
    /// Compare two stationary clocks in the field.
    ClockCompare(Common),
    /// Recover g from the phase, with a noise Monte Carlo.
    Invert(Common),
    /// Sweep the equivalence ratio and check the phase stays linear.
    SweepEta(Common),
    /// Matter-wave versus optical-photon sensitivity.
    Sensitivity(Common),
}

enum CliError {
    /// Bad configuration: exit 2, message names the field.
    Config(String),
    /// A numerical verification failed: exit 3.
    Verification(String),
    /// Filesystem or serialization trouble: exit 1.
    Io(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

/// Maps a library error raised while running `section` of the config.
/// Fit failures are verification failures; everything else means the
/// request itself was unusable.
fn lib_err(section: &str, e: gravphase::Error) -> CliError {
    match e {
        gravphase::Error::FitFailure { .. } => {
            CliError::Verification(format!("{section}: {e}"))
        }
        other => CliError::Config(format!("{section}: {other}")),
    }
}

fn io_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Io(e.to_string())
}

type CommandRunner = fn(&Config, &Common) -> Result<String, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (&Common, CommandRunner) =
        match &cli.command {
            Command::Phase(c) => (c, run_phase),
            Command::Verify(c) => (c, run_verify),
            Command::Fringes(c) => (c, run_fringes),
            Command::Scan(c) => (c, run_scan),
            Command::ClockCompare(c) => (c, run_clock_compare),
            Command::Invert(c) => (c, run_invert),
            Command::SweepEta(c) => (c, run_sweep_eta),
            Command::Sensitivity(c) => (c, run_sensitivity),
        };

    let text = match std::fs::read_to_string(&common.config) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", common.config.display());
            return ExitCode::from(2);
        }
    };
    let parsed = match Config::from_toml(&text) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    match run(&parsed, common) {
        Ok(json) => {
            print!("{json}");
            ExitCode::SUCCESS
        }
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

/// Writes the JSON record to `<out>/<command>.json` and returns its text.
fn emit<T: Serialize>(
    command: &str,
    common: &Common,
    config: &Config,
    result: T,
) -> Result<String, CliError> {
    let record = ResultRecord::new(command, common.seed, config, result);
    let json = record.to_json().map_err(io_err)?;
    output::write_text(&common.out, &format!("{command}.json"), &json).map_err(io_err)?;
    Ok(json)
}

#[derive(Serialize)]
struct PhaseResult {
    breakdown: PhaseBreakdown,
    closed_form: Phase,
    relative_deviation: f64,
    recoil_velocity: f64,
    trajectory_rows: usize,
}

fn run_phase(config: &Config, common: &Common) -> Result<String, CliError> {
    let scenario = config.scenario()?;
    let breakdown = scenario
        .phase_breakdown()
        .map_err(|e| lib_err("phase", e))?;
    let closed = scenario
        .closed_form_phase()
        .map_err(|e| lib_err("phase", e))?;
    let arms = scenario.build_arms().map_err(|e| lib_err("phase", e))?;
    let samples = arms.sample(401).map_err(|e| lib_err("phase", e))?;

    let rows: Vec<Vec<String>> = samples
        .iter()
        .map(|s| {
            vec![
                s.t.to_string(),
                s.x_upper.to_string(),
                s.x_lower.to_string(),
                s.state_upper.label().to_string(),
                s.state_lower.label().to_string(),
            ]
        })
        .collect();
    output::write_csv(
        &common.out,
        "phase_trajectory.csv",
        &["t", "x_upper", "x_lower", "state_upper", "state_lower"],
        &rows,
    )
    .map_err(io_err)?;

    let total = breakdown.differential.total.value();
    let scale = total.abs().max(closed.value().abs());
    let relative_deviation = if scale == 0.0 {
        0.0
    } else {
        (total - closed.value()).abs() / scale
    };
    emit(
        "phase",
        common,
        config,
        PhaseResult {
            breakdown,
            closed_form: closed,
            relative_deviation,
            recoil_velocity: arms.recoil_velocity(),
            trajectory_rows: samples.len(),
        },
    )
}

fn run_verify(config: &Config, common: &Common) -> Result<String, CliError> {
    let scenario = config.scenario()?;
    let report: EquivalenceReport = scenario
        .verify(config.verify.tolerance)
        .map_err(|e| lib_err("verify", e))?;
    let passed = report.passed;
    let worst = report.max_relative_deviation;
    let json = emit("verify", common, config, report)?;
    if !passed {
        return Err(CliError::Verification(format!(
            "expression chain deviates by {worst:.3e}, tolerance {:.3e}",
            config.verify.tolerance
        )));
    }
    Ok(json)
}

#[derive(Serialize)]
struct FringesResult {
    pattern: FringePattern,
    fall_check: FringeFallReport,
}

fn run_fringes(config: &Config, common: &Common) -> Result<String, CliError> {
    let scenario = config.scenario()?;
    let species = scenario.species();
    let kappa = scenario.kappa();
    let vr = recoil_velocity(species, kappa).map_err(|e| lib_err("fringes", e))?;
    let low = Velocity::new(config.fringes.velocity_low)
        .map_err(|e| CliError::Config(format!("fringes.velocity_low: {e}")))?;
    let kicked = Velocity::new(low.value() + vr.value())
        .map_err(|e| lib_err("fringes", e))?;
    let window = config
        .fringes
        .window
        .unwrap_or(20.0 * std::f64::consts::TAU / kappa.value());
    let window =
        Length::new(window).map_err(|e| CliError::Config(format!("fringes.window: {e}")))?;

    let pattern = spatial_fringes(species, kicked, low, window, config.fringes.samples)
        .map_err(|e| lib_err("fringes", e))?;
    let fall_check = fringe_fall_check(
        species,
        kappa,
        scenario.uniform_g(),
        scenario.interrogation_time(),
    )
    .map_err(|e| lib_err("fringes", e))?;

    let rows: Vec<Vec<String>> = pattern
        .positions
        .iter()
        .zip(&pattern.intensities)
        .map(|(x, i)| vec![x.to_string(), i.to_string()])
        .collect();
    output::write_csv(
        &common.out,
        "fringes.csv",
        &["position", "intensity"],
        &rows,
    )
    .map_err(io_err)?;

    emit(
        "fringes",
        common,
        config,
        FringesResult {
            pattern,
            fall_check,
        },
    )
}

#[derive(Serialize)]
struct ScanResult {
    variable: String,
    points: Vec<ScanPoint>,
}

fn run_scan(config: &Config, common: &Common) -> Result<String, CliError> {
    let scenario = config.scenario()?;
    let variable = match config.scan.variable.as_str() {
        "pulse-phase" => ScanVariable::PulsePhase,
        "interrogation-time" => ScanVariable::InterrogationTime,
        "gravity" => ScanVariable::Gravity,
        other => {
            return Err(CliError::Config(format!(
                "scan.variable: unknown variable {other:?}; expected \"pulse-phase\", \
                 \"interrogation-time\", or \"gravity\""
            )))
        }
    };
    let grid = Config::grid("scan", config.scan.start, config.scan.stop, config.scan.points)?;
    let points = fringe_scan(&scenario, variable, &grid).map_err(|e| lib_err("scan", e))?;

    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            vec![
                p.value.to_string(),
                p.delta_phase.value().to_string(),
                p.populations.excited.to_string(),
                p.populations.ground.to_string(),
            ]
        })
        .collect();
    output::write_csv(
        &common.out,
        "scan.csv",
        &["value", "delta_phase", "excited", "ground"],
        &rows,
    )
    .map_err(io_err)?;

    emit(
        "scan",
        common,
        config,
        ScanResult {
            variable: config.scan.variable.clone(),
            points,
        },
    )
}

fn run_clock_compare(config: &Config, common: &Common) -> Result<String, CliError> {
    let species = config.species()?;
    let env = config.environment()?;
    let frequency = config
        .clock
        .frequency
        .unwrap_or(species.hyperfine_splitting().value());
    let frequency = Frequency::new(frequency)
        .map_err(|e| CliError::Config(format!("clock.frequency: {e}")))?;
    let low = Length::new(config.clock.position_low)
        .map_err(|e| CliError::Config(format!("clock.position_low: {e}")))?;
    let high = Length::new(config.clock.position_high)
        .map_err(|e| CliError::Config(format!("clock.position_high: {e}")))?;
    let duration = Time::new(config.clock.duration)
        .map_err(|e| CliError::Config(format!("clock.duration: {e}")))?;

    let station_low =
        ClockStation::new(low, frequency).map_err(|e| lib_err("clock", e))?;
    let station_high =
        ClockStation::new(high, frequency).map_err(|e| lib_err("clock", e))?;
    let comparison: ClockComparison =
        compare_clocks(&env, &station_low, &station_high, duration)
            .map_err(|e| lib_err("clock", e))?;
    emit("clock-compare", common, config, comparison)
}

#[derive(Serialize)]
struct InvertResult {
    estimate: GravimeterEstimate,
    monte_carlo: Option<MonteCarloReport>,
}

fn run_invert(config: &Config, common: &Common) -> Result<String, CliError> {
    let scenario = config.scenario()?;
    let phase = match config.invert.delta_phase {
        Some(value) => Phase::new(value)
            .map_err(|e| CliError::Config(format!("invert.delta_phase: {e}")))?,
        None => scenario
            .differential_phase()
            .map_err(|e| lib_err("invert", e))?,
    };
    let estimate = invert_g(
        phase,
        scenario.kappa(),
        scenario.interrogation_time(),
        scenario.species().ep_ratio(),
    )
    .map_err(|e| lib_err("invert", e))?;

    let monte_carlo = if config.invert.trials > 0 {
        let n = config.invert.scan_points;
        if n < 5 {
            return Err(CliError::Config(format!(
                "invert.scan_points: at least 5 are needed for the fit, got {n}"
            )));
        }
        let phases: Vec<f64> = (0..n)
            .map(|i| -std::f64::consts::PI + std::f64::consts::TAU * i as f64 / n as f64)
            .collect();
        Some(
            monte_carlo_fringe_trials(
                &scenario,
                &phases,
                config.invert.noise_sigma,
                config.invert.trials,
                common.seed,
            )
            .map_err(|e| lib_err("invert", e))?,
        )
    } else {
        None
    };

    emit(
        "invert",
        common,
        config,
        InvertResult {
            estimate,
            monte_carlo,
        },
    )
}

fn run_sweep_eta(config: &Config, common: &Common) -> Result<String, CliError> {
    let scenario = config.scenario()?;
    let etas = Config::grid("sweep", config.sweep.start, config.sweep.stop, config.sweep.points)?;
    let report: EpSweepReport =
        ep_sweep(&scenario, &etas).map_err(|e| lib_err("sweep", e))?;

    let rows: Vec<Vec<String>> = report
        .points
        .iter()
        .map(|p| vec![p.eta.to_string(), p.delta_phase.to_string()])
        .collect();
    output::write_csv(&common.out, "sweep_eta.csv", &["eta", "delta_phase"], &rows)
        .map_err(io_err)?;

    let passed = report.passed;
    let deviation = report.relative_deviation;
    let json = emit("sweep-eta", common, config, report)?;
    if !passed {
        return Err(CliError::Verification(format!(
            "phase is not linear in the equivalence ratio: slope deviates by {deviation:.3e}"
        )));
    }
    Ok(json)
}

fn run_sensitivity(config: &Config, common: &Common) -> Result<String, CliError> {
    let species = config.species()?;
    let frequency = config
        .sensitivity
        .reference_frequency
        .unwrap_or(species.optical_frequency().value());
    let frequency = Frequency::new(frequency)
        .map_err(|e| CliError::Config(format!("sensitivity.reference_frequency: {e}")))?;
    let report: SensitivityReport =
        sensitivity_ratio(&species, frequency).map_err(|e| lib_err("sensitivity", e))?;
    emit("sensitivity", common, config, report)
}
