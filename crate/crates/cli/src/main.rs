use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use nsi_core::effective::{
    adiabatic_effective, exact_transition_frequencies, lowest_transition, mixing_angle,
};
use nsi_core::gates::{protocol_steps, simulated_superposition_protocol, ProtocolLevel, ProtocolState};
use nsi_core::model::{build_rwa_hamiltonian, ModelParams};
use nsi_core::sweep::{
    export_sweep_csv, export_trace_csv, parse_config, run_evolve, run_sweep, ParsedConfig, ProtocolSpec,
    SweepSpec,
};
use nsi_core::units::{rad_to_khz, s_to_us};
use nsi_core::Error;

/// Environment variable selecting the number of worker threads.
const THREADS_VAR: &str = "NSI_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "nsiq",
    version,
    about = "Four-level nuclear-spin-isomer qubit simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a parameter sweep and write the effective-coupling table.
    Sweep {
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        /// Built-in sweep: fig4b (detuning), fig5b (coupling) or fig6 (degeneracy).
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, required_unless_present = "print_config")]
        out: Option<PathBuf>,
        /// Print the resolved sweep config as JSON instead of running it.
        #[arg(long)]
        print_config: bool,
    },
    /// Evolve one initial state and write the population trace.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the states of the shelving superposition protocol.
    Protocol {
        #[arg(long, allow_hyphen_values = true, required_unless_present = "config")]
        theta_rad: Option<f64>,
        /// Protocol config; with `simulate: true` the inversion is also run
        /// under the model it describes.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Print eigenvalues, transition frequencies and effective couplings.
    Spectrum {
        #[arg(long)]
        config: PathBuf,
    },
}

fn read_config(path: &Path) -> anyhow::Result<ParsedConfig> {
    let text = fs::read_to_string(path)
        .map_err(Error::Io)
        .with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

/// Pretty JSON on stdout; a closed pipe (`nsiq ... | head`) is not an error.
fn print_json(value: &Value) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    let written = serde_json::to_writer_pretty(&mut out, value)
        .map_err(std::io::Error::from)
        .and_then(|()| writeln!(out));
    match written {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io(e).into()),
        _ => Ok(()),
    }
}

fn sweep(
    config: Option<PathBuf>,
    preset: Option<String>,
    out: Option<PathBuf>,
    print_config: bool,
) -> anyhow::Result<()> {
    let spec = match (config, preset) {
        (_, Some(name)) => SweepSpec::preset(&name)?,
        (Some(path), None) => match read_config(&path)? {
            ParsedConfig::Sweep(spec) => spec,
            _ => return Err(Error::Config(format!("{} is not a sweep config", path.display())).into()),
        },
        (None, None) => unreachable!("clap requires --config or --preset"),
    };
    if print_config {
        print_json(&spec.to_json())?;
        return Ok(());
    }
    let out = out.expect("clap requires --out without --print-config");
    let result = run_sweep(&spec);
    let bytes = export_sweep_csv(&result, &out).with_context(|| format!("writing {}", out.display()))?;
    eprintln!(
        "{} sweep: {} points, {} with errors, {bytes} bytes -> {}",
        spec.kind.name(),
        result.rows.len(),
        result.failed_rows(),
        out.display()
    );
    Ok(())
}

fn evolve(config: &Path, out: &Path) -> anyhow::Result<()> {
    let spec = match read_config(config)? {
        ParsedConfig::Evolve(spec) => spec,
        _ => return Err(Error::Config(format!("{} is not an evolve config", config.display())).into()),
    };
    let trace = run_evolve(&spec)?;
    let bytes = export_trace_csv(&trace, out).with_context(|| format!("writing {}", out.display()))?;
    eprintln!("{} samples, {bytes} bytes -> {}", trace.len(), out.display());
    Ok(())
}

fn state_json(state: &ProtocolState) -> Value {
    let levels: serde_json::Map<String, Value> = ProtocolLevel::ALL
        .iter()
        .zip(state.amplitudes.iter())
        .map(|(level, z)| {
            (
                level.name().to_string(),
                json!({"re": z.re, "im": z.im, "prob": z.norm_sqr()}),
            )
        })
        .collect();
    Value::Object(levels)
}

fn protocol(theta_rad: Option<f64>, config: Option<PathBuf>) -> anyhow::Result<()> {
    let spec = match config {
        Some(path) => match read_config(&path)? {
            ParsedConfig::Protocol(spec) => spec,
            _ => return Err(Error::Config(format!("{} is not a protocol config", path.display())).into()),
        },
        None => ProtocolSpec {
            theta: f64::NAN,
            simulate: None,
        },
    };
    let theta = theta_rad.unwrap_or(spec.theta);
    if !theta.is_finite() {
        return Err(Error::Config(format!("theta_rad must be finite, got {theta}")).into());
    }
    let steps: Vec<Value> = protocol_steps(theta)
        .iter()
        .map(|s| json!({"description": s.description, "state": state_json(&s.state)}))
        .collect();
    let target = ProtocolState::target(theta);
    let mut report = json!({
        "theta_rad": theta,
        "initial": state_json(&ProtocolState::initial()),
        "steps": steps,
        "target": state_json(&target),
    });
    if let Some(params) = spec.simulate {
        let sim = simulated_superposition_protocol(theta, &params)?;
        report["simulated"] = json!({
            "state": state_json(&sim.state),
            "fidelity": sim.fidelity,
            "phase_corrected_fidelity": sim.phase_corrected_fidelity,
            "leakage": sim.leakage,
            "inversion_duration_us": s_to_us(sim.inversion_duration),
        });
    }
    print_json(&report)?;
    Ok(())
}

/// Value or, for inputs outside the closed form's domain, the error text.
fn or_reason(r: nsi_core::Result<Value>) -> anyhow::Result<Value> {
    match r {
        Ok(v) => Ok(v),
        Err(e) if e.is_config() || matches!(e, Error::Pole { .. }) => {
            Ok(json!({"unavailable": e.to_string()}))
        }
        Err(e) => Err(e.into()),
    }
}

fn spectrum_report(params: &ModelParams) -> anyhow::Result<Value> {
    let eigenvalues = build_rwa_hamiltonian(params)?.eigenvalues()?.map(rad_to_khz);
    let theta = mixing_angle(params.epsilon, params.delta)?.theta;
    let adiabatic = or_reason(adiabatic_effective(params).map(|a| {
        json!({
            "omega_eff_khz": rad_to_khz(a.pair.omega_eff),
            "delta_eff_khz": rad_to_khz(a.pair.delta_eff),
            "relative_phase_rad": a.relative_phase,
            "valid": a.valid,
        })
    }))?;
    Ok(json!({
        "eigenvalues_khz": eigenvalues,
        "mixing_angle_rad": theta,
        "transitions_khz": or_reason(exact_transition_frequencies(params).map(|t| json!(t.map(rad_to_khz))))?,
        "lowest_transition_khz": or_reason(lowest_transition(params).map(|w| json!(rad_to_khz(w))))?,
        "adiabatic": adiabatic,
    }))
}

fn spectrum(config: &Path) -> anyhow::Result<()> {
    let parsed = read_config(config)?;
    let params = parsed
        .params()
        .ok_or_else(|| Error::Config("protocol config without `simulate` has no model".into()))?;
    print_json(&spectrum_report(params)?)?;
    Ok(())
}

fn init_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("{THREADS_VAR} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| anyhow!("thread pool: {e}"))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    init_threads()?;
    match cli.command {
        Command::Sweep {
            config,
            preset,
            out,
            print_config,
        } => sweep(config, preset, out, print_config),
        Command::Evolve { config, out } => evolve(&config, &out),
        Command::Protocol { theta_rad, config } => protocol(theta_rad, config),
        Command::Spectrum { config } => spectrum(&config),
    }
}

/// 2 for invalid input, 3 for numerical failure, 1 for anything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Io(_)) | Some(Error::Csv(_)) => 1,
        Some(e) if e.is_config() => 2,
        Some(_) => 3,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_kind() {
        let config = anyhow::Error::from(Error::Config("x".into())).context("reading");
        assert_eq!(exit_code(&config), 2);
        assert_eq!(exit_code(&Error::StepUnderflow { t: 1e-3 }.into()), 3);
        assert_eq!(
            exit_code(
                &Error::NonConvergence {
                    iterations: 3,
                    residual: 1.0
                }
                .into()
            ),
            3
        );
        assert_eq!(
            exit_code(&Error::Io(std::io::ErrorKind::NotFound.into()).into()),
            1
        );
        assert_eq!(exit_code(&anyhow!("other")), 1);
    }
}
