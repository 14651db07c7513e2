use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wellsqueeze::control::{self, ELEMENTARY_CHARGE};
use wellsqueeze::diagnostics;
use wellsqueeze::runner::{self, Prepared, ScenarioConfig};
use wellsqueeze::targetgen::{self, TargetSpec};
use wellsqueeze::{CouplingMatrix, Error, ModelTag, Result, WellSpec};

/// Optimal-control squeezing of a wave packet in an infinite square well.
#[derive(Parser)]
#[command(name = "wellsqueeze", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the synthesized schedule (k, ω_1k, B_k, V_k).
    Synth(ScenarioArgs),
    /// Run a scenario and write summary, time series and density maps.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output directory (overrides the config).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Propagate two models and report their amplitude deviation.
    Compare {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Two models, comma separated, e.g. `rwa,reduced`.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        models: Vec<String>,
    },
    /// Write the density map (text matrix and PNG) for one model.
    Figure {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        model: String,
        /// Path prefix; `.txt` and `.png` are appended.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Estimate the SI duration of a single-mode transfer.
    SiEstimate {
        /// Field amplitude in V/m.
        #[arg(long)]
        field: f64,
        /// Charge in coulomb, or `e` for the elementary charge.
        #[arg(long, default_value = "e")]
        charge: String,
        /// Well length in metres.
        #[arg(long)]
        length: f64,
        /// Target width as a fraction of the well length.
        #[arg(long)]
        sigma_ratio: f64,
        /// Target centre as a fraction of the well length.
        #[arg(long, default_value_t = 0.5)]
        x0_ratio: f64,
        #[arg(long)]
        mode: usize,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file (`key = value` lines).
    #[arg(long, conflicts_with = "scenario")]
    config: Option<PathBuf>,
    /// Built-in scenario: fig1, smallsigma or reduced-scale.
    #[arg(long)]
    scenario: Option<String>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<ScenarioConfig> {
        match (&self.config, &self.scenario) {
            (Some(path), _) => ScenarioConfig::load(path),
            (None, Some(name)) => ScenarioConfig::builtin(name),
            (None, None) => Err(Error::InvalidInput("give --config <file> or --scenario <name>".into())),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Synth(args) => synth(&args.load()?),
        Command::Run { scenario, output } => {
            let mut cfg = scenario.load()?;
            if let Some(dir) = output {
                cfg.output_dir = dir;
            }
            run(&cfg)
        }
        Command::Compare { scenario, models } => compare(&scenario.load()?, &models),
        Command::Figure {
            scenario,
            model,
            output,
        } => figure(&scenario.load()?, &model, output.as_deref()),
        Command::SiEstimate {
            field,
            charge,
            length,
            sigma_ratio,
            x0_ratio,
            mode,
        } => si_estimate(field, &charge, length, sigma_ratio, x0_ratio, mode),
    }
}

fn synth(cfg: &ScenarioConfig) -> Result<()> {
    let p = Prepared::new(cfg)?;
    let spec = &p.spec;
    println!(
        "# scenario {}  N = {}  T = {:.10e}  s = {:.16}",
        cfg.name,
        spec.levels,
        p.schedule.horizon(),
        p.truncated_norm()
    );
    println!(
        "# energy: sum B^2 T = {:.10e}  sum V^2 T = {:.10e}",
        p.schedule.total_energy(),
        p.schedule.envelope_energy()
    );
    println!("{:>4} {:>24} {:>24} {:>24}", "k", "omega_1k", "B_k", "V_k");
    for e in p.schedule.entries() {
        println!(
            "{:>4} {:>24.16e} {:>24.16e} {:>24.16e}",
            e.mode,
            e.carrier,
            e.slope,
            e.amplitude()
        );
    }
    Ok(())
}

fn run(cfg: &ScenarioConfig) -> Result<()> {
    let report = runner::run_scenario(cfg)?;
    println!(
        "scenario {}: N = {}, T = {:.10e}",
        report.scenario, report.levels, report.horizon
    );
    for m in &report.models {
        println!(
            "  {:<9} width {:.6} -> {:.6}  peak {:.4} -> {:.4}  fidelity {:.6}  width violations {}  peak violations {}",
            m.model.as_str(),
            m.widths[0],
            m.widths[m.widths.len() - 1],
            m.peak_densities[0],
            m.peak_densities[m.peak_densities.len() - 1],
            m.final_fidelity,
            m.width_violations.len(),
            m.peak_violations.len(),
        );
    }
    for d in &report.deviations {
        println!(
            "  {} vs {}: max deviation {:.6e} (validity window), {:.6e} (whole run)",
            d.first, d.second, d.max_deviation, d.max_deviation_full
        );
    }
    println!("outputs in {}", cfg.output_dir.display());
    Ok(())
}

fn compare(cfg: &ScenarioConfig, names: &[String]) -> Result<()> {
    if names.len() != 2 {
        return Err(Error::InvalidInput(format!(
            "--models needs exactly two models, got {}",
            names.len()
        )));
    }
    let models = names
        .iter()
        .map(|n| ModelTag::parse_model(n))
        .collect::<Result<Vec<_>>>()?;
    let p = Prepared::new(cfg)?;
    let trajs = p.propagate_all(&models, cfg.samples, cfg.tol)?;
    let validity = p.validity_window()?;
    let report = diagnostics::compare_models(&trajs[0], &trajs[1], validity.window)?;
    println!(
        "{} vs {} (N = {}, validity window [{:.6e}, {:.6e}]{})",
        models[0],
        models[1],
        p.spec.levels,
        validity.window.start,
        validity.window.end,
        if validity.degenerate { ", degenerate" } else { "" }
    );
    println!(
        "max deviation: {:.6e} at t = {:.6e}",
        report.max_deviation, report.time_of_max
    );
    Ok(())
}

fn figure(cfg: &ScenarioConfig, model: &str, output: Option<&Path>) -> Result<()> {
    let model = ModelTag::parse_model(model)?;
    let p = Prepared::new(cfg)?;
    let traj = p.propagate(model, cfg.samples, cfg.tol)?;
    let prefix = match output {
        Some(path) => path.to_path_buf(),
        None => {
            std::fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::io(&cfg.output_dir, e))?;
            cfg.output_dir.join(format!("{model}_density"))
        }
    };
    let files = runner::emit_density_map(&traj, &p.spec, cfg.grid, &prefix)?;
    println!("{}", files.matrix.display());
    println!("{}", files.image.display());
    Ok(())
}

fn si_estimate(field: f64, charge: &str, length: f64, sigma_ratio: f64, x0_ratio: f64, mode: usize) -> Result<()> {
    let charge = match charge {
        "e" => ELEMENTARY_CHARGE,
        other => other
            .parse::<f64>()
            .map_err(|_| Error::InvalidInput(format!("charge must be `e` or a number, got `{other}`")))?,
    };
    if mode < 2 {
        return Err(Error::InvalidMode(mode));
    }
    let spec = WellSpec::internal(mode)?;
    let target = TargetSpec::new(sigma_ratio, x0_ratio, 1.0)?;
    let coefficients = targetgen::target_coefficients(&target, &spec)?;
    let couplings = CouplingMatrix::linear(&spec);
    let t = control::estimate_si_duration(field, charge, length, &coefficients, &couplings, mode)?;
    println!("a_{mode}^T = {:.10e}", coefficients.get(mode).re);
    println!("d_{mode},1 = {:.10e} m", couplings.ground(mode) * length);
    println!("T = {t:.6e} s");
    Ok(())
}
