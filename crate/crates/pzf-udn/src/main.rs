use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pzf_udn::config::{ExperimentSpec, Preset};
use pzf_udn::validate::{self, ValidateOptions};
use pzf_udn::{output, parallel, CliError, Result};

/// Success probability of partial zero-forcing receivers in Poisson networks.
#[derive(Debug, Parser)]
#[command(name = "pzf-udn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate methods along one grid axis (m, lambda or theta).
    Sweep(SpecArgs),
    /// Tabulate the best number of nulled interferers against density.
    OptimalM(SpecArgs),
    /// Run quick self-checks and print PASS/FAIL per check.
    Validate(ValidateArgs),
}

/// Flags override the config file, which overrides the preset.
#[derive(Debug, Args)]
struct SpecArgs {
    /// fig1l, fig1r, fig2, fig3 or fig4.
    #[arg(long)]
    preset: Option<String>,
    /// File of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<String>,
    /// Monte Carlo trials per point.
    #[arg(long)]
    trials: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Density in nodes/m², comma-separated for a grid.
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    rho0: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    r0: Option<String>,
    /// Antenna count; optimal-m accepts a list.
    #[arg(long)]
    nr: Option<String>,
    /// SIR threshold, comma-separated for a grid.
    #[arg(long)]
    theta: Option<String>,
    /// Nulled interferers, a list or `lo..=hi`.
    #[arg(long)]
    m: Option<String>,
    /// Subset of exact_m0, approx, upper_alzer, lower_jindal, mc_exact, mc_approx.
    #[arg(long)]
    methods: Option<String>,
    /// Expected interferer count in the simulation window.
    #[arg(long)]
    window_points: Option<String>,
    #[arg(long)]
    confidence: Option<String>,
    /// Sampler behind mc_exact: gamma_shortcut or exact.
    #[arg(long)]
    model: Option<String>,
    /// Append a wall-time column (output is then no longer reproducible).
    #[arg(long)]
    timing: bool,
}

impl SpecArgs {
    fn resolve(&self, default: Preset) -> Result<ExperimentSpec> {
        let preset = match &self.preset {
            Some(name) => name.parse()?,
            None => default,
        };
        let mut spec = preset.spec();
        if let Some(path) = &self.config {
            spec.apply_config_file(path)?;
        }
        let flags = [
            ("seed", &self.seed),
            ("trials", &self.trials),
            ("output_path", &self.output),
            ("output_format", &self.format),
            ("lambda_grid", &self.lambda),
            ("alpha", &self.alpha),
            ("rho0", &self.rho0),
            ("rho", &self.rho),
            ("r0", &self.r0),
            ("n_r", &self.nr),
            ("theta_grid", &self.theta),
            ("m_grid", &self.m),
            ("methods", &self.methods),
            ("window_points_target", &self.window_points),
            ("confidence_level", &self.confidence),
            ("model", &self.model),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                spec.set(key, v)?;
            }
        }
        spec.timing |= self.timing;
        Ok(spec)
    }
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, hide = true)]
    corrupt_kappa: Option<f64>,
}

fn run(cli: Cli) -> Result<()> {
    let pool = parallel::build_pool()?;
    match cli.command {
        Command::Sweep(args) => {
            let spec = args.resolve(Preset::Fig1Left)?;
            let rows = pool.install(|| pzf_udn::sweep::run_sweep(&spec))?;
            output::emit(&output::render_sweep(&rows, spec.output_format)?, spec.output_path.as_deref())
        }
        Command::OptimalM(args) => {
            let spec = args.resolve(Preset::Fig4)?;
            let rows = pool.install(|| pzf_udn::sweep::run_optimal_m(&spec))?;
            output::emit(&output::render_optimal(&rows, spec.output_format)?, spec.output_path.as_deref())
        }
        Command::Validate(args) => {
            if args.trials < 100 {
                return Err(CliError::usage("validate needs at least 100 trials"));
            }
            let opts = ValidateOptions {
                seed: args.seed,
                trials: args.trials,
                kappa_override: args.corrupt_kappa,
            };
            let checks = pool.install(|| validate::run_checks(&opts));
            for c in &checks {
                println!("{c}");
            }
            match checks.iter().find(|c| !c.passed) {
                Some(c) => Err(CliError::ValidationFailed(c.name.to_string())),
                None => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
