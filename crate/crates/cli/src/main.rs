use std::path::{Path, PathBuf};
use std::process::ExitCode;

use caustics_core::experiments::{self, Overrides, Preset, RunOutput};
use caustics_core::{Error, Result, SplitScheme};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "caustics", version, about = "Semiclassical NLS caustic experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Output directory; each run writes into its own subdirectory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// JSON document with preset overrides.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Registered preset to start from.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long, value_parser = parse_scheme)]
    scheme: Option<SplitScheme>,
    /// Worker threads for sweeps.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Focal point run (ε = 1/150, N = 1024, σ = 2, T = 2).
    Focal {
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Scattering sandwich on [-100π, 100π) with T = 55.
    Scatter {
        #[arg(long)]
        sigma: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Cusp run (ε = 1/150, N = 4096, σ = 4, T = 3.5).
    Cusp {
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Lie/Strang self-convergence ladder.
    Converge {
        #[command(flatten)]
        common: Common,
    },
    /// ε-ladder for the u - v error exponent.
    Lemma3 {
        #[command(flatten)]
        common: Common,
    },
    /// Alias folding, band-limited exactness and truncation tails.
    Alias {
        #[command(flatten)]
        common: Common,
    },
    /// Print the registered presets as JSON lines.
    ListPresets,
}

fn parse_scheme(s: &str) -> std::result::Result<SplitScheme, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Serialize)]
struct Done<'a, R> {
    status: &'static str,
    name: &'a str,
    dir: &'a Path,
    mass_drift: f64,
    results: &'a R,
}

fn report<R: Serialize>(out: RunOutput<R>) -> Result<()> {
    let line = Done {
        status: "ok",
        name: &out.metadata.name,
        dir: &out.dir,
        mass_drift: out.metadata.mass_drift,
        results: out.results(),
    };
    println!("{}", serde_json::to_string(&line)?);
    Ok(())
}

impl Common {
    fn overrides(&self) -> Result<Overrides> {
        let file = match &self.config {
            Some(path) => Overrides::from_json_file(path)?,
            None => Overrides::default(),
        };
        let flags = Overrides {
            preset: self.preset.clone(),
            dt: self.dt,
            num_points: self.modes,
            scheme: self.scheme,
            ..Default::default()
        };
        Ok(file.merged_with(flags))
    }

    fn resolve(&self, cli: Overrides, fallback: impl FnOnce() -> Result<Preset>) -> Result<Preset> {
        self.overrides()?.merged_with(cli).resolve(fallback)
    }

    fn setup_pool(&self) -> Result<()> {
        if let Some(n) = self.jobs {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global()
                .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
        }
        Ok(())
    }

    /// Sweeps have fixed ladders; only the output directory and jobs apply.
    fn reject_overrides(&self, command: &str) -> Result<()> {
        if self.config.is_some() || self.preset.is_some() || self.dt.is_some() || self.modes.is_some() || self.scheme.is_some() {
            return Err(Error::InvalidParams(format!("'{command}' runs a fixed ladder and takes no preset overrides")));
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Focal { alpha, common } => {
            common.setup_pool()?;
            let flags = Overrides {
                alpha: Some(alpha),
                ..Default::default()
            };
            let preset = common.resolve(flags, || Preset::focal(alpha))?;
            report(experiments::run_focal_preset(&preset, &common.out)?)
        }
        Command::Cusp { alpha, common } => {
            common.setup_pool()?;
            let flags = Overrides {
                alpha: Some(alpha),
                ..Default::default()
            };
            let preset = common.resolve(flags, || Preset::cusp(alpha))?;
            report(experiments::run_cusp_preset(&preset, &common.out)?)
        }
        Command::Scatter { sigma, lambda, common } => {
            common.setup_pool()?;
            let flags = Overrides {
                sigma: Some(sigma),
                lambda: Some(lambda),
                ..Default::default()
            };
            let preset = common.resolve(flags, || Preset::scatter(sigma, lambda))?;
            report(experiments::run_scatter_preset(&preset, &common.out)?)
        }
        Command::Converge { common } => {
            common.reject_overrides("converge")?;
            common.setup_pool()?;
            report(experiments::run_convergence(&common.out)?)
        }
        Command::Lemma3 { common } => {
            common.reject_overrides("lemma3")?;
            common.setup_pool()?;
            report(experiments::run_lemma3_scaling(&common.out)?)
        }
        Command::Alias { common } => {
            common.reject_overrides("alias")?;
            common.setup_pool()?;
            report(experiments::run_alias_check(&common.out)?)
        }
        Command::ListPresets => {
            for p in experiments::registered_presets() {
                println!("{}", serde_json::to_string(&p)?);
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Failure {
    status: &'static str,
    kind: &'static str,
    message: String,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = Failure {
                status: "error",
                kind: e.kind(),
                message: e.to_string(),
            };
            eprintln!("{}", serde_json::to_string(&line).unwrap_or_else(|_| e.to_string()));
            ExitCode::from(match e {
                Error::BlowUp { .. } => 3,
                Error::BoundaryLeak { .. } => 4,
                Error::MassDrift { .. } => 5,
                _ => 2,
            })
        }
    }
}
