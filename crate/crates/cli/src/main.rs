//! `nhtwist`: simulations, verification suites and parameter sweeps for
//! twist-deformed Newton-Hooke dynamics.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nhtwist_core::checks::Suite;
use nhtwist_core::deformations::{DeformationSpec, Family, Variant};
use nhtwist_core::integrator::Method;
use nhtwist_core::simulate::{ModelKind, OutputFormat, RunConfig};
use nhtwist_core::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "nhtwist", version, about, allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one trajectory and write it as CSV or JSON.
    Simulate(SimulateArgs),
    /// Run a verification suite over all deformation configurations or one.
    Check(CheckArgs),
    /// Run independent simulations over a parameter grid.
    Sweep(SweepArgs),
}

fn parse_with<T: std::str::FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn vec3(s: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, c] = parts[..] else {
        return Err(format!("expected three comma-separated numbers, got `{s}`"));
    };
    let num = |v: &str| v.parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Ok([num(a)?, num(b)?, num(c)?])
}

/// Deformation selection shared by every subcommand.
#[derive(Debug, Clone, Args)]
struct DeformationArgs {
    /// Deformation family, k1..k6.
    #[arg(long, value_parser = parse_with::<Family>)]
    family: Option<Family>,
    /// nh+, nh- or limit.
    #[arg(long, value_parser = parse_with::<Variant>, allow_hyphen_values = true)]
    variant: Option<Variant>,
    /// Deformation strength κ.
    #[arg(long)]
    kappa: Option<f64>,
    /// Cosmological time scale τ (Newton-Hooke variants).
    #[arg(long)]
    tau: Option<f64>,
}

/// Model, initial data and integration settings; each flag overrides the
/// matching field of `--config`.
#[derive(Debug, Clone, Args)]
struct RunArgs {
    /// JSON run configuration to start from.
    #[arg(long)]
    config: Option<PathBuf>,
    /// constant_force or oscillator.
    #[arg(long, value_parser = parse_with::<ModelKind>)]
    model: Option<ModelKind>,
    #[command(flatten)]
    deformation: DeformationArgs,
    /// Particle mass.
    #[arg(long)]
    m: Option<f64>,
    /// Oscillator frequency.
    #[arg(long)]
    omega: Option<f64>,
    /// Constant force F as x,y,z.
    #[arg(long, value_parser = vec3, allow_hyphen_values = true)]
    force: Option<[f64; 3]>,
    /// Initial position as x,y,z.
    #[arg(long, value_parser = vec3, allow_hyphen_values = true)]
    x0: Option<[f64; 3]>,
    /// Initial velocity as x,y,z.
    #[arg(long, value_parser = vec3, allow_hyphen_values = true)]
    v0: Option<[f64; 3]>,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Integration step.
    #[arg(long)]
    step: Option<f64>,
    /// Keep every n-th integration step in the output.
    #[arg(long)]
    record_every: Option<usize>,
    /// rk4 or rk4_halved (adds a per-sample error estimate).
    #[arg(long, value_parser = parse_with::<Method>)]
    method: Option<Method>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, value_parser = parse_with::<OutputFormat>)]
    format: Option<OutputFormat>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct SimulateArgs {
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct CheckArgs {
    /// brackets, jacobi, curl, limits or oracle.
    #[arg(long)]
    suite: String,
    /// Model used by the curl suite.
    #[arg(long, value_parser = parse_with::<ModelKind>)]
    model: Option<ModelKind>,
    /// Give both --family and --variant to check a single configuration.
    #[command(flatten)]
    deformation: DeformationArgs,
    /// Random points per configuration.
    #[arg(long)]
    samples: Option<usize>,
    /// Residual tolerance (suite default otherwise).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of the table.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct SweepArgs {
    /// Sweep file `{"base": <run config>, "grid": {...}}`, or a bare run
    /// configuration used as the base.
    #[arg(long = "grid-file")]
    grid_file: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated κ values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    kappas: Option<Vec<f64>>,
    /// Comma-separated τ values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    taus: Option<Vec<f64>>,
    /// Comma-separated variants.
    #[arg(long, value_delimiter = ',', value_parser = parse_with::<Variant>, allow_hyphen_values = true)]
    variants: Option<Vec<Variant>>,
    /// Comma-separated masses.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    masses: Option<Vec<f64>>,
    /// Comma-separated frequencies.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    omegas: Option<Vec<f64>>,
}

impl DeformationArgs {
    fn is_empty(&self) -> bool {
        self.family.is_none()
            && self.variant.is_none()
            && self.kappa.is_none()
            && self.tau.is_none()
    }

    fn apply(&self, spec: DeformationSpec) -> Result<DeformationSpec> {
        if self.is_empty() {
            return Ok(spec);
        }
        DeformationSpec::new(
            self.family.unwrap_or(spec.family()),
            self.variant.unwrap_or(spec.variant()),
            self.kappa.unwrap_or(spec.kappa()),
            self.tau.or(spec.tau()),
        )
    }
}

fn read_text(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))
}

impl RunArgs {
    fn apply(&self, mut cfg: RunConfig) -> Result<RunConfig> {
        if let Some(model) = self.model {
            cfg.model = model;
        }
        cfg.deformation = self.deformation.apply(cfg.deformation)?;
        if let Some(m) = self.m {
            cfg.params.m = m;
        }
        if self.omega.is_some() {
            cfg.params.omega = self.omega;
        }
        if self.force.is_some() {
            cfg.params.force = self.force;
        }
        if let Some(x0) = self.x0 {
            cfg.initial.x0 = x0;
        }
        if let Some(v0) = self.v0 {
            cfg.initial.v0 = v0;
        }
        let integration = &mut cfg.integration;
        if let Some(t0) = self.t0 {
            integration.t0 = t0;
        }
        if let Some(t_end) = self.t_end {
            integration.t_end = t_end;
        }
        if let Some(step) = self.step {
            integration.step = step;
        }
        if let Some(n) = self.record_every {
            integration.record_every = n;
        }
        if let Some(method) = self.method {
            integration.method = method;
        }
        if self.out.is_some() {
            cfg.output.path = self.out.clone();
        }
        if let Some(format) = self.format {
            cfg.output.format = format;
        }
        Ok(cfg)
    }

    fn resolve(&self) -> Result<RunConfig> {
        let base = match &self.config {
            Some(path) => RunConfig::from_json(&read_text(path)?)?,
            None => RunConfig::default(),
        };
        self.apply(base)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Check(args) => commands::check(args),
        Command::Sweep(args) => commands::sweep(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn parse_suite(name: &str) -> Result<Suite> {
    name.parse()
}
