use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use nhtwist_core::checks::{run_check, CheckOptions, CheckReport};
use nhtwist_core::deformations::DeformationSpec;
use nhtwist_core::oscillator::classify_conservative;
use nhtwist_core::simulate::{simulate as run_simulation, ModelKind, OutputFormat, RunConfig};
use nhtwist_core::sweep::{run_sweep, write_rows_csv, SweepConfig, SweepGrid};
use nhtwist_core::{Error, Result};
use serde::Serialize;

use crate::{parse_suite, read_text, CheckArgs, SimulateArgs, SweepArgs};

/// Writes to `path`, or to stdout when there is none.
fn write_to<F>(path: Option<&Path>, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match path {
        Some(path) => {
            let mut out = BufWriter::new(File::create(path)?);
            body(&mut out)?;
            out.flush()?;
        }
        None => {
            let mut out = ClosablePipe {
                inner: io::stdout().lock(),
                closed: false,
            };
            body(&mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Stdout that drops further output once the reader goes away
/// (`nhtwist ... | head`), so a closed pipe ends the run normally.
struct ClosablePipe<W> {
    inner: W,
    closed: bool,
}

impl<W: Write> ClosablePipe<W> {
    fn absorb<T>(&mut self, result: io::Result<T>, fallback: T) -> io::Result<T> {
        match result {
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => {
                self.closed = true;
                Ok(fallback)
            }
            other => other,
        }
    }
}

impl<W: Write> Write for ClosablePipe<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        if self.closed {
            return Ok(buf.len());
        }
        let result = self.inner.write(buf);
        self.absorb(result, buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        if self.closed {
            return Ok(());
        }
        let result = self.inner.flush();
        self.absorb(result, ())
    }
}

fn print_stdout(text: &str) -> Result<()> {
    write_to(None, |out| Ok(out.write_all(text.as_bytes())?))
}

/// `<out>.meta.json` next to a data file.
fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    out.with_file_name(name)
}

#[derive(Serialize)]
struct Meta<'a, C: Serialize, S: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a C,
    summary: &'a S,
}

fn write_sidecar<C: Serialize, S: Serialize>(
    out: &Path,
    command: &'static str,
    config: &C,
    summary: &S,
) -> Result<()> {
    let meta = Meta {
        tool: "nhtwist",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config,
        summary,
    };
    let mut file = BufWriter::new(File::create(sidecar_path(out))?);
    serde_json::to_writer_pretty(&mut file, &meta)?;
    writeln!(file)?;
    file.flush()?;
    Ok(())
}

fn print_json<T: Serialize>(value: &T, to_stdout: bool) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    if to_stdout {
        print_stdout(&format!("{text}\n"))?;
    } else {
        eprintln!("{text}");
    }
    Ok(())
}

pub fn simulate(args: &SimulateArgs) -> Result<ExitCode> {
    let cfg = args.run.resolve()?;
    let outcome = run_simulation(&cfg)?;
    let path = cfg.output.path.as_deref();
    write_to(path, |out| match cfg.output.format {
        OutputFormat::Csv => outcome.trajectory.write_csv(out),
        OutputFormat::Json => {
            outcome.trajectory.write_json(&mut *out)?;
            writeln!(out)?;
            Ok(())
        }
    })?;
    for warning in &outcome.summary.warnings {
        eprintln!("warning: {warning}");
    }
    // keep stdout clean for data when no file is given
    print_json(&outcome.summary, path.is_some())?;
    if let Some(path) = path {
        write_sidecar(path, "simulate", &cfg, &outcome.summary)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn check_options(args: &CheckArgs) -> Result<CheckOptions> {
    let mut opts = CheckOptions::new(parse_suite(&args.suite)?);
    if let Some(model) = args.model {
        opts.model = model;
    }
    let d = &args.deformation;
    if let Some(kappa) = d.kappa {
        opts.kappa = kappa;
    }
    if let Some(tau) = d.tau {
        opts.tau = tau;
    }
    if let Some(samples) = args.samples {
        opts.samples = samples;
    }
    if let Some(tol) = args.tol {
        opts.tolerance = tol;
    }
    if let Some(seed) = args.seed {
        opts.seed = seed;
    }
    opts.only = match (d.family, d.variant) {
        (Some(family), Some(variant)) => Some(DeformationSpec::new(
            family,
            variant,
            opts.kappa,
            Some(opts.tau),
        )?),
        (None, None) => None,
        _ => {
            return Err(Error::config(
                "a single-configuration check needs both --family and --variant",
            ))
        }
    };
    Ok(opts)
}

fn print_table(report: &CheckReport) -> Result<()> {
    use std::fmt::Write as _;
    let mut text = String::new();
    for c in &report.configurations {
        let tag = if c.passed { "pass" } else { "FAIL" };
        let note = c
            .note
            .as_deref()
            .map(|n| format!("  ({n})"))
            .unwrap_or_default();
        let _ = writeln!(
            text,
            "{tag}  {:<32} max residual {:.3e}{note}",
            c.spec.to_string(),
            c.max_residual
        );
    }
    let passed = report.configurations.iter().filter(|c| c.passed).count();
    let scope = report.model.map(|m| format!(" [{m}]")).unwrap_or_default();
    let _ = writeln!(
        text,
        "{}{scope}: {passed} of {} configurations within {:e}",
        report.suite,
        report.configurations.len(),
        report.tolerance
    );
    if report.model == Some(ModelKind::Oscillator) {
        let agree = report
            .configurations
            .iter()
            .filter(|c| c.passed == classify_conservative(&c.spec))
            .count();
        let _ = writeln!(
            text,
            "curl vanishes exactly where f is constant: {agree} of {} configurations agree",
            report.configurations.len()
        );
    }
    print_stdout(&text)
}

pub fn check(args: &CheckArgs) -> Result<ExitCode> {
    let opts = check_options(args)?;
    let report = run_check(&opts)?;
    if args.json {
        print_json(&report, true)?;
    } else {
        print_table(&report)?;
    }
    if let Some(path) = &args.out {
        write_to(Some(path), |out| {
            serde_json::to_writer_pretty(&mut *out, &report)?;
            writeln!(out)?;
            Ok(())
        })?;
    }
    Ok(if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn sweep_config(args: &SweepArgs) -> Result<SweepConfig> {
    let mut sweep = match &args.grid_file {
        Some(path) => {
            let text = read_text(path)?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| Error::config(e.to_string()))?;
            if value.get("base").is_some() {
                serde_json::from_value(value).map_err(|e| Error::config(e.to_string()))?
            } else {
                SweepConfig {
                    base: RunConfig::from_json(&text)?,
                    grid: SweepGrid::default(),
                }
            }
        }
        None => SweepConfig {
            base: RunConfig::default(),
            grid: SweepGrid::default(),
        },
    };
    if let Some(path) = &args.run.config {
        sweep.base = RunConfig::from_json(&read_text(path)?)?;
    }
    sweep.base = args.run.apply(sweep.base)?;
    let grid = &mut sweep.grid;
    if let Some(v) = &args.kappas {
        grid.kappa = v.clone();
    }
    if let Some(v) = &args.taus {
        grid.tau = v.clone();
    }
    if let Some(v) = &args.variants {
        grid.variant = v.clone();
    }
    if let Some(v) = &args.masses {
        grid.m = v.clone();
    }
    if let Some(v) = &args.omegas {
        grid.omega = v.clone();
    }
    Ok(sweep)
}

#[derive(Serialize)]
struct SweepSummary {
    cells: usize,
    failed: usize,
}

pub fn sweep(args: &SweepArgs) -> Result<ExitCode> {
    let sweep = sweep_config(args)?;
    let cells = sweep.grid.cells(&sweep.base)?;
    let rows = run_sweep(&cells);
    let path = sweep.base.output.path.as_deref();
    write_to(path, |out| match sweep.base.output.format {
        OutputFormat::Csv => write_rows_csv(&rows, out),
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, &rows)?;
            writeln!(out)?;
            Ok(())
        }
    })?;
    let summary = SweepSummary {
        cells: rows.len(),
        failed: rows.iter().filter(|r| r.error.is_some()).count(),
    };
    if let Some(path) = path {
        write_sidecar(path, "sweep", &sweep, &summary)?;
    }
    eprintln!("sweep: {} cells, {} failed", summary.cells, summary.failed);
    if summary.failed == summary.cells {
        let first = rows[0].error.as_deref().unwrap_or("unknown error");
        eprintln!("error: every cell failed; first failure: {first}");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}
