//! Command-line front end for `gramlab`.
//!
//! Exit codes: 0 success, 2 invalid input (including I/O failures),
//! 3 numerical failure, 4 synthesized control failed verification.

pub mod args;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;
use gramlab::OscillatorParams;

use args::{AnalyzeArgs, Cli, Command, Format, HorizonArg, ParamArgs, SweepArgs, SynthesizeArgs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Core(gramlab::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Io(_) => EXIT_VALIDATION,
            Failure::Core(e) if e.is_validation() => EXIT_VALIDATION,
            Failure::Core(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Io(m) => f.write_str(m),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<gramlab::Error> for Failure {
    fn from(e: gramlab::Error) -> Self {
        Failure::Core(e)
    }
}

fn resolve_params(p: &ParamArgs) -> Result<OscillatorParams, Failure> {
    match (p.zeta, p.omega_n, p.m, p.c, p.k) {
        (Some(z), Some(w), None, None, None) => Ok(OscillatorParams::new(z, w)?),
        (None, None, Some(m), Some(c), Some(k)) => Ok(OscillatorParams::from_physical(m, c, k)?),
        _ => Err(Failure::Usage(
            "give either --zeta and --omega-n, or all of --m, --c and --k".into(),
        )),
    }
}

fn write_output(body: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, body).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(body.as_bytes())
            .map_err(|e| Failure::Io(format!("cannot write output: {e}"))),
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn cmd_analyze(a: &AnalyzeArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let params = resolve_params(&a.params)?;
    let r = report::analyze(&params, a.horizon, a.entropy.duality, a.entropy.kb)?;
    let body = match a.format {
        Format::Json => json(&r),
        Format::Csv => format!("{}\n{}\n", report::csv_header(), report::csv_row(&r)),
        Format::Text => report::text(&r),
    };
    write_output(&body, a.out.as_deref(), stdout)?;
    Ok(EXIT_OK)
}

#[derive(serde::Serialize)]
struct SweepJson<'a> {
    schema_version: u32,
    rows: &'a [report::AnalysisReport],
}

fn axis(grid: &Option<args::List>, single: Option<f64>, name: &str) -> Result<Vec<f64>, Failure> {
    match (grid, single) {
        (Some(g), None) => Ok(g.0.clone()),
        (None, Some(v)) => Ok(vec![v]),
        (Some(_), Some(_)) => Err(Failure::Usage(format!("give either --{name}-grid or --{name}, not both"))),
        (None, None) => Err(Failure::Usage(format!("missing --{name}-grid or --{name}"))),
    }
}

fn cmd_sweep(a: &SweepArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    if a.zeta_grid.is_none() && a.omega_n_grid.is_none() && a.t_grid.is_none() {
        return Err(Failure::Usage(
            "sweep needs at least one of --zeta-grid, --omega-n-grid, --t-grid".into(),
        ));
    }
    let zetas = axis(&a.zeta_grid, a.zeta, "zeta")?;
    let omegas = axis(&a.omega_n_grid, a.omega_n, "omega-n")?;
    let horizons: Vec<HorizonArg> = match &a.t_grid {
        Some(ts) => ts.0.iter().map(|&t| HorizonArg::Finite(t)).collect(),
        None => vec![a.horizon],
    };

    let mut reports = Vec::with_capacity(zetas.len() * omegas.len() * horizons.len());
    for &z in &zetas {
        for &w in &omegas {
            let params = OscillatorParams::new(z, w)?;
            for &h in &horizons {
                reports.push(report::analyze(&params, h, a.entropy.duality, a.entropy.kb)?);
            }
        }
    }

    let body = match a.format {
        Format::Csv => {
            let mut s = report::csv_header();
            s.push('\n');
            for r in &reports {
                s.push_str(&report::csv_row(r));
                s.push('\n');
            }
            s
        }
        Format::Json => json(&SweepJson {
            schema_version: report::SCHEMA_VERSION,
            rows: &reports,
        }),
        Format::Text => reports.iter().map(report::text).collect::<Vec<_>>().join("\n"),
    };
    write_output(&body, a.out.as_deref(), stdout)?;
    Ok(EXIT_OK)
}

fn cmd_synthesize(a: &SynthesizeArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let params = resolve_params(&a.params)?;
    let mut s = report::synthesize(&params, a.t, &a.xf.0, a.steps)?;
    let profile = report::profile_csv(&s.times, &s.inputs);
    if let Some(path) = &a.out {
        write_output(&profile, Some(path), stdout)?;
        s.report.profile_path = Some(path.display().to_string());
    }
    let body = match a.format {
        Format::Json => json(&s.report),
        Format::Text => report::synthesis_text(&s.report),
        Format::Csv => profile,
    };
    write_output(&body, None, stdout)?;
    Ok(if s.report.verified { EXIT_OK } else { EXIT_VERIFICATION })
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code. Diagnostics go to `stderr` as a single line.
pub fn run<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let rendered = e.render().to_string();
                    let line = rendered.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
                    let _ = writeln!(stderr, "{line}");
                    EXIT_VALIDATION
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Analyze(a) => cmd_analyze(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, stdout),
        Command::Synthesize(a) => cmd_synthesize(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {f}");
            f.exit_code()
        }
    }
}
