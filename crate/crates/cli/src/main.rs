//! `triprod <experiment> [flags]`: runs one verification experiment and
//! writes its report as CSV or JSON.
//!
//! Exit status: 0 when every row passes, 1 when some row fails, 2 on a
//! configuration or evaluation error.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use triprod::harness::{self, ConfigPatch, Experiment, Family, Format, Report};

#[derive(Parser)]
#[command(name = "triprod", version, about = "Verification experiments for invariant trilinear functionals")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Invariance of the functional under simultaneous random action.
    Invariance(Common),
    /// max over z of |I_λ(z)|, minimized over the λ-grid, across T.
    Lowerbound(Common),
    /// Kernel phase against the linear model; K/K' phase separation.
    Phase(Common),
    /// Moment residuals of the moment-matched test vector.
    Moments(Common),
    /// Test-vector integrals and norms across T.
    Norms(Common),
    /// Decay of the K-type values in |λ|.
    KtypeDecay(Common),
    /// Scan of the companion offset M.
    ChooseM(Common),
}

#[derive(Args)]
struct Common {
    /// Comma-separated list of T.
    #[arg(long = "T", value_delimiter = ',')]
    t: Option<Vec<f64>>,
    /// Even weight(s) k.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<i64>>,
    /// Number of λ-grid points.
    #[arg(long = "lambda-grid")]
    lambda_grid: Option<usize>,
    /// Lower end of the λ-grid as a multiple of T (0: grid T·j/n, j = 1..n).
    #[arg(long)]
    lambda_lo: Option<f64>,
    /// Upper end of the λ-grid as a multiple of T.
    #[arg(long)]
    lambda_hi: Option<f64>,
    /// Explicit |λ| values (invariance, ktype-decay).
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<f64>>,
    /// `discrete` or `maass`.
    #[arg(long)]
    family: Option<String>,
    /// Parity of the third representation.
    #[arg(long)]
    eps: Option<u8>,
    /// Im τ of the first slot (maass family).
    #[arg(long)]
    tau: Option<f64>,
    /// Im τ' of the second slot (maass family).
    #[arg(long)]
    tau_p: Option<f64>,
    #[arg(long)]
    z_min: Option<f64>,
    #[arg(long)]
    z_max: Option<f64>,
    #[arg(long)]
    z_points: Option<usize>,
    /// Companion offset(s); several values are scanned.
    #[arg(long = "M", value_delimiter = ',')]
    m: Option<Vec<f64>>,
    #[arg(long)]
    tol: Option<f64>,
    /// Number of random group elements.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// `csv` or `json`.
    #[arg(long)]
    format: Option<String>,
    /// JSON config file; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Common {
    fn patch(&self) -> Result<ConfigPatch, String> {
        let family = self.family.as_deref().map(str::parse::<Family>).transpose().map_err(|e| e.to_string())?;
        let format = self.format.as_deref().map(str::parse::<Format>).transpose().map_err(|e| e.to_string())?;
        Ok(ConfigPatch {
            family,
            t_list: self.t.clone(),
            k_list: self.k.clone(),
            eps: self.eps,
            lambda_count: self.lambda_grid,
            lambda_lo: self.lambda_lo,
            lambda_hi: self.lambda_hi,
            lambdas: self.lambdas.clone(),
            tau: self.tau,
            tau_p: self.tau_p,
            m_list: self.m.clone(),
            z_min: self.z_min,
            z_max: self.z_max,
            z_points: self.z_points,
            tol: self.tol,
            samples: self.samples,
            seed: self.seed,
            out: self.out.clone(),
            format,
        })
    }
}

fn load_config(path: &PathBuf) -> Result<ConfigPatch, String> {
    let file = File::open(path).map_err(|e| format!("cannot open {}: {e}", path.display()))?;
    serde_json::from_reader(file).map_err(|e| format!("bad config {}: {e}", path.display()))
}

fn write_report(report: &Report, format: Format, out: &mut dyn Write) -> Result<(), String> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, report).map_err(|e| e.to_string())?;
            writeln!(out).map_err(|e| e.to_string())
        }
        Format::Csv => {
            let (header, rows) = report.table();
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&header).map_err(|e| e.to_string())?;
            for r in rows {
                w.write_record(&r).map_err(|e| e.to_string())?;
            }
            w.flush().map_err(|e| e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, common) = match &cli.cmd {
        Cmd::Invariance(c) => (Experiment::Invariance, c),
        Cmd::Lowerbound(c) => (Experiment::Lowerbound, c),
        Cmd::Phase(c) => (Experiment::Phase, c),
        Cmd::Moments(c) => (Experiment::Moments, c),
        Cmd::Norms(c) => (Experiment::Norms, c),
        Cmd::KtypeDecay(c) => (Experiment::KtypeDecay, c),
        Cmd::ChooseM(c) => (Experiment::ChooseM, c),
    };
    let setup = || -> Result<_, String> {
        let file = common.config.as_ref().map(load_config).transpose()?;
        harness::resolve(experiment, file.as_ref(), &common.patch()?).map_err(|e| e.to_string())
    };
    let cfg = match setup() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match harness::run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {experiment}: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match &cfg.out {
        Some(path) => File::create(path)
            .map_err(|e| format!("cannot create {}: {e}", path.display()))
            .and_then(|mut f| write_report(&report, cfg.format, &mut f)),
        None => write_report(&report, cfg.format, &mut io::stdout().lock()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let failing = report.failures().count();
    let unconverged = report.rows.iter().filter(|r| !r.converged).count();
    if unconverged > 0 {
        eprintln!("note: {unconverged} row(s) missed the requested quadrature tolerance");
    }
    eprintln!(
        "{experiment}: {} ({} rows, {failing} failing)",
        if report.pass { "PASS" } else { "FAIL" },
        report.rows.len()
    );
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
