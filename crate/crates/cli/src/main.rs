//! `dgg-kit`: heat kernel and curvature checks on weighted graphs from the
//! command line.
//!
//! Exit status is 0 when the check passes, 1 when it fails (the report is still
//! written) and 2 on usage or data errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dggkit::report::VerificationReport;

use commands::*;

#[derive(Parser, Debug)]
#[command(name = "dgg-kit", version, about = "Heat kernel bounds, curvature and spectral estimates on measured weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Vertex and edge counts, measures and the structural constants D_m, D_μ
    Info(InfoArgs),
    /// Eigenvalues of the (Dirichlet) Laplacian
    Spectrum(SpectrumArgs),
    /// Dirichlet heat kernel p_t(x, y) over a time grid
    Heat(HeatArgs),
    /// Legendre associate ζ(t, d) = max over λ ≥ 0 of dλ - (cosh λ - 1)t
    Zeta(ZetaArgs),
    /// Bakry-Émery curvature-dimension certificates CD(n,K) / CDE(n,K) by multistart search
    Curvature(CurvatureArgs),
    /// Davies-Gaffney-Grigor'yan lemma: heat flow between two sets against its off-diagonal bound
    DggVerify(DggArgs),
    /// Integral maximum principle behind the Davies-Gaffney-Grigor'yan lemma: monotone weighted energy
    ImpMonitor(ImpArgs),
    /// Eigenvalue upper bound from the Davies-Gaffney-Grigor'yan lemma, λ_k ≤ (D_m/δ) max L/h(2L/δ)
    Eigenbound(EigenArgs),
    /// Diameter bound from the eigenvalue estimate, in terms of λ₂
    Diameter(DiameterArgs),
    /// Isoperimetric bound from the eigenvalue estimate: lower bound on m(N_r(U))
    Isoperimetric(IsoArgs),
    /// Mixing towards 1/m(V) at rate e^{-λ₂t}: monotone spectral quantities
    Mixing(MixingArgs),
    /// Li-Yau gradient estimate for a positive heat solution under CDE(n,K) evidence
    Liyau(LiYauArgs),
    /// Harnack inequality from the Li-Yau gradient estimate, over vertex pairs
    Harnack(HarnackArgs),
    /// Cheng eigenvalue estimate: bottom of the spectrum μ ≤ Kn on a ball exhaustion
    Cheng(ChengArgs),
    /// Gaussian heat kernel upper bound: fitted (C₂, C₁) frontier and its time-refinement stability
    GaussianFit(GaussianArgs),
}

/// A usage error or a failure of the library on the given data.
#[derive(Debug)]
pub struct Failure(String);

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

impl From<dggkit::Error> for Failure {
    fn from(e: dggkit::Error) -> Self {
        Self(e.to_string())
    }
}

/// What a command produced.
pub struct Outcome {
    pub json: String,
    /// Plot-ready table, when the command has one.
    pub csv: Option<Vec<Vec<String>>>,
    /// Plain text printed when no format is requested.
    pub text: Option<String>,
    pub pass: bool,
    pub summary: String,
}

impl Outcome {
    pub fn data(json: serde_json::Value, csv: Option<Vec<Vec<String>>>, pass: bool, summary: String) -> Self {
        let json = serde_json::to_string_pretty(&json).expect("value serializes");
        Self { json, csv, text: None, pass, summary }
    }

    pub fn report(r: &VerificationReport) -> Self {
        let mut rows = vec![vec!["t".to_owned(), "margin".to_owned()]];
        rows.extend(r.grid.iter().zip(&r.margins).map(|(t, m)| vec![t.to_string(), m.to_string()]));
        Self {
            json: r.to_json(),
            csv: Some(rows),
            text: None,
            pass: r.pass,
            summary: format!(
                "{}: {} (worst margin {:e} at {})",
                r.check,
                serde_json::to_value(r.status).expect("status serializes").as_str().unwrap_or("?"),
                r.worst.value,
                r.worst.t
            ),
        }
    }
}

fn render(outcome: &Outcome, format: Option<Format>) -> Result<String, Failure> {
    match format {
        None if outcome.text.is_some() => Ok(outcome.text.clone().unwrap_or_default()),
        None | Some(Format::Json) => Ok(outcome.json.clone() + "\n"),
        Some(Format::Csv) => {
            let rows = outcome.csv.as_ref().ok_or_else(|| Failure::usage("this command has no CSV output"))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.write_record(row).map_err(|e| Failure::usage(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::usage(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("DGG_KIT_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("DGG_KIT_THREADS must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(Failure::usage("DGG_KIT_THREADS must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::usage(e.to_string()))?;
    }
    Ok(())
}

fn dispatch(command: &Command) -> Result<Outcome, Failure> {
    match command {
        Command::Info(a) => info(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Heat(a) => heat(a),
        Command::Zeta(a) => zeta(a),
        Command::Curvature(a) => curvature(a),
        Command::DggVerify(a) => dgg_verify(a),
        Command::ImpMonitor(a) => imp_monitor(a),
        Command::Eigenbound(a) => eigenbound(a),
        Command::Diameter(a) => diameter(a),
        Command::Isoperimetric(a) => isoperimetric(a),
        Command::Mixing(a) => mixing(a),
        Command::Liyau(a) => liyau(a),
        Command::Harnack(a) => harnack(a),
        Command::Cheng(a) => cheng(a),
        Command::GaussianFit(a) => gaussian_fit(a),
    }
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    configure_threads()?;
    let outcome = dispatch(&cli.command)?;
    let body = render(&outcome, cli.format)?;
    match &cli.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes()).map_err(|e| Failure::usage(e.to_string()))?;
        }
    }
    eprintln!("{}", outcome.summary);
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
