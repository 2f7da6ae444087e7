use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sinemap::bench::{
    run_convergence_1d, run_table_3d, BenchCase1D, CaseKind, ConvergenceConfig, Density3DCase, ParityMode,
};
use sinemap::report::{emit_report, Format, ReportRow};
use sinemap::solvers::SolveOptions;
use sinemap::{selftest, Backend};

const EXIT_FAILURE: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;

enum Outcome {
    Success,
    NotConverged,
    ChecksFailed,
}

impl Outcome {
    fn converged(ok: bool) -> Self {
        if ok {
            Outcome::Success
        } else {
            Outcome::NotConverged
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "sinemap",
    version,
    about = "Mapped Fourier-sine spectral solvers: convergence studies and the 3D energy table"
)]
struct Cli {
    /// Run every loop sequentially instead of on the thread pool.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Max-norm error of the 1D screened solve against a known solution.
    Convergence1d(ConvergenceArgs),
    /// Hartree energy of the model density for a list of basis sizes.
    Table3d(TableArgs),
    /// Compare fast paths against brute-force references.
    Selftest,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum CaseArg {
    ExpOsc,
    Alg,
    AlgOsc,
}

impl From<CaseArg> for CaseKind {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::ExpOsc => CaseKind::ExpOsc,
            CaseArg::Alg => CaseKind::Alg,
            CaseArg::AlgOsc => CaseKind::AlgOsc,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ParityArg {
    /// Solve only for the modes the case's symmetry allows.
    Auto,
    Full,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave the wall_time_s column empty so repeated runs are byte-identical.
    #[arg(long)]
    omit_timing: bool,
}

#[derive(Args, Debug)]
struct ConvergenceArgs {
    #[arg(long, value_enum)]
    case: CaseArg,
    /// Oscillation wavenumber (exp-osc, alg-osc).
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    k: f64,
    /// Algebraic decay exponent (alg, alg-osc).
    #[arg(long, default_value_t = 2.0)]
    h: f64,
    /// Screening constant in -u'' + gamma u = f.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    gamma: f64,
    /// Comma-separated, strictly ascending basis sizes.
    #[arg(long, value_delimiter = ',', default_value = "16,32,64,128,256")]
    n: Vec<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    parity: ParityArg,
    /// Error sample points, uniform in the mapped coordinate.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct TableArgs {
    /// Screening constant k² in -∇²V + k²V = 4πρ (0 or 1).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    ksq: f64,
    /// Accept k² other than 0 or 1, e.g. the indefinite k² = -1.
    #[arg(long)]
    allow_indefinite: bool,
    /// Comma-separated basis sizes per axis.
    #[arg(long, value_delimiter = ',', default_value = "15,25,37")]
    n: Vec<usize>,
    /// Relative residual tolerance of the iterative solve.
    #[arg(long, default_value = "1e-12")]
    tol: f64,
    /// Iteration cap per solve [default: 100 N].
    #[arg(long)]
    max_iter: Option<usize>,
    /// Diagonal (Jacobi) preconditioning.
    #[arg(long)]
    jacobi: bool,
    #[command(flatten)]
    output: OutputArgs,
}

fn finish(rows: Vec<ReportRow>, output: &OutputArgs) -> anyhow::Result<()> {
    let rows: Vec<ReportRow> =
        if output.omit_timing { rows.into_iter().map(ReportRow::without_timing).collect() } else { rows };
    emit_report(&rows, output.format.into(), output.out.as_deref())?;
    Ok(())
}

fn convergence(args: &ConvergenceArgs, backend: Backend) -> anyhow::Result<Outcome> {
    let case = BenchCase1D::new(args.case.into(), args.k, args.h, args.gamma)?;
    let cfg = ConvergenceConfig {
        samples: args.samples,
        parity: match args.parity {
            ParityArg::Auto => ParityMode::Restricted,
            ParityArg::Full => ParityMode::Full,
        },
        quad_points: None,
        backend,
    };
    let records = run_convergence_1d(&case, &args.n, &cfg)?;
    let mut ok = true;
    for r in records.iter().filter(|r| r.max_norm_error.is_nan()) {
        eprintln!("warning: {} N={} solve failed", r.case, r.n);
        ok = false;
    }
    finish(records.iter().map(ReportRow::from_convergence).collect(), &args.output)?;
    Ok(Outcome::converged(ok))
}

fn table(args: &TableArgs, backend: Backend) -> anyhow::Result<Outcome> {
    if !args.allow_indefinite && args.ksq != 0.0 && args.ksq != 1.0 {
        bail!("--ksq must be 0 or 1 (pass --allow-indefinite for other values), got {}", args.ksq);
    }
    let case = Density3DCase::new(args.ksq)?;
    let opts = SolveOptions { tol: args.tol, max_iter: args.max_iter, jacobi: args.jacobi, backend };
    let rows = run_table_3d(&case, &args.n, &opts)?;
    let mut ok = true;
    for r in rows.iter().filter(|r| !r.report.converged) {
        eprintln!(
            "warning: N={} converged=false after {} iterations, relative residual {:.3e}",
            r.n, r.report.iterations, r.report.residual_norm
        );
        ok = false;
    }
    finish(rows.iter().map(|r| ReportRow::from_table(args.ksq, r)).collect(), &args.output)?;
    Ok(Outcome::converged(ok))
}

fn run_selftest() -> anyhow::Result<Outcome> {
    let checks = selftest::run_all().context("self-test aborted")?;
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    println!("{} checks, {} failed", checks.len(), failed);
    Ok(if failed == 0 { Outcome::Success } else { Outcome::ChecksFailed })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version go to stdout with success; everything else is a usage error.
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_FAILURE) } else { ExitCode::SUCCESS };
        }
    };
    let backend = if cli.sequential { Backend::Sequential } else { Backend::default() };
    let result = match &cli.command {
        Command::Convergence1d(a) => convergence(a, backend),
        Command::Table3d(a) => table(a, backend),
        Command::Selftest => run_selftest(),
    };
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::NotConverged) => ExitCode::from(EXIT_NOT_CONVERGED),
        Ok(Outcome::ChecksFailed) => ExitCode::from(EXIT_FAILURE),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
