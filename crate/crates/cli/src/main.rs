//! `chimat` command-line front end. Every subcommand reads flags and files,
//! calls into the `chimat` library, and writes the result.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chimat::analysis::sparsity_report;
use chimat::basis::{gell_mann_basis, pauli_tensor_basis, BasisKind};
use chimat::channel::ChiConvention;
use chimat::document::{AnalysisInput, ChannelDocument, Representation};
use chimat::montecarlo::{export_histogram, run_histogram_with, ExportFormat, Parallelism, SimulationConfig};
use chimat::verify::verify_channel;
use chimat::{Basis, Error};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "chimat", version, about = "Quantum channel representations and chi-matrix sparsity experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print operator basis metadata and optionally dump the elements.
    Basis(BasisArgs),
    /// Convert a channel document to another representation.
    Convert(ConvertArgs),
    /// Sparsity, rank and distinct-entry statistics of a matrix or channel.
    Analyze(AnalyzeArgs),
    /// Round-trip and equivalence checks on a channel document.
    Verify(VerifyArgs),
    /// Monte Carlo histogram of distinct chi entries for sparse Kraus sets.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Pauli,
    Gellmann,
}

impl From<KindArg> for BasisKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Pauli => BasisKind::PauliTensor,
            KindArg::Gellmann => BasisKind::GellMann,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Trace,
    Ortho,
}

impl From<ConventionArg> for ChiConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Trace => ChiConvention::TraceCoefficient,
            ConventionArg::Ortho => ChiConvention::Orthonormal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RepresentationArg {
    Dynamical,
    Kraus,
    Chi,
}

impl From<RepresentationArg> for Representation {
    fn from(r: RepresentationArg) -> Self {
        match r {
            RepresentationArg::Dynamical => Representation::Dynamical,
            RepresentationArg::Kraus => Representation::Kraus,
            RepresentationArg::Chi => Representation::Chi,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Svg,
}

impl From<FormatArg> for ExportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => ExportFormat::Csv,
            FormatArg::Json => ExportFormat::Json,
            FormatArg::Svg => ExportFormat::Svg,
        }
    }
}

#[derive(Args)]
struct BasisArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Number of qubits (Pauli tensor basis).
    #[arg(long, required_if_eq("kind", "pauli"))]
    qubits: Option<usize>,
    /// Hilbert-space dimension (Gell-Mann basis).
    #[arg(long, required_if_eq("kind", "gellmann"))]
    dim: Option<usize>,
    /// Write the elements as a JSON list of matrices.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    to: RepresentationArg,
    /// Basis for chi output; defaults to the input's own basis, else Pauli
    /// for power-of-two dimensions and Gell-Mann otherwise.
    #[arg(long, value_enum)]
    basis: Option<KindArg>,
    #[arg(long, value_enum, default_value = "trace")]
    convention: ConventionArg,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// A bare matrix or a channel document. Channels are analyzed through
    /// their chi matrix.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    basis: Option<KindArg>,
    #[arg(long, value_enum, default_value = "trace")]
    convention: ConventionArg,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Print the report as JSON instead of a table.
    #[arg(long)]
    json: bool,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random density matrices for the equivalence check.
    #[arg(long, default_value_t = 10)]
    states: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 8)]
    dim: usize,
    /// Kraus operators per channel.
    #[arg(long, default_value_t = 3)]
    rank: usize,
    /// Nonzero entries per Kraus operator.
    #[arg(long, default_value_t = 3)]
    nnz: usize,
    #[arg(long, default_value_t = 10_000)]
    realizations: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, value_enum, default_value = "pauli")]
    basis: KindArg,
    #[arg(long, value_enum, default_value = "trace")]
    convention: ConventionArg,
    /// Count zero as a distinct value.
    #[arg(long)]
    include_zero: bool,
    #[arg(long, default_value_t = 1_000_000)]
    max_rejections: u64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Worker threads; 0 uses every core. The output does not depend on it.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

enum Failure {
    Io { path: PathBuf, err: io::Error },
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io { .. } => 2,
            Failure::Lib(e) => match e {
                Error::InvalidConfig(_) => 1,
                Error::Format(_) => 2,
                Error::EnsembleExhausted { .. } => 4,
                _ => 3,
            },
        }
    }

    fn to_json(&self) -> serde_json::Value {
        let code = self.exit_code();
        match self {
            Failure::Io { path, err } => json!({
                "error": "io",
                "exit_code": code,
                "path": path.display().to_string(),
                "message": err.to_string(),
            }),
            Failure::Lib(Error::EnsembleExhausted {
                realization,
                attempts,
                reason,
            }) => json!({
                "error": "ensemble_exhausted",
                "exit_code": code,
                "realization": realization,
                "attempts": attempts,
                "reason": reason,
                "message": self.message(),
            }),
            Failure::Lib(e) => json!({
                "error": error_kind(e),
                "exit_code": code,
                "message": e.to_string(),
            }),
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io { path, err } => format!("{}: {err}", path.display()),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Dimension(_) => "dimension",
        Error::NotHermitian { .. } => "not_hermitian",
        Error::SizeCap { .. } => "size_cap",
        Error::NotCompletelyPositive { .. } => "not_completely_positive",
        Error::Convention(_) => "convention",
        Error::Domain(_) => "domain",
        Error::InvalidConfig(_) => "invalid_config",
        Error::EnsembleExhausted { .. } => "ensemble_exhausted",
        Error::Format(_) => "format",
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|err| Failure::Io {
        path: path.to_owned(),
        err,
    })
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|err| Failure::Io {
            path: path.to_owned(),
            err,
        }),
        None => io::stdout().write_all(bytes).map_err(|err| Failure::Io {
            path: PathBuf::from("<stdout>"),
            err,
        }),
    }
}

fn basis(args: BasisArgs) -> Result<(), Failure> {
    let b: Basis = match args.kind {
        KindArg::Pauli => pauli_tensor_basis(args.qubits.expect("clap enforces --qubits"))?,
        KindArg::Gellmann => gell_mann_basis(args.dim.expect("clap enforces --dim"))?,
    };
    let t = b.normalization();
    let gram = b.gram();
    let expected = chimat::Matrix::identity(b.len()).scale_real(t);
    println!("kind: {}", b.kind());
    println!("dimension: {}", b.dim());
    println!("elements: {}", b.len());
    println!("normalization tr(l_i^dagger l_j) = {t} delta_ij");
    println!("max Gram deviation: {:.3e}", gram.max_abs_diff(&expected)?);
    if let Some(path) = args.dump {
        let mut text = serde_json::to_string_pretty(b.elements()).expect("matrices serialize");
        text.push('\n');
        emit(Some(&path), text.as_bytes())?;
    }
    Ok(())
}

fn load_document(path: &Path) -> Result<ChannelDocument, Failure> {
    Ok(ChannelDocument::from_json(&read(path)?)?)
}

fn convert(args: ConvertArgs) -> Result<(), Failure> {
    let channel = load_document(&args.input)?.to_channel()?;
    let kind = args.basis.map(BasisKind::from).unwrap_or_else(|| match &channel {
        chimat::document::Channel::Chi(c) => c.basis_kind(),
        other => BasisKind::default_for(other.dim()),
    });
    let converted = channel.convert(args.to.into(), kind, args.convention.into(), args.tol)?;
    let doc = ChannelDocument::from_channel(&converted);
    emit(args.out.as_deref(), doc.to_json().as_bytes())
}

fn analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let matrix = match AnalysisInput::from_json(&read(&args.input)?)? {
        AnalysisInput::Matrix(m) => m,
        AnalysisInput::Channel(doc) => {
            let channel = doc.to_channel()?;
            let kind = args
                .basis
                .map(BasisKind::from)
                .or(doc.basis_kind)
                .unwrap_or_else(|| BasisKind::default_for(channel.dim()));
            channel.to_chi(kind, args.convention.into(), args.tol)?.matrix().clone()
        }
    };
    let report = sparsity_report(&matrix, args.tol);
    let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
    text.push('\n');
    if let Some(path) = &args.out {
        emit(Some(path), text.as_bytes())?;
    }
    if args.json {
        emit(None, text.as_bytes())
    } else {
        emit(None, report.render().as_bytes())
    }
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let channel = load_document(&args.input)?.to_channel()?;
    let report = verify_channel(&channel, args.tol, args.seed, args.states)?;
    if args.json {
        let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
        text.push('\n');
        emit(None, text.as_bytes())
    } else {
        emit(None, report.render().as_bytes())
    }
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let cfg = SimulationConfig {
        dim: args.dim,
        rank: args.rank,
        nnz_per_kraus: args.nnz,
        realizations: args.realizations,
        seed: args.seed,
        tol: args.tol,
        basis_kind: args.basis.into(),
        convention: args.convention.into(),
        include_zero: args.include_zero,
        max_rejections_per_draw: args.max_rejections,
    };
    let parallelism = match args.threads {
        0 => Parallelism::Global,
        n => Parallelism::Threads(n),
    };
    let result = run_histogram_with::<f64>(&cfg, parallelism)?;
    let bytes = export_histogram(&result, args.format.into())?;
    emit(args.out.as_deref(), &bytes)?;
    eprintln!(
        "realizations: {}  mode: {}  bound r^2: {}  within bound: {:.4}  acceptance rate: {:.4}",
        result.realizations_completed, result.mode, result.bound, result.fraction_within_bound, result.acceptance_rate
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Basis(a) => basis(a),
        Command::Convert(a) => convert(a),
        Command::Analyze(a) => analyze(a),
        Command::Verify(a) => verify(a),
        Command::Simulate(a) => simulate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.exit_code())
        }
    }
}
