//! Command-line front end for `idgauss`.
//!
//! Every command writes one JSON report (or a CSV table / matrix where noted)
//! to `--out` or stdout, plus a one-line summary on stderr.
//!
//! Exit codes: 0 definite result, 1 input or processing error, 2 indeterminate
//! verdict, 3 decomposition refused because the input is not ID.

pub mod error;
pub mod input;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use idgauss::criteria::{
    classify_with_stability, GreenClass, IdNotGreenReason, MMatrixFailure, Margins, NotIdWitness, SignatureWitness,
};
use idgauss::green::{decompose_with, DecomposeOptions, GreenDecomposition, Scaling};
use idgauss::oracle::{self, SimReport};
use idgauss::sweep::{self, SweepRow, TripleRow};
use idgauss::zoo::{self, GridSpec1D, GridSpec2D};
use idgauss::{Matrix, Tolerances};

pub use error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "idgauss",
    version,
    about = "Infinite divisibility of squared Gaussian vectors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a covariance: green, id_not_green, not_id or indeterminate.
    Check {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the transient Markov chain behind an ID covariance.
    Decompose {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long, value_enum, default_value_t = ScalingArg::RowSums)]
        scaling: ScalingArg,
        /// Added to the largest diagonal entry of the inverse when choosing c.
        #[arg(long, default_value_t = 0.0)]
        c_margin: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo Green function of a chain (or decomposition) JSON file.
    Simulate {
        #[arg(long)]
        input: PathBuf,
        /// Paths per start state.
        #[arg(long, default_value_t = 100_000)]
        paths: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exponential holding times; estimates g / c.
        #[arg(long)]
        ct: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Laplace transform det(I + G diag(t))^{-1/2}, optionally by Monte-Carlo.
    Laplace {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        t: String,
        /// Gaussian samples for the Monte-Carlo estimate (none if omitted).
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a generated covariance matrix.
    Zoo {
        #[command(flatten)]
        kernel: Kernel,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Batch classification over a family.
    Sweep {
        #[arg(long, value_enum, default_value_t = SweepFamily::Fbm)]
        family: SweepFamily,
        /// Comma-separated exponents.
        #[arg(long, default_value = "0.25,0.5,0.75,1.0")]
        beta: String,
        /// Comma-separated grid; repeatable. Without it, every subset of
        /// {1, …, hi} with 2 to max-points points.
        #[arg(long)]
        grid: Vec<String>,
        #[arg(long, default_value_t = 4)]
        max_points: usize,
        #[arg(long, default_value_t = 6)]
        hi: u32,
        /// Random triples for the sheet scan.
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScalingArg {
    RowSums,
    Unit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Brownian,
    Fbm,
    Sheet,
    SheetCounterexample,
    RandomGreen,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepFamily {
    Fbm,
    SheetTriples,
}

/// Covariance from a file or from a kernel family.
#[derive(Debug, Args)]
pub struct Source {
    #[arg(long, conflicts_with = "family")]
    pub input: Option<PathBuf>,
    /// Input format (default: from the file extension).
    #[arg(long, requires = "input")]
    pub format: Option<Format>,
    #[command(flatten)]
    pub kernel: Kernel,
}

#[derive(Debug, Args)]
pub struct Kernel {
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// `1,2,3` for line families, `x1:s1,x2:s2,…` for the sheet.
    #[arg(long)]
    pub grid: Option<String>,
    /// Size for random-green.
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long = "kernel-seed", default_value_t = 0)]
    pub kernel_seed: u64,
    /// Random-green with a symmetric jump matrix.
    #[arg(long)]
    pub symmetric: bool,
}

#[derive(Debug, Args)]
pub struct TolArgs {
    /// Relative zero threshold.
    #[arg(long, default_value_t = 1e-10)]
    pub eps: f64,
    /// Relative positive-definiteness pivot floor.
    #[arg(long, default_value_t = 1e-12)]
    pub eps_psd: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub sym_tol: f64,
}

impl TolArgs {
    fn tolerances(&self) -> Result<Tolerances, CliError> {
        Ok(Tolerances::new(self.eps, self.eps_psd, self.sym_tol)?)
    }
}

/// Common envelope of every JSON report.
#[derive(Debug, Serialize)]
pub struct Report<T> {
    pub schema: String,
    pub version: &'static str,
    pub tolerances: Option<Tolerances>,
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub body: T,
}

impl<T: Serialize> Report<T> {
    fn new(kind: &str, tolerances: Option<Tolerances>, seed: Option<u64>, body: T) -> Self {
        Self {
            schema: format!("idgauss.{kind}/{SCHEMA_VERSION}"),
            version: idgauss::VERSION,
            tolerances,
            seed,
            body,
        }
    }

    fn to_json(&self) -> Result<Vec<u8>, CliError> {
        let mut out = serde_json::to_vec_pretty(self).map_err(|e| CliError::Numerical(e.to_string()))?;
        out.push(b'\n');
        Ok(out)
    }
}

/// Witness with 1-based matrix indices.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Off-diagonal of `S G⁻¹ S` that is positive for every admissible `S`.
    Entry {
        entry: [usize; 2],
        value: f64,
    },
    /// Closed walk through nonzero covariances with negative sign product.
    Cycle {
        path: Vec<usize>,
    },
    OffDiagonalPositive {
        entry: [usize; 2],
        value: f64,
    },
    InverseNegative {
        entry: [usize; 2],
        value: f64,
    },
    Singular {
        detail: String,
    },
    SpectralRadius {
        upper: f64,
        c: f64,
    },
}

impl From<&NotIdWitness> for Witness {
    fn from(w: &NotIdWitness) -> Self {
        match w {
            NotIdWitness::Signature {
                witness: SignatureWitness::EntryWitness { i, j, value },
            } => Witness::Entry {
                entry: [i + 1, j + 1],
                value: *value,
            },
            NotIdWitness::Signature {
                witness: SignatureWitness::CycleContradiction { path },
            } => Witness::Cycle {
                path: path.iter().map(|i| i + 1).collect(),
            },
            NotIdWitness::MMatrix { failure } => match failure {
                MMatrixFailure::OffDiagonalPositive { i, j, value } => Witness::OffDiagonalPositive {
                    entry: [i + 1, j + 1],
                    value: *value,
                },
                MMatrixFailure::InverseNegative { i, j, value } => Witness::InverseNegative {
                    entry: [i + 1, j + 1],
                    value: *value,
                },
                MMatrixFailure::Singular { detail } => Witness::Singular { detail: detail.clone() },
                MMatrixFailure::SpectralRadius { upper, c } => Witness::SpectralRadius { upper: *upper, c: *c },
            },
        }
    }
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Witness::Entry { entry, value } => {
                write!(f, "entry ({},{}) of S G⁻¹ S = {value:e} > 0", entry[0], entry[1])
            }
            Witness::Cycle { path } => write!(f, "sign cycle {path:?}"),
            Witness::OffDiagonalPositive { entry, value } => {
                write!(f, "off-diagonal ({},{}) = {value:e} > 0", entry[0], entry[1])
            }
            Witness::InverseNegative { entry, value } => {
                write!(f, "inverse entry ({},{}) = {value:e} < 0", entry[0], entry[1])
            }
            Witness::Singular { detail } => write!(f, "singular: {detail}"),
            Witness::SpectralRadius { upper, c } => write!(f, "spectral radius bound {upper} >= {c}"),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CheckBody {
    pub n: usize,
    pub verdict: &'static str,
    /// Label at the requested tolerance, even when `verdict` is indeterminate.
    pub class: &'static str,
    pub signature: Option<Vec<i8>>,
    pub reason: Option<IdNotGreenReason>,
    pub witness: Option<Witness>,
    pub margins: Margins,
}

#[derive(Debug, Serialize)]
pub struct DecomposeBody {
    pub n: usize,
    #[serde(flatten)]
    pub decomposition: GreenDecomposition,
    pub row_sums: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct SimulateBody {
    #[serde(flatten)]
    pub report: SimReport<Matrix>,
    /// `(I - T)⁻¹`, divided by `c` for occupation times.
    pub exact: Matrix,
}

#[derive(Debug, Serialize)]
pub struct LaplaceBody {
    pub t: Vec<f64>,
    pub exact: f64,
    pub mc: Option<SimReport<f64>>,
}

/// Sweep row with a 1-based witness.
#[derive(Debug, Serialize)]
pub struct FbmRow {
    pub beta: f64,
    pub grid: Vec<f64>,
    pub verdict: String,
    pub witness: Option<Witness>,
}

impl From<SweepRow> for FbmRow {
    fn from(r: SweepRow) -> Self {
        Self {
            beta: r.beta,
            grid: r.grid,
            verdict: r.verdict,
            witness: r.witness.as_ref().map(Witness::from),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SweepBody<R> {
    pub family: &'static str,
    pub rows: Vec<R>,
}

/// Result of one command: bytes to write and the process exit code.
#[derive(Debug)]
pub struct Outcome {
    pub output: Vec<u8>,
    pub summary: String,
    pub exit_code: u8,
}

fn ok(output: Vec<u8>, summary: String) -> Outcome {
    Outcome {
        output,
        summary,
        exit_code: 0,
    }
}

fn line_grid(kernel: &Kernel) -> Result<GridSpec1D, CliError> {
    let s = kernel
        .grid
        .as_deref()
        .ok_or_else(|| CliError::Usage("--grid is required".into()))?;
    Ok(GridSpec1D::new(input::parse_list(s)?)?)
}

/// Covariance of a kernel family.
pub fn build_kernel(kernel: &Kernel) -> Result<Matrix, CliError> {
    let family = kernel
        .family
        .ok_or_else(|| CliError::Usage("either --input or --family is required".into()))?;
    match family {
        Family::Brownian => Ok(zoo::brownian_cov(&line_grid(kernel)?)?),
        Family::Fbm => {
            let beta = kernel
                .beta
                .ok_or_else(|| CliError::Usage("--beta is required".into()))?;
            Ok(zoo::fbm_cov(&line_grid(kernel)?, beta)?)
        }
        Family::Sheet => {
            let s = kernel
                .grid
                .as_deref()
                .ok_or_else(|| CliError::Usage("--grid is required".into()))?;
            Ok(zoo::sheet_cov(&GridSpec2D::new(input::parse_points(s)?)?))
        }
        Family::SheetCounterexample => Ok(zoo::sheet_counterexample().1),
        Family::RandomGreen => {
            if kernel.n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            Ok(zoo::random_green(kernel.n, kernel.kernel_seed, kernel.symmetric)?.1)
        }
    }
}

fn load(source: &Source) -> Result<Matrix, CliError> {
    match &source.input {
        Some(path) => input::read_matrix(path, source.format),
        None => build_kernel(&source.kernel),
    }
}

pub fn cmd_check(source: &Source, tol: &TolArgs) -> Result<Outcome, CliError> {
    let tol = tol.tolerances()?;
    let g = load(source)?;
    let c = classify_with_stability(&g, &tol)?;
    let (signature, reason, witness) = match &c.class {
        GreenClass::GreenFunction { .. } => (Some(vec![1; g.n()]), None, None),
        GreenClass::IdNotGreen { signature, reason, .. } => (Some(signature.signs.clone()), Some(*reason), None),
        GreenClass::NotId { witness } => (None, None, Some(Witness::from(witness))),
    };
    let verdict = if c.stable { c.class.label() } else { "indeterminate" };
    let summary = match &witness {
        Some(w) => format!("verdict: {verdict} ({w})"),
        None => format!("verdict: {verdict}"),
    };
    let body = CheckBody {
        n: g.n(),
        verdict,
        class: c.class.label(),
        signature,
        reason,
        witness,
        margins: c.margins,
    };
    Ok(Outcome {
        output: Report::new("check", Some(tol), None, body).to_json()?,
        summary,
        exit_code: if c.stable { 0 } else { 2 },
    })
}

pub fn cmd_decompose(source: &Source, tol: &TolArgs, scaling: ScalingArg, c_margin: f64) -> Result<Outcome, CliError> {
    let tol = tol.tolerances()?;
    let g = load(source)?;
    let opts = DecomposeOptions {
        c_margin,
        scaling: match scaling {
            ScalingArg::RowSums => Scaling::RowSums,
            ScalingArg::Unit => Scaling::Unit,
        },
    };
    if !(c_margin >= 0.0 && c_margin.is_finite()) {
        return Err(CliError::Usage(format!("--c-margin {c_margin} must be >= 0")));
    }
    let dec = match decompose_with(&g, &tol, opts) {
        Err(idgauss::DecomposeError::NotId(_)) => {
            let c = classify_with_stability(&g, &tol)?;
            let w = match &c.class {
                GreenClass::NotId { witness } => Witness::from(witness).to_string(),
                other => other.label().to_string(),
            };
            return Err(CliError::NotId(w));
        }
        r => r?,
    };
    let summary = format!(
        "decomposed n = {}, c = {}, reconstruction error {:e}",
        dec.n(),
        dec.c,
        dec.reconstruction_error
    );
    let body = DecomposeBody {
        n: dec.n(),
        row_sums: dec.row_sums(),
        decomposition: dec,
    };
    Ok(ok(
        Report::new("decomposition", Some(tol), None, body).to_json()?,
        summary,
    ))
}

pub fn cmd_simulate(path: &Path, paths: u64, seed: u64, ct: bool) -> Result<Outcome, CliError> {
    let chain = input::read_chain(path)?;
    let report = if ct {
        oracle::simulate_ct_green(&chain, paths, seed)?
    } else {
        oracle::simulate_green(&chain, paths, seed)?
    };
    let green = chain.green()?;
    let exact = if ct { green.scale(1.0 / chain.c) } else { green };
    let worst = (0..chain.n)
        .flat_map(|i| (0..chain.n).map(move |j| (i, j)))
        .map(|(i, j)| {
            let d = (report.estimate[(i, j)] - exact[(i, j)]).abs();
            let s = report.stderr[(i, j)];
            if s > 0.0 {
                d / s
            } else if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max);
    let summary = format!(
        "{} paths per state, max |estimate - exact| / stderr = {worst:.2}, {} capped paths",
        paths, report.overflow
    );
    let body = SimulateBody { report, exact };
    Ok(ok(
        Report::new("simulation", None, Some(seed), body).to_json()?,
        summary,
    ))
}

pub fn cmd_laplace(source: &Source, t: &str, samples: Option<u64>, seed: u64) -> Result<Outcome, CliError> {
    let g = load(source)?;
    let t = input::parse_list(t)?;
    let exact = oracle::laplace_exact(&g, &t)?;
    let mc = samples.map(|s| oracle::laplace_mc(&g, &t, s, seed)).transpose()?;
    let summary = match &mc {
        Some(r) => format!("exact {exact}, monte-carlo {} ± {}", r.estimate, r.stderr),
        None => format!("exact {exact}"),
    };
    let seed = mc.as_ref().map(|_| seed);
    let body = LaplaceBody { t, exact, mc };
    Ok(ok(Report::new("laplace", None, seed, body).to_json()?, summary))
}

pub fn cmd_zoo(kernel: &Kernel, format: Format) -> Result<Outcome, CliError> {
    let g = build_kernel(kernel)?;
    let output = match format {
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(&g).map_err(|e| CliError::Numerical(e.to_string()))?;
            v.push(b'\n');
            v
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in g.rows() {
                w.write_record(row.iter().map(|x| x.to_string()))
                    .map_err(|e| CliError::Numerical(e.to_string()))?;
            }
            w.into_inner().map_err(|e| CliError::Numerical(e.to_string()))?
        }
    };
    Ok(ok(output, format!("{n}x{n} covariance", n = g.n())))
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_sweep(
    family: SweepFamily,
    beta: &str,
    grids: &[String],
    max_points: usize,
    hi: u32,
    count: usize,
    seed: u64,
    tol: &TolArgs,
    format: Format,
) -> Result<Outcome, CliError> {
    let tol = tol.tolerances()?;
    match family {
        SweepFamily::Fbm => {
            let betas = input::parse_list(beta)?;
            let grids: Vec<GridSpec1D> = if grids.is_empty() {
                if max_points < 2 || hi < 2 {
                    return Err(CliError::Usage("--max-points and --hi must be at least 2".into()));
                }
                sweep::integer_grids(max_points, hi)
            } else {
                grids
                    .iter()
                    .map(|s| Ok(GridSpec1D::new(input::parse_list(s)?)?))
                    .collect::<Result<_, CliError>>()?
            };
            let rows: Vec<FbmRow> = sweep::fbm_sweep(&betas, &grids, &tol)?
                .into_iter()
                .map(FbmRow::from)
                .collect();
            let indeterminate = rows.iter().filter(|r| r.verdict == "indeterminate").count();
            let not_id = rows.iter().filter(|r| r.verdict == "not_id").count();
            let summary = format!("{} rows, {not_id} not_id, {indeterminate} indeterminate", rows.len());
            let output = match format {
                Format::Json => Report::new("sweep", Some(tol), None, SweepBody { family: "fbm", rows }).to_json()?,
                Format::Csv => fbm_csv(&rows)?,
            };
            Ok(Outcome {
                output,
                summary,
                exit_code: if indeterminate > 0 { 2 } else { 0 },
            })
        }
        SweepFamily::SheetTriples => {
            let rows = sweep::sheet_triple_scan(count, seed, &tol)?;
            let failures = rows.iter().filter(|r| !(r.sufficient && r.id)).count();
            let summary = format!("{} triples, {failures} not both sufficient and ID", rows.len());
            let output = match format {
                Format::Json => Report::new(
                    "sweep",
                    Some(tol),
                    Some(seed),
                    SweepBody {
                        family: "sheet_triples",
                        rows,
                    },
                )
                .to_json()?,
                Format::Csv => triples_csv(&rows)?,
            };
            Ok(ok(output, summary))
        }
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn fbm_csv(rows: &[FbmRow]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Numerical(e.to_string());
    w.write_record(["beta", "grid", "verdict", "witness"]).map_err(err)?;
    for r in rows {
        w.write_record([
            r.beta.to_string(),
            join(&r.grid),
            r.verdict.clone(),
            r.witness.as_ref().map(|w| w.to_string()).unwrap_or_default(),
        ])
        .map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Numerical(e.to_string()))
}

fn triples_csv(rows: &[TripleRow]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Numerical(e.to_string());
    w.write_record(["points", "sufficient", "id"]).map_err(err)?;
    for r in rows {
        let pts: Vec<String> = r.points.iter().map(|(x, s)| format!("{x}:{s}")).collect();
        w.write_record([pts.join(" "), r.sufficient.to_string(), r.id.to_string()])
            .map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Numerical(e.to_string()))
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<(Outcome, Option<PathBuf>), CliError> {
    let (outcome, out) = match &cli.command {
        Command::Check { source, tol, out } => (cmd_check(source, tol)?, out),
        Command::Decompose {
            source,
            tol,
            scaling,
            c_margin,
            out,
        } => (cmd_decompose(source, tol, *scaling, *c_margin)?, out),
        Command::Simulate {
            input,
            paths,
            seed,
            ct,
            out,
        } => (cmd_simulate(input, *paths, *seed, *ct)?, out),
        Command::Laplace {
            source,
            t,
            samples,
            seed,
            out,
        } => (cmd_laplace(source, t, *samples, *seed)?, out),
        Command::Zoo { kernel, format, out } => (cmd_zoo(kernel, *format)?, out),
        Command::Sweep {
            family,
            beta,
            grid,
            max_points,
            hi,
            count,
            seed,
            tol,
            format,
            out,
        } => (
            cmd_sweep(*family, beta, grid, *max_points, *hi, *count, *seed, tol, *format)?,
            out,
        ),
    };
    Ok((outcome, out.clone()))
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// or to stdout.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    match path {
        None => std::io::stdout().write_all(bytes).map_err(io(Path::new("<stdout>"))),
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io(path))?;
            tmp.write_all(bytes).map_err(io(path))?;
            tmp.as_file().sync_all().map_err(io(path))?;
            tmp.persist(path).map_err(|e| CliError::Io {
                path: path.to_path_buf(),
                source: e.error,
            })?;
            Ok(())
        }
    }
}
