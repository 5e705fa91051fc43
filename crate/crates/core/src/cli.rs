//! Batch front end. Every subcommand writes JSON (to `--out` or stdout)
//! and maps its outcome to an exit code: 0 holds, 1 fails or refused,
//! 2 unknown, 3 usage error or malformed input.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::generators::{self, BaseFamily, Generated, GeneratorError};
use crate::numerics::rational::to_f64;
use crate::numerics::{format_rational, monotonize, parse_rational, Cardinal, Rational, Sequence};
use crate::oracle::{self, SampleOptions};
use crate::relations::hierarchy::default_eps_grid;
use crate::relations::{AnalyticCertificate, Checker, HierarchyReport, RelationError, Status};
use crate::stochastic::matrix::AnyMatrix;
use crate::synthesis::{self, Pipeline, SynthesisCertificate, SynthesisError, SynthesisOptions};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "majorant", version, about = "Majorization relations and Schur-Horn synthesis")]
pub struct Cli {
    /// Prefix length examined for truncated inputs.
    #[arg(long, global = true, env = "MAJORANT_HORIZON", default_value_t = 512)]
    pub horizon: usize,
    /// Worker threads for sampling and corpus runs.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output file (directory for `generate`). Defaults to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Float comparison slack.
    #[arg(long, global = true, default_value_t = oracle::ASSERT_TOL)]
    pub tolerance: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide one relation between two sequences.
    Check(CheckArgs),
    /// Build an orthogonal plan with diag(M diag(η) Mᵀ) = ξ.
    Synthesize(SynthArgs),
    /// Emit a family of example pairs with certificates.
    Generate(GenArgs),
    /// Haar samples of the diagonal of U diag(η) Uᵀ.
    Sample(SampleArgs),
    /// Necessity bound for ξ = Qη with Q orthostochastic.
    VerifyBound(BoundArgs),
    /// Check every implication between the relations.
    Hierarchy(HierarchyArgs),
    /// Random search for diagonals outside the predicted relation.
    Search(SearchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RelationArg {
    Maj,
    Strong,
    PMaj,
    Approx,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Sequence JSON file or inline list such as `2,1,1`.
    #[arg(long)]
    pub xi: String,
    #[arg(long)]
    pub eta: String,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, value_enum, default_value = "maj")]
    pub relation: RelationArg,
    /// Shift, a non-negative integer or `inf`.
    #[arg(long, default_value = "0")]
    pub p: String,
    /// Slack for the approximate relation. Without it every ε on a grid is tried.
    #[arg(long)]
    pub epsilon: Option<String>,
    /// JSON list of analytic certificates, or a generated family file.
    #[arg(long)]
    pub certificates: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PipelineArg {
    Auto,
    FiniteRank,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, value_enum, default_value = "auto")]
    pub pipeline: PipelineArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    PGap,
    HalfAmpliation,
    AppGap,
    Prop28,
    Convex,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, default_value = "1")]
    pub p: String,
    #[arg(long)]
    pub q: Option<String>,
    /// Base sequence: geometric, harmonic or log-harmonic.
    #[arg(long)]
    pub base: Option<String>,
    /// Listed length of generated truncated sequences.
    #[arg(long, default_value_t = 64)]
    pub len: usize,
    #[arg(long, default_value_t = 6)]
    pub blocks: usize,
    #[arg(long)]
    pub xi: Option<String>,
    #[arg(long)]
    pub zeta: Option<String>,
    #[arg(long)]
    pub eta: Option<String>,
    #[arg(long)]
    pub lambda: Option<String>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub eta: String,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub keep_diagonals: bool,
    /// Also run the necessity bound on each U∘U at this ε.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Matrix as JSON or CSV.
    #[arg(long, conflicts_with = "certificate")]
    pub matrix: Option<PathBuf>,
    /// A synthesis certificate; its plan supplies Q and η.
    #[arg(long)]
    pub certificate: Option<PathBuf>,
    #[arg(long)]
    pub eta: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub p: usize,
    #[arg(long, default_value = "1/2")]
    pub epsilon: String,
}

#[derive(Debug, Args)]
pub struct HierarchyArgs {
    #[arg(long, requires = "eta")]
    pub xi: Option<String>,
    #[arg(long, requires = "xi")]
    pub eta: Option<String>,
    #[arg(long)]
    pub certificates: Option<PathBuf>,
    /// JSON list of `{xi, eta, certificates?}` items checked in parallel.
    #[arg(long, conflicts_with_all = ["xi", "eta"])]
    pub corpus: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub eta: String,
    #[arg(long, default_value_t = 1000)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }

    fn refused(message: impl Into<String>) -> Self {
        CliError { code: EXIT_FAILS, message: message.into() }
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn status_code(s: Status) -> i32 {
    match s {
        Status::Holds => EXIT_HOLDS,
        Status::Fails => EXIT_FAILS,
        Status::Unknown => EXIT_UNKNOWN,
    }
}

fn code_from(ok: bool) -> i32 {
    if ok {
        EXIT_HOLDS
    } else {
        EXIT_FAILS
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_HOLDS };
        }
    };
    let result = match cli.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(CliError::usage(format!("--jobs: {e}"))),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<i32> {
    match &cli.command {
        Command::Check(a) => check(cli, a),
        Command::Synthesize(a) => synthesize(cli, a),
        Command::Generate(a) => generate(cli, a),
        Command::Sample(a) => sample(cli, a),
        Command::VerifyBound(a) => verify_bound(cli, a),
        Command::Hierarchy(a) => hierarchy(cli, a),
        Command::Search(a) => search(cli, a),
    }
}

fn emit(out: Option<&Path>, value: &impl Serialize) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::usage(e.to_string()))?;
    match out {
        Some(p) => fs::write(p, text + "\n").map_err(|e| CliError::usage(format!("--out {}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn read_file(flag: &str, path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::usage(format!("{flag} {}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(flag: &str, text: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::usage(format!("{flag}: {e}")))
}

fn parse_rat(flag: &str, s: &str) -> CliResult<Rational> {
    parse_rational(s).map_err(|e| CliError::usage(format!("{flag}: {e}")))
}

fn parse_cardinal(flag: &str, s: &str) -> CliResult<Cardinal> {
    s.parse().map_err(|e| CliError::usage(format!("{flag}: {e}")))
}

/// A sequence file path, or an inline comma separated list of rationals
/// read as a finitely supported sequence.
pub fn read_sequence(flag: &str, arg: &str) -> CliResult<Sequence> {
    let path = Path::new(arg);
    if path.is_file() {
        return parse_json(flag, &read_file(flag, path)?);
    }
    let terms = arg
        .split(',')
        .enumerate()
        .map(|(i, s)| parse_rational(s.trim()).map_err(|e| CliError::usage(format!("{flag}: terms[{i}]: {e}"))))
        .collect::<CliResult<Vec<_>>>()?;
    Sequence::finite(terms).map_err(|e| CliError::usage(format!("{flag}: {e}")))
}

fn read_floats(flag: &str, arg: &str) -> CliResult<Vec<f64>> {
    let path = Path::new(arg);
    if path.is_file() {
        let s: Sequence = parse_json(flag, &read_file(flag, path)?)?;
        return Ok(s.terms().iter().map(to_f64).collect());
    }
    arg.split(',')
        .enumerate()
        .map(|(i, s)| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .or_else(|| parse_rational(s).ok().map(|r| to_f64(&r)))
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::usage(format!("{flag}: terms[{i}]: cannot parse {s:?}")))
        })
        .collect()
}

fn read_certificates(flag: &str, path: &Path) -> CliResult<Vec<AnalyticCertificate>> {
    let v: Value = parse_json(flag, &read_file(flag, path)?)?;
    let list = match v.get("certificates") {
        Some(inner) => inner.clone(),
        None => v,
    };
    serde_json::from_value(list).map_err(|e| CliError::usage(format!("{flag}: {e}")))
}

fn relation_error(e: RelationError) -> CliError {
    CliError::usage(e.to_string())
}

fn check(cli: &Cli, a: &CheckArgs) -> CliResult<i32> {
    let xi = read_sequence("--xi", &a.pair.xi)?;
    let eta = read_sequence("--eta", &a.pair.eta)?;
    let p = parse_cardinal("--p", &a.p)?;
    let mut checker = Checker::new(cli.horizon);
    if let Some(path) = &a.certificates {
        checker = checker.with_certificates(read_certificates("--certificates", path)?);
    }
    let verdict = match a.relation {
        RelationArg::Maj => checker.majorize(&xi, &eta),
        RelationArg::Strong => checker.strong_majorize(&xi, &eta),
        RelationArg::PMaj => checker.p_majorize(&xi, &eta, p),
        RelationArg::Approx => match &a.epsilon {
            Some(e) => {
                let eps = parse_rat("--epsilon", e)?;
                checker.approx_p_majorize(&xi, &eta, p, &eps)
            }
            None => {
                let curve = checker.approx_curve(&xi, &eta, p, &default_eps_grid()).map_err(relation_error)?;
                eprintln!("approx_p_majorize(p={p}) for every epsilon: {}", curve.all_epsilon);
                emit(
                    cli.out.as_deref(),
                    &json!({ "relation": "approx_p_majorize", "p": p, "status": curve.all_epsilon, "points": curve.points }),
                )?;
                return Ok(status_code(curve.all_epsilon));
            }
        },
    }
    .map_err(relation_error)?;
    eprintln!("{verdict}");
    emit(cli.out.as_deref(), &verdict)?;
    Ok(status_code(verdict.status))
}

/// `Σ^n ξ* = a > Σ^n η* = b` at the first violated prefix.
fn violated_prefix(xi: &Sequence, eta: &Sequence, n: usize) -> String {
    let sum = |s: &Sequence| -> Rational { monotonize(s).padded(n).iter().take(n).sum() };
    format!(
        "sum of the first {n} terms of xi* = {} > sum of the first {n} terms of eta* = {}",
        format_rational(&sum(xi)),
        format_rational(&sum(eta))
    )
}

fn synthesize(cli: &Cli, a: &SynthArgs) -> CliResult<i32> {
    let xi = read_sequence("--xi", &a.pair.xi)?;
    let eta = read_sequence("--eta", &a.pair.eta)?;
    let opts = SynthesisOptions {
        horizon: cli.horizon,
        pipeline: match a.pipeline {
            PipelineArg::Auto => Pipeline::Auto,
            PipelineArg::FiniteRank => Pipeline::FiniteRank,
        },
    };
    match synthesis::synthesize(&xi, &eta, &opts) {
        Ok(cert) => {
            eprintln!("{:?}: {} rotations in dimension {}", cert.case, cert.plan.givens_count(), cert.window());
            emit(cli.out.as_deref(), &cert)?;
            Ok(code_from(cert.verification.passed()))
        }
        Err(e) => {
            let (code, detail) = match &e {
                SynthesisError::NotMajorized { n } => (EXIT_FAILS, Some(violated_prefix(&xi, &eta, *n))),
                SynthesisError::KernelGuard { .. } | SynthesisError::Internal(_) => (EXIT_FAILS, None),
                SynthesisError::Incomplete { .. } | SynthesisError::HorizonExceeded { .. } => (EXIT_UNKNOWN, None),
                SynthesisError::NotFinite
                | SynthesisError::NotMonotone
                | SynthesisError::LengthMismatch { .. }
                | SynthesisError::Sequence(_) => return Err(CliError::usage(e.to_string())),
            };
            let report = json!({ "status": "refused", "reason": e.to_string(), "violated": detail });
            emit(cli.out.as_deref(), &report)?;
            Err(CliError { code, message: detail.unwrap_or_else(|| e.to_string()) })
        }
    }
}

fn base_family(a: &GenArgs, default: BaseFamily) -> CliResult<BaseFamily> {
    match &a.base {
        Some(s) => s.parse().map_err(|e: String| CliError::usage(format!("--base: {e}"))),
        None => Ok(default),
    }
}

fn generator_error(e: GeneratorError) -> CliError {
    match e {
        GeneratorError::Rejected(_) | GeneratorError::Sequence(_) => CliError::usage(e.to_string()),
        _ => CliError::refused(e.to_string()),
    }
}

fn finite_p(flag: &str, s: &str) -> CliResult<usize> {
    parse_cardinal(flag, s)?.finite().ok_or_else(|| CliError::usage(format!("{flag}: must be finite")))
}

fn generate(cli: &Cli, a: &GenArgs) -> CliResult<i32> {
    if a.family == FamilyArg::Convex {
        return generate_convex(cli, a);
    }
    let g: Generated = match a.family {
        FamilyArg::PGap => {
            let eta = base_family(a, BaseFamily::Geometric)?.sequence(a.len);
            generators::gen_p_gap(&eta, finite_p("--p", &a.p)?)
        }
        FamilyArg::HalfAmpliation => {
            let base = base_family(a, BaseFamily::Harmonic)?;
            generators::gen_half_ampliation(&base.sequence(a.len), Some(base.liminf_positive()))
        }
        FamilyArg::AppGap => generators::gen_app_gap(finite_p("--p", &a.p)?, a.len),
        FamilyArg::Prop28 => {
            let base = base_family(a, BaseFamily::Harmonic)?;
            let eps: Vec<Rational> = (1..=a.blocks as u32).map(crate::numerics::rational::pow2_inv).collect();
            generators::gen_strong_and_infty(&base.sequence(a.len), &eps, a.blocks, base.liminf_positive())
        }
        FamilyArg::Convex => unreachable!(),
    }
    .map_err(generator_error)?;
    let verdicts = g.confirm(cli.horizon).map_err(generator_error)?;
    eprintln!("{:?}: {} certificates confirmed", g.family, verdicts.len());
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::usage(format!("--out {}: {e}", dir.display())))?;
            emit(Some(&dir.join("xi.json")), &g.xi)?;
            emit(Some(&dir.join("eta.json")), &g.eta)?;
            emit(Some(&dir.join("certificates.json")), &g.certificates)?;
            emit(Some(&dir.join("generated.json")), &g)?;
        }
        None => emit(None, &g)?,
    }
    Ok(EXIT_HOLDS)
}

fn generate_convex(cli: &Cli, a: &GenArgs) -> CliResult<i32> {
    let need = |flag: &str, v: &Option<String>| v.clone().ok_or_else(|| CliError::usage(format!("{flag} is required")));
    let xi = read_sequence("--xi", &need("--xi", &a.xi)?)?;
    let zeta = read_sequence("--zeta", &need("--zeta", &a.zeta)?)?;
    let lambda = parse_rat("--lambda", &need("--lambda", &a.lambda)?)?;
    let p = parse_cardinal("--p", &a.p)?;
    let q = parse_cardinal("--q", &need("--q", &a.q)?)?;
    let mix = generators::convex_mix(&xi, &zeta, &lambda, p, q).map_err(generator_error)?;
    let mut code = EXIT_HOLDS;
    let mut verdict = None;
    if let Some(e) = &a.eta {
        let eta = read_sequence("--eta", e)?;
        let curve = Checker::new(cli.horizon)
            .approx_curve(&mix.phi, &eta, mix.r, &default_eps_grid())
            .map_err(relation_error)?;
        code = status_code(curve.all_epsilon);
        verdict = Some(curve.all_epsilon);
    }
    let out = json!({ "phi": mix.phi, "r": mix.r, "certificates": [mix.certificate], "checked": verdict });
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::usage(format!("--out {}: {e}", dir.display())))?;
            emit(Some(&dir.join("phi.json")), &mix.phi)?;
            emit(Some(&dir.join("certificates.json")), &[&mix.certificate])?;
            emit(Some(&dir.join("generated.json")), &out)?;
        }
        None => emit(None, &out)?,
    }
    Ok(code)
}

fn sample(cli: &Cli, a: &SampleArgs) -> CliResult<i32> {
    let eta = read_floats("--eta", &a.eta)?;
    if eta.is_empty() {
        return Err(CliError::usage("--eta: empty"));
    }
    let opts = SampleOptions { samples: a.samples, seed: a.seed, keep_diagonals: a.keep_diagonals, bound_eps: a.epsilon };
    let report = oracle::sample_orbit_expectation(&eta, &opts);
    eprintln!("{} samples, {} violations", report.samples, report.violations.len());
    emit(cli.out.as_deref(), &report)?;
    Ok(code_from(report.violations.is_empty()))
}

fn verify_bound(cli: &Cli, a: &BoundArgs) -> CliResult<i32> {
    let (matrix, eta_exact): (AnyMatrix, Option<Vec<Rational>>) = match (&a.matrix, &a.certificate) {
        (Some(path), None) => {
            let text = read_file("--matrix", path)?;
            let m = if path.extension().is_some_and(|e| e == "csv") {
                AnyMatrix::read_csv(text.as_bytes())
            } else {
                let v: Value = parse_json("--matrix", &text)?;
                AnyMatrix::from_json(&v)
            }
            .map_err(|e| CliError::usage(format!("--matrix: {e}")))?;
            (m, None)
        }
        (None, Some(path)) => {
            let cert: SynthesisCertificate = parse_json("--certificate", &read_file("--certificate", path)?)?;
            let w = cert.window();
            (AnyMatrix::Exact(cert.orthostochastic()), Some(cert.eta.padded(w)))
        }
        _ => return Err(CliError::usage("one of --matrix or --certificate is required")),
    };
    let eta = match (&a.eta, eta_exact) {
        (Some(e), _) => read_sequence("--eta", e)?.terms().to_vec(),
        (None, Some(e)) => e,
        (None, None) => return Err(CliError::usage("--eta is required with --matrix")),
    };
    let eps = parse_rat("--epsilon", &a.epsilon)?;
    let report = match &matrix {
        AnyMatrix::Exact(q) => {
            let eta = pad(eta, q.rows());
            oracle::verify_necessity_bound(q, &eta, a.p, &eps, cli.tolerance)
        }
        AnyMatrix::Float(q) => {
            let eta: Vec<f64> = pad(eta, q.rows()).iter().map(to_f64).collect();
            oracle::verify_necessity_bound(q, &eta, a.p, &to_f64(&eps), cli.tolerance)
        }
    }
    .map_err(|e| CliError::usage(e.to_string()))?;
    eprintln!("{} prefixes checked, {} violations", report.checked, report.violations.len());
    emit(cli.out.as_deref(), &report)?;
    Ok(code_from(report.holds()))
}

fn pad(mut v: Vec<Rational>, n: usize) -> Vec<Rational> {
    if v.len() < n {
        v.resize(n, Rational::from_integer(0.into()));
    }
    v
}

#[derive(serde::Deserialize)]
struct CorpusItem {
    xi: Sequence,
    eta: Sequence,
    #[serde(default)]
    certificates: Vec<AnalyticCertificate>,
}

fn hierarchy(cli: &Cli, a: &HierarchyArgs) -> CliResult<i32> {
    let items: Vec<CorpusItem> = match (&a.corpus, &a.xi, &a.eta) {
        (Some(path), _, _) => parse_json("--corpus", &read_file("--corpus", path)?)?,
        (None, Some(x), Some(e)) => vec![CorpusItem {
            xi: read_sequence("--xi", x)?,
            eta: read_sequence("--eta", e)?,
            certificates: match &a.certificates {
                Some(p) => read_certificates("--certificates", p)?,
                None => Vec::new(),
            },
        }],
        _ => return Err(CliError::usage("give --xi and --eta, or --corpus")),
    };
    let grid = default_eps_grid();
    let reports: Vec<HierarchyReport> = items
        .par_iter()
        .map(|it| {
            Checker::new(cli.horizon)
                .with_certificates(it.certificates.clone())
                .hierarchy(&it.xi, &it.eta, &grid)
        })
        .collect::<Result<_, _>>()
        .map_err(relation_error)?;
    let violations: usize = reports.iter().map(|r| r.violations().count()).sum();
    eprintln!("{} pairs, {violations} violated implications", reports.len());
    if a.corpus.is_some() {
        emit(cli.out.as_deref(), &reports)?;
    } else {
        emit(cli.out.as_deref(), &reports[0])?;
    }
    Ok(code_from(violations == 0))
}

fn search(cli: &Cli, a: &SearchArgs) -> CliResult<i32> {
    let eta = read_floats("--eta", &a.eta)?;
    let report = oracle::conjecture_search(&eta, a.budget, a.seed);
    eprintln!("{} samples, {} candidates", a.budget, report.candidates.len());
    emit(cli.out.as_deref(), &report)?;
    Ok(code_from(report.candidates.is_empty()))
}
