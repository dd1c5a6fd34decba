//! Command-line front end. Every command prints one JSON report on stdout;
//! progress and diagnostics go to stderr.
//!
//! Exit codes: 0 computed (or positive verdict), 1 negative verdict from
//! `decide`, 2 usage or input error, 3 numerical failure.

mod instance;

pub use instance::{
    emit_instance, matrix_value, parse_instance, parse_matrix_file, parse_pairs_file, InstanceError,
    InstanceFile,
};

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::cpmap::{choi_from_kraus, make_sk3, KrausTuple};
use crate::error::Error;
use crate::estimators::{gnorm_mc, perm_mc, qperm_mc, wick_mc, EstimatorResult};
use crate::matroid::{mi_rank_direct, mi_rank_edmonds_rado};
use crate::numkernel::{ComplexMatrix, Tolerance};
use crate::qperm::{
    gnorm_expand, qperm_via_tuples, quantum_permanent, quantum_permanent_naive, wick_matrix,
};
use crate::scaling::{decide_edmonds_with, osi_run, DecideOptions, Threshold, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "opscale", version, about = "Operator scaling and quantum permanent toolkit")]
struct Cli {
    /// Relative singular-value threshold.
    #[arg(long, global = true)]
    tol_singular: Option<f64>,
    /// Relative eigenvalue threshold for PSD tests.
    #[arg(long, global = true)]
    tol_psd: Option<f64>,
    /// Relative agreement threshold.
    #[arg(long, global = true)]
    rtol: Option<f64>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ThresholdArg {
    #[value(name = "1/N", alias = "inverse-n")]
    InverseN,
    #[value(name = "1/(2N+1)", alias = "strict")]
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Signed sum of block-row mixed discriminants.
    Md,
    /// Four-permutation sum (N ≤ 4).
    Naive,
    /// Sum over Kraus index tuples.
    Tuples,
    /// G-norm of the monomial expansion.
    Expand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EstimateKind {
    Gnorm,
    Perm,
    Qperm,
    Wick,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether the span of the tuple contains a nonsingular matrix.
    Decide {
        #[arg(long)]
        input: PathBuf,
        /// Iteration budget override.
        #[arg(long)]
        max_iters: Option<u64>,
        /// Entry bit size used for the default budget.
        #[arg(long)]
        budget_bits: Option<u32>,
        #[arg(long, value_enum, default_value = "1/N")]
        threshold: ThresholdArg,
        /// Seed for the witness search.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact quantum permanent of the Choi matrix.
    Qperm {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "md")]
        method: Method,
    },
    /// Exact squared G-norm of det(Σ x_i A_i).
    Gnorm {
        #[arg(long)]
        input: PathBuf,
        /// Include the monomial coefficients.
        #[arg(long)]
        coefficients: bool,
    },
    /// Monte-Carlo estimate.
    Estimate {
        #[arg(value_enum)]
        kind: EstimateKind,
        /// Tuple file; perm and wick use its single matrix D.
        #[arg(long, required_unless_present = "matrix")]
        input: Option<PathBuf>,
        /// Rectangular matrix file: D for perm, A for wick.
        #[arg(long, conflicts_with = "input")]
        matrix: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Operator Sinkhorn trajectory.
    Scale {
        #[arg(long)]
        input: PathBuf,
        /// Number of steps.
        #[arg(long, default_value_t = 20)]
        max_iters: usize,
        /// Record the quantum permanent per step (N ≤ 4).
        #[arg(long)]
        track_potential: bool,
    },
    /// Matroid intersection rank of a vector pair family.
    MatroidRank {
        #[arg(long)]
        input: PathBuf,
    },
    /// Emit the skew-symmetric 3×3 instance.
    Sk3 {
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub exit_code: i32,
    /// Text for stdout: the JSON report, or help/version text.
    pub stdout: String,
}

enum Failure {
    Input(String, String),
    Numerical(String, String),
}

impl From<InstanceError> for Failure {
    fn from(e: InstanceError) -> Self {
        Failure::Input(e.kind().into(), e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = match e {
            Error::Dimension(_) => "dimension",
            Error::Singular { .. } => "singular",
            Error::NotStrictlyPositive { .. } => "not_strictly_positive",
            Error::NotPsd => "not_psd",
            Error::NotUnitary => "not_unitary",
            Error::TooLarge { .. } => "too_large",
            Error::NonFinite => "non_finite",
            Error::Invalid(_) => "invalid",
        };
        match e {
            Error::Singular { .. } | Error::NotStrictlyPositive { .. } | Error::NonFinite => {
                Failure::Numerical(kind.into(), e.to_string())
            }
            _ => Failure::Input(kind.into(), e.to_string()),
        }
    }
}

struct Report {
    exit_code: i32,
    result: Value,
    extra: Map<String, Value>,
}

impl Report {
    fn ok(result: Value) -> Self {
        Self {
            exit_code: EXIT_OK,
            result,
            extra: Map::new(),
        }
    }

    fn with(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.extra.insert(key.into(), v.into());
        self
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Decide { .. } => "decide",
        Command::Qperm { .. } => "qperm",
        Command::Gnorm { .. } => "gnorm",
        Command::Estimate { .. } => "estimate",
        Command::Scale { .. } => "scale",
        Command::MatroidRank { .. } => "matroid-rank",
        Command::Sk3 { .. } => "sk3",
    }
}

fn tuple_from(path: &Path) -> Result<KrausTuple, Failure> {
    let inst = parse_instance(path)?;
    eprintln!("loaded {}: n = {}, k = {}", path.display(), inst.n, inst.k);
    Ok(inst.to_kraus()?)
}

fn single_matrix(path: &Path) -> Result<ComplexMatrix, Failure> {
    let inst = parse_instance(path)?;
    match <[ComplexMatrix; 1]>::try_from(inst.matrices) {
        Ok([m]) => Ok(m),
        Err(v) => Err(Failure::Input(
            "dimension".into(),
            format!("expected a single matrix, found {}", v.len()),
        )),
    }
}

fn complex_value(z: crate::C64) -> Value {
    json!([z.re, z.im])
}

fn estimate_value(r: &EstimatorResult) -> Value {
    json!({
        "mean": complex_value(r.mean),
        "std_error": r.std_error,
        "samples": r.samples,
        "seed": r.seed,
    })
}

fn execute(cmd: &Command, tol: &Tolerance) -> Result<Report, Failure> {
    match cmd {
        Command::Decide {
            input,
            max_iters,
            budget_bits,
            threshold,
            seed,
        } => {
            let t = tuple_from(input)?;
            let opts = DecideOptions {
                budget_override: *max_iters,
                max_entry_bits: *budget_bits,
                threshold: match threshold {
                    ThresholdArg::InverseN => Threshold::InverseN,
                    ThresholdArg::Strict => Threshold::Strict,
                },
                witness_seed: *seed,
            };
            let r = decide_edmonds_with(&t, tol, &opts);
            eprintln!("decide: {:?} after {} of {} steps", r.verdict, r.iterations, r.budget);
            let exit_code = match r.verdict {
                Verdict::NonsingularExists => EXIT_OK,
                Verdict::NoNonsingular | Verdict::BudgetExhaustedNoNonsingular => EXIT_NEGATIVE,
                Verdict::InconclusiveNumerical => EXIT_NUMERICAL,
            };
            let result = serde_json::to_value(&r).expect("report serializes");
            let mut rep = Report::ok(result)
                .with("iterations", r.iterations)
                .with("ds", r.final_ds)
                .with("seed", *seed);
            rep.exit_code = exit_code;
            Ok(rep)
        }
        Command::Qperm { input, method } => {
            let t = tuple_from(input)?;
            let rho = choi_from_kraus(&t);
            let (name, z) = match method {
                Method::Md => ("md", quantum_permanent(rho.matrix())?),
                Method::Naive => ("naive", quantum_permanent_naive(rho.matrix())?),
                Method::Tuples => ("tuples", crate::C64::new(qperm_via_tuples(&t)?, 0.0)),
                Method::Expand => ("expand", crate::C64::new(gnorm_expand(&t)?.1, 0.0)),
            };
            Ok(Report::ok(json!({ "method": name, "value": z.re, "imag": z.im })))
        }
        Command::Gnorm { input, coefficients } => {
            let t = tuple_from(input)?;
            let (exp, norm) = gnorm_expand(&t)?;
            let mut result = json!({ "value": norm, "terms": exp.terms.len() });
            if *coefficients {
                result["coefficients"] = exp
                    .terms
                    .iter()
                    .map(|(r, a)| json!({ "exponent": r.as_slice(), "coefficient": complex_value(*a) }))
                    .collect();
            }
            Ok(Report::ok(result))
        }
        Command::Estimate {
            kind,
            input,
            matrix,
            samples,
            seed,
        } => {
            eprintln!("estimate: {samples} samples, seed {seed}");
            let result = match kind {
                EstimateKind::Gnorm | EstimateKind::Qperm => {
                    let path = input.as_ref().ok_or_else(|| {
                        Failure::Input("usage".into(), "this estimator needs --input".into())
                    })?;
                    let t = tuple_from(path)?;
                    if *kind == EstimateKind::Gnorm {
                        estimate_value(&gnorm_mc(&t, *samples, *seed)?)
                    } else {
                        let q = qperm_mc(&t, *samples, *seed)?;
                        let mut v = estimate_value(&q.estimate);
                        v["bilinear"] = estimate_value(&q.bilinear);
                        v["agreement_z"] = json!(q.agreement_z());
                        v
                    }
                }
                EstimateKind::Perm | EstimateKind::Wick => {
                    let (m, from_tuple) = match (input, matrix) {
                        (_, Some(p)) => (parse_matrix_file(p)?, false),
                        (Some(p), None) => (single_matrix(p)?, true),
                        (None, None) => unreachable!("clap requires one of the inputs"),
                    };
                    if *kind == EstimateKind::Perm {
                        estimate_value(&perm_mc(&m, *samples, *seed)?)
                    } else {
                        let a = if from_tuple { wick_matrix(&m) } else { m };
                        estimate_value(&wick_mc(&a, *samples, *seed)?)
                    }
                }
            };
            let name = match kind {
                EstimateKind::Gnorm => "gnorm",
                EstimateKind::Perm => "perm",
                EstimateKind::Qperm => "qperm",
                EstimateKind::Wick => "wick",
            };
            let mut result = result;
            result["estimator"] = json!(name);
            Ok(Report::ok(result).with("seed", *seed))
        }
        Command::Scale {
            input,
            max_iters,
            track_potential,
        } => {
            let t = tuple_from(input)?;
            let trace = osi_run(&t, *max_iters, *track_potential, tol);
            let last = trace.states.last().expect("trace holds the initial state");
            let ds = *trace.ds_values.last().expect("one ds value per state");
            let mut result = json!({
                "ds_values": trace.ds_values,
                "potential_values": trace.potential_values,
                "log_det_product": last.log_det_product,
                "p": matrix_value(&last.p),
                "q": matrix_value(&last.q),
            });
            let mut exit_code = EXIT_OK;
            if let Some(e) = &trace.error {
                eprintln!("scale: stopped early: {e}");
                result["error"] = json!(e.to_string());
                exit_code = EXIT_NUMERICAL;
            }
            let mut rep = Report::ok(result)
                .with("iterations", last.step)
                .with("ds", ds);
            rep.exit_code = exit_code;
            Ok(rep)
        }
        Command::MatroidRank { input } => {
            let f = parse_pairs_file(input)?;
            let direct = mi_rank_direct(&f, tol)?;
            let er = mi_rank_edmonds_rado(&f, tol)?;
            Ok(Report::ok(json!({
                "n": f.n(),
                "k": f.k(),
                "rank": direct,
                "edmonds_rado": er,
                "span_contains_nonsingular": direct == f.n(),
            })))
        }
        Command::Sk3 { output } => {
            let mut inst = InstanceFile::from_tuple(&make_sk3());
            inst.metadata = Some([("name".to_string(), "sk3".to_string())].into());
            if let Some(path) = output {
                emit_instance(&inst, path).map_err(|e| Failure::Input("io".into(), e.to_string()))?;
                eprintln!("wrote {}", path.display());
            }
            Ok(Report::ok(inst.to_value()))
        }
    }
}

fn render(command: &str, tol: Option<&Tolerance>, body: Map<String, Value>) -> String {
    let mut obj = Map::new();
    obj.insert("command".into(), command.into());
    obj.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    obj.insert(
        "tolerances".into(),
        tol.map_or(Value::Null, |t| serde_json::to_value(t).expect("tolerances serialize")),
    );
    obj.extend(body);
    let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("report serializes");
    s.push('\n');
    s
}

fn error_output(command: &str, tol: Option<&Tolerance>, code: i32, kind: &str, message: &str) -> CommandOutput {
    eprintln!("error: {message}");
    let mut body = Map::new();
    body.insert("error".into(), json!({ "kind": kind, "message": message }));
    CommandOutput {
        exit_code: code,
        stdout: render(command, tol, body),
    }
}

/// Parses `argv` (program name first) and runs the selected command.
pub fn run_command<I, T>(argv: I) -> CommandOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CommandOutput {
                    exit_code: EXIT_OK,
                    stdout: e.to_string(),
                },
                _ => {
                    eprint!("{e}");
                    CommandOutput {
                        exit_code: EXIT_INPUT,
                        stdout: String::new(),
                    }
                }
            };
        }
    };
    let name = command_name(&cli.command);
    let defaults = Tolerance::default();
    let tol = match Tolerance::new(
        cli.tol_singular.unwrap_or(defaults.singular_eps),
        cli.tol_psd.unwrap_or(defaults.psd_eps),
        cli.rtol.unwrap_or(defaults.agree_rtol),
    ) {
        Ok(t) => t,
        Err(e) => return error_output(name, None, EXIT_INPUT, "usage", &e.to_string()),
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.max(1)).build() {
        Ok(p) => p,
        Err(e) => return error_output(name, Some(&tol), EXIT_INPUT, "usage", &e.to_string()),
    };
    match pool.install(|| execute(&cli.command, &tol)) {
        Ok(rep) => {
            let mut body = Map::new();
            body.insert("result".into(), rep.result);
            body.extend(rep.extra);
            CommandOutput {
                exit_code: rep.exit_code,
                stdout: render(name, Some(&tol), body),
            }
        }
        Err(Failure::Input(kind, msg)) => error_output(name, Some(&tol), EXIT_INPUT, &kind, &msg),
        Err(Failure::Numerical(kind, msg)) => {
            error_output(name, Some(&tol), EXIT_NUMERICAL, &kind, &msg)
        }
    }
}
