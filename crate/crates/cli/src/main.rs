//! `prlab`: exact sparse phase retrieval checks from the command line.
//!
//! stdout carries exactly one JSON document per run; a one-line summary
//! goes to stderr. Exit codes: 0 holds/success, 2 usage, I/O or budget
//! error, 3 the property fails (witness in the report), 4 inconclusive.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use prlab_core::complex::{self, ComplexFrame};
use prlab_core::frame::{random_frame_scaled, DEFAULT_NUMERATOR_BOUND};
use prlab_core::io::{self, AnyFrame};
use prlab_core::nsp::{self, CheckPolicy, PhaselessOptions, SubsetScope};
use prlab_core::phaseless::{self, PhaselessProblem};
use prlab_core::retrieval::{self, FieldKind};
use prlab_core::{Error, RationalFrame};

const SCHEMA: &str = "prlab/1";

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 2;
const EXIT_FAILS: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "prlab",
    version,
    about = "Sparse phase retrievability, phaseless l1 and null space property checks"
)]
struct Cli {
    /// Worker threads (output is identical for any value).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Include wall-clock timing in the report (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a seeded random frame.
    Gen(GenArgs),
    /// Decide a retrievability or null space property.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Phaseless l1 minimization by sign-pattern enumeration.
    Solve(SolveArgs),
    /// Construct a k-sparse collision for a frame with m < 2k.
    Collide(FrameK),
    /// Budgeted randomized search for complex partition witnesses.
    #[command(subcommand)]
    Falsify(FalsifyCommand),
    /// Measurement-count threshold for k-sparse phase retrieval.
    Bounds(BoundsArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FrameField {
    Rational,
    Complex,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum BoundField {
    Real,
    Complex,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum, default_value = "rational")]
    field: FrameField,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Numerator bound for rational entries.
    #[arg(long, default_value_t = DEFAULT_NUMERATOR_BOUND)]
    bound: i64,
    /// Common denominator for rational entries.
    #[arg(long, default_value_t = 1)]
    denominator: i64,
    /// Complex frame with real entries.
    #[arg(long)]
    real_entries: bool,
    /// Output path; the frame goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FrameK {
    #[arg(long)]
    frame: PathBuf,
    #[arg(long)]
    k: usize,
}

#[derive(Args, Debug)]
struct FrameOnly {
    #[arg(long)]
    frame: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum PolicyArg {
    AllSubsets,
    CardinalityAtMostK,
}

#[derive(Args, Debug)]
struct PhaselessArgs {
    #[arg(long)]
    frame: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "all_subsets")]
    policy: PolicyArg,
    /// Seed of the randomized pre-screen.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run beyond the documented envelope (d <= 6, m <= 8).
    #[arg(long)]
    override_budget: bool,
}

#[derive(Subcommand, Debug)]
enum CheckCommand {
    /// k-sparse phase retrievability (exact).
    Ksparse(FrameK),
    /// Full phase retrievability via the complement property (exact).
    Full(FrameOnly),
    /// Classical null space property of order k (exact).
    Nsp(FrameK),
    /// Phaseless null space property of order k (exact).
    NspPhaseless(PhaselessArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false, id = "input")]
struct SolveInput {
    /// Magnitude file `{"b": [...]}`.
    #[arg(long)]
    b: Option<PathBuf>,
    /// Signal literal; its magnitudes are measured first.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    frame: PathBuf,
    #[command(flatten)]
    input: SolveInput,
    /// Largest m for sign-pattern enumeration.
    #[arg(long, default_value_t = phaseless::DEFAULT_PATTERN_CAP)]
    cap: usize,
}

#[derive(Args, Debug)]
struct FalsifyArgs {
    #[arg(long)]
    frame: PathBuf,
    #[arg(long)]
    budget: u64,
    #[arg(long)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum FalsifyCommand {
    /// Sparse l1 inequality (needs --k).
    Thm33 {
        #[command(flatten)]
        common: FalsifyArgs,
        #[arg(long)]
        k: usize,
    },
    /// Complex phase retrievability.
    Thm42 {
        #[command(flatten)]
        common: FalsifyArgs,
    },
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, value_enum)]
    field: BoundField,
}

/// Usage, I/O, budget and precondition failures.
#[derive(Debug)]
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

struct Outcome {
    exit: u8,
    echo: Value,
    body: Value,
    summary: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { EXIT_OK });
        }
    };
    if cli.jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return ExitCode::from(EXIT_ERROR);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build_global()
    {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_ERROR);
    }
    let started = Instant::now();
    match run(&cli.command) {
        Ok(out) => {
            let mut report = Map::new();
            report.insert("schema".into(), json!(SCHEMA));
            report.insert(
                "tool".into(),
                json!({"name": "prlab", "version": env!("CARGO_PKG_VERSION")}),
            );
            let mut echo = out.echo;
            echo["replay"] = json!(replay(&echo));
            report.insert("command".into(), echo);
            if let Value::Object(body) = out.body {
                report.extend(body);
            }
            if cli.timing {
                report.insert(
                    "timing_ms".into(),
                    json!(started.elapsed().as_secs_f64() * 1e3),
                );
            }
            let text = serde_json::to_string_pretty(&Value::Object(report)).expect("serializable");
            if writeln!(std::io::stdout().lock(), "{text}").is_err() {
                return ExitCode::from(EXIT_ERROR);
            }
            eprintln!("{}", out.summary);
            ExitCode::from(out.exit)
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

/// The echoed parameters as a `prlab` invocation.
fn replay(echo: &Value) -> String {
    let mut parts = vec!["prlab".to_string()];
    let Some(obj) = echo.as_object() else {
        return parts.join(" ");
    };
    if let Some(name) = obj.get("name").and_then(Value::as_str) {
        parts.push(name.to_string());
    }
    for (key, v) in obj.iter().filter(|(k, _)| k.as_str() != "name") {
        let flag = format!("--{}", key.replace('_', "-"));
        match v {
            Value::Bool(true) => parts.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => parts.extend([flag, s.clone()]),
            Value::Number(n) => parts.extend([flag, n.to_string()]),
            other => parts.extend([flag, format!("'{other}'")]),
        }
    }
    parts.join(" ")
}

fn run(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::Check(c) => check(c),
        Command::Solve(a) => solve(a),
        Command::Collide(a) => collide(a),
        Command::Falsify(f) => falsify(f),
        Command::Bounds(a) => bounds(a),
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn read_frame(path: &Path) -> Result<AnyFrame, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure(format!("reading {}: {e}", path.display())))?;
    Ok(io::parse_frame(&text)?)
}

fn read_rational_frame(path: &Path) -> Result<RationalFrame, Failure> {
    match read_frame(path)? {
        AnyFrame::Rational(f) => Ok(f),
        AnyFrame::Complex(_) => Err(Failure(format!(
            "{} is a complex frame; this command needs a rational frame",
            path.display()
        ))),
    }
}

fn read_complex_frame(path: &Path) -> Result<ComplexFrame, Failure> {
    Ok(match read_frame(path)? {
        AnyFrame::Rational(f) => ComplexFrame::from_real(&f),
        AnyFrame::Complex(f) => f,
    })
}

fn gen(a: &GenArgs) -> Result<Outcome, Failure> {
    if a.d == 0 || a.m == 0 {
        return Err(Failure("--d and --m must be at least 1".into()));
    }
    if a.bound < 1 || a.denominator < 1 {
        return Err(Failure(
            "--bound and --denominator must be at least 1".into(),
        ));
    }
    let frame = match a.field {
        FrameField::Rational => AnyFrame::Rational(random_frame_scaled(
            a.d,
            a.m,
            a.seed,
            a.bound,
            a.denominator,
        )?),
        FrameField::Complex if a.real_entries => {
            AnyFrame::Complex(complex::random_real_entried_frame(a.d, a.m, a.seed)?)
        }
        FrameField::Complex => AnyFrame::Complex(complex::random_complex_frame(a.d, a.m, a.seed)?),
    };
    let field = match a.field {
        FrameField::Rational => "rational",
        FrameField::Complex => "complex",
    };
    let mut echo = json!({
        "name": "gen", "d": a.d, "m": a.m, "field": field, "seed": a.seed,
        "bound": a.bound, "denominator": a.denominator, "real_entries": a.real_entries,
    });
    let doc = frame.to_json();
    let body = match &a.out {
        Some(out) => {
            let text = serde_json::to_string_pretty(&doc).expect("serializable") + "\n";
            fs::write(out, text).map_err(|e| Failure(format!("writing {}: {e}", out.display())))?;
            echo["out"] = json!(path_str(out));
            json!({"verdict": "written", "out": path_str(out), "d": frame.d(), "m": frame.m()})
        }
        None => json!({"verdict": "written", "frame": doc}),
    };
    Ok(Outcome {
        exit: EXIT_OK,
        summary: format!(
            "generated {field} frame d={} m={} seed={}",
            a.d, a.m, a.seed
        ),
        echo,
        body,
    })
}

/// Documented envelope of the exhaustive sparse check.
fn warn_envelope(f: &RationalFrame, k: usize) {
    if f.d() > 8 || f.m() > 12 || k > 3 {
        eprintln!(
            "warning: d={} m={} k={} is outside the tested envelope (d <= 8, m <= 12, k <= 3); this may take very long",
            f.d(),
            f.m(),
            k
        );
    }
}

fn check(c: &CheckCommand) -> Result<Outcome, Failure> {
    match c {
        CheckCommand::Ksparse(a) => {
            let f = read_rational_frame(&a.frame)?;
            warn_envelope(&f, a.k);
            let r = retrieval::is_k_sparse_pr_real(&f, a.k)?;
            if let Some(w) = &r.witness {
                w.validate(&f)?;
            }
            let ok = r.is_retrievable();
            Ok(Outcome {
                exit: if ok { EXIT_OK } else { EXIT_FAILS },
                echo: json!({"name": "check ksparse", "frame": path_str(&a.frame), "k": a.k}),
                body: io::retrievability_json(&r),
                summary: format!(
                    "{}-sparse phase retrievable: {} ({} of {} triples examined)",
                    a.k, ok, r.trace.examined, r.trace.total
                ),
            })
        }
        CheckCommand::Full(a) => {
            let f = read_rational_frame(&a.frame)?;
            let r = retrieval::is_full_pr_real(&f)?;
            if let Some(w) = &r.witness {
                w.validate(&f)?;
            }
            let ok = r.is_retrievable();
            Ok(Outcome {
                exit: if ok { EXIT_OK } else { EXIT_FAILS },
                echo: json!({"name": "check full", "frame": path_str(&a.frame)}),
                body: io::retrievability_json(&r),
                summary: format!(
                    "phase retrievable: {ok} ({} of {} splits examined)",
                    r.trace.examined, r.trace.total
                ),
            })
        }
        CheckCommand::Nsp(a) => {
            let f = read_rational_frame(&a.frame)?;
            let r = nsp::check_nsp_classical(&f, a.k)?;
            if let Some(w) = &r.violation {
                w.validate(&f, a.k)?;
            }
            Ok(Outcome {
                exit: if r.holds() { EXIT_OK } else { EXIT_FAILS },
                echo: json!({"name": "check nsp", "frame": path_str(&a.frame), "k": a.k}),
                body: io::nsp_report_json(&r, io::nsp_violation_json),
                summary: format!(
                    "null space property of order {}: {}",
                    a.k,
                    if r.holds() { "holds" } else { "fails" }
                ),
            })
        }
        CheckCommand::NspPhaseless(a) => {
            let f = read_rational_frame(&a.frame)?;
            let scope = match a.policy {
                PolicyArg::AllSubsets => SubsetScope::AllSubsets,
                PolicyArg::CardinalityAtMostK => SubsetScope::CardinalityAtMostK,
            };
            let opts = PhaselessOptions {
                policy: CheckPolicy { scope },
                override_budget: a.override_budget,
                prescreen_seed: a.seed,
                ..Default::default()
            };
            let r = nsp::check_nsp_phaseless_real_with(&f, a.k, opts)?;
            if let Some(w) = &r.violation {
                w.validate(&f, a.k)?;
            }
            Ok(Outcome {
                exit: if r.holds() { EXIT_OK } else { EXIT_FAILS },
                echo: json!({
                    "name": "check nsp-phaseless", "frame": path_str(&a.frame), "k": a.k,
                    "policy": scope.name(), "seed": a.seed, "override_budget": a.override_budget,
                }),
                body: io::nsp_report_json(&r, io::phaseless_violation_json),
                summary: format!(
                    "phaseless null space property of order {} ({}): {}",
                    a.k,
                    scope.name(),
                    if r.holds() { "holds" } else { "fails" }
                ),
            })
        }
    }
}

fn solve(a: &SolveArgs) -> Result<Outcome, Failure> {
    let f = read_rational_frame(&a.frame)?;
    let mut echo = json!({"name": "solve", "frame": path_str(&a.frame), "cap": a.cap});
    let (problem, x0) = match (&a.input.b, &a.input.x0) {
        (Some(bp), None) => {
            let text = fs::read_to_string(bp)
                .map_err(|e| Failure(format!("reading {}: {e}", bp.display())))?;
            echo["b"] = json!(path_str(bp));
            (
                PhaselessProblem::new(f, io::parse_magnitudes(&text)?)?,
                None,
            )
        }
        (None, Some(lit)) => {
            let x0 = io::parse_rational_vector(lit)?;
            echo["x0"] = io::scalars_json(&x0);
            (PhaselessProblem::from_signal(f, &x0)?, Some(x0))
        }
        _ => return Err(Failure("exactly one of --b and --x0 is required".into())),
    };
    let r = phaseless::solve_l1_phaseless_real_capped(&problem, a.cap)?;
    let mut body = io::argmin_json(&r);
    body["b"] = io::scalars_json(problem.b());
    let (exit, verdict, summary) = match &x0 {
        Some(x0) if r.recovers(x0) => (EXIT_OK, "recovered", "argmin is exactly {±x0}".to_string()),
        Some(_) => (
            EXIT_FAILS,
            "not_recovered",
            format!(
                "argmin is not {{±x0}}: {} minimizer class(es), {} nonpoint face(s)",
                r.minimizer_classes.len(),
                r.nonpoint_faces.len()
            ),
        ),
        None => (
            EXIT_OK,
            "solved",
            match &r.optimal_value {
                Some(_) => format!("{} minimizer class(es)", r.minimizer_classes.len()),
                None => "magnitudes are infeasible".to_string(),
            },
        ),
    };
    body["verdict"] = json!(verdict);
    Ok(Outcome {
        exit,
        echo,
        body,
        summary,
    })
}

fn collide(a: &FrameK) -> Result<Outcome, Failure> {
    let f = read_rational_frame(&a.frame)?;
    let w = retrieval::collide_below_2k(&f, a.k)?;
    w.validate(&f)?;
    Ok(Outcome {
        exit: EXIT_OK,
        echo: json!({"name": "collide", "frame": path_str(&a.frame), "k": a.k}),
        body: json!({"verdict": "collision", "witness": io::collision_json(&w)}),
        summary: format!("built a validated {}-sparse collision", a.k),
    })
}

fn falsify(c: &FalsifyCommand) -> Result<Outcome, Failure> {
    let (common, k, name) = match c {
        FalsifyCommand::Thm33 { common, k } => (common, Some(*k), "falsify thm33"),
        FalsifyCommand::Thm42 { common } => (common, None, "falsify thm42"),
    };
    let f = read_complex_frame(&common.frame)?;
    let out = match k {
        Some(k) => complex::search_thm33_witness(&f, k, common.budget, common.seed)?,
        None => complex::search_thm42_witness(&f, common.budget, common.seed)?,
    };
    if let Some(w) = &out.witness {
        let kind = match k {
            Some(k) => complex::WitnessKind::SparseL1 { k },
            None => complex::WitnessKind::Retrievability,
        };
        w.validate(&f, kind)?;
    }
    let mut echo = json!({
        "name": name, "frame": path_str(&common.frame), "budget": common.budget, "seed": common.seed,
    });
    if let Some(k) = k {
        echo["k"] = json!(k);
    }
    let summary = match &out.witness {
        Some(w) => format!(
            "partition witness found with p={} (residual {:.3e})",
            w.partition.len(),
            w.residual
        ),
        None => format!(
            "no witness within budget {} (inconclusive; this is not a proof)",
            common.budget
        ),
    };
    Ok(Outcome {
        exit: if out.inconclusive() {
            EXIT_INCONCLUSIVE
        } else {
            EXIT_FAILS
        },
        echo,
        body: io::search_json(&out),
        summary,
    })
}

fn bounds(a: &BoundsArgs) -> Result<Outcome, Failure> {
    let field = match a.field {
        BoundField::Real => FieldKind::Real,
        BoundField::Complex => FieldKind::Complex,
    };
    let b = retrieval::minimal_measurement_bound(a.k, a.d, field)?;
    let mut body = io::bound_json(&b);
    body["verdict"] = json!("computed");
    Ok(Outcome {
        exit: EXIT_OK,
        echo: json!({"name": "bounds", "k": a.k, "d": a.d, "field": body["field"].clone()}),
        summary: format!("m >= {} ({})", b.bound, b.status.tag()),
        body,
    })
}
