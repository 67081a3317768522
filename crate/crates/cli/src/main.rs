use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qreal::checks::{check_physical_realizability, extract_hamiltonian, synthesize_storage, FockSettings};
use qreal::fock::{concordance, oracle_conditions, OracleCheck};
use qreal::{parse_model, render_model, CheckKind, CheckOptions, Mode, ParseOptions, QsdeModel, DEFAULT_TOL};
use serde::Serialize;

mod text;

/// Exit codes: 0 when every selected check passes, 1 when one fails, 2 on
/// parse or configuration errors.
#[derive(Parser)]
#[command(name = "qreal", version, about = "Physical realizability checks for nonlinear quantum stochastic models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run condition checks on a model file.
    Check {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated checks to run.
        #[arg(long, value_delimiter = ',', conflicts_with = "all")]
        checks: Vec<CheckArg>,
        /// Run every check (the default).
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        oracle: OracleArgs,
        /// Also evaluate the drift identity and Hamiltonian with the ungraded diag(Θ, Θ*)⁻¹.
        #[arg(long)]
        audit: bool,
    },
    /// Print n̄, the Hamiltonian H̄ and the coupling vector L̄.
    Extract {
        #[command(flatten)]
        input: InputArgs,
        /// Extract even when the model is not physically realizable.
        #[arg(long)]
        force: bool,
    },
    /// Re-verify the symbolic identities with truncated Fock-space matrices.
    Oracle {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long = "fock-n", default_value_t = 6)]
        fock_n: usize,
        #[arg(long, default_value_t = 4)]
        guard: usize,
    },
    /// Print the model in canonical form.
    Render {
        #[command(flatten)]
        input: InputArgs,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Model file.
    file: PathBuf,
    #[arg(long)]
    json: bool,
    /// Comparison tolerance for floating coefficients.
    #[arg(long, env = "QREAL_TOL", default_value_t = DEFAULT_TOL, value_parser = positive)]
    tol: f64,
    /// Rational coefficients (default).
    #[arg(long, conflicts_with = "float")]
    exact: bool,
    /// Floating-point coefficients.
    #[arg(long)]
    float: bool,
}

#[derive(Args)]
struct OracleArgs {
    /// Confirm each verdict with the Fock oracle.
    #[arg(long)]
    oracle: bool,
    #[arg(long = "fock-n", default_value_t = 6, requires = "oracle")]
    fock_n: usize,
    #[arg(long, default_value_t = 4, requires = "oracle")]
    guard: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckArg {
    Class,
    Preserve,
    Realize,
    Lossless,
    Storage,
    All,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn load(input: &InputArgs) -> Result<QsdeModel, Failure> {
    let text = fs::read_to_string(&input.file).map_err(|e| Failure(format!("{}: {e}", input.file.display())))?;
    let mode = if input.float && !input.exact { Mode::Float } else { Mode::Exact };
    parse_model(&text, &ParseOptions { mode, tol: input.tol })
        .map_err(|e| Failure(format!("{}: {e}", input.file.display())))
}

fn check_oracle_settings(n: usize, guard: usize) -> Result<(), Failure> {
    if n < 3 {
        return Err(Failure(format!("--fock-n must be at least 3, got {n}")));
    }
    if guard >= n {
        return Err(Failure(format!("--guard {guard} must be below --fock-n {n}")));
    }
    Ok(())
}

fn emit_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn verdict(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run_check(input: &InputArgs, checks: &[CheckArg], oracle: &OracleArgs, audit: bool) -> Result<ExitCode, Failure> {
    if oracle.oracle {
        check_oracle_settings(oracle.fock_n, oracle.guard)?;
    }
    let model = load(input)?;
    let kinds: Vec<CheckKind> = if checks.is_empty() || checks.contains(&CheckArg::All) {
        CheckKind::ALL.to_vec()
    } else {
        CheckKind::ALL
            .into_iter()
            .filter(|k| checks.iter().any(|c| c.to_possible_value().is_some_and(|v| v.get_name() == k.name())))
            .collect()
    };
    let positivity = oracle.oracle.then_some(FockSettings { truncation: oracle.fock_n, guard: oracle.guard });
    let opts = CheckOptions { audit_literal_theta: audit, positivity };
    let mut report = qreal::run_checks(&model, &kinds, &opts)?;
    if oracle.oracle {
        let phi = match model.phi() {
            Some(p) => Some(p.clone()),
            None => synthesize_storage(&model, &opts)?,
        };
        let numeric = concordance(&model, phi.as_ref(), oracle.fock_n, oracle.guard)?;
        for c in oracle_conditions(&report, &numeric) {
            report.push(c);
        }
    }
    if input.json {
        emit_json(&report)?;
    } else {
        print!("{}", text::report(&report));
    }
    Ok(verdict(report.overall))
}

#[derive(Serialize)]
struct Extraction {
    model_id: String,
    realizable: bool,
    nbar: u32,
    hbar: String,
    hbar_self_adjoint: bool,
    lbar: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<String>,
}

fn run_extract(input: &InputArgs, force: bool) -> Result<ExitCode, Failure> {
    let model = load(input)?;
    if model.drift().is_zero() {
        return Err(qreal::Error::ZeroDrift.into());
    }
    let report = check_physical_realizability(&model, &CheckOptions::default())?;
    let failing: Vec<&str> = report.failing().map(|c| c.condition_id.as_str()).collect();
    let warning = (!report.overall).then(|| format!("model is not physically realizable (failing: {})", failing.join(", ")));
    if let (Some(w), false) = (&warning, force) {
        eprintln!("error: {w}; pass --force to extract anyway");
        return Ok(ExitCode::from(1));
    }
    let doubled = model.double();
    let h = extract_hamiltonian(&model)?;
    let out = Extraction {
        model_id: report.model_id.clone(),
        realizable: report.overall,
        nbar: doubled.nbar()?,
        hbar_self_adjoint: h.is_self_adjoint(),
        hbar: h.to_string(),
        lbar: doubled.output().entries().iter().map(ToString::to_string).collect(),
        warning,
    };
    if let Some(w) = &out.warning {
        eprintln!("warning: {w}");
    }
    if input.json {
        emit_json(&out)?;
    } else {
        println!("nbar = {}", out.nbar);
        println!("H = {}", out.hbar);
        println!("H self-adjoint: {}", text::yes_no(out.hbar_self_adjoint));
        for (i, l) in out.lbar.iter().enumerate() {
            println!("L[{}] = {l}", i + 1);
        }
    }
    Ok(verdict(out.realizable))
}

#[derive(Serialize)]
struct OracleRun {
    model_id: String,
    truncation: usize,
    guard: usize,
    checks: Vec<OracleCheck>,
    overall: bool,
}

fn run_oracle(input: &InputArgs, fock_n: usize, guard: usize) -> Result<ExitCode, Failure> {
    check_oracle_settings(fock_n, guard)?;
    let model = load(input)?;
    let phi = match model.phi() {
        Some(p) => Some(p.clone()),
        None => synthesize_storage(&model, &CheckOptions::default())?,
    };
    let checks = concordance(&model, phi.as_ref(), fock_n, guard)?;
    let run = OracleRun {
        model_id: model.name.clone().unwrap_or_else(|| "model".into()),
        truncation: fock_n,
        guard,
        overall: checks.iter().all(|c| c.pass),
        checks,
    };
    if input.json {
        emit_json(&run)?;
    } else {
        println!("model {} (N = {fock_n}, guard {guard})", run.model_id);
        for c in &run.checks {
            println!("  {}  {:<24} max deviation {:.1e}", text::pass_fail(c.pass), c.id, c.max_deviation);
        }
        println!("overall {}", text::pass_fail(run.overall));
    }
    Ok(verdict(run.overall))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check { input, checks, all: _, oracle, audit } => run_check(input, checks, oracle, *audit),
        Command::Extract { input, force } => run_extract(input, *force),
        Command::Oracle { input, fock_n, guard } => run_oracle(input, *fock_n, *guard),
        Command::Render { input } => load(input).map(|m| {
            print!("{}", render_model(&m));
            ExitCode::SUCCESS
        }),
    };
    result.unwrap_or_else(|Failure(msg)| {
        eprintln!("error: {msg}");
        ExitCode::from(2)
    })
}
