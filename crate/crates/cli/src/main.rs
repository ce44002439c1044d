use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fredholm_core::extension::{kk_defect, point_index_report, realization, relative_pair_report};
use fredholm_core::family::{
    k1_lagrangian_loop_index_with_depth, winding_number_with_depth, SampledLoop, WindingReport, MAX_REFINE_DEPTH,
};
use fredholm_core::grassmann::pair_index;
use fredholm_core::io::{decode_index_instance, decode_loop, IndexInstance, LoopFile};
use fredholm_core::verify::{self, Suite, VerifyConfig};
use fredholm_core::{Error, IdentityReport, Matrix64, Subspace64, SymplecticSpace64, Tolerance64};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "fredholm-lab", version, about = "Index computations and randomized identity checks for extension theory")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Relative rank threshold.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_rank: f64,
    /// Absolute gap/equality threshold.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_gap: f64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Index of a pair of subspaces, an operator pair with boundary
    /// condition, or a nested pair with a test subspace.
    Index { file: PathBuf },
    /// Randomized identity checks.
    Verify(VerifyArgs),
    /// Winding number of a loop of unitaries or Lagrangian subspaces.
    Winding(WindingArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite to run: grassmann, extension, symplectic, homotopy, family or all.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, env = "FREDHOLM_LAB_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    dim_max: usize,
    /// Corrupt one projector in the given trial (testing the harness).
    #[arg(long, hide = true, num_args = 0..=1, default_missing_value = "0")]
    fault_inject: Option<usize>,
}

#[derive(Args)]
struct WindingArgs {
    /// Loop file; omit when using --builtin.
    #[arg(required_unless_present = "builtin", conflicts_with = "builtin")]
    file: Option<PathBuf>,
    /// Maximal bisection depth for under-sampled intervals (generated loops only).
    #[arg(long, default_value_t = MAX_REFINE_DEPTH)]
    refine_max: usize,
    /// Generated loop instead of a file.
    #[arg(long, value_enum)]
    builtin: Option<Builtin>,
    #[arg(long, default_value_t = 64)]
    samples: usize,
    /// Planted winding of the generated loop.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    w: i64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    /// `x ↦ e^{2πiwx}` on C¹.
    Phase,
    /// The line at angle `πwx` in C ⊕ C against `H ⊕ 0`.
    RotatingLine,
}

/// Exit status: 0 pass, 1 verification failure, 2 invalid input.
enum Failure {
    Verification(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::FormulaViolation(_)
            | Error::NotClosed { .. }
            | Error::InsufficientSampling { .. }
            | Error::NonconstantDefect { .. } => Failure::Verification(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("fredholm-lab: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("fredholm-lab: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let tol = Tolerance64::new(cli.common.tol_rank, cli.common.tol_gap)?;
    if let Some(n) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Input(format!("--threads: {e}")))?;
    }
    match &cli.command {
        Command::Index { file } => cmd_index(file, &cli.common, &tol),
        Command::Verify(args) => cmd_verify(args, &cli.common, tol),
        Command::Winding(args) => cmd_winding(args, &cli.common, &tol),
    }
}

fn emit(common: &Common, text: &str) -> Result<(), Failure> {
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(common: &Common, value: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    emit(common, &text)
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn checked(report: IdentityReport) -> Result<Value, Failure> {
    let value = serde_json::to_value(&report).expect("serializable");
    Ok(json!({ "passed": report.passed(), "checks": value["checks"] }))
}

fn cmd_index(file: &Path, common: &Common, tol: &Tolerance64) -> Result<(), Failure> {
    let instance = decode_index_instance(&read_json(file)?, tol)?;
    let (out, passed) = match instance {
        IndexInstance::Pair { s, t } => {
            let r = pair_index(&s, &t, tol);
            let out = json!({
                "kind": "pair",
                "ambient": s.ambient_dim(),
                "dim_s": s.dim(),
                "dim_t": t.dim(),
                "dim_cap": r.dim_cap,
                "codim_sum": r.codim_sum,
                "index": r.index,
                "transversal": r.transversal,
            });
            (out, true)
        }
        IndexInstance::Operator { op, l } => {
            let real = realization(&op, &l, tol)?;
            let report = point_index_report(&op, &l, tol)?;
            let passed = report.passed();
            let out = json!({
                "kind": "operator",
                "n": op.space_dim(),
                "dim_l": l.dim(),
                "dim_kernel": real.kernel.dim(),
                "dim_cokernel": real.coker_dim,
                "index": real.index,
                "formula": checked(report)?,
            });
            (out, passed)
        }
        IndexInstance::Nested { pair, m, l } => {
            let big = pair_index(&pair.pull_back(&l)?, &m, tol);
            let pos = pair.classify(&m);
            let mut report = kk_defect(&pair, &m, &l)?;
            report.extend(relative_pair_report(&pair, &m, &l)?);
            let passed = report.passed();
            let out = json!({
                "kind": "nested",
                "ambient": pair.ambient_dim(),
                "dim_k": pos.dim_cap_min,
                "dim_k_prime": pos.def_max,
                "transversal": pos.transversal,
                "index": big.index,
                "formula": checked(report)?,
            });
            (out, passed)
        }
    };
    emit_json(common, &out)?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification("index identities violated".into()))
    }
}

fn cmd_verify(args: &VerifyArgs, common: &Common, tol: Tolerance64) -> Result<(), Failure> {
    let suites = if args.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![args.suite.parse::<Suite>()?]
    };
    let cfg = VerifyConfig {
        seed: args.seed,
        trials: args.trials,
        dim_max: args.dim_max,
        tol,
        suites,
        fault_trial: args.fault_inject,
    };
    let report = verify::run(&cfg)?;
    match common.format {
        Format::Json => emit_json(common, &serde_json::to_value(&report).expect("serializable"))?,
        Format::Csv => {
            let mut csv = String::from("suite,trial,stream,checks,failed,error\n");
            for f in &report.failures {
                let failed: Vec<&str> = f.failures.iter().map(|c| c.name.as_str()).collect();
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    f.suite.name(),
                    f.trial,
                    f.stream,
                    f.checks,
                    failed.join(";"),
                    f.error.as_deref().unwrap_or("").replace(',', ";")
                ));
            }
            emit(common, &csv)?;
        }
    }
    if report.passed {
        eprintln!("fredholm-lab: {} checks passed", report.total_checks);
        Ok(())
    } else {
        let first = &report.failures[0];
        Err(Failure::Verification(format!(
            "{} failing trial(s); first: suite {} trial {} (seed {}, stream {})",
            report.failed_trials,
            first.suite.name(),
            first.trial,
            report.seed,
            first.stream
        )))
    }
}

fn line(theta: f64) -> Subspace64 {
    let m = Matrix64::from_column_slice(2, 1, &[theta.cos().into(), theta.sin().into()]);
    Subspace64::span(&m, &Tolerance64::default()).expect("unit vector")
}

fn phase(w: i64, x: f64) -> Matrix64 {
    Matrix64::from_element(1, 1, fredholm_core::C::from_polar(1.0, TAU * w as f64 * x))
}

fn cmd_winding(args: &WindingArgs, common: &Common, tol: &Tolerance64) -> Result<(), Failure> {
    if args.samples < 2 {
        return Err(Failure::Input("--samples must be at least 2".into()));
    }
    let report: WindingReport = match (&args.file, args.builtin) {
        (_, Some(Builtin::Phase)) => {
            let gen = |x: f64| Ok(phase(args.w, x));
            let family = SampledLoop::from_fn(args.samples, |x| phase(args.w, x));
            winding_number_with_depth(&family, Some(&gen), args.refine_max, tol)?
        }
        (_, Some(Builtin::RotatingLine)) => {
            let sp = SymplecticSpace64::standard(1, tol);
            let angle = |x: f64| PI * args.w as f64 * x;
            let gen = |x: f64| Ok(line(angle(x)));
            let family = SampledLoop::from_fn(args.samples, |x| line(angle(x)));
            k1_lagrangian_loop_index_with_depth(&sp, &family, &line(0.0), Some(&gen), args.refine_max)?
        }
        (Some(file), None) => match decode_loop(&read_json(file)?, tol)? {
            LoopFile::Unitary(family) => winding_number_with_depth(&family, None, args.refine_max, tol)?,
            LoopFile::Lagrangian { space, family, m } => {
                k1_lagrangian_loop_index_with_depth(&space, &family, &m, None, args.refine_max)?
            }
        },
        (None, None) => unreachable!("clap requires a file or --builtin"),
    };
    match common.format {
        Format::Json => emit_json(common, &serde_json::to_value(&report).expect("serializable")),
        Format::Csv => emit(common, &report.trace_csv()),
    }
}
