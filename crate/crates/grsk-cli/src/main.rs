//! `grsk`: apply the maps to JSON files, run verification suites, Monte Carlo
//! experiments and Whittaker-function evaluations.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error.

mod suites;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use grsk::exact_numerics::PosRational;
use grsk::grsk_core::{apply_grsk, invert_grsk, patterns_from_matrix};
use grsk::grsk_symmetric::apply_grsk_symmetric;
use grsk::grsk_triangular::apply_grsk_triangular;
use grsk::io;
use grsk::polymer_mc::{self, MeasureParams, McReport};
use grsk::tropical_rsk::{apply_tropical, invert_tropical};
use grsk::whittaker_eval::{self, QuadratureSpec, StadeKind, WhittakerParams};
use grsk::GrskError;

#[derive(Parser, Debug)]
#[command(name = "grsk", version, about = "Geometric RSK maps, identity checks and polymer experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// RNG seed for every randomized step.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply a map to a JSON matrix file.
    Apply {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Input JSON file.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Emit::Matrix)]
        emit: Emit,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: suites::Suite,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Pass threshold for the Whittaker identities; per-check defaults otherwise.
        #[arg(long)]
        tol: Option<f64>,
        /// Monte Carlo samples for the polymer suite.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Negative control: corrupt one local move in the core suite.
        #[arg(long, hide = true)]
        corrupt_local_move: bool,
    },
    /// Monte Carlo experiments on the weight measures.
    Polymer {
        #[command(subcommand)]
        action: PolymerAction,
    },
    /// Whittaker-function evaluation and identity checks.
    Whittaker {
        #[command(subcommand)]
        action: WhittakerAction,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Grsk,
    GrskInverse,
    Sym,
    Tri,
    Tropical,
    TropicalInverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Matrix,
    Patterns,
}

#[derive(Subcommand, Debug)]
enum PolymerAction {
    /// Reciprocal-weight means of the sampler against their gamma means.
    Sample(PolymerArgs),
    /// Shape-vector probes against the push-forward density.
    Verify(PolymerArgs),
    /// `z₁` of the triangular model against `2 t_{n-1,n-1}` of the symmetric one.
    Z1 {
        /// Comma-separated α, length n >= 2.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
}

#[derive(Args, Debug)]
struct PolymerArgs {
    #[arg(long, value_enum)]
    model: Model,
    /// JSON parameters; a random admissible draw when absent.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Model {
    Rect,
    Sym,
    Tri,
}

#[derive(Subcommand, Debug)]
enum WhittakerAction {
    /// Evaluate `Ψ_λ(x)` (or `Ψ_{λ;s}(x)` with `--s`).
    Eval {
        #[arg(long)]
        n: usize,
        /// Comma-separated complex values such as `0.5,-0.2+1i`.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        lambda: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        x: Vec<f64>,
        #[arg(long)]
        s: Option<String>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Check a gamma-product identity on random admissible parameters.
    Verify {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Dimension of the integral.
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Pass threshold on the relative error.
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Square,
    Rect,
    Bf,
}

/// Failure of a subcommand, mapped onto the exit code.
enum Failure {
    Usage(String),
    Verification,
}

impl From<GrskError> for Failure {
    fn from(e: GrskError) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn emit(global: &Global, text: &str) -> Outcome {
    match &global.out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &PathBuf) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn cmd_apply(global: &Global, mode: Mode, input: &PathBuf, emit_kind: Emit) -> Outcome {
    let text = read(input)?;
    let patterns = |t: &grsk::WeightMatrix<PosRational>| io::write_pattern_pair(&patterns_from_matrix(t));
    let out = match mode {
        Mode::Grsk | Mode::GrskInverse | Mode::Tropical | Mode::TropicalInverse => {
            let w = io::read_matrix(&text)?;
            let t = match mode {
                Mode::Grsk => {
                    w.check_positive()?;
                    apply_grsk(&w)
                }
                Mode::GrskInverse => invert_grsk(&w)?,
                Mode::Tropical => apply_tropical(&w),
                _ => invert_tropical(&w),
            };
            match emit_kind {
                Emit::Matrix => io::write_matrix(&t),
                Emit::Patterns => patterns(&t),
            }
        }
        Mode::Sym => {
            let w = io::read_symmetric(&text)?;
            w.check_positive()?;
            let t = apply_grsk_symmetric(&w);
            match emit_kind {
                Emit::Matrix => io::write_symmetric(&t),
                Emit::Patterns => patterns(&t.to_full()),
            }
        }
        Mode::Tri => {
            if emit_kind == Emit::Patterns {
                return Err(Failure::Usage("tri mode emits a triangular array only".into()));
            }
            let w = io::read_triangular(&text)?;
            w.check_positive()?;
            io::write_triangular(&apply_grsk_triangular(&w))
        }
    };
    emit(global, &out)
}

fn report_out(global: &Global, r: &McReport) -> Outcome {
    let text = match global.format {
        Format::Json => serde_json::to_string_pretty(r).expect("report serializes") + "\n",
        Format::Csv => r.to_csv(),
    };
    emit(global, &text)?;
    if r.pass {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn polymer_params(global: &Global, args: &PolymerArgs) -> std::result::Result<MeasureParams, Failure> {
    let p = match &args.params {
        Some(path) => serde_json::from_str::<MeasureParams>(&read(path)?)
            .map_err(|e| Failure::Usage(format!("bad parameter file: {e}")))?,
        None => {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(global.seed);
            let name = match args.model {
                Model::Rect => "rect",
                Model::Sym => "sym",
                Model::Tri => "tri",
            };
            polymer_mc::random_measure_params(name, &mut rng)?
        }
    };
    let matches = matches!(
        (&p, args.model),
        (MeasureParams::Rect { .. }, Model::Rect)
            | (MeasureParams::Sym { .. }, Model::Sym)
            | (MeasureParams::Tri { .. }, Model::Tri)
    );
    if !matches {
        return Err(Failure::Usage("parameter file model differs from --model".into()));
    }
    p.validate()?;
    Ok(p)
}

fn cmd_polymer(global: &Global, action: &PolymerAction) -> Outcome {
    let r = match action {
        PolymerAction::Sample(a) => {
            polymer_mc::sampler_mean_check(&polymer_params(global, a)?, a.samples, global.seed)?
        }
        PolymerAction::Verify(a) => {
            polymer_mc::pushforward_check(&polymer_params(global, a)?, a.samples, global.seed)?
        }
        PolymerAction::Z1 { alpha, samples } => {
            if alpha.len() < 2 {
                return Err(Failure::Usage("--alpha needs at least two values".into()));
            }
            polymer_mc::z1_symmetric_equivalence(alpha, *samples, global.seed)?
        }
    };
    report_out(global, &r)
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, Failure> {
    s.trim().parse::<Complex64>().map_err(|_| Failure::Usage(format!("not a complex number: {s:?}")))
}

fn cmd_whittaker(global: &Global, action: &WhittakerAction) -> Outcome {
    match action {
        WhittakerAction::Eval { n, lambda, x, s, tol } => {
            let lambda = lambda.iter().map(|v| parse_complex(v)).collect::<std::result::Result<Vec<_>, _>>()?;
            let s = s.as_deref().map(parse_complex).transpose()?;
            let params = WhittakerParams::new(*n, lambda, s)?;
            let r = params.eval(x, &QuadratureSpec::with_tol(*tol))?;
            let text = match global.format {
                Format::Json => {
                    serde_json::json!({"re": r.value.re, "im": r.value.im, "error": r.error}).to_string() + "\n"
                }
                Format::Csv => format!("re,im,error\n{:.16e},{:.16e},{:.16e}\n", r.value.re, r.value.im, r.error),
            };
            emit(global, &text)
        }
        WhittakerAction::Verify { kind, n, trials, tol } => {
            use rand::SeedableRng;
            let kind = match kind {
                Kind::Square => StadeKind::Square,
                Kind::Rect => StadeKind::Rectangular,
                Kind::Bf => StadeKind::BumpFriedberg,
            };
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(global.seed);
            let mut reports = Vec::with_capacity(*trials);
            for _ in 0..*trials {
                let p = whittaker_eval::random_stade_params(kind, *n, &mut rng);
                let mut r = whittaker_eval::stade_identity_check(kind, &p, &QuadratureSpec::default())?;
                if let Some(t) = tol {
                    r.tolerance = *t;
                    r.pass = r.rel_error <= *t;
                }
                reports.push(r);
            }
            let pass = reports.iter().all(|r| r.pass);
            let text = match global.format {
                Format::Json => serde_json::to_string_pretty(&reports).expect("reports serialize") + "\n",
                Format::Csv => {
                    let mut s = String::from("lhs,rhs,rel_error,pass\n");
                    for r in &reports {
                        s += &format!("{:.16e},{:.16e},{:.16e},{}\n", r.lhs, r.rhs, r.rel_error, r.pass);
                    }
                    s
                }
            };
            emit(global, &text)?;
            if pass {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
    }
}

fn configure_threads() -> std::result::Result<(), Failure> {
    if let Ok(v) = std::env::var("GRSK_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::Usage(format!("GRSK_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    configure_threads()?;
    let g = &cli.global;
    match &cli.cmd {
        Command::Apply { mode, input, emit } => cmd_apply(g, *mode, input, *emit),
        Command::Verify { suite, trials, tol, samples, corrupt_local_move } => {
            let opts = suites::Options {
                seed: g.seed,
                trials: *trials,
                tol: *tol,
                samples: *samples,
                corrupt: *corrupt_local_move,
            };
            let report = suites::run(*suite, &opts);
            let text = match g.format {
                Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
                Format::Csv => report.to_csv(),
            };
            // Human summary on stderr when the machine-readable report goes to stdout.
            if g.out.is_some() {
                print!("{}", report.human());
            } else {
                eprint!("{}", report.human());
            }
            emit(g, &text)?;
            if report.pass {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Polymer { action } => cmd_polymer(g, action),
        Command::Whittaker { action } => cmd_whittaker(g, action),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
