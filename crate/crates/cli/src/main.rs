//! `tiso`: command-line front end for tensor isomorphism decisions, gap
//! experiments and hypergraph tests.
//!
//! Exit codes: 0 YES or success, 1 NO, 2 cannot decide, 3 usage error,
//! 4 runtime error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use tensor_iso::decision::{decide, verify_witness, Decision, DecisionConfig, DecisionMode, Verdict};
use tensor_iso::gaplab::{
    emit_csv, run_gap_experiment, run_tensor_gram_experiment, GapExperiment, GapReport, Perturbation,
};
use tensor_iso::hypergraph::{decide_hypergraph_iso, relabel, PermTriple, TripartiteHypergraph};
use tensor_iso::tensor::{load_tensor, load_witness, save_tensor, save_witness};
use tensor_iso::{
    apply_action, sample_haar_triple, sample_tensor, Distribution, Error, RandomModel, ScalarKind,
};

const EXIT_USAGE: u8 = 3;
const EXIT_RUNTIME: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "tiso", version, about = "Tensor isomorphism testing under orthogonal and unitary actions")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print a single JSON document on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Suppress human-readable output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random tensor, transform an existing one, or generate a hypergraph.
    Gen(GenArgs),
    /// Decide whether two tensors lie in the same orbit.
    Iso(IsoArgs),
    /// Gapped orbit-distance decision (same as `iso --mode gapped`).
    Dist(DistArgs),
    /// Monte-Carlo eigenvalue-gap experiment.
    Gaps(GapsArgs),
    /// Decide isomorphism of two tripartite hypergraphs.
    Hyper(HyperArgs),
    /// Recompute the residual of a witness triple.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Real,
    Complex,
}

impl From<KindArg> for ScalarKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Real => ScalarKind::Real,
            KindArg::Complex => ScalarKind::Complex,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Gaussian,
    Rademacher,
    UniformPm,
}

impl From<ModelArg> for Distribution {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Gaussian => Distribution::Gaussian,
            ModelArg::Rademacher => Distribution::Rademacher,
            ModelArg::UniformPm => Distribution::UniformPm,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Gapped,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Tensor dimensions (or hypergraph part sizes with --hyper).
    #[arg(long, num_args = 3, value_names = ["L", "M", "N"])]
    dims: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value_t = ModelArg::Gaussian)]
    model: ModelArg,
    #[arg(long, value_enum, default_value_t = KindArg::Real)]
    kind: KindArg,
    /// Output file (`.json` for JSON, T3B otherwise; text for hypergraphs).
    #[arg(long)]
    out: PathBuf,
    /// Start from this tensor (or hypergraph with --hyper) instead of sampling.
    #[arg(long)]
    from: Option<PathBuf>,
    /// Apply a Haar-random orthogonal/unitary triple drawn from --seed.
    #[arg(long)]
    haar: bool,
    /// Multiply the result by this factor.
    #[arg(long)]
    scale: Option<f64>,
    /// Add a Gaussian perturbation with this Frobenius norm.
    #[arg(long)]
    noise: Option<f64>,
    /// Where to store the Haar triple used by --haar.
    #[arg(long)]
    witness_out: Option<PathBuf>,
    /// Work with hypergraphs: sample one with --dims, or relabel --from randomly.
    #[arg(long)]
    hyper: bool,
    /// With --hyper: toggle this 1-based edge after relabelling.
    #[arg(long, num_args = 3, value_names = ["I", "J", "K"])]
    toggle: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
struct DecisionArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    /// Distance parameter for the gapped decision.
    #[arg(long)]
    eps: Option<f64>,
    /// Use this gap instead of measuring it from A.
    #[arg(long)]
    delta: Option<f64>,
    /// Truncation precision in bits.
    #[arg(long)]
    precision_bits: Option<u32>,
    /// Constant in the gamma bound.
    #[arg(long)]
    c_gamma: Option<f64>,
    /// Print all six spectra.
    #[arg(long)]
    dump_spectra: bool,
    /// Save the witness triple (`.json` for JSON, T3B blocks otherwise).
    #[arg(long)]
    witness_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct IsoArgs {
    #[command(flatten)]
    common: DecisionArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
}

#[derive(Args, Debug)]
struct DistArgs {
    #[command(flatten)]
    common: DecisionArgs,
}

#[derive(Args, Debug)]
struct GapsArgs {
    /// Rows of each sampled matrix (or tensor side with --tensor).
    #[arg(long)]
    n: usize,
    /// Columns as p = floor(n^zeta).
    #[arg(long, conflicts_with = "p")]
    zeta: Option<f64>,
    /// Explicit column count.
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, default_value_t = tensor_iso::gaplab::PILOT_BETA)]
    beta: f64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = ModelArg::Gaussian)]
    model: ModelArg,
    #[arg(long, value_enum, default_value_t = KindArg::Real)]
    kind: KindArg,
    /// Prediction constant multiplying the gap scale.
    #[arg(long, default_value_t = tensor_iso::gaplab::PILOT_C_TEST)]
    c_test: f64,
    /// Write per-trial rows and the aggregate footer here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Sample n x n x n tensors and use the three mode Gram matrices.
    #[arg(long)]
    tensor: bool,
    /// Perturbation size around --base.
    #[arg(long, requires = "base")]
    eta: Option<f64>,
    /// Base tensor for the perturbed model.
    #[arg(long, requires = "eta")]
    base: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct HyperArgs {
    #[arg(long)]
    g: PathBuf,
    #[arg(long)]
    h: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long)]
    witness: PathBuf,
    /// Exit with 1 when the residual exceeds this value.
    #[arg(long)]
    tol: Option<f64>,
}

struct Ctx {
    seed: u64,
    json: bool,
    quiet: bool,
}

impl Ctx {
    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet && !self.json {
            write_stdout(line.as_ref());
        }
    }

    fn emit(&self, doc: &Value) -> Result<(), Failure> {
        if self.json {
            let text = serde_json::to_string_pretty(doc).map_err(|e| Failure::Runtime(e.to_string()))?;
            write_stdout(&text);
        }
        Ok(())
    }
}

/// Writes one line to stdout; a closed pipe on the reader side is not an error.
fn write_stdout(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ConfigInvalid(_) | Error::EpsOutOfRange { .. } => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let ctx = Ctx {
        seed: cli.seed,
        json: cli.json,
        quiet: cli.quiet,
    };
    let result = match &cli.command {
        Command::Gen(args) => run_gen(&ctx, args),
        Command::Iso(args) => run_decision(&ctx, &args.common, args.mode, "iso"),
        Command::Dist(args) => run_decision(&ctx, &args.common, ModeArg::Gapped, "dist"),
        Command::Gaps(args) => run_gaps(&ctx, args),
        Command::Hyper(args) => run_hyper(&ctx, args),
        Command::Verify(args) => run_verify(&ctx, args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("usage: tiso [--seed N] [--json] [--quiet] <gen|iso|dist|gaps|hyper|verify> [flags]");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn dims3(v: &Option<Vec<usize>>, what: &str) -> Result<[usize; 3], Failure> {
    match v.as_deref() {
        Some(&[a, b, c]) => Ok([a, b, c]),
        _ => Err(Failure::Usage(format!("{what} requires --dims L M N"))),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn run_gen(ctx: &Ctx, args: &GenArgs) -> Outcome {
    if args.hyper {
        return run_gen_hyper(ctx, args);
    }
    if args.toggle.is_some() {
        return Err(Failure::Usage("--toggle only applies with --hyper".into()));
    }
    if args.from.is_some() && args.dims.is_some() {
        return Err(Failure::Usage("--dims and --from are mutually exclusive".into()));
    }
    if args.witness_out.is_some() && !args.haar {
        return Err(Failure::Usage("--witness-out requires --haar".into()));
    }
    if let Some(eta) = args.noise {
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Failure::Usage(format!("--noise must be non-negative, got {eta}")));
        }
    }
    let kind: ScalarKind = args.kind.into();
    let mut t = match &args.from {
        Some(path) => load_tensor(path)?,
        None => {
            let dims = dims3(&args.dims, "gen")?;
            sample_tensor(dims, &RandomModel::new(args.model.into(), kind, ctx.seed))?
        }
    };
    if args.haar {
        let g = sample_haar_triple(t.dims(), t.kind(), ctx.seed);
        t = apply_action(&g, &t)?;
        if let Some(w) = &args.witness_out {
            save_witness(&g, w)?;
        }
    }
    if let Some(c) = args.scale {
        t = t.scaled(c);
    }
    if let Some(eta) = args.noise {
        // independent of the draws above: a separate seed for the noise tensor
        let model = RandomModel::new(Distribution::Gaussian, t.kind(), ctx.seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
        let e = sample_tensor(t.dims(), &model)?;
        let norm = e.frobenius_norm();
        if norm > 0.0 {
            t = t.add(&e.scaled(eta / norm))?;
        }
    }
    save_tensor(&t, &args.out)?;
    ctx.say(format!(
        "wrote {} tensor {:?} (norm {:.6}) to {}",
        t.kind(),
        t.dims(),
        t.frobenius_norm(),
        args.out.display()
    ));
    ctx.emit(&json!({
        "command": "gen",
        "out": args.out.display().to_string(),
        "dims": t.dims(),
        "kind": t.kind(),
        "seed": ctx.seed,
        "frobenius_norm": t.frobenius_norm(),
    }))?;
    Ok(0)
}

fn run_gen_hyper(ctx: &Ctx, args: &GenArgs) -> Outcome {
    if args.haar || args.scale.is_some() || args.noise.is_some() || args.witness_out.is_some() {
        return Err(Failure::Usage("--haar, --scale, --noise and --witness-out do not apply with --hyper".into()));
    }
    let (g, perms) = match &args.from {
        Some(path) => {
            if args.dims.is_some() {
                return Err(Failure::Usage("--dims and --from are mutually exclusive".into()));
            }
            let base = TripartiteHypergraph::parse(&read_text(path)?)?;
            let pi = PermTriple::random(base.sizes(), ctx.seed);
            (relabel(&base, &pi)?, Some(pi))
        }
        None => (TripartiteHypergraph::random(dims3(&args.dims, "gen --hyper")?, ctx.seed)?, None),
    };
    let g = match args.toggle.as_deref() {
        Some(&[i, j, k]) if i > 0 && j > 0 && k > 0 => g.toggled((i - 1, j - 1, k - 1))?,
        Some(_) => return Err(Failure::Usage("--toggle takes three 1-based indices".into())),
        None => g,
    };
    fs::write(&args.out, g.to_text()).map_err(|e| Failure::Runtime(format!("{}: {e}", args.out.display())))?;
    ctx.say(format!(
        "wrote hypergraph {:?} with {} edges to {}",
        g.sizes(),
        g.edges().len(),
        args.out.display()
    ));
    ctx.emit(&json!({
        "command": "gen",
        "out": args.out.display().to_string(),
        "sizes": g.sizes(),
        "edges": g.edges().len(),
        "seed": ctx.seed,
        "permutations": perms.map(|p| p.one_based()),
    }))?;
    Ok(0)
}

#[derive(Serialize)]
struct DecisionReport<'a> {
    command: &'a str,
    #[serde(flatten)]
    decision: &'a Decision,
}

fn run_decision(ctx: &Ctx, args: &DecisionArgs, mode: ModeArg, command: &str) -> Outcome {
    let mut cfg = match mode {
        ModeArg::Exact => DecisionConfig::exact(),
        ModeArg::Gapped => {
            let eps = args
                .eps
                .ok_or_else(|| Failure::Usage("the gapped decision requires --eps".into()))?;
            DecisionConfig::gapped(eps)
        }
    };
    if let (ModeArg::Exact, Some(eps)) = (mode, args.eps) {
        cfg.eps = eps;
    }
    cfg.delta_override = args.delta;
    cfg.precision_bits = args.precision_bits;
    if let Some(c) = args.c_gamma {
        cfg.c_gamma = c;
    }
    let a = load_tensor(&args.a)?;
    let b = load_tensor(&args.b)?;
    let d = decide(&a, &b, &cfg)?;
    if let (Some(path), Some(w)) = (&args.witness_out, &d.witness) {
        save_witness(w, path)?;
    }

    let verdict = match d.verdict {
        Verdict::Yes => "YES",
        Verdict::No => "NO",
        Verdict::CannotDecide => "CANNOT DECIDE",
    };
    let mode_name = match cfg.mode {
        DecisionMode::ExactIso => "exact",
        DecisionMode::GappedDistance => "gapped",
    };
    ctx.say(format!("{verdict} ({mode_name})"));
    if let Some(r) = d.residual {
        ctx.say(format!("residual     {r:.6e}"));
    }
    ctx.say(format!("gamma_bound  {:.6e}", d.gamma_bound));
    if let Some(step) = d.diagnostics.rejected_at {
        ctx.say(format!(
            "stopped at   {step}: {}",
            d.diagnostics.reason.as_deref().unwrap_or("")
        ));
    }
    if args.dump_spectra {
        for (name, spectra) in [("A", &d.diagnostics.spectra_a), ("B", &d.diagnostics.spectra_b)] {
            for (m, s) in spectra.iter().enumerate() {
                let vals: Vec<String> = s.eigenvalues.iter().map(|x| format!("{x:.10e}")).collect();
                ctx.say(format!("spectrum {name} mode {}: {}", m + 1, vals.join(" ")));
            }
        }
    }
    let doc = serde_json::to_value(DecisionReport {
        command,
        decision: &d,
    })
    .map_err(|e| Failure::Runtime(e.to_string()))?;
    ctx.emit(&doc)?;
    Ok(d.verdict.exit_code() as u8)
}

fn run_gaps(ctx: &Ctx, args: &GapsArgs) -> Outcome {
    if args.threads == Some(0) {
        return Err(Failure::Usage("--threads must be at least 1".into()));
    }
    let model = RandomModel::new(args.model.into(), args.kind.into(), ctx.seed);
    let perturbation = match (&args.base, args.eta) {
        (Some(path), Some(eta)) => Some(Perturbation {
            base: load_tensor(path)?,
            eta,
        }),
        _ => None,
    };
    let job = || -> Result<GapReport, Error> {
        if args.tensor {
            run_tensor_gram_experiment(args.n, model, args.trials, perturbation.as_ref())
        } else {
            let cfg = match (&perturbation, args.zeta, args.p) {
                (Some(p), _, _) => GapExperiment::perturbed(p.base.clone(), p.eta, args.beta, args.trials, model)?,
                (None, Some(z), None) => GapExperiment::with_zeta(args.n, z, args.beta, args.trials, model)?,
                (None, None, Some(p)) => GapExperiment::with_p(args.n, p, args.beta, args.trials, model)?,
                _ => return Err(Error::ConfigInvalid("give exactly one of --zeta and --p".into())),
            };
            let cfg = cfg.with_constants(tensor_iso::gaplab::PredictionConstants {
                c_test: args.c_test,
                ..Default::default()
            });
            run_gap_experiment(&cfg)
        }
    };
    let report = match args.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Failure::Runtime(e.to_string()))?
            .install(job)?,
        None => job()?,
    };
    if let Some(path) = &args.csv {
        emit_csv(&report, path)?;
    }
    let a = &report.aggregate;
    ctx.say(format!(
        "n = {}  p = {}  trials = {}  simple = {:.4}",
        report.n, report.p, a.trials, a.simple_frequency
    ));
    if let Some(m) = a.median_min_gap {
        ctx.say(format!("median min gap  {m:.6e}"));
    }
    if let (Some(t), Some(e)) = (a.target, a.empirical_prob) {
        ctx.say(format!("P[gap >= {t:.4e}] = {e:.4}"));
    }
    if let Some(b) = a.bound_prob {
        ctx.say(format!("predicted lower bound on that probability  {b:.4}"));
    }
    let mut doc = serde_json::to_value(&report).map_err(|e| Failure::Runtime(e.to_string()))?;
    doc["command"] = json!("gaps");
    ctx.emit(&doc)?;
    Ok(0)
}

fn run_hyper(ctx: &Ctx, args: &HyperArgs) -> Outcome {
    let g = TripartiteHypergraph::parse(&read_text(&args.g)?)?;
    let h = TripartiteHypergraph::parse(&read_text(&args.h)?)?;
    let d = decide_hypergraph_iso(&g, &h)?;
    match (&d.verdict, &d.perms) {
        (Verdict::Yes, Some(p)) => {
            ctx.say("YES");
            ctx.say(p.to_string().trim_end());
        }
        (Verdict::No, _) => ctx.say(format!("NO: {}", d.reason.as_deref().unwrap_or(""))),
        _ => ctx.say(format!("CANNOT DECIDE: {}", d.reason.as_deref().unwrap_or(""))),
    }
    let mut doc = serde_json::to_value(&d).map_err(|e| Failure::Runtime(e.to_string()))?;
    doc["command"] = json!("hyper");
    ctx.emit(&doc)?;
    Ok(d.verdict.exit_code() as u8)
}

fn run_verify(ctx: &Ctx, args: &VerifyArgs) -> Outcome {
    let a = load_tensor(&args.a)?;
    let b = load_tensor(&args.b)?;
    let g = load_witness(&args.witness)?;
    let check = verify_witness(&a, &b, &g)?;
    let within = args.tol.is_none_or(|t| check.residual <= t);
    ctx.say(format!("residual          {:.6e}", check.residual));
    ctx.say(format!("unitarity defect  {:.6e}", check.unitarity_defect));
    if !check.unitary_ok {
        ctx.say("warning: witness factors are not unitary");
    }
    let mut doc = serde_json::to_value(check).map_err(|e| Failure::Runtime(e.to_string()))?;
    doc["command"] = json!("verify");
    doc["within_tolerance"] = json!(within);
    ctx.emit(&doc)?;
    Ok(if within { 0 } else { 1 })
}
