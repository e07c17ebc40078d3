//! Command-line front end.
//!
//! Exit codes: `0` when everything passed, `1` when an experiment ran
//! but at least one inequality row failed, `2` for configuration or
//! parameter errors (including malformed command lines, which clap
//! also reports as `2`).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fracsob::quadrature::{full_norm, gagliardo_seminorm, holder_seminorm, lp_norm};
use fracsob::schwartz::class_membership_report;
use fracsob::spectral::{forward_transform_strict, fourier_seminorm, weak_fractional_norm};
use fracsob::{
    builtin_corpus, sample, DomainSpec, Exponent, Grid, NormParams, NormReport, NormValue,
    QuadratureConfig, SampledFunction,
};

use fracsob_harness::config::{parse_domain, parse_exponent, parse_weight};
use fracsob_harness::error::{HarnessError, Result};
use fracsob_harness::{
    convergence_sweep, density_experiment, embedding_experiment, extension_experiment,
    write_artifacts, ExperimentConfig,
};

#[derive(Parser)]
#[command(
    name = "fracsob",
    version,
    about = "Fractional-norm measurements and inequality experiments over a fixed corpus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure one norm of one corpus member; prints the report as JSON.
    Norm(NormArgs),
    /// Rapid-decay class diagnostics; prints one report per member.
    ClassCheck(ClassCheckArgs),
    /// Embedding measurements: order drop, Lebesgue and Hölder ratios.
    Embed(RunArgs),
    /// Mollified-cutoff approximation ladder.
    Density(RunArgs),
    /// Zero-extension and smooth-cutoff operator survey.
    Extend(RunArgs),
    /// Norms across a resolution ladder with convergence orders.
    Sweep(RunArgs),
    /// Corpus inspection.
    Corpus(CorpusArgs),
}

#[derive(Args)]
struct NormArgs {
    /// Corpus member id.
    #[arg(long = "fn")]
    function: String,
    /// Smoothness order.
    #[arg(long)]
    beta: f64,
    /// Integrability exponent: a number or "inf".
    #[arg(long)]
    p: String,
    /// Weight on the integrand: "classical" or "ultra".
    #[arg(long, default_value = "ultra")]
    weight: String,
    /// Box as "lo:hi" (one axis) or "lo:hi,lo:hi" (two axes).
    #[arg(long, allow_hyphen_values = true)]
    domain: String,
    /// Grid spacing.
    #[arg(long)]
    h: f64,
    /// Reading: "full", "gagliardo", "holder", "fourier", or "weak".
    #[arg(long, default_value = "full")]
    mode: String,
    /// Add the closed-form kernel tail beyond the box, reading the
    /// samples as a function on the whole space (one axis, classical
    /// weight only).
    #[arg(long)]
    exterior_tail: bool,
    /// Add the local-linear correction over the punctured diagonal band.
    #[arg(long)]
    diagonal_correction: bool,
    /// Refuse inputs whose samples have not decayed at the box boundary.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct ClassCheckArgs {
    /// Corpus member id; all members when omitted.
    #[arg(long = "fn")]
    function: Option<String>,
    /// Largest weight order to test (1 to 4).
    #[arg(long, default_value_t = 4)]
    max_p: u32,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Escalate boundary-decay warnings to errors.
    #[arg(long)]
    strict: bool,
    /// Output directory; overrides the config (the environment
    /// variable FRACSOB_OUTPUT_DIR overrides both).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CorpusArgs {
    #[command(subcommand)]
    command: CorpusCommand,
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Print the corpus version and every member id.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(passed)`: `false` means the run completed but an inequality row
/// failed. Anything unrunnable is an `Err` (exit 2).
fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Norm(args) => {
            run_norm(args)?;
            Ok(true)
        }
        Command::ClassCheck(args) => {
            run_class_check(args)?;
            Ok(true)
        }
        Command::Embed(args) => run_experiment(ExperimentKind::Embed, args),
        Command::Density(args) => run_experiment(ExperimentKind::Density, args),
        Command::Extend(args) => run_experiment(ExperimentKind::Extend, args),
        Command::Sweep(args) => run_experiment(ExperimentKind::Sweep, args),
        Command::Corpus(args) => {
            let CorpusCommand::List = args.command;
            run_corpus_list();
            Ok(true)
        }
    }
}

fn run_norm(args: &NormArgs) -> Result<()> {
    let member = builtin_corpus().get(&args.function)?;
    let weight = parse_weight(&args.weight)?;
    let p = parse_exponent(&args.p)?;
    let domain = parse_domain(&args.domain)?;
    let params = NormParams::new(args.beta, p, domain.dim(), weight)?;
    let grid = Grid::from_domain(&domain, args.h)?;
    let u = sample(member, &grid)?;
    if args.strict {
        // the strict transform applies the library's boundary-decay
        // policy; a non-decayed input aborts before any value is printed
        forward_transform_strict(&u)?;
    }
    let quad = QuadratureConfig {
        diagonal_correction: args.diagonal_correction,
        exterior_tail: args.exterior_tail,
        ..QuadratureConfig::default()
    };
    let report = match args.mode.as_str() {
        "full" => match params.p {
            Exponent::Finite(_) => full_norm(&u, &params, &domain, &quad)?,
            Exponent::Infinity => sup_full_norm(&u, &params, &domain)?,
        },
        "gagliardo" => gagliardo_seminorm(&u, &params, &domain, &quad)?,
        "holder" => holder_seminorm(&u, params.beta, &domain, weight)?,
        "fourier" => fourier_seminorm(&u, &params)?,
        "weak" => weak_fractional_norm(&u, &params, &domain)?,
        other => {
            return Err(HarnessError::config(format!(
                "bad mode '{other}' (full, gagliardo, holder, fourier, or weak)"
            )))
        }
    };
    println!("{}", report.to_json());
    Ok(())
}

/// The supremum-exponent combined norm: the sup norm plus the
/// Hölder-type seminorm, reported additively like the finite case.
fn sup_full_norm(
    u: &SampledFunction,
    params: &NormParams,
    domain: &DomainSpec,
) -> Result<NormReport> {
    params.require_fractional()?;
    let sup = lp_norm(u, Exponent::Infinity, domain)?;
    let holder = holder_seminorm(u, params.beta, domain, params.weight_mode)?;
    let semi = holder.finite_value()?;
    let mut report = NormReport::new(
        NormValue::Finite(sup + semi),
        params,
        holder.h,
        holder.puncture,
        holder.error_estimate,
    );
    report.lp_part = Some(sup);
    report.seminorm_part = Some(semi);
    Ok(report)
}

fn run_class_check(args: &ClassCheckArgs) -> Result<()> {
    let corpus = builtin_corpus();
    let ids: Vec<String> = match &args.function {
        Some(id) => vec![id.clone()],
        None => corpus.ids().iter().map(|s| s.to_string()).collect(),
    };
    let mut reports = Vec::with_capacity(ids.len());
    for id in &ids {
        let member = corpus.get(id)?;
        reports.push(class_membership_report(member, args.max_p)?);
    }
    println!("{}", serde_json::to_string_pretty(&reports).expect("reports serialize"));
    Ok(())
}

enum ExperimentKind {
    Embed,
    Density,
    Extend,
    Sweep,
}

fn run_experiment(kind: ExperimentKind, args: &RunArgs) -> Result<bool> {
    let mut cfg = ExperimentConfig::from_file(&args.config)?;
    if args.strict {
        cfg.strict = true;
    }
    if let Some(dir) = &args.output {
        cfg.output = Some(dir.clone());
    }
    let result = match kind {
        ExperimentKind::Embed => embedding_experiment(&cfg)?,
        ExperimentKind::Density => density_experiment(&cfg)?,
        ExperimentKind::Extend => extension_experiment(&cfg)?,
        ExperimentKind::Sweep => convergence_sweep(&cfg)?,
    };
    let files = write_artifacts(&result, &cfg.output_dir())?;
    let (pass, fail, skip) = result.counts();
    println!(
        "{}: {} rows ({pass} pass, {fail} fail, {skip} skip)",
        result.experiment,
        result.rows.len()
    );
    println!("wrote {}", files.csv.display());
    println!("wrote {}", files.json.display());
    println!("verdict: {}", if result.passed { "pass" } else { "fail" });
    Ok(result.passed)
}

fn run_corpus_list() {
    let corpus = builtin_corpus();
    println!("{}", corpus.version);
    for id in corpus.ids() {
        println!("{id}");
    }
}
