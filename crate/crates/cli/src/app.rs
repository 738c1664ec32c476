use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use pptmerge::classify::{self, ClassifyConfig};
use pptmerge::measures::{self, DEFAULT_PPT_TOL};
use pptmerge::ppt_opt::{self, GeometricDistillability, PptOptConfig, PptOptResult, StepRule, PURE_PATH_TOL};
use pptmerge::{families, sample, Bipartition, PureState};
use rayon::prelude::*;

use crate::cut::parse_cut;
use crate::error::{CliError, CliResult, EXIT_INCONSISTENT};
use crate::report::ReportFile;
use crate::statefile::{Labels, LoadedState, StateFile};

pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(
    name = "pptmerge",
    version,
    about = "Merging classification and PPT-set optimization for tripartite states"
)]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Tolerance for PPT tests and witness margins, or the optimizer tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Emit JSON, to the given path or to stdout when no path follows.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "-")]
    pub json: Option<PathBuf>,
    /// Worker threads across input files.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Party assignment `A:B:C` as index lists, e.g. `0:1:2` or `0,1:2:3`.
    #[arg(long, global = true)]
    pub labels: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a state from one of the built-in families.
    Generate {
        family: Family,
        /// Noise parameter of robust-vanishing.
        #[arg(long, default_value_t = 0.1)]
        p: f64,
        /// Number of copies of phi-plus.
        #[arg(long, default_value_t = 1)]
        copies: usize,
    },
    /// Evaluate one measure on a state file.
    Measure {
        state: PathBuf,
        measure: Measure,
        /// `A:BC` or `0,1:2`; defaults to `0:1` for two subsystems.
        #[arg(long)]
        cut: Option<String>,
    },
    /// Classify one or more labeled tripartite states.
    Classify {
        #[arg(required = true)]
        states: Vec<PathBuf>,
    },
    /// Geometric distillability relative to the PPT states.
    Geodist {
        state: PathBuf,
        #[arg(long)]
        cut: Option<String>,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Largest overlap of a pure state with a PPT state.
    Overlap {
        state: PathBuf,
        #[arg(long)]
        cut: Option<String>,
        #[command(flatten)]
        opt: OptArgs,
        /// Write the optimal PPT state here.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    SepNoMerge,
    RobustVanishing,
    PhiPlus,
    ProductExample,
    Ghz,
    ClassicalCorrelated,
    ProductPure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    Entropy,
    ConditionalEntropy,
    MutualInformation,
    LogNegativity,
    IsPpt,
    MinPtEigenvalue,
    HashingWitness,
    NegativityWitness,
    Purity,
    FidelityLowerBound,
    MergingCost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StepRuleArg {
    Fixed,
    Diminishing,
}

#[derive(Debug, Args)]
pub struct OptArgs {
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long, value_enum)]
    pub step_rule: Option<StepRuleArg>,
    #[arg(long)]
    pub step_size: Option<f64>,
    #[arg(long)]
    pub bisection_depth: Option<usize>,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return e.exit_code();
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    if let Some(tol) = cli.tol {
        if tol.is_nan() || tol <= 0.0 {
            return Err(CliError::usage(format!("--tol must be positive, got {tol}")));
        }
    }
    match &cli.command {
        Command::Generate { family, p, copies } => {
            let file = generate(*family, cli.seed, *p, *copies)?;
            emit(cli.out.as_deref(), stdout, &file.to_json())
        }
        Command::Measure { state, measure, cut } => cmd_measure(cli, state, *measure, cut.as_deref(), stdout),
        Command::Classify { states } => cmd_classify(cli, states, stdout, stderr),
        Command::Geodist { state, cut, opt } => cmd_geodist(cli, state, cut.as_deref(), opt, stdout, stderr),
        Command::Overlap {
            state,
            cut,
            opt,
            certificate,
        } => cmd_overlap(cli, state, cut.as_deref(), opt, certificate.as_deref(), stdout, stderr),
    }
}

fn emit(path: Option<&Path>, stdout: &mut dyn Write, text: &str) -> CliResult<()> {
    match path {
        Some(p) if p != Path::new("-") => {
            std::fs::write(p, text).map_err(|e| CliError::failure(format!("cannot write {}: {e}", p.display())))
        }
        _ => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::failure(format!("cannot write output: {e}"))),
    }
}

/// The state file for `family`; deterministic in `seed`.
pub fn generate(family: Family, seed: u64, p: f64, copies: usize) -> CliResult<StateFile> {
    Ok(match family {
        Family::SepNoMerge => StateFile::from_tripartite(&families::sep_no_merge_family(seed)?),
        Family::RobustVanishing => StateFile::from_tripartite(&families::robust_vanishing_family(p)?),
        Family::PhiPlus => {
            if copies == 0 {
                return Err(CliError::usage("--copies must be at least 1"));
            }
            let mut psi = families::phi_plus();
            for _ in 1..copies {
                psi = psi.tensor(&families::phi_plus())?;
            }
            StateFile::from_pure(&psi, None)
        }
        Family::ProductExample => StateFile::from_tripartite(&families::product_example(&families::phi_plus())?),
        Family::Ghz => StateFile::from_tripartite(&families::ghz()),
        Family::ClassicalCorrelated => StateFile::from_tripartite(&families::classical_correlated()),
        Family::ProductPure => {
            let mut rng = sample::rng_from_seed(seed);
            let mut qubit = || sample::random_pure(&[2], &mut rng);
            let (a, b, c) = (qubit()?, qubit()?, qubit()?);
            StateFile::from_tripartite(&families::product_pure(&a, &b, &c)?)
        }
    })
}

fn labels_override(cli: &Cli) -> CliResult<Option<Labels>> {
    cli.labels.as_deref().map(Labels::parse).transpose()
}

fn resolve_cut(spec: Option<&str>, n: usize, labels: Option<&Labels>) -> CliResult<Bipartition> {
    match spec {
        Some(spec) => parse_cut(spec, n, labels),
        None if n == 2 => parse_cut("0:1", n, None),
        None => Err(CliError::usage(format!("--cut is required for {n} subsystems"))),
    }
}

fn cmd_measure(cli: &Cli, path: &Path, measure: Measure, cut: Option<&str>, stdout: &mut dyn Write) -> CliResult<()> {
    let (file, _) = StateFile::read(path)?;
    let override_labels = labels_override(cli)?;
    let labels = override_labels.as_ref().or(file.labels.as_ref());
    let rho = file.load()?.to_density();
    let cut_for = || resolve_cut(cut, rho.n_subsystems(), labels);
    let tripartite = || file.tripartite(override_labels.as_ref());
    let tol = cli.tol.unwrap_or(DEFAULT_PPT_TOL);

    enum Value {
        Number(f64),
        Flag(bool),
    }
    let value = match measure {
        Measure::Entropy => Value::Number(measures::von_neumann_entropy(&rho)?),
        Measure::ConditionalEntropy => Value::Number(measures::conditional_entropy(&tripartite()?)?),
        Measure::MutualInformation => Value::Number(measures::mutual_information(&rho, &cut_for()?)?),
        Measure::LogNegativity => Value::Number(measures::log_negativity(&rho, &cut_for()?)?),
        Measure::IsPpt => Value::Flag(measures::is_ppt(&rho, &cut_for()?, tol)?),
        Measure::MinPtEigenvalue => Value::Number(measures::min_partial_transpose_eigenvalue(&rho, &cut_for()?)?),
        Measure::HashingWitness => Value::Number(measures::hashing_witness(&rho, &cut_for()?)?.value),
        Measure::NegativityWitness => Value::Number(measures::negativity_witness(&rho, &cut_for()?)?.value),
        Measure::Purity => Value::Number(rho.purity()),
        Measure::FidelityLowerBound => Value::Number(classify::fidelity_lower_bound(&tripartite()?)?),
        Measure::MergingCost => Value::Number(classify::merging_cost_pure(&tripartite()?)?),
    };

    let name = measure
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    if let Some(json_path) = &cli.json {
        let v = match value {
            Value::Number(x) => serde_json::json!(x),
            Value::Flag(b) => serde_json::json!(b),
        };
        let text = serde_json::json!({ "measure": name, "cut": cut, "value": v }).to_string() + "\n";
        return emit(Some(json_path), stdout, &text);
    }
    let text = match value {
        Value::Number(x) => format!("{x:.12}\n"),
        Value::Flag(b) => format!("{b}\n"),
    };
    emit(cli.out.as_deref(), stdout, &text)
}

/// Outcome of classifying one file.
pub struct Classified {
    pub path: PathBuf,
    pub report: CliResult<ReportFile>,
}

/// Classifies every file, `jobs` at a time, preserving input order.
pub fn classify_files(
    paths: &[PathBuf],
    labels: Option<&Labels>,
    seed: u64,
    config: ClassifyConfig,
    jobs: usize,
) -> Vec<Classified> {
    let one = |path: &PathBuf| Classified {
        path: path.clone(),
        report: classify_file(path, labels, seed, config),
    };
    match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool.install(|| paths.par_iter().map(one).collect()),
        Err(_) => paths.iter().map(one).collect(),
    }
}

fn classify_file(path: &Path, labels: Option<&Labels>, seed: u64, config: ClassifyConfig) -> CliResult<ReportFile> {
    let (file, bytes) = StateFile::read(path)?;
    let state = file.tripartite(labels)?;
    let report = classify::evaluate(&state, &config)?;
    Ok(ReportFile::new(
        &path.display().to_string(),
        &bytes,
        seed,
        config,
        report,
    ))
}

fn cmd_classify(cli: &Cli, paths: &[PathBuf], stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let labels = labels_override(cli)?;
    let config = cli.tol.map(ClassifyConfig::with_tol).unwrap_or_default();
    let results = classify_files(paths, labels.as_ref(), cli.seed, config, cli.jobs);

    let mut worst: Option<CliError> = None;
    let mut lines = String::new();
    let mut reports = Vec::new();
    for r in results {
        match r.report {
            Ok(report) => {
                if !report.consistency {
                    worst = Some(CliError {
                        code: EXIT_INCONSISTENT,
                        message: format!("{}: perfect-merging and vanishing criteria both hold", r.path.display()),
                    });
                }
                if paths.len() == 1 {
                    lines.push_str(&format!("{}\n", report.verdict));
                } else {
                    lines.push_str(&format!("{}\t{}\n", r.path.display(), report.verdict));
                }
                reports.push(report);
            }
            Err(e) => {
                if paths.len() > 1 {
                    let _ = writeln!(stderr, "error: {}: {}", r.path.display(), e.message);
                }
                if worst.as_ref().is_none_or(|w| w.code < e.code) {
                    worst = Some(e);
                }
            }
        }
    }

    let json_to_stdout = cli.json.as_deref() == Some(Path::new("-"));
    if let Some(json_path) = &cli.json {
        let text = if paths.len() == 1 && reports.len() == 1 {
            serde_json::to_string_pretty(&reports[0])
        } else {
            serde_json::to_string_pretty(&reports)
        }
        .map_err(|e| CliError::failure(format!("cannot serialize report: {e}")))?;
        emit(Some(json_path), stdout, &(text + "\n"))?;
    }
    if !json_to_stdout {
        emit(cli.out.as_deref(), stdout, &lines)?;
    }
    match worst {
        Some(e) if paths.len() == 1 || e.code == EXIT_INCONSISTENT => Err(e),
        Some(e) => Err(CliError {
            code: e.code,
            message: "some inputs failed".into(),
        }),
        None => Ok(()),
    }
}

fn opt_config(cli: &Cli, opt: &OptArgs, cut: Bipartition) -> CliResult<PptOptConfig> {
    let mut config = PptOptConfig::new(cut);
    if let Some(tol) = cli.tol {
        config.tol = tol;
    }
    if let Some(n) = opt.max_iters {
        config.max_iters = n;
    }
    if let Some(rule) = opt.step_rule {
        config.step_rule = match rule {
            StepRuleArg::Fixed => StepRule::Fixed,
            StepRuleArg::Diminishing => StepRule::Diminishing,
        };
    }
    if let Some(s) = opt.step_size {
        config.step_size = s;
    }
    if let Some(depth) = opt.bisection_depth {
        config.bisection_depth = depth;
    }
    config.validate()?;
    Ok(config)
}

fn diagnostics(stderr: &mut dyn Write, r: &PptOptResult) {
    let _ = writeln!(
        stderr,
        "iterations={} converged={} bisection={} residual_psd={:.3e} residual_ppt={:.3e} residual_trace={:.3e}",
        r.iterations, r.converged, r.used_bisection, r.residuals.psd, r.residuals.ppt, r.residuals.trace
    );
}

fn load_with_cut(cli: &Cli, path: &Path, cut: Option<&str>) -> CliResult<(LoadedState, Bipartition)> {
    let (file, _) = StateFile::read(path)?;
    let override_labels = labels_override(cli)?;
    let labels = override_labels.as_ref().or(file.labels.as_ref());
    let state = file.load()?;
    let cut = resolve_cut(cut, state.dims().len(), labels)?;
    Ok((state, cut))
}

fn cmd_geodist(
    cli: &Cli,
    path: &Path,
    cut: Option<&str>,
    opt: &OptArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<()> {
    let (state, cut) = load_with_cut(cli, path, cut)?;
    let config = opt_config(cli, opt, cut)?;
    let g = ppt_opt::geometric_distillability_ppt(&state.to_density(), &config)?;
    let (text, json) = match &g {
        GeometricDistillability::Exact { value, overlap } => {
            diagnostics(stderr, overlap);
            (
                format!("{value:.12}\n"),
                serde_json::json!({ "kind": "exact", "value": value, "converged": overlap.converged }),
            )
        }
        GeometricDistillability::Interval { lower, upper, distance } => {
            diagnostics(stderr, distance);
            let _ = writeln!(stderr, "trace_distance={:.12}", distance.value);
            (
                format!("{lower:.12} {upper:.12}\n"),
                serde_json::json!({
                    "kind": "interval",
                    "lower": lower,
                    "upper": upper,
                    "trace_distance": distance.value,
                    "converged": distance.converged,
                }),
            )
        }
    };
    match &cli.json {
        Some(p) => emit(Some(p), stdout, &(json.to_string() + "\n")),
        None => emit(cli.out.as_deref(), stdout, &text),
    }
}

fn cmd_overlap(
    cli: &Cli,
    path: &Path,
    cut: Option<&str>,
    opt: &OptArgs,
    certificate: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<()> {
    let (state, cut) = load_with_cut(cli, path, cut)?;
    let psi: PureState = match state {
        LoadedState::Pure(psi) => psi,
        LoadedState::Mixed(rho) => rho
            .to_pure(PURE_PATH_TOL)?
            .ok_or_else(|| CliError::usage("overlap needs a pure target state"))?,
    };
    let config = opt_config(cli, opt, cut)?;
    let r = ppt_opt::max_overlap_ppt(&psi, &config)?;
    diagnostics(stderr, &r);
    if let Some(p) = certificate {
        emit(
            Some(p),
            stdout,
            &StateFile::from_density(&r.certificate, None).to_json(),
        )?;
    }
    match &cli.json {
        Some(p) => {
            let json = serde_json::json!({ "overlap": r.value, "converged": r.converged, "iterations": r.iterations });
            emit(Some(p), stdout, &(json.to_string() + "\n"))
        }
        None => emit(cli.out.as_deref(), stdout, &format!("{:.12}\n", r.value)),
    }
}
