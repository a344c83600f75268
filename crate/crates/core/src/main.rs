use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use spdetect::detection::{adversarial_test, run_test, thresholds_for, TauRule, TestConfig};
use spdetect::experiments::{
    clique_detection_experiment, density_experiment, draws_csv, eta_grid, grid_csv, histogram,
    histogram_csv, lr_affinity_check, mp_edge_check, phase_svg, phase_transition, run_plan,
    CliqueConfig, ExperimentPlan, JsonSummary, PhaseTransitionConfig, Scaling,
};
use spdetect::matrix::{parse_matrix_text, write_matrix_text};
use spdetect::models::{planted_clique_graph, random_sparse_spike, ModelSpec, SpikeMode};
use spdetect::rng::Seed;
use spdetect::stats::{compute, SdpSolverConfig, StatKind, StatOptions, StepRule};
use spdetect::{fmt_f64, Error, SymMatrix};

const EXIT_INPUT: u8 = 2;
const EXIT_NONCONVERGED: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "spdetect", version, about = "Sparse principal component detection")]
struct Cli {
    /// Worker threads for experiments (default: all cores). Results do not
    /// depend on this value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a statistic on a matrix or a generated model.
    Stat(StatArgs),
    /// Run a detection test with the closed-form thresholds.
    Test(TestArgs),
    /// Monte Carlo experiments.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    /// Planted-clique detection through the Gaussianization.
    Clique(CliqueArgs),
    /// Draw data, a covariance matrix or a graph from a model.
    Generate(GenerateArgs),
}

#[derive(Subcommand, Debug)]
enum ExperimentCmd {
    /// Null vs spiked densities of the diagonal and MDP statistics.
    Figure1(Figure1Args),
    /// Type II error of MDP across sample sizes under both scalings.
    Figure2(Figure2Args),
    /// Top eigenvalue of null covariances against the Marcenko-Pastur edge.
    MpEdge(MpEdgeArgs),
    /// Monte Carlo check of the likelihood-ratio cross moments.
    LrCheck(LrCheckArgs),
    /// Two-arm experiment described by a JSON plan file.
    Custom(CustomArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Format {
    Json,
    Csv,
    Svg,
}

/// Solver settings shared by every command that evaluates a statistic.
#[derive(Args, Debug, Clone, Serialize)]
struct SolverArgs {
    /// SDP certified half-width.
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    /// SDP rounds.
    #[arg(long, default_value_t = 400)]
    max_outer: usize,
    /// ADMM iterations per SDP round.
    #[arg(long, default_value_t = 25)]
    max_inner: usize,
    /// SDP penalty rule: fixed or backtracking.
    #[arg(long, default_value = "backtracking")]
    step_rule: StepRule,
    /// MDP threshold grid size.
    #[arg(long, default_value_t = 512)]
    grid_size: usize,
    /// Largest number of subsets the exhaustive statistic may visit.
    #[arg(long, default_value_t = 10_000_000)]
    budget: u128,
}

impl SolverArgs {
    fn options(&self) -> StatOptions {
        StatOptions {
            grid_size: self.grid_size,
            sdp: SdpSolverConfig {
                eps: self.eps,
                max_outer: self.max_outer,
                max_inner: self.max_inner,
                step_rule: self.step_rule,
            },
            enumeration_budget: self.budget,
        }
    }
}

#[derive(Args, Debug, Serialize)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["matrix", "identity", "spiked", "model"])))]
struct StatArgs {
    /// Matrix file: first line p, then p rows.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Use the p x p identity.
    #[arg(long)]
    identity: Option<usize>,
    /// Spiked model, e.g. `p=50,k=5,theta=2,n=100`.
    #[arg(long)]
    spiked: Option<String>,
    /// Any model, as `kind:key=value,...` or JSON.
    #[arg(long)]
    model: Option<String>,
    /// Use the population covariance of --spiked instead of a sample.
    #[arg(long)]
    exact_cov: bool,
    #[arg(long)]
    stat: StatKind,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverArgs,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["matrix", "model"])))]
struct TestArgs {
    /// Data model, as `kind:key=value,...` or JSON.
    #[arg(long)]
    model: Option<String>,
    /// Precomputed covariance; requires --samples.
    #[arg(long, requires = "samples")]
    matrix: Option<PathBuf>,
    /// Sample size behind --matrix.
    #[arg(long = "samples")]
    samples: Option<usize>,
    #[arg(long)]
    stat: StatKind,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Signal strength for the alternative quantile (default: the model's).
    #[arg(long)]
    theta: Option<f64>,
    /// Threshold in [tau0, tau1]: null, alt or midpoint.
    #[arg(long, default_value = "null")]
    tau_rule: TauRule,
    /// Use the perturbation-robust level `1 + k sqrt(log(p/delta)/n)`.
    #[arg(long)]
    adversarial: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct Figure1Args {
    #[arg(long, default_value_t = 500)]
    p: usize,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 30)]
    k: usize,
    #[arg(long, default_value_t = 4.0)]
    theta: f64,
    #[arg(long, default_value_t = 1000)]
    n_trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverArgs,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct Figure2Args {
    /// Dimensions, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [50, 100, 200, 500])]
    p: Vec<usize>,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    #[arg(long, default_value_t = 200)]
    n_trials: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.01])]
    alpha: Vec<f64>,
    /// Smallest eta° on the log grid.
    #[arg(long, default_value_t = 0.01)]
    eta_min: f64,
    #[arg(long, default_value_t = 10.0)]
    eta_max: f64,
    #[arg(long, default_value_t = 16)]
    eta_count: usize,
    /// Skip grid points needing more samples than this.
    #[arg(long, default_value_t = 100_000)]
    n_max: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write SVG plots.
    #[arg(long)]
    plot: bool,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct MpEdgeArgs {
    #[arg(long, default_value_t = 200)]
    p: usize,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 50)]
    n_trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct LrCheckArgs {
    #[arg(long, default_value_t = 6)]
    p: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0.4)]
    theta: f64,
    /// Support overlaps, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0, 1, 2])]
    r: Vec<usize>,
    /// Monte Carlo samples per overlap.
    #[arg(long, default_value_t = 1_000_000)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct CustomArgs {
    /// JSON experiment plan.
    #[arg(long)]
    plan: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct CliqueArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also run SDP when n is at most this.
    #[arg(long, default_value_t = 20)]
    sdp_max_dim: usize,
    /// Compare the null arm with MDP on genuine Gaussian data.
    #[arg(long)]
    gaussian_reference: bool,
    #[command(flatten)]
    solver: SolverArgs,
    /// json (report) or csv (draws).
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Product {
    /// n x p data matrix.
    Data,
    /// Covariance matrix in the plain-text matrix format.
    Covariance,
    /// Edge list of the planted-clique graph.
    Graph,
}

#[derive(Args, Debug, Serialize)]
struct GenerateArgs {
    /// Model, as `kind:key=value,...` or JSON.
    #[arg(long)]
    model: String,
    #[arg(long, value_enum, default_value_t = Product::Data)]
    what: Product,
    /// csv or json; covariance and graph output are plain text.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure of a command, carrying its exit status.
enum Failure {
    Input(String),
    NotConverged(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotConverged { lower, upper, iterations } => {
                let body = serde_json::json!({
                    "error": "not_converged",
                    "lower": lower,
                    "upper": upper,
                    "iterations": iterations,
                });
                Failure::NotConverged(body.to_string())
            }
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads;
    if threads == Some(0) {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(EXIT_INPUT);
    }
    let outcome = match cli.command {
        Command::Stat(a) => cmd_stat(a),
        Command::Test(a) => cmd_test(a),
        Command::Experiment(e) => match e {
            ExperimentCmd::Figure1(a) => cmd_figure1(a, threads),
            ExperimentCmd::Figure2(a) => cmd_figure2(a, threads),
            ExperimentCmd::MpEdge(a) => cmd_mp_edge(a, threads),
            ExperimentCmd::LrCheck(a) => cmd_lr_check(a, threads),
            ExperimentCmd::Custom(a) => cmd_custom(a, threads),
        },
        Command::Clique(a) => cmd_clique(a, threads),
        Command::Generate(a) => cmd_generate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::NotConverged(body)) => {
            println!("{body}");
            eprintln!("error: solver did not converge; certified interval printed");
            ExitCode::from(EXIT_NONCONVERGED)
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Writes to `out` or, when absent, to stdout.
fn emit(out: Option<&Path>, body: &str) -> CmdResult {
    match out {
        Some(path) => fs::write(path, body)?,
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, body)?;
    Ok(path)
}

fn read_matrix(path: &Path) -> Result<SymMatrix, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(parse_matrix_text(&text)?)
}

fn parse_model(s: &str) -> Result<ModelSpec, Failure> {
    Ok(s.parse::<ModelSpec>()?)
}

fn cmd_stat(a: StatArgs) -> CmdResult {
    let opts = a.solver.options();
    let seed = Seed::new(a.seed, 0);
    let matrix = if let Some(path) = &a.matrix {
        read_matrix(path)?
    } else if let Some(p) = a.identity {
        SymMatrix::identity(p)
    } else if let Some(kv) = &a.spiked {
        if a.exact_cov {
            spiked_population(kv, seed)?
        } else {
            parse_model(&format!("spiked:{kv}"))?.covariance(seed)?
        }
    } else {
        let model = parse_model(a.model.as_deref().unwrap_or_default())?;
        if a.exact_cov {
            return Err(Failure::Input("--exact-cov applies to --spiked only".into()));
        }
        model.covariance(seed)?
    };
    let value = compute(a.stat, &matrix, a.k, &opts)?;
    let doc = JsonSummary::new("stat", &a, &value);
    emit(a.out.as_deref(), &to_json(&doc))
}

/// `I + theta v v^T` for the spike the spiked model would draw with `seed`.
fn spiked_population(kv: &str, seed: Seed) -> Result<SymMatrix, Failure> {
    let mut p = None;
    let mut k = None;
    let mut theta = None;
    let mut mode = SpikeMode::FixedSupport;
    for item in kv.split(',').filter(|t| !t.trim().is_empty()) {
        let (key, val) = item
            .split_once('=')
            .ok_or_else(|| Failure::Input(format!("expected key=value, got {item:?}")))?;
        let bad = |e: &dyn std::fmt::Display| Failure::Input(format!("{key}: {e}"));
        match key.trim() {
            "p" => p = Some(val.trim().parse::<usize>().map_err(|e| bad(&e))?),
            "k" => k = Some(val.trim().parse::<usize>().map_err(|e| bad(&e))?),
            "theta" => theta = Some(val.trim().parse::<f64>().map_err(|e| bad(&e))?),
            "mode" => mode = val.trim().parse()?,
            "n" => {}
            other => return Err(Failure::Input(format!("unknown spiked parameter {other:?}"))),
        }
    }
    let missing = |name: &str| Failure::Input(format!("--spiked needs {name}"));
    let (p, k, theta) = (p.ok_or_else(|| missing("p"))?, k.ok_or_else(|| missing("k"))?, theta.ok_or_else(|| missing("theta"))?);
    // same seed path as ModelSpec::Spiked, so the sample and the population agree
    Ok(random_sparse_spike(p, k, theta, mode, seed.child(1))?.covariance())
}

fn model_theta(m: &ModelSpec) -> f64 {
    match *m {
        ModelSpec::Spiked { theta, .. }
        | ModelSpec::SubGaussian { theta, .. }
        | ModelSpec::Lq { theta, .. }
        | ModelSpec::Adversarial { theta, .. } => theta,
        ModelSpec::Null { .. } | ModelSpec::Clique { .. } => 0.0,
    }
}

#[derive(Serialize)]
struct TestOutput<T: Serialize> {
    thresholds: Option<spdetect::detection::Thresholds>,
    report: T,
}

fn cmd_test(a: TestArgs) -> CmdResult {
    let opts = a.solver.options();
    let (matrix, n, model_th) = match (&a.model, &a.matrix) {
        (Some(m), _) => {
            let model = parse_model(m)?;
            (model.covariance(Seed::new(a.seed, 0))?, model.n(), model_theta(&model))
        }
        (None, Some(path)) => (read_matrix(path)?, a.samples.unwrap_or_default(), 0.0),
        (None, None) => unreachable!("clap enforces a source"),
    };
    let cfg = TestConfig {
        p: matrix.dim(),
        n,
        k: a.k,
        delta: a.delta,
        theta: a.theta.unwrap_or(model_th),
        statistic: a.stat,
    };
    cfg.validate()?;
    let body = if a.adversarial {
        let report = adversarial_test(&matrix, &cfg, &opts)?;
        to_json(&JsonSummary::new("test", &a, TestOutput { thresholds: None, report }))
    } else {
        let t = thresholds_for(&cfg)?;
        let tau = a.tau_rule.pick(&t);
        let report = run_test(compute(a.stat, &matrix, a.k, &opts)?, tau, &cfg)?;
        to_json(&JsonSummary::new("test", &a, TestOutput { thresholds: Some(t), report }))
    };
    emit(a.out.as_deref(), &body)
}

fn cmd_figure1(a: Figure1Args, threads: Option<usize>) -> CmdResult {
    let r = density_experiment(a.p, a.n, a.k, a.theta, a.n_trials, a.seed, &a.solver.options(), threads)?;
    let mut hists = Vec::new();
    for s in [StatKind::Diag, StatKind::Mdp] {
        for h in [0u8, 1] {
            let v: Vec<f64> = r.draws.iter().filter(|d| d.hypothesis == h && d.statistic == s).map(|d| d.value).collect();
            hists.push((s, h, histogram(&v, 100)?));
        }
    }
    write_file(&a.out, "figure1_draws.csv", &draws_csv(&r.draws))?;
    write_file(&a.out, "figure1_hist.csv", &histogram_csv(&hists))?;
    write_file(&a.out, "figure1.json", &to_json(&JsonSummary::new("experiment figure1", &a, &r.overlap)))?;
    for o in &r.overlap {
        println!(
            "figure1: {} alt draws below the null {} quantile: {}",
            o.statistic,
            1.0 - o.alpha,
            fmt_f64(o.alt_below)
        );
    }
    Ok(())
}

fn cmd_figure2(a: Figure2Args, threads: Option<usize>) -> CmdResult {
    if !(a.eta_min > 0.0 && a.eta_max >= a.eta_min) || a.eta_count == 0 {
        return Err(Failure::Input("need 0 < eta-min <= eta-max and eta-count >= 1".into()));
    }
    let cfg = PhaseTransitionConfig {
        ps: a.p.clone(),
        theta: a.theta,
        trials: a.n_trials,
        alphas: a.alpha.clone(),
        eta_circ: eta_grid(a.eta_min, a.eta_max, a.eta_count),
        n_max: a.n_max,
        seed: a.seed,
        options: a.solver.options(),
    };
    let r = phase_transition(&cfg, threads)?;
    write_file(&a.out, "figure2_grid.csv", &grid_csv(&r.points))?;
    write_file(&a.out, "figure2.json", &to_json(&JsonSummary::new("experiment figure2", &a, &r)))?;
    if a.plot {
        write_file(&a.out, "figure2_star.svg", &phase_svg(&r.points, Scaling::Star))?;
        write_file(&a.out, "figure2_circ.svg", &phase_svg(&r.points, Scaling::Circ))?;
    }
    for c in &r.crossings {
        let eta = c.eta.map_or("none".to_string(), fmt_f64);
        println!("figure2: p={} alpha={} {:?} crossing {}", c.p, c.alpha, c.scaling, eta);
    }
    Ok(())
}

fn cmd_mp_edge(a: MpEdgeArgs, threads: Option<usize>) -> CmdResult {
    let r = mp_edge_check(a.p, a.n, a.n_trials, a.seed, threads)?;
    write_file(&a.out, "mp_edge.json", &to_json(&JsonSummary::new("experiment mp-edge", &a, &r)))?;
    println!(
        "mp-edge: mean lambda_max {} predicted edge {}",
        fmt_f64(r.mean_lambda_max),
        fmt_f64(r.predicted_edge)
    );
    Ok(())
}

#[derive(Serialize)]
struct LrRow {
    r: usize,
    #[serde(flatten)]
    check: spdetect::experiments::LrCheck,
}

fn cmd_lr_check(a: LrCheckArgs, threads: Option<usize>) -> CmdResult {
    let mut rows = Vec::new();
    for &r in &a.r {
        let seed = Seed::new(a.seed, 0).child(r as u64).master;
        let check = lr_affinity_check(a.p, a.k, a.theta, r, a.m, seed, threads)?;
        println!(
            "lr-check: r={r} estimate {} closed form {} std error {}",
            fmt_f64(check.mc_estimate),
            fmt_f64(check.closed_form),
            fmt_f64(check.std_error)
        );
        rows.push(LrRow { r, check });
    }
    write_file(&a.out, "lr_check.json", &to_json(&JsonSummary::new("experiment lr-check", &a, &rows)))?;
    Ok(())
}

fn cmd_custom(a: CustomArgs, threads: Option<usize>) -> CmdResult {
    let text = fs::read_to_string(&a.plan).map_err(|e| Failure::Input(format!("{}: {e}", a.plan.display())))?;
    let plan: ExperimentPlan =
        serde_json::from_str(&text).map_err(|e| Failure::Input(format!("bad plan: {e}")))?;
    let r = run_plan(&plan, threads)?;
    write_file(&a.out, "custom_draws.csv", &draws_csv(&r.draws))?;
    write_file(&a.out, "custom.json", &to_json(&JsonSummary::new("experiment custom", &plan, &r.levels)))?;
    for l in &r.levels {
        println!(
            "custom: {} alpha={} tau={} type1={} type2={}",
            l.statistic,
            l.alpha,
            fmt_f64(l.tau),
            fmt_f64(l.type1),
            fmt_f64(l.type2)
        );
    }
    Ok(())
}

fn cmd_clique(a: CliqueArgs, threads: Option<usize>) -> CmdResult {
    let cfg = CliqueConfig {
        sdp_max_dim: a.sdp_max_dim,
        gaussian_reference: a.gaussian_reference,
        options: a.solver.options(),
        ..CliqueConfig::new(a.n, a.k, a.trials, a.delta, a.seed)
    };
    let r = clique_detection_experiment(&cfg, threads)?;
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    let body = match a.format {
        Format::Json => to_json(&JsonSummary::new("clique", &a, &r)),
        Format::Csv => {
            let mut s = String::from("trial_id,hypothesis,statistic,value\n");
            for (h, draws) in [(0, &r.null_draws), (1, &r.planted_draws)] {
                for (t, v) in draws.iter().enumerate() {
                    s.push_str(&format!("{t},H{h},mdp,{}\n", fmt_f64(*v)));
                }
            }
            s
        }
        Format::Svg => return Err(Failure::Input("clique output is json or csv".into())),
    };
    emit(a.out.as_deref(), &body)
}

fn cmd_generate(a: GenerateArgs) -> CmdResult {
    let model = parse_model(&a.model)?;
    let seed = Seed::new(a.seed, 0);
    let body = match a.what {
        Product::Data => {
            let x = model.sample(seed)?;
            match a.format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    x.write_csv(&mut buf)?;
                    String::from_utf8(buf).expect("ascii")
                }
                Format::Json => {
                    let rows: Vec<&[f64]> = x.rows().collect();
                    to_json(&JsonSummary::new("generate", &a, rows))
                }
                Format::Svg => return Err(Failure::Input("data output is csv or json".into())),
            }
        }
        Product::Covariance => write_matrix_text(&model.covariance(seed)?),
        Product::Graph => {
            let ModelSpec::Clique { n, k } = model else {
                return Err(Failure::Input("--what graph needs a clique model".into()));
            };
            // same seed path as the clique model's sampler
            let g = planted_clique_graph(n, k, seed.child(1))?;
            let mut buf = Vec::new();
            g.write_edge_list(&mut buf)?;
            String::from_utf8(buf).expect("ascii")
        }
    };
    emit(a.out.as_deref(), &body)
}
