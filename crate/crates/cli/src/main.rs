use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;

use netstruct_core::experiment::{run_experiment, split_seed, ExperimentId, ExperimentSpec, GridPoint, Scale};
use netstruct_core::io::{
    self as nio, read_communities, read_graph, read_metadata, read_partition, ColorsFile, CommunitiesFile,
    CommunityKind, SCHEMA_VERSION,
};
use netstruct_core::metrics::ThetaScore;
use netstruct_core::{
    conductance_ratio, detect_all_c, detect_e, detect_m, empirical_criterion, entropy_ratio, gen_er, gen_homophyly,
    gen_pa, modularity, predict, prediction_curve, verify_structure, AttributedGraph, Error, HomophylyParams,
    PprParams, StopParams, StructureConfig,
};

/// Community-structure analysis of networks.
#[derive(Debug, Parser)]
#[command(name = "netstruct", version, about)]
struct Cli {
    /// Master random seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file, or output directory for `predict` and `experiment`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random graph as a multigraph edge list.
    Generate(GenerateArgs),
    /// Convert an edge list into a JSON graph bundle.
    Convert {
        input: PathBuf,
    },
    /// Score a partition and/or community set with σ, τ and θ.
    Metrics(MetricsArgs),
    /// Detect communities.
    Detect(DetectArgs),
    /// Check structural properties of a homophyly graph.
    Verify(VerifyArgs),
    /// Predict node keywords from communities.
    Predict(PredictArgs),
    /// Run a figure or table experiment.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Model {
    Er,
    Pa,
    Homophyly,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    model: Model,
    #[arg(long)]
    n: usize,
    /// Edge probability (er).
    #[arg(long)]
    p: Option<f64>,
    /// Edges per new node (pa, homophyly).
    #[arg(long)]
    d: Option<usize>,
    /// Homophyly exponent.
    #[arg(long)]
    a: Option<f64>,
    /// Colors sidecar for homophyly graphs; defaults to `<out>.colors.json`.
    #[arg(long)]
    colors: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Partition scored with σ and τ.
    #[arg(long)]
    partition: Option<PathBuf>,
    /// Community set scored with θ; the partition's modules are used when absent.
    #[arg(long)]
    communities: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Algo {
    /// Local PageRank sweeps from every node.
    C,
    /// Greedy modularity merging.
    M,
    /// Greedy code-length merging.
    E,
}

#[derive(Debug, Args)]
struct PprArgs {
    /// Teleportation probability.
    #[arg(long, default_value_t = 0.15)]
    kappa: f64,
    /// Push tolerance.
    #[arg(long, default_value_t = 1e-5)]
    eps: f64,
    /// Stopping-rule scale.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Stopping-rule exponent.
    #[arg(long, default_value_t = 0.2)]
    beta: f64,
}

impl PprArgs {
    fn params(&self) -> (PprParams, StopParams) {
        (
            PprParams {
                kappa: self.kappa,
                epsilon: self.eps,
            },
            StopParams {
                alpha: self.alpha,
                beta: self.beta,
            },
        )
    }
}

#[derive(Debug, Args)]
struct DetectArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum)]
    algo: Algo,
    #[command(flatten)]
    ppr: PprArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    colors: PathBuf,
    /// Homophyly exponent; read from the colors file when omitted.
    #[arg(long)]
    a: Option<f64>,
    /// Edges per node; read from the colors file when omitted.
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    graph: PathBuf,
    /// JSON-lines file with `id`, `title`, `abstract` and `keywords`.
    #[arg(long)]
    meta: PathBuf,
    /// Communities to predict from; detected with the C algorithm when absent.
    #[arg(long)]
    communities: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    kmax: usize,
    #[command(flatten)]
    ppr: PprArgs,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// fig1, fig2, fig3, fig4, table1, table3, fig5 or table4.
    id: String,
    /// Use the published graph sizes instead of the desk-scale grid.
    #[arg(long)]
    full: bool,
    /// Replicates per random grid point.
    #[arg(long, default_value_t = 1)]
    replicates: usize,
    /// Dataset for table1/table3 as `name=path`; repeatable.
    #[arg(long = "dataset", value_parser = parse_dataset)]
    datasets: Vec<(String, PathBuf)>,
    /// Graph for fig5/table4.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Metadata for fig5/table4.
    #[arg(long)]
    meta: Option<PathBuf>,
    #[arg(long)]
    communities: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    kmax: usize,
}

fn parse_dataset(s: &str) -> Result<(String, PathBuf), String> {
    let (name, path) = s.split_once('=').ok_or("expected name=path")?;
    if name.is_empty() || path.is_empty() {
        return Err("expected name=path".into());
    }
    Ok((name.to_string(), PathBuf::from(path)))
}

#[derive(Debug)]
enum CliError {
    Core(Error),
    Io(PathBuf, io::Error),
    Internal(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_input_error() => 1,
            CliError::Io(_, e) if e.kind() == io::ErrorKind::NotFound => 1,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::Internal(msg) => f.write_str(msg),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn input(msg: impl Into<String>) -> CliError {
    CliError::Core(Error::InvalidInput(msg.into()))
}

/// Writes JSON to `out`, or to stdout when no path is given.
fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> CliResult<()> {
    match out {
        Some(path) => Ok(nio::write_json(path, value)?),
        None => {
            let mut stdout = io::stdout().lock();
            serde_json::to_writer_pretty(&mut stdout, value).map_err(Error::from)?;
            writeln!(stdout).map_err(|e| CliError::Io("<stdout>".into(), e))
        }
    }
}

fn generate(cli: &Cli, args: &GenerateArgs) -> CliResult<()> {
    let out = cli.out.as_deref().ok_or_else(|| input("generate needs --out"))?;
    let need_d = || args.d.ok_or_else(|| input("--d is required for this model"));
    let graph = match args.model {
        Model::Er => {
            let p = args.p.ok_or_else(|| input("--p is required for er"))?;
            gen_er(args.n, p, cli.seed)?
        }
        Model::Pa => gen_pa(args.n, need_d()?, cli.seed)?,
        Model::Homophyly => {
            let params = HomophylyParams {
                n: args.n,
                a: args.a.ok_or_else(|| input("--a is required for homophyly"))?,
                d: need_d()?,
                rng_seed: cli.seed,
            };
            let cg = gen_homophyly(&params)?;
            let colors = args
                .colors
                .clone()
                .unwrap_or_else(|| out.with_extension("colors.json"));
            nio::write_json(&colors, &ColorsFile::from_colored(&cg, Some(params)))?;
            info!("wrote {} colors to {}", cg.color_count(), colors.display());
            cg.graph
        }
    };
    nio::write_edge_list_file(out, &graph)?;
    info!(
        "wrote {} nodes and {} edges to {}",
        graph.node_count(),
        graph.edge_count(),
        out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct MetricsReport {
    schema_version: u32,
    nodes: usize,
    edges: usize,
    sigma: Option<f64>,
    tau: Option<f64>,
    theta: Option<ThetaScore>,
    criterion: Option<bool>,
}

fn metrics(cli: &Cli, args: &MetricsArgs) -> CliResult<()> {
    let (g, _) = read_graph(&args.graph)?;
    if args.partition.is_none() && args.communities.is_none() {
        return Err(input("metrics needs --partition, --communities or both"));
    }
    let partition = args
        .partition
        .as_deref()
        .map(|p| read_partition(p, g.node_count()))
        .transpose()?;
    let communities = match (&args.communities, &partition) {
        (Some(path), _) => read_communities(path)?,
        (None, Some(p)) => p.to_community_set(),
        (None, None) => unreachable!(),
    };
    let (sigma, tau) = match &partition {
        Some(p) => (Some(modularity(&g, p)?), Some(entropy_ratio(&g, p)?)),
        None => (None, None),
    };
    let theta = conductance_ratio(&g, &communities)?;
    let criterion = sigma.zip(tau).map(|(s, t)| empirical_criterion(t, s, theta.theta));
    emit_json(
        cli.out.as_deref(),
        &MetricsReport {
            schema_version: SCHEMA_VERSION,
            nodes: g.node_count(),
            edges: g.edge_count(),
            sigma,
            tau,
            theta: Some(theta),
            criterion,
        },
    )
}

fn detect(cli: &Cli, args: &DetectArgs) -> CliResult<()> {
    let (g, _) = read_graph(&args.graph)?;
    let (kind, communities) = match args.algo {
        Algo::C => {
            let (ppr, stop) = args.ppr.params();
            let c = detect_all_c(&g, &ppr, &stop)?;
            info!("found {} communities", c.len());
            (CommunityKind::Communities, c)
        }
        Algo::M | Algo::E => {
            let p = if matches!(args.algo, Algo::M) { detect_m(&g)? } else { detect_e(&g)? };
            info!("found {} modules", p.module_count());
            (CommunityKind::Partition, p.to_community_set())
        }
    };
    emit_json(
        cli.out.as_deref(),
        &CommunitiesFile {
            schema_version: SCHEMA_VERSION,
            kind,
            communities,
        },
    )
}

fn verify(cli: &Cli, args: &VerifyArgs) -> CliResult<()> {
    let (g, _) = read_graph(&args.graph)?;
    let colors = ColorsFile::read(&args.colors)?;
    let params = colors.params;
    let a = args.a.or(params.map(|p| p.a)).ok_or_else(|| input("--a is required"))?;
    let d = args.d.or(params.map(|p| p.d)).ok_or_else(|| input("--d is required"))?;
    let cg = colors.attach(g)?;
    let mut config = StructureConfig::for_homophyly(a, d);
    config.rng_seed = cli.seed;
    let report = verify_structure(&cg, &config)?;
    emit_json(cli.out.as_deref(), &report)
}

#[derive(Serialize)]
struct PredictionReport {
    schema_version: u32,
    k_max: usize,
    annotated: usize,
    communities: usize,
    curve: Vec<(usize, usize)>,
    /// Confirmed keywords per node at `k = k_max`, keyed by original node id.
    confirmed: std::collections::BTreeMap<String, Vec<String>>,
}

fn predict_cmd(cli: &Cli, args: &PredictArgs) -> CliResult<()> {
    let out = cli.out.as_deref().ok_or_else(|| input("predict needs --out (a directory)"))?;
    let (g, ids) = read_graph(&args.graph)?;
    let docs = read_metadata(&args.meta, &ids)?;
    let communities = match &args.communities {
        Some(path) => read_communities(path)?,
        None => {
            let (ppr, stop) = args.ppr.params();
            detect_all_c(&g, &ppr, &stop)?
        }
    };
    let ag = AttributedGraph::new(g, docs)?;
    let curve = prediction_curve(&ag, &communities, args.kmax)?;
    let result = predict(&ag, &communities, args.kmax)?;

    fs::create_dir_all(out).map_err(|e| CliError::Io(out.to_path_buf(), e))?;
    let csv_path = out.join("prediction_curve.csv");
    let mut w = csv::Writer::from_path(&csv_path).map_err(|e| CliError::Core(e.into()))?;
    w.write_record(["k", "covered"]).map_err(|e| CliError::Core(e.into()))?;
    for (k, covered) in &curve {
        w.serialize((k, covered)).map_err(|e| CliError::Core(e.into()))?;
    }
    w.flush().map_err(|e| CliError::Io(csv_path.clone(), e))?;
    let report = PredictionReport {
        schema_version: SCHEMA_VERSION,
        k_max: args.kmax,
        annotated: ag.annotated_count(),
        communities: communities.len(),
        curve,
        confirmed: result
            .per_node_confirmed
            .into_iter()
            .map(|(v, kws)| (ids[v].clone(), kws))
            .collect(),
    };
    nio::write_json(&out.join("predictions.json"), &report)?;
    info!("covered {} nodes at k = {}", result.total_covered, args.kmax);
    Ok(())
}

fn experiment(cli: &Cli, args: &ExperimentArgs) -> CliResult<()> {
    let id: ExperimentId = args.id.parse()?;
    if args.replicates == 0 {
        return Err(input("--replicates must be at least 1"));
    }
    let seeds: Vec<u64> = (0..args.replicates as u64).map(|r| split_seed(cli.seed, r)).collect();
    let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("results"));
    let spec = match id {
        ExperimentId::Table1 | ExperimentId::Table3 => {
            if args.datasets.is_empty() {
                return Err(input(format!("{id} needs at least one --dataset name=path")));
            }
            let grid = args
                .datasets
                .iter()
                .map(|(name, path)| GridPoint::Dataset {
                    name: name.clone(),
                    path: path.clone(),
                })
                .collect();
            ExperimentSpec {
                experiment: id,
                grid,
                seeds,
                out_dir,
                ppr: PprParams::default(),
                stop: None,
            }
        }
        ExperimentId::Fig5 | ExperimentId::Table4 => {
            let (graph, meta) = args
                .graph
                .clone()
                .zip(args.meta.clone())
                .ok_or_else(|| input(format!("{id} needs --graph and --meta")))?;
            ExperimentSpec {
                experiment: id,
                grid: vec![GridPoint::Attributed {
                    graph,
                    meta,
                    communities: args.communities.clone(),
                    k_max: args.kmax,
                }],
                seeds,
                out_dir,
                ppr: PprParams::default(),
                stop: None,
            }
        }
        _ => ExperimentSpec::builtin(id, if args.full { Scale::Full } else { Scale::Desk }, seeds, out_dir)?,
    };
    let outcome = run_experiment(&spec)?;
    let m = &outcome.manifest;
    info!(
        "{id}: {} rows ({} failed) in {:.1} s",
        m.rows, m.failed_rows, m.wall_clock_seconds
    );
    println!("{}", outcome.manifest_path.display());
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(input("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    match &cli.command {
        Command::Generate(args) => generate(cli, args),
        Command::Convert { input } => {
            let bundle = nio::convert(input)?;
            emit_json(cli.out.as_deref(), &bundle)
        }
        Command::Metrics(args) => metrics(cli, args),
        Command::Detect(args) => detect(cli, args),
        Command::Verify(args) => verify(cli, args),
        Command::Predict(args) => predict_cmd(cli, args),
        Command::Experiment(args) => experiment(cli, args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
