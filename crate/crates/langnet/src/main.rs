use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use langnet::empirical;
use langnet::experiments::{self, SweepPlan};
use langnet::graph::Graph;
use langnet::metrics::MetricsReport;
use langnet::model::{self, ModelConfig, StateMatrix, Strategy};

#[derive(Parser)]
#[command(
    name = "langnet",
    about = "Coevolving language-change dynamics on adaptive networks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one seeded realization and dump all artifacts
    Simulate(SimulateArgs),
    /// Run an ensemble sweep from a plan file
    Sweep(SweepArgs),
    /// Compute the metrics row for a graph/states dump
    Metrics(MetricsArgs),
    /// Aggregate a country language/population CSV
    Empirical(EmpiricalArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Number of nodes (perfect square >= 9 for static-lattice)
    #[arg(long)]
    n: usize,
    /// Target average degree
    #[arg(long, default_value_t = 4.0)]
    k: f64,
    /// Traits per node
    #[arg(long, default_value_t = 3)]
    f: usize,
    /// Values per trait
    #[arg(long)]
    q: u32,
    /// local-uniform | local-preferential | global-uniform | static-lattice
    #[arg(long)]
    strategy: String,
    /// RNG seed; all randomness flows from it
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    max_steps: Option<u64>,
    #[arg(long)]
    quiescence_window: Option<u64>,
    /// Output directory for manifest.txt, edges.txt, states.csv, metrics.csv
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Plan file (flat key=value format, see README)
    #[arg(long)]
    plan: PathBuf,
    /// Worker threads; default = available cores
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory for realizations.csv and aggregate.csv
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct MetricsArgs {
    /// Edge-list dump (`u v` per line)
    #[arg(long)]
    edges: PathBuf,
    /// States dump (`node,trait1,...,traitF` CSV)
    #[arg(long)]
    states: PathBuf,
}

#[derive(Args)]
struct EmpiricalArgs {
    /// Input CSV with header `country,population,languages`
    #[arg(long)]
    input: PathBuf,
    /// Linear bin width in persons
    #[arg(long, default_value_t = 10_000_000)]
    bin_width: u64,
    /// File with one country name per line; overrides the default
    /// exclusion list (China, India, Indonesia, Papua New Guinea)
    #[arg(long)]
    exclude_file: Option<PathBuf>,
    /// Use logarithmic bins instead of linear ones
    #[arg(long)]
    log_bins: bool,
    /// Base of the logarithmic bins
    #[arg(long, default_value_t = 10.0)]
    log_base: f64,
    /// Prefix for <prefix>_scatter.csv and <prefix>_bins.csv
    #[arg(long, default_value = "empirical")]
    out_prefix: String,
}

/// Distinguishes bad invocations (exit 2) from runtime failures (exit 1).
enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<langnet::Error> for CliError {
    fn from(e: langnet::Error) -> Self {
        match e {
            langnet::Error::Parameter(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Sweep(args) => sweep(args),
        Command::Metrics(args) => metrics(args),
        Command::Empirical(args) => empirical_cmd(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let strategy: Strategy = args.strategy.parse().map_err(CliError::from)?;
    let mut cfg = ModelConfig::new(args.n, args.k, args.f, args.q, strategy, args.seed);
    if let Some(ms) = args.max_steps {
        cfg.max_steps = ms;
    }
    if let Some(w) = args.quiescence_window {
        cfg.quiescence_window = w;
    }
    // validate before creating any output
    cfg.validate().map_err(CliError::from)?;

    let res = model::run(&cfg).map_err(CliError::from)?;
    let report = MetricsReport::compute(&res.graph, &res.states);

    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", args.out.display())))?;
    write_file(&args.out.join("manifest.txt"), &res.manifest(&cfg))?;
    write_file(&args.out.join("edges.txt"), &res.graph.to_edge_list())?;
    write_file(&args.out.join("states.csv"), &res.states.to_csv())?;
    let metrics_csv = format!(
        "{}\n{}\n",
        MetricsReport::CSV_HEADER,
        report.csv_row(res.stop_reason.as_str(), res.steps)
    );
    write_file(&args.out.join("metrics.csv"), &metrics_csv)?;
    println!(
        "stop_reason={} steps={} domains={} components={}",
        res.stop_reason, res.steps, report.domain_report.count, report.component_report.count
    );
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let text = read_file(&args.plan)?;
    let plan = SweepPlan::parse(&text).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(workers) = args.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let realizations = experiments::sweep(&plan).map_err(CliError::from)?;
    let rows = experiments::aggregate(&realizations);
    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", args.out.display())))?;
    write_file(
        &args.out.join("realizations.csv"),
        &experiments::realizations_csv(&realizations),
    )?;
    write_file(
        &args.out.join("aggregate.csv"),
        &experiments::aggregate_csv(&rows),
    )?;
    println!(
        "{} realizations over {} parameter points",
        realizations.len(),
        plan.points().len()
    );
    Ok(())
}

fn metrics(args: MetricsArgs) -> Result<(), CliError> {
    let states_text = read_file(&args.states)?;
    let states =
        StateMatrix::from_csv(&states_text).map_err(|e| CliError::Runtime(e.to_string()))?;
    let edges_text = read_file(&args.edges)?;
    let graph = Graph::from_edge_list(&edges_text, states.node_count())
        .map_err(|e| CliError::Runtime(format!("inconsistent dumps: {e}")))?;
    let report = MetricsReport::compute(&graph, &states);
    println!("{}", report.csv_row("none", 0));
    Ok(())
}

fn empirical_cmd(args: EmpiricalArgs) -> Result<(), CliError> {
    if !args.input.exists() {
        return Err(CliError::Usage(format!(
            "input file {} does not exist",
            args.input.display()
        )));
    }
    let records =
        empirical::load_countries(&args.input).map_err(|e| CliError::Runtime(e.to_string()))?;
    let exclusions: Vec<String> = match &args.exclude_file {
        Some(path) => read_file(path)?
            .lines()
            .map(|l| l.trim().to_string())
            .filter(|l| !l.is_empty())
            .collect(),
        None => empirical::DEFAULT_EXCLUSIONS
            .iter()
            .map(|s| s.to_string())
            .collect(),
    };
    let (records, warnings) = empirical::exclude(records, &exclusions);
    for w in warnings {
        eprintln!("warning: {w}");
    }
    let bins = if args.log_bins {
        empirical::bin_average_log(&records, args.log_base).map_err(CliError::from)?
    } else {
        if args.bin_width == 0 {
            return Err(CliError::Usage("bin width must be positive".into()));
        }
        empirical::bin_average(&records, args.bin_width).map_err(CliError::from)?
    };
    write_file(
        Path::new(&format!("{}_scatter.csv", args.out_prefix)),
        &empirical::scatter_csv(&records),
    )?;
    write_file(
        Path::new(&format!("{}_bins.csv", args.out_prefix)),
        &empirical::bins_csv(&bins),
    )?;
    println!(
        "{} countries, {} bins ({} occupied)",
        records.len(),
        bins.len(),
        bins.iter().filter(|b| b.country_count > 0).count()
    );
    Ok(())
}
