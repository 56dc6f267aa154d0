use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use exnrule::metrics::MetricKind;
use exnrule::ScenarioId;
use exnrule_cli::boxplot::{emit_boxplot_data, emit_boxplot_svg};
use exnrule_cli::config::ExperimentConfig;
use exnrule_cli::results::read_results_csv;
use exnrule_cli::runner::run_experiment;
use exnrule_cli::scenario::dump_scenario;

/// Benchmark harness for the extended-neighbourhood-rule kNN ensemble.
#[derive(Parser)]
#[command(name = "bench", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run repeated train/test evaluations and write result tables.
    Run(RunArgs),
    /// Write one draw of a built-in scenario as a CSV dataset.
    Scenario {
        /// Scenario id, S1 through S6.
        #[arg(long)]
        id: String,
        /// Generation seed.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Rebuild boxplot data (TSV + SVG) from a results.csv.
    Plot {
        /// Metric to plot: accuracy, kappa or brier.
        #[arg(long)]
        metric: String,
        /// A results.csv produced by `bench run`.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Flat key-value config file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma list of scenario ids (S1..S6) and/or name=path.csv entries.
    #[arg(long)]
    datasets: Option<String>,
    /// Comma list from: exnrule, knn, wknn, rknn.
    #[arg(long)]
    methods: Option<String>,
    /// Number of repeated splits per dataset.
    #[arg(long)]
    reps: Option<usize>,
    /// Master seed; every stream in the run derives from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma list of k values, e.g. 3,5,7.
    #[arg(long)]
    k: Option<String>,
    /// Ensemble size for exnrule and rknn.
    #[arg(long = "B")]
    ensemble_size: Option<usize>,
    /// Tune each baseline's k by 5-fold cross-validation over 1..=10.
    #[arg(long)]
    tune: bool,
    /// Z-score features using training statistics.
    #[arg(long)]
    scale: bool,
    /// Output directory for results.csv, summary.csv and boxplot data.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Training fraction of each split.
    #[arg(long)]
    train_fraction: Option<f64>,
    /// Worker threads (default: all cores). Affects wall time only.
    #[arg(long)]
    workers: Option<usize>,
}

fn build_config(args: &RunArgs) -> anyhow::Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = &args.datasets {
        config.set("datasets", v)?;
    }
    if let Some(v) = &args.methods {
        config.set("methods", v)?;
    }
    if let Some(v) = args.reps {
        config.set("reps", &v.to_string())?;
    }
    if let Some(v) = args.seed {
        config.set("seed", &v.to_string())?;
    }
    if let Some(v) = &args.k {
        config.set("k", v)?;
    }
    if let Some(v) = args.ensemble_size {
        config.set("B", &v.to_string())?;
    }
    if args.tune {
        config.set("tune", "true")?;
    }
    if args.scale {
        config.set("scale", "true")?;
    }
    if let Some(v) = &args.out {
        config.output_dir = v.clone();
    }
    if let Some(v) = args.train_fraction {
        config.set("train_fraction", &v.to_string())?;
    }
    config.validate()?;
    Ok(config)
}

fn cmd_run(args: RunArgs) -> anyhow::Result<()> {
    if let Some(workers) = args.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()?;
    }
    let config = build_config(&args)?;
    let table = run_experiment(&config)?;
    println!(
        "wrote {} rows to {}",
        table.rows.len(),
        config.output_dir.display()
    );
    println!("method   dataset      k  mean_acc  mean_kappa  mean_brier");
    for s in table.summarize() {
        println!(
            "{:<8} {:<10} {:>3}  {:>8.3}  {:>10.3}  {:>10.3}",
            s.method, s.dataset, s.k, s.mean_accuracy, s.mean_kappa, s.mean_brier
        );
    }
    Ok(())
}

fn cmd_scenario(id: &str, seed: u64, out: &PathBuf) -> anyhow::Result<()> {
    let id: ScenarioId = id.parse()?;
    dump_scenario(id, seed, out)?;
    println!("wrote {id} (seed {seed}) to {}", out.display());
    Ok(())
}

fn cmd_plot(metric: &str, input: &PathBuf, out: &PathBuf) -> anyhow::Result<()> {
    let metric: MetricKind = metric.parse()?;
    let table = read_results_csv(input)?;
    // Carry the source run's seed and config hash forward when present.
    let text = std::fs::read_to_string(input)?;
    let meta = |key: &str| -> Option<String> {
        text.lines()
            .take_while(|l| l.starts_with('#'))
            .find_map(|l| l.strip_prefix(&format!("# {key} = ")).map(str::to_string))
    };
    let seed: u64 = meta("seed").and_then(|s| s.parse().ok()).unwrap_or(0);
    let hash = meta("config_hash").unwrap_or_else(|| "unknown".into());

    std::fs::create_dir_all(out)?;
    let tsv = out.join(format!("boxplot_{metric}.tsv"));
    let svg = out.join(format!("boxplot_{metric}.svg"));
    emit_boxplot_data(&table, metric, seed, &hash, &tsv)?;
    emit_boxplot_svg(&table, metric, seed, &hash, &svg)?;
    println!("wrote {} and {}", tsv.display(), svg.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Scenario { id, seed, out } => cmd_scenario(&id, seed, &out),
        Command::Plot { metric, input, out } => cmd_plot(&metric, &input, &out),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
