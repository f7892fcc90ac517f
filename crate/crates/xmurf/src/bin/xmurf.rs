use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use xmurf::config::PipelineConfig;
use xmurf::pipeline;
use xmurf::{Error, Result};
use xmurf_core::ordering::Linkage;

/// Traffic scenario simulation, unsupervised forest clustering and
/// thresholded classification.
#[derive(Parser)]
#[command(name = "xmurf", version)]
struct Cli {
    /// Pipeline configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the simulations and write one trace per run.
    Simulate {
        /// Output directory [default: <work_dir>/traces].
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of runs [default: sim.runs].
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Detect scenarios in traces and write the feature table.
    Extract {
        /// Trace files or directories [default: <work_dir>/traces].
        traces: Vec<PathBuf>,
        /// Scenario table [default: <work_dir>/scenarios.csv].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the unsupervised forest and write the proximity matrix.
    Cluster {
        /// Scenario table [default: <work_dir>/scenarios.csv].
        #[arg(long)]
        input: Option<PathBuf>,
        /// Output directory [default: <work_dir>].
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of trees [default: xmurf.trees].
        #[arg(long)]
        trees: Option<usize>,
    },
    /// Seriate a proximity matrix; write heatmap, dendrogram and permutation.
    Order {
        /// Proximity matrix, .csv or raw [default: <work_dir>/proximity.bin].
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Output directory [default: <work_dir>].
        #[arg(long)]
        out: Option<PathBuf>,
        /// average, single or complete [default: ordering.linkage].
        #[arg(long)]
        linkage: Option<Linkage>,
        /// Optimal leaf ordering (true/false).
        #[arg(long)]
        optimal: Option<bool>,
        /// Also write cluster ranges from a cut into this many clusters.
        #[arg(long)]
        suggest: Option<usize>,
    },
    /// Label scenarios from cluster ranges over the seriated order.
    Label {
        /// Scenario table [default: <work_dir>/scenarios.csv].
        #[arg(long)]
        input: Option<PathBuf>,
        /// [default: <work_dir>/permutation.json]
        #[arg(long)]
        permutation: Option<PathBuf>,
        /// Cluster ranges over the seriated order [default: <work_dir>/ranges.json].
        #[arg(long)]
        ranges: Option<PathBuf>,
        /// Labelled table [default: <work_dir>/labeled.csv].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train the classifier and its out-of-bag thresholds.
    Train {
        /// Labelled table [default: <work_dir>/labeled.csv].
        #[arg(long)]
        input: Option<PathBuf>,
        /// [default: <work_dir>/model.json]
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of trees [default: classify.trees].
        #[arg(long)]
        trees: Option<usize>,
    },
    /// Classify a scenario table; withdrawn assignments read UNASSIGNED.
    Classify {
        /// [default: <work_dir>/model.json]
        #[arg(long)]
        model: Option<PathBuf>,
        /// Scenario table [default: <work_dir>/scenarios.csv].
        #[arg(long)]
        input: Option<PathBuf>,
        /// [default: <work_dir>/predictions.csv]
        #[arg(long)]
        out: Option<PathBuf>,
        /// Multiple of the class threshold a vote fraction must reach [default: classify.ratio].
        #[arg(long)]
        ratio: Option<f64>,
    },
    /// Write the heatmap of a matrix, optionally seriated.
    Render {
        #[arg(long)]
        matrix: PathBuf,
        /// Seriated order to apply first.
        #[arg(long)]
        permutation: Option<PathBuf>,
        /// PPM image to write.
        #[arg(long)]
        out: PathBuf,
    },
}

fn expand_traces(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        let meta = std::fs::metadata(p).map_err(|e| Error::io(p, e))?;
        if meta.is_dir() {
            out.extend(pipeline::trace_files(p)?);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn or_work(cfg: &PipelineConfig, arg: Option<PathBuf>, name: &str) -> PathBuf {
    arg.unwrap_or_else(|| cfg.work_path(name))
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }

    match cli.command {
        Command::Simulate { out, runs } => {
            if let Some(r) = runs {
                cfg.sim.runs = r;
            }
            cfg.validate()?;
            let paths = pipeline::simulate(&cfg, &or_work(&cfg, out, "traces"))?;
            println!("wrote {} trace(s)", paths.len());
        }
        Command::Extract { traces, out } => {
            let inputs = if traces.is_empty() {
                vec![cfg.work_path("traces")]
            } else {
                traces
            };
            let files = expand_traces(&inputs)?;
            let out = or_work(&cfg, out, "scenarios.csv");
            let n = pipeline::extract(&files, &out)?;
            println!("wrote {n} scenario(s) to {}", out.display());
        }
        Command::Cluster { input, out, trees } => {
            if let Some(b) = trees {
                cfg.xmurf.trees = b;
            }
            cfg.validate()?;
            let input = or_work(&cfg, input, "scenarios.csv");
            let out_dir = out.unwrap_or_else(|| cfg.paths.work_dir.clone());
            let o = pipeline::cluster(&cfg, &input, &out_dir)?;
            println!("wrote {} and {}", o.matrix.display(), o.forest.display());
        }
        Command::Order { matrix, out, linkage, optimal, suggest } => {
            if let Some(l) = linkage {
                cfg.ordering.linkage = l;
            }
            if let Some(o) = optimal {
                cfg.ordering.optimal = o;
            }
            if suggest.is_some() {
                cfg.ordering.suggest = suggest;
            }
            cfg.validate()?;
            let matrix = or_work(&cfg, matrix, "proximity.bin");
            let out_dir = out.unwrap_or_else(|| cfg.paths.work_dir.clone());
            let o = pipeline::order(&cfg, &matrix, &out_dir)?;
            println!("wrote {} and {}", o.heatmap.display(), o.permutation.display());
        }
        Command::Label { input, permutation, ranges, out } => {
            let out = or_work(&cfg, out, "labeled.csv");
            let n = pipeline::label(
                &or_work(&cfg, input, "scenarios.csv"),
                &or_work(&cfg, permutation, "permutation.json"),
                &or_work(&cfg, ranges, "ranges.json"),
                &out,
            )?;
            println!("labelled {n} scenario(s) into {}", out.display());
        }
        Command::Train { input, out, trees } => {
            if let Some(b) = trees {
                cfg.classify.trees = b;
            }
            cfg.validate()?;
            let out = or_work(&cfg, out, "model.json");
            let model = pipeline::train(&cfg, &or_work(&cfg, input, "labeled.csv"), &out)?;
            for (label, k) in &model.thresholds.kappa_bar {
                println!("{label}: kappa_bar = {k:.4}");
            }
        }
        Command::Classify { model, input, out, ratio } => {
            let ratio = ratio.unwrap_or(cfg.classify.ratio);
            let out = or_work(&cfg, out, "predictions.csv");
            let s = pipeline::classify(
                &or_work(&cfg, model, "model.json"),
                &or_work(&cfg, input, "scenarios.csv"),
                ratio,
                &out,
            )?;
            println!(
                "assigned {}/{} ({:.1}%) at ratio {ratio}",
                s.assigned,
                s.rows,
                100.0 * s.assigned as f64 / s.rows.max(1) as f64
            );
        }
        Command::Render { matrix, permutation, out } => {
            pipeline::render(&matrix, permutation.as_deref(), &out)?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

