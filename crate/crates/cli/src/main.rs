use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rulenet::experiments::classify_and_aggregate;
use rulenet::generators::{randomize_fact_values, TopologySpec};
use rulenet::io::annotate::{import_annotations, read_annotations, write_annotations};
use rulenet::io::{
    export_annotations, export_dot, parse_suite, read_network, read_records_file, run_suite, summary_table,
    write_network, SummaryRow,
};
use rulenet::Network;

#[derive(Parser)]
#[command(name = "rulenet", version, about = "Train, prune and inspect rule-fact networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every condition of a suite file and write records and summaries.
    Run {
        suite: PathBuf,
        /// Worker threads (defaults to one per core).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Render a network file as a GraphViz digraph.
    ExportDot { network: PathBuf, out: PathBuf },
    /// Export or apply review annotations.
    Annotate {
        #[command(subcommand)]
        action: AnnotateCommand,
    },
    /// Summarize a records file.
    Report {
        records: PathBuf,
        /// Error boundary between the high and low groups.
        #[arg(long, default_value_t = 0.10)]
        threshold: f64,
    },
    /// Generate a random network file.
    Generate {
        #[arg(value_enum)]
        kind: Kind,
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        facts: usize,
        #[arg(long, default_value_t = 10)]
        rules: usize,
        /// Percentage of fact pairs that get rules (dense only).
        #[arg(long, default_value_t = 50)]
        density: u32,
        #[arg(long, default_value_t = 5)]
        depth: usize,
        #[arg(long, default_value_t = 5)]
        width: usize,
        #[arg(long, default_value_t = 5)]
        boundary: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Draw fact values uniformly from [0, 1) instead of leaving them at 0.
        #[arg(long)]
        random_values: bool,
    },
}

#[derive(Subcommand)]
enum AnnotateCommand {
    /// Write an annotation template listing every fact and rule.
    Export { network: PathBuf, out: PathBuf },
    /// Apply an annotation file and write the resulting network.
    Apply {
        annotations: PathBuf,
        out: PathBuf,
        /// Network to annotate; defaults to the one named in the file.
        #[arg(long)]
        network: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Random,
    FullyConnected,
    Dense,
    Layered,
}

fn load(path: &Path) -> Result<Network> {
    read_network(path).with_context(|| format!("loading network {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { suite, workers } => {
            if workers == Some(0) {
                bail!("--workers must be at least 1");
            }
            let suite = parse_suite(&suite).with_context(|| format!("reading suite {}", suite.display()))?;
            let rows = run_suite(&suite, workers)?;
            print!("{}", summary_table(&rows));
            println!("results written to {}", suite.output_dir.display());
        }
        Command::ExportDot { network, out } => {
            export_dot(&load(&network)?, &out).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Annotate { action: AnnotateCommand::Export { network, out } } => {
            let net = load(&network)?;
            write_annotations(&out, &export_annotations(&net, &network.to_string_lossy()))?;
        }
        Command::Annotate { action: AnnotateCommand::Apply { annotations, out, network } } => {
            let file = read_annotations(&annotations)?;
            let net_path = network.unwrap_or_else(|| {
                let named = PathBuf::from(&file.network);
                match annotations.parent() {
                    Some(dir) if named.is_relative() && !named.exists() => dir.join(named),
                    _ => named,
                }
            });
            let net = import_annotations(&load(&net_path)?, &file)?;
            write_network(&out, &net)?;
        }
        Command::Report { records, threshold } => {
            if !(0.0..=1.0).contains(&threshold) {
                bail!("--threshold must lie in [0, 1]");
            }
            let recs = read_records_file(&records)?;
            let name = records.file_stem().map_or("records".into(), |s| s.to_string_lossy().into_owned());
            let row = SummaryRow { condition: name, stats: classify_and_aggregate(&recs, threshold) };
            print!("{}", summary_table(&[row]));
        }
        Command::Generate { kind, out, facts, rules, density, depth, width, boundary, seed, random_values } => {
            let spec = match kind {
                Kind::Random => TopologySpec::Random { n_facts: facts, n_rules: rules },
                Kind::FullyConnected => TopologySpec::FullyConnected { n_facts: facts },
                Kind::Dense => TopologySpec::Dense { n_facts: facts, density_pct: density },
                Kind::Layered => TopologySpec::Layered { depth, interior_width: width, boundary_width: boundary },
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut net: Network = spec.generate(&mut rng)?;
            if random_values {
                randomize_fact_values(&mut net, &mut rng);
            }
            write_network(&out, &net)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
