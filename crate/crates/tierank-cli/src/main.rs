//! `tierank` command line: infer direct hierarchical ties from interaction
//! logs and evaluate the inferences against known ties.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod config;
mod run;

use config::{
    load_file_config, resolve_algo, resolve_data_source, resolve_methods, resolve_single_method,
    resolve_single_weighting, resolve_synth_params, resolve_weightings, validation, CliError,
};

#[derive(Parser, Debug)]
#[command(
    name = "tierank",
    version,
    about = "Infer direct hierarchical ties in interaction networks with time-sliced rooted PageRank"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Infer per-query candidate rankings and write them as CSV/JSON
    Rank(RankCmd),
    /// Compute recall curves per method and a side-by-side comparison
    Evaluate(EvaluateCmd),
    /// Generate a seeded synthetic organization as edges.csv + truth.csv
    Synth(SynthCmd),
    /// Print slot boundaries and per-slot node/edge counts for a dataset
    SliceInfo(SliceInfoCmd),
}

#[derive(Args, Debug, Default, Clone)]
pub struct SynthParamArgs {
    /// RNG seed for the synthetic organization
    #[arg(long)]
    seed: Option<u64>,
    /// Number of managers
    #[arg(long)]
    managers: Option<u32>,
    /// Reports under each manager
    #[arg(long)]
    reports_per_manager: Option<u32>,
    /// Number of weekly time slots
    #[arg(long)]
    slots: Option<u32>,
    /// Per-slot probability that a report contacts its manager (0, 1]
    #[arg(long)]
    hierarchy_rate: Option<f64>,
    /// Per-slot probability of one random-peer contact [0, 1)
    #[arg(long)]
    noise_rate: Option<f64>,
    /// Interaction count carried by manager contacts
    #[arg(long)]
    hierarchy_count: Option<u64>,
    /// Interaction count carried by noise contacts
    #[arg(long)]
    noise_count: Option<u64>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct DataArgs {
    /// Interaction log CSV (header row required)
    #[arg(long, value_name = "PATH")]
    edges: Option<PathBuf>,
    /// Edge schema: directed-counts | undirected-coauthor
    #[arg(long)]
    schema: Option<String>,
    /// Source/sender column name (default "src")
    #[arg(long, value_name = "NAME")]
    src_col: Option<String>,
    /// Target/receiver column name (default "dst")
    #[arg(long, value_name = "NAME")]
    dst_col: Option<String>,
    /// Date column name (default "date")
    #[arg(long, value_name = "NAME")]
    date_col: Option<String>,
    /// Count column name (default "count")
    #[arg(long, value_name = "NAME")]
    count_col: Option<String>,
    /// Swap source and target while parsing (directed schemas)
    #[arg(long)]
    reverse_edges: bool,
    /// Ground-truth CSV with subordinate,superior columns
    #[arg(long, value_name = "PATH")]
    truth: Option<PathBuf>,
    /// Generate the seeded synthetic organization instead of reading files
    #[arg(long)]
    synthetic: bool,
    #[command(flatten)]
    synth: SynthParamArgs,
}

#[derive(Args, Debug, Default, Clone)]
pub struct AlgoArgs {
    /// Inference method: baseline | time-voting | modal-position
    #[arg(long)]
    method: Option<String>,
    /// Methods to evaluate (comma separated)
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
    /// Slot granularity: week | month | year | fixed:N
    #[arg(long)]
    granularity: Option<String>,
    /// Edge weighting: weighted | unweighted
    #[arg(long)]
    weighting: Option<String>,
    /// Weightings to evaluate (comma separated)
    #[arg(long, value_delimiter = ',')]
    weightings: Vec<String>,
    /// Voting threshold: a candidate earns a vote at positions 1..=p
    #[arg(long)]
    p: Option<u32>,
    /// Probability of following an edge instead of restarting (0, 1)
    #[arg(long)]
    damping: Option<f64>,
    /// L1 convergence tolerance of the power iteration
    #[arg(long)]
    tolerance: Option<f64>,
    /// Iteration cap of the power iteration
    #[arg(long)]
    max_iterations: Option<u32>,
    /// Ranks covered by rankings and recall curves
    #[arg(long)]
    max_rank: Option<u32>,
    /// Query node labels (comma separated; default: all truth subordinates)
    #[arg(long, value_delimiter = ',')]
    queries: Vec<String>,
    /// Worker threads for per-query fan-out (default: one per core)
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct OutArgs {
    /// Directory for output files (created if missing)
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// JSON config file; command-line flags override its values
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RankCmd {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    algo: AlgoArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct EvaluateCmd {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    algo: AlgoArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct SynthCmd {
    #[command(flatten)]
    params: SynthParamArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct SliceInfoCmd {
    #[command(flatten)]
    data: DataArgs,
    /// Slot granularity: week | month | year | fixed:N
    #[arg(long)]
    granularity: Option<String>,
    /// Edge weighting: weighted | unweighted
    #[arg(long)]
    weighting: Option<String>,
    #[command(flatten)]
    out: OutArgs,
}

fn required_out_dir(out: &OutArgs, file: &config::FileConfig) -> Result<PathBuf, CliError> {
    out.out_dir
        .clone()
        .or_else(|| file.out_dir.clone())
        .ok_or_else(|| validation("an output directory is required: pass --out-dir DIR"))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Rank(cmd) => {
            let file = load_file_config(cmd.out.config.as_deref())?;
            let source = resolve_data_source(&cmd.data, &file)?;
            let settings = resolve_algo(&cmd.algo, &file)?;
            let method = resolve_single_method(&cmd.algo, &file)?;
            let weighting = resolve_single_weighting(&cmd.algo, &file)?;
            let out_dir = required_out_dir(&cmd.out, &file)?;
            let data = run::load(source)?;
            run::cmd_rank(&data, &settings, method, weighting, &out_dir)
        }
        Command::Evaluate(cmd) => {
            let file = load_file_config(cmd.out.config.as_deref())?;
            let source = resolve_data_source(&cmd.data, &file)?;
            let settings = resolve_algo(&cmd.algo, &file)?;
            let methods = resolve_methods(&cmd.algo, &file)?;
            let weightings = resolve_weightings(&cmd.algo, &file)?;
            let out_dir = required_out_dir(&cmd.out, &file)?;
            let data = run::load(source)?;
            run::cmd_evaluate(&data, &settings, &methods, &weightings, &out_dir)
        }
        Command::Synth(cmd) => {
            let file = load_file_config(cmd.out.config.as_deref())?;
            let params = resolve_synth_params(&cmd.params, &file);
            let out_dir = required_out_dir(&cmd.out, &file)?;
            run::cmd_synth(&params, &out_dir)
        }
        Command::SliceInfo(cmd) => {
            let file = load_file_config(cmd.out.config.as_deref())?;
            let source = resolve_data_source(&cmd.data, &file)?;
            let granularity = cmd
                .granularity
                .or_else(|| file.granularity.clone())
                .unwrap_or_else(|| "month".into())
                .parse()
                .map_err(validation)?;
            let weighting = cmd
                .weighting
                .or_else(|| file.weighting.clone())
                .unwrap_or_else(|| "weighted".into())
                .parse()
                .map_err(validation)?;
            let out_dir = cmd.out.out_dir.clone().or_else(|| file.out_dir.clone());
            let data = run::load(source)?;
            run::cmd_slice_info(&data, granularity, weighting, out_dir.as_ref())
        }
    }
}

fn emit_error(kind: &str, message: &str) {
    eprintln!(
        "{}",
        serde_json::json!({ "error": kind, "message": message })
    );
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            emit_error("validation", &e.to_string());
            return ExitCode::from(1);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            emit_error("validation", &msg);
            ExitCode::from(1)
        }
        Err(CliError::Runtime(msg)) => {
            emit_error("runtime", &msg);
            ExitCode::from(2)
        }
    }
}
