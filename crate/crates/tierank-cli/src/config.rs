//! Merges command-line flags, an optional JSON config file, and built-in
//! defaults into one resolved run configuration.
//!
//! Precedence: flags override the config file, which overrides defaults.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use tierank::graph::{Granularity, Weighting};
use tierank::ingest::{EdgeFileSchema, SynthParams};
use tierank::pipeline::Method;
use tierank::rpr::RprParams;

use crate::{AlgoArgs, DataArgs, SynthParamArgs};

/// Error classes mapped to exit codes: validation -> 1, runtime -> 2.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Runtime(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Runtime(m) => write!(f, "{m}"),
        }
    }
}

pub fn validation(msg: impl fmt::Display) -> CliError {
    CliError::Validation(msg.to_string())
}

pub fn runtime(msg: impl fmt::Display) -> CliError {
    CliError::Runtime(msg.to_string())
}

/// All-optional mirror of the flag set, read from `--config` JSON.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub edges: Option<PathBuf>,
    pub schema: Option<String>,
    pub src_col: Option<String>,
    pub dst_col: Option<String>,
    pub date_col: Option<String>,
    pub count_col: Option<String>,
    pub reverse_edges: Option<bool>,
    pub truth: Option<PathBuf>,
    pub synthetic: Option<bool>,
    pub seed: Option<u64>,
    pub managers: Option<u32>,
    pub reports_per_manager: Option<u32>,
    pub slots: Option<u32>,
    pub hierarchy_rate: Option<f64>,
    pub noise_rate: Option<f64>,
    pub hierarchy_count: Option<u64>,
    pub noise_count: Option<u64>,
    pub method: Option<String>,
    pub methods: Option<Vec<String>>,
    pub granularity: Option<String>,
    pub weighting: Option<String>,
    pub weightings: Option<Vec<String>>,
    pub p: Option<u32>,
    pub damping: Option<f64>,
    pub tolerance: Option<f64>,
    pub max_iterations: Option<u32>,
    pub max_rank: Option<u32>,
    pub jobs: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub queries: Option<Vec<String>>,
}

pub fn load_file_config(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let raw = std::fs::read_to_string(path)
        .map_err(|e| validation(format!("cannot read config file {}: {e}", path.display())))?;
    serde_json::from_str(&raw)
        .map_err(|e| validation(format!("invalid config file {}: {e}", path.display())))
}

/// Where the interaction data comes from.
#[derive(Debug, Clone)]
pub enum DataSource {
    Files {
        edges: PathBuf,
        schema: EdgeFileSchema,
        truth: Option<PathBuf>,
    },
    Synthetic(SynthParams),
}

pub fn resolve_synth_params(args: &SynthParamArgs, file: &FileConfig) -> SynthParams {
    let d = SynthParams::default();
    SynthParams {
        seed: args.seed.or(file.seed).unwrap_or(d.seed),
        managers: args.managers.or(file.managers).unwrap_or(d.managers),
        reports_per_manager: args
            .reports_per_manager
            .or(file.reports_per_manager)
            .unwrap_or(d.reports_per_manager),
        slots: args.slots.or(file.slots).unwrap_or(d.slots),
        hierarchy_rate: args
            .hierarchy_rate
            .or(file.hierarchy_rate)
            .unwrap_or(d.hierarchy_rate),
        noise_rate: args.noise_rate.or(file.noise_rate).unwrap_or(d.noise_rate),
        hierarchy_count: args
            .hierarchy_count
            .or(file.hierarchy_count)
            .unwrap_or(d.hierarchy_count),
        noise_count: args
            .noise_count
            .or(file.noise_count)
            .unwrap_or(d.noise_count),
    }
}

fn resolve_schema(data: &DataArgs, file: &FileConfig) -> Result<EdgeFileSchema, CliError> {
    let kind = data
        .schema
        .clone()
        .or_else(|| file.schema.clone())
        .unwrap_or_else(|| "directed-counts".into());
    let mut schema = match kind.as_str() {
        "directed-counts" => EdgeFileSchema::directed_counts(),
        "undirected-coauthor" => EdgeFileSchema::undirected_coauthor(),
        other => {
            return Err(validation(format!(
                "unknown schema '{other}' (expected directed-counts or undirected-coauthor)"
            )))
        }
    };
    if let Some(c) = data.src_col.clone().or_else(|| file.src_col.clone()) {
        schema.src_col = c;
    }
    if let Some(c) = data.dst_col.clone().or_else(|| file.dst_col.clone()) {
        schema.dst_col = c;
    }
    if let Some(c) = data.date_col.clone().or_else(|| file.date_col.clone()) {
        schema.date_col = c;
    }
    if let Some(c) = data.count_col.clone().or_else(|| file.count_col.clone()) {
        schema.count_col = c;
    }
    schema.reverse_direction = data.reverse_edges || file.reverse_edges.unwrap_or(false);
    Ok(schema)
}

/// Picks exactly one data source and checks referenced paths exist.
pub fn resolve_data_source(data: &DataArgs, file: &FileConfig) -> Result<DataSource, CliError> {
    let synthetic = data.synthetic || file.synthetic.unwrap_or(false);
    let edges = data.edges.clone().or_else(|| file.edges.clone());
    let truth = data.truth.clone().or_else(|| file.truth.clone());
    match (synthetic, edges) {
        (true, Some(_)) => Err(validation(
            "exactly one data source: drop --edges or --synthetic",
        )),
        (true, None) => {
            if truth.is_some() {
                return Err(validation(
                    "--truth cannot be combined with --synthetic; the generator provides its own ground truth",
                ));
            }
            Ok(DataSource::Synthetic(resolve_synth_params(
                &data.synth, file,
            )))
        }
        (false, Some(edges)) => {
            if !edges.exists() {
                return Err(validation(format!(
                    "edge file not found: {}",
                    edges.display()
                )));
            }
            if let Some(t) = &truth {
                if !t.exists() {
                    return Err(validation(format!(
                        "ground-truth file not found: {}",
                        t.display()
                    )));
                }
            }
            Ok(DataSource::Files {
                edges,
                schema: resolve_schema(data, file)?,
                truth,
            })
        }
        (false, None) => Err(validation(
            "no data source: pass --edges PATH or --synthetic",
        )),
    }
}

/// Resolved algorithm parameters shared by every method in a run.
#[derive(Debug, Clone)]
pub struct AlgoSettings {
    pub granularity: Granularity,
    pub p: u32,
    pub rpr: RprParams,
    pub max_rank: u32,
    pub jobs: Option<usize>,
    pub queries: Option<Vec<String>>,
}

pub fn resolve_algo(args: &AlgoArgs, file: &FileConfig) -> Result<AlgoSettings, CliError> {
    let granularity: Granularity = args
        .granularity
        .clone()
        .or_else(|| file.granularity.clone())
        .unwrap_or_else(|| "month".into())
        .parse()
        .map_err(validation)?;
    let p = args.p.or(file.p).unwrap_or(3);
    if p == 0 {
        return Err(validation("voting threshold p must be >= 1"));
    }
    let defaults = RprParams::default();
    let rpr = RprParams {
        damping: args.damping.or(file.damping).unwrap_or(defaults.damping),
        tolerance: args
            .tolerance
            .or(file.tolerance)
            .unwrap_or(defaults.tolerance),
        max_iterations: args
            .max_iterations
            .or(file.max_iterations)
            .unwrap_or(defaults.max_iterations),
    };
    rpr.validate().map_err(validation)?;
    let max_rank = args.max_rank.or(file.max_rank).unwrap_or(10);
    if max_rank == 0 {
        return Err(validation("max_rank must be >= 1"));
    }
    let queries = if args.queries.is_empty() {
        file.queries.clone()
    } else {
        Some(args.queries.clone())
    };
    Ok(AlgoSettings {
        granularity,
        p,
        rpr,
        max_rank,
        jobs: args.jobs.or(file.jobs),
        queries,
    })
}

/// Single method for `rank`: `--method` wins over the config file.
pub fn resolve_single_method(args: &AlgoArgs, file: &FileConfig) -> Result<Method, CliError> {
    if !args.methods.is_empty() {
        return Err(validation("rank takes a single --method, not --methods"));
    }
    args.method
        .clone()
        .or_else(|| file.method.clone())
        .unwrap_or_else(|| "time-voting".into())
        .parse()
        .map_err(validation)
}

/// Method list for `evaluate`.
pub fn resolve_methods(args: &AlgoArgs, file: &FileConfig) -> Result<Vec<Method>, CliError> {
    let names: Vec<String> = if !args.methods.is_empty() {
        args.methods.clone()
    } else if let Some(m) = &args.method {
        vec![m.clone()]
    } else if let Some(ms) = &file.methods {
        ms.clone()
    } else if let Some(m) = &file.method {
        vec![m.clone()]
    } else {
        vec!["baseline".into(), "time-voting".into()]
    };
    let mut methods = Vec::with_capacity(names.len());
    for name in names {
        let method: Method = name.parse().map_err(validation)?;
        if !methods.contains(&method) {
            methods.push(method);
        }
    }
    Ok(methods)
}

/// Single weighting (rank, slice-info).
pub fn resolve_single_weighting(
    args: &AlgoArgs,
    file: &FileConfig,
) -> Result<Weighting, CliError> {
    args.weighting
        .clone()
        .or_else(|| file.weighting.clone())
        .unwrap_or_else(|| "weighted".into())
        .parse()
        .map_err(validation)
}

/// Weighting list for `evaluate`.
pub fn resolve_weightings(args: &AlgoArgs, file: &FileConfig) -> Result<Vec<Weighting>, CliError> {
    let names: Vec<String> = if !args.weightings.is_empty() {
        args.weightings.clone()
    } else if let Some(w) = &args.weighting {
        vec![w.clone()]
    } else if let Some(ws) = &file.weightings {
        ws.clone()
    } else if let Some(w) = &file.weighting {
        vec![w.clone()]
    } else {
        vec!["weighted".into()]
    };
    let mut weightings = Vec::with_capacity(names.len());
    for name in names {
        let weighting: Weighting = name.parse().map_err(validation)?;
        if !weightings.contains(&weighting) {
            weightings.push(weighting);
        }
    }
    Ok(weightings)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty_algo() -> AlgoArgs {
        AlgoArgs::default()
    }

    #[test]
    fn defaults_apply_when_nothing_is_given() {
        let settings = resolve_algo(&empty_algo(), &FileConfig::default()).unwrap();
        assert_eq!(settings.granularity, Granularity::Month);
        assert_eq!(settings.p, 3);
        assert_eq!(settings.max_rank, 10);
        assert_eq!(settings.rpr, RprParams::default());
    }

    #[test]
    fn flags_override_file_values() {
        let file: FileConfig =
            serde_json::from_str(r#"{"p": 7, "granularity": "year", "damping": 0.5}"#).unwrap();
        let args = AlgoArgs {
            p: Some(2),
            ..Default::default()
        };
        let settings = resolve_algo(&args, &file).unwrap();
        assert_eq!(settings.p, 2); // flag wins
        assert_eq!(settings.granularity, Granularity::Year); // file wins over default
        assert_eq!(settings.rpr.damping, 0.5);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let err = serde_json::from_str::<FileConfig>(r#"{"dampign": 0.9}"#);
        assert!(err.is_err());
    }

    #[test]
    fn method_lists_deduplicate_and_parse() {
        let args = AlgoArgs {
            methods: vec!["baseline".into(), "time-voting".into(), "baseline".into()],
            ..Default::default()
        };
        let methods = resolve_methods(&args, &FileConfig::default()).unwrap();
        assert_eq!(methods, vec![Method::Baseline, Method::TimeVoting]);
    }

    #[test]
    fn data_source_requires_exactly_one_origin() {
        let neither = DataArgs::default();
        assert!(matches!(
            resolve_data_source(&neither, &FileConfig::default()),
            Err(CliError::Validation(_))
        ));
        let both = DataArgs {
            edges: Some(PathBuf::from("/tmp/x.csv")),
            synthetic: true,
            ..Default::default()
        };
        assert!(matches!(
            resolve_data_source(&both, &FileConfig::default()),
            Err(CliError::Validation(_))
        ));
    }

    #[test]
    fn synthetic_params_merge_with_defaults() {
        let file: FileConfig = serde_json::from_str(r#"{"seed": 5, "managers": 3}"#).unwrap();
        let data = DataArgs {
            synthetic: true,
            synth: SynthParamArgs {
                managers: Some(4),
                ..Default::default()
            },
            ..Default::default()
        };
        match resolve_data_source(&data, &file).unwrap() {
            DataSource::Synthetic(params) => {
                assert_eq!(params.seed, 5); // from file
                assert_eq!(params.managers, 4); // flag wins
                assert_eq!(params.slots, SynthParams::default().slots);
            }
            other => panic!("expected synthetic source, got {other:?}"),
        }
    }
}
