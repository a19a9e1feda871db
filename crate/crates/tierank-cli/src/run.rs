//! Command implementations: data loading, per-query fan-out, and output
//! files. Every run writes its effective parameters to run_manifest.json
//! next to the result files; nothing is reported only on the terminal.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;

use tierank::error::Error;
use tierank::eval::{
    compare_methods, comparison_to_csv, curve_to_csv, curves_to_json, method_label, recall_curve,
    GroundTruth, RecallCurve,
};
use tierank::graph::{
    build_full_snapshot, slot_statistics, Granularity, NodeId, Snapshot, TemporalEdgeList,
    Weighting,
};
use tierank::ingest::{
    generate_synthetic, parse_edges, parse_ground_truth, write_edges_csv, write_ground_truth_csv,
    SynthParams,
};
use tierank::pipeline::{
    baseline_rank_on, modal_position_rank_on, timeslice_rank_on, InferenceResult, Method,
    QuerySet, SnapshotSeries,
};

use crate::config::{runtime, validation, AlgoSettings, CliError, DataSource};

pub struct LoadedData {
    pub edges: TemporalEdgeList,
    pub truth: Option<GroundTruth>,
    pub source: DataSource,
}

/// Loads interaction data and (when available) ground truth.
pub fn load(source: DataSource) -> Result<LoadedData, CliError> {
    match &source {
        DataSource::Files {
            edges,
            schema,
            truth,
        } => {
            let list = parse_edges(edges, schema).map_err(validation)?;
            let truth = truth
                .as_ref()
                .map(|t| parse_ground_truth(t, list.nodes()).map_err(validation))
                .transpose()?;
            Ok(LoadedData {
                edges: list,
                truth,
                source,
            })
        }
        DataSource::Synthetic(params) => {
            let (edges, truth) = generate_synthetic(params).map_err(validation)?;
            Ok(LoadedData {
                edges,
                truth: Some(truth),
                source,
            })
        }
    }
}

/// Queries named on the command line, or every ground-truth subordinate.
pub fn resolve_queries(data: &LoadedData, settings: &AlgoSettings) -> Result<QuerySet, CliError> {
    let ids = match &settings.queries {
        Some(labels) => {
            let mut ids = Vec::with_capacity(labels.len());
            for label in labels {
                let id = data
                    .edges
                    .nodes()
                    .get(label)
                    .ok_or_else(|| validation(format!("unknown query label '{label}'")))?;
                ids.push(id);
            }
            ids
        }
        None => {
            let truth = data.truth.as_ref().ok_or_else(|| {
                validation("no queries: pass --queries or provide ground truth (--truth)")
            })?;
            truth.subordinates()
        }
    };
    QuerySet::new(ids).map_err(validation)
}

fn build_pool(jobs: Option<usize>) -> Result<Option<rayon::ThreadPool>, CliError> {
    match jobs {
        None => Ok(None),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(Some)
            .map_err(|e| runtime(format!("cannot build thread pool: {e}"))),
    }
}

/// Pre-built graph structures for one (method, weighting) combination.
enum MethodContext {
    Baseline(Box<Snapshot>),
    TimeBased(SnapshotSeries),
}

fn build_context(
    method: Method,
    edges: &TemporalEdgeList,
    granularity: Granularity,
    weighting: Weighting,
) -> Result<MethodContext, CliError> {
    match method {
        Method::Baseline => Ok(MethodContext::Baseline(Box::new(build_full_snapshot(
            edges, weighting,
        )))),
        Method::TimeVoting | Method::TimeModalPosition => {
            SnapshotSeries::build(edges, granularity, weighting)
                .map(MethodContext::TimeBased)
                .map_err(runtime)
        }
    }
}

/// Empty ranking recorded for queries that are active in no snapshot;
/// they stay in the result set as permanent recall misses.
fn isolated_result(
    query: NodeId,
    method: Method,
    weighting: Weighting,
    granularity: Granularity,
) -> InferenceResult {
    InferenceResult {
        query,
        method,
        weighting,
        granularity: match method {
            Method::Baseline => None,
            _ => Some(granularity),
        },
        ranking: Vec::new(),
    }
}

/// Runs one method over the whole query set, fanning out across the pool.
fn run_method(
    method: Method,
    data: &LoadedData,
    queries: &QuerySet,
    settings: &AlgoSettings,
    weighting: Weighting,
    pool: Option<&rayon::ThreadPool>,
) -> Result<Vec<InferenceResult>, CliError> {
    let context = build_context(method, &data.edges, settings.granularity, weighting)?;
    let p = settings.p;
    let rpr = settings.rpr;
    let granularity = settings.granularity;
    let work = || -> Result<Vec<InferenceResult>, Error> {
        queries
            .as_slice()
            .par_iter()
            .map(|&query| {
                let outcome = match &context {
                    MethodContext::Baseline(snapshot) => baseline_rank_on(snapshot, query, &rpr),
                    MethodContext::TimeBased(series) => match method {
                        Method::TimeVoting => timeslice_rank_on(series, query, p, &rpr),
                        Method::TimeModalPosition => modal_position_rank_on(series, query, &rpr),
                        Method::Baseline => unreachable!("baseline uses the full snapshot"),
                    },
                };
                match outcome {
                    Ok(result) => Ok(result),
                    Err(Error::QueryIsolated(_)) => {
                        Ok(isolated_result(query, method, weighting, granularity))
                    }
                    Err(other) => Err(other),
                }
            })
            .collect()
    };
    let results = match pool {
        Some(pool) => pool.install(work),
        None => work(),
    }
    .map_err(runtime)?;
    Ok(results)
}

fn ensure_out_dir(out_dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out_dir)
        .map_err(|e| runtime(format!("cannot create {}: {e}", out_dir.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))
}

fn source_manifest(source: &DataSource) -> serde_json::Value {
    match source {
        DataSource::Files {
            edges,
            schema,
            truth,
        } => json!({
            "kind": "files",
            "edges": edges.display().to_string(),
            "schema": {
                "kind": if schema.directed() { "directed-counts" } else { "undirected-coauthor" },
                "src_col": schema.src_col,
                "dst_col": schema.dst_col,
                "date_col": schema.date_col,
                "count_col": schema.count_col,
                "reverse_direction": schema.reverse_direction,
            },
            "truth": truth.as_ref().map(|t| t.display().to_string()),
        }),
        DataSource::Synthetic(params) => json!({
            "kind": "synthetic",
            "params": params,
        }),
    }
}

#[allow(clippy::too_many_arguments)]
fn write_manifest(
    out_dir: &Path,
    command: &str,
    source: &DataSource,
    methods: &[Method],
    weightings: &[Weighting],
    settings: &AlgoSettings,
    n_queries: usize,
    outputs: &[String],
) -> Result<(), CliError> {
    let manifest = json!({
        "command": command,
        "source": source_manifest(source),
        "methods": methods.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        "weightings": weightings.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        "granularity": settings.granularity.to_string(),
        "p": settings.p,
        "damping": settings.rpr.damping,
        "tolerance": settings.rpr.tolerance,
        "max_iterations": settings.rpr.max_iterations,
        "max_rank": settings.max_rank,
        "jobs": settings.jobs,
        "query_source": if settings.queries.is_some() { "explicit" } else { "ground-truth" },
        "n_queries": n_queries,
        "outputs": outputs,
    });
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest JSON");
    text.push('\n');
    write_file(&out_dir.join("run_manifest.json"), &text)
}

/// `rank`: per-query top-max_rank candidate lists as CSV and JSON.
pub fn cmd_rank(
    data: &LoadedData,
    settings: &AlgoSettings,
    method: Method,
    weighting: Weighting,
    out_dir: &Path,
) -> Result<(), CliError> {
    ensure_out_dir(out_dir)?;
    let queries = resolve_queries(data, settings)?;
    let pool = build_pool(settings.jobs)?;
    let mut results = run_method(method, data, &queries, settings, weighting, pool.as_ref())?;
    results.sort_by_key(|r| r.query);

    let max_rank = settings.max_rank as usize;
    let mut csv = String::from("query,rank,candidate,score\n");
    for result in &results {
        let query_label = data.edges.nodes().label(result.query);
        for (i, &(node, score)) in result.ranking.iter().take(max_rank).enumerate() {
            let _ = writeln!(
                csv,
                "{query_label},{},{},{score:.6}",
                i + 1,
                data.edges.nodes().label(node)
            );
        }
    }
    write_file(&out_dir.join("rankings.csv"), &csv)?;

    let queries_json: Vec<serde_json::Value> = results
        .iter()
        .map(|result| {
            json!({
                "query": data.edges.nodes().label(result.query),
                "candidates": result
                    .ranking
                    .iter()
                    .take(max_rank)
                    .map(|&(node, score)| json!({
                        "node": data.edges.nodes().label(node),
                        "score": score,
                    }))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    let rankings = json!({
        "method": method.to_string(),
        "weighting": weighting.to_string(),
        "granularity": match method {
            Method::Baseline => serde_json::Value::Null,
            _ => json!(settings.granularity.to_string()),
        },
        "max_rank": settings.max_rank,
        "queries": queries_json,
    });
    let mut text = serde_json::to_string_pretty(&rankings).expect("rankings JSON");
    text.push('\n');
    write_file(&out_dir.join("rankings.json"), &text)?;

    write_manifest(
        out_dir,
        "rank",
        &data.source,
        &[method],
        &[weighting],
        settings,
        results.len(),
        &["rankings.csv".into(), "rankings.json".into()],
    )
}

/// `evaluate`: one recall curve per (method, weighting), a side-by-side
/// comparison with an AURC row, and the curves as JSON.
pub fn cmd_evaluate(
    data: &LoadedData,
    settings: &AlgoSettings,
    methods: &[Method],
    weightings: &[Weighting],
    out_dir: &Path,
) -> Result<(), CliError> {
    ensure_out_dir(out_dir)?;
    let truth = data
        .truth
        .as_ref()
        .ok_or_else(|| validation("evaluate requires ground truth (--truth or --synthetic)"))?;
    let queries = resolve_queries(data, settings)?;
    let pool = build_pool(settings.jobs)?;

    let mut curves: Vec<RecallCurve> = Vec::new();
    let mut outputs: Vec<String> = Vec::new();
    for &weighting in weightings {
        for &method in methods {
            let results = run_method(method, data, &queries, settings, weighting, pool.as_ref())?;
            let curve = recall_curve(&results, truth, settings.max_rank).map_err(runtime)?;
            let granularity = match method {
                Method::Baseline => None,
                _ => Some(settings.granularity),
            };
            let label = method_label(method, granularity, weighting);
            let file = format!("recall_{label}.csv");
            write_file(&out_dir.join(&file), &curve_to_csv(&curve))?;
            outputs.push(file);
            curves.push(curve);
        }
    }

    let table = compare_methods(&curves).map_err(runtime)?;
    write_file(&out_dir.join("comparison.csv"), &comparison_to_csv(&table))?;
    outputs.push("comparison.csv".into());
    let mut json_text = curves_to_json(&curves);
    json_text.push('\n');
    write_file(&out_dir.join("curves.json"), &json_text)?;
    outputs.push("curves.json".into());

    write_manifest(
        out_dir,
        "evaluate",
        &data.source,
        methods,
        weightings,
        settings,
        queries.len(),
        &outputs,
    )
}

/// `synth`: edges.csv and truth.csv in the ingest schemas.
pub fn cmd_synth(params: &SynthParams, out_dir: &Path) -> Result<(), CliError> {
    let (edges, truth) = generate_synthetic(params).map_err(validation)?;
    ensure_out_dir(out_dir)?;

    let mut edge_buf = Vec::new();
    write_edges_csv(&edges, &mut edge_buf).map_err(runtime)?;
    fs::write(out_dir.join("edges.csv"), &edge_buf)
        .map_err(|e| runtime(format!("cannot write edges.csv: {e}")))?;

    let mut truth_buf = Vec::new();
    write_ground_truth_csv(&truth, edges.nodes(), &mut truth_buf).map_err(runtime)?;
    fs::write(out_dir.join("truth.csv"), &truth_buf)
        .map_err(|e| runtime(format!("cannot write truth.csv: {e}")))?;

    let manifest = json!({
        "command": "synth",
        "params": params,
        "nodes": edges.node_count(),
        "edges": edges.edge_count(),
        "ties": truth.len(),
        "outputs": ["edges.csv", "truth.csv"],
    });
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest JSON");
    text.push('\n');
    write_file(&out_dir.join("run_manifest.json"), &text)
}

/// `slice-info`: slot boundaries and per-slot graph statistics.
pub fn cmd_slice_info(
    data: &LoadedData,
    granularity: Granularity,
    weighting: Weighting,
    out_dir: Option<&PathBuf>,
) -> Result<(), CliError> {
    let stats = slot_statistics(&data.edges, granularity, weighting).map_err(runtime)?;
    let mut table = String::from("slot,begin,end,active_nodes,edges,total_weight\n");
    for s in &stats {
        let _ = writeln!(
            table,
            "{},{},{},{},{},{}",
            s.slot.index, s.slot.begin, s.slot.end, s.active_nodes, s.edges, s.total_weight
        );
    }
    print!("{table}");
    if let Some(dir) = out_dir {
        ensure_out_dir(dir)?;
        write_file(&dir.join("slices.csv"), &table)?;
    }
    Ok(())
}
