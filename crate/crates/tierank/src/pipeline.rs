//! Inference pipelines: the full-span baseline ranking and the time-based
//! Rank/Sort/Merge scheme with its two aggregators.
//!
//! The time-based path runs rooted PageRank per slot with the query as
//! root, sorts each slot's scores, and merges the per-slot lists either by
//! top-p voting (a candidate earns one vote per slot where it ranks within
//! the first `p` positions) or by modal rank position.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{
    build_full_snapshot, build_snapshot, slice_timeline, Granularity, NodeId, Snapshot,
    TemporalEdgeList, Weighting,
};
use crate::rpr::{rank_scores, rooted_pagerank, RprParams};

/// Nodes whose direct superior is to be inferred.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySet {
    queries: Vec<NodeId>,
}

impl QuerySet {
    /// Keeps the given order; duplicate ids are rejected.
    pub fn new(queries: Vec<NodeId>) -> Result<Self> {
        let mut sorted = queries.clone();
        sorted.sort_unstable();
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateQuery(pair[0]));
            }
        }
        Ok(Self { queries })
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.queries.iter().copied()
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.queries
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }
}

/// Inference strategy tag carried on results and output files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Baseline,
    TimeVoting,
    TimeModalPosition,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Baseline => write!(f, "baseline"),
            Method::TimeVoting => write!(f, "time-voting"),
            Method::TimeModalPosition => write!(f, "modal-position"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(Method::Baseline),
            "time-voting" => Ok(Method::TimeVoting),
            "modal-position" => Ok(Method::TimeModalPosition),
            other => Err(Error::InvalidParams(format!(
                "unknown method '{other}' (expected baseline, time-voting, or modal-position)"
            ))),
        }
    }
}

/// Per-slot snapshots of one edge list under one slicing and weighting.
///
/// Building the series once and reusing it across queries avoids
/// re-materializing snapshots; it is immutable and shareable across
/// threads.
#[derive(Debug, Clone)]
pub struct SnapshotSeries {
    granularity: Granularity,
    weighting: Weighting,
    snapshots: Vec<Snapshot>,
}

impl SnapshotSeries {
    pub fn build(
        edges: &TemporalEdgeList,
        granularity: Granularity,
        weighting: Weighting,
    ) -> Result<Self> {
        let slots = slice_timeline(edges, granularity)?;
        let snapshots = slots
            .iter()
            .map(|slot| build_snapshot(edges, slot, weighting))
            .collect();
        Ok(Self {
            granularity,
            weighting,
            snapshots,
        })
    }

    pub fn granularity(&self) -> Granularity {
        self.granularity
    }

    pub fn weighting(&self) -> Weighting {
        self.weighting
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }
}

/// Vote counts for one query under top-p merging.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VotingTally {
    pub query: NodeId,
    pub p: u32,
    /// Slots (among those where the query was active) in which each
    /// candidate ranked within the top p of the query's list.
    pub votes: BTreeMap<NodeId, u32>,
    pub slots_participated: u32,
}

/// Final ranking for one query.
///
/// Rankings contain only candidates the restart walk actually reached
/// (strictly positive score in at least one contributing snapshot);
/// never-reached nodes carry no evidence and would otherwise be ordered
/// purely by id. The score column is method-specific: the rooted-PageRank
/// score for the baseline, the vote count for top-p voting, and the modal
/// rank position for modal-position aggregation.
#[derive(Debug, Clone, PartialEq)]
pub struct InferenceResult {
    pub query: NodeId,
    pub method: Method,
    pub weighting: Weighting,
    /// Slicing used by the time-based methods; None for the baseline.
    pub granularity: Option<Granularity>,
    pub ranking: Vec<(NodeId, f64)>,
}

impl InferenceResult {
    /// 1-based position of `node` in the ranking, if present.
    pub fn position_of(&self, node: NodeId) -> Option<u32> {
        self.ranking
            .iter()
            .position(|&(n, _)| n == node)
            .map(|i| i as u32 + 1)
    }
}

/// 1-based positions of every candidate in the query's per-slot lists.
struct SlotPositions {
    slots_participated: u32,
    positions: BTreeMap<NodeId, Vec<u32>>,
}

fn collect_slot_positions(
    series: &SnapshotSeries,
    query: NodeId,
    params: &RprParams,
) -> Result<SlotPositions> {
    let mut positions: BTreeMap<NodeId, Vec<u32>> = BTreeMap::new();
    let mut slots_participated = 0u32;
    for snapshot in series.snapshots() {
        if snapshot.is_empty() || !snapshot.is_active(query) {
            // absence is non-evidence: the slot is skipped entirely
            continue;
        }
        let scores = rooted_pagerank(snapshot, query, params)?;
        let ranked = rank_scores(&scores);
        slots_participated += 1;
        // zero-score candidates were never reached by the walk; they sit
        // in an id-ordered tail and carry no ranking evidence
        for (idx, &(node, score)) in ranked.entries().iter().enumerate() {
            if score <= 0.0 {
                break;
            }
            positions.entry(node).or_default().push(idx as u32 + 1);
        }
    }
    if slots_participated == 0 {
        return Err(Error::QueryIsolated(query));
    }
    Ok(SlotPositions {
        slots_participated,
        positions,
    })
}

/// Full-span ranking: one rooted-PageRank run with the query as root.
pub fn baseline_rank(
    edges: &TemporalEdgeList,
    query: NodeId,
    weighting: Weighting,
    params: &RprParams,
) -> Result<InferenceResult> {
    let snapshot = build_full_snapshot(edges, weighting);
    baseline_rank_on(&snapshot, query, params)
}

/// Baseline ranking over an already-built full-span snapshot.
pub fn baseline_rank_on(
    snapshot: &Snapshot,
    query: NodeId,
    params: &RprParams,
) -> Result<InferenceResult> {
    let scores = match rooted_pagerank(snapshot, query, params) {
        Err(Error::RootInactive(n)) => return Err(Error::QueryIsolated(n)),
        other => other?,
    };
    let ranked = rank_scores(&scores);
    let ranking: Vec<(NodeId, f64)> = ranked
        .entries()
        .iter()
        .copied()
        .take_while(|&(_, score)| score > 0.0)
        .collect();
    Ok(InferenceResult {
        query,
        method: Method::Baseline,
        weighting: snapshot.weighting(),
        granularity: None,
        ranking,
    })
}

/// Computes the top-p vote tally for one query across all slots.
pub fn vote_tally_on(
    series: &SnapshotSeries,
    query: NodeId,
    p: u32,
    params: &RprParams,
) -> Result<VotingTally> {
    if p == 0 {
        return Err(Error::InvalidThreshold(p));
    }
    let slots = collect_slot_positions(series, query, params)?;
    let votes = slots
        .positions
        .iter()
        .map(|(&node, positions)| {
            let v = positions.iter().filter(|&&pos| pos <= p).count() as u32;
            (node, v)
        })
        .collect();
    Ok(VotingTally {
        query,
        p,
        votes,
        slots_participated: slots.slots_participated,
    })
}

/// Time-based inference with top-p voting across slots.
///
/// Candidates are ordered by vote count descending, then by mean rank
/// position across the slots where they appeared, then by ascending id.
pub fn timeslice_rank_on(
    series: &SnapshotSeries,
    query: NodeId,
    p: u32,
    params: &RprParams,
) -> Result<InferenceResult> {
    if p == 0 {
        return Err(Error::InvalidThreshold(p));
    }
    let slots = collect_slot_positions(series, query, params)?;
    let mut entries: Vec<(NodeId, u32, f64)> = slots
        .positions
        .iter()
        .map(|(&node, positions)| {
            let votes = positions.iter().filter(|&&pos| pos <= p).count() as u32;
            let mean_pos =
                positions.iter().map(|&pos| f64::from(pos)).sum::<f64>() / positions.len() as f64;
            (node, votes, mean_pos)
        })
        .collect();
    entries.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then_with(|| a.2.total_cmp(&b.2))
            .then_with(|| a.0.cmp(&b.0))
    });
    Ok(InferenceResult {
        query,
        method: Method::TimeVoting,
        weighting: series.weighting(),
        granularity: Some(series.granularity()),
        ranking: entries
            .into_iter()
            .map(|(node, votes, _)| (node, f64::from(votes)))
            .collect(),
    })
}

/// Convenience wrapper building the snapshot series on the fly.
pub fn timeslice_rank(
    edges: &TemporalEdgeList,
    query: NodeId,
    granularity: Granularity,
    weighting: Weighting,
    p: u32,
    params: &RprParams,
) -> Result<InferenceResult> {
    let series = SnapshotSeries::build(edges, granularity, weighting)?;
    timeslice_rank_on(&series, query, p, params)
}

/// Time-based inference ranking candidates by their most frequent rank
/// position across slots.
///
/// A candidate's modal position is the smallest position among those of
/// maximal frequency; candidates are ordered by modal position ascending,
/// then by that frequency descending, then by ascending id.
pub fn modal_position_rank_on(
    series: &SnapshotSeries,
    query: NodeId,
    params: &RprParams,
) -> Result<InferenceResult> {
    let slots = collect_slot_positions(series, query, params)?;
    let mut entries: Vec<(NodeId, u32, u32)> = slots
        .positions
        .iter()
        .map(|(&node, positions)| {
            let (modal, freq) = modal_position(positions);
            (node, modal, freq)
        })
        .collect();
    entries.sort_by(|a, b| {
        a.1.cmp(&b.1)
            .then_with(|| b.2.cmp(&a.2))
            .then_with(|| a.0.cmp(&b.0))
    });
    Ok(InferenceResult {
        query,
        method: Method::TimeModalPosition,
        weighting: series.weighting(),
        granularity: Some(series.granularity()),
        ranking: entries
            .into_iter()
            .map(|(node, modal, _)| (node, f64::from(modal)))
            .collect(),
    })
}

/// Convenience wrapper building the snapshot series on the fly.
pub fn modal_position_rank(
    edges: &TemporalEdgeList,
    query: NodeId,
    granularity: Granularity,
    weighting: Weighting,
    params: &RprParams,
) -> Result<InferenceResult> {
    let series = SnapshotSeries::build(edges, granularity, weighting)?;
    modal_position_rank_on(&series, query, params)
}

/// Most frequent position; the smallest one wins on frequency ties.
fn modal_position(positions: &[u32]) -> (u32, u32) {
    let mut freq: BTreeMap<u32, u32> = BTreeMap::new();
    for &pos in positions {
        *freq.entry(pos).or_insert(0) += 1;
    }
    let best = freq.values().copied().max().unwrap_or(0);
    let modal = freq
        .iter()
        .find(|&(_, &f)| f == best)
        .map(|(&pos, _)| pos)
        .unwrap_or(0);
    (modal, best)
}
