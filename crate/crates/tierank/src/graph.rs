//! Temporal edge log, time slicing, and immutable per-slot graph snapshots.
//!
//! The edge log ([`TemporalEdgeList`]) keeps every interaction with its
//! calendar date and count. [`slice_timeline`] partitions the covered span
//! into non-overlapping slots and [`build_snapshot`] materializes the
//! subgraph of one slot in compressed adjacency form. Snapshots are
//! immutable and safe to share across threads.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Days, NaiveDate};

use crate::error::{Error, Result};

/// Dense node index within one edge list.
///
/// Ids are assigned contiguously from 0 in first-appearance order, so a
/// [`NodeTable`] maps labels to ids bijectively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Bijective mapping between external string labels (e-mail addresses,
/// author names) and dense [`NodeId`]s.
#[derive(Debug, Clone, Default)]
pub struct NodeTable {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl NodeTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id for `label`, assigning the next free id on first use.
    pub fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = NodeId(self.labels.len() as u32);
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    pub fn get(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    /// Label of `id`. Panics if the id was not produced by this table.
    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id.index()]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.labels.len() as u32).map(NodeId)
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &str)> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, l)| (NodeId(i as u32), l.as_str()))
    }
}

impl PartialEq for NodeTable {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

/// One interaction record: `count` contacts from `src` to `dst` on `date`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TemporalEdge {
    pub src: NodeId,
    pub dst: NodeId,
    pub date: NaiveDate,
    pub count: u64,
}

/// Inclusive calendar range covered by an edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateSpan {
    pub first: NaiveDate,
    pub last: NaiveDate,
}

impl DateSpan {
    /// Number of days in the span, endpoints included.
    pub fn days(&self) -> i64 {
        (self.last - self.first).num_days() + 1
    }
}

impl fmt::Display for DateSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.first, self.last)
    }
}

/// The full interaction log: node table, merged edges, directedness, and
/// the covered span.
///
/// Interactions sharing (src, dst, date) are merged at construction by
/// summing counts. Undirected lists store each pair with `src <= dst`.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalEdgeList {
    nodes: NodeTable,
    edges: Vec<TemporalEdge>,
    directed: bool,
    span: DateSpan,
}

impl TemporalEdgeList {
    pub fn nodes(&self) -> &NodeTable {
        &self.nodes
    }

    pub fn edges(&self) -> &[TemporalEdge] {
        &self.edges
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn span(&self) -> DateSpan {
        self.span
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sum of interaction counts over all edges.
    pub fn total_interactions(&self) -> u64 {
        self.edges.iter().map(|e| e.count).sum()
    }
}

/// Incrementally assembles a [`TemporalEdgeList`], merging duplicate
/// (src, dst, date) records and canonicalizing undirected pairs.
#[derive(Debug)]
pub struct EdgeListBuilder {
    directed: bool,
    nodes: NodeTable,
    edges: Vec<TemporalEdge>,
    seen: HashMap<(NodeId, NodeId, NaiveDate), usize>,
}

impl EdgeListBuilder {
    pub fn new(directed: bool) -> Self {
        Self {
            directed,
            nodes: NodeTable::new(),
            edges: Vec::new(),
            seen: HashMap::new(),
        }
    }

    pub fn nodes(&self) -> &NodeTable {
        &self.nodes
    }

    pub fn intern(&mut self, label: &str) -> NodeId {
        self.nodes.intern(label)
    }

    /// Records one interaction given labels.
    pub fn add(&mut self, src: &str, dst: &str, date: NaiveDate, count: u64) -> Result<()> {
        let src = self.nodes.intern(src);
        let dst = self.nodes.intern(dst);
        self.add_ids(src, dst, date, count)
    }

    /// Records one interaction given already-interned ids.
    pub fn add_ids(&mut self, src: NodeId, dst: NodeId, date: NaiveDate, count: u64) -> Result<()> {
        if count == 0 {
            return Err(Error::InvalidParams(
                "interaction count must be >= 1".into(),
            ));
        }
        let n = self.nodes.len() as u32;
        if src.0 >= n || dst.0 >= n {
            return Err(Error::InvalidParams(format!(
                "node id out of range: {} or {} >= {n}",
                src, dst
            )));
        }
        let (src, dst) = if !self.directed && dst < src {
            (dst, src)
        } else {
            (src, dst)
        };
        match self.seen.entry((src, dst, date)) {
            std::collections::hash_map::Entry::Occupied(e) => {
                self.edges[*e.get()].count += count;
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(self.edges.len());
                self.edges.push(TemporalEdge {
                    src,
                    dst,
                    date,
                    count,
                });
            }
        }
        Ok(())
    }

    /// Finishes the list, inferring the span from min/max edge dates.
    pub fn finish(self) -> Result<TemporalEdgeList> {
        if self.edges.is_empty() {
            return Err(Error::EmptySpan);
        }
        let first = self.edges.iter().map(|e| e.date).min().unwrap();
        let last = self.edges.iter().map(|e| e.date).max().unwrap();
        Ok(TemporalEdgeList {
            nodes: self.nodes,
            edges: self.edges,
            directed: self.directed,
            span: DateSpan { first, last },
        })
    }
}

/// Half-open calendar interval `[begin, end)` produced by [`slice_timeline`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeSlot {
    pub index: usize,
    pub begin: NaiveDate,
    pub end: NaiveDate,
}

impl TimeSlot {
    pub fn contains(&self, date: NaiveDate) -> bool {
        self.begin <= date && date < self.end
    }

    pub fn days(&self) -> i64 {
        (self.end - self.begin).num_days()
    }
}

impl fmt::Display for TimeSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.begin, self.end)
    }
}

/// How the observation span is partitioned into slots.
///
/// Calendar granularities align slots to ISO week / calendar month /
/// calendar year boundaries; `FixedCount(m)` cuts the span into `m`
/// equal-duration intervals, the last absorbing remainder days.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Granularity {
    Week,
    Month,
    Year,
    FixedCount(u32),
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Granularity::Week => write!(f, "week"),
            Granularity::Month => write!(f, "month"),
            Granularity::Year => write!(f, "year"),
            Granularity::FixedCount(m) => write!(f, "fixed{m}"),
        }
    }
}

impl FromStr for Granularity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "week" => Ok(Granularity::Week),
            "month" => Ok(Granularity::Month),
            "year" => Ok(Granularity::Year),
            other => {
                let m = other
                    .strip_prefix("fixed")
                    .map(|rest| rest.strip_prefix(':').unwrap_or(rest))
                    .and_then(|rest| rest.parse::<u32>().ok());
                match m {
                    Some(m) => Ok(Granularity::FixedCount(m)),
                    None => Err(Error::InvalidParams(format!(
                        "unknown granularity '{other}' (expected week, month, year, or fixed:N)"
                    ))),
                }
            }
        }
    }
}

/// Edge-weight policy for snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    /// Every snapshot edge gets weight 1, regardless of interaction counts.
    Unweighted,
    /// Snapshot edge weight is the summed interaction count within the slot.
    Weighted,
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weighting::Unweighted => write!(f, "unweighted"),
            Weighting::Weighted => write!(f, "weighted"),
        }
    }
}

impl FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unweighted" => Ok(Weighting::Unweighted),
            "weighted" => Ok(Weighting::Weighted),
            other => Err(Error::InvalidParams(format!(
                "unknown weighting '{other}' (expected weighted or unweighted)"
            ))),
        }
    }
}

/// Monday of the ISO week containing `date`.
fn week_begin(date: NaiveDate) -> NaiveDate {
    date - Days::new(u64::from(date.weekday().num_days_from_monday()))
}

fn month_begin(date: NaiveDate) -> NaiveDate {
    NaiveDate::from_ymd_opt(date.year(), date.month(), 1).unwrap()
}

fn next_month(date: NaiveDate) -> NaiveDate {
    let (y, m) = if date.month() == 12 {
        (date.year() + 1, 1)
    } else {
        (date.year(), date.month() + 1)
    };
    NaiveDate::from_ymd_opt(y, m, 1).unwrap()
}

fn year_begin(date: NaiveDate) -> NaiveDate {
    NaiveDate::from_ymd_opt(date.year(), 1, 1).unwrap()
}

fn next_year(date: NaiveDate) -> NaiveDate {
    NaiveDate::from_ymd_opt(date.year() + 1, 1, 1).unwrap()
}

/// Partitions the edge list's span into non-overlapping, contiguous slots.
///
/// Every edge date falls into exactly one slot. Calendar slots may extend
/// past the span at either end so that boundaries stay aligned.
pub fn slice_timeline(edges: &TemporalEdgeList, granularity: Granularity) -> Result<Vec<TimeSlot>> {
    let span = edges.span();
    match granularity {
        Granularity::Week => Ok(calendar_slots(span, week_begin(span.first), |d| {
            d + Days::new(7)
        })),
        Granularity::Month => Ok(calendar_slots(span, month_begin(span.first), next_month)),
        Granularity::Year => Ok(calendar_slots(span, year_begin(span.first), next_year)),
        Granularity::FixedCount(m) => fixed_count_slots(span, m),
    }
}

fn calendar_slots(
    span: DateSpan,
    start: NaiveDate,
    next: impl Fn(NaiveDate) -> NaiveDate,
) -> Vec<TimeSlot> {
    let mut slots = Vec::new();
    let mut begin = start;
    while begin <= span.last {
        let end = next(begin);
        slots.push(TimeSlot {
            index: slots.len(),
            begin,
            end,
        });
        begin = end;
    }
    slots
}

fn fixed_count_slots(span: DateSpan, m: u32) -> Result<Vec<TimeSlot>> {
    if m == 0 {
        return Err(Error::InvalidParams(
            "fixed-count slicing requires at least one slot".into(),
        ));
    }
    let days = span.days();
    if i64::from(m) > days {
        return Err(Error::TooManySlots { requested: m, days });
    }
    let base = days / i64::from(m);
    let mut slots = Vec::with_capacity(m as usize);
    let mut begin = span.first;
    for k in 0..m {
        let len = if k == m - 1 {
            // last slot absorbs the remainder
            days - base * i64::from(m - 1)
        } else {
            base
        };
        let end = begin + Days::new(len as u64);
        slots.push(TimeSlot {
            index: k as usize,
            begin,
            end,
        });
        begin = end;
    }
    Ok(slots)
}

/// Sentinel slot covering the whole span; used for the baseline snapshot.
pub fn full_span_slot(edges: &TemporalEdgeList) -> TimeSlot {
    let span = edges.span();
    TimeSlot {
        index: 0,
        begin: span.first,
        end: span.last + Days::new(1),
    }
}

/// Immutable subgraph of one time slot in compressed adjacency form.
///
/// Rows cover the full id space of the source edge list; `active_nodes`
/// are exactly the nodes incident to at least one edge in the slot.
/// Undirected snapshots store each edge in both endpoint rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    slot: TimeSlot,
    directed: bool,
    weighting: Weighting,
    row_ptr: Vec<usize>,
    targets: Vec<NodeId>,
    weights: Vec<f64>,
    out_weight: Vec<f64>,
    active: Vec<NodeId>,
    active_mask: Vec<bool>,
}

impl Snapshot {
    pub fn slot(&self) -> &TimeSlot {
        &self.slot
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    /// Weight policy the snapshot was built under.
    pub fn weighting(&self) -> Weighting {
        self.weighting
    }

    /// Size of the node id space (not the active count).
    pub fn node_space(&self) -> usize {
        self.row_ptr.len() - 1
    }

    /// Nodes incident to at least one edge in the slot, ascending by id.
    pub fn active_nodes(&self) -> &[NodeId] {
        &self.active
    }

    pub fn active_count(&self) -> usize {
        self.active.len()
    }

    pub fn is_active(&self, node: NodeId) -> bool {
        self.active_mask.get(node.index()).copied().unwrap_or(false)
    }

    /// Outgoing edges of `node` with their weights, ascending by target id.
    pub fn out_edges(&self, node: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let lo = self.row_ptr[node.index()];
        let hi = self.row_ptr[node.index() + 1];
        self.targets[lo..hi]
            .iter()
            .copied()
            .zip(self.weights[lo..hi].iter().copied())
    }

    /// Sum of outgoing edge weights of `node` (0 for dangling nodes).
    pub fn out_weight(&self, node: NodeId) -> f64 {
        self.out_weight[node.index()]
    }

    pub fn out_degree(&self, node: NodeId) -> usize {
        self.row_ptr[node.index() + 1] - self.row_ptr[node.index()]
    }

    /// Number of stored adjacency entries (undirected edges count twice).
    pub fn edge_entry_count(&self) -> usize {
        self.targets.len()
    }

    /// Number of distinct edges in the slot.
    pub fn edge_count(&self) -> usize {
        if self.directed {
            self.targets.len()
        } else {
            self.targets.len() / 2
        }
    }

    /// Sum of distinct-edge weights (mirrored entries counted once).
    pub fn total_weight(&self) -> f64 {
        let stored: f64 = self.weights.iter().sum();
        if self.directed {
            stored
        } else {
            stored / 2.0
        }
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

/// Materializes the subgraph of `slot` under the given weighting policy.
///
/// Keeps exactly the edges dated within `[slot.begin, slot.end)`, merges
/// parallel interactions per (src, dst) pair, and drops self-loops. An
/// empty slot yields an empty snapshot.
pub fn build_snapshot(
    edges: &TemporalEdgeList,
    slot: &TimeSlot,
    weighting: Weighting,
) -> Snapshot {
    let n = edges.node_count();
    let mut pair_weight: BTreeMap<(NodeId, NodeId), f64> = BTreeMap::new();
    for e in edges.edges() {
        if !slot.contains(e.date) || e.src == e.dst {
            continue;
        }
        let w = match weighting {
            Weighting::Weighted => e.count as f64,
            Weighting::Unweighted => 1.0,
        };
        add_pair(&mut pair_weight, (e.src, e.dst), w, weighting);
        if !edges.directed() {
            add_pair(&mut pair_weight, (e.dst, e.src), w, weighting);
        }
    }

    let mut active_mask = vec![false; n];
    for &(src, dst) in pair_weight.keys() {
        active_mask[src.index()] = true;
        active_mask[dst.index()] = true;
    }
    let active: Vec<NodeId> = active_mask
        .iter()
        .enumerate()
        .filter(|(_, &a)| a)
        .map(|(i, _)| NodeId(i as u32))
        .collect();

    let mut row_ptr = vec![0usize; n + 1];
    let mut targets = Vec::with_capacity(pair_weight.len());
    let mut weights = Vec::with_capacity(pair_weight.len());
    let mut out_weight = vec![0.0; n];
    let mut row = 0usize;
    for (&(src, dst), &w) in &pair_weight {
        while row <= src.index() {
            row_ptr[row] = targets.len();
            row += 1;
        }
        targets.push(dst);
        weights.push(w);
        out_weight[src.index()] += w;
    }
    while row <= n {
        row_ptr[row] = targets.len();
        row += 1;
    }

    Snapshot {
        slot: *slot,
        directed: edges.directed(),
        weighting,
        row_ptr,
        targets,
        weights,
        out_weight,
        active,
        active_mask,
    }
}

fn add_pair(
    map: &mut BTreeMap<(NodeId, NodeId), f64>,
    key: (NodeId, NodeId),
    w: f64,
    weighting: Weighting,
) {
    match weighting {
        Weighting::Weighted => {
            *map.entry(key).or_insert(0.0) += w;
        }
        Weighting::Unweighted => {
            map.insert(key, 1.0);
        }
    }
}

/// Snapshot of the entire span, ignoring the time dimension.
pub fn build_full_snapshot(edges: &TemporalEdgeList, weighting: Weighting) -> Snapshot {
    build_snapshot(edges, &full_span_slot(edges), weighting)
}

/// Per-slot node/edge statistics, as reported by `slice-info`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotStats {
    pub slot: TimeSlot,
    pub active_nodes: usize,
    pub edges: usize,
    pub total_weight: f64,
}

/// Slices the span and summarizes each slot's snapshot.
pub fn slot_statistics(
    edges: &TemporalEdgeList,
    granularity: Granularity,
    weighting: Weighting,
) -> Result<Vec<SlotStats>> {
    let slots = slice_timeline(edges, granularity)?;
    Ok(slots
        .iter()
        .map(|slot| {
            let snap = build_snapshot(edges, slot, weighting);
            SlotStats {
                slot: *slot,
                active_nodes: snap.active_count(),
                edges: snap.edge_count(),
                total_weight: snap.total_weight(),
            }
        })
        .collect())
}
