//! Reads interaction logs and ground-truth files into the domain model,
//! writes them back out, and generates seeded synthetic organizations for
//! benchmarking.
//!
//! All files are UTF-8 CSV with a header row. Edge files carry
//! source/target/date/count columns (names configurable); ground truth is
//! `subordinate,superior`. Dates are ISO `YYYY-MM-DD` or a bare `YYYY`,
//! which widens to January 1 of that year.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::eval::GroundTruth;
use crate::graph::{EdgeListBuilder, NodeTable, TemporalEdgeList};

/// Shape of an edge file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemaKind {
    /// Directed interaction counts (e.g. e-mails sent per sender/receiver).
    DirectedCounts,
    /// Symmetric co-occurrence records (e.g. papers co-authored per year).
    UndirectedCoauthor,
}

/// Column mapping and directedness policy for [`parse_edges`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeFileSchema {
    pub kind: SchemaKind,
    pub src_col: String,
    pub dst_col: String,
    pub date_col: String,
    pub count_col: String,
    /// Swap source and target while parsing (directed schemas only).
    pub reverse_direction: bool,
}

impl EdgeFileSchema {
    fn with_kind(kind: SchemaKind) -> Self {
        Self {
            kind,
            src_col: "src".into(),
            dst_col: "dst".into(),
            date_col: "date".into(),
            count_col: "count".into(),
            reverse_direction: false,
        }
    }

    pub fn directed_counts() -> Self {
        Self::with_kind(SchemaKind::DirectedCounts)
    }

    pub fn undirected_coauthor() -> Self {
        Self::with_kind(SchemaKind::UndirectedCoauthor)
    }

    pub fn with_columns(mut self, src: &str, dst: &str, date: &str, count: &str) -> Self {
        self.src_col = src.into();
        self.dst_col = dst.into();
        self.date_col = date.into();
        self.count_col = count.into();
        self
    }

    pub fn reversed(mut self, reverse: bool) -> Self {
        self.reverse_direction = reverse;
        self
    }

    pub fn directed(&self) -> bool {
        matches!(self.kind, SchemaKind::DirectedCounts)
    }
}

/// `YYYY-MM-DD`, or a bare `YYYY` widened to January 1.
fn parse_date(field: &str) -> Option<NaiveDate> {
    if let Ok(d) = NaiveDate::parse_from_str(field, "%Y-%m-%d") {
        return Some(d);
    }
    if field.len() == 4 && field.bytes().all(|b| b.is_ascii_digit()) {
        let year: i32 = field.parse().ok()?;
        return NaiveDate::from_ymd_opt(year, 1, 1);
    }
    None
}

fn column_index(headers: &csv::StringRecord, name: &str, path: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::MissingColumn {
            path: path.into(),
            column: name.into(),
        })
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

fn field<'r>(
    record: &'r csv::StringRecord,
    idx: usize,
    name: &str,
    path: &str,
) -> Result<&'r str> {
    match record.get(idx) {
        Some(v) => Ok(v.trim()),
        None => Err(Error::MalformedRow {
            path: path.into(),
            line: record_line(record),
            message: format!("missing '{name}' field"),
        }),
    }
}

/// Parses an interaction log. Rows sharing (src, dst, date) merge by
/// summing counts; labels intern to dense ids in first-appearance order.
pub fn parse_edges(path: impl AsRef<Path>, schema: &EdgeFileSchema) -> Result<TemporalEdgeList> {
    let path = path.as_ref();
    let file = File::open(path)?;
    parse_edges_reader(file, schema, &path.display().to_string())
}

/// Reader-based variant of [`parse_edges`]; `origin` labels error messages.
pub fn parse_edges_reader<R: Read>(
    reader: R,
    schema: &EdgeFileSchema,
    origin: &str,
) -> Result<TemporalEdgeList> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let src_idx = column_index(&headers, &schema.src_col, origin)?;
    let dst_idx = column_index(&headers, &schema.dst_col, origin)?;
    let date_idx = column_index(&headers, &schema.date_col, origin)?;
    let count_idx = column_index(&headers, &schema.count_col, origin)?;

    let mut builder = EdgeListBuilder::new(schema.directed());
    let mut rows = 0usize;
    for record in rdr.records() {
        let record = record?;
        let line = record_line(&record);
        let src = field(&record, src_idx, &schema.src_col, origin)?;
        let dst = field(&record, dst_idx, &schema.dst_col, origin)?;
        if src.is_empty() || dst.is_empty() {
            return Err(Error::MalformedRow {
                path: origin.into(),
                line,
                message: "empty actor label".into(),
            });
        }
        let date_field = field(&record, date_idx, &schema.date_col, origin)?;
        let date = parse_date(date_field).ok_or_else(|| Error::MalformedRow {
            path: origin.into(),
            line,
            message: format!("unparsable date '{date_field}'"),
        })?;
        let count_field = field(&record, count_idx, &schema.count_col, origin)?;
        let count: u64 = count_field.parse().map_err(|_| Error::MalformedRow {
            path: origin.into(),
            line,
            message: format!("unparsable count '{count_field}'"),
        })?;
        if count == 0 {
            return Err(Error::MalformedRow {
                path: origin.into(),
                line,
                message: "interaction count must be positive".into(),
            });
        }
        let (src, dst) = if schema.directed() && schema.reverse_direction {
            (dst, src)
        } else {
            (src, dst)
        };
        builder.add(src, dst, date, count)?;
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::EmptyInput {
            path: origin.into(),
        });
    }
    builder.finish()
}

/// Parses `subordinate,superior` rows, resolving labels against the node
/// table of the already-ingested edge data.
pub fn parse_ground_truth(path: impl AsRef<Path>, nodes: &NodeTable) -> Result<GroundTruth> {
    let path = path.as_ref();
    let file = File::open(path)?;
    parse_ground_truth_reader(file, nodes, &path.display().to_string())
}

/// Reader-based variant of [`parse_ground_truth`].
pub fn parse_ground_truth_reader<R: Read>(
    reader: R,
    nodes: &NodeTable,
    origin: &str,
) -> Result<GroundTruth> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let sub_idx = column_index(&headers, "subordinate", origin)?;
    let sup_idx = column_index(&headers, "superior", origin)?;

    let mut ties: BTreeMap<_, _> = BTreeMap::new();
    let mut unknown: Vec<String> = Vec::new();
    let mut rows = 0usize;
    for record in rdr.records() {
        let record = record?;
        let line = record_line(&record);
        let sub = field(&record, sub_idx, "subordinate", origin)?;
        let sup = field(&record, sup_idx, "superior", origin)?;
        if sub.is_empty() || sup.is_empty() {
            return Err(Error::MalformedRow {
                path: origin.into(),
                line,
                message: "empty actor label".into(),
            });
        }
        if sub == sup {
            return Err(Error::MalformedRow {
                path: origin.into(),
                line,
                message: format!("'{sub}' listed as its own superior"),
            });
        }
        rows += 1;
        let sub_id = nodes.get(sub);
        let sup_id = nodes.get(sup);
        if sub_id.is_none() {
            unknown.push(sub.to_owned());
        }
        if sup_id.is_none() {
            unknown.push(sup.to_owned());
        }
        let (Some(sub_id), Some(sup_id)) = (sub_id, sup_id) else {
            continue;
        };
        if ties.insert(sub_id, sup_id).is_some() {
            return Err(Error::MalformedRow {
                path: origin.into(),
                line,
                message: format!("duplicate subordinate '{sub}'"),
            });
        }
    }
    if !unknown.is_empty() {
        unknown.sort();
        unknown.dedup();
        return Err(Error::UnknownActor(unknown));
    }
    if rows == 0 {
        return Err(Error::EmptyInput {
            path: origin.into(),
        });
    }
    GroundTruth::new(ties)
}

/// Writes an edge list in the `src,dst,date,count` schema, preserving
/// stored edge order so that re-parsing reproduces the list exactly.
pub fn write_edges_csv<W: Write>(list: &TemporalEdgeList, mut w: W) -> Result<()> {
    writeln!(w, "src,dst,date,count")?;
    for e in list.edges() {
        writeln!(
            w,
            "{},{},{},{}",
            list.nodes().label(e.src),
            list.nodes().label(e.dst),
            e.date,
            e.count
        )?;
    }
    Ok(())
}

/// Writes ground truth in the `subordinate,superior` schema, ascending by
/// subordinate id.
pub fn write_ground_truth_csv<W: Write>(
    truth: &GroundTruth,
    nodes: &NodeTable,
    mut w: W,
) -> Result<()> {
    writeln!(w, "subordinate,superior")?;
    for (sub, sup) in truth.iter() {
        writeln!(w, "{},{}", nodes.label(sub), nodes.label(sup))?;
    }
    Ok(())
}

/// Configuration of the seeded two-level synthetic organization.
///
/// In each slot every report contacts its manager with probability
/// `hierarchy_rate` and one uniformly random non-manager peer with
/// probability `noise_rate`. Reports that never drew a manager contact
/// get one forced contact in a random slot so the ground truth always
/// resolves against the edge data.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SynthParams {
    pub seed: u64,
    pub managers: u32,
    pub reports_per_manager: u32,
    pub slots: u32,
    pub hierarchy_rate: f64,
    pub noise_rate: f64,
    /// Interaction count carried by each manager contact.
    pub hierarchy_count: u64,
    /// Interaction count carried by each noise contact.
    pub noise_count: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            seed: 42,
            managers: 10,
            reports_per_manager: 5,
            slots: 12,
            hierarchy_rate: 0.9,
            noise_rate: 0.2,
            hierarchy_count: 1,
            noise_count: 1,
        }
    }
}

impl SynthParams {
    fn validate(&self) -> Result<()> {
        let reject = |msg: String| Err(Error::DegenerateConfig(msg));
        if self.managers == 0 {
            return reject("managers must be >= 1".into());
        }
        if self.reports_per_manager == 0 {
            return reject("reports_per_manager must be >= 1".into());
        }
        if self.slots == 0 {
            return reject("slots must be >= 1".into());
        }
        if !(self.hierarchy_rate > 0.0 && self.hierarchy_rate <= 1.0) {
            return reject(format!(
                "hierarchy_rate must lie in (0, 1], got {}",
                self.hierarchy_rate
            ));
        }
        if !(0.0..1.0).contains(&self.noise_rate) {
            return reject(format!(
                "noise_rate must lie in [0, 1), got {}",
                self.noise_rate
            ));
        }
        if self.hierarchy_count == 0 || self.noise_count == 0 {
            return reject("interaction counts must be >= 1".into());
        }
        Ok(())
    }

    pub fn node_count(&self) -> u32 {
        self.managers * (1 + self.reports_per_manager)
    }
}

const SYNTH_BASE_DATE: (i32, u32, u32) = (2000, 1, 3); // a Monday

fn synth_label(params: &SynthParams, global: u32) -> String {
    if global < params.managers {
        format!("mgr{global}")
    } else {
        let r = global - params.managers;
        format!(
            "rep{}_{}",
            r / params.reports_per_manager,
            r % params.reports_per_manager
        )
    }
}

/// Generates the seeded synthetic organization: a directed weekly edge
/// log plus the report -> manager ground truth.
pub fn generate_synthetic(params: &SynthParams) -> Result<(TemporalEdgeList, GroundTruth)> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.node_count();
    let n_reports = params.managers * params.reports_per_manager;
    let base = NaiveDate::from_ymd_opt(SYNTH_BASE_DATE.0, SYNTH_BASE_DATE.1, SYNTH_BASE_DATE.2)
        .unwrap();
    let slot_date = |k: u32| base + chrono::Days::new(u64::from(k) * 7);

    let mut builder = EdgeListBuilder::new(true);
    let mut contacted_manager = vec![false; n_reports as usize];
    for slot in 0..params.slots {
        let date = slot_date(slot);
        for r in 0..n_reports {
            let manager = r / params.reports_per_manager;
            let report = params.managers + r;
            if rng.random_bool(params.hierarchy_rate) {
                builder.add(
                    &synth_label(params, report),
                    &synth_label(params, manager),
                    date,
                    params.hierarchy_count,
                )?;
                contacted_manager[r as usize] = true;
            }
            if params.noise_rate > 0.0 && n > 2 && rng.random_bool(params.noise_rate) {
                // uniform over everyone except the report and its manager
                let mut peer = rng.random_range(0..n - 2);
                if peer >= manager {
                    peer += 1;
                }
                if peer >= report {
                    peer += 1;
                }
                builder.add(
                    &synth_label(params, report),
                    &synth_label(params, peer),
                    date,
                    params.noise_count,
                )?;
            }
        }
    }
    for r in 0..n_reports {
        if !contacted_manager[r as usize] {
            let slot = rng.random_range(0..params.slots);
            builder.add(
                &synth_label(params, params.managers + r),
                &synth_label(params, r / params.reports_per_manager),
                slot_date(slot),
                params.hierarchy_count,
            )?;
        }
    }

    let list = builder.finish().map_err(|e| match e {
        Error::EmptySpan => Error::DegenerateConfig("generated zero edges".into()),
        other => other,
    })?;

    let mut ties = BTreeMap::new();
    for r in 0..n_reports {
        let report = list
            .nodes()
            .get(&synth_label(params, params.managers + r))
            .expect("report present in generated edges");
        let manager = list
            .nodes()
            .get(&synth_label(params, r / params.reports_per_manager))
            .expect("manager present in generated edges");
        ties.insert(report, manager);
    }
    let truth = GroundTruth::new(ties)?;
    Ok((list, truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;

    #[test]
    fn parses_directed_counts_row() {
        let csv = "src,dst,date,count\na@x,b@x,2000-03-06,4\n";
        let list = parse_edges_reader(csv.as_bytes(), &EdgeFileSchema::directed_counts(), "mem")
            .unwrap();
        assert_eq!(list.edge_count(), 1);
        assert!(list.directed());
        let e = list.edges()[0];
        assert_eq!(list.nodes().label(e.src), "a@x");
        assert_eq!(list.nodes().label(e.dst), "b@x");
        assert_eq!(e.count, 4);
        assert_eq!(e.date, NaiveDate::from_ymd_opt(2000, 3, 6).unwrap());
    }

    #[test]
    fn duplicate_rows_merge_counts() {
        let csv = "src,dst,date,count\na,b,2001-01-01,1\na,b,2001-01-01,1\n";
        let list = parse_edges_reader(csv.as_bytes(), &EdgeFileSchema::directed_counts(), "mem")
            .unwrap();
        assert_eq!(list.edge_count(), 1);
        assert_eq!(list.edges()[0].count, 2);
    }

    #[test]
    fn coauthor_rows_canonicalize_and_widen_year() {
        let csv = "src,dst,date,count\nsmith,jones,2005,1\njones,smith,2005,2\n";
        let list = parse_edges_reader(
            csv.as_bytes(),
            &EdgeFileSchema::undirected_coauthor(),
            "mem",
        )
        .unwrap();
        assert!(!list.directed());
        assert_eq!(list.edge_count(), 1);
        let e = list.edges()[0];
        assert_eq!(e.date, NaiveDate::from_ymd_opt(2005, 1, 1).unwrap());
        assert_eq!(e.count, 3);
        assert_eq!(e.src, NodeId(0)); // smith interned first
    }

    #[test]
    fn custom_column_names_resolve() {
        let csv = "sender,receiver,week,emails\na,b,2000-05-01,2\n";
        let schema = EdgeFileSchema::directed_counts()
            .with_columns("sender", "receiver", "week", "emails");
        let list = parse_edges_reader(csv.as_bytes(), &schema, "mem").unwrap();
        assert_eq!(list.edges()[0].count, 2);
    }

    #[test]
    fn reverse_direction_swaps_endpoints() {
        let csv = "src,dst,date,count\na,b,2000-05-01,2\n";
        let schema = EdgeFileSchema::directed_counts().reversed(true);
        let list = parse_edges_reader(csv.as_bytes(), &schema, "mem").unwrap();
        let e = list.edges()[0];
        assert_eq!(list.nodes().label(e.src), "b");
        assert_eq!(list.nodes().label(e.dst), "a");
    }

    #[test]
    fn malformed_rows_report_line_numbers() {
        let bad_date = "src,dst,date,count\na,b,garbage,1\n";
        match parse_edges_reader(bad_date.as_bytes(), &EdgeFileSchema::directed_counts(), "mem") {
            Err(Error::MalformedRow { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected MalformedRow, got {other:?}"),
        }
        let zero_count = "src,dst,date,count\na,b,2000-01-01,3\na,b,2000-01-01,0\n";
        match parse_edges_reader(
            zero_count.as_bytes(),
            &EdgeFileSchema::directed_counts(),
            "mem",
        ) {
            Err(Error::MalformedRow { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected MalformedRow, got {other:?}"),
        }
    }

    #[test]
    fn missing_column_is_reported() {
        let csv = "src,dst,count\na,b,1\n";
        match parse_edges_reader(csv.as_bytes(), &EdgeFileSchema::directed_counts(), "mem") {
            Err(Error::MissingColumn { column, .. }) => assert_eq!(column, "date"),
            other => panic!("expected MissingColumn, got {other:?}"),
        }
    }

    #[test]
    fn header_only_file_is_empty_input() {
        let csv = "src,dst,date,count\n";
        assert!(matches!(
            parse_edges_reader(csv.as_bytes(), &EdgeFileSchema::directed_counts(), "mem"),
            Err(Error::EmptyInput { .. })
        ));
    }

    fn toy_nodes() -> NodeTable {
        let mut t = NodeTable::new();
        t.intern("alice");
        t.intern("bob");
        t.intern("carol");
        t
    }

    #[test]
    fn ground_truth_parses_and_resolves() {
        let nodes = toy_nodes();
        let csv = "subordinate,superior\nalice,bob\ncarol,bob\n";
        let truth = parse_ground_truth_reader(csv.as_bytes(), &nodes, "mem").unwrap();
        assert_eq!(truth.len(), 2);
        assert_eq!(
            truth.superior_of(nodes.get("alice").unwrap()),
            nodes.get("bob")
        );
    }

    #[test]
    fn ground_truth_rejects_self_tie_row() {
        let nodes = toy_nodes();
        let csv = "subordinate,superior\nalice,alice\n";
        assert!(matches!(
            parse_ground_truth_reader(csv.as_bytes(), &nodes, "mem"),
            Err(Error::MalformedRow { line: 2, .. })
        ));
    }

    #[test]
    fn ground_truth_unknown_actors_listed() {
        let nodes = toy_nodes();
        let csv = "subordinate,superior\nalice,zed\nyolanda,bob\n";
        match parse_ground_truth_reader(csv.as_bytes(), &nodes, "mem") {
            Err(Error::UnknownActor(labels)) => {
                assert_eq!(labels, vec!["yolanda".to_string(), "zed".to_string()]);
            }
            other => panic!("expected UnknownActor, got {other:?}"),
        }
    }

    #[test]
    fn ground_truth_duplicate_subordinate_rejected() {
        let nodes = toy_nodes();
        let csv = "subordinate,superior\nalice,bob\nalice,carol\n";
        assert!(matches!(
            parse_ground_truth_reader(csv.as_bytes(), &nodes, "mem"),
            Err(Error::MalformedRow { line: 3, .. })
        ));
    }

    #[test]
    fn edge_list_round_trips_through_csv() {
        let csv = "src,dst,date,count\nb,a,2000-01-05,2\na,c,2000-02-01,1\nb,a,2000-01-05,3\n";
        let schema = EdgeFileSchema::directed_counts();
        let list = parse_edges_reader(csv.as_bytes(), &schema, "mem").unwrap();
        let mut buf = Vec::new();
        write_edges_csv(&list, &mut buf).unwrap();
        let reparsed = parse_edges_reader(buf.as_slice(), &schema, "mem").unwrap();
        assert_eq!(list, reparsed);
    }

    #[test]
    fn synthetic_generation_is_deterministic() {
        let params = SynthParams::default();
        let (l1, t1) = generate_synthetic(&params).unwrap();
        let (l2, t2) = generate_synthetic(&params).unwrap();
        assert_eq!(l1, l2);
        assert_eq!(t1, t2);
    }

    #[test]
    fn synthetic_round_trips_through_csv() {
        let (list, truth) = generate_synthetic(&SynthParams::default()).unwrap();
        let mut buf = Vec::new();
        write_edges_csv(&list, &mut buf).unwrap();
        let schema = EdgeFileSchema::directed_counts();
        let reparsed = parse_edges_reader(buf.as_slice(), &schema, "mem").unwrap();
        assert_eq!(list, reparsed);

        let mut tbuf = Vec::new();
        write_ground_truth_csv(&truth, list.nodes(), &mut tbuf).unwrap();
        let retruth =
            parse_ground_truth_reader(tbuf.as_slice(), reparsed.nodes(), "mem").unwrap();
        assert_eq!(truth, retruth);
    }

    #[test]
    fn zero_noise_links_reports_only_to_managers() {
        let params = SynthParams {
            noise_rate: 0.0,
            ..Default::default()
        };
        let (list, truth) = generate_synthetic(&params).unwrap();
        for e in list.edges() {
            assert_eq!(truth.superior_of(e.src), Some(e.dst));
        }
    }

    #[test]
    fn ground_truth_closure_holds() {
        let params = SynthParams {
            seed: 7,
            hierarchy_rate: 0.05, // sparse enough to exercise forced contacts
            noise_rate: 0.0,
            slots: 3,
            ..Default::default()
        };
        let (list, truth) = generate_synthetic(&params).unwrap();
        assert_eq!(truth.len(), 50);
        for (sub, sup) in truth.iter() {
            assert!(sub.index() < list.node_count());
            assert!(sup.index() < list.node_count());
        }
        // every node table entry is incident to at least one edge
        let mut incident = vec![false; list.node_count()];
        for e in list.edges() {
            incident[e.src.index()] = true;
            incident[e.dst.index()] = true;
        }
        assert!(incident.iter().all(|&i| i));
    }

    #[test]
    fn degenerate_configs_are_rejected() {
        for params in [
            SynthParams {
                managers: 0,
                ..Default::default()
            },
            SynthParams {
                hierarchy_rate: 0.0,
                ..Default::default()
            },
            SynthParams {
                noise_rate: 1.0,
                ..Default::default()
            },
            SynthParams {
                hierarchy_count: 0,
                ..Default::default()
            },
        ] {
            assert!(matches!(
                generate_synthetic(&params),
                Err(Error::DegenerateConfig(_))
            ));
        }
    }
}
