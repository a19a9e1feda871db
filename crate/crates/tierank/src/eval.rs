//! Recall-at-rank evaluation against a known hierarchy.
//!
//! `recall(i)` is the fraction of queries whose true superior sits at
//! position `i` or better in the inferred ranking; queries whose superior
//! never appears count as misses at every rank. Curves are emitted as
//! plot-ready CSV (`rank,recall`, six decimal places) and method-keyed
//! JSON arrays.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Granularity, NodeId, Weighting};
use crate::pipeline::{InferenceResult, Method};

/// The known direct-superior ties: subordinate -> superior.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroundTruth {
    ties: BTreeMap<NodeId, NodeId>,
}

impl GroundTruth {
    pub fn new(ties: BTreeMap<NodeId, NodeId>) -> Result<Self> {
        for (&sub, &sup) in &ties {
            if sub == sup {
                return Err(Error::InvalidParams(format!(
                    "node {sub} listed as its own superior"
                )));
            }
        }
        Ok(Self { ties })
    }

    pub fn superior_of(&self, node: NodeId) -> Option<NodeId> {
        self.ties.get(&node).copied()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.ties.contains_key(&node)
    }

    /// Subordinates in ascending id order.
    pub fn subordinates(&self) -> Vec<NodeId> {
        self.ties.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.ties.iter().map(|(&a, &b)| (a, b))
    }

    pub fn len(&self) -> usize {
        self.ties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ties.is_empty()
    }
}

/// One recall curve: `points[i]` holds `(rank, recall)` for ranks
/// `1..=max_rank`; recall is non-decreasing and bounded in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecallCurve {
    pub label: String,
    pub points: Vec<(u32, f64)>,
    pub n_queries: usize,
}

impl RecallCurve {
    pub fn max_rank(&self) -> u32 {
        self.points.len() as u32
    }

    pub fn recall_at(&self, rank: u32) -> Option<f64> {
        if rank == 0 {
            return None;
        }
        self.points.get(rank as usize - 1).map(|&(_, r)| r)
    }

    /// Normalized area under the curve: the mean recall over ranks
    /// `1..=max_rank`, a scalar in `[0, 1]` for method comparison.
    pub fn aurc(&self) -> f64 {
        if self.points.is_empty() {
            return 0.0;
        }
        self.points.iter().map(|&(_, r)| r).sum::<f64>() / self.points.len() as f64
    }
}

/// Tag identifying one (method, granularity, weighting) combination.
pub fn method_label(
    method: Method,
    granularity: Option<Granularity>,
    weighting: Weighting,
) -> String {
    match granularity {
        Some(g) => format!("{method}-{g}-{weighting}"),
        None => format!("{method}-{weighting}"),
    }
}

/// Scores a batch of per-query rankings against the ground truth.
///
/// Every query must have a truth entry; queries whose superior is absent
/// from their ranking stay misses at every rank.
pub fn recall_curve(
    results: &[InferenceResult],
    truth: &GroundTruth,
    max_rank: u32,
) -> Result<RecallCurve> {
    if max_rank == 0 {
        return Err(Error::InvalidParams("max_rank must be >= 1".into()));
    }
    if results.is_empty() {
        return Err(Error::InvalidParams(
            "cannot compute recall over zero inference results".into(),
        ));
    }
    let missing: Vec<NodeId> = results
        .iter()
        .map(|r| r.query)
        .filter(|&q| !truth.contains(q))
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingTruth(missing));
    }

    let mut hits_at = vec![0usize; max_rank as usize];
    for result in results {
        let superior = truth.superior_of(result.query).unwrap();
        if let Some(pos) = result.position_of(superior) {
            if pos <= max_rank {
                hits_at[pos as usize - 1] += 1;
            }
        }
    }

    let n = results.len();
    let mut points = Vec::with_capacity(max_rank as usize);
    let mut cumulative = 0usize;
    for (i, &h) in hits_at.iter().enumerate() {
        cumulative += h;
        points.push((i as u32 + 1, cumulative as f64 / n as f64));
    }

    let first = &results[0];
    Ok(RecallCurve {
        label: method_label(first.method, first.granularity, first.weighting),
        points,
        n_queries: n,
    })
}

/// Per-rank recall of several curves side by side, plus the AURC summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub labels: Vec<String>,
    pub ranks: Vec<u32>,
    /// `recalls[c][i]` is curve `c` at rank `ranks[i]`.
    pub recalls: Vec<Vec<f64>>,
    pub aurcs: Vec<f64>,
}

/// Builds the side-by-side table; curves must share the query-set size
/// and rank range.
pub fn compare_methods(curves: &[RecallCurve]) -> Result<ComparisonTable> {
    let first = curves
        .first()
        .ok_or_else(|| Error::IncomparableCurves("no curves given".into()))?;
    for c in curves {
        if c.n_queries != first.n_queries {
            return Err(Error::IncomparableCurves(format!(
                "'{}' covers {} queries but '{}' covers {}",
                c.label, c.n_queries, first.label, first.n_queries
            )));
        }
        if c.points.len() != first.points.len() {
            return Err(Error::IncomparableCurves(format!(
                "'{}' has {} ranks but '{}' has {}",
                c.label,
                c.points.len(),
                first.label,
                first.points.len()
            )));
        }
    }
    Ok(ComparisonTable {
        labels: curves.iter().map(|c| c.label.clone()).collect(),
        ranks: first.points.iter().map(|&(r, _)| r).collect(),
        recalls: curves
            .iter()
            .map(|c| c.points.iter().map(|&(_, r)| r).collect())
            .collect(),
        aurcs: curves.iter().map(|c| c.aurc()).collect(),
    })
}

/// `rank,recall` rows with recall fixed to six decimal places.
pub fn curve_to_csv(curve: &RecallCurve) -> String {
    let mut out = String::from("rank,recall\n");
    for &(rank, recall) in &curve.points {
        let _ = writeln!(out, "{rank},{recall:.6}");
    }
    out
}

/// Side-by-side CSV with one column per curve and a final AURC row.
pub fn comparison_to_csv(table: &ComparisonTable) -> String {
    let mut out = String::from("rank");
    for label in &table.labels {
        let _ = write!(out, ",{label}");
    }
    out.push('\n');
    for (i, &rank) in table.ranks.iter().enumerate() {
        let _ = write!(out, "{rank}");
        for recalls in &table.recalls {
            let _ = write!(out, ",{:.6}", recalls[i]);
        }
        out.push('\n');
    }
    out.push_str("AURC");
    for &aurc in &table.aurcs {
        let _ = write!(out, ",{aurc:.6}");
    }
    out.push('\n');
    out
}

/// Method-keyed JSON object mapping each curve label to its recall array
/// (values rounded to six decimals).
pub fn curves_to_json(curves: &[RecallCurve]) -> String {
    let mut map = serde_json::Map::new();
    for curve in curves {
        let values: Vec<serde_json::Value> = curve
            .points
            .iter()
            .map(|&(_, r)| {
                let rounded = (r * 1e6).round() / 1e6;
                serde_json::Number::from_f64(rounded)
                    .map(serde_json::Value::Number)
                    .unwrap_or(serde_json::Value::Null)
            })
            .collect();
        map.insert(curve.label.clone(), serde_json::Value::Array(values));
    }
    serde_json::to_string_pretty(&serde_json::Value::Object(map)).expect("curve JSON")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truth_pairs(pairs: &[(u32, u32)]) -> GroundTruth {
        GroundTruth::new(
            pairs
                .iter()
                .map(|&(a, b)| (NodeId(a), NodeId(b)))
                .collect(),
        )
        .unwrap()
    }

    fn result_with(query: u32, ranking: &[u32]) -> InferenceResult {
        InferenceResult {
            query: NodeId(query),
            method: Method::TimeVoting,
            weighting: Weighting::Weighted,
            granularity: Some(Granularity::Week),
            ranking: ranking
                .iter()
                .enumerate()
                .map(|(i, &n)| (NodeId(n), (ranking.len() - i) as f64))
                .collect(),
        }
    }

    #[test]
    fn ground_truth_rejects_self_superior() {
        assert!(GroundTruth::new([(NodeId(1), NodeId(1))].into_iter().collect()).is_err());
    }

    #[test]
    fn two_query_example_curve() {
        // superiors at positions 1 and 3
        let truth = truth_pairs(&[(0, 10), (1, 11)]);
        let results = vec![result_with(0, &[10, 12, 13]), result_with(1, &[12, 13, 11])];
        let curve = recall_curve(&results, &truth, 3).unwrap();
        assert_eq!(curve.points, vec![(1, 0.5), (2, 0.5), (3, 1.0)]);
        assert_eq!(curve.n_queries, 2);
    }

    #[test]
    fn perfect_ranking_saturates_at_rank_one() {
        let truth = truth_pairs(&[(0, 10), (1, 11)]);
        let results = vec![result_with(0, &[10, 11]), result_with(1, &[11, 10])];
        let curve = recall_curve(&results, &truth, 4).unwrap();
        assert_eq!(curve.recall_at(1), Some(1.0));
        assert_eq!(curve.recall_at(4), Some(1.0));
    }

    #[test]
    fn absent_superior_counts_as_permanent_miss() {
        let truth = truth_pairs(&[(0, 10), (1, 99)]);
        let results = vec![result_with(0, &[10]), result_with(1, &[10, 12])];
        let curve = recall_curve(&results, &truth, 5).unwrap();
        assert_eq!(curve.recall_at(5), Some(0.5));
    }

    #[test]
    fn missing_truth_lists_offenders() {
        let truth = truth_pairs(&[(0, 10)]);
        let results = vec![result_with(0, &[10]), result_with(7, &[10])];
        match recall_curve(&results, &truth, 3) {
            Err(Error::MissingTruth(nodes)) => assert_eq!(nodes, vec![NodeId(7)]),
            other => panic!("expected MissingTruth, got {other:?}"),
        }
    }

    #[test]
    fn recall_is_monotone_and_bounded() {
        let truth = truth_pairs(&[(0, 10), (1, 11), (2, 12)]);
        let results = vec![
            result_with(0, &[12, 10]),
            result_with(1, &[11]),
            result_with(2, &[10, 11]),
        ];
        let curve = recall_curve(&results, &truth, 6).unwrap();
        let mut prev = 0.0;
        for &(_, r) in &curve.points {
            assert!(r >= prev && (0.0..=1.0).contains(&r));
            prev = r;
        }
    }

    #[test]
    fn recall_ignores_query_order() {
        let truth = truth_pairs(&[(0, 10), (1, 11)]);
        let a = vec![result_with(0, &[10, 11]), result_with(1, &[10, 11])];
        let b = vec![result_with(1, &[10, 11]), result_with(0, &[10, 11])];
        let ca = recall_curve(&a, &truth, 3).unwrap();
        let cb = recall_curve(&b, &truth, 3).unwrap();
        assert_eq!(ca.points, cb.points);
    }

    #[test]
    fn identical_curves_compare_with_zero_delta() {
        let truth = truth_pairs(&[(0, 10)]);
        let results = vec![result_with(0, &[10])];
        let c1 = recall_curve(&results, &truth, 3).unwrap();
        let c2 = c1.clone();
        let table = compare_methods(&[c1, c2]).unwrap();
        assert_eq!(table.recalls[0], table.recalls[1]);
        assert_eq!(table.aurcs[0], table.aurcs[1]);
    }

    #[test]
    fn dominating_curve_has_larger_aurc() {
        let low = RecallCurve {
            label: "low".into(),
            points: vec![(1, 0.2), (2, 0.4), (3, 0.5)],
            n_queries: 10,
        };
        let high = RecallCurve {
            label: "high".into(),
            points: vec![(1, 0.4), (2, 0.6), (3, 0.9)],
            n_queries: 10,
        };
        assert!(high.aurc() > low.aurc());
        let table = compare_methods(&[low, high]).unwrap();
        assert!(table.aurcs[1] > table.aurcs[0]);
    }

    #[test]
    fn mismatched_query_sets_are_incomparable() {
        let a = RecallCurve {
            label: "a".into(),
            points: vec![(1, 0.5)],
            n_queries: 2,
        };
        let b = RecallCurve {
            label: "b".into(),
            points: vec![(1, 0.5)],
            n_queries: 3,
        };
        assert!(matches!(
            compare_methods(&[a, b]),
            Err(Error::IncomparableCurves(_))
        ));
    }

    #[test]
    fn csv_uses_six_decimal_places() {
        let curve = RecallCurve {
            label: "x".into(),
            points: vec![(1, 1.0 / 3.0), (2, 0.5)],
            n_queries: 3,
        };
        assert_eq!(curve_to_csv(&curve), "rank,recall\n1,0.333333\n2,0.500000\n");
    }

    #[test]
    fn comparison_csv_has_aurc_row() {
        let curve = RecallCurve {
            label: "m".into(),
            points: vec![(1, 0.25), (2, 0.75)],
            n_queries: 4,
        };
        let table = compare_methods(std::slice::from_ref(&curve)).unwrap();
        let csv = comparison_to_csv(&table);
        assert_eq!(csv, "rank,m\n1,0.250000\n2,0.750000\nAURC,0.500000\n");
    }

    #[test]
    fn json_is_method_keyed() {
        let curve = RecallCurve {
            label: "baseline-weighted".into(),
            points: vec![(1, 0.5)],
            n_queries: 2,
        };
        let json = curves_to_json(std::slice::from_ref(&curve));
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["baseline-weighted"][0], 0.5);
    }
}
