//! Rooted PageRank: personalized PageRank with restart to a single root.
//!
//! The walk restarts at the root with probability `1 - damping` and
//! otherwise follows an outgoing edge chosen proportionally to its weight.
//! Mass sitting on dangling nodes (no outgoing edges) is redirected
//! entirely to the root, so scores stay interpretable as root proximity.

use crate::error::{Error, Result};
use crate::graph::{NodeId, Snapshot};

/// Iteration parameters for [`rooted_pagerank`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct RprParams {
    /// Probability of following an edge rather than restarting at the root.
    pub damping: f64,
    /// Convergence threshold on the L1 change between successive vectors.
    pub tolerance: f64,
    pub max_iterations: u32,
}

impl Default for RprParams {
    fn default() -> Self {
        Self {
            damping: 0.85,
            tolerance: 1e-9,
            max_iterations: 200,
        }
    }
}

impl RprParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::InvalidParams(format!(
                "damping must lie in (0, 1), got {}",
                self.damping
            )));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "tolerance must be > 0, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParams(
                "max_iterations must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Stationary score of every active node relative to one root.
///
/// Scores are non-negative and sum to 1 over the active set, root included.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    root: NodeId,
    values: Vec<f64>,
    active: Vec<NodeId>,
    converged: bool,
    iterations_used: u32,
}

impl ScoreVector {
    pub fn root(&self) -> NodeId {
        self.root
    }

    /// Whether the iteration hit the tolerance before `max_iterations`.
    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn iterations_used(&self) -> u32 {
        self.iterations_used
    }

    /// Score of `node`, or None if the node is not in the active set.
    pub fn score(&self, node: NodeId) -> Option<f64> {
        self.active
            .binary_search(&node)
            .ok()
            .map(|_| self.values[node.index()])
    }

    /// Active nodes with their scores, ascending by id.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.active.iter().map(|&n| (n, self.values[n.index()]))
    }

    /// Number of scored (active) nodes.
    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.active.iter().map(|&n| self.values[n.index()]).sum()
    }
}

/// Candidate list for one root: active nodes minus the root, ordered by
/// score descending with ties broken by ascending id.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    root: NodeId,
    entries: Vec<(NodeId, f64)>,
}

impl RankedList {
    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn entries(&self) -> &[(NodeId, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// 1-based position of `node`, if present.
    pub fn position_of(&self, node: NodeId) -> Option<u32> {
        self.entries
            .iter()
            .position(|&(n, _)| n == node)
            .map(|i| i as u32 + 1)
    }
}

/// Computes the stationary restart-walk vector for `root` on `snapshot`.
pub fn rooted_pagerank(
    snapshot: &Snapshot,
    root: NodeId,
    params: &RprParams,
) -> Result<ScoreVector> {
    params.validate()?;
    if snapshot.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if !snapshot.is_active(root) {
        return Err(Error::RootInactive(root));
    }

    let n = snapshot.node_space();
    let active = snapshot.active_nodes();
    let damping = params.damping;
    let restart = 1.0 - damping;

    let mut current = vec![0.0f64; n];
    current[root.index()] = 1.0;
    let mut next = vec![0.0f64; n];

    let mut converged = false;
    let mut iterations = 0u32;
    while iterations < params.max_iterations {
        next.iter_mut().for_each(|x| *x = 0.0);
        let mut root_gain = 0.0f64;
        for &u in active {
            let mass = current[u.index()];
            root_gain += restart * mass;
            let out = snapshot.out_weight(u);
            if out > 0.0 {
                let share = damping * mass / out;
                for (v, w) in snapshot.out_edges(u) {
                    next[v.index()] += share * w;
                }
            } else {
                // dangling: the whole followed-edge share returns to the root
                root_gain += damping * mass;
            }
        }
        next[root.index()] += root_gain;

        let diff: f64 = active
            .iter()
            .map(|&u| (next[u.index()] - current[u.index()]).abs())
            .sum();
        std::mem::swap(&mut current, &mut next);
        iterations += 1;
        if diff < params.tolerance {
            converged = true;
            break;
        }
    }

    Ok(ScoreVector {
        root,
        values: current,
        active: active.to_vec(),
        converged,
        iterations_used: iterations,
    })
}

/// Sorts a score vector into a deterministic candidate list, excluding the
/// root itself.
pub fn rank_scores(scores: &ScoreVector) -> RankedList {
    let mut entries: Vec<(NodeId, f64)> = scores
        .iter()
        .filter(|&(n, _)| n != scores.root())
        .collect();
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    RankedList {
        root: scores.root(),
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_full_snapshot, EdgeListBuilder, Weighting};
    use chrono::NaiveDate;

    fn date() -> NaiveDate {
        NaiveDate::from_ymd_opt(2000, 1, 3).unwrap()
    }

    fn snapshot_from(directed: bool, edges: &[(&str, &str, u64)]) -> crate::graph::Snapshot {
        let mut b = EdgeListBuilder::new(directed);
        for &(s, d, c) in edges {
            b.add(s, d, date(), c).unwrap();
        }
        build_full_snapshot(&b.finish().unwrap(), Weighting::Weighted)
    }

    #[test]
    fn two_node_cycle_matches_closed_form() {
        // root <-> u: stationary scores are 1/(1+d) and d/(1+d).
        let snap = snapshot_from(true, &[("root", "u", 1), ("u", "root", 1)]);
        let scores = rooted_pagerank(&snap, NodeId(0), &RprParams::default()).unwrap();
        let d = 0.85;
        assert!((scores.score(NodeId(0)).unwrap() - 1.0 / (1.0 + d)).abs() < 1e-7);
        assert!((scores.score(NodeId(1)).unwrap() - d / (1.0 + d)).abs() < 1e-7);
        assert!(scores.converged());
    }

    #[test]
    fn star_center_root_scores_leaves_equally() {
        let snap = snapshot_from(
            false,
            &[("c", "u1", 1), ("c", "u2", 1), ("c", "u3", 1), ("c", "u4", 1)],
        );
        let scores = rooted_pagerank(&snap, NodeId(0), &RprParams::default()).unwrap();
        let leaf = scores.score(NodeId(1)).unwrap();
        for id in 2..=4 {
            assert_eq!(scores.score(NodeId(id)).unwrap(), leaf);
        }
        assert!(leaf > 0.0);
    }

    #[test]
    fn scores_normalize_over_active_set() {
        let snap = snapshot_from(
            true,
            &[("a", "b", 2), ("b", "c", 1), ("c", "a", 5), ("a", "c", 1)],
        );
        let scores = rooted_pagerank(&snap, NodeId(0), &RprParams::default()).unwrap();
        assert!((scores.sum() - 1.0).abs() < 1e-8);
        for (_, s) in scores.iter() {
            assert!(s >= 0.0);
        }
    }

    #[test]
    fn dangling_mass_returns_to_root() {
        // a -> b, b has no outgoing edges.
        let snap = snapshot_from(true, &[("a", "b", 1)]);
        let scores = rooted_pagerank(&snap, NodeId(0), &RprParams::default()).unwrap();
        // closed form: x_a = 1/(1+d), x_b = d/(1+d)
        let d = 0.85;
        assert!((scores.score(NodeId(0)).unwrap() - 1.0 / (1.0 + d)).abs() < 1e-7);
        assert!((scores.score(NodeId(1)).unwrap() - d / (1.0 + d)).abs() < 1e-7);
    }

    #[test]
    fn disconnected_component_gets_no_mass() {
        let snap = snapshot_from(
            true,
            &[("a", "b", 1), ("b", "a", 1), ("x", "y", 1), ("y", "x", 1)],
        );
        let params = RprParams::default();
        let scores = rooted_pagerank(&snap, NodeId(0), &params).unwrap();
        assert!(scores.score(NodeId(2)).unwrap() <= params.tolerance);
        assert!(scores.score(NodeId(3)).unwrap() <= params.tolerance);
    }

    #[test]
    fn inactive_root_is_rejected() {
        let mut b = EdgeListBuilder::new(true);
        b.add("a", "b", date(), 1).unwrap();
        b.intern("loner");
        let list = b.finish().unwrap();
        let snap = build_full_snapshot(&list, Weighting::Weighted);
        assert!(matches!(
            rooted_pagerank(&snap, NodeId(2), &RprParams::default()),
            Err(Error::RootInactive(NodeId(2)))
        ));
    }

    #[test]
    fn empty_snapshot_is_rejected() {
        // only a self-loop: dropped at snapshot build
        let snap = snapshot_from(true, &[("a", "a", 1)]);
        assert!(matches!(
            rooted_pagerank(&snap, NodeId(0), &RprParams::default()),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn bad_params_are_rejected() {
        let snap = snapshot_from(true, &[("a", "b", 1)]);
        for params in [
            RprParams {
                damping: 0.0,
                ..Default::default()
            },
            RprParams {
                damping: 1.0,
                ..Default::default()
            },
            RprParams {
                tolerance: 0.0,
                ..Default::default()
            },
            RprParams {
                max_iterations: 0,
                ..Default::default()
            },
        ] {
            assert!(rooted_pagerank(&snap, NodeId(0), &params).is_err());
        }
    }

    #[test]
    fn rank_scores_excludes_root_and_sorts_descending() {
        let snap = snapshot_from(true, &[("q", "a", 3), ("q", "b", 1), ("b", "q", 1)]);
        let scores = rooted_pagerank(&snap, NodeId(0), &RprParams::default()).unwrap();
        let ranked = rank_scores(&scores);
        assert_eq!(ranked.len(), 2);
        assert!(ranked.position_of(NodeId(0)).is_none());
        assert_eq!(ranked.entries()[0].0, NodeId(1));
        assert!(ranked.entries()[0].1 > ranked.entries()[1].1);
    }

    #[test]
    fn ties_break_by_ascending_id() {
        // star: all leaves get the same score; order must be id order
        let snap = snapshot_from(
            false,
            &[("c", "u1", 1), ("c", "u2", 1), ("c", "u3", 1), ("c", "u4", 1)],
        );
        let scores = rooted_pagerank(&snap, NodeId(0), &RprParams::default()).unwrap();
        let ranked = rank_scores(&scores);
        let ids: Vec<NodeId> = ranked.entries().iter().map(|&(n, _)| n).collect();
        assert_eq!(ids, vec![NodeId(1), NodeId(2), NodeId(3), NodeId(4)]);
    }

    #[test]
    fn identical_inputs_give_bit_identical_rankings() {
        let snap = snapshot_from(
            true,
            &[("a", "b", 2), ("b", "c", 3), ("c", "a", 1), ("a", "c", 4)],
        );
        let params = RprParams::default();
        let r1 = rank_scores(&rooted_pagerank(&snap, NodeId(0), &params).unwrap());
        let r2 = rank_scores(&rooted_pagerank(&snap, NodeId(0), &params).unwrap());
        assert_eq!(r1, r2);
    }

    #[test]
    fn power_of_two_weight_scaling_is_bit_exact() {
        let edges = [("a", "b", 2u64), ("b", "c", 3), ("c", "a", 1), ("a", "c", 4)];
        let scaled: Vec<(&str, &str, u64)> =
            edges.iter().map(|&(s, d, c)| (s, d, c * 8)).collect();
        let params = RprParams::default();
        let r1 = rank_scores(
            &rooted_pagerank(&snapshot_from(true, &edges), NodeId(0), &params).unwrap(),
        );
        let r2 = rank_scores(
            &rooted_pagerank(&snapshot_from(true, &scaled), NodeId(0), &params).unwrap(),
        );
        assert_eq!(r1, r2);
    }

    #[test]
    fn arbitrary_weight_scaling_preserves_order() {
        let edges = [("a", "b", 2u64), ("b", "c", 3), ("c", "a", 1), ("a", "c", 4)];
        let scaled: Vec<(&str, &str, u64)> =
            edges.iter().map(|&(s, d, c)| (s, d, c * 3)).collect();
        let params = RprParams::default();
        let r1 = rank_scores(
            &rooted_pagerank(&snapshot_from(true, &edges), NodeId(0), &params).unwrap(),
        );
        let r2 = rank_scores(
            &rooted_pagerank(&snapshot_from(true, &scaled), NodeId(0), &params).unwrap(),
        );
        let ids1: Vec<NodeId> = r1.entries().iter().map(|&(n, _)| n).collect();
        let ids2: Vec<NodeId> = r2.entries().iter().map(|&(n, _)| n).collect();
        assert_eq!(ids1, ids2);
    }
}
