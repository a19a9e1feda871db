//! Brute-force reference implementations used by the test suites to
//! cross-check the main library.
//!
//! Everything here is deliberately naive and independent of the library's
//! algorithms: restart-walk scores come from a dense linear solve instead
//! of power iteration, slots are formed by grouping raw edge dates instead
//! of calendar slicing, and vote tallies are counted with plain loops over
//! dense matrices. Only the shared data types are reused.

use std::collections::BTreeMap;

use tierank::eval::GroundTruth;
use tierank::graph::TemporalEdgeList;

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)] // textbook index form, kept readable
pub fn gaussian_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    assert!(a.len() == n && a.iter().all(|row| row.len() == n));
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        assert!(a[col][col].abs() > 1e-12, "singular system");
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

fn active_nodes(weights: &[Vec<f64>]) -> Vec<usize> {
    let n = weights.len();
    (0..n)
        .filter(|&i| (0..n).any(|j| weights[i][j] > 0.0 || weights[j][i] > 0.0))
        .collect()
}

/// Exact restart-walk scores on a dense weight matrix.
///
/// Solves `(I - d Pᵀ) x = (1 - d) e_root` over the active node set, where
/// row `u` of `P` is the weight-normalized transition distribution and
/// dangling rows route to the root. Inactive nodes get score 0.
pub fn dense_rpr(weights: &[Vec<f64>], root: usize, damping: f64) -> Vec<f64> {
    let n = weights.len();
    let active = active_nodes(weights);
    let m = active.len();
    assert!(m > 0, "empty graph");
    let local: BTreeMap<usize, usize> = active.iter().enumerate().map(|(l, &g)| (g, l)).collect();
    let root_local = *local.get(&root).expect("root must be active");

    let mut transition = vec![vec![0.0; m]; m];
    for (lu, &u) in active.iter().enumerate() {
        let out: f64 = active.iter().map(|&v| weights[u][v]).sum();
        if out > 0.0 {
            for (lv, &v) in active.iter().enumerate() {
                transition[lu][lv] = weights[u][v] / out;
            }
        } else {
            transition[lu][root_local] = 1.0;
        }
    }

    let mut a = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            a[i][j] = if i == j { 1.0 } else { 0.0 };
            a[i][j] -= damping * transition[j][i];
        }
    }
    let mut b = vec![0.0; m];
    b[root_local] = 1.0 - damping;

    let x = gaussian_solve(a, b);
    let mut full = vec![0.0; n];
    for (l, &g) in active.iter().enumerate() {
        full[g] = x[l];
    }
    full
}

/// Dense weight matrix over the full edge list (self-loops skipped,
/// undirected lists mirrored). `use_counts` selects count weights over
/// binary weights.
pub fn full_weight_matrix(edges: &TemporalEdgeList, use_counts: bool) -> Vec<Vec<f64>> {
    let n = edges.node_count();
    let mut w = vec![vec![0.0; n]; n];
    for e in edges.edges() {
        if e.src == e.dst {
            continue;
        }
        let add = if use_counts { e.count as f64 } else { 1.0 };
        if use_counts {
            w[e.src.index()][e.dst.index()] += add;
        } else {
            w[e.src.index()][e.dst.index()] = 1.0;
        }
        if !edges.directed() {
            if use_counts {
                w[e.dst.index()][e.src.index()] += add;
            } else {
                w[e.dst.index()][e.src.index()] = 1.0;
            }
        }
    }
    w
}

/// One dense weight matrix per distinct edge date, ascending by date.
pub fn per_date_weight_matrices(edges: &TemporalEdgeList, use_counts: bool) -> Vec<Vec<Vec<f64>>> {
    let n = edges.node_count();
    let mut by_date: BTreeMap<_, Vec<Vec<f64>>> = BTreeMap::new();
    for e in edges.edges() {
        if e.src == e.dst {
            continue;
        }
        let w = by_date.entry(e.date).or_insert_with(|| vec![vec![0.0; n]; n]);
        let add = if use_counts { e.count as f64 } else { 1.0 };
        if use_counts {
            w[e.src.index()][e.dst.index()] += add;
        } else {
            w[e.src.index()][e.dst.index()] = 1.0;
        }
        if !edges.directed() {
            if use_counts {
                w[e.dst.index()][e.src.index()] += add;
            } else {
                w[e.dst.index()][e.src.index()] = 1.0;
            }
        }
    }
    by_date.into_values().collect()
}

/// Nodes reachable from `root` along positive-weight edges.
fn reachable_from(weights: &[Vec<f64>], root: usize) -> Vec<bool> {
    let n = weights.len();
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut stack = vec![root];
    while let Some(u) = stack.pop() {
        for v in 0..n {
            if weights[u][v] > 0.0 && !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

/// Rounds to 12 significant digits so that elimination noise (~1e-16
/// relative) cannot break mathematically exact score ties; symmetric
/// candidates must fall through to the id tie-break like they do under
/// the exact arithmetic of the contract.
fn quantize(score: f64) -> f64 {
    format!("{score:.12e}").parse().unwrap()
}

/// Candidates of `root` ordered by dense-solve score descending, ties by
/// ascending index. The root itself and nodes the walk cannot reach are
/// excluded (their exact scores are zero; only id order would rank them).
pub fn ranked_candidates(weights: &[Vec<f64>], root: usize, damping: f64) -> Vec<usize> {
    let scores: Vec<f64> = dense_rpr(weights, root, damping)
        .into_iter()
        .map(quantize)
        .collect();
    let reached = reachable_from(weights, root);
    let mut candidates: Vec<usize> = (0..weights.len())
        .filter(|&u| u != root && reached[u])
        .collect();
    candidates.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then_with(|| a.cmp(&b)));
    candidates
}

fn is_active_in(weights: &[Vec<f64>], node: usize) -> bool {
    let n = weights.len();
    (0..n).any(|j| weights[node][j] > 0.0 || weights[j][node] > 0.0)
}

/// Baseline ordering: candidates of `query` over the full-span matrix.
/// None when the query is inactive.
pub fn baseline_order(
    edges: &TemporalEdgeList,
    query: usize,
    use_counts: bool,
    damping: f64,
) -> Option<Vec<usize>> {
    let w = full_weight_matrix(edges, use_counts);
    if !is_active_in(&w, query) {
        return None;
    }
    Some(ranked_candidates(&w, query, damping))
}

/// Top-p voting ordering for `query` across per-date matrices: one vote
/// per slot where a candidate ranks within the first `p` positions, votes
/// descending, then mean position ascending, then index ascending. None
/// when the query is active in no slot.
pub fn vote_order(
    matrices: &[Vec<Vec<f64>>],
    query: usize,
    p: u32,
    damping: f64,
) -> Option<Vec<usize>> {
    let mut votes: BTreeMap<usize, u32> = BTreeMap::new();
    let mut positions: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    let mut participated = 0u32;
    for w in matrices {
        if !is_active_in(w, query) {
            continue;
        }
        participated += 1;
        for (idx, candidate) in ranked_candidates(w, query, damping).into_iter().enumerate() {
            let pos = idx as u32 + 1;
            positions.entry(candidate).or_default().push(pos);
            let v = votes.entry(candidate).or_insert(0);
            if pos <= p {
                *v += 1;
            }
        }
    }
    if participated == 0 {
        return None;
    }
    let mut order: Vec<usize> = votes.keys().copied().collect();
    order.sort_by(|&a, &b| {
        let mean = |u: usize| {
            let ps = &positions[&u];
            ps.iter().map(|&x| f64::from(x)).sum::<f64>() / ps.len() as f64
        };
        votes[&b]
            .cmp(&votes[&a])
            .then_with(|| mean(a).total_cmp(&mean(b)))
            .then_with(|| a.cmp(&b))
    });
    Some(order)
}

/// Recall at ranks `1..=max_rank` given per-query candidate orderings.
/// Queries with `None` orderings count as misses throughout.
pub fn recall_from_orders(
    orders: &BTreeMap<usize, Option<Vec<usize>>>,
    truth: &GroundTruth,
    max_rank: u32,
) -> Vec<f64> {
    let n = orders.len();
    let mut recall = vec![0.0; max_rank as usize];
    for (&query, order) in orders {
        let superior = truth
            .superior_of(tierank::graph::NodeId(query as u32))
            .expect("query present in truth")
            .index();
        let Some(order) = order else { continue };
        if let Some(idx) = order.iter().position(|&c| c == superior) {
            let pos = idx + 1;
            for r in pos..=max_rank as usize {
                recall[r - 1] += 1.0;
            }
        }
    }
    for r in &mut recall {
        *r /= n as f64;
    }
    recall
}

/// End-to-end brute-force recall of the time-sliced voting approach.
pub fn timeslice_vote_recall(
    edges: &TemporalEdgeList,
    truth: &GroundTruth,
    use_counts: bool,
    p: u32,
    damping: f64,
    max_rank: u32,
) -> Vec<f64> {
    let matrices = per_date_weight_matrices(edges, use_counts);
    let orders: BTreeMap<usize, Option<Vec<usize>>> = truth
        .subordinates()
        .into_iter()
        .map(|q| (q.index(), vote_order(&matrices, q.index(), p, damping)))
        .collect();
    recall_from_orders(&orders, truth, max_rank)
}

/// End-to-end brute-force recall of the full-span baseline.
pub fn baseline_recall(
    edges: &TemporalEdgeList,
    truth: &GroundTruth,
    use_counts: bool,
    damping: f64,
    max_rank: u32,
) -> Vec<f64> {
    let orders: BTreeMap<usize, Option<Vec<usize>>> = truth
        .subordinates()
        .into_iter()
        .map(|q| (q.index(), baseline_order(edges, q.index(), use_counts, damping)))
        .collect();
    recall_from_orders(&orders, truth, max_rank)
}

/// Seeded random-graph construction shared by the test suites.
pub mod testgen {
    use chrono::NaiveDate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use tierank::graph::{EdgeListBuilder, NodeId, TemporalEdgeList};

    /// Random directed weighted graph with up to `max_nodes` nodes, all
    /// edges on one date. Returns the list plus a root node that is
    /// guaranteed active. Deterministic in `seed`.
    pub fn random_single_day_graph(seed: u64, max_nodes: u32) -> (TemporalEdgeList, NodeId) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..=max_nodes);
        let density = rng.random_range(0.05..0.30);
        let date = NaiveDate::from_ymd_opt(2000, 1, 3).unwrap();
        let mut builder = EdgeListBuilder::new(true);
        let mut edges = 0u32;
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.random_bool(density) {
                    let count = rng.random_range(1..=9u64);
                    builder
                        .add(&format!("n{u}"), &format!("n{v}"), date, count)
                        .unwrap();
                    edges += 1;
                }
            }
        }
        if edges == 0 {
            let u = rng.random_range(0..n);
            let v = (u + 1 + rng.random_range(0..n - 1)) % n;
            builder
                .add(&format!("n{u}"), &format!("n{v}"), date, 1)
                .unwrap();
        }
        let list = builder.finish().unwrap();
        let incident: Vec<NodeId> = {
            let mut mask = vec![false; list.node_count()];
            for e in list.edges() {
                mask[e.src.index()] = true;
                mask[e.dst.index()] = true;
            }
            mask.iter()
                .enumerate()
                .filter(|(_, &m)| m)
                .map(|(i, _)| NodeId(i as u32))
                .collect()
        };
        let root = incident[rng.random_range(0..incident.len())];
        (list, root)
    }
}
