//! Hierarchy inference for interaction networks.
//!
//! Given a timestamped interaction log (who contacted whom, when, how
//! often), this crate infers each actor's direct superior — a manager in
//! an e-mail corpus, an advisor in a co-authorship network. The signal is
//! rooted PageRank: a random walk that keeps restarting at the actor in
//! question, so high scores mean strong, persistent connection to that
//! actor.
//!
//! Two strategies are provided:
//!
//! * **baseline** — one rooted-PageRank run over the full-span graph;
//! * **time-based** — the span is partitioned into slots (calendar weeks,
//!   months, years, or a fixed count of equal intervals), each slot is
//!   ranked separately, and the per-slot lists are merged either by top-p
//!   voting or by modal rank position.
//!
//! Evaluation compares inferred rankings against known ties with
//! recall-at-rank curves; a seeded synthetic organization generator
//! supports benchmarking without access to real corpora.
//!
//! ```
//! use tierank::ingest::{generate_synthetic, SynthParams};
//! use tierank::pipeline::{timeslice_rank, Method};
//! use tierank::graph::{Granularity, Weighting};
//! use tierank::rpr::RprParams;
//!
//! let (edges, truth) = generate_synthetic(&SynthParams::default()).unwrap();
//! let query = truth.subordinates()[0];
//! let result = timeslice_rank(
//!     &edges,
//!     query,
//!     Granularity::Week,
//!     Weighting::Weighted,
//!     3,
//!     &RprParams::default(),
//! )
//! .unwrap();
//! assert_eq!(result.method, Method::TimeVoting);
//! assert!(!result.ranking.is_empty());
//! ```

pub mod error;
pub mod eval;
pub mod graph;
pub mod ingest;
pub mod pipeline;
pub mod rpr;

pub use error::{Error, Result};
pub use eval::{GroundTruth, RecallCurve};
pub use graph::{Granularity, NodeId, Snapshot, TemporalEdgeList, TimeSlot, Weighting};
pub use pipeline::{InferenceResult, Method, QuerySet, SnapshotSeries};
pub use rpr::{RankedList, RprParams, ScoreVector};
