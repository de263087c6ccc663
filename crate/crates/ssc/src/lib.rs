//! Subspace clustering via sparse self-representation.
//!
//! The crate implements three clustering pipelines over a union-of-subspaces
//! data model:
//!
//! - `l1-ssc` — the l1-penalized self-representation baseline solved by
//!   coordinate descent;
//! - `omp-ssc` — greedy orthogonal matching pursuit with a fixed atom
//!   budget per point;
//! - `a-omp-ssc` — the active variant that shifts each represented point
//!   along its residual and randomly drops represented points from the
//!   dictionary, trading a little separation for much better connectivity.
//!
//! Supporting modules provide seeded synthetic data generation
//! ([`datagen`]), dense numerics ([`numerics`]), evaluation metrics
//! ([`metrics`]), and a Monte Carlo sweep harness ([`harness`]).
//!
//! See the `examples/` directory for runnable walkthroughs of each
//! capability, and the `ssc` binary for the sweep/summarize/single CLI.

pub mod datagen;
pub mod harness;
pub mod metrics;
pub mod numerics;
pub mod pipeline;
pub mod selfrep;

pub use datagen::{generate, LabeledDataset, SubspaceModel};
pub use metrics::MetricsRecord;
pub use pipeline::{run, AlgorithmParams, ClusteringResult, Variant};
