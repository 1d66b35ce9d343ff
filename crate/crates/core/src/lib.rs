//! Functional-repair regenerating codes with repair by transfer.
//!
//! Each repair has every surviving node send one stored symbol unchanged;
//! the newcomer combines them with random local coefficients. A fixed choice
//! function decides which symbol each helper sends, and the signal flow graph
//! over all repairs carries the bookkeeping used to check that any `k` nodes
//! can still rebuild the file.

pub mod choice;
pub mod codec;
pub mod error;
pub mod field;
pub mod flowgraph;
pub mod oracle;
pub mod params;
pub mod sim;

pub use choice::{compute_choice, cutoff_stage, verify_fpair_condition, FailureHistory};
pub use error::{Error, Result};
pub use field::{Field, Matrix};
pub use flowgraph::{build_graph, gammoid_rank, FlowGraph};
pub use params::{normalized_params, tradeoff_curve, SystemParams};
