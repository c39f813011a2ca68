//! Library half of the `riumapf` command-line tool: file loading, solver
//! dispatch, run records, the benchmark sweep and SVG plan traces.

pub mod bench;
pub mod load;
pub mod run;
pub mod trace;

pub use bench::{cell_seed, run_sweep, summarize, BenchCell, SummaryRow, SweepConfig};
pub use load::{load_graph, load_instance, LoadedGraph};
pub use run::{run_algorithm, Algo, RunOptions, RunOutcome, RunRecord, Status};
