//! Planners and tooling for distance-r independent unlabeled multi-agent
//! pathfinding (rIUMAPF): move anonymous agents from a vertex set `S` to a
//! vertex set `T` while every pair stays more than `r` hops apart.

pub mod format;
pub mod generators;
pub mod graph;
pub mod grid;
pub mod ilp;
pub mod instance;
pub mod kernel;
pub mod lacam;
pub mod matching;
pub mod oracle;
pub mod pibt;

pub use format::FormatError;
pub use graph::{Configuration, DistanceTable, Graph, GraphError, VertexId};
pub use grid::{GridMap, MapError};
pub use instance::{Instance, InstanceError, Plan, PlanMetrics, Violation, ViolationKind};
pub use matching::Assignment;
pub use pibt::{IuPibt, Priorities, StepState, TargetDistances};
pub use kernel::{GalacticGraph, GalacticInstance};
pub use lacam::{LacamOptions, LacamOutcome};
pub use oracle::ExactOutcome;
