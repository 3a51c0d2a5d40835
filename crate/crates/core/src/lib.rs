//! Vertex Descent local search for graph colouring, with exact incremental
//! conflict accounting, the instance families it is analysed on, DSATUR and
//! exact baselines, and a seeded experiment harness.

pub mod baselines;
pub mod coloring;
pub mod descent;
pub mod experiments;
pub mod graph;
pub mod instances;
pub mod verify;

pub use coloring::{Coloring, GammaTable, Move};
pub use descent::{RunResult, RunStatus, SolverConfig};
pub use graph::Graph;
