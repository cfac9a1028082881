//! No-wait flowshop scheduling for automated wet-etch stations.
//!
//! Jobs visit an alternating sequence of chemical (odd) and water (even)
//! baths. A job must leave a chemical bath straight into the next bath; a
//! water bath may hold a finished job for a short while until its successor
//! bath frees up. The crate provides
//!
//! * [`instance`]: the problem data, its text format and ×10 scaling,
//! * [`ranges`]: per-operation start windows derived from each job's slack,
//!   and exact counts of the full and windowed search spaces,
//! * [`schedule`]: the feasibility rules and makespan,
//! * [`solver`]: range-pruned branch and bound and a generate-and-test oracle,
//! * [`io`]: schedule files, JSON reports, Gantt charts, a seeded instance
//!   generator and the with/without-ranges benchmark.

pub mod error;
pub mod instance;
pub mod io;
pub mod ranges;
pub mod schedule;
pub mod solver;

pub use error::{Error, Result};
pub use instance::{BathKind, Instance, Time};
pub use ranges::{DomainCount, PrefixMode, StartRange};
pub use schedule::{Rule, Schedule, Violation, ViolationReport};
pub use solver::{SearchMode, SolveOptions, SolveReport, Status};
