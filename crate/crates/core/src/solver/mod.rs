//! Makespan-optimal search.
//!
//! Two independent searches share the same domains and tie-break:
//!
//! * [`solve_branch_and_bound`] assigns starts depth first in bath-major
//!   order, checks each new start against the ones already placed and prunes
//!   on the incumbent makespan.
//! * [`solve_generate_and_test`] walks the full Cartesian product of the
//!   domains and runs the complete checker on every candidate.
//!
//! Among schedules of equal makespan the one with the lexicographically
//! smallest bath-major start vector wins.

mod bnb;
mod generate;

use std::fmt;
use std::time::Duration;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Instance, Time};
use crate::ranges::{all_ranges, DomainCount, PrefixMode};
use crate::schedule::Schedule;

pub use bnb::solve_branch_and_bound;
pub use generate::{candidate_count, solve_generate_and_test};

/// Default refusal threshold for the generate-and-test oracle.
pub const DEFAULT_CANDIDATE_LIMIT: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    #[default]
    BranchAndBound,
    GenerateAndTest,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub use_ranges: bool,
    pub mode: SearchMode,
    pub time_limit: Option<Duration>,
    pub workers: usize,
    pub delay_cap: Option<Time>,
    pub strict_local_storage: Option<bool>,
    pub prefix_mode: PrefixMode,
    /// Generate-and-test refuses larger candidate spaces unless `force` is set.
    pub candidate_limit: u64,
    pub force: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            use_ranges: true,
            mode: SearchMode::BranchAndBound,
            time_limit: None,
            workers: 1,
            delay_cap: None,
            strict_local_storage: None,
            prefix_mode: PrefixMode::Exclusive,
            candidate_limit: DEFAULT_CANDIDATE_LIMIT,
            force: false,
        }
    }
}

impl SolveOptions {
    pub fn without_ranges(mut self) -> Self {
        self.use_ranges = false;
        self
    }

    pub fn oracle(mut self) -> Self {
        self.mode = SearchMode::GenerateAndTest;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::Validation("worker count must be at least 1".into()));
        }
        if self.time_limit == Some(Duration::ZERO) {
            return Err(Error::Validation("time limit must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    FeasibleTimeout,
    /// No schedule exists on the unrestricted grid.
    Infeasible,
    /// No schedule inside the searched windows, which may not contain every
    /// feasible start (inclusive prefix mode).
    ExhaustedNoSolution,
    /// Time limit hit before any schedule was found.
    Timeout,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::FeasibleTimeout => "feasible_timeout",
            Status::Infeasible => "infeasible",
            Status::ExhaustedNoSolution => "exhausted_no_solution",
            Status::Timeout => "timeout",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: Status,
    pub best: Option<Schedule>,
    /// Elapsed convention, `max finish − 1`.
    pub makespan: Option<Time>,
    pub max_finish: Option<Time>,
    pub nodes_explored: u64,
    pub candidates_tested: u64,
    pub domain_counts: DomainCount,
    pub wall_time: Duration,
}

/// Dispatches on `opts.mode`.
pub fn solve(inst: &Instance, opts: &SolveOptions) -> Result<SolveReport> {
    match opts.mode {
        SearchMode::BranchAndBound => solve_branch_and_bound(inst, opts),
        SearchMode::GenerateAndTest => solve_generate_and_test(inst, opts),
    }
}

/// Instance with the option overrides applied.
fn effective_instance(inst: &Instance, opts: &SolveOptions) -> Instance {
    let mut out = inst.clone();
    if let Some(cap) = opts.delay_cap {
        out = out.set_delay_cap(cap);
    }
    if let Some(strict) = opts.strict_local_storage {
        out = out.set_strict_local_storage(strict);
    }
    out
}

/// Per-variable inclusive domains in bath-major order.
#[derive(Debug, Clone)]
struct Domains {
    num_jobs: usize,
    bounds: Vec<(Time, Time)>,
}

impl Domains {
    fn new(inst: &Instance, opts: &SolveOptions) -> Result<Domains> {
        let n = inst.num_jobs();
        let m = inst.num_baths();
        let mut bounds = vec![(1, inst.deadline()); n * m];
        if opts.use_ranges {
            for (j, row) in all_ranges(inst, opts.prefix_mode)?.iter().enumerate() {
                for (b, r) in row.iter().enumerate() {
                    bounds[b * n + j] = (r.lower, r.upper);
                }
            }
        }
        Ok(Domains { num_jobs: n, bounds })
    }

    #[inline]
    fn pos(&self, job: usize, bath: usize) -> usize {
        (bath - 1) * self.num_jobs + (job - 1)
    }

    fn size(&self) -> BigUint {
        self.bounds
            .iter()
            .fold(BigUint::from(1u32), |acc, &(lo, hi)| acc * BigUint::from(hi - lo + 1))
    }
}

/// Whether exhausting the searched space proves the instance infeasible.
fn exhaustion_status(opts: &SolveOptions) -> Status {
    if !opts.use_ranges || opts.prefix_mode == PrefixMode::Exclusive {
        Status::Infeasible
    } else {
        Status::ExhaustedNoSolution
    }
}
