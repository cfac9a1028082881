//! Schedules and the feasibility rules of a wet-etch line.
//!
//! A schedule fixes a start time for every (job, bath) pair. Occupation is
//! half-open: job `j` holds bath `b` during `[T, T + t)`, so a bath can take
//! the next job at the instant the previous one finishes.
//!
//! Rules checked:
//!
//! | rule              | meaning                                                        |
//! |-------------------|----------------------------------------------------------------|
//! | `overlap_bath`    | two jobs share a bath at the same time                         |
//! | `duplicate_start` | two jobs start the same bath at the same instant               |
//! | `overlap_job`     | a job enters bath `b + 1` before leaving bath `b`              |
//! | `bad_starting`    | a job enters any later bath before finishing an earlier one    |
//! | `zero_wait`       | a job lingers after a chemical bath                            |
//! | `delay_cap`       | a job waits too long between a water bath and the next one     |
//! | `local_storage`   | a job waits in a water bath while its next bath is idle        |
//! | `first_start`     | no job starts bath 1 at time 1                                 |
//! | `deadline`        | an operation finishes after the deadline                       |

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{BathKind, Instance, Time};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Schedule {
    num_jobs: usize,
    num_baths: usize,
    /// Job-major: `starts[(j - 1) * num_baths + (b - 1)]`.
    starts: Vec<Time>,
}

impl Schedule {
    /// Builds a schedule from rows `starts[job - 1][bath - 1]`, checking its
    /// shape against the instance.
    pub fn from_rows(inst: &Instance, rows: &[Vec<Time>]) -> Result<Schedule> {
        if rows.len() != inst.num_jobs() {
            return Err(Error::Schedule(format!(
                "{} job rows, expected {}",
                rows.len(),
                inst.num_jobs()
            )));
        }
        let mut starts = Vec::with_capacity(inst.num_jobs() * inst.num_baths());
        for (j, row) in rows.iter().enumerate() {
            if row.len() != inst.num_baths() {
                return Err(Error::Schedule(format!(
                    "job {} has {} starts, expected {}",
                    j + 1,
                    row.len(),
                    inst.num_baths()
                )));
            }
            if let Some(b) = row.iter().position(|&t| t == 0) {
                return Err(Error::Schedule(format!(
                    "start of job {} in bath {} must be >= 1",
                    j + 1,
                    b + 1
                )));
            }
            starts.extend_from_slice(row);
        }
        Ok(Schedule {
            num_jobs: inst.num_jobs(),
            num_baths: inst.num_baths(),
            starts,
        })
    }

    /// Builds a schedule from a bath-major vector (all bath-1 starts, then
    /// all bath-2 starts, ...).
    pub fn from_bath_major(num_jobs: usize, num_baths: usize, values: &[Time]) -> Schedule {
        assert_eq!(values.len(), num_jobs * num_baths);
        let mut starts = vec![0; values.len()];
        for b in 0..num_baths {
            for j in 0..num_jobs {
                starts[j * num_baths + b] = values[b * num_jobs + j];
            }
        }
        Schedule {
            num_jobs,
            num_baths,
            starts,
        }
    }

    pub fn num_jobs(&self) -> usize {
        self.num_jobs
    }

    pub fn num_baths(&self) -> usize {
        self.num_baths
    }

    #[inline]
    pub fn start(&self, job: usize, bath: usize) -> Time {
        self.starts[(job - 1) * self.num_baths + (bath - 1)]
    }

    #[inline]
    pub fn finish(&self, inst: &Instance, job: usize, bath: usize) -> Time {
        self.start(job, bath) + inst.duration(job, bath)
    }

    pub fn set_start(&mut self, job: usize, bath: usize, t: Time) {
        self.starts[(job - 1) * self.num_baths + (bath - 1)] = t;
    }

    pub fn rows(&self) -> Vec<Vec<Time>> {
        self.starts
            .chunks(self.num_baths)
            .map(<[Time]>::to_vec)
            .collect()
    }

    /// Starts in search order: bath-major, jobs ascending within a bath.
    /// Ties between equal-makespan schedules are broken on this vector.
    pub fn bath_major(&self) -> Vec<Time> {
        let mut out = Vec::with_capacity(self.starts.len());
        for b in 1..=self.num_baths {
            for j in 1..=self.num_jobs {
                out.push(self.start(j, b));
            }
        }
        out
    }

    fn matches(&self, inst: &Instance) -> bool {
        self.num_jobs == inst.num_jobs() && self.num_baths == inst.num_baths()
    }
}

/// Finish time of `job` in `bath`: start plus duration.
pub fn finish_time(inst: &Instance, s: &Schedule, job: usize, bath: usize) -> Result<Time> {
    inst.check_job(job)?;
    inst.check_bath(bath)?;
    Ok(s.finish(inst, job, bath))
}

/// Declared in name order so the derived `Ord` sorts by rule name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    BadStarting,
    Deadline,
    DelayCap,
    DuplicateStart,
    FirstStart,
    LocalStorage,
    OverlapBath,
    OverlapJob,
    ZeroWait,
}

impl Rule {
    pub const ALL: [Rule; 9] = [
        Rule::BadStarting,
        Rule::Deadline,
        Rule::DelayCap,
        Rule::DuplicateStart,
        Rule::FirstStart,
        Rule::LocalStorage,
        Rule::OverlapBath,
        Rule::OverlapJob,
        Rule::ZeroWait,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::BadStarting => "bad_starting",
            Rule::Deadline => "deadline",
            Rule::DelayCap => "delay_cap",
            Rule::DuplicateStart => "duplicate_start",
            Rule::FirstStart => "first_start",
            Rule::LocalStorage => "local_storage",
            Rule::OverlapBath => "overlap_bath",
            Rule::OverlapJob => "overlap_job",
            Rule::ZeroWait => "zero_wait",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One falsified rule instance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Violation {
    pub rule: Rule,
    pub jobs: Vec<usize>,
    pub baths: Vec<usize>,
    pub times: Vec<Time>,
}

impl Violation {
    fn new(rule: Rule, jobs: Vec<usize>, baths: Vec<usize>, times: Vec<Time>) -> Violation {
        Violation {
            rule,
            jobs,
            baths,
            times,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} jobs={:?} baths={:?} times={:?}",
            self.rule, self.jobs, self.baths, self.times
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViolationReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

/// `overlap_bath` and `duplicate_start`.
pub fn check_resource_exclusivity(inst: &Instance, s: &Schedule) -> Vec<Violation> {
    let mut out = Vec::new();
    resource_exclusivity(inst, s, &mut out);
    out
}

fn resource_exclusivity(inst: &Instance, s: &Schedule, out: &mut Vec<Violation>) {
    for b in 1..=inst.num_baths() {
        for j1 in 1..=inst.num_jobs() {
            let (t1, f1) = (s.start(j1, b), s.finish(inst, j1, b));
            for j2 in j1 + 1..=inst.num_jobs() {
                let (t2, f2) = (s.start(j2, b), s.finish(inst, j2, b));
                if t1 == t2 {
                    out.push(Violation::new(Rule::DuplicateStart, vec![j1, j2], vec![b], vec![t1]));
                }
                if t1 < f2 && t2 < f1 {
                    out.push(Violation::new(Rule::OverlapBath, vec![j1, j2], vec![b], vec![t1, t2]));
                }
            }
        }
    }
}

/// `overlap_job` for a consecutive bath pair entered while the earlier one
/// is still running; `bad_starting` for every other premature entry.
pub fn check_job_flow(inst: &Instance, s: &Schedule) -> Vec<Violation> {
    let mut out = Vec::new();
    job_flow(inst, s, &mut out);
    out
}

fn job_flow(inst: &Instance, s: &Schedule, out: &mut Vec<Violation>) {
    let m = inst.num_baths();
    for j in 1..=inst.num_jobs() {
        for b1 in 1..=m {
            let (t1, f1) = (s.start(j, b1), s.finish(inst, j, b1));
            for b2 in b1 + 1..=m {
                let t2 = s.start(j, b2);
                if t2 >= f1 {
                    continue;
                }
                let rule = if b2 == b1 + 1 && t1 <= t2 {
                    Rule::OverlapJob
                } else {
                    Rule::BadStarting
                };
                out.push(Violation::new(rule, vec![j], vec![b1, b2], vec![t2, f1]));
            }
        }
    }
}

/// `zero_wait`, `delay_cap` and `local_storage`.
pub fn check_timing_policies(inst: &Instance, s: &Schedule) -> Vec<Violation> {
    let mut out = Vec::new();
    timing_policies(inst, s, &mut out);
    out
}

fn timing_policies(inst: &Instance, s: &Schedule, out: &mut Vec<Violation>) {
    let m = inst.num_baths();
    for j in 1..=inst.num_jobs() {
        for b in 1..m {
            let f1 = s.finish(inst, j, b);
            let t2 = s.start(j, b + 1);
            if t2 <= f1 {
                continue;
            }
            match BathKind::of(b) {
                BathKind::Chemical => {
                    out.push(Violation::new(Rule::ZeroWait, vec![j], vec![b, b + 1], vec![f1, t2]));
                }
                BathKind::Water => {
                    if t2 - f1 > inst.delay_cap() {
                        out.push(Violation::new(Rule::DelayCap, vec![j], vec![b, b + 1], vec![f1, t2]));
                    }
                    if inst.strict_local_storage() && !successor_frees_at(inst, s, j, b + 1, f1, t2) {
                        out.push(Violation::new(
                            Rule::LocalStorage,
                            vec![j],
                            vec![b, b + 1],
                            vec![f1, t2],
                        ));
                    }
                }
            }
        }
    }
}

/// Whether some other job already holds `bath` when `job` becomes ready at
/// `ready` and releases it exactly at `enter`.
pub(crate) fn successor_frees_at(
    inst: &Instance,
    s: &Schedule,
    job: usize,
    bath: usize,
    ready: Time,
    enter: Time,
) -> bool {
    (1..=inst.num_jobs())
        .filter(|&o| o != job)
        .any(|o| s.start(o, bath) <= ready && s.finish(inst, o, bath) == enter)
}

/// `first_start` and `deadline`.
pub fn check_global(inst: &Instance, s: &Schedule) -> Vec<Violation> {
    let mut out = Vec::new();
    global(inst, s, &mut out);
    out
}

fn global(inst: &Instance, s: &Schedule, out: &mut Vec<Violation>) {
    let n = inst.num_jobs();
    let earliest = (1..=n).map(|j| s.start(j, 1)).min().unwrap_or(1);
    if earliest != 1 {
        let jobs = (1..=n).filter(|&j| s.start(j, 1) == earliest).collect();
        out.push(Violation::new(Rule::FirstStart, jobs, vec![1], vec![earliest]));
    }
    for j in 1..=n {
        for b in 1..=inst.num_baths() {
            let f = s.finish(inst, j, b);
            if f > inst.deadline() {
                out.push(Violation::new(Rule::Deadline, vec![j], vec![b], vec![f]));
            }
        }
    }
}

/// Runs every rule and returns the violations sorted by rule name, then
/// jobs, baths and times.
pub fn check_all(inst: &Instance, s: &Schedule) -> ViolationReport {
    let mut violations = Vec::new();
    collect_all(inst, s, &mut violations);
    violations.sort();
    ViolationReport {
        feasible: violations.is_empty(),
        violations,
    }
}

/// Unsorted union of all checks into a reusable buffer.
pub(crate) fn collect_all(inst: &Instance, s: &Schedule, out: &mut Vec<Violation>) {
    assert!(s.matches(inst), "schedule shape does not match instance");
    resource_exclusivity(inst, s, out);
    job_flow(inst, s, out);
    timing_policies(inst, s, out);
    global(inst, s, out);
}

/// Latest finish over the last bath.
pub fn max_finish(inst: &Instance, s: &Schedule) -> Time {
    let m = inst.num_baths();
    (1..=inst.num_jobs())
        .map(|j| s.finish(inst, j, m))
        .max()
        .unwrap_or(0)
}

/// Elapsed time units since the first start at time 1: `max finish − 1`.
pub fn makespan(inst: &Instance, s: &Schedule) -> Time {
    max_finish(inst, s).saturating_sub(1)
}
