use std::time::Instant;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::instance::{Instance, Time};
use crate::ranges::DomainCount;
use crate::schedule::{self, Rule, Schedule, Violation};

use super::{effective_instance, exhaustion_status, Domains, SolveOptions, SolveReport, Status};

/// Largest bath-major position a violation depends on. Every candidate that
/// agrees with the current one up to this position fails the same way.
fn support_end(v: &Violation, n: usize) -> usize {
    let pos = |job: usize, bath: usize| (bath - 1) * n + (job - 1);
    match v.rule {
        Rule::FirstStart => n - 1,
        // depends on every job's start in the successor bath
        Rule::LocalStorage => pos(n, v.baths[1]),
        _ => {
            let job = *v.jobs.iter().max().expect("violation names a job");
            let bath = *v.baths.iter().max().expect("violation names a bath");
            pos(job, bath)
        }
    }
}

/// Enumerates every candidate of the domain product, runs the full checker
/// and keeps the best feasible schedule.
///
/// A failing candidate refutes the whole block of candidates that share its
/// prefix up to the deepest position the earliest-ending violation depends
/// on; that block is counted as tested and skipped. `candidates_tested`
/// always ends equal to the domain product.
pub fn solve_generate_and_test(inst: &Instance, opts: &SolveOptions) -> Result<SolveReport> {
    opts.validate()?;
    let started = Instant::now();
    let inst = effective_instance(inst, opts);
    let domain_counts = DomainCount::of(&inst)?;
    let dom = Domains::new(&inst, opts)?;
    let total = dom.size();
    if !opts.force && total > BigUint::from(opts.candidate_limit) {
        return Err(Error::CandidateGuard {
            candidates: total.to_string(),
            limit: opts.candidate_limit,
        });
    }
    let time_limit_at = opts.time_limit.map(|d| started + d);

    let (n, m) = (inst.num_jobs(), inst.num_baths());
    let len = n * m;
    let lo: Vec<Time> = dom.bounds.iter().map(|b| b.0).collect();
    let hi: Vec<Time> = dom.bounds.iter().map(|b| b.1).collect();
    // suffix_size[p] = number of completions of positions p.. (saturating)
    let mut suffix_size = vec![1u64; len + 1];
    for p in (0..len).rev() {
        suffix_size[p] = suffix_size[p + 1].saturating_mul(u64::from(hi[p] - lo[p] + 1));
    }

    let mut values = lo.clone();
    let mut cand = Schedule::from_bath_major(n, m, &values);
    let mut buf: Vec<Violation> = Vec::new();
    let mut best: Option<(Time, Vec<Time>)> = None;
    let mut tested: u64 = 0;
    let mut checks: u64 = 0;

    loop {
        if let Some(at) = time_limit_at {
            if checks.is_multiple_of(4096) && Instant::now() >= at {
                return Ok(finish(&inst, opts, best, checks, tested, domain_counts, started, true));
            }
        }
        checks += 1;
        buf.clear();
        schedule::collect_all(&inst, &cand, &mut buf);

        let refuted_through = if buf.is_empty() {
            let mk = schedule::makespan(&inst, &cand);
            let better = best
                .as_ref()
                .is_none_or(|(b, v)| (mk, &values) < (*b, v));
            if better {
                best = Some((mk, values.clone()));
            }
            len - 1
        } else {
            buf.iter().map(|v| support_end(v, n)).min().expect("non-empty")
        };

        // candidates sharing values[..=p] at or after the current suffix
        let p = refuted_through;
        let mut rank: u64 = 0;
        for q in p + 1..len {
            rank = rank.saturating_add(u64::from(values[q] - lo[q]).saturating_mul(suffix_size[q + 1]));
        }
        tested = tested.saturating_add(suffix_size[p + 1] - rank);

        // advance the odometer at position p, resetting everything after it
        let mut q = p;
        loop {
            if values[q] < hi[q] {
                values[q] += 1;
                set(&mut cand, n, q, values[q]);
                for r in q + 1..len {
                    values[r] = lo[r];
                    set(&mut cand, n, r, lo[r]);
                }
                break;
            }
            if q == 0 {
                return Ok(finish(&inst, opts, best, checks, tested, domain_counts, started, false));
            }
            q -= 1;
        }
    }
}

fn set(s: &mut Schedule, n: usize, pos: usize, v: Time) {
    s.set_start(pos % n + 1, pos / n + 1, v);
}

#[allow(clippy::too_many_arguments)]
fn finish(
    inst: &Instance,
    opts: &SolveOptions,
    best: Option<(Time, Vec<Time>)>,
    checks: u64,
    tested: u64,
    domain_counts: DomainCount,
    started: Instant,
    timed_out: bool,
) -> SolveReport {
    let status = match (&best, timed_out) {
        (Some(_), false) => Status::Optimal,
        (Some(_), true) => Status::FeasibleTimeout,
        (None, true) => Status::Timeout,
        (None, false) => exhaustion_status(opts),
    };
    let best = best.map(|(_, v)| Schedule::from_bath_major(inst.num_jobs(), inst.num_baths(), &v));
    SolveReport {
        status,
        makespan: best.as_ref().map(|s| schedule::makespan(inst, s)),
        max_finish: best.as_ref().map(|s| schedule::max_finish(inst, s)),
        best,
        nodes_explored: checks,
        candidates_tested: tested,
        domain_counts,
        wall_time: started.elapsed(),
    }
}

/// Domain product for the given options, for callers that want to know the
/// oracle's workload before running it.
pub fn candidate_count(inst: &Instance, opts: &SolveOptions) -> Result<Option<u64>> {
    let inst = effective_instance(inst, opts);
    Ok(Domains::new(&inst, opts)?.size().to_u64())
}
