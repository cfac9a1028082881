use std::sync::atomic::{AtomicBool, AtomicU32, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use crate::error::Result;
use crate::instance::{BathKind, Instance, Time};
use crate::ranges::DomainCount;
use crate::schedule::{self, Schedule};

use super::{effective_instance, exhaustion_status, Domains, SolveOptions, SolveReport, Status};

const NO_BOUND: u32 = u32::MAX;
const CLOCK_EVERY: u64 = 1 << 12;

/// Outcome of trying one value for a variable.
enum Verdict {
    Accept,
    /// This value fails; larger values might not.
    Reject,
    /// This value and every larger one fail.
    Exhausted,
}

struct Search<'a> {
    inst: &'a Instance,
    dom: &'a Domains,
    n: usize,
    m: usize,
    /// Bath-major durations and remaining processing from each bath onwards.
    dur: Vec<Time>,
    tail: Vec<Time>,
    starts: Vec<Time>,
    incumbent: Option<(Time, Vec<Time>)>,
    shared: Option<&'a AtomicU32>,
    stop: &'a AtomicBool,
    time_limit_at: Option<Instant>,
    nodes: u64,
    candidates: u64,
    next_clock: u64,
}

impl<'a> Search<'a> {
    fn new(
        inst: &'a Instance,
        dom: &'a Domains,
        shared: Option<&'a AtomicU32>,
        stop: &'a AtomicBool,
        time_limit_at: Option<Instant>,
    ) -> Search<'a> {
        let (n, m) = (inst.num_jobs(), inst.num_baths());
        let mut dur = vec![0; n * m];
        let mut tail = vec![0; n * m];
        for j in 1..=n {
            let mut rest = 0;
            for b in (1..=m).rev() {
                rest += inst.duration(j, b);
                dur[dom.pos(j, b)] = inst.duration(j, b);
                tail[dom.pos(j, b)] = rest;
            }
        }
        Search {
            inst,
            dom,
            n,
            m,
            dur,
            tail,
            starts: vec![0; n * m],
            incumbent: None,
            shared,
            stop,
            time_limit_at,
            nodes: 0,
            candidates: 0,
            next_clock: CLOCK_EVERY,
        }
    }

    fn out_of_time(&mut self) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return true;
        }
        if let Some(at) = self.time_limit_at {
            if self.candidates >= self.next_clock {
                self.next_clock = self.candidates + CLOCK_EVERY;
                if Instant::now() >= at {
                    self.stop.store(true, Ordering::Relaxed);
                    return true;
                }
            }
        }
        false
    }

    /// The local incumbent prunes ties, the shared bound only strictly worse
    /// nodes, so every branch still finds its own lexicographically first
    /// optimum.
    fn within_bound(&self, lb: Time) -> bool {
        if let Some((best, _)) = &self.incumbent {
            if lb >= *best {
                return false;
            }
        }
        if let Some(shared) = self.shared {
            let s = shared.load(Ordering::Relaxed);
            if s != NO_BOUND && lb > s {
                return false;
            }
        }
        true
    }

    #[inline]
    fn finish_at(&self, k: usize) -> Time {
        self.starts[k] + self.dur[k]
    }

    /// Checks start `v` for variable `k` = (job, bath) against every start
    /// already placed. Writes `v` into `starts[k]`.
    fn verdict(&mut self, k: usize, job: usize, bath: usize, v: Time) -> Verdict {
        let t = self.dur[k];
        if v + t > self.inst.deadline() {
            return Verdict::Exhausted;
        }
        if !self.within_bound(v + self.tail[k] - 1) {
            return Verdict::Exhausted;
        }
        if bath > 1 {
            let prev = k - self.n;
            let ready = self.finish_at(prev);
            if v < ready {
                return Verdict::Reject;
            }
            match BathKind::of(bath - 1) {
                BathKind::Chemical if v != ready => return Verdict::Exhausted,
                BathKind::Water if v - ready > self.inst.delay_cap() => return Verdict::Exhausted,
                _ => {}
            }
        }
        let row = k - (job - 1);
        for other in row..k {
            let (t2, f2) = (self.starts[other], self.finish_at(other));
            if v < f2 && t2 < v + t {
                return Verdict::Reject;
            }
        }
        self.starts[k] = v;
        if job == self.n && !self.row_ok(bath) {
            return Verdict::Reject;
        }
        Verdict::Accept
    }

    /// Constraints that need every job of `bath` placed.
    fn row_ok(&self, bath: usize) -> bool {
        let n = self.n;
        let row = (bath - 1) * n;
        if bath == 1 {
            return self.starts[..n].iter().min() == Some(&1);
        }
        if BathKind::of(bath - 1) == BathKind::Water && self.inst.strict_local_storage() {
            for j in 0..n {
                let ready = self.finish_at(row - n + j);
                let enter = self.starts[row + j];
                if enter > ready {
                    let covered = (0..n).filter(|&o| o != j).any(|o| {
                        self.starts[row + o] <= ready && self.finish_at(row + o) == enter
                    });
                    if !covered {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn dfs(&mut self, k: usize) {
        if k == self.starts.len() {
            self.record();
            return;
        }
        if self.out_of_time() {
            return;
        }
        let job = k % self.n + 1;
        let bath = k / self.n + 1;
        let (lo, hi) = self.dom.bounds[k];
        if bath > 1 && BathKind::of(bath - 1).is_chemical() {
            // zero wait: the start is fixed by the chemical predecessor
            self.candidates += 1;
            let v = self.finish_at(k - self.n);
            if v < lo || v > hi {
                return;
            }
            if let Verdict::Accept = self.verdict(k, job, bath, v) {
                self.nodes += 1;
                self.dfs(k + 1);
            }
            return;
        }
        let mut v = lo;
        while v <= hi {
            self.candidates += 1;
            match self.verdict(k, job, bath, v) {
                Verdict::Accept => {
                    self.nodes += 1;
                    self.dfs(k + 1);
                    if self.stop.load(Ordering::Relaxed) {
                        return;
                    }
                }
                Verdict::Reject => {}
                Verdict::Exhausted => {
                    self.candidates += u64::from(hi - v);
                    return;
                }
            }
            v += 1;
        }
    }

    fn record(&mut self) {
        let last = (self.m - 1) * self.n;
        let max_finish = (last..last + self.n)
            .map(|k| self.finish_at(k))
            .max()
            .unwrap_or(1);
        let makespan = max_finish - 1;
        let better = self
            .incumbent
            .as_ref()
            .is_none_or(|(best, _)| makespan < *best);
        if better {
            self.incumbent = Some((makespan, self.starts.clone()));
            if let Some(shared) = self.shared {
                shared.fetch_min(makespan, Ordering::Relaxed);
            }
        }
    }

    /// Runs one top-level branch: the first variable pinned to `v`.
    fn branch(&mut self, v: Time) {
        self.candidates += 1;
        if let Verdict::Accept = self.verdict(0, 1, 1, v) {
            self.nodes += 1;
            self.dfs(1);
        }
    }
}

/// Depth-first branch and bound over the start windows (or the full grid
/// `[1, deadline]` without ranges).
///
/// With more than one worker the first variable's values are handed out as
/// independent branches sharing an incumbent bound; results are reduced in
/// branch order, so the returned schedule does not depend on thread timing.
pub fn solve_branch_and_bound(inst: &Instance, opts: &SolveOptions) -> Result<SolveReport> {
    opts.validate()?;
    let started = Instant::now();
    let inst = effective_instance(inst, opts);
    let domain_counts = DomainCount::of(&inst)?;
    let dom = Domains::new(&inst, opts)?;
    let time_limit_at = opts.time_limit.map(|d| started + d);
    let stop = AtomicBool::new(false);

    let (best, nodes, candidates) = if opts.workers == 1 {
        let mut search = Search::new(&inst, &dom, None, &stop, time_limit_at);
        search.dfs(0);
        (search.incumbent, search.nodes, search.candidates)
    } else {
        parallel(&inst, &dom, opts.workers, &stop, time_limit_at)
    };
    let timed_out = stop.load(Ordering::Relaxed);

    let status = match (&best, timed_out) {
        (Some(_), false) => Status::Optimal,
        (Some(_), true) => Status::FeasibleTimeout,
        (None, true) => Status::Timeout,
        (None, false) => exhaustion_status(opts),
    };
    let best = best.map(|(_, v)| Schedule::from_bath_major(inst.num_jobs(), inst.num_baths(), &v));
    Ok(SolveReport {
        status,
        makespan: best.as_ref().map(|s| schedule::makespan(&inst, s)),
        max_finish: best.as_ref().map(|s| schedule::max_finish(&inst, s)),
        best,
        nodes_explored: nodes,
        candidates_tested: candidates,
        domain_counts,
        wall_time: started.elapsed(),
    })
}

type Incumbent = Option<(Time, Vec<Time>)>;

fn parallel(
    inst: &Instance,
    dom: &Domains,
    workers: usize,
    stop: &AtomicBool,
    time_limit_at: Option<Instant>,
) -> (Incumbent, u64, u64) {
    let (lo, hi) = dom.bounds[0];
    let values: Vec<Time> = (lo..=hi).collect();
    let shared = AtomicU32::new(NO_BOUND);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<(Incumbent, u64, u64)>>> = Mutex::new(vec![None; values.len()]);

    thread::scope(|scope| {
        for _ in 0..workers.min(values.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= values.len() || stop.load(Ordering::Relaxed) {
                    break;
                }
                let mut search = Search::new(inst, dom, Some(&shared), stop, time_limit_at);
                search.branch(values[i]);
                let out = (search.incumbent, search.nodes, search.candidates);
                results.lock().expect("result lock poisoned")[i] = Some(out);
            });
        }
    });

    let mut best: Incumbent = None;
    let (mut nodes, mut candidates) = (0, 0);
    for (inc, n, c) in results.into_inner().expect("result lock poisoned").into_iter().flatten() {
        nodes += n;
        candidates += c;
        if let Some((mk, v)) = inc {
            if best.as_ref().is_none_or(|(b, _)| mk < *b) {
                best = Some((mk, v));
            }
        }
    }
    (best, nodes, candidates)
}
