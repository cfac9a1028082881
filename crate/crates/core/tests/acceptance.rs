//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use serde_json::Value;

use wetetch_core::io::gen::{generate, GenSpec};
use wetetch_core::ranges::{all_ranges, count_full_combinations, reduction_percent, to_scientific};
use wetetch_core::schedule::{check_all, makespan};
use wetetch_core::solver::{solve, SolveOptions, Status};
use wetetch_core::{BathKind, Instance, PrefixMode, Rule, Schedule, Time};

type Outcome = Result<String, String>;

fn main() -> ExitCode {
    let corpus = small_corpus();
    let started = Instant::now();
    let oracle: Vec<Exhaustive> = corpus.iter().map(exhaustive).collect();
    let oracle_time = started.elapsed();

    let started = Instant::now();
    let runs: Vec<Runs> = corpus.iter().map(run_solvers).collect();
    let solver_time = started.elapsed();

    let results: Vec<(&str, Outcome)> = vec![
        ("1 full combination count", timed(Duration::from_secs(1), criterion_count)),
        ("2 reduction percent", timed(Duration::from_secs(1), criterion_reduction)),
        (
            "3 range soundness",
            {
                let started = Instant::now();
                let out = criterion_soundness(&corpus, &oracle);
                budget(oracle_time + started.elapsed(), Duration::from_secs(300), || out)
            },
        ),
        (
            "4 optimum preservation",
            budget(solver_time, Duration::from_secs(600), || {
                criterion_preservation(&oracle, &runs)
            }),
        ),
        (
            "5 oracle equivalence",
            budget(solver_time, Duration::from_secs(600), || {
                criterion_equivalence(&corpus, &oracle, &runs)
            }),
        ),
        ("6 search effort", criterion_effort(&runs)),
        ("7 checker golden cases", timed(Duration::from_secs(1), criterion_golden)),
        ("8 determinism", timed(Duration::from_secs(60), criterion_determinism)),
    ];

    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name}: {detail}");
            }
        }
    }
    println!("{} passed, {} failed", results.len() - failed, failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let started = Instant::now();
    let out = f();
    budget(started.elapsed(), limit, || out)
}

fn budget(spent: Duration, limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let detail = f()?;
    if spent > limit {
        return Err(format!("{detail}; took {spent:.2?}, limit {limit:?}"));
    }
    Ok(format!("{detail} ({spent:.2?})"))
}

/// m, n in 1..=3, durations in [1, 4], slack in 1..=6, four seeds each.
fn small_corpus() -> Vec<Instance> {
    let mut out = Vec::new();
    for num_baths in 1..=3 {
        for num_jobs in 1..=3 {
            for slack in 1..=6 {
                for seed in 0..4u64 {
                    let spec = GenSpec {
                        num_baths,
                        num_jobs,
                        duration_low: 1,
                        duration_high: 4,
                        slack,
                        seed: seed * 1000 + (num_baths * 100 + num_jobs * 10) as u64 + u64::from(slack),
                    };
                    out.push(generate(&spec).expect("valid spec"));
                }
            }
        }
    }
    out
}

/// Every schedule on the unrestricted grid `[1, deadline]` accepted by the
/// checker.
struct Exhaustive {
    feasible: Vec<Schedule>,
    leaves: u64,
}

impl Exhaustive {
    /// Smallest makespan, ties broken by the bath-major start vector.
    fn best(&self, inst: &Instance) -> Option<(Time, Vec<Time>)> {
        self.feasible
            .iter()
            .map(|s| (makespan(inst, s), s.bath_major()))
            .min()
    }
}

/// Rows a single job can take without breaking one of its own rules:
/// starts on the grid, finish by the deadline, no entry before the previous
/// bath is left, no wait after a chemical bath and at most `delay_cap` after
/// a water bath. Any schedule using another row fails the checker whatever
/// the other jobs do, so skipping them loses nothing.
fn job_rows(inst: &Instance, job: usize) -> Vec<Vec<Time>> {
    fn extend(inst: &Instance, job: usize, row: &mut Vec<Time>, out: &mut Vec<Vec<Time>>) {
        let b = row.len() + 1;
        if b > inst.num_baths() {
            out.push(row.clone());
            return;
        }
        let (lo, hi) = if b == 1 {
            (1, inst.deadline())
        } else {
            let ready = row[b - 2] + inst.duration(job, b - 1);
            match BathKind::of(b - 1) {
                BathKind::Chemical => (ready, ready),
                BathKind::Water => (ready, ready + inst.delay_cap()),
            }
        };
        for t in lo..=hi {
            if t + inst.duration(job, b) > inst.deadline() {
                break;
            }
            row.push(t);
            extend(inst, job, row, out);
            row.pop();
        }
    }
    let mut out = Vec::new();
    extend(inst, job, &mut Vec::new(), &mut out);
    out
}

fn exhaustive(inst: &Instance) -> Exhaustive {
    let rows: Vec<Vec<Vec<Time>>> = (1..=inst.num_jobs()).map(|j| job_rows(inst, j)).collect();
    let mut pick: Vec<&Vec<Time>> = Vec::new();
    let mut out = Exhaustive {
        feasible: Vec::new(),
        leaves: 0,
    };

    fn disjoint(inst: &Instance, a: &[Time], ja: usize, b: &[Time], jb: usize) -> bool {
        (1..=inst.num_baths()).all(|k| {
            let (ta, tb) = (a[k - 1], b[k - 1]);
            ta + inst.duration(ja, k) <= tb || tb + inst.duration(jb, k) <= ta
        })
    }

    fn descend<'r>(
        inst: &Instance,
        rows: &'r [Vec<Vec<Time>>],
        pick: &mut Vec<&'r Vec<Time>>,
        out: &mut Exhaustive,
    ) {
        let j = pick.len();
        if j == rows.len() {
            out.leaves += 1;
            let owned: Vec<Vec<Time>> = pick.iter().map(|r| (*r).clone()).collect();
            let s = Schedule::from_rows(inst, &owned).expect("grid starts");
            if check_all(inst, &s).feasible {
                out.feasible.push(s);
            }
            return;
        }
        for row in &rows[j] {
            if pick
                .iter()
                .enumerate()
                .all(|(i, other)| disjoint(inst, other, i + 1, row, j + 1))
            {
                pick.push(row);
                descend(inst, rows, pick, out);
                pick.pop();
            }
        }
    }

    descend(inst, &rows, &mut pick, &mut out);
    out
}

/// Plain odometer over the whole grid, no pruning at all.
fn naive_feasible(inst: &Instance) -> Vec<Vec<Time>> {
    let len = inst.num_jobs() * inst.num_baths();
    let mut values = vec![1; len];
    let mut out = Vec::new();
    loop {
        let s = Schedule::from_bath_major(inst.num_jobs(), inst.num_baths(), &values);
        if check_all(inst, &s).feasible {
            out.push(values.clone());
        }
        let mut q = len;
        loop {
            if q == 0 {
                return out;
            }
            q -= 1;
            if values[q] < inst.deadline() {
                values[q] += 1;
                break;
            }
            values[q] = 1;
        }
    }
}

const NAIVE_GRID_LIMIT: u64 = 300_000;

struct Runs {
    with_ranges: Result<wetetch_core::SolveReport, String>,
    without_ranges: Result<wetetch_core::SolveReport, String>,
    oracle: Result<wetetch_core::SolveReport, String>,
}

fn run_solvers(inst: &Instance) -> Runs {
    let on = SolveOptions::default();
    let off = SolveOptions::default().without_ranges();
    let gt = SolveOptions {
        force: true,
        ..SolveOptions::default().oracle()
    };
    let go = |o: &SolveOptions| solve(inst, o).map_err(|e| e.to_string());
    Runs {
        with_ranges: go(&on),
        without_ranges: go(&off),
        oracle: go(&gt),
    }
}

fn criterion_count() -> Outcome {
    let full = count_full_combinations(8, 8, 120);
    let expected = BigUint::from(120u32).pow(64);
    if full != expected {
        return Err("count differs from 120^64".into());
    }
    let sci = to_scientific(&full, 5);
    if sci != "1.1684e+133" {
        return Err(format!("rendered {sci}, expected 1.1684e+133"));
    }
    Ok(sci)
}

fn criterion_reduction() -> Outcome {
    let full: BigUint = format!("80995{}", "0".repeat(92)).parse().unwrap();
    let ranged: BigUint = format!("12149{}", "0".repeat(91)).parse().unwrap();
    let pct = reduction_percent(&full, &ranged).map_err(|e| e.to_string())?;
    if (pct - 98.5).abs() > 0.05 {
        return Err(format!("got {pct}, expected 98.5 +/- 0.05"));
    }
    Ok(format!("{pct}"))
}

fn criterion_soundness(corpus: &[Instance], oracle: &[Exhaustive]) -> Outcome {
    let mut outside = Vec::new();
    let mut schedules = 0usize;
    let mut leaves = 0u64;
    for (k, (inst, ex)) in corpus.iter().zip(oracle).enumerate() {
        let ranges = all_ranges(inst, PrefixMode::Exclusive).map_err(|e| e.to_string())?;
        leaves += ex.leaves;
        for s in &ex.feasible {
            schedules += 1;
            for j in 1..=inst.num_jobs() {
                for b in 1..=inst.num_baths() {
                    if !ranges[j - 1][b - 1].contains(s.start(j, b)) {
                        outside.push(format!("instance {k} job {j} bath {b} start {}", s.start(j, b)));
                    }
                }
            }
        }
    }
    // the pruned enumeration must agree with a plain one wherever that is cheap
    let mut cross_checked = 0;
    for (k, (inst, ex)) in corpus.iter().zip(oracle).enumerate() {
        let grid = u64::from(inst.deadline()).checked_pow((inst.num_jobs() * inst.num_baths()) as u32);
        if grid.is_none_or(|g| g > NAIVE_GRID_LIMIT) {
            continue;
        }
        let mut pruned: Vec<Vec<Time>> = ex.feasible.iter().map(Schedule::bath_major).collect();
        pruned.sort();
        if naive_feasible(inst) != pruned {
            return Err(format!("instance {k}: pruned enumeration misses schedules"));
        }
        cross_checked += 1;
    }
    if corpus.len() < 200 {
        return Err(format!("corpus has only {} instances", corpus.len()));
    }
    if !outside.is_empty() {
        return Err(format!("{} starts outside their ranges, first: {}", outside.len(), outside[0]));
    }
    Ok(format!(
        "{} instances, {leaves} grid schedules checked, {schedules} feasible, 0 outside ranges; \
         {cross_checked} instances matched by unpruned enumeration",
        corpus.len()
    ))
}

fn report<'a>(r: &'a Result<wetetch_core::SolveReport, String>, what: &str) -> Result<&'a wetetch_core::SolveReport, String> {
    r.as_ref().map_err(|e| format!("{what} failed: {e}"))
}

fn criterion_preservation(oracle: &[Exhaustive], runs: &[Runs]) -> Outcome {
    let mut infeasible = 0;
    for (k, (ex, run)) in oracle.iter().zip(runs).enumerate() {
        let on = report(&run.with_ranges, "with ranges")?;
        let off = report(&run.without_ranges, "without ranges")?;
        let expected_status = if ex.feasible.is_empty() {
            infeasible += 1;
            Status::Infeasible
        } else {
            Status::Optimal
        };
        if on.status != expected_status || off.status != expected_status {
            return Err(format!(
                "instance {k}: status {} / {}, exhaustive search says {}",
                on.status, off.status, expected_status
            ));
        }
        if on.makespan != off.makespan {
            return Err(format!("instance {k}: makespan {:?} with ranges, {:?} without", on.makespan, off.makespan));
        }
    }
    Ok(format!("{} of {} equal ({infeasible} infeasible on both)", runs.len(), runs.len()))
}

fn criterion_equivalence(corpus: &[Instance], oracle: &[Exhaustive], runs: &[Runs]) -> Outcome {
    for (k, ((inst, ex), run)) in corpus.iter().zip(oracle).zip(runs).enumerate() {
        let bnb = report(&run.with_ranges, "branch and bound")?;
        let gt = report(&run.oracle, "generate and test")?;
        if bnb.status != gt.status || bnb.makespan != gt.makespan || bnb.best != gt.best {
            return Err(format!(
                "instance {k}: branch and bound {} {:?}, generate and test {} {:?}",
                bnb.status, bnb.makespan, gt.status, gt.makespan
            ));
        }
        let found = bnb.best.as_ref().map(|s| (makespan(inst, s), s.bath_major()));
        if found != ex.best(inst) {
            return Err(format!("instance {k}: {found:?}, exhaustive search gives {:?}", ex.best(inst)));
        }
    }
    Ok(format!("{} of {} identical, and equal to the exhaustive optimum", runs.len(), runs.len()))
}

fn criterion_effort(runs: &[Runs]) -> Outcome {
    let mut strict = 0usize;
    for (k, run) in runs.iter().enumerate() {
        let on = report(&run.with_ranges, "with ranges")?;
        let off = report(&run.without_ranges, "without ranges")?;
        if on.candidates_tested > off.candidates_tested {
            return Err(format!(
                "instance {k}: {} candidates with ranges, {} without",
                on.candidates_tested, off.candidates_tested
            ));
        }
        if on.nodes_explored > off.nodes_explored {
            return Err(format!(
                "instance {k}: {} nodes with ranges, {} without",
                on.nodes_explored, off.nodes_explored
            ));
        }
        if on.candidates_tested < off.candidates_tested {
            strict += 1;
        }
    }
    let share = 100.0 * strict as f64 / runs.len() as f64;
    if share < 95.0 {
        return Err(format!("strictly fewer candidates on only {share:.1}% of instances"));
    }
    Ok(format!("never more, strictly fewer on {strict}/{} ({share:.1}%)", runs.len()))
}

struct Golden {
    rule: Rule,
    inst: Instance,
    broken: Vec<Vec<Time>>,
    repaired: Vec<Vec<Time>>,
}

fn golden_cases() -> Vec<Golden> {
    let one = Instance::new(vec![vec![2, 2]], 10).unwrap();
    let two = Instance::new(vec![vec![2, 2], vec![2, 2]], 10).unwrap();
    let tight = Instance::new(vec![vec![2, 2]], 5).unwrap();
    let three = Instance::new(vec![vec![1, 1, 1]], 10)
        .unwrap()
        .set_strict_local_storage(false);
    let storage = Instance::new(vec![vec![2, 2, 2], vec![2, 1, 1]], 20).unwrap();
    let case = |rule, inst: &Instance, broken: &[&[Time]], repaired: &[&[Time]]| Golden {
        rule,
        inst: inst.clone(),
        broken: broken.iter().map(|r| r.to_vec()).collect(),
        repaired: repaired.iter().map(|r| r.to_vec()).collect(),
    };
    vec![
        case(Rule::OverlapBath, &two, &[&[1, 3], &[2, 4]], &[&[1, 3], &[3, 5]]),
        case(Rule::DuplicateStart, &two, &[&[1, 3], &[1, 3]], &[&[1, 3], &[3, 5]]),
        case(Rule::OverlapJob, &one, &[&[1, 2]], &[&[1, 3]]),
        case(Rule::BadStarting, &one, &[&[3, 1]], &[&[1, 3]]),
        case(Rule::ZeroWait, &one, &[&[1, 4]], &[&[1, 3]]),
        case(Rule::DelayCap, &three, &[&[1, 2, 6]], &[&[1, 2, 4]]),
        case(Rule::LocalStorage, &storage, &[&[1, 3, 5], &[3, 5, 8]], &[&[1, 3, 5], &[3, 5, 7]]),
        case(Rule::FirstStart, &one, &[&[2, 4]], &[&[1, 3]]),
        case(Rule::Deadline, &tight, &[&[2, 4]], &[&[1, 3]]),
    ]
}

fn criterion_golden() -> Outcome {
    let cases = golden_cases();
    let mut seen: Vec<Rule> = cases.iter().map(|c| c.rule).collect();
    seen.sort();
    seen.dedup();
    if seen.len() != Rule::ALL.len() {
        return Err(format!("{} of {} rules covered", seen.len(), Rule::ALL.len()));
    }
    let mut passed = 0;
    for c in &cases {
        let broken = Schedule::from_rows(&c.inst, &c.broken).map_err(|e| e.to_string())?;
        let repaired = Schedule::from_rows(&c.inst, &c.repaired).map_err(|e| e.to_string())?;
        if !check_all(&c.inst, &broken).has(c.rule) {
            return Err(format!("{} not reported on {:?}", c.rule.name(), c.broken));
        }
        passed += 1;
        let fixed = check_all(&c.inst, &repaired);
        if fixed.has(c.rule) || !fixed.feasible {
            return Err(format!("{:?} still reports {:?}", c.repaired, fixed.violations));
        }
        passed += 1;
    }
    Ok(format!("{passed} of {} cases", 2 * cases.len()))
}

fn criterion_determinism() -> Outcome {
    let inst = generate(&GenSpec {
        num_baths: 3,
        num_jobs: 3,
        duration_low: 1,
        duration_high: 4,
        slack: 4,
        seed: 7,
    })
    .map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("three.inst");
    fs::write(&path, inst.to_string()).map_err(|e| e.to_string())?;

    let run = |workers: &str| -> Result<(Value, Value), String> {
        let out = Command::new(env!("CARGO_BIN_EXE_wetetch"))
            .args(["solve", path.to_str().unwrap(), "--workers", workers])
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
        }
        let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        Ok((v["makespan_tenths"].clone(), v["starts"].clone()))
    };
    let first = run("1")?;
    let second = run("1")?;
    let parallel = run("4")?;
    if first != second || first != parallel {
        return Err(format!("runs differ: {first:?} / {second:?} / {parallel:?}"));
    }
    Ok(format!("makespan {} on all three runs", first.0))
}
