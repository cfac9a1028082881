//! File formats, JSON reports and the command-line helpers built on them.

pub mod bench;
pub mod gantt;
pub mod gen;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::instance::{format_tenths, Instance, Time};
use crate::ranges::{all_ranges, job_slacks, to_scientific, DomainCount, PrefixMode};
use crate::schedule::Schedule;
use crate::solver::SolveReport;

/// Parses `s <job> <bath> <start>` lines. Every (job, bath) pair must be
/// given exactly once.
pub fn parse_schedule(inst: &Instance, text: &str) -> Result<Schedule> {
    let (n, m) = (inst.num_jobs(), inst.num_baths());
    let mut rows: Vec<Vec<Option<Time>>> = vec![vec![None; m]; n];
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let syntax = |message: String| Error::Syntax {
            line: line_no,
            column: 1,
            message,
        };
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "s" {
            return Err(syntax(format!("expected `s <job> <bath> <start>`, found {body:?}")));
        }
        let num = |s: &str, what: &str| -> Result<usize> {
            s.parse().map_err(|_| syntax(format!("expected integer {what}, found {s:?}")))
        };
        let job = num(fields[1], "job")?;
        let bath = num(fields[2], "bath")?;
        let start = Time::try_from(num(fields[3], "start")?)
            .map_err(|_| syntax(format!("start {} out of range", fields[3])))?;
        inst.check_job(job)?;
        inst.check_bath(bath)?;
        let slot = &mut rows[job - 1][bath - 1];
        if slot.is_some() {
            return Err(syntax(format!("duplicate start for job {job}, bath {bath}")));
        }
        *slot = Some(start);
    }
    let rows = rows
        .into_iter()
        .enumerate()
        .map(|(j, row)| {
            row.into_iter()
                .enumerate()
                .map(|(b, t)| {
                    t.ok_or_else(|| {
                        Error::Schedule(format!("missing start for job {}, bath {}", j + 1, b + 1))
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Schedule::from_rows(inst, &rows)
}

pub fn render_schedule(s: &Schedule) -> String {
    let mut out = String::new();
    for (j, row) in s.rows().iter().enumerate() {
        for (b, t) in row.iter().enumerate() {
            out.push_str(&format!("s {} {} {}\n", j + 1, b + 1, t));
        }
    }
    out
}

#[derive(Debug, Serialize)]
struct JobSlackJson {
    lambda: Time,
    chi: Time,
}

/// Search-space sizes, slacks and windows of an instance.
pub fn count_json(inst: &Instance, mode: PrefixMode) -> Result<Value> {
    let counts = DomainCount::of(inst)?;
    let per_job: Vec<JobSlackJson> = job_slacks(inst)?
        .into_iter()
        .map(|s| JobSlackJson {
            lambda: s.lambda,
            chi: s.chi,
        })
        .collect();
    let ranges: Vec<[Time; 2]> = all_ranges(inst, mode)?
        .into_iter()
        .flatten()
        .map(|r| [r.lower, r.upper])
        .collect();
    Ok(json!({
        "full": counts.full.to_string(),
        "ranged": counts.ranged.to_string(),
        "full_sci": to_scientific(&counts.full, 5),
        "ranged_sci": to_scientific(&counts.ranged, 5),
        "reduction_percent": counts.reduction_percent,
        "per_job": per_job,
        "ranges": ranges,
    }))
}

/// JSON form of a solve run. Times are emitted both in tenth-units and in
/// the raw unit.
pub fn solve_report_json(report: &SolveReport) -> Value {
    let unit = |t: Option<Time>| t.map(|t| format_tenths(t).parse::<f64>().expect("decimal"));
    json!({
        "status": report.status.name(),
        "makespan_tenths": report.makespan,
        "makespan": unit(report.makespan),
        "max_finish_tenths": report.max_finish,
        "starts": report.best.as_ref().map(Schedule::rows),
        "nodes_explored": report.nodes_explored,
        "candidates_tested": report.candidates_tested,
        "domain_full": report.domain_counts.full.to_string(),
        "domain_ranged": report.domain_counts.ranged.to_string(),
        "reduction_percent": report.domain_counts.reduction_percent,
        "wall_time_s": (report.wall_time.as_secs_f64() * 1000.0).round() / 1000.0,
    })
}
