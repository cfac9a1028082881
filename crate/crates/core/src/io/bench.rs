//! Side-by-side runs with and without start windows, one row per approach.

use std::fmt;
use std::time::Duration;

use serde::Serialize;

use crate::error::Result;
use crate::instance::{format_tenths, Instance, Time};
use crate::solver::{solve, SolveOptions, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Approach {
    NoRanges,
    WithRanges,
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Approach::NoRanges => "no_ranges",
            Approach::WithRanges => "with_ranges",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub label: String,
    /// Makespan in tenth-units; rendered divided by ten.
    pub makespan: Option<Time>,
    pub cpu_time: f64,
    pub approach: Approach,
    pub status: Status,
    pub candidates_tested: u64,
    pub nodes_explored: u64,
}

impl BenchRow {
    fn solved(&self) -> bool {
        self.status == Status::Optimal
    }

    fn makespan_cell(&self) -> String {
        match (self.solved(), self.makespan) {
            (true, Some(t)) => format_tenths(t),
            _ => "--".into(),
        }
    }

    fn cpu_cell(&self) -> String {
        if self.solved() {
            format!("{:.3}", self.cpu_time)
        } else {
            "NS".into()
        }
    }
}

pub fn label(inst: &Instance) -> String {
    format!("[{}x{}]", inst.num_baths(), inst.num_jobs())
}

/// Solves every instance without and then with ranges. A run that does not
/// prove optimality within `time_limit` is kept as a non-optimal row.
pub fn run(instances: &[Instance], time_limit: Option<Duration>, workers: usize) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::with_capacity(instances.len() * 2);
    for inst in instances {
        for (approach, use_ranges) in [(Approach::NoRanges, false), (Approach::WithRanges, true)] {
            let opts = SolveOptions {
                use_ranges,
                time_limit,
                workers,
                ..SolveOptions::default()
            };
            let r = solve(inst, &opts)?;
            rows.push(BenchRow {
                label: label(inst),
                makespan: r.makespan,
                cpu_time: r.wall_time.as_secs_f64(),
                approach,
                status: r.status,
                candidates_tested: r.candidates_tested,
                nodes_explored: r.nodes_explored,
            });
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "label,approach,status,makespan,cpu_time_s";

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.label,
            r.approach,
            r.status,
            r.makespan_cell(),
            r.cpu_cell()
        ));
    }
    out
}

/// Aligned text table with the same columns as the CSV minus the status.
pub fn to_table(rows: &[BenchRow]) -> String {
    let header = ["P:[BxJ]", "makespan", "CPU Time", "Approach"];
    let cells: Vec<[String; 4]> = rows
        .iter()
        .map(|r| [r.label.clone(), r.makespan_cell(), r.cpu_cell(), r.approach.to_string()])
        .collect();
    let mut widths = header.map(str::len);
    for c in &cells {
        for (w, s) in widths.iter_mut().zip(c) {
            *w = (*w).max(s.len());
        }
    }
    let line = |c: [&str; 4]| -> String {
        let parts: Vec<String> = c.iter().zip(widths).map(|(s, w)| format!("{s:<w$}")).collect();
        format!("| {} |\n", parts.join(" | "))
    };
    let mut out = line(header);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&format!("|-{}-|\n", rule.join("-|-")));
    for c in &cells {
        out.push_str(&line([&c[0], &c[1], &c[2], &c[3]]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::gen::{generate, GenSpec};

    fn corpus() -> Vec<Instance> {
        (0..5)
            .map(|seed| {
                generate(&GenSpec {
                    num_baths: 2,
                    num_jobs: 2,
                    duration_low: 1,
                    duration_high: 4,
                    slack: 4,
                    seed,
                })
                .unwrap()
            })
            .collect()
    }

    #[test]
    fn approaches_agree_and_ranges_test_fewer_candidates() {
        let rows = run(&corpus(), None, 1).unwrap();
        assert_eq!(rows.len(), 10);
        for pair in rows.chunks(2) {
            let (off, on) = (&pair[0], &pair[1]);
            assert_eq!(off.approach, Approach::NoRanges);
            assert_eq!(on.approach, Approach::WithRanges);
            assert_eq!(off.status, on.status);
            assert_eq!(off.makespan, on.makespan);
            assert!(on.candidates_tested < off.candidates_tested);
            assert!(on.nodes_explored <= off.nodes_explored);
        }
    }

    #[test]
    fn csv_and_table_render_ns() {
        let rows = vec![
            BenchRow {
                label: "[2x2]".into(),
                makespan: Some(180),
                cpu_time: 1.82,
                approach: Approach::NoRanges,
                status: Status::Optimal,
                candidates_tested: 0,
                nodes_explored: 0,
            },
            BenchRow {
                label: "[5x5]".into(),
                makespan: None,
                cpu_time: 300.0,
                approach: Approach::NoRanges,
                status: Status::Timeout,
                candidates_tested: 0,
                nodes_explored: 0,
            },
        ];
        let csv = to_csv(&rows);
        assert_eq!(
            csv,
            "label,approach,status,makespan,cpu_time_s\n\
             [2x2],no_ranges,optimal,18.0,1.820\n\
             [5x5],no_ranges,timeout,--,NS\n"
        );
        let table = to_table(&rows);
        assert!(table.contains("| [5x5]   | --       | NS       | no_ranges |"), "{table}");
    }

    #[test]
    fn timed_out_row_is_ns() {
        let inst = generate(&GenSpec {
            num_baths: 7,
            num_jobs: 7,
            duration_low: 10,
            duration_high: 40,
            slack: 200,
            seed: 3,
        })
        .unwrap();
        let rows = run(&[inst], Some(Duration::from_millis(20)), 1).unwrap();
        assert!(rows.iter().any(|r| r.status != Status::Optimal));
        assert!(to_csv(&rows).contains("NS"));
    }
}
