use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use wetetch_core::io::{self, bench, gantt, gen};
use wetetch_core::ranges::{count_full_combinations, to_scientific};
use wetetch_core::schedule::check_all;
use wetetch_core::solver::{solve, SolveOptions, Status};
use wetetch_core::{instance, Instance, PrefixMode, SearchMode, Time};

const EXIT_INFEASIBLE_SCHEDULE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NO_SOLUTION: u8 = 3;
const EXIT_TIMEOUT: u8 = 4;

#[derive(Parser)]
#[command(name = "wetetch", version, about = "No-wait wet-etch station scheduler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find a makespan-optimal schedule.
    Solve(SolveArgs),
    /// Check a schedule file against every rule.
    Check(CheckArgs),
    /// Count the full and range-restricted search spaces.
    Count(CountArgs),
    /// Write a seeded random instance.
    Gen(GenArgs),
    /// Compare solving with and without start windows.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Args)]
struct InstanceArgs {
    /// Instance file.
    instance: PathBuf,
    /// Input uses decimal times with one fractional digit; scale by ten.
    #[arg(long)]
    scale10: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InstanceArgs,
    /// Search the full grid [1, deadline] instead of the start windows.
    #[arg(long)]
    no_ranges: bool,
    /// Use the generate-and-test oracle.
    #[arg(long)]
    oracle: bool,
    /// Let the oracle enumerate more than the candidate guard.
    #[arg(long)]
    force: bool,
    /// Time limit in seconds.
    #[arg(long, value_name = "S")]
    time_limit: Option<f64>,
    #[arg(long, value_name = "N", default_value_t = 1)]
    workers: usize,
    #[arg(long, value_name = "C")]
    delay_cap: Option<Time>,
    #[arg(long, value_enum)]
    strict_ls: Option<Switch>,
    /// Windows from the inclusive prefix sum (compatibility mode).
    #[arg(long)]
    inclusive_prefix: bool,
    /// Print an ASCII Gantt chart to stderr.
    #[arg(long)]
    gantt: bool,
    /// Also write the best schedule in schedule-file format.
    #[arg(long, value_name = "FILE")]
    schedule_out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    input: InstanceArgs,
    /// Schedule file with `s <job> <bath> <start>` lines.
    schedule: PathBuf,
    #[arg(long, value_name = "C")]
    delay_cap: Option<Time>,
    #[arg(long, value_enum)]
    strict_ls: Option<Switch>,
}

#[derive(Args)]
struct CountArgs {
    /// Instance file; omit to count from --nb/--nj/--dd.
    instance: Option<PathBuf>,
    #[arg(long)]
    scale10: bool,
    #[arg(long)]
    inclusive_prefix: bool,
    /// Number of baths.
    #[arg(long, requires_all = ["nj", "dd"], conflicts_with = "instance")]
    nb: Option<usize>,
    /// Number of jobs.
    #[arg(long)]
    nj: Option<usize>,
    /// Deadline.
    #[arg(long)]
    dd: Option<u64>,
}

#[derive(Args)]
struct GenCommon {
    #[arg(long)]
    baths: usize,
    #[arg(long)]
    jobs: usize,
    /// Smallest duration (tenth-units).
    #[arg(long, default_value_t = 10)]
    low: Time,
    /// Largest duration (tenth-units).
    #[arg(long, default_value_t = 40)]
    high: Time,
    /// Added to the largest total processing time to form the deadline.
    #[arg(long, default_value_t = 10)]
    slack: Time,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GenCommon {
    fn spec(&self, seed: u64) -> gen::GenSpec {
        gen::GenSpec {
            num_baths: self.baths,
            num_jobs: self.jobs,
            duration_low: self.low,
            duration_high: self.high,
            slack: self.slack,
            seed,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    spec: GenCommon,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of instance files, solved in file-name order.
    #[arg(long, conflicts_with_all = ["baths", "jobs"])]
    corpus: Option<PathBuf>,
    #[arg(long)]
    scale10: bool,
    #[arg(long, requires = "jobs")]
    baths: Option<usize>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value_t = 10)]
    low: Time,
    #[arg(long, default_value_t = 40)]
    high: Time,
    #[arg(long, default_value_t = 10)]
    slack: Time,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of generated instances (seeds seed, seed+1, ...).
    #[arg(long, default_value_t = 1)]
    count: u64,
    /// Per-run time limit in seconds.
    #[arg(long, value_name = "S", default_value_t = 60.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

/// Error carrying the exit code it should produce.
struct Failure(u8, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(EXIT_INPUT, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn load(path: &Path, scale10: bool) -> Result<Instance, Failure> {
    let text = read(path)?;
    let parsed = if scale10 {
        instance::parse_raw_instance(&text)
    } else {
        instance::parse_instance(&text)
    };
    parsed.map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn seconds(s: f64) -> Result<Duration, Failure> {
    Duration::try_from_secs_f64(s)
        .ok()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| Failure(EXIT_INPUT, format!("time limit must be positive, got {s}")))
}

/// A closed stdout (e.g. piped into `head`) is not an error.
fn print_json(v: &serde_json::Value) {
    let text = serde_json::to_string_pretty(v).expect("serializable");
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn prefix_mode(inclusive: bool) -> PrefixMode {
    if inclusive {
        PrefixMode::Inclusive
    } else {
        PrefixMode::Exclusive
    }
}

fn cmd_solve(args: SolveArgs) -> Result<u8, Failure> {
    let inst = load(&args.input.instance, args.input.scale10)?;
    let opts = SolveOptions {
        use_ranges: !args.no_ranges,
        mode: if args.oracle {
            SearchMode::GenerateAndTest
        } else {
            SearchMode::BranchAndBound
        },
        time_limit: args.time_limit.map(seconds).transpose()?,
        workers: args.workers,
        delay_cap: args.delay_cap,
        strict_local_storage: args.strict_ls.map(|s| matches!(s, Switch::On)),
        prefix_mode: prefix_mode(args.inclusive_prefix),
        force: args.force,
        ..SolveOptions::default()
    };
    let report = solve(&inst, &opts)?;
    print_json(&io::solve_report_json(&report));
    if let Some(best) = &report.best {
        if args.gantt {
            eprint!("{}", gantt::render(&inst, best));
        }
        if let Some(path) = &args.schedule_out {
            fs::write(path, io::render_schedule(best))
                .map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display())))?;
        }
    }
    Ok(match report.status {
        Status::Optimal => 0,
        Status::FeasibleTimeout => EXIT_TIMEOUT,
        Status::Infeasible | Status::ExhaustedNoSolution | Status::Timeout => EXIT_NO_SOLUTION,
    })
}

fn cmd_check(args: CheckArgs) -> Result<u8, Failure> {
    let mut inst = load(&args.input.instance, args.input.scale10)?;
    if let Some(cap) = args.delay_cap {
        inst = inst.set_delay_cap(cap);
    }
    if let Some(s) = args.strict_ls {
        inst = inst.set_strict_local_storage(matches!(s, Switch::On));
    }
    let schedule = io::parse_schedule(&inst, &read(&args.schedule)?)?;
    let report = check_all(&inst, &schedule);
    print_json(&serde_json::to_value(&report)?);
    Ok(if report.feasible { 0 } else { EXIT_INFEASIBLE_SCHEDULE })
}

fn cmd_count(args: CountArgs) -> Result<u8, Failure> {
    match (&args.instance, args.nb, args.nj, args.dd) {
        (Some(path), ..) => {
            let inst = load(path, args.scale10)?;
            print_json(&io::count_json(&inst, prefix_mode(args.inclusive_prefix))?);
        }
        (None, Some(nb), Some(nj), Some(dd)) => {
            let full = count_full_combinations(nb, nj, dd);
            print_json(&json!({
                "full": full.to_string(),
                "full_sci": to_scientific(&full, 5),
            }));
        }
        _ => return Err(Failure(EXIT_INPUT, "give an instance file or --nb, --nj and --dd".into())),
    }
    Ok(0)
}

fn cmd_gen(args: GenArgs) -> Result<u8, Failure> {
    let inst = gen::generate(&args.spec.spec(args.spec.seed))?;
    match &args.output {
        Some(path) => fs::write(path, inst.to_string())
            .map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display())))?,
        None => print!("{inst}"),
    }
    Ok(0)
}

fn cmd_bench(args: BenchArgs) -> Result<u8, Failure> {
    let instances: Vec<Instance> = if let Some(dir) = &args.corpus {
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", dir.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        paths.sort();
        paths
            .iter()
            .map(|p| load(p, args.scale10))
            .collect::<Result<_, _>>()?
    } else if let (Some(baths), Some(jobs)) = (args.baths, args.jobs) {
        let common = GenCommon {
            baths,
            jobs,
            low: args.low,
            high: args.high,
            slack: args.slack,
            seed: args.seed,
        };
        (0..args.count)
            .map(|i| gen::generate(&common.spec(args.seed + i)))
            .collect::<Result<_, _>>()?
    } else {
        return Err(Failure(EXIT_INPUT, "give --corpus DIR or --baths/--jobs".into()));
    };
    let rows = bench::run(&instances, Some(seconds(args.time_limit)?), args.workers)?;
    let csv = bench::to_csv(&rows);
    match &args.csv {
        Some(path) => {
            fs::write(path, &csv).map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display())))?;
            print!("{}", bench::to_table(&rows));
        }
        None => {
            print!("{csv}");
            eprint!("{}", bench::to_table(&rows));
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Check(a) => cmd_check(a),
        Command::Count(a) => cmd_count(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
