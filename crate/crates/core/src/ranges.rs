//! Start-time ranges and search-space counting.
//!
//! For a job `j` with total processing `λ_j` and slack `χ_j = deadline − λ_j`,
//! every feasible start of bath `b` lies in `[ρ_{j,b} + 1, ρ_{j,b} + χ_j]`,
//! where `ρ_{j,b}` is the processing time the job spends before reaching `b`.
//! The window has width `χ_j` regardless of the bath.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Instance, Time};

/// Which baths are summed into the prefix `ρ_{j,b}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrefixMode {
    /// Baths strictly before `b`. Gives the true earliest start.
    #[default]
    Exclusive,
    /// Baths up to and including `b`. Reproduces the shifted windows of the
    /// original rule listing; not guaranteed to contain every feasible start.
    Inclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct JobSlack {
    pub job: usize,
    pub lambda: Time,
    pub chi: Time,
}

/// Inclusive start-time window of one operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StartRange {
    pub job: usize,
    pub bath: usize,
    pub lower: Time,
    pub upper: Time,
}

impl StartRange {
    pub fn width(&self) -> Time {
        self.upper - self.lower + 1
    }

    pub fn contains(&self, t: Time) -> bool {
        (self.lower..=self.upper).contains(&t)
    }
}

/// `λ_j`, the sum of the job's durations over all baths.
pub fn total_processing(inst: &Instance, job: usize) -> Result<Time> {
    inst.check_job(job)?;
    Time::try_from(inst.total_processing_unchecked(job))
        .map_err(|_| Error::Validation(format!("total processing of job {job} overflows")))
}

/// `χ_j = deadline − λ_j`, the delay job `j` can absorb.
pub fn max_delay(inst: &Instance, job: usize) -> Result<Time> {
    let lambda = total_processing(inst, job)?;
    if inst.deadline() <= lambda {
        return Err(Error::Infeasible {
            job,
            lambda: u64::from(lambda),
            deadline: inst.deadline(),
            needed: u64::from(lambda) + 1,
        });
    }
    Ok(inst.deadline() - lambda)
}

/// `ρ_{j,b}`: processing before bath `b` (exclusive prefix).
pub fn prefix_processing(inst: &Instance, job: usize, bath: usize) -> Result<Time> {
    prefix_processing_with(inst, job, bath, PrefixMode::Exclusive)
}

pub fn prefix_processing_with(
    inst: &Instance,
    job: usize,
    bath: usize,
    mode: PrefixMode,
) -> Result<Time> {
    inst.check_job(job)?;
    inst.check_bath(bath)?;
    let end = match mode {
        PrefixMode::Exclusive => bath - 1,
        PrefixMode::Inclusive => bath,
    };
    Ok(inst.durations()[job - 1][..end].iter().sum())
}

pub fn start_range(inst: &Instance, job: usize, bath: usize) -> Result<StartRange> {
    start_range_with(inst, job, bath, PrefixMode::Exclusive)
}

pub fn start_range_with(
    inst: &Instance,
    job: usize,
    bath: usize,
    mode: PrefixMode,
) -> Result<StartRange> {
    let chi = max_delay(inst, job)?;
    let rho = prefix_processing_with(inst, job, bath, mode)?;
    let upper = chi + rho;
    Ok(StartRange {
        job,
        bath,
        lower: upper - chi + 1,
        upper,
    })
}

pub fn job_slacks(inst: &Instance) -> Result<Vec<JobSlack>> {
    (1..=inst.num_jobs())
        .map(|job| {
            Ok(JobSlack {
                job,
                lambda: total_processing(inst, job)?,
                chi: max_delay(inst, job)?,
            })
        })
        .collect()
}

/// All windows, indexed `[job - 1][bath - 1]`.
pub fn all_ranges(inst: &Instance, mode: PrefixMode) -> Result<Vec<Vec<StartRange>>> {
    (1..=inst.num_jobs())
        .map(|j| {
            (1..=inst.num_baths())
                .map(|b| start_range_with(inst, j, b, mode))
                .collect()
        })
        .collect()
}

/// `deadline^(baths · jobs)`: size of the unrestricted start-time grid.
pub fn count_full_combinations(num_baths: usize, num_jobs: usize, deadline: u64) -> BigUint {
    num_traits::pow(BigUint::from(deadline), num_baths * num_jobs)
}

/// Product of window widths over every (job, bath) pair, i.e. `Π_j χ_j^m`.
pub fn count_range_combinations(inst: &Instance) -> Result<BigUint> {
    let mut product = BigUint::one();
    for job in 1..=inst.num_jobs() {
        let chi = BigUint::from(max_delay(inst, job)?);
        product *= num_traits::pow(chi, inst.num_baths());
    }
    Ok(product)
}

/// `100 × (1 − ranged / full)`, rounded to one decimal place.
pub fn reduction_percent(full: &BigUint, ranged: &BigUint) -> Result<f64> {
    if full.is_zero() || ranged.is_zero() {
        return Err(Error::Inconsistent("domain counts must be positive".into()));
    }
    if ranged > full {
        return Err(Error::Inconsistent(format!(
            "reduced count {ranged} exceeds full count {full}"
        )));
    }
    let shift = full.bits().saturating_sub(64);
    let f = (full >> shift).to_f64().unwrap_or(f64::INFINITY);
    let r = (ranged >> shift).to_f64().unwrap_or(0.0);
    let pct = 100.0 * (1.0 - r / f);
    Ok((pct * 10.0).round() / 10.0)
}

/// Renders a count as `d.dddde+N` with `significant` digits, rounding half up.
pub fn to_scientific(value: &BigUint, significant: usize) -> String {
    let significant = significant.max(1);
    let digits = value.to_str_radix(10);
    let mut exp = digits.len() - 1;
    let mut mantissa: Vec<u8> = digits.bytes().take(significant).map(|c| c - b'0').collect();
    mantissa.resize(significant, 0);
    if digits.len() > significant && digits.as_bytes()[significant] >= b'5' {
        let mut i = significant;
        loop {
            if i == 0 {
                mantissa.insert(0, 1);
                mantissa.truncate(significant);
                exp += 1;
                break;
            }
            i -= 1;
            if mantissa[i] == 9 {
                mantissa[i] = 0;
            } else {
                mantissa[i] += 1;
                break;
            }
        }
    }
    let mut out = String::with_capacity(significant + 8);
    out.push((b'0' + mantissa[0]) as char);
    if significant > 1 {
        out.push('.');
        out.extend(mantissa[1..].iter().map(|d| (b'0' + d) as char));
    }
    out.push_str(&format!("e+{exp}"));
    out
}

/// Full vs. range-restricted search-space sizes for an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainCount {
    pub full: BigUint,
    pub ranged: BigUint,
    pub reduction_percent: f64,
}

impl DomainCount {
    pub fn of(inst: &Instance) -> Result<DomainCount> {
        let full = count_full_combinations(
            inst.num_baths(),
            inst.num_jobs(),
            u64::from(inst.deadline()),
        );
        let ranged = count_range_combinations(inst)?;
        let reduction_percent = reduction_percent(&full, &ranged)?;
        Ok(DomainCount {
            full,
            ranged,
            reduction_percent,
        })
    }
}
