//! Problem data for an automated wet-etch station.
//!
//! Baths and jobs are numbered from 1. Time is an integer grid: every start
//! is `>= 1`, an operation occupies `[start, start + duration)` and must
//! finish no later than the deadline. Durations and deadlines are stored in
//! tenths of the raw unit once [`scale_durations`] has been applied.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid time in tenth-units.
pub type Time = u32;

/// Default cap on the delay between a water bath and the following chemical bath.
pub const DEFAULT_DELAY_CAP: Time = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BathKind {
    Chemical,
    Water,
}

impl BathKind {
    /// Odd baths are chemical, even baths are water.
    pub fn of(bath: usize) -> BathKind {
        if bath % 2 == 1 {
            BathKind::Chemical
        } else {
            BathKind::Water
        }
    }

    pub fn is_chemical(self) -> bool {
        self == BathKind::Chemical
    }

    fn tag(self) -> char {
        match self {
            BathKind::Chemical => 'C',
            BathKind::Water => 'W',
        }
    }
}

impl fmt::Display for BathKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    num_baths: usize,
    num_jobs: usize,
    /// `durations[j - 1][b - 1]`
    durations: Vec<Vec<Time>>,
    deadline: Time,
    delay_cap: Time,
    strict_local_storage: bool,
}

impl Instance {
    /// Builds and validates an instance with the default policy knobs.
    pub fn new(durations: Vec<Vec<Time>>, deadline: Time) -> Result<Instance> {
        Self::with_policies(durations, deadline, DEFAULT_DELAY_CAP, true)
    }

    pub fn with_policies(
        durations: Vec<Vec<Time>>,
        deadline: Time,
        delay_cap: Time,
        strict_local_storage: bool,
    ) -> Result<Instance> {
        let num_jobs = durations.len();
        if num_jobs == 0 {
            return Err(Error::Validation("at least one job is required".into()));
        }
        let num_baths = durations[0].len();
        if num_baths == 0 {
            return Err(Error::Validation("at least one bath is required".into()));
        }
        for (j, row) in durations.iter().enumerate() {
            if row.len() != num_baths {
                return Err(Error::Validation(format!(
                    "job {} has {} durations, expected {}",
                    j + 1,
                    row.len(),
                    num_baths
                )));
            }
            if let Some(b) = row.iter().position(|&t| t == 0) {
                return Err(Error::Validation(format!(
                    "duration of job {} in bath {} must be positive",
                    j + 1,
                    b + 1
                )));
            }
        }
        let inst = Instance {
            num_baths,
            num_jobs,
            durations,
            deadline,
            delay_cap,
            strict_local_storage,
        };
        for j in 1..=num_jobs {
            let lambda = inst.total_processing_unchecked(j);
            if u64::from(deadline) < lambda + 1 {
                return Err(Error::Infeasible {
                    job: j,
                    lambda,
                    deadline,
                    needed: lambda + 1,
                });
            }
        }
        Ok(inst)
    }

    pub fn num_baths(&self) -> usize {
        self.num_baths
    }

    pub fn num_jobs(&self) -> usize {
        self.num_jobs
    }

    pub fn deadline(&self) -> Time {
        self.deadline
    }

    pub fn delay_cap(&self) -> Time {
        self.delay_cap
    }

    pub fn strict_local_storage(&self) -> bool {
        self.strict_local_storage
    }

    /// Duration rows, indexed `[job - 1][bath - 1]`.
    pub fn durations(&self) -> &[Vec<Time>] {
        &self.durations
    }

    /// Returns a copy with a different delay cap.
    pub fn set_delay_cap(mut self, cap: Time) -> Instance {
        self.delay_cap = cap;
        self
    }

    /// Returns a copy with the local-storage policy switched on or off.
    pub fn set_strict_local_storage(mut self, strict: bool) -> Instance {
        self.strict_local_storage = strict;
        self
    }

    /// Duration of `job` in `bath`; both 1-based and assumed in range.
    #[inline]
    pub fn duration(&self, job: usize, bath: usize) -> Time {
        self.durations[job - 1][bath - 1]
    }

    pub fn check_job(&self, job: usize) -> Result<()> {
        if job == 0 || job > self.num_jobs {
            return Err(Error::IndexOutOfRange {
                kind: "job",
                index: job,
                max: self.num_jobs,
            });
        }
        Ok(())
    }

    pub fn check_bath(&self, bath: usize) -> Result<()> {
        if bath == 0 || bath > self.num_baths {
            return Err(Error::IndexOutOfRange {
                kind: "bath",
                index: bath,
                max: self.num_baths,
            });
        }
        Ok(())
    }

    pub fn bath_kind(&self, bath: usize) -> Result<BathKind> {
        self.check_bath(bath)?;
        Ok(BathKind::of(bath))
    }

    pub(crate) fn total_processing_unchecked(&self, job: usize) -> u64 {
        self.durations[job - 1].iter().map(|&t| u64::from(t)).sum()
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "baths {}", self.num_baths)?;
        writeln!(f, "jobs {}", self.num_jobs)?;
        writeln!(f, "deadline {}", self.deadline)?;
        for (j, row) in self.durations.iter().enumerate() {
            write!(f, "d {}:", j + 1)?;
            for t in row {
                write!(f, " {t}")?;
            }
            writeln!(f)?;
        }
        writeln!(f, "delay_cap {}", self.delay_cap)?;
        writeln!(
            f,
            "strict_ls {}",
            if self.strict_local_storage { "on" } else { "off" }
        )
    }
}

impl FromStr for Instance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Instance> {
        parse_instance(s)
    }
}

/// Parses an instance whose durations and deadline are already integers.
pub fn parse_instance(text: &str) -> Result<Instance> {
    parse_with(text, false)
}

/// Parses an instance with decimal durations and deadline (at most one
/// fractional digit) and scales them by ten on the way in.
pub fn parse_raw_instance(text: &str) -> Result<Instance> {
    parse_with(text, true)
}

struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Token<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn integer<T: FromStr>(&self, what: &str) -> Result<T> {
        self.text
            .parse()
            .map_err(|_| self.error(format!("expected integer {what}, found {:?}", self.text)))
    }

    fn time(&self, scaled: bool, what: &str) -> Result<Time> {
        if scaled {
            scale_value(self.text).map_err(|e| match e {
                Error::LossyScaling(_) => e,
                _ => self.error(format!("expected decimal {what}, found {:?}", self.text)),
            })
        } else {
            self.integer(what)
        }
    }
}

fn tokenize(line: &str, line_no: usize) -> Vec<Token<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in body.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &body[s..i],
                    line: line_no,
                    column: s + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &body[s..],
            line: line_no,
            column: s + 1,
        });
    }
    out
}

fn parse_with(text: &str, scaled: bool) -> Result<Instance> {
    let mut baths: Option<usize> = None;
    let mut jobs: Option<usize> = None;
    let mut deadline: Option<Time> = None;
    let mut delay_cap: Option<Time> = None;
    let mut strict: Option<bool> = None;
    let mut rows: Vec<(usize, Vec<Token<'_>>, Token<'_>)> = Vec::new();

    for (i, line) in text.lines().enumerate() {
        let mut tokens = tokenize(line, i + 1);
        if tokens.is_empty() {
            continue;
        }
        let key = tokens.remove(0);
        let single = |tokens: &[Token<'_>]| -> Result<()> {
            match tokens.len() {
                1 => Ok(()),
                0 => Err(key.error(format!("`{}` needs a value", key.text))),
                _ => Err(tokens[1].error("unexpected extra token")),
            }
        };
        let dup = |seen: bool| -> Result<()> {
            if seen {
                Err(key.error(format!("duplicate `{}` line", key.text)))
            } else {
                Ok(())
            }
        };
        match key.text {
            "baths" => {
                dup(baths.is_some())?;
                single(&tokens)?;
                baths = Some(tokens[0].integer("bath count")?);
            }
            "jobs" => {
                dup(jobs.is_some())?;
                single(&tokens)?;
                jobs = Some(tokens[0].integer("job count")?);
            }
            "deadline" => {
                dup(deadline.is_some())?;
                single(&tokens)?;
                deadline = Some(tokens[0].time(scaled, "deadline")?);
            }
            "delay_cap" => {
                dup(delay_cap.is_some())?;
                single(&tokens)?;
                delay_cap = Some(tokens[0].integer("delay cap")?);
            }
            "strict_ls" => {
                dup(strict.is_some())?;
                single(&tokens)?;
                strict = Some(match tokens[0].text {
                    "on" => true,
                    "off" => false,
                    other => {
                        return Err(tokens[0].error(format!("expected on|off, found {other:?}")))
                    }
                });
            }
            "d" => {
                let Some(label) = tokens.first() else {
                    return Err(key.error("duration line needs a job label"));
                };
                let Some(num) = label.text.strip_suffix(':') else {
                    return Err(label.error("job label must end with ':'"));
                };
                let job: usize = num
                    .parse()
                    .map_err(|_| label.error(format!("expected job number, found {num:?}")))?;
                let label = tokens.remove(0);
                rows.push((job, tokens, label));
            }
            other => return Err(key.error(format!("unknown directive {other:?}"))),
        }
    }

    let missing = |what: &str| Error::Validation(format!("missing `{what}` line"));
    let num_baths = baths.ok_or_else(|| missing("baths"))?;
    let num_jobs = jobs.ok_or_else(|| missing("jobs"))?;
    let deadline = deadline.ok_or_else(|| missing("deadline"))?;
    if num_baths == 0 || num_jobs == 0 {
        return Err(Error::Validation(
            "bath and job counts must be positive".into(),
        ));
    }

    let mut durations: Vec<Option<Vec<Time>>> = vec![None; num_jobs];
    for (job, values, label) in rows {
        if job == 0 || job > num_jobs {
            return Err(label.error(format!("job {job} outside 1..={num_jobs}")));
        }
        if values.len() != num_baths {
            let at = values.get(num_baths).unwrap_or(&label);
            return Err(at.error(format!(
                "job {job} lists {} durations, expected {num_baths}",
                values.len()
            )));
        }
        if durations[job - 1].is_some() {
            return Err(label.error(format!("duplicate durations for job {job}")));
        }
        let row = values
            .iter()
            .map(|t| t.time(scaled, "duration"))
            .collect::<Result<Vec<_>>>()?;
        durations[job - 1] = Some(row);
    }
    let durations = durations
        .into_iter()
        .enumerate()
        .map(|(j, r)| r.ok_or_else(|| Error::Validation(format!("missing durations for job {}", j + 1))))
        .collect::<Result<Vec<_>>>()?;

    Instance::with_policies(
        durations,
        deadline,
        delay_cap.unwrap_or(DEFAULT_DELAY_CAP),
        strict.unwrap_or(true),
    )
}

/// Multiplies a decimal with at most one fractional digit by ten.
pub fn scale_value(raw: &str) -> Result<Time> {
    let lossy = || Error::LossyScaling(raw.to_string());
    let (int, frac) = match raw.split_once('.') {
        Some((i, f)) => (i, f),
        None => (raw, ""),
    };
    if frac.len() > 1 {
        return Err(lossy());
    }
    let all_digits = |s: &str| s.bytes().all(|c| c.is_ascii_digit());
    if int.is_empty() && frac.is_empty() || !all_digits(int) || !all_digits(frac) {
        return Err(Error::Validation(format!("not a non-negative decimal: {raw:?}")));
    }
    let whole: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| lossy())? };
    let tenth: u64 = frac.bytes().next().map_or(0, |c| u64::from(c - b'0'));
    let v = whole
        .checked_mul(10)
        .and_then(|w| w.checked_add(tenth))
        .ok_or_else(lossy)?;
    Time::try_from(v).map_err(|_| lossy())
}

/// Scales a raw duration matrix and deadline into integer tenth-units.
pub fn scale_durations<S: AsRef<str>>(
    raw: &[Vec<S>],
    raw_deadline: &str,
) -> Result<(Vec<Vec<Time>>, Time)> {
    let matrix = raw
        .iter()
        .map(|row| row.iter().map(|v| scale_value(v.as_ref())).collect())
        .collect::<Result<Vec<Vec<Time>>>>()?;
    Ok((matrix, scale_value(raw_deadline)?))
}

/// Tenth-units back to the raw unit, for reporting only.
pub fn unscale(tenths: Time) -> f64 {
    f64::from(tenths) / 10.0
}

/// Renders tenth-units as a one-decimal string, e.g. `18 -> "1.8"`.
pub fn format_tenths(tenths: Time) -> String {
    format!("{}.{}", tenths / 10, tenths % 10)
}
