use std::time::Duration;

use num_bigint::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use wetetch_core::io::{gantt, gen};
use wetetch_core::ranges::{self, PrefixMode};
use wetetch_core::schedule::{self, check_all};
use wetetch_core::solver::{self, SearchMode, SolveOptions, SolveReport};
use wetetch_core::{instance, Error, Instance, Schedule, Time};

fn value_error(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn prefix(inclusive: bool) -> PrefixMode {
    if inclusive {
        PrefixMode::Inclusive
    } else {
        PrefixMode::Exclusive
    }
}

/// A wet-etch instance: durations[job][bath] in tenth-units and a deadline.
#[pyclass(name = "Instance", module = "wetetch", frozen)]
struct PyInstance {
    inner: Instance,
}

#[pymethods]
impl PyInstance {
    #[new]
    #[pyo3(signature = (durations, deadline, delay_cap = 2, strict_local_storage = true))]
    fn new(
        durations: Vec<Vec<Time>>,
        deadline: Time,
        delay_cap: Time,
        strict_local_storage: bool,
    ) -> PyResult<Self> {
        Instance::with_policies(durations, deadline, delay_cap, strict_local_storage)
            .map(|inner| PyInstance { inner })
            .map_err(value_error)
    }

    /// Parses the instance text format. With `scale10` times are decimals
    /// with one fractional digit and are multiplied by ten.
    #[staticmethod]
    #[pyo3(signature = (text, scale10 = false))]
    fn parse(text: &str, scale10: bool) -> PyResult<Self> {
        let parsed = if scale10 {
            instance::parse_raw_instance(text)
        } else {
            instance::parse_instance(text)
        };
        parsed.map(|inner| PyInstance { inner }).map_err(value_error)
    }

    #[getter]
    fn num_baths(&self) -> usize {
        self.inner.num_baths()
    }

    #[getter]
    fn num_jobs(&self) -> usize {
        self.inner.num_jobs()
    }

    #[getter]
    fn deadline(&self) -> Time {
        self.inner.deadline()
    }

    #[getter]
    fn delay_cap(&self) -> Time {
        self.inner.delay_cap()
    }

    #[getter]
    fn strict_local_storage(&self) -> bool {
        self.inner.strict_local_storage()
    }

    #[getter]
    fn durations(&self) -> Vec<Vec<Time>> {
        self.inner.durations().to_vec()
    }

    /// "chemical" for odd baths, "water" for even ones.
    fn bath_kind(&self, bath: usize) -> PyResult<&'static str> {
        Ok(match self.inner.bath_kind(bath).map_err(value_error)? {
            wetetch_core::BathKind::Chemical => "chemical",
            wetetch_core::BathKind::Water => "water",
        })
    }

    fn total_processing(&self, job: usize) -> PyResult<Time> {
        ranges::total_processing(&self.inner, job).map_err(value_error)
    }

    fn max_delay(&self, job: usize) -> PyResult<Time> {
        ranges::max_delay(&self.inner, job).map_err(value_error)
    }

    #[pyo3(signature = (job, bath, inclusive = false))]
    fn prefix_processing(&self, job: usize, bath: usize, inclusive: bool) -> PyResult<Time> {
        ranges::prefix_processing_with(&self.inner, job, bath, prefix(inclusive)).map_err(value_error)
    }

    /// Inclusive `(lower, upper)` start window of `job` in `bath`.
    #[pyo3(signature = (job, bath, inclusive = false))]
    fn start_range(&self, job: usize, bath: usize, inclusive: bool) -> PyResult<(Time, Time)> {
        let r = ranges::start_range_with(&self.inner, job, bath, prefix(inclusive)).map_err(value_error)?;
        Ok((r.lower, r.upper))
    }

    /// `(full, ranged, reduction_percent)` search-space sizes.
    fn domain_counts(&self) -> PyResult<(BigUint, BigUint, f64)> {
        let c = ranges::DomainCount::of(&self.inner).map_err(value_error)?;
        Ok((c.full, c.ranged, c.reduction_percent))
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(baths={}, jobs={}, deadline={})",
            self.inner.num_baths(),
            self.inner.num_jobs(),
            self.inner.deadline()
        )
    }
}

fn schedule_from(inst: &Instance, starts: &[Vec<Time>]) -> PyResult<Schedule> {
    Schedule::from_rows(inst, starts).map_err(value_error)
}

#[pyclass(name = "SolveReport", module = "wetetch", frozen)]
struct PySolveReport {
    inner: SolveReport,
}

#[pymethods]
impl PySolveReport {
    #[getter]
    fn status(&self) -> &'static str {
        self.inner.status.name()
    }

    #[getter]
    fn makespan(&self) -> Option<Time> {
        self.inner.makespan
    }

    #[getter]
    fn max_finish(&self) -> Option<Time> {
        self.inner.max_finish
    }

    /// Best start times as rows `[job][bath]`, or `None`.
    #[getter]
    fn starts(&self) -> Option<Vec<Vec<Time>>> {
        self.inner.best.as_ref().map(Schedule::rows)
    }

    #[getter]
    fn nodes_explored(&self) -> u64 {
        self.inner.nodes_explored
    }

    #[getter]
    fn candidates_tested(&self) -> u64 {
        self.inner.candidates_tested
    }

    #[getter]
    fn domain_full(&self) -> BigUint {
        self.inner.domain_counts.full.clone()
    }

    #[getter]
    fn domain_ranged(&self) -> BigUint {
        self.inner.domain_counts.ranged.clone()
    }

    #[getter]
    fn reduction_percent(&self) -> f64 {
        self.inner.domain_counts.reduction_percent
    }

    #[getter]
    fn wall_time(&self) -> f64 {
        self.inner.wall_time.as_secs_f64()
    }

    fn __repr__(&self) -> String {
        format!(
            "SolveReport(status={:?}, makespan={:?})",
            self.inner.status.name(),
            self.inner.makespan
        )
    }
}

#[allow(clippy::too_many_arguments)]
#[pyfunction]
#[pyo3(signature = (
    instance,
    use_ranges = true,
    oracle = false,
    workers = 1,
    time_limit = None,
    delay_cap = None,
    strict_local_storage = None,
    inclusive_prefix = false,
    force = false,
))]
fn solve(
    py: Python<'_>,
    instance: &PyInstance,
    use_ranges: bool,
    oracle: bool,
    workers: usize,
    time_limit: Option<f64>,
    delay_cap: Option<Time>,
    strict_local_storage: Option<bool>,
    inclusive_prefix: bool,
    force: bool,
) -> PyResult<PySolveReport> {
    let time_limit = time_limit
        .map(|s| Duration::try_from_secs_f64(s).map_err(|e| PyValueError::new_err(e.to_string())))
        .transpose()?;
    let opts = SolveOptions {
        use_ranges,
        mode: if oracle {
            SearchMode::GenerateAndTest
        } else {
            SearchMode::BranchAndBound
        },
        time_limit,
        workers,
        delay_cap,
        strict_local_storage,
        prefix_mode: prefix(inclusive_prefix),
        force,
        ..SolveOptions::default()
    };
    let inst = &instance.inner;
    let report = py
        .detach(|| solver::solve(inst, &opts))
        .map_err(value_error)?;
    Ok(PySolveReport { inner: report })
}

/// Checks a schedule given as rows `[job][bath]` of start times.
#[pyfunction]
fn check<'py>(py: Python<'py>, instance: &PyInstance, starts: Vec<Vec<Time>>) -> PyResult<Bound<'py, PyDict>> {
    let s = schedule_from(&instance.inner, &starts)?;
    let report = check_all(&instance.inner, &s);
    let out = PyDict::new(py);
    out.set_item("feasible", report.feasible)?;
    let violations = report
        .violations
        .iter()
        .map(|v| {
            let d = PyDict::new(py);
            d.set_item("rule", v.rule.name())?;
            d.set_item("jobs", v.jobs.clone())?;
            d.set_item("baths", v.baths.clone())?;
            d.set_item("times", v.times.clone())?;
            Ok(d)
        })
        .collect::<PyResult<Vec<_>>>()?;
    out.set_item("violations", violations)?;
    Ok(out)
}

#[pyfunction]
fn makespan(instance: &PyInstance, starts: Vec<Vec<Time>>) -> PyResult<Time> {
    let s = schedule_from(&instance.inner, &starts)?;
    Ok(schedule::makespan(&instance.inner, &s))
}

#[pyfunction]
fn gantt_chart(instance: &PyInstance, starts: Vec<Vec<Time>>) -> PyResult<String> {
    let s = schedule_from(&instance.inner, &starts)?;
    Ok(gantt::render(&instance.inner, &s))
}

/// `deadline ** (baths * jobs)` as an exact Python int.
#[pyfunction]
fn count_full_combinations(num_baths: usize, num_jobs: usize, deadline: u64) -> BigUint {
    ranges::count_full_combinations(num_baths, num_jobs, deadline)
}

#[pyfunction]
#[pyo3(signature = (value, significant = 5))]
fn to_scientific(value: BigUint, significant: usize) -> String {
    ranges::to_scientific(&value, significant)
}

#[pyfunction]
fn reduction_percent(full: BigUint, ranged: BigUint) -> PyResult<f64> {
    ranges::reduction_percent(&full, &ranged).map_err(value_error)
}

#[pyfunction]
fn scale_value(raw: &str) -> PyResult<Time> {
    instance::scale_value(raw).map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (num_baths, num_jobs, low, high, slack, seed = 0))]
fn generate(
    num_baths: usize,
    num_jobs: usize,
    low: Time,
    high: Time,
    slack: Time,
    seed: u64,
) -> PyResult<PyInstance> {
    gen::generate(&gen::GenSpec {
        num_baths,
        num_jobs,
        duration_low: low,
        duration_high: high,
        slack,
        seed,
    })
    .map(|inner| PyInstance { inner })
    .map_err(value_error)
}

#[pymodule]
fn wetetch(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PySolveReport>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(makespan, m)?)?;
    m.add_function(wrap_pyfunction!(gantt_chart, m)?)?;
    m.add_function(wrap_pyfunction!(count_full_combinations, m)?)?;
    m.add_function(wrap_pyfunction!(to_scientific, m)?)?;
    m.add_function(wrap_pyfunction!(reduction_percent, m)?)?;
    m.add_function(wrap_pyfunction!(scale_value, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    Ok(())
}
