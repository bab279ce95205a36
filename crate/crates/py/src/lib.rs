//! Python bindings for the hybrid-platform scheduler.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hybrid_sched::allocate;
use hybrid_sched::bounds::{self, OracleCaps};
use hybrid_sched::genlab::{self, RandomDagConfig, ReductionParams};
use hybrid_sched::instance;
use hybrid_sched::lp;
use hybrid_sched::schedule;

fn err(e: hybrid_sched::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A scheduling instance: m CPUs, k GPUs, per-task times, precedence edges.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct Instance {
    inner: instance::Instance,
}

#[pymethods]
impl Instance {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Instance> {
        Ok(Instance {
            inner: instance::Instance::from_json_str(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.task_count()
    }

    #[getter]
    fn m(&self) -> u32 {
        self.inner.cpu_count()
    }

    #[getter]
    fn k(&self) -> u32 {
        self.inner.gpu_count()
    }

    fn edges(&self) -> Vec<(u32, u32)> {
        self.inner.edges().to_vec()
    }

    fn topological_order(&self) -> Vec<u32> {
        self.inner.topological_order()
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(n={}, m={}, k={})",
            self.inner.task_count(),
            self.inner.cpu_count(),
            self.inner.gpu_count()
        )
    }
}

/// A concrete schedule: per-task start time, pool and machine index.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct Schedule {
    inner: instance::Schedule,
}

#[pymethods]
impl Schedule {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Schedule> {
        Ok(Schedule {
            inner: instance::Schedule::from_json(text.as_bytes()).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn makespan(&self) -> f64 {
        self.inner.makespan()
    }

    fn start(&self, j: usize) -> f64 {
        self.inner.start(j)
    }

    fn pool(&self, j: usize) -> &'static str {
        self.inner.pool(j).name()
    }

    fn machine(&self, j: usize) -> u32 {
        self.inner.machine(j)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Full pipeline: LP relaxation, threshold rounding, list scheduling.
/// Returns (schedule, diagnostics dict).
#[pyfunction]
#[pyo3(signature = (inst, b=None))]
fn hlp_b<'py>(
    py: Python<'py>,
    inst: &Instance,
    b: Option<f64>,
) -> PyResult<(Schedule, Bound<'py, PyDict>)> {
    let (sched, d) = schedule::hlp_b(&inst.inner, b).map_err(err)?;
    let diag = PyDict::new(py);
    diag.set_item("lp_bound", d.lp_bound)?;
    diag.set_item("b", d.b.value())?;
    diag.set_item("w_cpu", d.w_cpu)?;
    diag.set_item("w_gpu", d.w_gpu)?;
    diag.set_item("critical_path", d.critical_path)?;
    diag.set_item("makespan", d.makespan)?;
    diag.set_item("ratio", d.ratio)?;
    Ok((Schedule { inner: sched }, diag))
}

/// LP relaxation only: (x, completion, objective).
#[pyfunction]
fn solve_relaxation(inst: &Instance) -> PyResult<(Vec<f64>, Vec<f64>, f64)> {
    let sol = lp::solve_relaxation(&inst.inner).map_err(err)?;
    Ok((sol.x, sol.completion, sol.objective))
}

/// Ratio-minimizing rounding parameter; infinity when m == k.
#[pyfunction]
fn optimal_b(m: u32, k: u32) -> PyResult<f64> {
    if k < 1 || m < k {
        return Err(PyValueError::new_err("need m >= k >= 1"));
    }
    Ok(allocate::optimal_b(m, k).value())
}

/// Worst-case approximation ratio of the pipeline for (m, k).
#[pyfunction]
fn theoretical_ratio(m: u32, k: u32) -> PyResult<f64> {
    if k < 1 || m < k {
        return Err(PyValueError::new_err("need m >= k >= 1"));
    }
    Ok(bounds::theoretical_ratio(m, k))
}

/// Exact optimal makespan by branch and bound; tiny instances only.
#[pyfunction]
#[pyo3(signature = (inst, max_tasks=10, max_machines=4))]
fn exact_makespan(inst: &Instance, max_tasks: usize, max_machines: u32) -> PyResult<f64> {
    bounds::exact_makespan(
        &inst.inner,
        OracleCaps {
            max_tasks,
            max_machines,
        },
    )
    .map_err(err)
}

/// Seeded random layered DAG benchmark instance.
#[pyfunction]
#[pyo3(signature = (tasks, layers, edge_prob, m, k, seed=0,
                    cpu_range=(1.0, 10.0), gpu_range=(1.0, 10.0)))]
#[allow(clippy::too_many_arguments)]
fn random_layered_dag(
    tasks: u32,
    layers: u32,
    edge_prob: f64,
    m: u32,
    k: u32,
    seed: u64,
    cpu_range: (f64, f64),
    gpu_range: (f64, f64),
) -> PyResult<Instance> {
    let cfg = RandomDagConfig {
        tasks,
        layers,
        edge_prob,
        cpu_range,
        gpu_range,
        m,
        k,
        seed,
    };
    Ok(Instance {
        inner: genlab::random_layered_dag(&cfg).map_err(err)?,
    })
}

/// Soundness-gap arithmetic of the hardness reduction.
#[pyfunction]
fn gap_report<'py>(
    py: Python<'py>,
    q: u32,
    classes: u32,
    n: u32,
    epsilon: f64,
    delta: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let params = ReductionParams::new(q, classes, n, epsilon, delta).map_err(err)?;
    let r = genlab::gap_report(&params);
    let d = PyDict::new(py);
    d.set_item("yes_upper", r.yes_upper)?;
    d.set_item("no_lower", r.no_lower)?;
    d.set_item("ma", r.ma)?;
    d.set_item("mb", r.mb)?;
    d.set_item("mc", r.mc)?;
    Ok(d)
}

/// Checks a schedule against an instance; returns (ok, violation strings).
#[pyfunction]
fn validate(inst: &Instance, sched: &Schedule) -> (bool, Vec<String>) {
    let report =
        instance::validate_schedule(&inst.inner, &sched.inner.allocation(), &sched.inner);
    let messages = report
        .violations
        .iter()
        .map(|v| format!("{:?} task {}: {}", v.kind, v.subject, v.detail))
        .collect();
    (report.ok, messages)
}

#[pymodule]
fn hybrid_sched_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Instance>()?;
    m.add_class::<Schedule>()?;
    m.add_function(wrap_pyfunction!(hlp_b, m)?)?;
    m.add_function(wrap_pyfunction!(solve_relaxation, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_b, m)?)?;
    m.add_function(wrap_pyfunction!(theoretical_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(exact_makespan, m)?)?;
    m.add_function(wrap_pyfunction!(random_layered_dag, m)?)?;
    m.add_function(wrap_pyfunction!(gap_report, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    Ok(())
}
