//! Python bindings: configuration, warehouse and workload generation,
//! artifact emission, the SQL subset parser and the dry-run harness.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use whbench_core::config::{BenchConfig, ConfigMap};
use whbench_core::emit::{self, Dialect};
use whbench_core::harness::{self, DryRunExecutor, LatencySchedule, ReportSummary, RunOptions};
use whbench_core::schema;
use whbench_core::{Error, SeededRng};

create_exception!(whbench, GuardError, PyValueError, "Generation refused by the row budget.");

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Io { .. } => PyOSError::new_err(err.to_string()),
        Error::Guard { .. } => GuardError::new_err(err.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Builds a configuration from optional `KEY = value` text plus keyword
/// overrides named like the keys (case-insensitive).
fn build_config(text: Option<&str>, overrides: Option<&Bound<'_, PyDict>>) -> PyResult<BenchConfig> {
    let mut map = ConfigMap::parse(text.unwrap_or("")).map_err(to_py)?;
    if let Some(kw) = overrides {
        for (k, v) in kw.iter() {
            let key = k.extract::<String>()?.to_ascii_uppercase();
            let value = if let Ok(b) = v.extract::<bool>() {
                b.to_string()
            } else if let Ok(list) = v.extract::<Vec<f64>>() {
                list.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
            } else {
                v.str()?.to_string()
            };
            map.set(&key, value).map_err(to_py)?;
        }
    }
    BenchConfig::from_map(&map).map_err(to_py)
}

/// A generated warehouse with its size assessment.
#[pyclass(module = "whbench")]
struct Warehouse {
    inner: whbench_core::Warehouse,
    size: whbench_core::SizeReport,
    config: BenchConfig,
}

#[pymethods]
impl Warehouse {
    /// `Warehouse(config=None, **params)`; `params` use configuration key
    /// names, e.g. `Warehouse(nb_q=20, avg_density=0.1, seed=7)`.
    #[new]
    #[pyo3(signature = (config=None, **params))]
    fn new(config: Option<&str>, params: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let config = build_config(config, params)?;
        let (inner, size) =
            schema::generate_warehouse(&config.source, config.seed, &config.options)
                .map_err(to_py)?;
        Ok(Self {
            inner,
            size,
            config,
        })
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.provenance.seed
    }

    #[getter]
    fn megabytes(&self) -> f64 {
        self.size.warehouse_megabytes
    }

    /// Table names in dependency order.
    fn table_names(&self) -> Vec<String> {
        self.inner.tables().iter().map(|t| t.name.clone()).collect()
    }

    fn fact_tables(&self) -> Vec<String> {
        self.inner.fact_tables.iter().map(|f| f.name().to_string()).collect()
    }

    /// `{table: (rows, bytes_per_row, bytes)}`
    fn size_report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new_bound(py);
        for t in &self.size.per_table {
            d.set_item(&t.table, (t.row_count, t.row_bytes, t.total_bytes))?;
        }
        Ok(d)
    }

    fn columns(&self, table: &str) -> PyResult<Vec<String>> {
        let t = self.table(table)?;
        Ok(t.intention.iter().map(|a| a.name.clone()).collect())
    }

    fn cardinality(&self, table: &str) -> PyResult<usize> {
        Ok(self.table(table)?.cardinality())
    }

    /// Tuples of `table` as lists of ints, strings and floats.
    fn rows(&self, py: Python<'_>, table: &str) -> PyResult<Vec<Vec<PyObject>>> {
        let t = self.table(table)?;
        Ok(t.extension
            .iter()
            .map(|tuple| {
                tuple
                    .values
                    .iter()
                    .map(|v| match v {
                        whbench_core::model::Value::Key(k) => k.into_py(py),
                        whbench_core::model::Value::Str(s) => s.into_py(py),
                        whbench_core::model::Value::Measure(m) => m.into_py(py),
                    })
                    .collect()
            })
            .collect())
    }

    #[pyo3(signature = (dialect="generic"))]
    fn ddl(&self, dialect: &str) -> PyResult<String> {
        let dialect: Dialect = dialect.parse().map_err(to_py)?;
        Ok(emit::emit_ddl(&self.inner, dialect))
    }

    fn integrity_violations(&self) -> Vec<String> {
        self.inner
            .check_referential_integrity()
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    /// Generates the workload configured for this warehouse; keyword
    /// arguments override workload keys.
    #[pyo3(signature = (**params))]
    fn workload(&self, params: Option<&Bound<'_, PyDict>>) -> PyResult<Workload> {
        let cfg = build_config(Some(&self.config.render()), params)?;
        let inner = whbench_core::generate_workload(
            &self.inner,
            &cfg.workload,
            &mut SeededRng::substream(self.inner.provenance.seed, "workload"),
        )
        .map_err(to_py)?;
        Ok(Workload { inner })
    }

    /// Writes every artifact into `out_dir` and returns the file list.
    fn emit(&self, out_dir: PathBuf, workload: &Workload) -> PyResult<Vec<String>> {
        emit::emit_all(&out_dir, &self.inner, &self.size, &workload.inner, &self.config)
            .map(|s| s.files)
            .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Warehouse(seed={}, tables={}, megabytes={:.3})",
            self.inner.provenance.seed,
            self.inner.tables().len(),
            self.size.warehouse_megabytes
        )
    }
}

impl Warehouse {
    fn table(&self, name: &str) -> PyResult<&whbench_core::model::Table> {
        self.inner
            .table(name)
            .ok_or_else(|| PyValueError::new_err(format!("no table named {name}")))
    }
}

#[pyclass(module = "whbench")]
struct Workload {
    inner: whbench_core::Workload,
}

#[pymethods]
impl Workload {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// SQL text of every query.
    fn statements(&self) -> PyResult<Vec<String>> {
        self.inner
            .queries
            .iter()
            .map(|q| whbench_core::render_sql(q).map_err(to_py))
            .collect()
    }

    fn classes(&self) -> Vec<&'static str> {
        self.inner.classes.iter().map(|c| c.tag()).collect()
    }

    /// The workload file contents.
    fn to_sql(&self) -> PyResult<String> {
        emit::render_workload_sql(&self.inner).map_err(to_py)
    }
}

/// Parses and checks one statement; returns its canonical rendering.
#[pyfunction]
fn parse_check(sql: &str) -> PyResult<String> {
    let q = whbench_core::parse_check(sql).map_err(|e| PyValueError::new_err(e.to_string()))?;
    whbench_core::render_sql(&q).map_err(to_py)
}

/// Low-level parameters derived from a high-level configuration, in
/// configuration syntax.
#[pyfunction]
#[pyo3(signature = (config=None, **params))]
fn resolve_params(config: Option<&str>, params: Option<&Bound<'_, PyDict>>) -> PyResult<String> {
    let cfg = build_config(config, params)?;
    let low = schema::resolve_params(&cfg.source, cfg.seed).map_err(to_py)?;
    Ok(whbench_core::config::low_level_entries(&low)
        .into_iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect())
}

/// Times a workload file with the dry-run executor and returns the
/// `report.csv` text.
#[pyfunction]
#[pyo3(signature = (workload_sql, latency_ms=1.0, jitter_ms=0.0, seed=0, replications=10, warmup=0))]
fn dry_run(
    workload_sql: &str,
    latency_ms: f64,
    jitter_ms: f64,
    seed: u64,
    replications: usize,
    warmup: usize,
) -> PyResult<String> {
    let statements = emit::parse_workload_sql(workload_sql).map_err(to_py)?;
    let schedule = if jitter_ms > 0.0 {
        LatencySchedule::Seeded {
            seed,
            mean_ms: latency_ms,
            jitter_ms,
        }
    } else {
        LatencySchedule::Fixed(latency_ms)
    };
    let mut exec = DryRunExecutor::new(schedule).map_err(to_py)?;
    let opts = RunOptions {
        replications,
        warmup,
        ..RunOptions::default()
    };
    let report = harness::run_workload(&statements, &mut exec, &opts, "python").map_err(to_py)?;
    Ok(report.to_csv())
}

/// Compares `report.csv` texts against the first; returns the comparison
/// CSV.
#[pyfunction]
fn compare(labels: Vec<String>, reports: Vec<String>) -> PyResult<String> {
    let summaries = reports
        .iter()
        .map(|r| ReportSummary::parse_csv(r))
        .collect::<Result<Vec<_>, _>>()
        .map_err(to_py)?;
    harness::compare(&labels, &summaries)
        .map(|t| t.to_csv())
        .map_err(to_py)
}

#[pymodule]
fn whbench(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Warehouse>()?;
    m.add_class::<Workload>()?;
    m.add_function(wrap_pyfunction!(parse_check, m)?)?;
    m.add_function(wrap_pyfunction!(resolve_params, m)?)?;
    m.add_function(wrap_pyfunction!(dry_run, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add("GuardError", m.py().get_type_bound::<GuardError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
