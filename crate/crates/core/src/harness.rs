//! Replicated workload execution and report comparison.
//!
//! Each query is run `replications` times after optional warm-up runs;
//! per-query mean and population standard deviation are reported along
//! with the workload total. Executors are pluggable: a dry-run executor
//! with a virtual clock for tests, and a subprocess executor that drives
//! any command-line SQL client.

use std::fmt::{self, Write as _};
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use wait_timeout::ChildExt;

use crate::emit::WorkloadStatement;
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::workload::QueryClass;

pub const DEFAULT_REPLICATIONS: usize = 10;
pub const DEFAULT_VARIABILITY_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub enum QueryStatus {
    Ok,
    Failed(String),
    Timeout,
}

impl QueryStatus {
    pub fn label(&self) -> &'static str {
        match self {
            QueryStatus::Ok => "OK",
            QueryStatus::Failed(_) => "FAILED",
            QueryStatus::Timeout => "TIMEOUT",
        }
    }
}

/// Outcome of one statement execution.
#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    pub elapsed_ms: f64,
    pub status: QueryStatus,
}

pub trait Executor {
    fn execute(&mut self, query_index: usize, replication: usize, sql: &str) -> Execution;

    /// Short description recorded in reports.
    fn describe(&self) -> String;
}

/// Latencies reported by the dry-run executor.
#[derive(Debug, Clone, PartialEq)]
pub enum LatencySchedule {
    Fixed(f64),
    /// Uniform in `[mean - jitter, mean + jitter]`, a pure function of the
    /// seed, query index and replication.
    Seeded { seed: u64, mean_ms: f64, jitter_ms: f64 },
}

impl LatencySchedule {
    pub fn latency(&self, query_index: usize, replication: usize) -> f64 {
        match *self {
            LatencySchedule::Fixed(ms) => ms,
            LatencySchedule::Seeded {
                seed,
                mean_ms,
                jitter_ms,
            } => {
                if jitter_ms == 0.0 {
                    return mean_ms;
                }
                let mut rng =
                    SeededRng::substream(seed, &format!("latency/{query_index}/{replication}"));
                (mean_ms - jitter_ms + 2.0 * jitter_ms * rng.unit()).max(0.0)
            }
        }
    }
}

/// Executor with a virtual clock: nothing is run, every statement "takes"
/// the scheduled latency.
#[derive(Debug, Clone)]
pub struct DryRunExecutor {
    schedule: LatencySchedule,
    pub calls: usize,
}

impl DryRunExecutor {
    pub fn new(schedule: LatencySchedule) -> Result<Self> {
        let bad = match &schedule {
            LatencySchedule::Fixed(ms) => !(ms.is_finite() && *ms >= 0.0),
            LatencySchedule::Seeded {
                mean_ms, jitter_ms, ..
            } => !(mean_ms.is_finite() && *mean_ms >= 0.0 && jitter_ms.is_finite() && *jitter_ms >= 0.0),
        };
        if bad {
            return Err(Error::Binding(format!(
                "dry-run latencies must be finite and non-negative: {schedule:?}"
            )));
        }
        Ok(Self { schedule, calls: 0 })
    }
}

impl Executor for DryRunExecutor {
    fn execute(&mut self, query_index: usize, replication: usize, _sql: &str) -> Execution {
        self.calls += 1;
        Execution {
            elapsed_ms: self.schedule.latency(query_index, replication),
            status: QueryStatus::Ok,
        }
    }

    fn describe(&self) -> String {
        format!("dry-run {:?}", self.schedule)
    }
}

/// Runs a command per statement. In the template, `{statement}` is replaced
/// by the SQL text and `{file}` by the path of a file holding it.
#[derive(Debug, Clone)]
pub struct SubprocessExecutor {
    template: Vec<String>,
    timeout: Duration,
    scratch: PathBuf,
}

impl SubprocessExecutor {
    pub fn new(template: &str, timeout: Duration) -> Result<Self> {
        let words = shell_words::split(template)
            .map_err(|e| Error::Binding(format!("cannot split command template: {e}")))?;
        if words.is_empty() {
            return Err(Error::Binding("command template is empty".into()));
        }
        if !words
            .iter()
            .any(|w| w.contains("{file}") || w.contains("{statement}"))
        {
            return Err(Error::Binding(
                "command template must contain {file} or {statement}".into(),
            ));
        }
        if timeout.is_zero() {
            return Err(Error::Binding("timeout must be positive".into()));
        }
        let scratch = std::env::temp_dir().join(format!("whbench-{}.sql", std::process::id()));
        Ok(Self {
            template: words,
            timeout,
            scratch,
        })
    }

    fn command(&self, sql: &str) -> Command {
        let file = self.scratch.to_string_lossy();
        let args: Vec<String> = self
            .template
            .iter()
            .map(|w| w.replace("{file}", &file).replace("{statement}", sql))
            .collect();
        let mut cmd = Command::new(&args[0]);
        cmd.args(&args[1..])
            .stdin(Stdio::null())
            .stdout(Stdio::null())
            .stderr(Stdio::piped());
        cmd
    }
}

impl Executor for SubprocessExecutor {
    fn execute(&mut self, _query_index: usize, _replication: usize, sql: &str) -> Execution {
        let failed = |msg: String, start: Instant| Execution {
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            status: QueryStatus::Failed(msg),
        };
        let start = Instant::now();
        if let Err(e) = fs::write(&self.scratch, format!("{sql};\n")) {
            return failed(format!("{}: {e}", self.scratch.display()), start);
        }
        let start = Instant::now();
        let mut child = match self.command(sql).spawn() {
            Ok(c) => c,
            Err(e) => return failed(format!("cannot start {}: {e}", self.template[0]), start),
        };
        match child.wait_timeout(self.timeout) {
            Ok(Some(status)) => {
                let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
                if status.success() {
                    Execution {
                        elapsed_ms,
                        status: QueryStatus::Ok,
                    }
                } else {
                    let mut stderr = String::new();
                    if let Some(mut s) = child.stderr.take() {
                        let _ = s.read_to_string(&mut stderr);
                    }
                    Execution {
                        elapsed_ms,
                        status: QueryStatus::Failed(format!("{status}: {}", stderr.trim())),
                    }
                }
            }
            Ok(None) => {
                let _ = child.kill();
                let _ = child.wait();
                Execution {
                    elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
                    status: QueryStatus::Timeout,
                }
            }
            Err(e) => failed(e.to_string(), start),
        }
    }

    fn describe(&self) -> String {
        format!(
            "subprocess `{}` timeout {} ms",
            shell_words::join(&self.template),
            self.timeout.as_millis()
        )
    }
}

impl Drop for SubprocessExecutor {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.scratch);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub replications: usize,
    pub warmup: usize,
    pub variability_threshold: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            replications: DEFAULT_REPLICATIONS,
            warmup: 0,
            variability_threshold: DEFAULT_VARIABILITY_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryReport {
    /// 1-based position in the workload.
    pub index: usize,
    pub class: QueryClass,
    pub times_ms: Vec<f64>,
    pub mean_ms: f64,
    pub stddev_ms: f64,
    pub status: QueryStatus,
    pub variable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub queries: Vec<QueryReport>,
    /// Sum over queries of each replication's time.
    pub replication_totals_ms: Vec<f64>,
    pub total_mean_ms: f64,
    pub total_stddev_ms: f64,
    pub options: RunOptions,
    pub environment: String,
}

/// Mean and population standard deviation.
pub fn mean_stddev(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn is_variable(mean: f64, stddev: f64, threshold: f64) -> bool {
    mean > 0.0 && stddev / mean > threshold
}

/// Runs every statement under the replicated protocol.
pub fn run_workload(
    statements: &[WorkloadStatement],
    executor: &mut dyn Executor,
    opts: &RunOptions,
    environment: &str,
) -> Result<RunReport> {
    if opts.replications == 0 {
        return Err(Error::Usage("at least one replication is required".into()));
    }
    if !(opts.variability_threshold.is_finite() && opts.variability_threshold >= 0.0) {
        return Err(Error::Usage("variability threshold must be non-negative".into()));
    }
    let mut queries = Vec::with_capacity(statements.len());
    let mut totals = vec![0.0; opts.replications];
    for stmt in statements {
        for w in 0..opts.warmup {
            executor.execute(stmt.index, usize::MAX - w, &stmt.sql);
        }
        let mut times = Vec::with_capacity(opts.replications);
        let mut status = QueryStatus::Ok;
        for r in 0..opts.replications {
            let exec = executor.execute(stmt.index, r, &stmt.sql);
            times.push(exec.elapsed_ms);
            totals[r] += exec.elapsed_ms;
            status = match (status, exec.status) {
                (QueryStatus::Ok, s) => s,
                (QueryStatus::Failed(m), _) => QueryStatus::Failed(m),
                (QueryStatus::Timeout, QueryStatus::Failed(m)) => QueryStatus::Failed(m),
                (QueryStatus::Timeout, _) => QueryStatus::Timeout,
            };
        }
        let (mean_ms, stddev_ms) = mean_stddev(&times);
        queries.push(QueryReport {
            index: stmt.index,
            class: stmt.class,
            times_ms: times,
            mean_ms,
            stddev_ms,
            status,
            variable: is_variable(mean_ms, stddev_ms, opts.variability_threshold),
        });
    }
    let (total_mean_ms, total_stddev_ms) = mean_stddev(&totals);
    Ok(RunReport {
        queries,
        replication_totals_ms: totals,
        total_mean_ms,
        total_stddev_ms,
        options: opts.clone(),
        environment: format!("{environment}; {}", executor.describe()),
    })
}

impl RunReport {
    pub fn variable_queries(&self) -> impl Iterator<Item = &QueryReport> {
        self.queries.iter().filter(|q| q.variable)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("query_index,class_tag,mean_ms,stddev_ms,status\n");
        for q in &self.queries {
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6},{}",
                q.index,
                q.class.tag(),
                q.mean_ms,
                q.stddev_ms,
                q.status.label()
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "environment: {}", self.environment);
        let _ = writeln!(
            out,
            "replications: {}  warm-up: {}  variability threshold: {}",
            self.options.replications, self.options.warmup, self.options.variability_threshold
        );
        let _ = writeln!(
            out,
            "{:>6}  {:<13} {:>12} {:>12}  {:<8} note",
            "query", "class", "mean_ms", "stddev_ms", "status"
        );
        for q in &self.queries {
            let mut note = String::new();
            if q.variable {
                note.push_str("VARIABLE");
            }
            if let QueryStatus::Failed(msg) = &q.status {
                if !note.is_empty() {
                    note.push(' ');
                }
                note.push_str(msg);
            }
            let _ = writeln!(
                out,
                "{:>6}  {:<13} {:>12.3} {:>12.3}  {:<8} {}",
                q.index,
                q.class.tag(),
                q.mean_ms,
                q.stddev_ms,
                q.status.label(),
                note
            );
        }
        let _ = writeln!(
            out,
            "{:>6}  {:<13} {:>12.3} {:>12.3}",
            "total", "", self.total_mean_ms, self.total_stddev_ms
        );
        out
    }

    /// Writes `report.csv` and `report.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let csv = dir.join("report.csv");
        fs::write(&csv, self.to_csv()).map_err(|e| Error::io(&csv, e))?;
        let txt = dir.join("report.txt");
        fs::write(&txt, self.to_text()).map_err(|e| Error::io(&txt, e))?;
        Ok((csv, txt))
    }

    pub fn summary(&self) -> ReportSummary {
        ReportSummary {
            rows: self
                .queries
                .iter()
                .map(|q| SummaryRow {
                    index: q.index,
                    class: q.class,
                    mean_ms: q.mean_ms,
                    status: q.status.label().to_string(),
                })
                .collect(),
            total_mean_ms: self.total_mean_ms,
        }
    }
}

/// The per-query means of a run, as stored in `report.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportSummary {
    pub rows: Vec<SummaryRow>,
    pub total_mean_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub index: usize,
    pub class: QueryClass,
    pub mean_ms: f64,
    pub status: String,
}

impl ReportSummary {
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| Error::Config {
                line,
                message: e.to_string(),
            })?;
            let field = |k: usize| {
                rec.get(k).ok_or_else(|| Error::Config {
                    line,
                    message: format!("expected 5 columns, found {}", rec.len()),
                })
            };
            let bad = |what: &str| Error::Config {
                line,
                message: format!("cannot parse {what}"),
            };
            rows.push(SummaryRow {
                index: field(0)?.parse().map_err(|_| bad("query_index"))?,
                class: field(1)?.parse().map_err(|_| bad("class_tag"))?,
                mean_ms: field(2)?.parse().map_err(|_| bad("mean_ms"))?,
                status: field(4)?.to_string(),
            });
        }
        let total_mean_ms = rows.iter().map(|r| r.mean_ms).sum();
        Ok(Self {
            rows,
            total_mean_ms,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    /// `None` for the workload total.
    pub index: Option<usize>,
    pub class: Option<QueryClass>,
    pub means_ms: Vec<f64>,
    /// Gain of each run over the first, in percent; `None` when the
    /// baseline time is zero.
    pub gains_pct: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub labels: Vec<String>,
    pub rows: Vec<ComparisonRow>,
}

/// `(a - b) / a` in percent.
pub fn gain_pct(baseline: f64, other: f64) -> Option<f64> {
    (baseline != 0.0).then(|| (baseline - other) / baseline * 100.0)
}

/// Compares runs of the same workload against the first one.
pub fn compare(labels: &[String], reports: &[ReportSummary]) -> Result<ComparisonTable> {
    if reports.len() < 2 {
        return Err(Error::Usage("compare needs at least two reports".into()));
    }
    if labels.len() != reports.len() {
        return Err(Error::Usage(format!(
            "{} labels for {} reports",
            labels.len(),
            reports.len()
        )));
    }
    let n = reports[0].rows.len();
    for (label, r) in labels.iter().zip(reports).skip(1) {
        if r.rows.len() != n {
            return Err(Error::Structural(format!(
                "{label} has {} queries but {} has {n}",
                r.rows.len(),
                labels[0]
            )));
        }
    }
    let row = |index, class, means: Vec<f64>| ComparisonRow {
        index,
        class,
        gains_pct: means.iter().map(|m| gain_pct(means[0], *m)).collect(),
        means_ms: means,
    };
    let mut rows = Vec::with_capacity(n + 1);
    for i in 0..n {
        let first = &reports[0].rows[i];
        for (label, r) in labels.iter().zip(reports).skip(1) {
            let other = &r.rows[i];
            if other.index != first.index || other.class != first.class {
                return Err(Error::Structural(format!(
                    "row {}: {label} has query {} [{}] where {} has {} [{}]",
                    i + 1,
                    other.index,
                    other.class,
                    labels[0],
                    first.index,
                    first.class
                )));
            }
        }
        rows.push(row(
            Some(first.index),
            Some(first.class),
            reports.iter().map(|r| r.rows[i].mean_ms).collect(),
        ));
    }
    rows.push(row(None, None, reports.iter().map(|r| r.total_mean_ms).collect()));
    Ok(ComparisonTable {
        labels: labels.to_vec(),
        rows,
    })
}

fn fmt_gain(g: Option<f64>) -> String {
    g.map_or_else(|| "n/a".into(), |g| format!("{g:.1}%"))
}

impl ComparisonTable {
    pub fn total(&self) -> &ComparisonRow {
        self.rows.last().expect("comparison has a total row")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("query_index,class_tag");
        for l in &self.labels {
            let _ = write!(out, ",{l}_mean_ms");
        }
        for l in self.labels.iter().skip(1) {
            let _ = write!(out, ",{l}_gain_pct");
        }
        out.push('\n');
        for r in &self.rows {
            match r.index {
                Some(i) => {
                    let _ = write!(out, "{i},{}", r.class.map_or("", QueryClass::tag));
                }
                None => out.push_str("total,"),
            }
            for m in &r.means_ms {
                let _ = write!(out, ",{m:.6}");
            }
            for g in r.gains_pct.iter().skip(1) {
                let _ = write!(out, ",{}", g.map_or(String::new(), |g| format!("{g:.4}")));
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for ComparisonTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:>6}  {:<13}", "query", "class")?;
        for l in &self.labels {
            write!(f, " {:>14}", format!("{l} ms"))?;
        }
        for l in self.labels.iter().skip(1) {
            write!(f, " {:>12}", format!("gain {l}"))?;
        }
        writeln!(f)?;
        for r in &self.rows {
            let idx = r.index.map_or_else(|| "total".to_string(), |i| i.to_string());
            write!(f, "{idx:>6}  {:<13}", r.class.map_or("", QueryClass::tag))?;
            for m in &r.means_ms {
                write!(f, " {m:>14.3}")?;
            }
            for g in r.gains_pct.iter().skip(1) {
                write!(f, " {:>12}", fmt_gain(*g))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Wall-clock harness overhead per statement, measured with a zero-latency
/// dry run.
pub fn measure_overhead(statements: &[WorkloadStatement], replications: usize) -> Result<Duration> {
    let mut exec = DryRunExecutor::new(LatencySchedule::Fixed(0.0))?;
    let opts = RunOptions {
        replications,
        ..RunOptions::default()
    };
    let start = Instant::now();
    run_workload(statements, &mut exec, &opts, "overhead self-test")?;
    let calls = (statements.len() * replications).max(1) as u32;
    Ok(start.elapsed() / calls)
}
