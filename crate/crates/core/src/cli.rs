//! The `whbench` command-line tool.
//!
//! Every configuration key is also a flag: `AVG_NB_DIM` becomes
//! `--avg-nb-dim`. Flags override the configuration file, which overrides
//! the defaults.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Arg, ArgAction, ArgMatches, Args, Command, FromArgMatches, Parser, Subcommand};

use crate::config::{self, BenchConfig, ConfigMap};
use crate::emit::{self, WORKLOAD_FILE};
use crate::error::{Error, Result};
use crate::harness::{
    self, DryRunExecutor, Executor, LatencySchedule, ReportSummary, RunOptions,
    SubprocessExecutor,
};
use crate::rng::SeededRng;
use crate::schema::{self, fact_table_name, ParamSource};
use crate::workload::generate_workload;

#[derive(Debug, Parser)]
#[command(name = "whbench", version, about = "Synthetic data warehouse benchmark")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Generate a warehouse and workload and write all artifacts.
    Generate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[command(flatten)]
        params: ParamFlags,
    },
    /// Check a configuration (and optionally a manifest's checksums).
    Validate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory holding a manifest whose checksums are verified.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[command(flatten)]
        params: ParamFlags,
    },
    /// Run a workload under the replicated timing protocol.
    Run {
        /// Defaults to `<out>/workload.sql`.
        #[arg(long)]
        workload: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "dry-run")]
        binding: BindingKind,
        /// Client command; `{file}` and `{statement}` are substituted.
        #[arg(long)]
        command: Option<String>,
        #[arg(long, default_value_t = 600_000)]
        timeout_ms: u64,
        #[arg(long, default_value_t = harness::DEFAULT_REPLICATIONS)]
        replications: usize,
        #[arg(long, default_value_t = 0)]
        warmup: usize,
        #[arg(long, default_value_t = harness::DEFAULT_VARIABILITY_THRESHOLD)]
        variability_threshold: f64,
        /// Dry run: fixed or mean latency.
        #[arg(long, default_value_t = 1.0)]
        latency_ms: f64,
        /// Dry run: jitter around the mean, drawn from `--latency-seed`.
        #[arg(long, default_value_t = 0.0)]
        jitter_ms: f64,
        #[arg(long, default_value_t = 0)]
        latency_seed: u64,
        /// Free text recorded in the report (engine, hardware, ...).
        #[arg(long, default_value = "")]
        note: String,
    },
    /// Compare two or more `report.csv` files against the first.
    Compare {
        #[arg(required = true, num_args = 2..)]
        reports: Vec<PathBuf>,
        /// Comma-separated labels, one per report.
        #[arg(long, value_delimiter = ',')]
        labels: Vec<String>,
        /// Also write comparison.csv and comparison.txt here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BindingKind {
    DryRun,
    Subprocess,
}

/// Overrides collected from per-key flags, in `KEY = value` form.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamFlags {
    pub sets: Vec<(&'static str, String)>,
}

fn flag_id(key: &str) -> String {
    key.to_ascii_lowercase()
}

fn flag_long(key: &str) -> String {
    key.to_ascii_lowercase().replace('_', "-")
}

fn flag_help(key: &str) -> &'static str {
    match key {
        "AVG_NB_FT" => "average number of fact tables",
        "AVG_NB_DIM" => "average number of dimensions per fact table",
        "AVG_TOT_NB_DIM" => "average total number of dimensions",
        "AVG_NB_MEAS" => "average number of measures per fact table",
        "AVG_DENSITY" => "average fact table density",
        "AVG_NB_LEVELS" => "average number of hierarchy levels",
        "AVG_NB_ATT" => "average number of descriptors per level",
        "AVG_HHLEVEL_SIZE" => "average cardinality of the coarsest level",
        "DIM_SFACTOR" => "scale factor between levels (average, or per-dimension list)",
        "SPREAD" => "relative spread of the parameter gaussians",
        "NB_FT" => "number of fact tables",
        "NB_DIM" => "dimensions per fact table (list)",
        "TOT_NB_DIM" => "total number of dimensions",
        "NB_MEAS" => "measures per fact table (list)",
        "DENSITY" => "density per fact table (list)",
        "NB_LEVELS" => "levels per dimension (list)",
        "NB_ATT" => "descriptors per level, dimensions separated by ';'",
        "HHLEVEL_SIZE" => "coarsest level cardinality per dimension (list)",
        "FT_DIMS" => "dimensions of each fact table, fact tables separated by ';'",
        "NB_Q" => "minimum number of queries",
        "WL_AVG_NB_ATT" => "average number of attributes per query",
        "AVG_NB_RESTR" => "average number of restrictions per query",
        "PROB_OLAP" => "probability of an OLAP query",
        "AVG_NB_AGGREG" => "average number of aggregates per OLAP query",
        "PROB_CUBE" => "probability of CUBE over ROLLUP",
        "PROB_HAVING" => "probability of a HAVING clause",
        "AVG_NB_DD" => "average number of drill-downs per OLAP query",
        "WL_SPREAD" => "relative spread of the workload gaussians",
        "SEED" => "master seed, decimal or 0x-prefixed hex",
        "REFERENTIAL_SIZE" => "number of strings in the descriptor referential",
        "MAX_ROWS" => "refuse to generate tables larger than this",
        "STREAMING_THRESHOLD" => "largest key space drawn combination by combination",
        "MEASURE_MIN" => "lower bound of measure values",
        "MEASURE_MAX" => "upper bound (exclusive) of measure values",
        "EMIT_INSERTS" => "also write an INSERT script",
        "DIALECT" => "DDL dialect: generic or oracle",
        _ => "",
    }
}

impl FromArgMatches for ParamFlags {
    fn from_arg_matches(m: &ArgMatches) -> std::result::Result<Self, clap::Error> {
        let mut flags = ParamFlags::default();
        flags.update_from_arg_matches(m)?;
        Ok(flags)
    }

    fn update_from_arg_matches(&mut self, m: &ArgMatches) -> std::result::Result<(), clap::Error> {
        for key in config::all_keys() {
            let id = flag_id(key);
            if key == "EMIT_INSERTS" {
                if m.get_flag(&id) {
                    self.sets.push((key, "true".into()));
                }
            } else if let Some(v) = m.get_one::<String>(&id) {
                self.sets.push((key, v.clone()));
            }
        }
        Ok(())
    }
}

impl Args for ParamFlags {
    fn augment_args(mut cmd: Command) -> Command {
        for key in config::all_keys() {
            let mut arg = Arg::new(flag_id(key))
                .long(flag_long(key))
                .help(flag_help(key))
                .help_heading("Parameters");
            arg = if key == "EMIT_INSERTS" {
                arg.action(ArgAction::SetTrue)
            } else {
                arg.value_name("VALUE").allow_hyphen_values(true)
            };
            cmd = cmd.arg(arg);
        }
        cmd
    }

    fn augment_args_for_update(cmd: Command) -> Command {
        Self::augment_args(cmd)
    }
}

/// Defaults, then the file, then the flags.
pub fn load_config(file: Option<&Path>, flags: &ParamFlags) -> Result<BenchConfig> {
    let mut map = match file {
        Some(p) => ConfigMap::load(p)?,
        None => ConfigMap::default(),
    };
    for (k, v) in &flags.sets {
        map.set(k, v.clone())?;
    }
    BenchConfig::from_map(&map)
}

/// Validates every parameter of `cfg` and resolves the low-level set.
fn resolve(cfg: &BenchConfig) -> Result<crate::params::LowLevelParams> {
    let mut report = cfg.workload.validate();
    if let ParamSource::High(h) = &cfg.source {
        report.merge(h.validate());
    }
    report.into_result()?;
    // low-level sets are checked once their fact tables have dimensions
    schema::resolve_params(&cfg.source, cfg.seed)
}

fn print_expected(out: &mut dyn Write, low: &crate::params::LowLevelParams) -> Result<()> {
    for f in 0..low.nb_ft {
        writeln!(
            out,
            "{}: {} dimension(s), {:.0} candidate combinations, expected {:.0} rows",
            fact_table_name(f + 1),
            low.fact_dimensions.get(f).map_or(0, Vec::len),
            low.fact_product(f),
            low.expected_fact_rows(f)
        )
        .map_err(stdout_err)?;
    }
    Ok(())
}

fn stdout_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Cmd::Generate {
            config,
            out: dir,
            params,
        } => {
            let cfg = load_config(config.as_deref(), &params)?;
            let low = resolve(&cfg)?;
            print_expected(out, &low)?;
            schema::check_row_budget(&low, &cfg.options)?;
            let (wh, size) =
                schema::generate_warehouse(&ParamSource::Low(low), cfg.seed, &cfg.options)?;
            let workload = generate_workload(
                &wh,
                &cfg.workload,
                &mut SeededRng::substream(cfg.seed, "workload"),
            )?;
            let summary = emit::emit_all(&dir, &wh, &size, &workload, &cfg)?;
            for t in &size.per_table {
                writeln!(
                    out,
                    "{:<12} {:>10} rows {:>6} B/row {:>12} B",
                    t.table, t.row_count, t.row_bytes, t.total_bytes
                )
                .map_err(stdout_err)?;
            }
            writeln!(
                out,
                "warehouse: {:.3} MB; workload: {} queries; {} files written to {}",
                size.warehouse_megabytes,
                workload.len(),
                summary.files.len(),
                dir.display()
            )
            .map_err(stdout_err)?;
        }
        Cmd::Validate {
            config,
            manifest,
            params,
        } => {
            let cfg = load_config(config.as_deref(), &params)?;
            let low = resolve(&cfg)?;
            print_expected(out, &low)?;
            schema::check_row_budget(&low, &cfg.options)?;
            if let Some(dir) = manifest {
                let bad = emit::verify_checksums(&dir)?;
                if !bad.is_empty() {
                    return Err(Error::Structural(format!(
                        "checksum mismatch: {}",
                        bad.join(", ")
                    )));
                }
                writeln!(out, "checksums match").map_err(stdout_err)?;
            }
            writeln!(out, "configuration is valid").map_err(stdout_err)?;
        }
        Cmd::Run {
            workload,
            out: dir,
            binding,
            command,
            timeout_ms,
            replications,
            warmup,
            variability_threshold,
            latency_ms,
            jitter_ms,
            latency_seed,
            note,
        } => {
            let path = workload.unwrap_or_else(|| dir.join(WORKLOAD_FILE));
            let statements = emit::read_workload_sql(&path)?;
            let mut exec: Box<dyn Executor> = match binding {
                BindingKind::DryRun => {
                    let schedule = if jitter_ms > 0.0 {
                        LatencySchedule::Seeded {
                            seed: latency_seed,
                            mean_ms: latency_ms,
                            jitter_ms,
                        }
                    } else {
                        LatencySchedule::Fixed(latency_ms)
                    };
                    Box::new(DryRunExecutor::new(schedule)?)
                }
                BindingKind::Subprocess => {
                    let template = command.ok_or_else(|| {
                        Error::Binding("--command is required with --binding subprocess".into())
                    })?;
                    Box::new(SubprocessExecutor::new(
                        &template,
                        Duration::from_millis(timeout_ms),
                    )?)
                }
            };
            let opts = RunOptions {
                replications,
                warmup,
                variability_threshold,
            };
            let env = format!("workload {}{}{note}", path.display(), if note.is_empty() { "" } else { "; " });
            let report = harness::run_workload(&statements, exec.as_mut(), &opts, &env)?;
            report.write(&dir)?;
            write!(out, "{}", report.to_text()).map_err(stdout_err)?;
        }
        Cmd::Compare {
            reports,
            labels,
            out: dir,
        } => {
            let labels = if labels.is_empty() {
                reports.iter().map(|p| p.display().to_string()).collect()
            } else {
                labels
            };
            let summaries = reports
                .iter()
                .map(|p| ReportSummary::load(p))
                .collect::<Result<Vec<_>>>()?;
            let table = harness::compare(&labels, &summaries)?;
            if let Some(dir) = dir {
                std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
                let csv = dir.join("comparison.csv");
                std::fs::write(&csv, table.to_csv()).map_err(|e| Error::io(&csv, e))?;
                let txt = dir.join("comparison.txt");
                std::fs::write(&txt, table.to_string()).map_err(|e| Error::io(&txt, e))?;
            }
            write!(out, "{table}").map_err(stdout_err)?;
        }
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    match execute(cli, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
