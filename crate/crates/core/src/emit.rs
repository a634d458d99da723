//! Portable artifacts: DDL, one CSV file per table, an optional INSERT
//! script, the workload as SQL and a manifest that records everything
//! needed to regenerate the run.

use std::fmt::{self, Write as _};
use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::{self, BenchConfig};
use crate::error::{Error, Result};
use crate::model::{AttributeKind, Table, Value, Warehouse};
use crate::query::{parse_check, render_sql, Query};
use crate::schema::SizeReport;
use crate::workload::{QueryClass, Workload};

pub const SCHEMA_FILE: &str = "schema.sql";
pub const DATA_DIR: &str = "data";
pub const WORKLOAD_FILE: &str = "workload.sql";
pub const INSERTS_FILE: &str = "inserts.sql";
pub const MANIFEST_FILE: &str = "manifest.txt";

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dialect {
    #[default]
    Generic,
    Oracle,
}

impl Dialect {
    fn key_type(self) -> &'static str {
        match self {
            Dialect::Generic => "INTEGER",
            Dialect::Oracle => "NUMBER(10)",
        }
    }

    fn measure_type(self) -> &'static str {
        match self {
            Dialect::Generic => "REAL",
            Dialect::Oracle => "BINARY_FLOAT",
        }
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dialect::Generic => "generic",
            Dialect::Oracle => "oracle",
        })
    }
}

impl FromStr for Dialect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "generic" => Ok(Dialect::Generic),
            "oracle" => Ok(Dialect::Oracle),
            other => Err(Error::Usage(format!(
                "unknown dialect {other:?} (expected generic or oracle)"
            ))),
        }
    }
}

fn column_type(attr: &crate::model::Attribute, dialect: Dialect) -> String {
    match attr.kind {
        AttributeKind::PrimaryKey | AttributeKind::ForeignKey(_) => dialect.key_type().into(),
        AttributeKind::Descriptor => format!("CHAR({})", attr.name.len() + 21),
        AttributeKind::Measure => dialect.measure_type().into(),
    }
}

fn table_ddl(wh: &Warehouse, table: &Table, dialect: Dialect, out: &mut String) {
    let _ = writeln!(out, "CREATE TABLE {} (", table.name);
    let mut lines: Vec<String> = table
        .intention
        .iter()
        .map(|a| format!("  {} {} NOT NULL", a.name, column_type(a, dialect)))
        .collect();
    let pk: Vec<&str> = match table.primary_key() {
        Some(pk) => vec![pk.name.as_str()],
        // fact tables: the foreign keys together identify a row
        None => table.foreign_keys().map(|(_, a)| a.name.as_str()).collect(),
    };
    if !pk.is_empty() {
        lines.push(format!("  PRIMARY KEY ({})", pk.join(", ")));
    }
    for (_, fk) in table.foreign_keys() {
        let target = fk.target_level().expect("foreign key has a target");
        let target_name = wh
            .level(target)
            .map(|l| l.name().to_string())
            .unwrap_or_else(|| crate::schema::level_table_name(target.dimension, target.depth));
        lines.push(format!(
            "  FOREIGN KEY ({}) REFERENCES {} ({})",
            fk.name, target_name, fk.name
        ));
    }
    let _ = writeln!(out, "{}\n);", lines.join(",\n"));
}

/// `CREATE TABLE` statements in dependency order: every referenced level
/// is created before the tables that reference it.
pub fn emit_ddl(wh: &Warehouse, dialect: Dialect) -> String {
    let mut out = String::new();
    for (i, table) in wh.tables().into_iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        table_ddl(wh, table, dialect, &mut out);
    }
    out
}

/// Writes one table as CSV with a header row.
pub fn write_table_csv<W: Write>(table: &Table, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(writer);
    let to_io = |e: csv::Error| Error::io(&table.name, e.into());
    w.write_record(table.intention.iter().map(|a| a.name.as_str()))
        .map_err(to_io)?;
    let mut record = csv::StringRecord::new();
    for tuple in &table.extension {
        record.clear();
        for v in &tuple.values {
            record.push_field(&v.to_string());
        }
        w.write_record(&record).map_err(to_io)?;
    }
    w.flush().map_err(|e| Error::io(&table.name, e))
}

/// Writes `data/<table>.csv` for every table, in parallel.
pub fn emit_data_csv(wh: &Warehouse, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    wh.tables()
        .par_iter()
        .map(|table| {
            let path = dir.join(format!("{}.csv", table.name));
            let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
            write_table_csv(table, BufWriter::new(file))
                .map_err(|e| relabel_io(e, &path))?;
            Ok(path)
        })
        .collect()
}

fn relabel_io(e: Error, path: &Path) -> Error {
    match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    }
}

fn sql_value(v: &Value) -> String {
    match v {
        Value::Key(k) => k.to_string(),
        Value::Str(s) => format!("'{}'", s.replace('\'', "''")),
        Value::Measure(m) => m.to_string(),
    }
}

/// One `INSERT` statement per tuple, tables in dependency order.
pub fn write_inserts<W: Write>(wh: &Warehouse, mut w: W) -> std::io::Result<()> {
    for table in wh.tables() {
        let cols = table
            .intention
            .iter()
            .map(|a| a.name.as_str())
            .collect::<Vec<_>>()
            .join(", ");
        for tuple in &table.extension {
            let values = tuple.values.iter().map(sql_value).collect::<Vec<_>>().join(", ");
            writeln!(w, "INSERT INTO {} ({cols}) VALUES ({values});", table.name)?;
        }
    }
    w.flush()
}

pub fn emit_insert_sql(wh: &Warehouse, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_inserts(wh, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

/// Workload as SQL text: each statement preceded by `-- Q<n> [<CLASS>]`.
pub fn render_workload_sql(workload: &Workload) -> Result<String> {
    let mut out = String::new();
    for (i, (q, class)) in workload.iter().enumerate() {
        let _ = writeln!(out, "-- Q{} [{}]", i + 1, class.tag());
        let _ = writeln!(out, "{};", render_sql(q)?);
    }
    Ok(out)
}

pub fn emit_workload_sql(workload: &Workload, path: &Path) -> Result<()> {
    let text = render_workload_sql(workload)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// A statement read back from a workload file.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadStatement {
    pub index: usize,
    pub class: QueryClass,
    pub sql: String,
}

impl WorkloadStatement {
    pub fn query(&self) -> Result<Query> {
        Ok(parse_check(&self.sql)?)
    }
}

/// Splits workload SQL into statements. Statements without a class header
/// are tagged as extractions.
pub fn parse_workload_sql(text: &str) -> Result<Vec<WorkloadStatement>> {
    let mut out = Vec::new();
    let mut class = None;
    let mut buf = String::new();
    for (line_no, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if let Some(comment) = trimmed.strip_prefix("--") {
            if buf.is_empty() {
                if let Some(tag) = comment
                    .split_once('[')
                    .and_then(|(_, rest)| rest.split_once(']'))
                    .map(|(tag, _)| tag.trim())
                {
                    class = Some(tag.parse().map_err(|_| Error::Config {
                        line: line_no + 1,
                        message: format!("unknown query class {tag:?}"),
                    })?);
                }
            }
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        if !buf.is_empty() {
            buf.push(' ');
        }
        buf.push_str(trimmed);
        if let Some(stmt) = buf.strip_suffix(';') {
            out.push(WorkloadStatement {
                index: out.len() + 1,
                class: class.take().unwrap_or(QueryClass::Extraction),
                sql: stmt.trim().to_string(),
            });
            buf.clear();
        }
    }
    if !buf.is_empty() {
        out.push(WorkloadStatement {
            index: out.len() + 1,
            class: class.unwrap_or(QueryClass::Extraction),
            sql: buf,
        });
    }
    Ok(out)
}

pub fn read_workload_sql(path: &Path) -> Result<Vec<WorkloadStatement>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_workload_sql(&text)
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Manifest text; checksum file names are relative to the output directory.
pub fn render_manifest(
    wh: &Warehouse,
    size: &SizeReport,
    cfg: &BenchConfig,
    checksums: &[(String, String)],
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# whbench manifest; usable as a configuration file");
    let _ = writeln!(out, "TOOL_VERSION = {TOOL_VERSION}");
    let _ = writeln!(out, "\n# effective configuration");
    for line in cfg.render().lines() {
        let _ = writeln!(out, "#   {line}");
    }
    let _ = writeln!(out, "\n# options");
    let mut resolved = cfg.clone();
    resolved.options = wh.provenance.options.clone();
    resolved.seed = wh.provenance.seed;
    for (k, v) in resolved.option_entries() {
        let _ = writeln!(out, "{k} = {v}");
    }
    let _ = writeln!(out, "\n# resolved low-level parameters");
    for (k, v) in config::low_level_entries(&wh.provenance.low) {
        let _ = writeln!(out, "{k} = {v}");
    }
    let _ = writeln!(out, "\n# workload parameters");
    for (k, v) in config::workload_entries(&cfg.workload) {
        let _ = writeln!(out, "{k} = {v}");
    }
    let _ = writeln!(out, "\n# size assessment: rows, bytes per row, bytes");
    for t in &size.per_table {
        let _ = writeln!(
            out,
            "SIZE.{} = {},{},{}",
            t.table, t.row_count, t.row_bytes, t.total_bytes
        );
    }
    let _ = writeln!(out, "WAREHOUSE_MEGABYTES = {:.6}", size.warehouse_megabytes);
    let _ = writeln!(out, "\n# sha256 of emitted files");
    for (file, sum) in checksums {
        let _ = writeln!(out, "CHECKSUM.{file} = {sum}");
    }
    out
}

/// Files written by [`emit_all`], relative to the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct EmitSummary {
    pub out_dir: PathBuf,
    pub files: Vec<String>,
}

/// Writes every artifact of a run into `out_dir`.
pub fn emit_all(
    out_dir: &Path,
    wh: &Warehouse,
    size: &SizeReport,
    workload: &Workload,
    cfg: &BenchConfig,
) -> Result<EmitSummary> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut files = Vec::new();

    let schema = out_dir.join(SCHEMA_FILE);
    fs::write(&schema, emit_ddl(wh, cfg.dialect)).map_err(|e| Error::io(&schema, e))?;
    files.push(SCHEMA_FILE.to_string());

    let mut data: Vec<String> = emit_data_csv(wh, &out_dir.join(DATA_DIR))?
        .iter()
        .map(|p| format!("{DATA_DIR}/{}", p.file_name().unwrap().to_string_lossy()))
        .collect();
    data.sort();
    files.extend(data);

    if cfg.emit_inserts {
        emit_insert_sql(wh, &out_dir.join(INSERTS_FILE))?;
        files.push(INSERTS_FILE.to_string());
    }

    emit_workload_sql(workload, &out_dir.join(WORKLOAD_FILE))?;
    files.push(WORKLOAD_FILE.to_string());

    let checksums = files
        .iter()
        .map(|f| Ok((f.clone(), sha256_file(&out_dir.join(f))?)))
        .collect::<Result<Vec<_>>>()?;
    let manifest = out_dir.join(MANIFEST_FILE);
    fs::write(&manifest, render_manifest(wh, size, cfg, &checksums))
        .map_err(|e| Error::io(&manifest, e))?;
    files.push(MANIFEST_FILE.to_string());
    Ok(EmitSummary {
        out_dir: out_dir.to_path_buf(),
        files,
    })
}

/// Files whose checksum differs from the manifest in `dir`.
pub fn verify_checksums(dir: &Path) -> Result<Vec<String>> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut bad = Vec::new();
    for line in text.lines() {
        let Some((key, value)) = line.split_once('=') else {
            continue;
        };
        let Some(file) = key.trim().strip_prefix("CHECKSUM.") else {
            continue;
        };
        let actual = sha256_file(&dir.join(file)).ok();
        if actual.as_deref() != Some(value.trim()) {
            bad.push(file.to_string());
        }
    }
    Ok(bad)
}
