//! `KEY = value` configuration files.
//!
//! One pair per line, `#` starts a comment. Keys are parameter names.
//! Low-level list values are comma separated; per-dimension matrices
//! (`NB_ATT`) and per-fact-table dimension lists (`FT_DIMS`) separate their
//! rows with `;`.
//!
//! A configuration is either high-level (averages) or low-level (explicit
//! per-table values); mixing the two is an error. `DIM_SFACTOR` exists in
//! both families: it is read as a per-dimension list when any low-level key
//! is present and as an average otherwise.

use std::collections::BTreeMap;
use std::fmt::{self, Write};
use std::path::Path;
use std::str::FromStr;

use crate::emit::Dialect;
use crate::error::{Error, Result};
use crate::params::{HighLevelParams, LowLevelParams, WorkloadParams};
use crate::rng::MeasureRange;
use crate::schema::{GenerationOptions, ParamSource};

pub const HIGH_KEYS: &[&str] = &[
    "AVG_NB_FT",
    "AVG_NB_DIM",
    "AVG_TOT_NB_DIM",
    "AVG_NB_MEAS",
    "AVG_DENSITY",
    "AVG_NB_LEVELS",
    "AVG_NB_ATT",
    "AVG_HHLEVEL_SIZE",
    "SPREAD",
];

pub const LOW_KEYS: &[&str] = &[
    "NB_FT",
    "NB_DIM",
    "TOT_NB_DIM",
    "NB_MEAS",
    "DENSITY",
    "NB_LEVELS",
    "NB_ATT",
    "HHLEVEL_SIZE",
    "FT_DIMS",
];

/// Shared by both parameter families.
pub const SHARED_KEYS: &[&str] = &["DIM_SFACTOR"];

pub const WORKLOAD_KEYS: &[&str] = &[
    "NB_Q",
    "WL_AVG_NB_ATT",
    "AVG_NB_RESTR",
    "PROB_OLAP",
    "AVG_NB_AGGREG",
    "PROB_CUBE",
    "PROB_HAVING",
    "AVG_NB_DD",
    "WL_SPREAD",
];

pub const OPTION_KEYS: &[&str] = &[
    "SEED",
    "REFERENTIAL_SIZE",
    "MAX_ROWS",
    "STREAMING_THRESHOLD",
    "MEASURE_MIN",
    "MEASURE_MAX",
    "EMIT_INSERTS",
    "DIALECT",
];

/// Keys written by the manifest; accepted and ignored when a manifest is
/// used as a configuration.
const INFO_KEYS: &[&str] = &["TOOL_VERSION", "WAREHOUSE_MEGABYTES"];
const INFO_PREFIXES: &[&str] = &["CHECKSUM.", "SIZE.", "EXPECTED_ROWS."];

const DERIVED_KEYS: &[(&str, &str)] = &[
    ("PROB_EXTRACT", "it is always 1 - PROB_OLAP"),
    ("PROB_ROLLUP", "it is always 1 - PROB_CUBE"),
];

pub fn all_keys() -> impl Iterator<Item = &'static str> {
    HIGH_KEYS
        .iter()
        .chain(SHARED_KEYS)
        .chain(LOW_KEYS)
        .chain(WORKLOAD_KEYS)
        .chain(OPTION_KEYS)
        .copied()
}

fn is_info_key(key: &str) -> bool {
    INFO_KEYS.contains(&key) || INFO_PREFIXES.iter().any(|p| key.starts_with(p))
}

/// Ordered `KEY = value` entries with the line each came from (0 for
/// entries set programmatically, e.g. from command-line flags).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, (String, usize)>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = ConfigMap::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config {
                    line: line_no,
                    message: format!("expected `KEY = value`, found {line:?}"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            if is_info_key(key) {
                continue;
            }
            if let Some((_, why)) = DERIVED_KEYS.iter().find(|(k, _)| *k == key) {
                return Err(Error::Config {
                    line: line_no,
                    message: format!("{key} cannot be set: {why}"),
                });
            }
            if !all_keys().any(|k| k == key) {
                return Err(Error::Config {
                    line: line_no,
                    message: format!("unknown key {key:?}"),
                });
            }
            if map.entries.insert(key.to_string(), (value.to_string(), line_no)).is_some() {
                return Err(Error::Config {
                    line: line_no,
                    message: format!("duplicate key {key}"),
                });
            }
        }
        Ok(map)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Sets or overrides a key.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        if !all_keys().any(|k| k == key) {
            return Err(Error::Config {
                line: 0,
                message: format!("unknown key {key:?}"),
            });
        }
        self.entries.insert(key.to_string(), (value.into(), 0));
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, (v, _))| (k.as_str(), v.as_str()))
    }

    fn line(&self, key: &str) -> usize {
        self.entries.get(key).map_or(0, |(_, l)| *l)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| Error::Config {
                line: self.line(key),
                message: format!("{key}: cannot parse {v:?}"),
            }),
        }
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        let Some(v) = self.get(key) else {
            return Ok(None);
        };
        parse_list(v).map(Some).map_err(|_| Error::Config {
            line: self.line(key),
            message: format!("{key}: cannot parse list {v:?}"),
        })
    }

    fn matrix<T: FromStr>(&self, key: &str) -> Result<Option<Vec<Vec<T>>>> {
        let Some(v) = self.get(key) else {
            return Ok(None);
        };
        v.split(';')
            .map(|row| parse_list(row))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Some)
            .map_err(|_| Error::Config {
                line: self.line(key),
                message: format!("{key}: cannot parse matrix {v:?}"),
            })
    }

    /// True when any low-level key is present.
    pub fn is_low_level(&self) -> bool {
        LOW_KEYS.iter().any(|k| self.contains(k))
    }
}

fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, ()> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|item| item.trim().parse().map_err(|_| ()))
        .collect()
}

pub fn parse_seed(s: &str) -> Option<u64> {
    let s = s.trim();
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16).ok(),
        None => s.parse().ok(),
    }
}

/// Fully resolved configuration of one benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub source: ParamSource,
    pub workload: WorkloadParams,
    pub seed: u64,
    pub options: GenerationOptions,
    pub emit_inserts: bool,
    pub dialect: Dialect,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            source: ParamSource::High(HighLevelParams::default()),
            workload: WorkloadParams::default(),
            seed: 0,
            options: GenerationOptions::default(),
            emit_inserts: false,
            dialect: Dialect::Generic,
        }
    }
}

impl BenchConfig {
    /// Applies `map` over the defaults.
    pub fn from_map(map: &ConfigMap) -> Result<Self> {
        let mut cfg = BenchConfig::default();
        let low_mode = map.is_low_level();
        if low_mode {
            if let Some(k) = HIGH_KEYS.iter().find(|k| map.contains(k)) {
                return Err(Error::Config {
                    line: map.line(k),
                    message: format!(
                        "{k} is a high-level parameter but low-level parameters are also set; \
                         use one family per run"
                    ),
                });
            }
            cfg.source = ParamSource::Low(low_from_map(map)?);
        } else {
            let mut h = HighLevelParams::default();
            let fields: [(&str, &mut f64); 10] = [
                ("AVG_NB_FT", &mut h.avg_nb_ft),
                ("AVG_NB_DIM", &mut h.avg_nb_dim),
                ("AVG_TOT_NB_DIM", &mut h.avg_tot_nb_dim),
                ("AVG_NB_MEAS", &mut h.avg_nb_meas),
                ("AVG_DENSITY", &mut h.avg_density),
                ("AVG_NB_LEVELS", &mut h.avg_nb_levels),
                ("AVG_NB_ATT", &mut h.avg_nb_att),
                ("AVG_HHLEVEL_SIZE", &mut h.avg_hhlevel_size),
                ("DIM_SFACTOR", &mut h.dim_sfactor),
                ("SPREAD", &mut h.spread),
            ];
            for (key, slot) in fields {
                if let Some(v) = map.parsed(key)? {
                    *slot = v;
                }
            }
            cfg.source = ParamSource::High(h);
        }

        let w = &mut cfg.workload;
        if let Some(v) = map.parsed("NB_Q")? {
            w.nb_q = v;
        }
        let fields: [(&str, &mut f64); 8] = [
            ("WL_AVG_NB_ATT", &mut w.avg_nb_att),
            ("AVG_NB_RESTR", &mut w.avg_nb_restr),
            ("PROB_OLAP", &mut w.prob_olap),
            ("AVG_NB_AGGREG", &mut w.avg_nb_aggreg),
            ("PROB_CUBE", &mut w.prob_cube),
            ("PROB_HAVING", &mut w.prob_having),
            ("AVG_NB_DD", &mut w.avg_nb_dd),
            ("WL_SPREAD", &mut w.spread),
        ];
        for (key, slot) in fields {
            if let Some(v) = map.parsed(key)? {
                *slot = v;
            }
        }

        if let Some(s) = map.get("SEED") {
            cfg.seed = parse_seed(s).ok_or_else(|| Error::Config {
                line: map.line("SEED"),
                message: format!("SEED: expected a decimal or 0x-prefixed hex integer, got {s:?}"),
            })?;
        }
        let o = &mut cfg.options;
        if let Some(v) = map.parsed("REFERENTIAL_SIZE")? {
            o.referential_size = v;
        }
        if let Some(v) = map.parsed("MAX_ROWS")? {
            o.max_rows = v;
        }
        if let Some(v) = map.parsed("STREAMING_THRESHOLD")? {
            o.streaming_threshold = v;
        }
        let lo = map.parsed("MEASURE_MIN")?.unwrap_or(o.measure_range.lo);
        let hi = map.parsed("MEASURE_MAX")?.unwrap_or(o.measure_range.hi);
        o.measure_range = MeasureRange::new(lo, hi)?;
        if let Some(v) = map.parsed("EMIT_INSERTS")? {
            cfg.emit_inserts = v;
        }
        if let Some(v) = map.parsed("DIALECT")? {
            cfg.dialect = v;
        }
        Ok(cfg)
    }
}

fn low_from_map(map: &ConfigMap) -> Result<LowLevelParams> {
    let mut missing = Vec::new();
    let mut need = |key: &'static str, present: bool| {
        if !present {
            missing.push(key);
        }
    };
    let nb_ft = map.parsed::<usize>("NB_FT")?;
    need("NB_FT", nb_ft.is_some());
    let tot_nb_dim = map.parsed::<usize>("TOT_NB_DIM")?;
    need("TOT_NB_DIM", tot_nb_dim.is_some());
    let nb_dim = map.list::<usize>("NB_DIM")?;
    need("NB_DIM", nb_dim.is_some());
    let nb_meas = map.list::<usize>("NB_MEAS")?;
    need("NB_MEAS", nb_meas.is_some());
    let density = map.list::<f64>("DENSITY")?;
    need("DENSITY", density.is_some());
    let nb_levels = map.list::<usize>("NB_LEVELS")?;
    need("NB_LEVELS", nb_levels.is_some());
    let nb_att = map.matrix::<usize>("NB_ATT")?;
    need("NB_ATT", nb_att.is_some());
    let hhlevel_size = map.list::<u64>("HHLEVEL_SIZE")?;
    need("HHLEVEL_SIZE", hhlevel_size.is_some());
    let dim_sfactor = map.list::<f64>("DIM_SFACTOR")?;
    need("DIM_SFACTOR", dim_sfactor.is_some());
    if !missing.is_empty() {
        return Err(Error::Config {
            line: 0,
            message: format!("low-level configuration is missing {}", missing.join(", ")),
        });
    }
    Ok(LowLevelParams {
        nb_ft: nb_ft.unwrap_or_default(),
        nb_dim: nb_dim.unwrap_or_default(),
        tot_nb_dim: tot_nb_dim.unwrap_or_default(),
        nb_meas: nb_meas.unwrap_or_default(),
        density: density.unwrap_or_default(),
        nb_levels: nb_levels.unwrap_or_default(),
        nb_att: nb_att.unwrap_or_default(),
        hhlevel_size: hhlevel_size.unwrap_or_default(),
        dim_sfactor: dim_sfactor.unwrap_or_default(),
        fact_dimensions: map.matrix("FT_DIMS")?.unwrap_or_default(),
    })
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn join_rows<T: fmt::Display>(rows: &[Vec<T>]) -> String {
    rows.iter().map(|r| join(r)).collect::<Vec<_>>().join(";")
}

/// Entries describing `low` in configuration syntax.
pub fn low_level_entries(low: &LowLevelParams) -> Vec<(&'static str, String)> {
    vec![
        ("NB_FT", low.nb_ft.to_string()),
        ("TOT_NB_DIM", low.tot_nb_dim.to_string()),
        ("NB_DIM", join(&low.nb_dim)),
        ("NB_MEAS", join(&low.nb_meas)),
        ("DENSITY", join(&low.density)),
        ("NB_LEVELS", join(&low.nb_levels)),
        ("NB_ATT", join_rows(&low.nb_att)),
        ("HHLEVEL_SIZE", join(&low.hhlevel_size)),
        ("DIM_SFACTOR", join(&low.dim_sfactor)),
        ("FT_DIMS", join_rows(&low.fact_dimensions)),
    ]
}

pub fn high_level_entries(h: &HighLevelParams) -> Vec<(&'static str, String)> {
    vec![
        ("AVG_NB_FT", h.avg_nb_ft.to_string()),
        ("AVG_NB_DIM", h.avg_nb_dim.to_string()),
        ("AVG_TOT_NB_DIM", h.avg_tot_nb_dim.to_string()),
        ("AVG_NB_MEAS", h.avg_nb_meas.to_string()),
        ("AVG_DENSITY", h.avg_density.to_string()),
        ("AVG_NB_LEVELS", h.avg_nb_levels.to_string()),
        ("AVG_NB_ATT", h.avg_nb_att.to_string()),
        ("AVG_HHLEVEL_SIZE", h.avg_hhlevel_size.to_string()),
        ("DIM_SFACTOR", h.dim_sfactor.to_string()),
        ("SPREAD", h.spread.to_string()),
    ]
}

pub fn workload_entries(w: &WorkloadParams) -> Vec<(&'static str, String)> {
    vec![
        ("NB_Q", w.nb_q.to_string()),
        ("WL_AVG_NB_ATT", w.avg_nb_att.to_string()),
        ("AVG_NB_RESTR", w.avg_nb_restr.to_string()),
        ("PROB_OLAP", w.prob_olap.to_string()),
        ("AVG_NB_AGGREG", w.avg_nb_aggreg.to_string()),
        ("PROB_CUBE", w.prob_cube.to_string()),
        ("PROB_HAVING", w.prob_having.to_string()),
        ("AVG_NB_DD", w.avg_nb_dd.to_string()),
        ("WL_SPREAD", w.spread.to_string()),
    ]
}

impl BenchConfig {
    pub fn option_entries(&self) -> Vec<(&'static str, String)> {
        let o = &self.options;
        vec![
            ("SEED", self.seed.to_string()),
            ("REFERENTIAL_SIZE", o.referential_size.to_string()),
            ("MAX_ROWS", o.max_rows.to_string()),
            ("STREAMING_THRESHOLD", o.streaming_threshold.to_string()),
            ("MEASURE_MIN", o.measure_range.lo.to_string()),
            ("MEASURE_MAX", o.measure_range.hi.to_string()),
            ("EMIT_INSERTS", self.emit_inserts.to_string()),
            ("DIALECT", self.dialect.to_string()),
        ]
    }

    /// The configuration in file syntax.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let params = match &self.source {
            ParamSource::High(h) => high_level_entries(h),
            ParamSource::Low(l) => low_level_entries(l),
        };
        for (k, v) in self
            .option_entries()
            .into_iter()
            .chain(params)
            .chain(workload_entries(&self.workload))
        {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_all_defaults() {
        let cfg = BenchConfig::from_map(&ConfigMap::parse("").unwrap()).unwrap();
        assert_eq!(cfg, BenchConfig::default());
    }

    #[test]
    fn parses_high_level_and_workload_keys() {
        let text = "# comment\nAVG_NB_DIM = 4  # trailing\nSPREAD = 0\nNB_Q = 20\nWL_AVG_NB_ATT = 2\nSEED = 0x2A\n";
        let cfg = BenchConfig::from_map(&ConfigMap::parse(text).unwrap()).unwrap();
        match cfg.source {
            ParamSource::High(h) => {
                assert_eq!(h.avg_nb_dim, 4.0);
                assert_eq!(h.spread, 0.0);
            }
            _ => panic!("expected high-level"),
        }
        assert_eq!(cfg.workload.nb_q, 20);
        assert_eq!(cfg.workload.avg_nb_att, 2.0);
        assert_eq!(cfg.seed, 42);
    }

    #[test]
    fn unknown_and_derived_keys_are_errors() {
        let err = ConfigMap::parse("FOO = 1").unwrap_err();
        assert!(matches!(err, Error::Config { line: 1, .. }));
        let err = ConfigMap::parse("\nPROB_ROLLUP = 0.5").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }), "{err}");
        assert!(ConfigMap::parse("NB_Q").is_err());
        assert!(ConfigMap::parse("NB_Q = 1\nNB_Q = 2").is_err());
    }

    #[test]
    fn mixing_families_is_rejected() {
        let map = ConfigMap::parse("AVG_NB_DIM = 3\nNB_FT = 1").unwrap();
        assert!(BenchConfig::from_map(&map).is_err());
    }

    #[test]
    fn low_level_round_trip_through_render() {
        let text = "NB_FT = 2\nTOT_NB_DIM = 3\nNB_DIM = 2,3\nNB_MEAS = 1,2\nDENSITY = 0.5,1\n\
                    NB_LEVELS = 1,2,3\nNB_ATT = 1;2,0;1,1,1\nHHLEVEL_SIZE = 2,3,4\n\
                    DIM_SFACTOR = 1,2.5,2\nFT_DIMS = 1,3;1,2,3\nSEED = 7\n";
        let cfg = BenchConfig::from_map(&ConfigMap::parse(text).unwrap()).unwrap();
        let ParamSource::Low(low) = &cfg.source else {
            panic!("expected low-level");
        };
        assert_eq!(low.nb_att, vec![vec![1], vec![2, 0], vec![1, 1, 1]]);
        assert_eq!(low.fact_dimensions, vec![vec![1, 3], vec![1, 2, 3]]);
        assert_eq!(low.dim_sfactor, vec![1.0, 2.5, 2.0]);
        assert!(low.validate().is_empty());
        let again = BenchConfig::from_map(&ConfigMap::parse(&cfg.render()).unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn incomplete_low_level_lists_missing_keys() {
        let err = BenchConfig::from_map(&ConfigMap::parse("NB_FT = 1").unwrap()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("TOT_NB_DIM") && msg.contains("DIM_SFACTOR"), "{msg}");
    }

    #[test]
    fn seeds_accept_hex_and_decimal() {
        assert_eq!(parse_seed("42"), Some(42));
        assert_eq!(parse_seed("0xff"), Some(255));
        assert_eq!(parse_seed("abc"), None);
    }
}
