//! Warehouse and workload parameters.
//!
//! High-level parameters are averages; [`derive_low_level`] turns them into
//! a concrete per-table, per-dimension parameter set by gaussian draws with
//! standard deviation `spread * mean`, rounding integral values and clamping
//! everything into its valid range.

use std::fmt;

use rand::seq::index;

use crate::error::{Error, Result};
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq)]
pub struct HighLevelParams {
    pub avg_nb_ft: f64,
    pub avg_nb_dim: f64,
    pub avg_tot_nb_dim: f64,
    pub avg_nb_meas: f64,
    pub avg_density: f64,
    pub avg_nb_levels: f64,
    pub avg_nb_att: f64,
    pub avg_hhlevel_size: f64,
    pub dim_sfactor: f64,
    /// Relative standard deviation of every derivation draw.
    pub spread: f64,
}

impl Default for HighLevelParams {
    fn default() -> Self {
        Self {
            avg_nb_ft: 1.0,
            avg_nb_dim: 5.0,
            avg_tot_nb_dim: 5.0,
            avg_nb_meas: 5.0,
            avg_density: 0.6,
            avg_nb_levels: 3.0,
            avg_nb_att: 5.0,
            avg_hhlevel_size: 10.0,
            dim_sfactor: 10.0,
            spread: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowLevelParams {
    pub nb_ft: usize,
    /// Per fact table.
    pub nb_dim: Vec<usize>,
    pub tot_nb_dim: usize,
    /// Per fact table.
    pub nb_meas: Vec<usize>,
    /// Per fact table.
    pub density: Vec<f64>,
    /// Per dimension.
    pub nb_levels: Vec<usize>,
    /// Per dimension, per depth (index 0 = depth 1, the finest level).
    pub nb_att: Vec<Vec<usize>>,
    /// Per dimension: cardinality of the coarsest level.
    pub hhlevel_size: Vec<u64>,
    /// Per dimension.
    pub dim_sfactor: Vec<f64>,
    /// Per fact table: sorted 1-based dimension indices describing it.
    pub fact_dimensions: Vec<Vec<usize>>,
}

impl LowLevelParams {
    /// Level cardinalities of dimension `d` (0-based), finest level first.
    ///
    /// The coarsest level holds `HHLEVEL_SIZE` tuples and each finer level
    /// multiplies the running size by `DIM_SFACTOR`, rounding to nearest.
    pub fn level_cardinalities(&self, d: usize) -> Vec<u64> {
        let mut size = self.hhlevel_size[d] as f64;
        let mut cards = Vec::with_capacity(self.nb_levels[d]);
        for _ in 0..self.nb_levels[d] {
            cards.push(size.round().max(1.0) as u64);
            size *= self.dim_sfactor[d];
        }
        cards.reverse();
        cards
    }

    pub fn entry_cardinality(&self, d: usize) -> u64 {
        self.level_cardinalities(d)[0]
    }

    /// Size of the cartesian product of entry-level keys of fact table `f`.
    pub fn fact_product(&self, f: usize) -> f64 {
        self.fact_dimensions[f]
            .iter()
            .map(|&d| self.entry_cardinality(d - 1) as f64)
            .product()
    }

    pub fn expected_fact_rows(&self, f: usize) -> f64 {
        self.density[f] * self.fact_product(f)
    }

    /// Draws a dimension assignment for every fact table: `NB_DIM(f)`
    /// distinct dimensions, uniformly without replacement.
    pub fn assign_fact_dimensions(&mut self, rng: &mut SeededRng) {
        self.fact_dimensions = self
            .nb_dim
            .iter()
            .map(|&n| {
                let n = n.min(self.tot_nb_dim);
                let mut dims: Vec<usize> = index::sample(rng.inner(), self.tot_nb_dim, n)
                    .into_iter()
                    .map(|i| i + 1)
                    .collect();
                dims.sort_unstable();
                dims
            })
            .collect();
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        if self.nb_ft < 1 {
            r.push("NB_FT", self.nb_ft, "must be >= 1");
        }
        r.check_len("NB_DIM", self.nb_dim.len(), self.nb_ft);
        r.check_len("NB_MEAS", self.nb_meas.len(), self.nb_ft);
        r.check_len("DENSITY", self.density.len(), self.nb_ft);
        r.check_len("FT_DIMS", self.fact_dimensions.len(), self.nb_ft);
        r.check_len("NB_LEVELS", self.nb_levels.len(), self.tot_nb_dim);
        r.check_len("NB_ATT", self.nb_att.len(), self.tot_nb_dim);
        r.check_len("HHLEVEL_SIZE", self.hhlevel_size.len(), self.tot_nb_dim);
        r.check_len("DIM_SFACTOR", self.dim_sfactor.len(), self.tot_nb_dim);
        if self.tot_nb_dim < 1 {
            r.push("TOT_NB_DIM", self.tot_nb_dim, "must be >= 1");
        }
        for (f, &n) in self.nb_dim.iter().enumerate() {
            if n < 1 || n > self.tot_nb_dim {
                r.push(format!("NB_DIM[{}]", f + 1), n, "must be in [1, TOT_NB_DIM]");
            }
        }
        for (f, &dens) in self.density.iter().enumerate() {
            if !(dens > 0.0 && dens <= 1.0) {
                r.push(format!("DENSITY[{}]", f + 1), dens, "must be in (0, 1]");
            }
        }
        for (f, dims) in self.fact_dimensions.iter().enumerate() {
            let field = format!("FT_DIMS[{}]", f + 1);
            if let Some(&n) = self.nb_dim.get(f) {
                if dims.len() != n {
                    r.push(&field, format!("{dims:?}"), "must list NB_DIM dimensions");
                }
            }
            if dims.iter().any(|&d| d < 1 || d > self.tot_nb_dim) {
                r.push(&field, format!("{dims:?}"), "indices must be in [1, TOT_NB_DIM]");
            }
            let mut sorted = dims.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != dims.len() {
                r.push(&field, format!("{dims:?}"), "dimensions must be distinct");
            }
        }
        for (d, &n) in self.nb_levels.iter().enumerate() {
            if n < 1 {
                r.push(format!("NB_LEVELS[{}]", d + 1), n, "must be >= 1");
            }
            if let Some(row) = self.nb_att.get(d) {
                if row.len() != n {
                    r.push(
                        format!("NB_ATT[{}]", d + 1),
                        row.len(),
                        "must have one entry per level",
                    );
                }
            }
        }
        for (d, &h) in self.hhlevel_size.iter().enumerate() {
            if h < 1 {
                r.push(format!("HHLEVEL_SIZE[{}]", d + 1), h, "must be >= 1");
            }
        }
        for (d, &s) in self.dim_sfactor.iter().enumerate() {
            if !(s >= 1.0 && s.is_finite()) {
                r.push(format!("DIM_SFACTOR[{}]", d + 1), s, "must be >= 1");
            }
        }
        r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadParams {
    pub nb_q: usize,
    pub avg_nb_att: f64,
    pub avg_nb_restr: f64,
    pub prob_olap: f64,
    pub avg_nb_aggreg: f64,
    pub prob_cube: f64,
    pub prob_having: f64,
    pub avg_nb_dd: f64,
    /// Relative standard deviation of the workload's gaussian counts.
    pub spread: f64,
}

impl Default for WorkloadParams {
    fn default() -> Self {
        Self {
            nb_q: 100,
            avg_nb_att: 5.0,
            avg_nb_restr: 3.0,
            prob_olap: 0.9,
            avg_nb_aggreg: 3.0,
            prob_cube: 0.3,
            prob_having: 0.2,
            avg_nb_dd: 3.0,
            spread: 0.1,
        }
    }
}

impl WorkloadParams {
    pub fn prob_extract(&self) -> f64 {
        1.0 - self.prob_olap
    }

    pub fn prob_rollup(&self) -> f64 {
        1.0 - self.prob_cube
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        if self.nb_q < 1 {
            r.push("NB_Q", self.nb_q, "must be >= 1");
        }
        for (name, v) in [
            ("WL_AVG_NB_ATT", self.avg_nb_att),
            ("AVG_NB_RESTR", self.avg_nb_restr),
            ("AVG_NB_AGGREG", self.avg_nb_aggreg),
            ("AVG_NB_DD", self.avg_nb_dd),
            ("WL_SPREAD", self.spread),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                r.push(name, v, "must be a finite value >= 0");
            }
        }
        for (name, p) in [
            ("PROB_OLAP", self.prob_olap),
            ("PROB_CUBE", self.prob_cube),
            ("PROB_HAVING", self.prob_having),
        ] {
            if !(0.0..=1.0).contains(&p) {
                r.push(name, p, "probability must be in [0, 1]");
            }
        }
        r
    }
}

impl HighLevelParams {
    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        for (name, v, min) in [
            ("AVG_NB_FT", self.avg_nb_ft, 1.0),
            ("AVG_NB_DIM", self.avg_nb_dim, 1.0),
            ("AVG_TOT_NB_DIM", self.avg_tot_nb_dim, 1.0),
            ("AVG_NB_MEAS", self.avg_nb_meas, 0.0),
            ("AVG_NB_LEVELS", self.avg_nb_levels, 1.0),
            ("AVG_NB_ATT", self.avg_nb_att, 0.0),
            ("AVG_HHLEVEL_SIZE", self.avg_hhlevel_size, 1.0),
            ("DIM_SFACTOR", self.dim_sfactor, 1.0),
            ("SPREAD", self.spread, 0.0),
        ] {
            if !(v >= min && v.is_finite()) {
                r.push(name, v, format!("must be a finite value >= {min}"));
            }
        }
        if !(self.avg_density > 0.0 && self.avg_density <= 1.0) {
            r.push("AVG_DENSITY", self.avg_density, "must be in (0, 1]");
        }
        r
    }
}

/// Resolves high-level averages into concrete low-level parameters.
pub fn derive_low_level(high: &HighLevelParams, rng: &mut SeededRng) -> Result<LowLevelParams> {
    let report = high.validate();
    if !report.is_empty() {
        return Err(Error::Validation(report));
    }
    let s = high.spread;
    let count = |rng: &mut SeededRng, mean: f64, min: i64| rng.gaussian_int(mean, s, min) as usize;

    let nb_ft = count(rng, high.avg_nb_ft, 1);
    let nb_dim: Vec<usize> = (0..nb_ft).map(|_| count(rng, high.avg_nb_dim, 1)).collect();
    let max_dim = nb_dim.iter().copied().max().unwrap_or(1);
    let tot_nb_dim = count(rng, high.avg_tot_nb_dim, 1).max(max_dim);
    let mut nb_meas = Vec::with_capacity(nb_ft);
    let mut density = Vec::with_capacity(nb_ft);
    for _ in 0..nb_ft {
        nb_meas.push(count(rng, high.avg_nb_meas, 0));
        density.push(rng.gaussian_real(high.avg_density, s, f64::MIN_POSITIVE, 1.0));
    }
    let mut nb_levels = Vec::with_capacity(tot_nb_dim);
    let mut hhlevel_size = Vec::with_capacity(tot_nb_dim);
    let mut dim_sfactor = Vec::with_capacity(tot_nb_dim);
    let mut nb_att = Vec::with_capacity(tot_nb_dim);
    for _ in 0..tot_nb_dim {
        let levels = count(rng, high.avg_nb_levels, 1);
        nb_levels.push(levels);
        hhlevel_size.push(count(rng, high.avg_hhlevel_size, 1) as u64);
        dim_sfactor.push(rng.gaussian_real(high.dim_sfactor, s, 1.0, f64::MAX));
        nb_att.push((0..levels).map(|_| count(rng, high.avg_nb_att, 0)).collect());
    }
    let mut low = LowLevelParams {
        nb_ft,
        nb_dim,
        tot_nb_dim,
        nb_meas,
        density,
        nb_levels,
        nb_att,
        hhlevel_size,
        dim_sfactor,
        fact_dimensions: Vec::new(),
    };
    low.assign_fact_dimensions(rng);
    Ok(low)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldViolation {
    pub field: String,
    pub value: String,
    pub rule: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<FieldViolation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn push(&mut self, field: impl AsRef<str>, value: impl fmt::Display, rule: impl Into<String>) {
        self.violations.push(FieldViolation {
            field: field.as_ref().to_string(),
            value: value.to_string(),
            rule: rule.into(),
        });
    }

    fn check_len(&mut self, field: &str, actual: usize, expected: usize) {
        if actual != expected {
            self.push(field, actual, format!("must have {expected} entries"));
        }
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  {} = {}: {}", v.field, v.value, v.rule)?;
        }
        Ok(())
    }
}
