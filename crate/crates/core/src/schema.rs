//! Warehouse instantiation: dimension hierarchies first, then fact tables
//! over their entry-level keys, then a size assessment.

use std::collections::HashSet;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    Attribute, AttributeKind, Dimension, FactTable, HierarchyLevel, LevelRef, Provenance, Table,
    Tuple, Value, Warehouse,
};
use crate::params::{derive_low_level, HighLevelParams, LowLevelParams};
use crate::rng::{MeasureRange, SeededRng, StringReferential, DEFAULT_REFERENTIAL_SIZE};

pub const DEFAULT_MAX_ROWS: u64 = 10_000_000;
pub const DEFAULT_STREAMING_THRESHOLD: u64 = 10_000_000;

/// Bytes per integer key and per measure in the size assessment.
const SCALAR_BYTES: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationOptions {
    pub referential_size: usize,
    /// Upper bound on the rows of any single table.
    pub max_rows: u64,
    /// Key spaces up to this many combinations use per-combination
    /// inclusion draws; larger ones use exact-count sampling.
    pub streaming_threshold: u64,
    pub measure_range: MeasureRange,
}

impl Default for GenerationOptions {
    fn default() -> Self {
        Self {
            referential_size: DEFAULT_REFERENTIAL_SIZE,
            max_rows: DEFAULT_MAX_ROWS,
            streaming_threshold: DEFAULT_STREAMING_THRESHOLD,
            measure_range: MeasureRange::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamSource {
    High(HighLevelParams),
    Low(LowLevelParams),
}

pub fn level_table_name(dimension: usize, depth: usize) -> String {
    format!("DIM{dimension}_{depth}")
}

pub fn primary_key_name(dimension: usize, depth: usize) -> String {
    format!("DIM{dimension}_{depth}_PK")
}

pub fn fact_table_name(fact: usize) -> String {
    format!("FT{fact}")
}

/// Resolves the parameter source into validated low-level parameters.
pub fn resolve_params(source: &ParamSource, seed: u64) -> Result<LowLevelParams> {
    let low = match source {
        ParamSource::High(high) => {
            derive_low_level(high, &mut SeededRng::substream(seed, "params"))?
        }
        ParamSource::Low(low) => {
            let mut low = low.clone();
            if low.fact_dimensions.is_empty() && low.nb_ft > 0 {
                low.assign_fact_dimensions(&mut SeededRng::substream(seed, "assign"));
            }
            low
        }
    };
    low.validate().into_result()?;
    Ok(low)
}

/// Rejects parameter sets whose tables would exceed the row budget.
pub fn check_row_budget(low: &LowLevelParams, opts: &GenerationOptions) -> Result<()> {
    for d in 0..low.tot_nb_dim {
        for (i, &card) in low.level_cardinalities(d).iter().enumerate() {
            if card > opts.max_rows || card > i32::MAX as u64 {
                return Err(Error::Guard {
                    table: level_table_name(d + 1, i + 1),
                    expected_rows: card as f64,
                    max_rows: opts.max_rows.min(i32::MAX as u64),
                });
            }
        }
    }
    for f in 0..low.nb_ft {
        let expected = low.expected_fact_rows(f);
        if expected > opts.max_rows as f64 {
            return Err(Error::Guard {
                table: fact_table_name(f + 1),
                expected_rows: expected,
                max_rows: opts.max_rows,
            });
        }
    }
    Ok(())
}

pub fn generate_dimensions(
    low: &LowLevelParams,
    seed: u64,
    referential: &StringReferential,
) -> Result<Vec<Dimension>> {
    (0..low.tot_nb_dim)
        .into_par_iter()
        .map(|d| {
            let mut rng = SeededRng::substream(seed, &format!("dimension/{}", d + 1));
            generate_dimension(low, d, &mut rng, referential)
        })
        .collect()
}

fn generate_dimension(
    low: &LowLevelParams,
    d: usize,
    rng: &mut SeededRng,
    referential: &StringReferential,
) -> Result<Dimension> {
    let index = d + 1;
    let n = low.nb_levels[d];
    let cards = low.level_cardinalities(d);
    // Built coarsest first so each level can reference the one above it.
    let mut levels_rev: Vec<HierarchyLevel> = Vec::with_capacity(n);
    for depth in (1..=n).rev() {
        let name = level_table_name(index, depth);
        let nb_att = low.nb_att[d][depth - 1];
        let mut intention = vec![Attribute::new(
            primary_key_name(index, depth),
            AttributeKind::PrimaryKey,
        )];
        for k in 1..=nb_att {
            intention.push(Attribute::new(
                format!("{name}_DESCR{k}"),
                AttributeKind::Descriptor,
            ));
        }
        let coarser = levels_rev.last();
        if depth < n {
            intention.push(Attribute::new(
                primary_key_name(index, depth + 1),
                AttributeKind::ForeignKey(LevelRef {
                    dimension: index,
                    depth: depth + 1,
                }),
            ));
        }
        let mut table = Table::new(name, intention);
        let card = cards[depth - 1];
        table.extension.reserve(card as usize);
        for key in 1..=card as i32 {
            let mut values = Vec::with_capacity(table.intention.len());
            values.push(Value::Key(key));
            for attr in table.intention.iter().filter(|a| a.kind == AttributeKind::Descriptor) {
                values.push(Value::Str(referential.random_string(rng, &attr.name)?));
            }
            if let Some(coarser) = coarser {
                values.push(Value::Key(coarser.random_key(rng)?));
            }
            table.extension.push(Tuple { values });
        }
        levels_rev.push(HierarchyLevel { table, depth });
    }
    levels_rev.reverse();
    Ok(Dimension {
        index,
        levels: levels_rev,
    })
}

pub fn generate_fact_tables(
    low: &LowLevelParams,
    dims: &[Dimension],
    seed: u64,
    opts: &GenerationOptions,
) -> Result<Vec<FactTable>> {
    (0..low.nb_ft)
        .into_par_iter()
        .map(|f| {
            let mut rng = SeededRng::substream(seed, &format!("fact/{}", f + 1));
            generate_fact_table(low, f, dims, &mut rng, opts)
        })
        .collect()
}

fn generate_fact_table(
    low: &LowLevelParams,
    f: usize,
    dims: &[Dimension],
    rng: &mut SeededRng,
    opts: &GenerationOptions,
) -> Result<FactTable> {
    let name = fact_table_name(f + 1);
    let dim_indices = low.fact_dimensions[f].clone();
    let mut intention = Vec::new();
    let mut radices = Vec::with_capacity(dim_indices.len());
    for &d in &dim_indices {
        let dim = dims.iter().find(|x| x.index == d).ok_or_else(|| {
            Error::GenerationOrder(format!("dimension {d} of {name} has not been generated"))
        })?;
        let entry = dim.entry_level();
        if entry.cardinality() == 0 {
            return Err(Error::GenerationOrder(format!(
                "entry level {} is empty",
                entry.name()
            )));
        }
        intention.push(Attribute::new(
            primary_key_name(d, 1),
            AttributeKind::ForeignKey(LevelRef {
                dimension: d,
                depth: 1,
            }),
        ));
        radices.push(entry.cardinality() as u64);
    }
    let nb_meas = low.nb_meas[f];
    for k in 1..=nb_meas {
        intention.push(Attribute::new(
            format!("{name}_MEAS{k}"),
            AttributeKind::Measure,
        ));
    }

    let density = low.density[f];
    let product: Option<u128> = radices
        .iter()
        .try_fold(1u128, |acc, &r| acc.checked_mul(u128::from(r)));
    let product_f: f64 = radices.iter().map(|&r| r as f64).product();
    let expected = density * product_f;
    if expected > opts.max_rows as f64 {
        return Err(Error::Guard {
            table: name,
            expected_rows: expected,
            max_rows: opts.max_rows,
        });
    }

    let mut table = Table::new(name, intention);
    let push = |table: &mut Table, combo: u128, rng: &mut SeededRng| {
        let mut values = decode_combination(combo, &radices);
        values.extend((0..nb_meas).map(|_| Value::Measure(rng.random_measure(opts.measure_range))));
        table.extension.push(Tuple { values });
    };

    match product {
        Some(p) if p <= u128::from(opts.streaming_threshold) => {
            for combo in 0..p {
                if rng.bernoulli(density) {
                    push(&mut table, combo, rng);
                }
            }
        }
        _ => {
            let count = (density * product_f).round() as usize;
            let mut combos: Vec<u128> = match product.and_then(|p| usize::try_from(p).ok()) {
                Some(p) => index::sample(rng.inner(), p, count.min(p))
                    .into_iter()
                    .map(|i| i as u128)
                    .collect(),
                None => {
                    // Key space beyond the address range; rejection sampling
                    // is exact here because count is tiny relative to it.
                    let space = product.unwrap_or(u128::MAX);
                    let mut seen = HashSet::with_capacity(count);
                    while seen.len() < count {
                        seen.insert(rng.inner().gen_range(0..space));
                    }
                    seen.into_iter().collect()
                }
            };
            combos.sort_unstable();
            table.extension.reserve(combos.len());
            for combo in combos {
                push(&mut table, combo, rng);
            }
        }
    }

    Ok(FactTable {
        table,
        dimensions: dim_indices,
    })
}

/// Mixed-radix decoding of a combination index into 1-based keys, the first
/// dimension being the most significant digit.
fn decode_combination(mut combo: u128, radices: &[u64]) -> Vec<Value> {
    let mut keys = vec![Value::Key(0); radices.len()];
    for (slot, &radix) in keys.iter_mut().zip(radices).rev() {
        let r = u128::from(radix);
        *slot = Value::Key((combo % r) as i32 + 1);
        combo /= r;
    }
    keys
}

/// Builds the full warehouse for `source` under `seed`.
pub fn generate_warehouse(
    source: &ParamSource,
    seed: u64,
    opts: &GenerationOptions,
) -> Result<(Warehouse, SizeReport)> {
    let low = resolve_params(source, seed)?;
    check_row_budget(&low, opts)?;
    let referential = StringReferential::generate(
        &mut SeededRng::substream(seed, "referential"),
        opts.referential_size,
    )?;
    let dimensions = generate_dimensions(&low, seed, &referential)?;
    let fact_tables = generate_fact_tables(&low, &dimensions, seed, opts)?;
    let warehouse = Warehouse {
        fact_tables,
        dimensions,
        referential,
        provenance: Provenance {
            seed,
            low,
            options: opts.clone(),
        },
    };
    let size = estimate_size(&warehouse);
    Ok((warehouse, size))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableSize {
    pub table: String,
    pub row_count: u64,
    pub row_bytes: u64,
    pub total_bytes: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeReport {
    /// In table dependency order.
    pub per_table: Vec<TableSize>,
    pub warehouse_megabytes: f64,
}

impl SizeReport {
    pub fn total_bytes(&self) -> u64 {
        self.per_table.iter().map(|t| t.total_bytes).sum()
    }

    pub fn get(&self, table: &str) -> Option<&TableSize> {
        self.per_table.iter().find(|t| t.table == table)
    }
}

pub fn row_bytes(intention: &[Attribute]) -> u64 {
    intention
        .iter()
        .map(|a| match a.kind {
            AttributeKind::Descriptor => a.name.len() + 21,
            _ => SCALAR_BYTES,
        } as u64)
        .sum()
}

pub fn estimate_size(warehouse: &Warehouse) -> SizeReport {
    let per_table: Vec<TableSize> = warehouse
        .tables()
        .into_iter()
        .map(|t| {
            let row_bytes = row_bytes(&t.intention);
            let row_count = t.cardinality() as u64;
            TableSize {
                table: t.name.clone(),
                row_count,
                row_bytes,
                total_bytes: row_count * row_bytes,
            }
        })
        .collect();
    let total: u64 = per_table.iter().map(|t| t.total_bytes).sum();
    SizeReport {
        per_table,
        warehouse_megabytes: total as f64 / (1u64 << 20) as f64,
    }
}
