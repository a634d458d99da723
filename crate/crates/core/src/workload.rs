//! Workload synthesis: initial OLAP or extraction queries, each OLAP query
//! followed by a chain of drill-downs towards finer hierarchy levels.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{AttributeKind, Dimension, FactTable, HierarchyLevel, Table, Warehouse};
use crate::params::WorkloadParams;
use crate::query::{
    Aggregate, AggregateFn, CmpOp, ColumnRef, Condition, GroupBy, GroupingOp, Having,
    HavingTarget, JoinPair, Literal, Operand, Query,
};
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryClass {
    Extraction,
    OlapInitial,
    DrillDown,
}

impl QueryClass {
    pub fn tag(self) -> &'static str {
        match self {
            QueryClass::Extraction => "EXTRACTION",
            QueryClass::OlapInitial => "OLAP_INITIAL",
            QueryClass::DrillDown => "DRILL_DOWN",
        }
    }
}

impl fmt::Display for QueryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for QueryClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "EXTRACTION" => Ok(QueryClass::Extraction),
            "OLAP_INITIAL" => Ok(QueryClass::OlapInitial),
            "DRILL_DOWN" => Ok(QueryClass::DrillDown),
            other => Err(Error::Structural(format!("unknown query class {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadProvenance {
    pub seed: u64,
    pub params: WorkloadParams,
    pub warehouse_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Workload {
    pub queries: Vec<Query>,
    pub classes: Vec<QueryClass>,
    pub provenance: WorkloadProvenance,
}

impl Workload {
    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Query, QueryClass)> {
        self.queries.iter().zip(self.classes.iter().copied())
    }
}

/// The hierarchy level whose attribute was selected last in an initial
/// query; drill-downs continue from there towards finer levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainContext {
    pub dimension: usize,
    pub depth: usize,
}

fn dimension_of<'w>(wh: &'w Warehouse, index: usize) -> Result<&'w Dimension> {
    wh.dimension(index)
        .ok_or_else(|| Error::Structural(format!("dimension {index} is not in the warehouse")))
}

fn primary_key_name(table: &Table) -> Result<&str> {
    table
        .primary_key()
        .map(|a| a.name.as_str())
        .ok_or_else(|| Error::Structural(format!("{} has no primary key", table.name)))
}

/// Skewed choice of a level attribute: descriptors when the level has any,
/// its primary key otherwise. Attributes in `exclude` are never chosen.
fn random_attribute(
    rng: &mut SeededRng,
    level: &HierarchyLevel,
    exclude: &[ColumnRef],
) -> Option<ColumnRef> {
    let taken = |name: &str| {
        exclude
            .iter()
            .any(|c| c.table == level.table.name && c.column == name)
    };
    let mut candidates: Vec<&str> = level
        .table
        .descriptors()
        .map(|a| a.name.as_str())
        .filter(|n| !taken(n))
        .collect();
    if candidates.is_empty() {
        candidates = level
            .table
            .primary_key()
            .map(|a| a.name.as_str())
            .filter(|n| !taken(n))
            .into_iter()
            .collect();
    }
    if candidates.is_empty() {
        return None;
    }
    let name = candidates[rng.skewed_index(candidates.len())];
    Some(ColumnRef::new(level.table.name.clone(), name))
}

fn push_unique<T: PartialEq>(items: &mut Vec<T>, item: T) {
    if !items.contains(&item) {
        items.push(item);
    }
}

fn restriction_literal(
    wh: &Warehouse,
    rng: &mut SeededRng,
    attr: &ColumnRef,
    levels: &[&HierarchyLevel],
) -> Result<Literal> {
    let level = levels
        .iter()
        .find(|l| l.table.name == attr.table)
        .ok_or_else(|| Error::Structural(format!("{attr} is not a hierarchy attribute")))?;
    let kind = level.table.attribute(&attr.column).map(|a| &a.kind);
    Ok(match kind {
        Some(AttributeKind::Descriptor) => {
            Literal::Str(wh.referential.random_string(rng, &attr.column)?)
        }
        _ => Literal::Int(i64::from(level.random_key(rng)?)),
    })
}

/// Builds one initial query: select/from/where by walking dimension
/// hierarchies, extra restrictions, then the OLAP or extraction decision.
pub fn generate_initial_query(
    wh: &Warehouse,
    wp: &WorkloadParams,
    rng: &mut SeededRng,
) -> Result<(Query, ChainContext)> {
    check_warehouse(wh)?;
    let ft: &FactTable = &wh.fact_tables[rng.skewed_index(wh.fact_tables.len())];
    let mut q = Query {
        tables: vec![ft.name().to_string()],
        ..Query::default()
    };
    let mut visited: Vec<&HierarchyLevel> = Vec::new();
    let mut ctx = None;

    let nb_att = rng.gaussian_int(wp.avg_nb_att, wp.spread, 1);
    for _ in 0..nb_att {
        let dim = dimension_of(wh, ft.dimensions[rng.skewed_index(ft.dimensions.len())])?;
        let target = rng.uniform_int(1, dim.nb_levels() as i64) as usize;
        let mut level = dim.entry_level();
        let mut fk = ColumnRef::new(ft.name(), primary_key_name(&level.table)?);
        loop {
            push_unique(&mut q.tables, level.table.name.clone());
            push_unique(
                &mut q.joins,
                JoinPair {
                    left: fk,
                    right: ColumnRef::new(level.table.name.clone(), primary_key_name(&level.table)?),
                },
            );
            if !visited.iter().any(|l| std::ptr::eq(*l, level)) {
                visited.push(level);
            }
            match dim.coarser(level) {
                Some(coarser) if level.depth < target => {
                    fk = ColumnRef::new(level.table.name.clone(), primary_key_name(&coarser.table)?);
                    level = coarser;
                }
                _ => break,
            }
        }
        if let Some(attr) = random_attribute(rng, level, &[]) {
            push_unique(&mut q.attributes, attr);
        }
        ctx = Some(ChainContext {
            dimension: dim.index,
            depth: level.depth,
        });
    }
    let ctx = ctx.expect("at least one attribute is selected");

    let nb_restr = rng.gaussian_int(wp.avg_nb_restr, wp.spread, 0);
    for _ in 0..nb_restr {
        let attr = q.attributes[rng.skewed_index(q.attributes.len())].clone();
        let value = restriction_literal(wh, rng, &attr, &visited)?;
        q.conditions.push(Condition {
            attribute: attr,
            op: CmpOp::Eq,
            operand: Operand::Value(value),
        });
    }

    let measures: Vec<&str> = ft.table.measures().map(|a| a.name.as_str()).collect();
    let olap = rng.unit() < wp.prob_olap;
    if olap && !measures.is_empty() {
        let nb_aggreg = rng.gaussian_int(wp.avg_nb_aggreg, wp.spread, 1);
        for k in 1..=nb_aggreg {
            let m = measures[rng.skewed_index(measures.len())];
            q.aggregates.push(Aggregate {
                function: AggregateFn::Sum,
                measure: ColumnRef::new(ft.name(), m),
                alias: Some(format!("AGG{k}")),
            });
        }
        let op = if rng.unit() < wp.prob_cube {
            GroupingOp::Cube
        } else {
            GroupingOp::Rollup
        };
        q.group_by = Some(GroupBy {
            op,
            attributes: q.attributes.clone(),
        });
        if rng.unit() < wp.prob_having {
            let alias = q.aggregates[rng.skewed_index(q.aggregates.len())]
                .alias
                .clone()
                .expect("generated aggregates carry aliases");
            let range = wh.provenance.options.measure_range;
            let threshold = (rng.uniform_real(range.lo, range.hi)? * 100.0).floor() / 100.0;
            q.having = Some(Having {
                target: HavingTarget::Alias(alias),
                op: CmpOp::Ge,
                operand: Operand::Value(Literal::Real(threshold)),
            });
        }
    }
    Ok((q, ctx))
}

/// Successive refinements of an OLAP query, each adding one attribute of
/// the next finer level to the select and group-by lists.
pub fn generate_drill_downs(
    wh: &Warehouse,
    initial: &Query,
    ctx: ChainContext,
    wp: &WorkloadParams,
    rng: &mut SeededRng,
) -> Result<Vec<Query>> {
    if initial.group_by.is_none() {
        return Err(Error::Usage(
            "drill-downs apply to OLAP queries only".into(),
        ));
    }
    let dim = dimension_of(wh, ctx.dimension)?;
    let mut level = dim.level_at(ctx.depth)?;
    let target = rng.gaussian_int(wp.avg_nb_dd, wp.spread, 0) as usize;
    let mut chain: Vec<Query> = Vec::new();
    let mut current = initial.clone();
    while chain.len() < target {
        let Some(finer) = dim.finer(level) else {
            break;
        };
        level = finer;
        let Some(attr) = random_attribute(rng, level, &current.attributes) else {
            break;
        };
        current.attributes.push(attr.clone());
        if let Some(g) = current.group_by.as_mut() {
            g.attributes.push(attr);
        }
        chain.push(current.clone());
    }
    Ok(chain)
}

fn check_warehouse(wh: &Warehouse) -> Result<()> {
    if wh.fact_tables.is_empty() {
        return Err(Error::Structural("warehouse has no fact table".into()));
    }
    if let Some(ft) = wh.fact_tables.iter().find(|f| f.dimensions.is_empty()) {
        return Err(Error::Structural(format!("{} has no dimension", ft.name())));
    }
    Ok(())
}

/// Generates queries until at least `NB_Q` have been produced; drill-down
/// chains count towards the total.
pub fn generate_workload(
    wh: &Warehouse,
    wp: &WorkloadParams,
    rng: &mut SeededRng,
) -> Result<Workload> {
    wp.validate().into_result()?;
    check_warehouse(wh)?;
    let mut queries = Vec::with_capacity(wp.nb_q);
    let mut classes = Vec::with_capacity(wp.nb_q);
    while queries.len() < wp.nb_q {
        let (q, ctx) = generate_initial_query(wh, wp, rng)?;
        if q.is_olap() {
            let chain = generate_drill_downs(wh, &q, ctx, wp, rng)?;
            queries.push(q);
            classes.push(QueryClass::OlapInitial);
            classes.extend(std::iter::repeat(QueryClass::DrillDown).take(chain.len()));
            queries.extend(chain);
        } else {
            queries.push(q);
            classes.push(QueryClass::Extraction);
        }
    }
    Ok(Workload {
        queries,
        classes,
        provenance: WorkloadProvenance {
            seed: rng.seed(),
            params: wp.clone(),
            warehouse_seed: wh.provenance.seed,
        },
    })
}
