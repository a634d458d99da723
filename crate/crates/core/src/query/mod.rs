//! Query AST for the decision-support SQL subset: select list, SUM
//! aggregates, comma-separated FROM list, WHERE restrictions and equi-joins
//! conjoined by AND, optional GROUP BY [CUBE | ROLLUP] and HAVING.

mod parse;
mod render;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

pub use parse::{parse_check, ParseError};
pub use render::render_sql;

use crate::error::{Error, Result};

/// `table.column`
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColumnRef {
    pub table: String,
    pub column: String,
}

impl ColumnRef {
    pub fn new(table: impl Into<String>, column: impl Into<String>) -> Self {
        Self {
            table: table.into(),
            column: column.into(),
        }
    }
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.table, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AggregateFn {
    Sum,
    Avg,
    Min,
    Max,
    Count,
}

impl AggregateFn {
    pub fn keyword(self) -> &'static str {
        match self {
            AggregateFn::Sum => "SUM",
            AggregateFn::Avg => "AVG",
            AggregateFn::Min => "MIN",
            AggregateFn::Max => "MAX",
            AggregateFn::Count => "COUNT",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Some(match s.to_ascii_uppercase().as_str() {
            "SUM" => AggregateFn::Sum,
            "AVG" => AggregateFn::Avg,
            "MIN" => AggregateFn::Min,
            "MAX" => AggregateFn::Max,
            "COUNT" => AggregateFn::Count,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub function: AggregateFn,
    pub measure: ColumnRef,
    pub alias: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    In,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "<>",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::In => "IN",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Str(String),
    Int(i64),
    Real(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Column(ColumnRef),
    Value(Literal),
    List(Vec<Literal>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub attribute: ColumnRef,
    pub op: CmpOp,
    pub operand: Operand,
}

/// `left = right` between two key columns.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JoinPair {
    pub left: ColumnRef,
    pub right: ColumnRef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupingOp {
    None,
    Cube,
    Rollup,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupBy {
    pub op: GroupingOp,
    pub attributes: Vec<ColumnRef>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HavingTarget {
    Alias(String),
    Aggregate(AggregateFn, ColumnRef),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Having {
    pub target: HavingTarget,
    pub op: CmpOp,
    pub operand: Operand,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Query {
    pub attributes: Vec<ColumnRef>,
    pub aggregates: Vec<Aggregate>,
    pub tables: Vec<String>,
    pub conditions: Vec<Condition>,
    pub joins: Vec<JoinPair>,
    pub group_by: Option<GroupBy>,
    pub having: Option<Having>,
}

impl Query {
    pub fn is_olap(&self) -> bool {
        self.group_by.is_some()
    }

    /// Checks the structural rules of the query model; the first broken
    /// rule is reported.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Structural(msg));
        if self.attributes.is_empty() && self.aggregates.is_empty() {
            return fail("select list needs at least one attribute or aggregate".into());
        }
        if self.tables.is_empty() {
            return fail("table clause is empty".into());
        }
        let tables: HashSet<&str> = self.tables.iter().map(String::as_str).collect();
        if tables.len() != self.tables.len() {
            return fail("table clause lists a table twice".into());
        }
        if self.having.is_some() && self.group_by.is_none() {
            return fail("HAVING requires GROUP BY".into());
        }
        if self.group_by.is_some() && self.aggregates.is_empty() {
            return fail("GROUP BY requires at least one aggregate".into());
        }
        if let Some(g) = &self.group_by {
            if g.attributes.is_empty() {
                return fail("GROUP BY list is empty".into());
            }
        }
        let check = |c: &ColumnRef| -> Result<()> {
            if tables.contains(c.table.as_str()) {
                Ok(())
            } else {
                Err(Error::Structural(format!(
                    "{c} references a table missing from the FROM clause"
                )))
            }
        };
        for c in &self.attributes {
            check(c)?;
        }
        for a in &self.aggregates {
            check(&a.measure)?;
        }
        for c in &self.conditions {
            check(&c.attribute)?;
            match (&c.operand, c.op) {
                (Operand::Column(_), CmpOp::Eq) => {
                    return fail(format!(
                        "attribute equality {} = ... belongs in the join clause",
                        c.attribute
                    ))
                }
                (Operand::Column(col), _) => check(col)?,
                (Operand::List(items), CmpOp::In) if !items.is_empty() => {}
                (Operand::List(_), _) | (_, CmpOp::In) => {
                    return fail(format!("condition on {} misuses a value list", c.attribute))
                }
                _ => {}
            }
        }
        for j in &self.joins {
            check(&j.left)?;
            check(&j.right)?;
        }
        if let Some(g) = &self.group_by {
            for c in &g.attributes {
                check(c)?;
            }
        }
        if let Some(h) = &self.having {
            match &h.target {
                HavingTarget::Alias(alias) => {
                    if !self
                        .aggregates
                        .iter()
                        .any(|a| a.alias.as_deref() == Some(alias.as_str()))
                    {
                        return fail(format!("HAVING references unknown alias {alias}"));
                    }
                }
                HavingTarget::Aggregate(_, c) => check(c)?,
            }
            if matches!(h.operand, Operand::Column(_)) {
                return fail("HAVING compares against a value or value list".into());
            }
        }
        let mut aliases = HashSet::new();
        for a in &self.aggregates {
            if let Some(alias) = &a.alias {
                if !aliases.insert(alias) {
                    return fail(format!("duplicate aggregate alias {alias}"));
                }
            }
        }
        if !self.join_graph_connected() {
            return fail("join clause does not connect every table to the first one".into());
        }
        Ok(())
    }

    /// True when every table in the FROM list is reachable from the first
    /// through join equalities.
    pub fn join_graph_connected(&self) -> bool {
        let Some(root) = self.tables.first() else {
            return false;
        };
        let mut adj: HashMap<&str, Vec<&str>> = HashMap::new();
        for j in &self.joins {
            adj.entry(&j.left.table).or_default().push(&j.right.table);
            adj.entry(&j.right.table).or_default().push(&j.left.table);
        }
        let mut seen = BTreeSet::from([root.as_str()]);
        let mut queue = VecDeque::from([root.as_str()]);
        while let Some(t) = queue.pop_front() {
            for &n in adj.get(t).into_iter().flatten() {
                if seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        self.tables.iter().all(|t| seen.contains(t.as_str()))
    }
}
