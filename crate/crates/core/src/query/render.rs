use std::fmt::Write;

use super::{Condition, GroupingOp, HavingTarget, Literal, Operand, Query};
use crate::error::Result;

/// Renders a query as a single line of SQL. Joins precede restrictions in
/// the WHERE clause.
pub fn render_sql(q: &Query) -> Result<String> {
    q.validate()?;
    let mut out = String::from("SELECT ");
    let mut select: Vec<String> = q.attributes.iter().map(ToString::to_string).collect();
    for a in &q.aggregates {
        let mut s = format!("{}({})", a.function.keyword(), a.measure);
        if let Some(alias) = &a.alias {
            let _ = write!(s, " AS {alias}");
        }
        select.push(s);
    }
    out.push_str(&select.join(", "));
    out.push_str(" FROM ");
    out.push_str(&q.tables.join(", "));

    let mut predicates: Vec<String> = q
        .joins
        .iter()
        .map(|j| format!("{} = {}", j.left, j.right))
        .collect();
    predicates.extend(q.conditions.iter().map(render_condition));
    if !predicates.is_empty() {
        out.push_str(" WHERE ");
        out.push_str(&predicates.join(" AND "));
    }

    if let Some(g) = &q.group_by {
        let cols: Vec<String> = g.attributes.iter().map(ToString::to_string).collect();
        let cols = cols.join(", ");
        match g.op {
            GroupingOp::None => {
                let _ = write!(out, " GROUP BY {cols}");
            }
            GroupingOp::Cube => {
                let _ = write!(out, " GROUP BY CUBE({cols})");
            }
            GroupingOp::Rollup => {
                let _ = write!(out, " GROUP BY ROLLUP({cols})");
            }
        }
    }
    if let Some(h) = &q.having {
        let target = match &h.target {
            HavingTarget::Alias(a) => a.clone(),
            HavingTarget::Aggregate(f, c) => format!("{}({c})", f.keyword()),
        };
        let _ = write!(out, " HAVING {target} {} {}", h.op.symbol(), render_operand(&h.operand));
    }
    Ok(out)
}

fn render_condition(c: &Condition) -> String {
    format!("{} {} {}", c.attribute, c.op.symbol(), render_operand(&c.operand))
}

fn render_operand(o: &Operand) -> String {
    match o {
        Operand::Column(c) => c.to_string(),
        Operand::Value(v) => render_literal(v),
        Operand::List(items) => {
            let items: Vec<String> = items.iter().map(render_literal).collect();
            format!("({})", items.join(", "))
        }
    }
}

pub(crate) fn render_literal(v: &Literal) -> String {
    match v {
        Literal::Str(s) => format!("'{}'", s.replace('\'', "''")),
        Literal::Int(i) => i.to_string(),
        // Debug keeps a decimal point or exponent, so the value reads back
        // as a real.
        Literal::Real(r) => format!("{r:?}"),
    }
}
