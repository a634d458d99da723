//! Recursive-descent parser for exactly the query subset that
//! [`render_sql`](super::render_sql) produces, plus the wider operand forms
//! the query model admits (attribute comparisons and value lists).

use std::fmt;

use thiserror::Error;

use super::{
    Aggregate, AggregateFn, CmpOp, ColumnRef, Condition, GroupBy, GroupingOp, Having,
    HavingTarget, JoinPair, Literal, Operand, Query,
};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at byte {position}: expected {}, found {found}", expected.join(" | "))]
pub struct ParseError {
    pub position: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Int(i64),
    Real(f64),
    Comma,
    Dot,
    LParen,
    RParen,
    Semi,
    Op(CmpOp),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Str(s) => write!(f, "string '{s}'"),
            Tok::Int(i) => write!(f, "number {i}"),
            Tok::Real(r) => write!(f, "number {r}"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Op(op) => write!(f, "`{}`", op.symbol()),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const KEYWORDS: &[&str] = &[
    "SELECT", "FROM", "WHERE", "AND", "OR", "GROUP", "BY", "CUBE", "ROLLUP", "HAVING", "AS", "IN",
];

fn is_keyword(s: &str) -> bool {
    KEYWORDS.iter().any(|k| k.eq_ignore_ascii_case(s))
}

fn tokenize(sql: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = sql.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    let err = |pos: usize, expected: &str, found: String| ParseError {
        position: pos,
        expected: vec![expected.to_string()],
        found,
    };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b',' => {
                toks.push((start, Tok::Comma));
                i += 1;
            }
            b'.' if !bytes.get(i + 1).is_some_and(u8::is_ascii_digit) => {
                toks.push((start, Tok::Dot));
                i += 1;
            }
            b'(' => {
                toks.push((start, Tok::LParen));
                i += 1;
            }
            b')' => {
                toks.push((start, Tok::RParen));
                i += 1;
            }
            b';' => {
                toks.push((start, Tok::Semi));
                i += 1;
            }
            b'=' => {
                toks.push((start, Tok::Op(CmpOp::Eq)));
                i += 1;
            }
            b'<' | b'>' | b'!' => {
                let next = bytes.get(i + 1).copied();
                let (op, len) = match (c, next) {
                    (b'<', Some(b'=')) => (CmpOp::Le, 2),
                    (b'<', Some(b'>')) => (CmpOp::Ne, 2),
                    (b'<', _) => (CmpOp::Lt, 1),
                    (b'>', Some(b'=')) => (CmpOp::Ge, 2),
                    (b'>', _) => (CmpOp::Gt, 1),
                    (b'!', Some(b'=')) => (CmpOp::Ne, 2),
                    _ => return Err(err(start, "comparison operator", "`!`".into())),
                };
                toks.push((start, Tok::Op(op)));
                i += len;
            }
            b'\'' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match sql[i..].find('\'') {
                        None => {
                            return Err(err(start, "closing quote", "end of input".into()));
                        }
                        Some(off) => {
                            s.push_str(&sql[i..i + off]);
                            i += off + 1;
                            if bytes.get(i) == Some(&b'\'') {
                                s.push('\'');
                                i += 1;
                            } else {
                                break;
                            }
                        }
                    }
                }
                toks.push((start, Tok::Str(s)));
            }
            b'0'..=b'9' | b'-' | b'.' => {
                i += 1;
                while i < bytes.len()
                    && (bytes[i].is_ascii_digit()
                        || bytes[i] == b'.'
                        || bytes[i] == b'e'
                        || bytes[i] == b'E'
                        || ((bytes[i] == b'-' || bytes[i] == b'+')
                            && matches!(bytes[i - 1], b'e' | b'E')))
                {
                    i += 1;
                }
                let text = &sql[start..i];
                let tok = if text.contains(['.', 'e', 'E']) {
                    text.parse().map(Tok::Real).ok()
                } else {
                    text.parse().map(Tok::Int).ok()
                };
                match tok {
                    Some(t) => toks.push((start, t)),
                    None => return Err(err(start, "number", format!("`{text}`"))),
                }
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((start, Tok::Ident(sql[start..i].to_string())));
            }
            _ => {
                let ch = sql[i..].chars().next().unwrap_or('?');
                return Err(err(start, "SQL token", format!("`{ch}`")));
            }
        }
    }
    toks.push((sql.len(), Tok::Eof));
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.toks[self.pos].0,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s.eq_ignore_ascii_case(kw))
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            self.error(&[kw])
        }
    }

    fn expect(&mut self, tok: Tok, label: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(&[label])
        }
    }

    fn identifier(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(s) if !is_keyword(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.error(&[what]),
        }
    }

    fn column(&mut self) -> Result<ColumnRef, ParseError> {
        let table = self.identifier("qualified attribute name")?;
        self.expect(Tok::Dot, "`.`")?;
        let column = self.identifier("attribute name")?;
        Ok(ColumnRef { table, column })
    }

    fn at_aggregate(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if AggregateFn::from_keyword(s).is_some())
            && *self.peek_at(1) == Tok::LParen
    }

    fn aggregate_call(&mut self) -> Result<(AggregateFn, ColumnRef), ParseError> {
        let Tok::Ident(name) = self.bump() else {
            unreachable!("checked by at_aggregate")
        };
        let function = AggregateFn::from_keyword(&name).expect("checked by at_aggregate");
        self.expect(Tok::LParen, "`(`")?;
        let measure = self.column()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok((function, measure))
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(Literal::Str(s))
            }
            Tok::Int(i) => {
                self.bump();
                Ok(Literal::Int(i))
            }
            Tok::Real(r) => {
                self.bump();
                Ok(Literal::Real(r))
            }
            _ => self.error(&["literal value"]),
        }
    }

    fn literal_list(&mut self) -> Result<Vec<Literal>, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut items = vec![self.literal()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            items.push(self.literal()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(items)
    }

    fn comparison(&mut self) -> Result<CmpOp, ParseError> {
        if let Tok::Op(op) = *self.peek() {
            self.bump();
            Ok(op)
        } else if self.eat_keyword("IN") {
            Ok(CmpOp::In)
        } else {
            self.error(&["comparison operator"])
        }
    }

    fn operand(&mut self, op: CmpOp, allow_column: bool) -> Result<Operand, ParseError> {
        if op == CmpOp::In {
            return Ok(Operand::List(self.literal_list()?));
        }
        match self.peek() {
            Tok::Ident(_) if allow_column => Ok(Operand::Column(self.column()?)),
            _ => Ok(Operand::Value(self.literal()?)),
        }
    }

    fn query(&mut self) -> Result<Query, ParseError> {
        let mut q = Query::default();
        self.expect_keyword("SELECT")?;
        loop {
            if self.at_aggregate() {
                let (function, measure) = self.aggregate_call()?;
                let alias = if self.eat_keyword("AS") {
                    Some(self.identifier("alias")?)
                } else {
                    None
                };
                q.aggregates.push(Aggregate {
                    function,
                    measure,
                    alias,
                });
            } else if !q.aggregates.is_empty() {
                // attributes precede aggregates in the select list
                return self.error(&["aggregate function"]);
            } else {
                q.attributes.push(self.column()?);
            }
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.expect_keyword("FROM")?;
        q.tables.push(self.identifier("table name")?);
        while *self.peek() == Tok::Comma {
            self.bump();
            q.tables.push(self.identifier("table name")?);
        }
        if self.eat_keyword("WHERE") {
            loop {
                let attribute = self.column()?;
                let op = self.comparison()?;
                let operand = self.operand(op, true)?;
                match (op, operand) {
                    (CmpOp::Eq, Operand::Column(right)) => q.joins.push(JoinPair {
                        left: attribute,
                        right,
                    }),
                    (op, operand) => q.conditions.push(Condition {
                        attribute,
                        op,
                        operand,
                    }),
                }
                if !self.eat_keyword("AND") {
                    break;
                }
            }
        }
        if self.eat_keyword("GROUP") {
            self.expect_keyword("BY")?;
            let op = if self.eat_keyword("CUBE") {
                GroupingOp::Cube
            } else if self.eat_keyword("ROLLUP") {
                GroupingOp::Rollup
            } else {
                GroupingOp::None
            };
            if op != GroupingOp::None {
                self.expect(Tok::LParen, "`(`")?;
            }
            let mut attributes = vec![self.column()?];
            while *self.peek() == Tok::Comma {
                self.bump();
                attributes.push(self.column()?);
            }
            if op != GroupingOp::None {
                self.expect(Tok::RParen, "`)`")?;
            }
            q.group_by = Some(GroupBy { op, attributes });
        }
        if self.eat_keyword("HAVING") {
            let target = if self.at_aggregate() {
                let (f, c) = self.aggregate_call()?;
                HavingTarget::Aggregate(f, c)
            } else {
                HavingTarget::Alias(self.identifier("alias or aggregate")?)
            };
            let op = self.comparison()?;
            let operand = self.operand(op, false)?;
            q.having = Some(Having {
                target,
                op,
                operand,
            });
        }
        if *self.peek() == Tok::Semi {
            self.bump();
        }
        if *self.peek() != Tok::Eof {
            let mut expected = vec!["end of statement"];
            if q.group_by.is_none() {
                expected.push("GROUP BY");
            }
            if q.having.is_none() {
                expected.push("HAVING");
            }
            return self.error(&expected);
        }
        Ok(q)
    }
}

/// Parses one statement of the query subset and checks its structural
/// rules. Rule violations are reported as parse errors at the end of input.
pub fn parse_check(sql: &str) -> Result<Query, ParseError> {
    let toks = tokenize(sql)?;
    let mut parser = Parser { toks, pos: 0 };
    let q = parser.query()?;
    if let Err(e) = q.validate() {
        return Err(ParseError {
            position: sql.len(),
            expected: vec!["well-formed query".into()],
            found: e.to_string(),
        });
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::render_sql;

    #[test]
    fn empty_select_list_is_rejected() {
        let err = parse_check("SELECT FROM FT1").unwrap_err();
        assert_eq!(err.position, 7);
    }

    #[test]
    fn having_without_aggregate_is_rejected() {
        let err = parse_check(
            "SELECT DIM1_1.A FROM FT1, DIM1_1 WHERE FT1.K = DIM1_1.K \
             GROUP BY CUBE(DIM1_1.A) HAVING s >= 1.0",
        )
        .unwrap_err();
        assert!(err.found.contains("aggregate"), "{err}");
    }

    #[test]
    fn rejects_constructs_outside_the_subset() {
        for sql in [
            "SELECT FT1.A FROM FT1 ORDER BY FT1.A",
            "SELECT FT1.A FROM FT1 WHERE FT1.A = (SELECT 1)",
            "SELECT FT1.A FROM FT1 LEFT OUTER JOIN DIM1_1",
            "SELECT A FROM FT1",
            "SELECT FT1.A FROM FT1 WHERE FT1.A = 1 OR FT1.A = 2",
        ] {
            assert!(parse_check(sql).is_err(), "{sql}");
        }
    }

    #[test]
    fn accepts_wider_operands() {
        let q = parse_check(
            "select FT1.A, sum(FT1.M) from FT1 where FT1.A < FT1.B and FT1.C in ('x', 'y''z') \
             group by FT1.A having SUM(FT1.M) >= 1e3;",
        )
        .unwrap();
        assert_eq!(q.conditions.len(), 2);
        assert_eq!(
            q.conditions[1].operand,
            Operand::List(vec![Literal::Str("x".into()), Literal::Str("y'z".into())])
        );
        assert_eq!(q.group_by.as_ref().unwrap().op, GroupingOp::None);
        let again = parse_check(&render_sql(&q).unwrap()).unwrap();
        assert_eq!(again, q);
    }

    #[test]
    fn error_reports_position_and_expectations() {
        let err = parse_check("SELECT FT1.A FROM").unwrap_err();
        assert_eq!(err.position, 17);
        assert_eq!(err.expected, vec!["table name".to_string()]);
        assert_eq!(err.found, "end of input");
    }

    #[test]
    fn negative_and_real_literals() {
        let q = parse_check("SELECT FT1.A FROM FT1 WHERE FT1.A >= -3 AND FT1.B < 2.5").unwrap();
        assert_eq!(q.conditions[0].operand, Operand::Value(Literal::Int(-3)));
        assert_eq!(q.conditions[1].operand, Operand::Value(Literal::Real(2.5)));
    }
}
