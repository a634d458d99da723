//! Instantiated warehouse metaschema: fact tables, dimensions and their
//! hierarchy levels, each described by an intention (attribute list) and an
//! extension (tuple list).
//!
//! A dimension holds one linear hierarchy. Levels are addressed by depth,
//! depth 1 being the finest (entry) level. Navigation uses the terms
//! *coarser* (towards the smaller, higher level) and *finer* (towards the
//! entry level); in the classic pseudo-code these links are named `child`
//! and `parent` respectively.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::params::LowLevelParams;
use crate::rng::{SeededRng, StringReferential};
use crate::schema::GenerationOptions;

/// Address of a hierarchy level: 1-based dimension index and depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LevelRef {
    pub dimension: usize,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttributeKind {
    PrimaryKey,
    ForeignKey(LevelRef),
    Descriptor,
    Measure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

impl Attribute {
    pub fn new(name: impl Into<String>, kind: AttributeKind) -> Self {
        Self {
            name: name.into(),
            kind,
        }
    }

    pub fn is_key(&self) -> bool {
        matches!(
            self.kind,
            AttributeKind::PrimaryKey | AttributeKind::ForeignKey(_)
        )
    }

    pub fn target_level(&self) -> Option<LevelRef> {
        match self.kind {
            AttributeKind::ForeignKey(target) => Some(target),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Key(i32),
    Str(String),
    Measure(f32),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Key(k) => write!(f, "{k}"),
            Value::Str(s) => f.write_str(s),
            Value::Measure(m) => write!(f, "{m}"),
        }
    }
}

impl Value {
    pub fn as_key(&self) -> Option<i32> {
        match self {
            Value::Key(k) => Some(*k),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tuple {
    pub values: Vec<Value>,
}

/// Intention plus extension, shared by levels and fact tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub intention: Vec<Attribute>,
    pub extension: Vec<Tuple>,
}

impl Table {
    pub fn new(name: impl Into<String>, intention: Vec<Attribute>) -> Self {
        Self {
            name: name.into(),
            intention,
            extension: Vec::new(),
        }
    }

    pub fn cardinality(&self) -> usize {
        self.extension.len()
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.intention.iter().position(|a| a.name == name)
    }

    pub fn attribute(&self, name: &str) -> Option<&Attribute> {
        self.intention.iter().find(|a| a.name == name)
    }

    pub fn primary_key(&self) -> Option<&Attribute> {
        self.intention
            .iter()
            .find(|a| a.kind == AttributeKind::PrimaryKey)
    }

    pub fn foreign_keys(&self) -> impl Iterator<Item = (usize, &Attribute)> {
        self.intention
            .iter()
            .enumerate()
            .filter(|(_, a)| matches!(a.kind, AttributeKind::ForeignKey(_)))
    }

    pub fn descriptors(&self) -> impl Iterator<Item = &Attribute> {
        self.intention
            .iter()
            .filter(|a| a.kind == AttributeKind::Descriptor)
    }

    pub fn measures(&self) -> impl Iterator<Item = &Attribute> {
        self.intention
            .iter()
            .filter(|a| a.kind == AttributeKind::Measure)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyLevel {
    pub table: Table,
    pub depth: usize,
}

impl HierarchyLevel {
    pub fn name(&self) -> &str {
        &self.table.name
    }

    pub fn cardinality(&self) -> usize {
        self.table.cardinality()
    }

    /// A skewed, always valid primary-key value of this level.
    pub fn random_key(&self, rng: &mut SeededRng) -> Result<i32> {
        if self.table.extension.is_empty() {
            return Err(Error::GenerationOrder(format!(
                "level {} has no tuples to reference",
                self.table.name
            )));
        }
        let card = i32::try_from(self.cardinality())
            .map_err(|_| Error::Range(format!("level {} exceeds 32-bit keys", self.name())))?;
        Ok(rng.skewed_key(card))
    }
}

/// One dimension with a single linear hierarchy.
#[derive(Debug, Clone, PartialEq)]
pub struct Dimension {
    pub index: usize,
    /// Levels ordered from the entry (finest, depth 1) level to the coarsest.
    pub levels: Vec<HierarchyLevel>,
}

impl Dimension {
    pub fn nb_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn entry_level(&self) -> &HierarchyLevel {
        &self.levels[0]
    }

    pub fn coarsest_level(&self) -> &HierarchyLevel {
        self.levels.last().expect("dimension has at least one level")
    }

    pub fn level_at(&self, depth: usize) -> Result<&HierarchyLevel> {
        if depth == 0 || depth > self.levels.len() {
            return Err(Error::Range(format!(
                "dimension {} has {} level(s); depth {depth} is out of range",
                self.index,
                self.levels.len()
            )));
        }
        Ok(&self.levels[depth - 1])
    }

    pub fn coarser(&self, level: &HierarchyLevel) -> Option<&HierarchyLevel> {
        self.levels.get(level.depth)
    }

    pub fn finer(&self, level: &HierarchyLevel) -> Option<&HierarchyLevel> {
        level
            .depth
            .checked_sub(2)
            .and_then(|idx| self.levels.get(idx))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactTable {
    pub table: Table,
    /// 1-based indices into the warehouse dimension pool.
    pub dimensions: Vec<usize>,
}

impl FactTable {
    pub fn name(&self) -> &str {
        &self.table.name
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub seed: u64,
    pub low: LowLevelParams,
    pub options: GenerationOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Warehouse {
    pub fact_tables: Vec<FactTable>,
    pub dimensions: Vec<Dimension>,
    /// Pool that descriptor values were drawn from.
    pub referential: StringReferential,
    pub provenance: Provenance,
}

/// A dangling foreign-key value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub table: String,
    pub attribute: String,
    pub tuple_index: usize,
    pub value: i64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}.{} tuple {}: value {} has no matching primary key",
            self.table, self.attribute, self.tuple_index, self.value
        )
    }
}

impl Warehouse {
    pub fn dimension(&self, index: usize) -> Option<&Dimension> {
        index
            .checked_sub(1)
            .and_then(|i| self.dimensions.get(i))
            .filter(|d| d.index == index)
            .or_else(|| self.dimensions.iter().find(|d| d.index == index))
    }

    pub fn level(&self, r: LevelRef) -> Option<&HierarchyLevel> {
        self.dimension(r.dimension)
            .and_then(|d| d.level_at(r.depth).ok())
    }

    /// Every table in dependency order: per dimension the coarsest level
    /// first, then the fact tables.
    pub fn tables(&self) -> Vec<&Table> {
        let mut out: Vec<&Table> = self
            .dimensions
            .iter()
            .flat_map(|d| d.levels.iter().rev().map(|l| &l.table))
            .collect();
        out.extend(self.fact_tables.iter().map(|f| &f.table));
        out
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables().into_iter().find(|t| t.name == name)
    }

    pub fn check_referential_integrity(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        for table in self.tables() {
            for (col, attr) in table.foreign_keys() {
                let target = attr.target_level().expect("foreign key has a target");
                let valid: HashSet<i64> = match self.level(target) {
                    Some(level) => primary_key_values(&level.table),
                    None => HashSet::new(),
                };
                for (i, tuple) in table.extension.iter().enumerate() {
                    let value = match tuple.values.get(col) {
                        Some(Value::Key(k)) => i64::from(*k),
                        _ => i64::MIN,
                    };
                    if !valid.contains(&value) {
                        violations.push(Violation {
                            table: table.name.clone(),
                            attribute: attr.name.clone(),
                            tuple_index: i,
                            value,
                        });
                    }
                }
            }
        }
        violations
    }
}

fn primary_key_values(table: &Table) -> HashSet<i64> {
    let Some(pk) = table
        .intention
        .iter()
        .position(|a| a.kind == AttributeKind::PrimaryKey)
    else {
        return HashSet::new();
    };
    table
        .extension
        .iter()
        .filter_map(|t| t.values.get(pk).and_then(Value::as_key))
        .map(i64::from)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level(dim: usize, depth: usize, card: i32, coarser: bool) -> HierarchyLevel {
        let name = format!("DIM{dim}_{depth}");
        let mut intention = vec![Attribute::new(
            format!("{name}_PK"),
            AttributeKind::PrimaryKey,
        )];
        if coarser {
            intention.push(Attribute::new(
                format!("DIM{dim}_{}_PK", depth + 1),
                AttributeKind::ForeignKey(LevelRef {
                    dimension: dim,
                    depth: depth + 1,
                }),
            ));
        }
        let mut table = Table::new(name, intention);
        for k in 1..=card {
            let mut values = vec![Value::Key(k)];
            if coarser {
                values.push(Value::Key(1));
            }
            table.extension.push(Tuple { values });
        }
        HierarchyLevel { table, depth }
    }

    fn three_level_dim() -> Dimension {
        Dimension {
            index: 1,
            levels: vec![
                level(1, 1, 100, true),
                level(1, 2, 10, true),
                level(1, 3, 2, false),
            ],
        }
    }

    #[test]
    fn level_at_navigation() {
        let d = three_level_dim();
        assert_eq!(d.level_at(1).unwrap(), d.entry_level());
        let top = d.level_at(3).unwrap();
        assert!(d.coarser(top).is_none());
        assert_eq!(d.finer(top).unwrap().depth, 2);
        assert!(d.finer(d.entry_level()).is_none());
        assert!(d.level_at(0).is_err());
        assert!(d.level_at(4).is_err());
    }

    #[test]
    fn level_at_out_of_range_names_dimension_and_depth() {
        let d = Dimension {
            index: 4,
            levels: vec![level(4, 1, 5, true), level(4, 2, 1, false)],
        };
        let msg = d.level_at(3).unwrap_err().to_string();
        assert!(msg.contains("dimension 4") && msg.contains("depth 3"), "{msg}");
    }

    #[test]
    fn coarser_and_finer_are_mutually_consistent() {
        let d = three_level_dim();
        for l in &d.levels {
            if let Some(c) = d.coarser(l) {
                assert_eq!(d.finer(c).unwrap(), l);
            }
        }
    }

    #[test]
    fn random_key_on_empty_level_errors() {
        let l = HierarchyLevel {
            table: Table::new("DIM1_1", vec![]),
            depth: 1,
        };
        assert!(matches!(
            l.random_key(&mut SeededRng::new(1)),
            Err(Error::GenerationOrder(_))
        ));
    }
}
