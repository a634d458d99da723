//! Synthetic data warehouse benchmark toolkit.
//!
//! Generates parameterized star, snowflake and constellation warehouses,
//! matching decision-support workloads over them, emits portable artifacts
//! (DDL, CSV data, INSERT script, workload SQL, manifest) and times
//! workloads against a SQL engine under a replicated protocol.

pub mod cli;
pub mod config;
pub mod emit;
pub mod error;
pub mod harness;
pub mod model;
pub mod params;
pub mod query;
pub mod rng;
pub mod schema;
pub mod workload;

pub use error::{Error, Result};
pub use model::{Dimension, FactTable, HierarchyLevel, Warehouse};
pub use params::{derive_low_level, HighLevelParams, LowLevelParams, WorkloadParams};
pub use query::{parse_check, render_sql, Query};
pub use rng::{SeededRng, StringReferential};
pub use schema::{generate_warehouse, estimate_size, GenerationOptions, ParamSource, SizeReport};
pub use workload::{generate_workload, QueryClass, Workload};
