//! Repository security-health scanning.
//!
//! `scorehound` evaluates a repository checkout against a suite of heuristic
//! supply-chain security checks, combines them into a risk-weighted
//! aggregate, and summarises many scan results into ecosystem-level
//! frequency tables.
//!
//! The usual flow is [`repo::load_snapshot`] followed by
//! [`scoring::run_all_checks`]; [`stats`] consumes the resulting reports.

pub mod check;
pub mod deps;
pub mod error;
pub mod hygiene;
pub mod intel;
pub mod repo;
pub mod scoring;
pub mod stats;
pub mod workflow;
mod yaml;

pub use check::{CheckName, CheckResult, Detail, RiskLevel, Score};
pub use error::{Error, Result};
pub use intel::{IntelSource, IntelStore, RepoId};
pub use repo::{load_snapshot, RepoSnapshot};
pub use scoring::{aggregate_score, run_all_checks, Aggregate, ScoreReport};
