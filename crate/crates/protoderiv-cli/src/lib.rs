//! Command drivers, report assembly, and SVG rendering behind the
//! `protoderiv` binary. The binary stays a thin flag-merging shell so
//! integration tests can call the same builders directly.

pub mod commands;
pub mod report;
pub mod svg;

pub use commands::{GraphicalLimitConfig, Lemma1Config, PlotBumpsConfig, ResolventDdConfig};
pub use report::{ExperimentReport, SummaryCheck};
