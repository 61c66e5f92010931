//! Batch runner for the anti-Wick spectral-gap experiments: configuration,
//! pipelines, report emission, and the acceptance battery.

pub mod config;
pub mod report;
pub mod selftest;
pub mod sweep;

pub use config::{ConfigError, SweepConfig, SymbolSpec};
pub use report::{emit_ainfty, emit_profiles, emit_report, GapReport, ProfileRow, ReportFormat};
pub use sweep::{run_ainfty, run_gap_only, run_quantize, run_semiclassical, run_sweep, SweepOutcome};
