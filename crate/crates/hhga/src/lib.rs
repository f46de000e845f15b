//! Command-line harness over `hhga-core`: convexity checks, single-point
//! verification, grid sweeps with CSV/JSON/SVG output, and bound ranking.

pub mod args;
pub mod grid;
pub mod plot;
pub mod report;
pub mod run;

pub use run::run;
