//! Executable checks of the confined-essential, star, and measure-based
//! lower bounds, plus the averaging report.

pub mod averaging;
pub mod checks;
pub mod measure;

pub use averaging::{averaging_report, AveragingReport};
pub use checks::{
    blt_comparison, check_confined_essential, check_partition_refinement, check_pb_bound,
    check_star, confined_essential_discs, require_confined_essential, CheckReport, DEFAULT_TOL,
};
pub use measure::{Measure, MeasureKind};
