//! Numerical minimization of bracket norms over a fixed cover, Moser
//! rescaling, and the sharp example builder.

pub mod diffeo;
pub mod minimize;
pub mod moser;
pub mod poisson_fft;
pub mod sharpness;
pub mod transport;

pub use diffeo::DiffeoGrid;
pub use minimize::{gradient_check, minimize_pb, Objective, OptimTrace, OptimizerParams, PbObjective};
pub use moser::{moser_rescale, pullback_residual, MoserReport, MOSER_TIME_STEPS};
pub use sharpness::build_sharpness_example;
pub use transport::{apply_diffeo_collection, apply_diffeo_cover};
