//! Discretized closed surfaces, differentiation, Poisson brackets, and
//! quadrature with respect to an area form.

pub mod chart;
pub mod dump;
pub mod field;
pub mod ops;

pub use chart::{ChartKind, SurfaceChart, DEFAULT_POLE_BAND};
pub use field::ScalarField;
pub use ops::{integrate, integrate_over, poisson_bracket, sup_norm};
