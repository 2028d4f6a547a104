//! Numerical toolkit for Poisson bracket functions of positive collections
//! subordinated to disc covers of closed surfaces.
//!
//! The library discretizes two charts (a flat torus and the round sphere in
//! cylindrical coordinates), and provides on top of them:
//!
//! - [`geometry`]: grid fields, Poisson brackets `{f,g}`, quadrature against
//!   an area form, and a small binary field-dump format;
//! - [`fields`]: smooth field constructors and surgery (bumps, mollification,
//!   local flattening, support components);
//! - [`cover`]: disc covers and their combinatorics (stars, essential and
//!   confined discs, localization, capacity, degree, general position);
//! - [`collection`]: positive collections and partitions of unity, the
//!   bracket functions `P_F` and `P_{F,G}`, condensation / fragmentation, and
//!   the pb invariant (exact small-N and sandwich bounds);
//! - [`lift`]: covering maps (torus self-covers, the sphere squaring map, the
//!   Weierstrass torus-to-sphere map) with pullbacks and corrected area forms
//!   near branch points;
//! - [`verify`]: executable checks of the confined-essential, star, and
//!   measure-based lower bounds, plus an averaging report;
//! - [`optimize`]: projected-gradient minimization of bracket norms over a
//!   fixed cover, Moser rescaling, and the sharp example family.
//!
//! All kernels are pure and sequential; reductions use a fixed pairwise tree
//! so results are bit-reproducible. Values are `Send + Sync` and callers may
//! evaluate independent operations concurrently.

pub mod collection;
pub mod cover;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod lift;
pub mod optimize;
pub mod sum;
pub mod topo;
pub mod verify;

pub use error::{Error, Result};
