//! Covering maps and the pullback/fragmentation machinery, including
//! corrected area forms near branch points.

pub mod map;
pub mod ops;
pub mod weierstrass;

pub use map::{
    corrected_area_form, BranchPoint, BranchRegion, CorrectionReport, CorrectionSpec,
    CoveringMap, MapKind,
};
pub use ops::{lift_collection, lift_cover, pull_back_field, LiftedCover};
pub use weierstrass::SquareLattice;
