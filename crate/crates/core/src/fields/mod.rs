//! Constructors and smooth surgery on scalar fields: bumps, mollification,
//! local flattening, and support-component extraction.

pub mod profile;
pub mod shapes;
pub mod sharpness;
pub mod surgery;

pub use profile::{Profile, ProfileKind};
pub use shapes::{bump_disc, cap_field, z_ramp};
pub use sharpness::{sharpness_disc_field, sharpness_field, SharpnessParams, SharpnessRole};
pub use surgery::{bracket_sup_increase, flatten_on_disc, mollify, support_components};
