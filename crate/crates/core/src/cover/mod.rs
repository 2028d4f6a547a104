//! Disc covers and their combinatorics: membership, stars,
//! essential/confined classification, localization, capacity, degree, and
//! general position.

pub mod builders;
#[allow(clippy::module_inception)]
pub mod cover;
pub mod disc;
pub mod enclose;
pub mod general_position;
pub mod io;

pub use builders::{jittered_lattice_cover, two_caps_cover};
pub use cover::{Confinement, Cover};
pub use disc::Disc;
pub use enclose::{enclose_support_in_disc, EnclosureInfo};
pub use general_position::{
    check_general_position, GeneralPositionReport, DEFAULT_ANGLE_THRESHOLD,
};
