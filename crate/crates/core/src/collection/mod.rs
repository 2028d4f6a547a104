//! Positive collections and partitions of unity: validation, the bracket
//! functions `P_F` and `P_{F,G}`, condensation, fragmentation, and the pb
//! invariant.

pub mod builders;
#[allow(clippy::module_inception)]
pub mod collection;
pub mod io;
pub mod ops;
pub mod pb;

pub use builders::{bump_collection, two_caps_partition};
pub use collection::{CollectionMode, PositiveCollection, ValidationReport, MODE_TOL};
pub use ops::{condense, fragment};
pub use pb::{
    pb_function, pb_invariant, pb_pair_function, sup_pb, PbMethod, PB_EXACT_MAX_FIELDS,
};
