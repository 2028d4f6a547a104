//! Executable checks of the proved lower bounds.
//!
//! Every check machine-verifies the hypotheses it can (validity of the
//! collection, essentiality, confinement, localization) and refuses to apply
//! a bound whose hypotheses fail: the two-cap data shows the sphere bounds
//! are simply false without them.

use crate::collection::collection::{CollectionMode, PositiveCollection};
use crate::collection::pb::pb_function;
use crate::cover::cover::Cover;
use crate::error::{Error, Result};
use crate::geometry::chart::ChartKind;
use crate::geometry::field::ScalarField;
use crate::geometry::ops::{integrate, integrate_over, poisson_bracket};
use crate::verify::measure::Measure;

/// Default relative tolerance of theorem checks (all error sources are
/// second order at the default grids).
pub const DEFAULT_TOL: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub id: String,
    pub value: f64,
    pub bound: f64,
    /// `value - bound` for lower-bound checks.
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub provenance: String,
}

impl CheckReport {
    pub fn lower_bound(
        id: impl Into<String>,
        value: f64,
        bound: f64,
        tolerance: f64,
        provenance: impl Into<String>,
    ) -> CheckReport {
        let margin = value - bound;
        CheckReport {
            id: id.into(),
            value,
            bound,
            margin,
            tolerance,
            pass: margin >= -tolerance * bound.abs().max(1.0),
            provenance: provenance.into(),
        }
    }

    /// Upper-bound orientation (used by diagnostic rows like `sup P`).
    pub fn upper_bound(
        id: impl Into<String>,
        value: f64,
        bound: f64,
        tolerance: f64,
        provenance: impl Into<String>,
    ) -> CheckReport {
        let margin = bound - value;
        CheckReport {
            id: id.into(),
            value,
            bound,
            margin,
            tolerance,
            pass: margin >= -tolerance * bound.abs().max(1.0),
            provenance: provenance.into(),
        }
    }
}

/// `sum_i |{f_i, f_j}|` as a field.
fn bracket_row(coll: &PositiveCollection, j: usize) -> Result<ScalarField> {
    let chart = coll.chart().clone();
    let mut acc = vec![0.0f64; chart.len()];
    for (i, f) in coll.fields().iter().enumerate() {
        if i == j {
            continue;
        }
        let b = poisson_bracket(f, &coll.fields()[j])?;
        for (a, &v) in acc.iter_mut().zip(b.samples()) {
            *a += v.abs();
        }
    }
    ScalarField::from_samples(&chart, acc)
}

fn require_valid(coll: &PositiveCollection, cover: &Cover) -> Result<()> {
    coll.validate_strict(cover)
        .map_err(|e| Error::PreconditionFailed(format!("collection invalid: {e}")))
}

/// Checks that disc `j` is essential and its witness star (the disc itself)
/// is confined; returns the witness node.
pub fn require_confined_essential(cover: &Cover, j: usize) -> Result<usize> {
    let witness = cover
        .essential_witness(j)
        .ok_or_else(|| Error::PreconditionFailed(format!("disc {j} is not essential")))?;
    if !cover.is_confined(witness).is_confined() {
        return Err(Error::PreconditionFailed(format!(
            "disc {j} is essential but not confined"
        )));
    }
    Ok(witness)
}

/// Essential discs whose witness star is confined.
pub fn confined_essential_discs(cover: &Cover) -> Vec<usize> {
    cover
        .essential_discs()
        .iter()
        .copied()
        .filter(|&j| require_confined_essential(cover, j).is_ok())
        .collect()
}

/// The confined-essential bound: `int_{U_j} sum_i |{f_i, f_j}| omega >= 1`.
pub fn check_confined_essential(
    cover: &Cover,
    coll: &PositiveCollection,
    j: usize,
    tolerance: f64,
) -> Result<CheckReport> {
    require_valid(coll, cover)?;
    require_confined_essential(cover, j)?;
    // every field assigned to disc j contributes to the row
    let mut value = 0.0;
    for (idx, &disc) in coll.disc_of().iter().enumerate() {
        if disc == j {
            let row = bracket_row(coll, idx)?;
            value += integrate_over(&row, cover.discs()[j].mask());
        }
    }
    Ok(CheckReport::lower_bound(
        format!("confined_essential[{j}]"),
        value,
        1.0,
        tolerance,
        "confined essential disc bound",
    ))
}

/// The star bound at a node: bound 1 on the torus; on the sphere 1 for
/// confined stars, and with a declared 3-localization 1 at the localization
/// points and 1/4 elsewhere.
pub fn check_star(
    cover: &Cover,
    coll: &PositiveCollection,
    x: usize,
    localization: Option<&[usize]>,
    tolerance: f64,
) -> Result<CheckReport> {
    require_valid(coll, cover)?;
    let chart = cover.chart();
    let (bound, provenance) = match chart.kind() {
        ChartKind::Torus => (1.0, "star bound, genus >= 1".to_string()),
        ChartKind::SphereCyl => {
            if cover.is_confined(x).is_confined() {
                (1.0, "star bound, confined star on the sphere".to_string())
            } else if let Some(points) = localization {
                if points.len() < 3 || !cover.check_localized(points) {
                    return Err(Error::HypothesesUnmet(format!(
                        "declared localization ({} points) is not a verified 3-localization",
                        points.len()
                    )));
                }
                if points.contains(&x) {
                    (1.0, "star bound at a localization point".to_string())
                } else {
                    (0.25, "star bound, 3-localized sphere cover".to_string())
                }
            } else {
                return Err(Error::HypothesesUnmet(
                    "sphere star bound needs a confined star or a 3-localized cover".into(),
                ));
            }
        }
    };
    let members = cover.members_at(x);
    let star = cover.star_region(x);
    let mut value = 0.0;
    for (idx, &disc) in coll.disc_of().iter().enumerate() {
        if members.contains(&disc) {
            let row = bracket_row(coll, idx)?;
            value += integrate_over(&row, &star);
        }
    }
    Ok(CheckReport::lower_bound(
        format!("star[{x}]"),
        value,
        bound,
        tolerance,
        provenance,
    ))
}

/// The measure bound: `int P_F omega >= 1 / max_i mu(U_i)` for a probability
/// measure, with the localization hypotheses of the star bound.
pub fn check_pb_bound(
    cover: &Cover,
    coll: &PositiveCollection,
    mu: &Measure,
    localization: Option<&[usize]>,
    tolerance: f64,
) -> Result<CheckReport> {
    require_valid(coll, cover)?;
    let chart = cover.chart();
    mu.check_probability(chart)?;
    if chart.kind() == ChartKind::SphereCyl {
        let ok = localization
            .map(|pts| pts.len() >= 3 && cover.check_localized(pts))
            .unwrap_or(false);
        if !ok {
            return Err(Error::HypothesesUnmet(
                "sphere measure bound needs a verified 3-localization".into(),
            ));
        }
    }
    let mut mu_max = 0.0f64;
    for disc in cover.discs() {
        let m = mu.of_mask(chart, disc.mask())?;
        if m > mu_max {
            mu_max = m;
        }
    }
    if mu_max <= 0.0 {
        return Err(Error::PreconditionFailed(
            "every disc has measure zero; the bound degenerates".into(),
        ));
    }
    let value = integrate(&pb_function(coll)?);
    let bound = 1.0 / mu_max;
    Ok(CheckReport::lower_bound(
        "pb_bound",
        value,
        bound,
        tolerance,
        format!("measure bound, max disc mass {mu_max:.6}"),
    ))
}

/// Context row: the earlier global lower bound `Area / (2 c(U))`.
pub fn blt_comparison(cover: &Cover, coll: &PositiveCollection, tolerance: f64) -> Result<CheckReport> {
    let chart = cover.chart();
    let value = integrate(&pb_function(coll)?);
    let bound = chart.declared_area() / (2.0 * cover.capacity());
    Ok(CheckReport::lower_bound(
        "blt_comparison",
        value,
        bound,
        tolerance,
        "global lower bound Area/(2c), context row",
    ))
}

/// Partition refinement: for a partition of unity the confined-essential
/// disc integral of `P_F` carries the factor two.
pub fn check_partition_refinement(
    cover: &Cover,
    coll: &PositiveCollection,
    j: usize,
    tolerance: f64,
) -> Result<CheckReport> {
    if coll.mode() != CollectionMode::Partition {
        return Err(Error::NotPartitionMode);
    }
    require_valid(coll, cover)?;
    require_confined_essential(cover, j)?;
    let p = pb_function(coll)?;
    let value = integrate_over(&p, cover.discs()[j].mask());
    Ok(CheckReport::lower_bound(
        format!("partition_refinement[{j}]"),
        value,
        2.0,
        tolerance,
        "partition-of-unity factor two on a confined essential disc",
    ))
}
