//! Stock collections: the two-cap z-only partition and bump collections
//! subordinated to disc lattices.

use std::sync::Arc;

use rand::Rng;

use crate::collection::collection::{CollectionMode, PositiveCollection};
use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::fields::profile::Profile;
use crate::fields::shapes::{bump_disc, cap_field};
use crate::geometry::chart::{ChartKind, SurfaceChart};

/// The z-only partition subordinated to the two-cap cover: a ramp and its
/// complement, transitioning well inside the overlap band.
pub fn two_caps_partition(chart: &Arc<SurfaceChart>) -> Result<PositiveCollection> {
    if chart.kind() != ChartKind::SphereCyl {
        return Err(Error::InvalidChart("two-cap partition needs the sphere chart".into()));
    }
    let f_n = cap_field(chart, -0.35, 0.35, true, 5)?;
    let samples: Vec<f64> = f_n.samples().iter().map(|&v| 1.0 - v).collect();
    let f_s = crate::geometry::field::ScalarField::from_samples(chart, samples)?;
    PositiveCollection::new(
        chart.clone(),
        vec![f_n, f_s],
        vec![0, 1],
        CollectionMode::Partition,
    )
}

/// One bump per disc of a lattice cover: plateau radius `r_inner`, support
/// pulled `margin` inside the disc boundary. Positive mode requires the
/// caller-picked geometry to reach `S >= 1`; partition mode divides by the
/// sum afterwards.
pub fn bump_collection(
    cover: &Cover,
    centers: &[(f64, f64)],
    radii: &[f64],
    plateau: &[f64],
    degree: u32,
    mode: CollectionMode,
) -> Result<PositiveCollection> {
    let chart = cover.chart().clone();
    // 6h of margin survives the halving under a degree-2 unrolling lift
    let margin = 6.0 * chart.h1().max(chart.h2());
    let mut fields = Vec::with_capacity(centers.len());
    for ((&c, &r), &pl) in centers.iter().zip(radii).zip(plateau) {
        let r_outer = r - margin;
        if r_outer <= pl {
            return Err(Error::InvalidCollection(format!(
                "plateau {pl} does not fit under support radius {r_outer}"
            )));
        }
        fields.push(bump_disc(&chart, c, &Profile::poly(pl, r_outer, degree))?);
    }
    let coll = PositiveCollection::new(
        chart,
        fields,
        (0..centers.len()).collect(),
        CollectionMode::Positive,
    )?;
    match mode {
        CollectionMode::Positive => {
            let min_sum = coll.min_sum();
            if min_sum < 1.0 - crate::collection::collection::MODE_TOL {
                return Err(Error::InvalidCollection(format!(
                    "bump collection has min sum {min_sum}, not a positive collection"
                )));
            }
            Ok(coll)
        }
        CollectionMode::Partition => coll.normalize_to_partition(),
    }
}

/// Randomized plateau fractions for the scenario lattice, wide enough that
/// the sum stays above 1 before normalization is even considered.
pub fn random_plateaus(n: usize, r_lo: f64, rng: &mut impl Rng) -> Vec<f64> {
    (0..n)
        .map(|_| r_lo * rng.gen_range(0.52..0.58))
        .collect()
}
