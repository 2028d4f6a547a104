//! Transport of covers and collections along a grid diffeomorphism:
//! `phi^* U = phi^{-1}(U)` and `phi^* f = f o phi`, so subordination is
//! preserved by construction up to interpolation smear.

use crate::collection::collection::PositiveCollection;
use crate::cover::cover::Cover;
use crate::cover::disc::Disc;
use crate::error::{Error, Result};
use crate::geometry::field::ScalarField;
use crate::optimize::diffeo::DiffeoGrid;

pub fn apply_diffeo_cover(cover: &Cover, diffeo: &DiffeoGrid) -> Result<Cover> {
    if !cover.chart().compatible(diffeo.chart()) {
        return Err(Error::ChartMismatch { context: "apply_diffeo_cover" });
    }
    let chart = cover.chart().clone();
    let mut discs = Vec::with_capacity(cover.len());
    for disc in cover.discs() {
        let samples: Vec<f64> = (0..chart.len())
            .map(|i| disc.boundary_field().at(diffeo.forward(chart.node_coords(i))))
            .collect();
        let field = ScalarField::new(chart.clone(), samples, vec![true; chart.len()])?;
        discs.push(Disc::implicit(field)?);
    }
    Cover::new(chart, discs)
}

pub fn apply_diffeo_collection(
    coll: &PositiveCollection,
    diffeo: &DiffeoGrid,
) -> Result<PositiveCollection> {
    if !coll.chart().compatible(diffeo.chart()) {
        return Err(Error::ChartMismatch { context: "apply_diffeo_collection" });
    }
    let chart = coll.chart().clone();
    let mut fields = Vec::with_capacity(coll.len());
    for f in coll.fields() {
        let samples: Vec<f64> = (0..chart.len())
            .map(|i| f.at(diffeo.forward(chart.node_coords(i))))
            .collect();
        fields.push(ScalarField::from_samples(&chart, samples)?);
    }
    PositiveCollection::new(chart, fields, coll.disc_of().to_vec(), coll.mode())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collection::builders::{bump_collection, random_plateaus};
    use crate::collection::collection::CollectionMode;
    use crate::cover::builders::{
        jittered_lattice_cover, SCENARIO_JITTER, SCENARIO_K, SCENARIO_R_HI, SCENARIO_R_LO,
    };
    use crate::geometry::chart::SurfaceChart;
    use rand::SeedableRng;

    #[test]
    fn identity_transport_is_identity() {
        let chart = SurfaceChart::torus(1.0, 1.0, 192, 192).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let (cover, centers, radii) = jittered_lattice_cover(
            &chart,
            SCENARIO_K,
            SCENARIO_K,
            SCENARIO_R_LO,
            SCENARIO_R_HI,
            SCENARIO_JITTER,
            &mut rng,
        )
        .unwrap();
        let plateaus = random_plateaus(centers.len(), SCENARIO_R_LO, &mut rng);
        let coll = bump_collection(
            &cover,
            &centers,
            &radii,
            &plateaus,
            5,
            CollectionMode::Positive,
        )
        .unwrap();
        let id = DiffeoGrid::identity(chart.clone()).unwrap();
        let moved_cover = apply_diffeo_cover(&cover, &id).unwrap();
        let moved = apply_diffeo_collection(&coll, &id).unwrap();
        for i in 0..chart.len() {
            assert_eq!(
                coll.fields()[0].samples()[i].to_bits(),
                moved.fields()[0].samples()[i].to_bits()
            );
        }
        assert_eq!(moved_cover.discs()[0].mask(), cover.discs()[0].mask());
        moved.validate_strict(&moved_cover).unwrap();
    }
}
