//! Assembly of the sharp example: fields plus the cover of slight support
//! enlargements.

use std::sync::Arc;

use crate::collection::collection::{CollectionMode, PositiveCollection};
use crate::cover::cover::Cover;
use crate::cover::disc::Disc;
use crate::error::Result;
use crate::fields::sharpness::{
    sharpness_disc_field, sharpness_field, SharpnessParams, SharpnessRole,
};
use crate::geometry::chart::SurfaceChart;

fn roles(d: usize) -> Vec<SharpnessRole> {
    let mut roles = vec![SharpnessRole::Plus, SharpnessRole::Minus];
    roles.extend((0..=d).map(SharpnessRole::Side));
    roles
}

/// Builds the `d + 3` member family and its cover on the given sphere
/// chart. The north disc is essential (the north pole is covered by it
/// alone) and confined; the pointwise sum lies in `[1, 1 + 1/d]`.
pub fn build_sharpness_example(
    chart: &Arc<SurfaceChart>,
    d: usize,
    params: &SharpnessParams,
) -> Result<(Cover, PositiveCollection)> {
    params.validate(chart, d)?;
    let roles = roles(d);
    let mut fields = Vec::with_capacity(roles.len());
    let mut discs = Vec::with_capacity(roles.len());
    for &role in &roles {
        fields.push(sharpness_field(chart, d, role, params)?);
        discs.push(Disc::implicit(sharpness_disc_field(chart, d, role, params)?)?);
    }
    let cover = Cover::new(chart.clone(), discs)?;
    let coll = PositiveCollection::new(
        chart.clone(),
        fields,
        (0..roles.len()).collect(),
        CollectionMode::Positive,
    )?;
    coll.validate_strict(&cover)?;
    Ok((cover, coll))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::checks::{check_confined_essential, require_confined_essential};

    #[test]
    fn north_disc_is_the_unique_cover_of_the_pole() {
        let chart = SurfaceChart::sphere(256, 257).unwrap();
        let (cover, _) = build_sharpness_example(&chart, 4, &SharpnessParams::default()).unwrap();
        let north_pole = chart.idx(0, chart.n2() - 1);
        assert_eq!(cover.members_at(north_pole), vec![0]);
        assert!(cover.essential_discs().contains(&0));
        require_confined_essential(&cover, 0).unwrap();
    }

    #[test]
    fn north_disc_integral_is_one_plus_inverse_d() {
        let chart = SurfaceChart::sphere(384, 385).unwrap();
        for d in [2usize, 4] {
            let (cover, coll) =
                build_sharpness_example(&chart, d, &SharpnessParams::default()).unwrap();
            let report = check_confined_essential(&cover, &coll, 0, 0.02).unwrap();
            let expect = 1.0 + 1.0 / d as f64;
            assert!(
                (report.value - expect).abs() <= 0.02 * expect,
                "d={d}: {} vs {expect}",
                report.value
            );
            assert!(report.pass);
        }
    }

    #[test]
    fn sum_band_and_mode() {
        let chart = SurfaceChart::sphere(256, 257).unwrap();
        let d = 4;
        let (_, coll) = build_sharpness_example(&chart, d, &SharpnessParams::default()).unwrap();
        let min = coll.min_sum();
        let max = crate::sum::max(coll.sum_field().samples());
        assert!(min >= 1.0 - 1e-9, "min S = {min}");
        assert!(max <= 1.0 + 1.0 / d as f64 + 1e-9, "max S = {max}");
    }
}
