//! Bump and cap constructors.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::profile::Profile;
use crate::geometry::chart::{ChartKind, SurfaceChart};
use crate::geometry::field::ScalarField;

/// Checks that a coordinate disc of radius `r` around `center` embeds in the
/// chart and stays clear of the sphere's pole bands.
pub fn check_disc_fits(chart: &SurfaceChart, center: (f64, f64), r: f64) -> Result<()> {
    if !(r > 0.0) {
        return Err(Error::DiscOutOfBounds(format!("radius must be positive, got {r}")));
    }
    match chart.kind() {
        ChartKind::Torus => {
            let (l1, l2) = (chart.range1().1 - chart.range1().0, chart.range2().1 - chart.range2().0);
            if 2.0 * r >= l1.min(l2) {
                return Err(Error::DiscOutOfBounds(format!(
                    "diameter {} exceeds the shortest period {}",
                    2.0 * r,
                    l1.min(l2)
                )));
            }
        }
        ChartKind::SphereCyl => {
            if r >= std::f64::consts::PI {
                return Err(Error::DiscOutOfBounds(format!(
                    "radius {r} too large for the theta range"
                )));
            }
            let z_limit = 1.0 - chart.pole_band();
            if center.1.abs() + r > z_limit {
                return Err(Error::DiscOutOfBounds(format!(
                    "disc reaches |z| = {} inside the pole band (limit {})",
                    center.1.abs() + r,
                    z_limit
                )));
            }
        }
    }
    Ok(())
}

/// Radial bump: `1` inside `r_inner`, `0` outside `r_outer`, monotone
/// profile in between. Distances are taken in chart coordinates with
/// periodic wrap.
pub fn bump_disc(
    chart: &Arc<SurfaceChart>,
    center: (f64, f64),
    profile: &Profile,
) -> Result<ScalarField> {
    profile.validate()?;
    check_disc_fits(chart, center, profile.r_outer)?;
    ScalarField::from_fn(chart, |c1, c2| {
        profile.eval(chart.coord_dist((c1, c2), center))
    })
}

/// Monotone ramp in `z` alone: `0` for `z <= z0`, `1` for `z >= z1`
/// (or mirrored when `z1 < z0`). Pole-band safe by construction.
pub fn z_ramp(chart: &Arc<SurfaceChart>, z0: f64, z1: f64, degree: u32) -> Result<ScalarField> {
    if chart.kind() != ChartKind::SphereCyl {
        return Err(Error::InvalidChart("z_ramp needs the sphere chart".into()));
    }
    if z0 == z1 {
        return Err(Error::InvalidProfile("z_ramp needs distinct endpoints".into()));
    }
    let shape = Profile::poly(1.0, 2.0, degree);
    shape.validate()?;
    ScalarField::from_fn(chart, |_, z| {
        let t = (z - z0) / (z1 - z0);
        shape.shape(t)
    })
}

/// Cap field equal to `1` above (or below) a latitude, transitioning over
/// `[z_lo, z_hi]`; `north = true` means supported near the north pole.
pub fn cap_field(
    chart: &Arc<SurfaceChart>,
    z_lo: f64,
    z_hi: f64,
    north: bool,
    degree: u32,
) -> Result<ScalarField> {
    if north {
        z_ramp(chart, z_lo, z_hi, degree)
    } else {
        z_ramp(chart, z_hi, z_lo, degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ops::integrate;

    #[test]
    fn bump_is_one_at_center_zero_outside() {
        let chart = SurfaceChart::torus(1.0, 1.0, 128, 128).unwrap();
        let p = Profile::poly(0.1, 0.2, 5);
        let f = bump_disc(&chart, (0.3, 0.7), &p).unwrap();
        assert_eq!(f.at((0.3, 0.7)), 1.0);
        assert_eq!(f.at((0.3 + 0.25, 0.7)), 0.0);
    }

    #[test]
    fn bump_integral_between_plateau_and_support_areas() {
        // against fine-grid quadrature the mass sits between the two disc areas
        let chart = SurfaceChart::torus(1.0, 1.0, 256, 256).unwrap();
        let p = Profile::poly(0.1, 0.2, 5);
        let f = bump_disc(&chart, (0.5, 0.5), &p).unwrap();
        let m = integrate(&f);
        let lo = std::f64::consts::PI * 0.1 * 0.1;
        let hi = std::f64::consts::PI * 0.2 * 0.2;
        assert!(m > lo && m < hi, "mass {m} not in ({lo}, {hi})");
    }

    #[test]
    fn bump_rejects_pole_band_collision() {
        let chart = SurfaceChart::sphere(64, 65).unwrap();
        let p = Profile::poly(0.1, 0.2, 5);
        assert!(bump_disc(&chart, (0.0, 0.9), &p).is_err());
        bump_disc(&chart, (0.0, 0.0), &p).unwrap();
    }

    #[test]
    fn bump_wraps_periodically() {
        let chart = SurfaceChart::torus(1.0, 1.0, 128, 128).unwrap();
        let p = Profile::poly(0.05, 0.15, 5);
        let f = bump_disc(&chart, (0.02, 0.5), &p).unwrap();
        // center is near the seam; the bump must reach across it
        assert!(f.at((0.95, 0.5)) > 0.0);
    }

    #[test]
    fn caps_are_z_only_and_complementary_shapes() {
        let chart = SurfaceChart::sphere(32, 65).unwrap();
        let n = cap_field(&chart, -0.4, 0.4, true, 5).unwrap();
        n.check_pole_band().unwrap();
        assert_eq!(n.at((1.0, 0.9)), 1.0);
        assert_eq!(n.at((1.0, -0.9)), 0.0);
        let s = cap_field(&chart, -0.4, 0.4, false, 5).unwrap();
        assert_eq!(s.at((1.0, -0.9)), 1.0);
    }
}
