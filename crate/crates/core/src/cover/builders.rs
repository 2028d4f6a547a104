//! Stock covers: the two-cap sphere cover and jittered disc lattices on the
//! torus (the workhorse of the randomized theorem checks).

use std::sync::Arc;

use rand::Rng;

use crate::cover::cover::Cover;
use crate::cover::disc::Disc;
use crate::error::{Error, Result};
use crate::geometry::chart::{ChartKind, SurfaceChart};
use crate::geometry::field::ScalarField;

/// The two-cap cover of the sphere: `U_n = {z > -1/2}`, `U_s = {z < 1/2}`.
pub fn two_caps_cover(chart: &Arc<SurfaceChart>) -> Result<Cover> {
    if chart.kind() != ChartKind::SphereCyl {
        return Err(Error::InvalidChart("two-cap cover needs the sphere chart".into()));
    }
    let north = Disc::implicit(ScalarField::from_fn_full(chart, |_, z| -z - 0.5)?)?;
    let south = Disc::implicit(ScalarField::from_fn_full(chart, |_, z| z - 0.5)?)?;
    Cover::new(chart.clone(), vec![north, south])
}

/// A `k1 x k2` lattice of geometric discs on the unit torus with jittered
/// centers and radii. Radii in `[r_lo, r_hi]`, center jitter up to `jitter`
/// per axis. The caller is responsible for picking parameters that cover.
pub fn jittered_lattice_cover(
    chart: &Arc<SurfaceChart>,
    k1: usize,
    k2: usize,
    r_lo: f64,
    r_hi: f64,
    jitter: f64,
    rng: &mut impl Rng,
) -> Result<(Cover, Vec<(f64, f64)>, Vec<f64>)> {
    if chart.kind() != ChartKind::Torus {
        return Err(Error::InvalidChart("lattice cover needs the torus chart".into()));
    }
    let (l1, l2) = (
        chart.range1().1 - chart.range1().0,
        chart.range2().1 - chart.range2().0,
    );
    let mut centers = Vec::with_capacity(k1 * k2);
    let mut radii = Vec::with_capacity(k1 * k2);
    let mut discs = Vec::with_capacity(k1 * k2);
    for a in 0..k1 {
        for b in 0..k2 {
            let cx = (a as f64 + 0.5) * l1 / k1 as f64 + rng.gen_range(-jitter..=jitter);
            let cy = (b as f64 + 0.5) * l2 / k2 as f64 + rng.gen_range(-jitter..=jitter);
            let r = rng.gen_range(r_lo..=r_hi);
            discs.push(Disc::geometric(chart, (cx, cy), r)?);
            centers.push((cx, cy));
            radii.push(r);
        }
    }
    let cover = Cover::new(chart.clone(), discs)?;
    Ok((cover, centers, radii))
}

/// Lattice parameters used by the randomized torus scenarios: a 3x3 lattice
/// whose discs are all essential and confined, with enough overlap for a
/// smooth subordinated positive collection. Neighbor centers stay at least
/// `1/3 - 2*jitter = 0.3233` apart, above `R_HI`, so every disc keeps a
/// privately covered node; supports pulled 6h inside still sum past 1 at the
/// lattice hole points for grids of 192 and finer.
pub const SCENARIO_K: usize = 3;
pub const SCENARIO_R_LO: f64 = 0.313;
pub const SCENARIO_R_HI: f64 = 0.318;
pub const SCENARIO_JITTER: f64 = 0.005;
