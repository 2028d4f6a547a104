//! Support enclosure: wrap a connected support component in a slightly
//! larger disc (dilation plus hole filling).

use std::sync::Arc;

use crate::cover::disc::Disc;
use crate::error::{Error, Result};
use crate::geometry::chart::{ChartKind, SurfaceChart};
use crate::geometry::ops::mask_area;
use crate::topo;

#[derive(Debug, Clone, Copy)]
pub struct EnclosureInfo {
    pub input_area: f64,
    pub disc_area: f64,
    /// Reported area excess of the enclosing disc over the input component.
    pub margin: f64,
    pub dilations: usize,
}

/// Encloses a connected support component in a disc. Fails when the
/// component winds a non-contractible torus cycle (no disc exists).
pub fn enclose_support_in_disc(
    chart: &Arc<SurfaceChart>,
    mask: &[bool],
) -> Result<(Disc, EnclosureInfo)> {
    if topo::count(mask) == 0 {
        return Err(Error::PreconditionFailed("empty support component".into()));
    }
    let comps = topo::components4(chart, mask);
    if comps.len() != 1 {
        return Err(Error::PreconditionFailed(format!(
            "enclose_support_in_disc expects a single connected component, got {}",
            comps.len()
        )));
    }
    if chart.kind() == ChartKind::SphereCyl {
        for idx in 0..chart.len() {
            let (_, i2) = chart.split_idx(idx);
            if mask[idx] && chart.in_pole_band(i2) {
                return Err(Error::PreconditionFailed(
                    "support component meets the pole band".into(),
                ));
            }
        }
    }
    if chart.kind() == ChartKind::Torus {
        let (w1, w2) = topo::component_winds(chart, &comps[0]);
        if w1 || w2 {
            return Err(Error::NonContractible(format!(
                "component winds the torus (directions {w1}, {w2})"
            )));
        }
    }

    let input_area = mask_area(chart, mask);
    let mut grown = topo::fill_holes(chart, mask);
    let mut dilations = 0usize;
    for _ in 0..4 {
        grown = topo::dilate(chart, &grown);
        dilations += 1;
        grown = topo::fill_holes(chart, &grown);
        let connected = topo::components4(chart, &grown).len() == 1;
        if connected && topo::euler_characteristic(chart, &grown) == 1 {
            let disc = Disc::from_mask(chart, grown)?;
            let info = EnclosureInfo {
                input_area,
                disc_area: disc.area(),
                margin: disc.area() - input_area,
                dilations,
            };
            return Ok((disc, info));
        }
    }
    Err(Error::NotADisc(
        "dilation and hole filling did not produce a simply connected mask".into(),
    ))
}
