//! Open disc regions on a chart.
//!
//! Every disc stores an implicit boundary field (interior where the field is
//! negative) so general-position checks and boundary flood fills share one
//! representation; geometric discs synthesize the field `dist - r`.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::shapes::check_disc_fits;
use crate::geometry::chart::{ChartKind, SurfaceChart};
use crate::geometry::field::ScalarField;
use crate::geometry::ops::mask_area;
use crate::topo;

#[derive(Debug, Clone)]
pub struct Disc {
    boundary_field: ScalarField,
    mask: Vec<bool>,
    area: f64,
}

impl Disc {
    /// Disc `{dist(x, center) < radius}` in chart coordinates.
    pub fn geometric(
        chart: &Arc<SurfaceChart>,
        center: (f64, f64),
        radius: f64,
    ) -> Result<Disc> {
        check_disc_fits(chart, center, radius)?;
        let field = ScalarField::from_fn_full(chart, |c1, c2| {
            chart.coord_dist((c1, c2), center) - radius
        })?;
        Self::implicit(field)
    }

    /// Disc bounded by the zero level of `boundary_field`, interior where
    /// the field is negative.
    pub fn implicit(boundary_field: ScalarField) -> Result<Disc> {
        let chart = boundary_field.chart().clone();
        let mask: Vec<bool> = boundary_field.samples().iter().map(|&v| v < 0.0).collect();
        Self::validate_mask(&chart, &mask)?;
        let area = mask_area(&chart, &mask);
        Ok(Disc {
            boundary_field,
            mask,
            area,
        })
    }

    /// Disc from an explicit node mask; the boundary field is a signed grid
    /// distance (negative inside), adequate for boundary diagnostics.
    pub fn from_mask(chart: &Arc<SurfaceChart>, mask: Vec<bool>) -> Result<Disc> {
        Self::validate_mask(chart, &mask)?;
        let field = signed_distance_field(chart, &mask)?;
        let area = mask_area(chart, &mask);
        Ok(Disc {
            boundary_field: field,
            mask,
            area,
        })
    }

    fn validate_mask(chart: &SurfaceChart, mask: &[bool]) -> Result<()> {
        let count = topo::count(mask);
        if count == 0 {
            return Err(Error::NotADisc("empty mask".into()));
        }
        if chart.kind() == ChartKind::SphereCyl {
            for row in [0usize, chart.n2() - 1] {
                let hits = (0..chart.n1()).filter(|&i1| mask[chart.idx(i1, row)]).count();
                if hits != 0 && hits != chart.n1() {
                    return Err(Error::NotADisc(
                        "mask covers a pole row only partially".into(),
                    ));
                }
            }
        }
        let comps = topo::components4(chart, mask);
        if comps.len() != 1 {
            return Err(Error::NotADisc(format!(
                "mask has {} connected components",
                comps.len()
            )));
        }
        let chi = topo::euler_characteristic(chart, mask);
        if chi != 1 {
            return Err(Error::NotADisc(format!(
                "mask has Euler characteristic {chi}, expected 1"
            )));
        }
        Ok(())
    }

    pub fn chart(&self) -> &Arc<SurfaceChart> {
        self.boundary_field.chart()
    }

    pub fn boundary_field(&self) -> &ScalarField {
        &self.boundary_field
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn contains(&self, node: usize) -> bool {
        self.mask[node]
    }
}

/// Signed grid distance: `-k*h` at interior nodes `k` BFS hops from the
/// complement, `+k*h` outside.
fn signed_distance_field(chart: &Arc<SurfaceChart>, mask: &[bool]) -> Result<ScalarField> {
    let h = chart.h1().min(chart.h2());
    let n = chart.len();
    let mut dist = vec![i64::MAX; n];
    let mut queue = VecDeque::new();
    let mut nb = Vec::with_capacity(4);
    // seed: nodes adjacent to the opposite side get distance 1
    for idx in 0..n {
        topo::neighbors4(chart, idx, &mut nb);
        if nb.iter().any(|&y| mask[y] != mask[idx]) {
            dist[idx] = 1;
            queue.push_back(idx);
        }
    }
    while let Some(x) = queue.pop_front() {
        topo::neighbors4(chart, x, &mut nb);
        for &y in nb.clone().iter() {
            if mask[y] == mask[x] && dist[y] == i64::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    let samples: Vec<f64> = (0..n)
        .map(|i| {
            let d = if dist[i] == i64::MAX { n as i64 } else { dist[i] };
            let v = d as f64 * h;
            if mask[i] {
                -v
            } else {
                v
            }
        })
        .collect();
    ScalarField::new(chart.clone(), samples, vec![true; n])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_disc_mask_and_area() {
        let chart = SurfaceChart::torus(1.0, 1.0, 256, 256).unwrap();
        let d = Disc::geometric(&chart, (0.5, 0.5), 0.2).unwrap();
        let expect = std::f64::consts::PI * 0.04;
        assert!((d.area() - expect).abs() < 0.01 * expect, "area {}", d.area());
        assert_eq!(d.area(), mask_area(&chart, d.mask()));
    }

    #[test]
    fn cap_disc_is_valid_on_sphere() {
        let chart = SurfaceChart::sphere(64, 65).unwrap();
        let field = ScalarField::from_fn_full(&chart, |_, z| -z - 0.5).unwrap();
        let d = Disc::implicit(field).unwrap();
        // area of {z > -1/2} is 2 pi * 3/2 = 3 pi
        let expect = 3.0 * std::f64::consts::PI;
        assert!((d.area() - expect).abs() < 0.02 * expect, "area {}", d.area());
    }

    #[test]
    fn annulus_is_rejected() {
        let chart = SurfaceChart::torus(1.0, 1.0, 64, 64).unwrap();
        let field = ScalarField::from_fn_full(&chart, |x, y| {
            let d = chart.coord_dist((x, y), (0.5, 0.5));
            if d > 0.15 && d < 0.3 {
                -1.0
            } else {
                1.0
            }
        })
        .unwrap();
        assert!(matches!(Disc::implicit(field), Err(Error::NotADisc(_))));
    }

    #[test]
    fn from_mask_round_trips_through_signed_distance() {
        let chart = SurfaceChart::torus(1.0, 1.0, 64, 64).unwrap();
        let mask: Vec<bool> = (0..chart.len())
            .map(|i| chart.coord_dist(chart.node_coords(i), (0.3, 0.4)) < 0.21)
            .collect();
        let d = Disc::from_mask(&chart, mask.clone()).unwrap();
        let remask: Vec<bool> = d.boundary_field().samples().iter().map(|&v| v < 0.0).collect();
        assert_eq!(mask, remask);
    }
}
