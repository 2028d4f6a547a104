//! Grid diffeomorphisms of the torus stored as displacement fields.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::chart::{ChartKind, SurfaceChart};

/// A diffeomorphism and its inverse as per-node coordinate offsets.
#[derive(Debug, Clone)]
pub struct DiffeoGrid {
    chart: Arc<SurfaceChart>,
    forward1: Vec<f64>,
    forward2: Vec<f64>,
    inverse1: Vec<f64>,
    inverse2: Vec<f64>,
}

impl DiffeoGrid {
    pub fn new(
        chart: Arc<SurfaceChart>,
        forward: (Vec<f64>, Vec<f64>),
        inverse: (Vec<f64>, Vec<f64>),
    ) -> Result<DiffeoGrid> {
        if chart.kind() != ChartKind::Torus {
            return Err(Error::MoserRequiresTorus);
        }
        let d = DiffeoGrid {
            chart,
            forward1: forward.0,
            forward2: forward.1,
            inverse1: inverse.0,
            inverse2: inverse.1,
        };
        let det_min = d
            .jacobian_det_field()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if det_min <= 0.0 {
            return Err(Error::Infeasible(format!(
                "diffeo has nonpositive Jacobian determinant (min {det_min:.3e})"
            )));
        }
        Ok(d)
    }

    pub fn identity(chart: Arc<SurfaceChart>) -> Result<DiffeoGrid> {
        let n = chart.len();
        DiffeoGrid::new(
            chart,
            (vec![0.0; n], vec![0.0; n]),
            (vec![0.0; n], vec![0.0; n]),
        )
    }

    pub fn chart(&self) -> &Arc<SurfaceChart> {
        &self.chart
    }

    pub fn max_forward_displacement(&self) -> f64 {
        self.forward1
            .iter()
            .chain(&self.forward2)
            .fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    pub fn forward(&self, c: (f64, f64)) -> (f64, f64) {
        let d1 = self.chart.sample_bilinear(&self.forward1, c);
        let d2 = self.chart.sample_bilinear(&self.forward2, c);
        (c.0 + d1, c.1 + d2)
    }

    pub fn inverse(&self, c: (f64, f64)) -> (f64, f64) {
        let d1 = self.chart.sample_bilinear(&self.inverse1, c);
        let d2 = self.chart.sample_bilinear(&self.inverse2, c);
        (c.0 + d1, c.1 + d2)
    }

    /// `det D(forward)` at every node, by central differences of the
    /// displacement field.
    pub fn jacobian_det_field(&self) -> Vec<f64> {
        let chart = &self.chart;
        let d11 = chart.diff1(&self.forward1);
        let d12 = chart.diff2(&self.forward1);
        let d21 = chart.diff1(&self.forward2);
        let d22 = chart.diff2(&self.forward2);
        (0..chart.len())
            .map(|i| (1.0 + d11[i]) * (1.0 + d22[i]) - d12[i] * d21[i])
            .collect()
    }

    /// `max_x |forward(inverse(x)) - x|` over nodes, in chart units.
    pub fn inverse_consistency(&self) -> f64 {
        let chart = &self.chart;
        let mut worst = 0.0f64;
        for idx in 0..chart.len() {
            let c = chart.node_coords(idx);
            let r = self.forward(self.inverse(c));
            let e1 = chart.wrap_delta1(r.0, c.0);
            let e2 = chart.wrap_delta2(r.1, c.1);
            worst = worst.max((e1 * e1 + e2 * e2).sqrt());
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_unit_jacobian_and_exact_inverse() {
        let chart = SurfaceChart::torus(1.0, 1.0, 32, 32).unwrap();
        let d = DiffeoGrid::identity(chart).unwrap();
        assert_eq!(d.inverse_consistency(), 0.0);
        assert!(d.jacobian_det_field().iter().all(|&j| (j - 1.0).abs() < 1e-14));
    }

    #[test]
    fn folding_map_is_rejected() {
        let chart = SurfaceChart::torus(1.0, 1.0, 32, 32).unwrap();
        let n = chart.len();
        // displacement -2x folds the chart over itself
        let disp1: Vec<f64> = (0..n)
            .map(|i| {
                let (x, _) = chart.node_coords(i);
                -2.0 * if x < 0.5 { x } else { x - 1.0 }
            })
            .collect();
        assert!(DiffeoGrid::new(
            chart,
            (disp1, vec![0.0; n]),
            (vec![0.0; n], vec![0.0; n])
        )
        .is_err());
    }
}
