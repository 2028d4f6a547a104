//! Measures on a chart: the normalized area form, Dirac sums, and custom
//! densities.

use crate::error::{Error, Result};
use crate::geometry::chart::SurfaceChart;
use crate::geometry::field::ScalarField;
use crate::geometry::ops::{integrate, mask_area};
use crate::sum::pairwise_sum;

#[derive(Debug, Clone)]
pub enum MeasureKind {
    /// The measure determined by the area form.
    AreaForm,
    /// Unit point masses at the given nodes.
    DiracSum(Vec<usize>),
    /// A custom density against the area form.
    Density(ScalarField),
}

#[derive(Debug, Clone)]
pub struct Measure {
    pub kind: MeasureKind,
    /// When set, the measure is scaled to total mass 1.
    pub normalized: bool,
}

impl Measure {
    pub fn area_form() -> Measure {
        Measure { kind: MeasureKind::AreaForm, normalized: true }
    }

    pub fn dirac(points: Vec<usize>, normalized: bool) -> Result<Measure> {
        if points.is_empty() {
            return Err(Error::PreconditionFailed("dirac sum needs at least one point".into()));
        }
        Ok(Measure { kind: MeasureKind::DiracSum(points), normalized })
    }

    pub fn density(f: ScalarField) -> Result<Measure> {
        if f.samples().iter().any(|&v| v < 0.0) {
            return Err(Error::NonPositiveField {
                context: "measure density".into(),
                min: crate::sum::min(f.samples()),
            });
        }
        Ok(Measure { kind: MeasureKind::Density(f), normalized: true })
    }

    /// Total mass before normalization.
    pub fn raw_total(&self, chart: &SurfaceChart) -> f64 {
        match &self.kind {
            MeasureKind::AreaForm => {
                let terms: Vec<f64> = (0..chart.len()).map(|i| chart.quad_weight(i)).collect();
                pairwise_sum(&terms)
            }
            MeasureKind::DiracSum(points) => points.len() as f64,
            MeasureKind::Density(f) => integrate(f),
        }
    }

    fn scale(&self, chart: &SurfaceChart) -> Result<f64> {
        if !self.normalized {
            return Ok(1.0);
        }
        let total = self.raw_total(chart);
        if total <= 0.0 {
            return Err(Error::NonPositiveField {
                context: "measure total mass".into(),
                min: total,
            });
        }
        Ok(1.0 / total)
    }

    /// Measure of a node mask.
    pub fn of_mask(&self, chart: &SurfaceChart, mask: &[bool]) -> Result<f64> {
        let s = self.scale(chart)?;
        Ok(s * match &self.kind {
            MeasureKind::AreaForm => mask_area(chart, mask),
            MeasureKind::DiracSum(points) => {
                points.iter().filter(|&&p| mask[p]).count() as f64
            }
            MeasureKind::Density(f) => {
                let terms: Vec<f64> = (0..chart.len())
                    .map(|i| if mask[i] { f.samples()[i] * chart.quad_weight(i) } else { 0.0 })
                    .collect();
                pairwise_sum(&terms)
            }
        })
    }

    /// Integral of a per-node function against the measure.
    pub fn integrate_fn(
        &self,
        chart: &SurfaceChart,
        f: impl Fn(usize) -> f64,
    ) -> Result<f64> {
        let s = self.scale(chart)?;
        Ok(s * match &self.kind {
            MeasureKind::AreaForm => {
                let terms: Vec<f64> =
                    (0..chart.len()).map(|i| f(i) * chart.quad_weight(i)).collect();
                pairwise_sum(&terms)
            }
            MeasureKind::DiracSum(points) => {
                let terms: Vec<f64> = points.iter().map(|&p| f(p)).collect();
                pairwise_sum(&terms)
            }
            MeasureKind::Density(d) => {
                let terms: Vec<f64> = (0..chart.len())
                    .map(|i| f(i) * d.samples()[i] * chart.quad_weight(i))
                    .collect();
                pairwise_sum(&terms)
            }
        })
    }

    /// Probability-mode sanity: total mass 1 within 1e-9 once normalized.
    pub fn check_probability(&self, chart: &SurfaceChart) -> Result<()> {
        let s = self.scale(chart)?;
        let total = s * self.raw_total(chart);
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::PreconditionFailed(format!(
                "measure has total mass {total}, expected a probability measure"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart::SurfaceChart;

    #[test]
    fn area_form_masses() {
        let chart = SurfaceChart::torus(1.0, 1.0, 64, 64).unwrap();
        let mu = Measure::area_form();
        mu.check_probability(&chart).unwrap();
        let half: Vec<bool> = (0..chart.len())
            .map(|i| chart.node_coords(i).0 < 0.5)
            .collect();
        let m = mu.of_mask(&chart, &half).unwrap();
        assert!((m - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dirac_masses_count_points() {
        let chart = SurfaceChart::torus(1.0, 1.0, 64, 64).unwrap();
        let pts = vec![chart.nearest_node((0.1, 0.1)), chart.nearest_node((0.6, 0.6))];
        let mu = Measure::dirac(pts.clone(), false).unwrap();
        let mask: Vec<bool> = (0..chart.len()).map(|i| i == pts[0]).collect();
        assert_eq!(mu.of_mask(&chart, &mask).unwrap(), 1.0);
        let mu_norm = Measure::dirac(pts, true).unwrap();
        assert_eq!(mu_norm.of_mask(&chart, &vec![true; chart.len()]).unwrap(), 1.0);
    }
}
