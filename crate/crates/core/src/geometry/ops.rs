//! Poisson brackets and quadrature with respect to the area form.

use crate::error::Result;
use crate::geometry::field::{same_chart, ScalarField};
use crate::sum::{max_abs, pairwise_sum};

/// Poisson bracket `{f, g} = (d1 f * d2 g - d2 f * d1 g) / rho`.
///
/// The result is masked by `supp(f) & supp(g)`: the continuum bracket is
/// supported there, and masking removes the one-node stencil smear at the
/// support boundary. Antisymmetry holds bitwise: `{f,g} == -{g,f}`.
pub fn poisson_bracket(f: &ScalarField, g: &ScalarField) -> Result<ScalarField> {
    same_chart(f, g, "poisson_bracket")?;
    let chart = f.chart();
    f.check_pole_band()?;
    g.check_pole_band()?;

    let d1f = chart.diff1(f.samples());
    let d2f = chart.diff2(f.samples());
    let d1g = chart.diff1(g.samples());
    let d2g = chart.diff2(g.samples());
    let rho = chart.density();

    let mut samples = vec![0.0; chart.len()];
    let mut support = vec![false; chart.len()];
    for i in 0..chart.len() {
        if f.support()[i] && g.support()[i] {
            samples[i] = (d1f[i] * d2g[i] - d2f[i] * d1g[i]) / rho[i];
            support[i] = true;
        }
    }
    ScalarField::new(chart.clone(), samples, support)
}

/// Integral of `f` against the area form, `sum f * rho * h1 * h2`, with a
/// deterministic pairwise reduction.
pub fn integrate(f: &ScalarField) -> f64 {
    let chart = f.chart();
    let terms: Vec<f64> = (0..chart.len())
        .map(|i| f.samples()[i] * chart.quad_weight(i))
        .collect();
    pairwise_sum(&terms)
}

/// Integral of `f` restricted to a node mask.
pub fn integrate_over(f: &ScalarField, region: &[bool]) -> f64 {
    let chart = f.chart();
    debug_assert_eq!(region.len(), chart.len());
    let terms: Vec<f64> = (0..chart.len())
        .map(|i| {
            if region[i] {
                f.samples()[i] * chart.quad_weight(i)
            } else {
                0.0
            }
        })
        .collect();
    pairwise_sum(&terms)
}

/// Supremum norm `max |f|`.
pub fn sup_norm(f: &ScalarField) -> f64 {
    max_abs(f.samples())
}

/// Area of a node mask with respect to the area form.
pub fn mask_area(chart: &crate::geometry::chart::SurfaceChart, mask: &[bool]) -> f64 {
    debug_assert_eq!(mask.len(), chart.len());
    let terms: Vec<f64> = (0..chart.len())
        .map(|i| if mask[i] { chart.quad_weight(i) } else { 0.0 })
        .collect();
    pairwise_sum(&terms)
}
