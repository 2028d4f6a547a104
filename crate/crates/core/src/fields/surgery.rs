//! Mollification, local flattening, and support components.

use crate::error::{Error, Result};
use crate::fields::profile::Profile;
use crate::fields::shapes::check_disc_fits;
use crate::geometry::chart::{ChartKind, SurfaceChart};
use crate::geometry::field::ScalarField;
use crate::geometry::ops::poisson_bracket;
use crate::topo;

fn kernel_1d(half_nodes: usize) -> Vec<f64> {
    // compactly supported C2 polynomial kernel (1 - u^2)^3 on |u| < 1
    let m = half_nodes as i64;
    (-m..=m)
        .map(|j| {
            let u = j as f64 / (m as f64 + 1.0);
            (1.0 - u * u).powi(3)
        })
        .collect()
}

/// Discrete convolution with a normalized, compactly supported separable
/// kernel of half-width `width` in each coordinate. Preserves nonnegativity
/// and grows the support by at most `width` per axis.
pub fn mollify(f: &ScalarField, width: f64) -> Result<ScalarField> {
    let chart = f.chart().clone();
    let min_width = 2.0 * chart.h1().max(chart.h2());
    if width < min_width {
        return Err(Error::WidthBelowResolution { width, min_width });
    }
    let m1 = (width / chart.h1()).floor() as usize;
    let m2 = (width / chart.h2()).floor() as usize;

    let pass1 = convolve_axis1(&chart, f.samples(), m1);
    let out = convolve_axis2(&chart, &pass1, m2);

    // support: dilate the old mask by the kernel footprint
    let mut mask = f.support().to_vec();
    for _ in 0..m1.max(m2) {
        mask = topo::dilate(&chart, &mask);
    }
    let samples: Vec<f64> = out
        .iter()
        .zip(&mask)
        .map(|(&v, &m)| if m { v } else { 0.0 })
        .collect();
    ScalarField::new(chart, samples, mask)
}

fn convolve_axis1(chart: &SurfaceChart, samples: &[f64], m: usize) -> Vec<f64> {
    if m == 0 {
        return samples.to_vec();
    }
    let k = kernel_1d(m);
    let ksum: f64 = k.iter().sum();
    let (n1, n2) = (chart.n1(), chart.n2());
    let mut out = vec![0.0; samples.len()];
    for i1 in 0..n1 {
        for i2 in 0..n2 {
            let mut acc = 0.0;
            for (off, w) in k.iter().enumerate() {
                let j = (i1 + n1 + off - m) % n1;
                acc += w * samples[j * n2 + i2];
            }
            out[i1 * n2 + i2] = acc / ksum;
        }
    }
    out
}

fn convolve_axis2(chart: &SurfaceChart, samples: &[f64], m: usize) -> Vec<f64> {
    if m == 0 {
        return samples.to_vec();
    }
    let k = kernel_1d(m);
    let ksum: f64 = k.iter().sum();
    let (n1, n2) = (chart.n1(), chart.n2());
    let mut out = vec![0.0; samples.len()];
    match chart.kind() {
        ChartKind::Torus => {
            for i1 in 0..n1 {
                let row = i1 * n2;
                for i2 in 0..n2 {
                    let mut acc = 0.0;
                    for (off, w) in k.iter().enumerate() {
                        let j = (i2 + n2 + off - m) % n2;
                        acc += w * samples[row + j];
                    }
                    out[row + i2] = acc / ksum;
                }
            }
        }
        ChartKind::SphereCyl => {
            // truncate and renormalize at the z boundary so constants are preserved
            for i1 in 0..n1 {
                let row = i1 * n2;
                for i2 in 0..n2 {
                    let mut acc = 0.0;
                    let mut wsum = 0.0;
                    for (off, w) in k.iter().enumerate() {
                        let j = i2 as i64 + off as i64 - m as i64;
                        if j < 0 || j >= n2 as i64 {
                            continue;
                        }
                        acc += w * samples[row + j as usize];
                        wsum += w;
                    }
                    out[row + i2] = acc / wsum;
                }
            }
        }
    }
    out
}

/// Separable smoothing of raw samples with the mollifier kernel; returns
/// the input unchanged when the width is below resolution. Symmetric and
/// positivity-preserving, which makes it usable as a gradient
/// preconditioner.
pub fn smooth_samples(chart: &SurfaceChart, samples: &[f64], width: f64) -> Vec<f64> {
    let m1 = (width / chart.h1()).floor() as usize;
    let m2 = (width / chart.h2()).floor() as usize;
    if m1 == 0 && m2 == 0 {
        return samples.to_vec();
    }
    let pass1 = convolve_axis1(chart, samples, m1);
    convolve_axis2(chart, &pass1, m2)
}

/// Smooth blend weight: 1 inside, 0 outside, transition over `[a, b]`.
fn blend(r: f64, a: f64, b: f64) -> f64 {
    if r <= a {
        1.0
    } else if r >= b {
        0.0
    } else {
        let t = (b - r) / (b - a);
        t * t * (3.0 - 2.0 * t)
    }
}

/// Makes `f` exactly constant on the radius-`sigma` disc around `center`
/// while leaving it untouched outside radius `delta`.
///
/// A radial rescale pulls the center value over the inner disc (the rescale
/// is the identity near `delta` and has slope at most
/// `1 + 2.7 * sigma' / (delta - sigma')`), one localized mollify pass smooths
/// the cone left at the inner circle, and the inner disc is snapped to the
/// exact center value.
pub fn flatten_on_disc(
    f: &ScalarField,
    center: (f64, f64),
    sigma: f64,
    delta: f64,
) -> Result<ScalarField> {
    if !(sigma > 0.0 && sigma < delta) {
        return Err(Error::BadSurgeryRadii { sigma, delta });
    }
    let chart = f.chart().clone();
    check_disc_fits(&chart, center, delta)?;
    let hmax = chart.h1().max(chart.h2());
    let w_m = (2.05 * hmax).max((sigma * 0.5).min((delta - sigma) * 0.25));
    if sigma + 3.0 * w_m >= delta {
        return Err(Error::BadSurgeryRadii { sigma, delta });
    }
    let sigma_ext = sigma + w_m;

    let center_value = f.at(center);
    let psi_shape = Profile::poly(1.0, 2.0, 5);
    let psi = |u: f64| psi_shape.shape((u - 0.15) / 0.7);
    let remap = |r: f64| -> f64 {
        // [sigma_ext, delta] -> [0, delta], identity near delta
        let u = (delta - r) / (delta - sigma_ext);
        r - sigma_ext * psi(u)
    };

    let mut remapped = vec![0.0; chart.len()];
    for idx in 0..chart.len() {
        let c = chart.node_coords(idx);
        let d1 = chart.wrap_delta1(c.0, center.0);
        let d2 = chart.wrap_delta2(c.1, center.1);
        let r = (d1 * d1 + d2 * d2).sqrt();
        remapped[idx] = if r >= delta {
            f.samples()[idx]
        } else if r <= sigma_ext {
            center_value
        } else {
            let rr = remap(r);
            let scale = rr / r;
            f.at((center.0 + scale * d1, center.1 + scale * d2))
        };
    }

    let smoothed = {
        let tmp = ScalarField::from_samples(&chart, remapped.clone())?;
        mollify(&tmp, w_m)?
    };

    let mut out = vec![0.0; chart.len()];
    for idx in 0..chart.len() {
        let c = chart.node_coords(idx);
        let r = chart.coord_dist(c, center);
        if r <= sigma {
            out[idx] = center_value;
        } else {
            let b = blend(r, delta - 2.0 * w_m, delta - w_m);
            out[idx] = b * smoothed.samples()[idx] + (1.0 - b) * remapped[idx];
        }
    }

    // support: old support plus whatever the surgery disc now carries
    let mut mask = f.support().to_vec();
    for idx in 0..chart.len() {
        if out[idx] != 0.0 {
            mask[idx] = true;
        }
        if !mask[idx] {
            out[idx] = 0.0;
        }
    }
    ScalarField::new(chart, out, mask)
}

/// Splits the support into 4-connected components (periodic wrap, pole rows
/// identified); masks are pairwise disjoint and cover the support exactly.
pub fn support_components(f: &ScalarField) -> Vec<Vec<bool>> {
    let chart = f.chart();
    let comps = topo::components4(chart, f.support());
    comps
        .into_iter()
        .map(|nodes| {
            let mut mask = vec![false; chart.len()];
            for idx in nodes {
                mask[idx] = true;
            }
            mask
        })
        .collect()
}

/// Measured sup-norm increase of `|{f_new, g}|` over `|{f_old, g}|`, the
/// reported epsilon of the flattening perturbation.
pub fn bracket_sup_increase(
    f_old: &ScalarField,
    f_new: &ScalarField,
    g: &ScalarField,
) -> Result<f64> {
    let b_old = poisson_bracket(f_old, g)?;
    let b_new = poisson_bracket(f_new, g)?;
    let mut eps = 0.0f64;
    for i in 0..b_old.samples().len() {
        let inc = b_new.samples()[i].abs() - b_old.samples()[i].abs();
        if inc > eps {
            eps = inc;
        }
    }
    Ok(eps)
}
