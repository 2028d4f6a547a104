//! Numerical general-position diagnostics.
//!
//! Transversality is tested on boundary-active nodes (cells where a boundary
//! field changes sign) by the angle between the gradients of the two implicit
//! fields. The check is diagnostic: it reports offending pairs and nodes, it
//! never mutates the cover.

use crate::cover::cover::Cover;
use crate::topo;

/// Default minimal crossing angle, in radians.
pub const DEFAULT_ANGLE_THRESHOLD: f64 = 1e-2;

#[derive(Debug, Clone)]
pub struct GeneralPositionReport {
    /// Pairs whose boundaries cross below the angle threshold, with the
    /// minimal observed crossing angle.
    pub tangential_pairs: Vec<(usize, usize, f64)>,
    /// Nodes where three or more boundary fields vanish within tolerance.
    pub triple_points: Vec<usize>,
    /// Minimal crossing angle over all transversal pairs, if any pair crosses.
    pub min_crossing_angle: Option<f64>,
    pub threshold: f64,
}

impl GeneralPositionReport {
    pub fn pass(&self) -> bool {
        self.tangential_pairs.is_empty() && self.triple_points.is_empty()
    }
}

/// Nodes where the field changes sign against a 4-neighbor (or vanishes).
fn boundary_active(cover: &Cover, disc: usize) -> Vec<bool> {
    let chart = cover.chart();
    let f = cover.discs()[disc].boundary_field().samples();
    let mut out = vec![false; chart.len()];
    let mut nb = Vec::with_capacity(4);
    for idx in 0..chart.len() {
        if f[idx] == 0.0 {
            out[idx] = true;
            continue;
        }
        topo::neighbors4(chart, idx, &mut nb);
        if nb.iter().any(|&y| (f[y] > 0.0) != (f[idx] > 0.0)) {
            out[idx] = true;
        }
    }
    out
}

pub fn check_general_position(cover: &Cover, threshold: f64) -> GeneralPositionReport {
    let chart = cover.chart();
    let nd = cover.len();
    let active: Vec<Vec<bool>> = (0..nd).map(|i| boundary_active(cover, i)).collect();
    let grads: Vec<(Vec<f64>, Vec<f64>)> = (0..nd)
        .map(|i| {
            let s = cover.discs()[i].boundary_field().samples();
            (chart.diff1(s), chart.diff2(s))
        })
        .collect();

    let mut tangential_pairs = Vec::new();
    let mut min_crossing_angle: Option<f64> = None;
    for i in 0..nd {
        for j in i + 1..nd {
            let mut min_angle = f64::INFINITY;
            let mut crossings = false;
            for idx in 0..chart.len() {
                if !(active[i][idx] && active[j][idx]) {
                    continue;
                }
                crossings = true;
                let (gi1, gi2) = (grads[i].0[idx], grads[i].1[idx]);
                let (gj1, gj2) = (grads[j].0[idx], grads[j].1[idx]);
                let ni = (gi1 * gi1 + gi2 * gi2).sqrt();
                let nj = (gj1 * gj1 + gj2 * gj2).sqrt();
                let angle = if ni == 0.0 || nj == 0.0 {
                    0.0
                } else {
                    let cross = (gi1 * gj2 - gi2 * gj1).abs() / (ni * nj);
                    cross.clamp(0.0, 1.0).asin()
                };
                if angle < min_angle {
                    min_angle = angle;
                }
            }
            if crossings {
                if min_angle < threshold {
                    tangential_pairs.push((i, j, min_angle));
                } else {
                    min_crossing_angle = Some(match min_crossing_angle {
                        None => min_angle,
                        Some(m) => m.min(min_angle),
                    });
                }
            }
        }
    }

    // a triple point needs three boundaries through one node, so the band is
    // tightened to three quarters of a cell, scaled by the local gradient
    let h = chart.h1().max(chart.h2());
    let mut triple_points = Vec::new();
    for idx in 0..chart.len() {
        let mut hits = 0usize;
        for i in 0..nd {
            if !active[i][idx] {
                continue;
            }
            let f = cover.discs()[i].boundary_field().samples()[idx];
            let g = (grads[i].0[idx].powi(2) + grads[i].1[idx].powi(2)).sqrt();
            if f.abs() <= 0.75 * h * g.max(1e-300) {
                hits += 1;
            }
        }
        if hits >= 3 {
            triple_points.push(idx);
        }
    }

    GeneralPositionReport {
        tangential_pairs,
        triple_points,
        min_crossing_angle,
        threshold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::builders::two_caps_cover;
    use crate::cover::cover::Cover;
    use crate::cover::disc::Disc;
    use crate::geometry::chart::SurfaceChart;

    #[test]
    fn disjoint_cap_boundaries_pass() {
        let chart = SurfaceChart::sphere(64, 65).unwrap();
        let cover = two_caps_cover(&chart).unwrap();
        let report = check_general_position(&cover, DEFAULT_ANGLE_THRESHOLD);
        assert!(report.pass());
        assert!(report.min_crossing_angle.is_none(), "boundaries never cross");
    }

    #[test]
    fn identical_discs_fail_tangentially() {
        let chart = SurfaceChart::torus(1.0, 1.0, 96, 96).unwrap();
        let a = Disc::geometric(&chart, (0.5, 0.5), 0.3).unwrap();
        let b = Disc::geometric(&chart, (0.5, 0.5), 0.3).unwrap();
        let filler1 = Disc::geometric(&chart, (0.0, 0.0), 0.45).unwrap();
        let filler2 = Disc::geometric(&chart, (0.5, 0.0), 0.45).unwrap();
        let filler3 = Disc::geometric(&chart, (0.0, 0.5), 0.45).unwrap();
        let cover = Cover::new(chart, vec![a, b, filler1, filler2, filler3]).unwrap();
        let report = check_general_position(&cover, DEFAULT_ANGLE_THRESHOLD);
        assert!(report
            .tangential_pairs
            .iter()
            .any(|&(i, j, angle)| i == 0 && j == 1 && angle < 1e-6));
    }

    #[test]
    fn perturbed_cover_passes_with_reported_angle() {
        let chart = SurfaceChart::torus(1.0, 1.0, 128, 128).unwrap();
        let centers = [(0.26, 0.24), (0.74, 0.26), (0.25, 0.76), (0.76, 0.74)];
        let radii = [0.40, 0.43, 0.37, 0.45];
        let discs: Vec<Disc> = centers
            .iter()
            .zip(&radii)
            .map(|(&c, &r)| Disc::geometric(&chart, c, r).unwrap())
            .collect();
        let cover = Cover::new(chart, discs).unwrap();
        let report = check_general_position(&cover, DEFAULT_ANGLE_THRESHOLD);
        assert!(
            report.pass(),
            "pairs: {:?}, triples: {}",
            report.tangential_pairs,
            report.triple_points.len()
        );
        let angle = report.min_crossing_angle.expect("these discs cross");
        assert!(angle > DEFAULT_ANGLE_THRESHOLD);
    }
}
