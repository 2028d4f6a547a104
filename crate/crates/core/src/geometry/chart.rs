//! Discretized closed surfaces with an area-form density.
//!
//! Two charts are supported: a flat torus with both coordinates periodic, and
//! the round sphere in cylindrical coordinates `(theta, z)` where `theta` is
//! periodic and `z in [-1, 1]` is not. The area form is `omega = rho *
//! dc1 ^ dc2` with a per-node density `rho`, so corrected forms produced by
//! covering-map lifts reuse the same code paths.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sum::pairwise_sum;

/// Default fraction of the z half-range reserved as pole bands on the sphere.
pub const DEFAULT_POLE_BAND: f64 = 0.05;

/// Absolute tolerance for the theta-constancy check on pole bands.
pub const POLE_BAND_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    /// Flat torus, `x in [0, L1)`, `y in [0, L2)`, both periodic.
    Torus,
    /// Round sphere in cylindrical coordinates, `theta in [0, 2*pi)`
    /// periodic, `z in [-1, 1]` non-periodic.
    SphereCyl,
}

/// A closed surface as a periodic/banded grid with an area-form density.
#[derive(Debug, Clone)]
pub struct SurfaceChart {
    kind: ChartKind,
    n1: usize,
    n2: usize,
    range1: (f64, f64),
    range2: (f64, f64),
    density: Vec<f64>,
    pole_band: f64,
    declared_area: f64,
}

impl SurfaceChart {
    /// Flat torus with constant density `1`, total area `l1 * l2`.
    pub fn torus(l1: f64, l2: f64, n1: usize, n2: usize) -> Result<Arc<Self>> {
        Self::torus_with_area(l1, l2, n1, n2, l1 * l2)
    }

    /// Flat torus with constant density `area / (l1 * l2)`.
    pub fn torus_with_area(l1: f64, l2: f64, n1: usize, n2: usize, area: f64) -> Result<Arc<Self>> {
        if !(l1 > 0.0 && l2 > 0.0 && area > 0.0) {
            return Err(Error::InvalidChart(format!(
                "torus needs positive periods and area, got l1={l1}, l2={l2}, area={area}"
            )));
        }
        Self::check_resolution(n1, n2)?;
        let rho = area / (l1 * l2);
        Ok(Arc::new(SurfaceChart {
            kind: ChartKind::Torus,
            n1,
            n2,
            range1: (0.0, l1),
            range2: (0.0, l2),
            density: vec![rho; n1 * n2],
            pole_band: 0.0,
            declared_area: area,
        }))
    }

    /// Round sphere, density `1`, total area `4*pi`, default pole band.
    pub fn sphere(n1: usize, n2: usize) -> Result<Arc<Self>> {
        Self::sphere_with_pole_band(n1, n2, DEFAULT_POLE_BAND)
    }

    /// Round sphere with an explicit pole band `|z| > 1 - pole_band`.
    pub fn sphere_with_pole_band(n1: usize, n2: usize, pole_band: f64) -> Result<Arc<Self>> {
        if !(pole_band > 0.0 && pole_band < 1.0) {
            return Err(Error::InvalidChart(format!(
                "pole band must lie in (0, 1), got {pole_band}"
            )));
        }
        Self::check_resolution(n1, n2)?;
        Ok(Arc::new(SurfaceChart {
            kind: ChartKind::SphereCyl,
            n1,
            n2,
            range1: (0.0, std::f64::consts::TAU),
            range2: (-1.0, 1.0),
            density: vec![1.0; n1 * n2],
            pole_band,
            declared_area: 4.0 * std::f64::consts::PI,
        }))
    }

    fn check_resolution(n1: usize, n2: usize) -> Result<()> {
        if n1 < 8 || n2 < 8 {
            return Err(Error::InvalidChart(format!(
                "grid must be at least 8x8, got {n1}x{n2}"
            )));
        }
        Ok(())
    }

    /// Same chart with a replacement per-node density. The declared area is
    /// re-derived from the new density.
    pub fn with_density(&self, density: Vec<f64>) -> Result<Arc<Self>> {
        if density.len() != self.len() {
            return Err(Error::InvalidChart(format!(
                "density length {} does not match grid {}",
                density.len(),
                self.len()
            )));
        }
        let mut min = f64::INFINITY;
        for &d in &density {
            if !d.is_finite() {
                return Err(Error::NonFinite {
                    context: "area density".into(),
                });
            }
            if d < min {
                min = d;
            }
        }
        if min <= 0.0 {
            return Err(Error::NonPositiveField {
                context: "area density".into(),
                min,
            });
        }
        let mut chart = self.clone();
        chart.density = density;
        chart.declared_area = chart.quad_area();
        Ok(Arc::new(chart))
    }

    fn quad_area(&self) -> f64 {
        let terms: Vec<f64> = (0..self.len()).map(|i| self.quad_weight(i)).collect();
        pairwise_sum(&terms)
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn range1(&self) -> (f64, f64) {
        self.range1
    }

    pub fn range2(&self) -> (f64, f64) {
        self.range2
    }

    /// Grid spacing along coordinate 1 (periodic: no node at the upper end).
    pub fn h1(&self) -> f64 {
        (self.range1.1 - self.range1.0) / self.n1 as f64
    }

    /// Grid spacing along coordinate 2.
    pub fn h2(&self) -> f64 {
        match self.kind {
            ChartKind::Torus => (self.range2.1 - self.range2.0) / self.n2 as f64,
            ChartKind::SphereCyl => (self.range2.1 - self.range2.0) / (self.n2 - 1) as f64,
        }
    }

    pub fn pole_band(&self) -> f64 {
        self.pole_band
    }

    pub fn declared_area(&self) -> f64 {
        self.declared_area
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn periodic2(&self) -> bool {
        self.kind == ChartKind::Torus
    }

    #[inline]
    pub fn idx(&self, i1: usize, i2: usize) -> usize {
        debug_assert!(i1 < self.n1 && i2 < self.n2);
        i1 * self.n2 + i2
    }

    #[inline]
    pub fn split_idx(&self, idx: usize) -> (usize, usize) {
        (idx / self.n2, idx % self.n2)
    }

    #[inline]
    pub fn coord1(&self, i1: usize) -> f64 {
        self.range1.0 + i1 as f64 * self.h1()
    }

    #[inline]
    pub fn coord2(&self, i2: usize) -> f64 {
        self.range2.0 + i2 as f64 * self.h2()
    }

    pub fn node_coords(&self, idx: usize) -> (f64, f64) {
        let (i1, i2) = self.split_idx(idx);
        (self.coord1(i1), self.coord2(i2))
    }

    /// Nearest grid node to a coordinate pair.
    pub fn nearest_node(&self, c: (f64, f64)) -> usize {
        let p1 = self.range1.1 - self.range1.0;
        let u = (c.0 - self.range1.0).rem_euclid(p1) / self.h1();
        let i1 = (u.round() as usize) % self.n1;
        let i2 = match self.kind {
            ChartKind::Torus => {
                let p2 = self.range2.1 - self.range2.0;
                let v = (c.1 - self.range2.0).rem_euclid(p2) / self.h2();
                (v.round() as usize) % self.n2
            }
            ChartKind::SphereCyl => {
                let v = ((c.1 - self.range2.0) / self.h2()).round();
                (v.max(0.0) as usize).min(self.n2 - 1)
            }
        };
        self.idx(i1, i2)
    }

    /// Quadrature weight of a node: `rho * h1 * h2`, halved on the sphere's
    /// z-boundary rows (trapezoidal in the non-periodic direction).
    #[inline]
    pub fn quad_weight(&self, idx: usize) -> f64 {
        let w = self.density[idx] * self.h1() * self.h2();
        match self.kind {
            ChartKind::Torus => w,
            ChartKind::SphereCyl => {
                let i2 = idx % self.n2;
                if i2 == 0 || i2 == self.n2 - 1 {
                    0.5 * w
                } else {
                    w
                }
            }
        }
    }

    /// Structural compatibility: same kind, resolution, ranges and density.
    pub fn compatible(&self, other: &SurfaceChart) -> bool {
        if std::ptr::eq(self, other) {
            return true;
        }
        self.kind == other.kind
            && self.n1 == other.n1
            && self.n2 == other.n2
            && self.range1 == other.range1
            && self.range2 == other.range2
            && self.density == other.density
    }

    /// Minimal signed difference `a - b` along coordinate 1 (wrapped).
    pub fn wrap_delta1(&self, a: f64, b: f64) -> f64 {
        let p = self.range1.1 - self.range1.0;
        let mut d = (a - b) % p;
        if d > 0.5 * p {
            d -= p;
        } else if d < -0.5 * p {
            d += p;
        }
        d
    }

    /// Minimal signed difference along coordinate 2 (wrapped on the torus).
    pub fn wrap_delta2(&self, a: f64, b: f64) -> f64 {
        match self.kind {
            ChartKind::Torus => {
                let p = self.range2.1 - self.range2.0;
                let mut d = (a - b) % p;
                if d > 0.5 * p {
                    d -= p;
                } else if d < -0.5 * p {
                    d += p;
                }
                d
            }
            ChartKind::SphereCyl => a - b,
        }
    }

    /// Euclidean distance in chart coordinates, wrapping periodic directions.
    pub fn coord_dist(&self, a: (f64, f64), b: (f64, f64)) -> f64 {
        let d1 = self.wrap_delta1(a.0, b.0);
        let d2 = self.wrap_delta2(a.1, b.1);
        (d1 * d1 + d2 * d2).sqrt()
    }

    /// Whether row `i2` lies inside a pole band (`|z| > 1 - pole_band`).
    pub fn in_pole_band(&self, i2: usize) -> bool {
        match self.kind {
            ChartKind::Torus => false,
            ChartKind::SphereCyl => self.coord2(i2).abs() > 1.0 - self.pole_band,
        }
    }

    /// Checks that `samples` is theta-constant on every pole-band row.
    pub fn check_pole_band(&self, samples: &[f64]) -> Result<()> {
        if self.kind != ChartKind::SphereCyl {
            return Ok(());
        }
        for i2 in 0..self.n2 {
            if !self.in_pole_band(i2) {
                continue;
            }
            let first = samples[self.idx(0, i2)];
            for i1 in 1..self.n1 {
                let v = samples[self.idx(i1, i2)];
                let dev = (v - first).abs();
                if dev > POLE_BAND_TOL * first.abs().max(1.0) {
                    return Err(Error::PoleBandViolation {
                        node: self.idx(i1, i2),
                        deviation: dev,
                    });
                }
            }
        }
        Ok(())
    }

    /// Second-order derivative along coordinate 1 (always periodic).
    pub fn diff1(&self, samples: &[f64]) -> Vec<f64> {
        let (n1, n2) = (self.n1, self.n2);
        let inv2h = 1.0 / (2.0 * self.h1());
        let mut out = vec![0.0; samples.len()];
        for i1 in 0..n1 {
            let ip = if i1 + 1 == n1 { 0 } else { i1 + 1 };
            let im = if i1 == 0 { n1 - 1 } else { i1 - 1 };
            for i2 in 0..n2 {
                out[i1 * n2 + i2] = (samples[ip * n2 + i2] - samples[im * n2 + i2]) * inv2h;
            }
        }
        out
    }

    /// Second-order derivative along coordinate 2: periodic wrap on the
    /// torus, one-sided second-order stencils at the sphere's z-boundary.
    pub fn diff2(&self, samples: &[f64]) -> Vec<f64> {
        let (n1, n2) = (self.n1, self.n2);
        let inv2h = 1.0 / (2.0 * self.h2());
        let mut out = vec![0.0; samples.len()];
        match self.kind {
            ChartKind::Torus => {
                for i1 in 0..n1 {
                    let row = i1 * n2;
                    for i2 in 0..n2 {
                        let ip = if i2 + 1 == n2 { 0 } else { i2 + 1 };
                        let im = if i2 == 0 { n2 - 1 } else { i2 - 1 };
                        out[row + i2] = (samples[row + ip] - samples[row + im]) * inv2h;
                    }
                }
            }
            ChartKind::SphereCyl => {
                for i1 in 0..n1 {
                    let row = i1 * n2;
                    out[row] =
                        (-3.0 * samples[row] + 4.0 * samples[row + 1] - samples[row + 2]) * inv2h;
                    for i2 in 1..n2 - 1 {
                        out[row + i2] = (samples[row + i2 + 1] - samples[row + i2 - 1]) * inv2h;
                    }
                    out[row + n2 - 1] = (3.0 * samples[row + n2 - 1] - 4.0 * samples[row + n2 - 2]
                        + samples[row + n2 - 3])
                        * inv2h;
                }
            }
        }
        out
    }

    /// Adjoint (transpose) of [`SurfaceChart::diff1`], used by gradients.
    pub fn diff1_adjoint(&self, g: &[f64]) -> Vec<f64> {
        let (n1, n2) = (self.n1, self.n2);
        let inv2h = 1.0 / (2.0 * self.h1());
        let mut out = vec![0.0; g.len()];
        for i1 in 0..n1 {
            let ip = if i1 + 1 == n1 { 0 } else { i1 + 1 };
            let im = if i1 == 0 { n1 - 1 } else { i1 - 1 };
            for i2 in 0..n2 {
                // row i1 of D1 reads samples at ip (+) and im (-)
                out[ip * n2 + i2] += g[i1 * n2 + i2] * inv2h;
                out[im * n2 + i2] -= g[i1 * n2 + i2] * inv2h;
            }
        }
        out
    }

    /// Adjoint (transpose) of [`SurfaceChart::diff2`].
    pub fn diff2_adjoint(&self, g: &[f64]) -> Vec<f64> {
        let (n1, n2) = (self.n1, self.n2);
        let inv2h = 1.0 / (2.0 * self.h2());
        let mut out = vec![0.0; g.len()];
        match self.kind {
            ChartKind::Torus => {
                for i1 in 0..n1 {
                    let row = i1 * n2;
                    for i2 in 0..n2 {
                        let ip = if i2 + 1 == n2 { 0 } else { i2 + 1 };
                        let im = if i2 == 0 { n2 - 1 } else { i2 - 1 };
                        out[row + ip] += g[row + i2] * inv2h;
                        out[row + im] -= g[row + i2] * inv2h;
                    }
                }
            }
            ChartKind::SphereCyl => {
                for i1 in 0..n1 {
                    let row = i1 * n2;
                    out[row] += -3.0 * g[row] * inv2h;
                    out[row + 1] += 4.0 * g[row] * inv2h;
                    out[row + 2] += -g[row] * inv2h;
                    for i2 in 1..n2 - 1 {
                        out[row + i2 + 1] += g[row + i2] * inv2h;
                        out[row + i2 - 1] -= g[row + i2] * inv2h;
                    }
                    let last = row + n2 - 1;
                    out[last] += 3.0 * g[last] * inv2h;
                    out[last - 1] += -4.0 * g[last] * inv2h;
                    out[last - 2] += g[last] * inv2h;
                }
            }
        }
        out
    }

    /// Bilinear interpolation of `samples` at a coordinate pair. Periodic
    /// wrap along coordinate 1 (and 2 on the torus); z clamps on the sphere.
    pub fn sample_bilinear(&self, samples: &[f64], c: (f64, f64)) -> f64 {
        // fractional coordinates within a node of a grid line snap to it, so
        // commensurate maps reproduce samples bitwise
        fn snap(u: f64) -> f64 {
            let r = u.round();
            if (u - r).abs() < 1e-9 {
                r
            } else {
                u
            }
        }
        let (n1, n2) = (self.n1, self.n2);
        let p1 = self.range1.1 - self.range1.0;
        let u = snap((c.0 - self.range1.0).rem_euclid(p1) / self.h1());
        let mut i1 = u.floor() as usize;
        let mut t = u - i1 as f64;
        if i1 >= n1 {
            i1 = 0;
            t = 0.0;
        }
        let i1p = if i1 + 1 == n1 { 0 } else { i1 + 1 };

        let (i2, i2p, s) = match self.kind {
            ChartKind::Torus => {
                let p2 = self.range2.1 - self.range2.0;
                let v = snap((c.1 - self.range2.0).rem_euclid(p2) / self.h2());
                let mut j = v.floor() as usize;
                let mut s = v - j as f64;
                if j >= n2 {
                    j = 0;
                    s = 0.0;
                }
                let jp = if j + 1 == n2 { 0 } else { j + 1 };
                (j, jp, s)
            }
            ChartKind::SphereCyl => {
                let v = snap((c.1 - self.range2.0) / self.h2()).clamp(0.0, (n2 - 1) as f64);
                let j = (v.floor() as usize).min(n2 - 2);
                (j, j + 1, v - j as f64)
            }
        };

        let f00 = samples[self.idx(i1, i2)];
        let f10 = samples[self.idx(i1p, i2)];
        let f01 = samples[self.idx(i1, i2p)];
        let f11 = samples[self.idx(i1p, i2p)];
        (1.0 - t) * (1.0 - s) * f00 + t * (1.0 - s) * f10 + (1.0 - t) * s * f01 + t * s * f11
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_area_is_exact_by_construction() {
        let chart = SurfaceChart::torus_with_area(1.0, 1.0, 64, 64, 2.5).unwrap();
        let area = chart.quad_area();
        assert!((area - 2.5).abs() <= 1e-12 * 2.5, "area {area}");
    }

    #[test]
    fn sphere_area_is_exact_for_constant_density() {
        // trapezoid in z integrates constants exactly
        let chart = SurfaceChart::sphere(32, 33).unwrap();
        let area = chart.quad_area();
        let expect = 4.0 * std::f64::consts::PI;
        assert!((area - expect).abs() <= 1e-12 * expect, "area {area}");
    }

    #[test]
    fn diff1_is_second_order_on_trig() {
        for &n in &[64usize, 128] {
            let chart = SurfaceChart::torus(1.0, 1.0, n, n).unwrap();
            let f: Vec<f64> = (0..chart.len())
                .map(|i| {
                    let (x, _) = chart.node_coords(i);
                    (std::f64::consts::TAU * x).sin()
                })
                .collect();
            let df = chart.diff1(&f);
            let mut err = 0.0f64;
            for i in 0..chart.len() {
                let (x, _) = chart.node_coords(i);
                let exact = std::f64::consts::TAU * (std::f64::consts::TAU * x).cos();
                err = err.max((df[i] - exact).abs());
            }
            let h = chart.h1();
            assert!(err < 50.0 * h * h, "n={n} err={err}");
        }
    }

    #[test]
    fn sphere_diff2_boundary_is_second_order() {
        let chart = SurfaceChart::sphere(16, 129).unwrap();
        let f: Vec<f64> = (0..chart.len())
            .map(|i| {
                let (_, z) = chart.node_coords(i);
                z * z * z
            })
            .collect();
        let df = chart.diff2(&f);
        for i2 in [0usize, 64, 128] {
            let idx = chart.idx(3, i2);
            let z = chart.coord2(i2);
            let exact = 3.0 * z * z;
            let h = chart.h2();
            assert!(
                (df[idx] - exact).abs() < 20.0 * h * h,
                "i2={i2} got {} want {exact}",
                df[idx]
            );
        }
    }

    #[test]
    fn adjoints_match_inner_products() {
        // <D f, g> == <f, D^T g> for both directions on both charts
        let charts = [
            SurfaceChart::torus(1.0, 2.0, 16, 24).unwrap(),
            SurfaceChart::sphere(16, 24).unwrap(),
        ];
        for chart in charts {
            let f: Vec<f64> = (0..chart.len()).map(|i| ((i * 37) % 19) as f64 - 9.0).collect();
            let g: Vec<f64> = (0..chart.len()).map(|i| ((i * 11) % 23) as f64 - 11.0).collect();
            for (d, dt) in [
                (chart.diff1(&f), chart.diff1_adjoint(&g)),
                (chart.diff2(&f), chart.diff2_adjoint(&g)),
            ] {
                let lhs: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum();
                let rhs: f64 = f.iter().zip(&dt).map(|(a, b)| a * b).sum();
                assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn bilinear_hits_nodes_exactly() {
        let chart = SurfaceChart::sphere(16, 17).unwrap();
        let f: Vec<f64> = (0..chart.len()).map(|i| (i as f64).sin()).collect();
        for idx in [0usize, 5, 16 * 17 - 1, 100] {
            let c = chart.node_coords(idx);
            assert_eq!(chart.sample_bilinear(&f, c).to_bits(), f[idx].to_bits());
        }
    }

    #[test]
    fn pole_band_check_flags_theta_dependence() {
        let chart = SurfaceChart::sphere(16, 33).unwrap();
        let bad: Vec<f64> = (0..chart.len())
            .map(|i| {
                let (theta, z) = chart.node_coords(i);
                if z > 0.96 {
                    theta.sin()
                } else {
                    0.0
                }
            })
            .collect();
        assert!(matches!(
            chart.check_pole_band(&bad),
            Err(Error::PoleBandViolation { .. })
        ));
        let good = vec![1.0; chart.len()];
        chart.check_pole_band(&good).unwrap();
    }
}
