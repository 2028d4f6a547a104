//! The sharp example family on the round sphere.
//!
//! Two polar caps plus `d + 1` azimuthal side functions built from a latitude
//! profile `h` and a periodic dip profile `w`:
//!
//! - `f_plus = h(z)`, `f_minus = h(-z)`,
//! - `f_j = (1/d) (1 - h(z)) (1 - h(-z)) w(theta + 2 pi j / (d+1))`.
//!
//! `h` increases from 0 to 1 over `[z_lo, z_hi]` with plateaus beyond; `w`
//! equals 1 except for a dip to 0 of half-width `2 pi / (3 (d+1))` around 0,
//! so at most one shifted copy dips at any angle and the pointwise sum lands
//! in `[1, 1 + 1/d]`. The symmetric `(1 - h(-z))` factor keeps the side
//! functions single-valued at the south pole.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::profile::Profile;
use crate::geometry::chart::{ChartKind, SurfaceChart};
use crate::geometry::field::ScalarField;

#[derive(Debug, Clone, Copy)]
pub struct SharpnessParams {
    /// Latitude where `h` leaves 0.
    pub z_lo: f64,
    /// Latitude where `h` reaches 1.
    pub z_hi: f64,
    /// Inner (zero-plateau) half-width of the `w` dip, as a fraction of the
    /// outer half-width `2 pi / (3 (d+1))`.
    pub dip_inner_frac: f64,
    /// Polynomial transition degree for both profiles.
    pub degree: u32,
    /// Margin added to supports when building the cover discs, in z units.
    pub disc_margin_z: f64,
}

impl Default for SharpnessParams {
    fn default() -> Self {
        SharpnessParams {
            z_lo: 0.15,
            z_hi: 0.85,
            dip_inner_frac: 0.35,
            degree: 5,
            disc_margin_z: 0.04,
        }
    }
}

impl SharpnessParams {
    pub fn validate(&self, chart: &SurfaceChart, d: usize) -> Result<()> {
        if d < 2 {
            return Err(Error::PreconditionFailed(format!(
                "sharpness example needs d >= 2, got {d}"
            )));
        }
        if !(0.0 < self.z_lo && self.z_lo < self.z_hi && self.z_hi < 1.0) {
            return Err(Error::InvalidProfile(format!(
                "need 0 < z_lo < z_hi < 1, got {} and {}",
                self.z_lo, self.z_hi
            )));
        }
        if self.z_hi + self.disc_margin_z > 1.0 - chart.pole_band() {
            return Err(Error::DiscOutOfBounds(
                "side discs would reach the pole band".into(),
            ));
        }
        if !(0.0 < self.dip_inner_frac && self.dip_inner_frac < 1.0) {
            return Err(Error::InvalidProfile(format!(
                "dip_inner_frac must lie in (0,1), got {}",
                self.dip_inner_frac
            )));
        }
        // the support condition on w: the removed sector must span several
        // grid columns or the subordination margins vanish
        let t0 = self.dip_inner(d);
        if t0 < 5.0 * chart.h1() {
            return Err(Error::InvalidProfile(format!(
                "dip plateau {t0:.4} under-resolved at n1 = {} (need d or the grid larger)",
                chart.n1()
            )));
        }
        Ok(())
    }

    /// Outer dip half-width `2 pi / (3 (d+1))`.
    pub fn dip_outer(&self, d: usize) -> f64 {
        std::f64::consts::TAU / (3.0 * (d as f64 + 1.0))
    }

    /// Inner (zero plateau) dip half-width.
    pub fn dip_inner(&self, d: usize) -> f64 {
        self.dip_inner_frac * self.dip_outer(d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SharpnessRole {
    /// North cap `h(z)`.
    Plus,
    /// South cap `h(-z)`.
    Minus,
    /// Azimuthal side function `j` for `j in 0..=d`.
    Side(usize),
}

fn h_of(params: &SharpnessParams) -> Profile {
    Profile::poly(1.0, 2.0, params.degree)
}

fn h_eval(p: &Profile, params: &SharpnessParams, z: f64) -> f64 {
    p.shape((z - params.z_lo) / (params.z_hi - params.z_lo))
}

/// Periodic dip: 0 on `|t| <= t0`, 1 on `|t| >= t1`, monotone between.
fn w_eval(p: &Profile, t0: f64, t1: f64, t: f64) -> f64 {
    let mut t = t % std::f64::consts::TAU;
    if t > std::f64::consts::PI {
        t -= std::f64::consts::TAU;
    } else if t < -std::f64::consts::PI {
        t += std::f64::consts::TAU;
    }
    let a = t.abs();
    p.shape((a - t0) / (t1 - t0))
}

/// One member of the family.
pub fn sharpness_field(
    chart: &Arc<SurfaceChart>,
    d: usize,
    role: SharpnessRole,
    params: &SharpnessParams,
) -> Result<ScalarField> {
    if chart.kind() != ChartKind::SphereCyl {
        return Err(Error::InvalidChart("sharpness family needs the sphere chart".into()));
    }
    params.validate(chart, d)?;
    let shape = h_of(params);
    match role {
        SharpnessRole::Plus => {
            ScalarField::from_fn(chart, |_, z| h_eval(&shape, params, z))
        }
        SharpnessRole::Minus => {
            ScalarField::from_fn(chart, |_, z| h_eval(&shape, params, -z))
        }
        SharpnessRole::Side(j) => {
            if j > d {
                return Err(Error::PreconditionFailed(format!(
                    "side index {j} exceeds d = {d}"
                )));
            }
            let t0 = params.dip_inner(d);
            let t1 = params.dip_outer(d);
            let phase = std::f64::consts::TAU * j as f64 / (d as f64 + 1.0);
            let inv_d = 1.0 / d as f64;
            ScalarField::from_fn(chart, |theta, z| {
                let a = 1.0 - h_eval(&shape, params, z);
                let b = 1.0 - h_eval(&shape, params, -z);
                if a == 0.0 || b == 0.0 {
                    return 0.0;
                }
                inv_d * a * b * w_eval(&shape, t0, t1, theta + phase)
            })
        }
    }
}

/// Implicit boundary fields for the cover discs enclosing the supports.
pub fn sharpness_disc_field(
    chart: &Arc<SurfaceChart>,
    d: usize,
    role: SharpnessRole,
    params: &SharpnessParams,
) -> Result<ScalarField> {
    params.validate(chart, d)?;
    let m = params.disc_margin_z;
    match role {
        // north cap disc {z > z_lo - m}
        SharpnessRole::Plus => {
            ScalarField::from_fn_full(chart, |_, z| (params.z_lo - m) - z)
        }
        SharpnessRole::Minus => {
            ScalarField::from_fn_full(chart, |_, z| z - (m - params.z_lo))
        }
        // side disc: band |z| < z_hi + m minus the shrunken dip sector
        SharpnessRole::Side(j) => {
            if j > d {
                return Err(Error::PreconditionFailed(format!(
                    "side index {j} exceeds d = {d}"
                )));
            }
            let t0 = params.dip_inner(d);
            let sector = 0.5 * t0;
            let phase = std::f64::consts::TAU * j as f64 / (d as f64 + 1.0);
            ScalarField::from_fn_full(chart, |theta, z| {
                let mut t = (theta + phase) % std::f64::consts::TAU;
                if t > std::f64::consts::PI {
                    t -= std::f64::consts::TAU;
                }
                let band = z.abs() - (params.z_hi + m);
                let cut = sector - t.abs();
                band.max(cut)
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sum::{max, min};

    #[test]
    fn sum_lands_in_unit_band() {
        let chart = SurfaceChart::sphere(256, 257).unwrap();
        let params = SharpnessParams::default();
        for d in [2usize, 4] {
            let mut sum = vec![0.0f64; chart.len()];
            for role in roles(d) {
                let f = sharpness_field(&chart, d, role, &params).unwrap();
                for (a, &b) in sum.iter_mut().zip(f.samples()) {
                    *a += b;
                }
            }
            let lo = min(&sum);
            let hi = max(&sum);
            assert!(lo >= 1.0 - 1e-9, "d={d}: min {lo}");
            assert!(hi <= 1.0 + 1.0 / d as f64 + 1e-9, "d={d}: max {hi}");
        }
    }

    #[test]
    fn side_fields_vanish_at_both_poles() {
        let chart = SurfaceChart::sphere(256, 257).unwrap();
        let params = SharpnessParams::default();
        let f = sharpness_field(&chart, 4, SharpnessRole::Side(1), &params).unwrap();
        f.check_pole_band().unwrap();
        for i1 in 0..chart.n1() {
            assert_eq!(f.samples()[chart.idx(i1, 0)], 0.0);
            assert_eq!(f.samples()[chart.idx(i1, chart.n2() - 1)], 0.0);
        }
    }

    #[test]
    fn under_resolved_dip_is_rejected() {
        let chart = SurfaceChart::sphere(64, 65).unwrap();
        let params = SharpnessParams::default();
        assert!(sharpness_field(&chart, 32, SharpnessRole::Plus, &params).is_err());
    }

    pub(super) fn roles(d: usize) -> Vec<SharpnessRole> {
        let mut roles = vec![SharpnessRole::Plus, SharpnessRole::Minus];
        roles.extend((0..=d).map(SharpnessRole::Side));
        roles
    }
}
