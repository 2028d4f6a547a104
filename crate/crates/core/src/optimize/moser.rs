//! Moser rescaling on the torus: a diffeomorphism pulling the rescaled form
//! `omega_0 = (Area / int P omega) P omega` back to `omega`.
//!
//! The interpolation family `omega_t = (1-t) omega_0 + t omega_1` has
//! `d/dt omega_t = d sigma` with `sigma = -u_y dx + u_x dy` and
//! `Laplace u = rho_1 - rho_0`, so the Moser field is `X_t = -grad u / rho_t`.
//! The flow runs through 64 uniform RK4 steps; space is interpolated
//! bilinearly and `rho_t` blends linearly in `t`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::chart::{ChartKind, SurfaceChart};
use crate::geometry::field::ScalarField;
use crate::geometry::ops::integrate;
use crate::optimize::diffeo::DiffeoGrid;
use crate::optimize::poisson_fft::PeriodicPoisson;
use crate::sum::max_abs;

pub const MOSER_TIME_STEPS: usize = 64;

#[derive(Debug, Clone)]
pub struct MoserReport {
    /// `sup |rho_0(phi(x)) det Dphi(x) - rho_1(x)| / sup rho_1`.
    pub pullback_residual: f64,
    /// Normalization `Area / int P omega`.
    pub scale: f64,
    /// Density of the target form `omega_0`.
    pub rho0: Vec<f64>,
}

struct Flow<'a> {
    chart: &'a SurfaceChart,
    grad1: Vec<f64>,
    grad2: Vec<f64>,
    rho0: &'a [f64],
    rho1: &'a [f64],
}

impl Flow<'_> {
    fn velocity(&self, c: (f64, f64), t: f64) -> (f64, f64) {
        let g1 = self.chart.sample_bilinear(&self.grad1, c);
        let g2 = self.chart.sample_bilinear(&self.grad2, c);
        let r0 = self.chart.sample_bilinear(self.rho0, c);
        let r1 = self.chart.sample_bilinear(self.rho1, c);
        let rho_t = (1.0 - t) * r0 + t * r1;
        (-g1 / rho_t, -g2 / rho_t)
    }

    /// One classical RK4 step from `(c, t)` with increment `dt`.
    fn rk4(&self, c: (f64, f64), t: f64, dt: f64) -> (f64, f64) {
        let k1 = self.velocity(c, t);
        let k2 = self.velocity((c.0 + 0.5 * dt * k1.0, c.1 + 0.5 * dt * k1.1), t + 0.5 * dt);
        let k3 = self.velocity((c.0 + 0.5 * dt * k2.0, c.1 + 0.5 * dt * k2.1), t + 0.5 * dt);
        let k4 = self.velocity((c.0 + dt * k3.0, c.1 + dt * k3.1), t + dt);
        (
            c.0 + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            c.1 + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        )
    }

    /// Integrates every grid node from `t0` to `t1`, returning the wrapped
    /// displacement fields.
    fn integrate_all(&self, t0: f64, t1: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.chart.len();
        let dt = (t1 - t0) / MOSER_TIME_STEPS as f64;
        let mut d1 = vec![0.0; n];
        let mut d2 = vec![0.0; n];
        for idx in 0..n {
            let start = self.chart.node_coords(idx);
            let mut c = start;
            let mut t = t0;
            for _ in 0..MOSER_TIME_STEPS {
                c = self.rk4(c, t, dt);
                t += dt;
            }
            d1[idx] = self.chart.wrap_delta1(c.0, start.0);
            d2[idx] = self.chart.wrap_delta2(c.1, start.1);
        }
        (d1, d2)
    }
}

/// Builds the Moser diffeomorphism for a strictly positive field `P`:
/// `phi^* omega_0 = omega` with `omega_0 = (Area / int P omega) P omega`.
pub fn moser_rescale(
    chart: &Arc<SurfaceChart>,
    p: &ScalarField,
) -> Result<(DiffeoGrid, MoserReport)> {
    if chart.kind() != ChartKind::Torus {
        return Err(Error::MoserRequiresTorus);
    }
    if !p.chart().compatible(chart) {
        return Err(Error::ChartMismatch { context: "moser_rescale" });
    }
    let p_min = crate::sum::min(p.samples());
    if p_min <= 0.0 {
        return Err(Error::NonPositiveField {
            context: "moser density".into(),
            min: p_min,
        });
    }
    let area = chart.declared_area();
    let mass = integrate(p);
    let scale = area / mass;
    let rho1 = chart.density().to_vec();
    let rho0: Vec<f64> = (0..chart.len())
        .map(|i| scale * p.samples()[i] * rho1[i])
        .collect();

    let rhs: Vec<f64> = (0..chart.len()).map(|i| rho1[i] - rho0[i]).collect();
    let solver = PeriodicPoisson::new(chart)?;
    let sol = solver.solve(&rhs);

    let flow = Flow {
        chart,
        grad1: sol.grad1,
        grad2: sol.grad2,
        rho0: &rho0,
        rho1: &rho1,
    };
    // the flow of X_t from 0 to 1 pulls omega_1 back to omega_0; phi is its
    // inverse, obtained by integrating backwards in time
    let forward = flow.integrate_all(1.0, 0.0);
    // invert the interpolated forward map directly (fixed point of
    // x = y - D(x)), so the round trip closes to solver precision instead of
    // accumulating a second integration error
    let inverse = invert_displacements(chart, &forward);
    let diffeo = DiffeoGrid::new(chart.clone(), forward, inverse)?;

    let residual = pullback_residual(&diffeo, &rho0, &rho1);
    Ok((
        diffeo,
        MoserReport {
            pullback_residual: residual,
            scale,
            rho0,
        },
    ))
}

fn invert_displacements(
    chart: &SurfaceChart,
    forward: &(Vec<f64>, Vec<f64>),
) -> (Vec<f64>, Vec<f64>) {
    let n = chart.len();
    let mut inv1 = vec![0.0; n];
    let mut inv2 = vec![0.0; n];
    for idx in 0..n {
        let y = chart.node_coords(idx);
        let mut x = y;
        for _ in 0..60 {
            let d1 = chart.sample_bilinear(&forward.0, x);
            let d2 = chart.sample_bilinear(&forward.1, x);
            let next = (y.0 - d1, y.1 - d2);
            let step = chart.coord_dist(next, x);
            x = next;
            if step < 1e-13 {
                break;
            }
        }
        inv1[idx] = chart.wrap_delta1(x.0, y.0);
        inv2[idx] = chart.wrap_delta2(x.1, y.1);
    }
    (inv1, inv2)
}

/// `sup |rho_0(phi(x)) det Dphi(x) - rho_1(x)| / sup rho_1`.
pub fn pullback_residual(diffeo: &DiffeoGrid, rho0: &[f64], rho1: &[f64]) -> f64 {
    let chart = diffeo.chart();
    let det = diffeo.jacobian_det_field();
    let mut worst = 0.0f64;
    for idx in 0..chart.len() {
        let c = chart.node_coords(idx);
        let r0 = chart.sample_bilinear(rho0, diffeo.forward(c));
        let r = r0 * det[idx] - rho1[idx];
        worst = worst.max(r.abs());
    }
    worst / max_abs(rho1)
}
