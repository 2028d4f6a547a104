//! Spectral periodic Poisson solver on the torus.
//!
//! Solves `Laplace u = rhs` for mean-zero right-hand sides with the exact
//! spectral symbol, and returns spectrally differentiated gradients. The DFT
//! kernels come from rustfft; the solver logic lives here.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::geometry::chart::{ChartKind, SurfaceChart};

pub struct PeriodicPoisson {
    n1: usize,
    n2: usize,
    l1: f64,
    l2: f64,
}

pub struct PoissonSolution {
    pub u: Vec<f64>,
    pub grad1: Vec<f64>,
    pub grad2: Vec<f64>,
}

impl PeriodicPoisson {
    pub fn new(chart: &SurfaceChart) -> Result<PeriodicPoisson> {
        if chart.kind() != ChartKind::Torus {
            return Err(Error::MoserRequiresTorus);
        }
        Ok(PeriodicPoisson {
            n1: chart.n1(),
            n2: chart.n2(),
            l1: chart.range1().1 - chart.range1().0,
            l2: chart.range2().1 - chart.range2().0,
        })
    }

    fn wavenumbers(n: usize, l: f64) -> Vec<f64> {
        (0..n)
            .map(|i| {
                let m = if i <= n / 2 { i as i64 } else { i as i64 - n as i64 };
                std::f64::consts::TAU * m as f64 / l
            })
            .collect()
    }

    fn fft2(&self, data: &mut [Complex64], inverse: bool) {
        let mut planner = FftPlanner::<f64>::new();
        let fft2 = if inverse {
            planner.plan_fft_inverse(self.n2)
        } else {
            planner.plan_fft_forward(self.n2)
        };
        for row in data.chunks_exact_mut(self.n2) {
            fft2.process(row);
        }
        let fft1 = if inverse {
            planner.plan_fft_inverse(self.n1)
        } else {
            planner.plan_fft_forward(self.n1)
        };
        let mut col = vec![Complex64::default(); self.n1];
        for j in 0..self.n2 {
            for i in 0..self.n1 {
                col[i] = data[i * self.n2 + j];
            }
            fft1.process(&mut col);
            for i in 0..self.n1 {
                data[i * self.n2 + j] = col[i];
            }
        }
    }

    /// Solves `Laplace u = rhs` (the mean of `rhs` is removed) and returns
    /// `u` with its spectral gradient.
    pub fn solve(&self, rhs: &[f64]) -> PoissonSolution {
        let n = self.n1 * self.n2;
        debug_assert_eq!(rhs.len(), n);
        let mean: f64 = rhs.iter().sum::<f64>() / n as f64;
        let mut hat: Vec<Complex64> = rhs
            .iter()
            .map(|&v| Complex64::new(v - mean, 0.0))
            .collect();
        self.fft2(&mut hat, false);

        let k1 = Self::wavenumbers(self.n1, self.l1);
        let k2 = Self::wavenumbers(self.n2, self.l2);
        let mut u_hat = vec![Complex64::default(); n];
        let mut g1_hat = vec![Complex64::default(); n];
        let mut g2_hat = vec![Complex64::default(); n];
        for i in 0..self.n1 {
            for j in 0..self.n2 {
                let idx = i * self.n2 + j;
                let ksq = k1[i] * k1[i] + k2[j] * k2[j];
                if ksq == 0.0 {
                    continue;
                }
                let u = hat[idx] / (-ksq);
                u_hat[idx] = u;
                // zero the Nyquist mode in each derivative direction
                let d1 = if self.n1 % 2 == 0 && i == self.n1 / 2 {
                    Complex64::default()
                } else {
                    Complex64::new(0.0, k1[i]) * u
                };
                let d2 = if self.n2 % 2 == 0 && j == self.n2 / 2 {
                    Complex64::default()
                } else {
                    Complex64::new(0.0, k2[j]) * u
                };
                g1_hat[idx] = d1;
                g2_hat[idx] = d2;
            }
        }
        let scale = 1.0 / n as f64;
        let to_real = |mut hat: Vec<Complex64>| -> Vec<f64> {
            self.fft2(&mut hat, true);
            hat.iter().map(|c| c.re * scale).collect()
        };
        PoissonSolution {
            u: to_real(u_hat),
            grad1: to_real(g1_hat),
            grad2: to_real(g2_hat),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn recovers_trig_solution() {
        let chart = SurfaceChart::torus(1.0, 2.0, 64, 96).unwrap();
        let solver = PeriodicPoisson::new(&chart).unwrap();
        // u = sin(2 pi x) cos(pi y) on [0,1) x [0,2): Laplace u = -(4pi^2 + pi^2) u
        let mut rhs = vec![0.0; chart.len()];
        let mut expect = vec![0.0; chart.len()];
        for idx in 0..chart.len() {
            let (x, y) = chart.node_coords(idx);
            let u = (TAU * x).sin() * (std::f64::consts::PI * y).cos();
            expect[idx] = u;
            rhs[idx] = -(TAU * TAU + std::f64::consts::PI.powi(2)) * u;
        }
        let sol = solver.solve(&rhs);
        for idx in 0..chart.len() {
            assert!(
                (sol.u[idx] - expect[idx]).abs() < 1e-10,
                "node {idx}: {} vs {}",
                sol.u[idx],
                expect[idx]
            );
        }
        // spectral gradient matches the analytic one
        let (x, y) = chart.node_coords(5 * 96 + 17);
        let g1 = TAU * (TAU * x).cos() * (std::f64::consts::PI * y).cos();
        assert!((sol.grad1[5 * 96 + 17] - g1).abs() < 1e-9);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let chart = SurfaceChart::torus(1.0, 1.0, 32, 32).unwrap();
        let solver = PeriodicPoisson::new(&chart).unwrap();
        let sol = solver.solve(&vec![0.0; chart.len()]);
        assert!(sol.u.iter().all(|&v| v.abs() < 1e-15));
    }
}
