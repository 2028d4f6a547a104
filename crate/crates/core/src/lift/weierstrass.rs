//! The Weierstrass elliptic function on a square lattice.
//!
//! Evaluated through the row-resummed series
//!
//! `p(z) = (pi/L)^2 [ sum_n 1/sin^2(pi (z/L - n i)) - 1/3
//!                    + 2 sum_{n>=1} 1/sinh^2(pi n) ]`,
//!
//! obtained by summing each lattice row with `sum_m 1/(w-m)^2 =
//! pi^2/sin^2(pi w)`. Rows decay like `exp(-2 pi |n|)`, so truncating at
//! `|n| <= 12` leaves a tail below 1e-30, far inside the 1e-10 budget.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};

/// Row truncation; the tail is bounded by `8 exp(-2 pi N)`.
const N_ROWS: i64 = 12;

/// Smallest allowed distance to a lattice point, in units of `L`.
pub const LATTICE_GUARD: f64 = 1e-6;

/// Square lattice `L (Z + i Z)`.
#[derive(Debug, Clone, Copy)]
pub struct SquareLattice {
    pub l: f64,
}

impl SquareLattice {
    pub fn new(l: f64) -> Result<SquareLattice> {
        if !(l > 0.0) {
            return Err(Error::InvalidChart(format!("lattice side must be positive, got {l}")));
        }
        Ok(SquareLattice { l })
    }

    /// Reduces `z` to the fundamental square `[0, L) x [0, L)`.
    pub fn reduce(&self, z: Complex64) -> Complex64 {
        Complex64::new(z.re.rem_euclid(self.l), z.im.rem_euclid(self.l))
    }

    /// Distance from `z` to the nearest lattice point.
    pub fn dist_to_lattice(&self, z: Complex64) -> f64 {
        let r = self.reduce(z);
        let dx = r.re.min(self.l - r.re);
        let dy = r.im.min(self.l - r.im);
        (dx * dx + dy * dy).sqrt()
    }

    fn guard(&self, z: Complex64) -> Result<()> {
        let d = self.dist_to_lattice(z);
        if d < LATTICE_GUARD * self.l {
            return Err(Error::LatticePointSingularity { distance: d });
        }
        Ok(())
    }

    /// `p(z)`.
    pub fn weierstrass_p(&self, z: Complex64) -> Result<Complex64> {
        self.guard(z)?;
        let pi = std::f64::consts::PI;
        let scale = pi / self.l;
        let mut acc = Complex64::new(0.0, 0.0);
        for n in -N_ROWS..=N_ROWS {
            let arg = Complex64::new(z.re / self.l, z.im / self.l - n as f64) * pi;
            let s = arg.sin();
            acc += (s * s).inv();
        }
        let mut lattice_const = -1.0 / 3.0;
        for n in 1..=N_ROWS {
            let sh = (pi * n as f64).sinh();
            lattice_const += 2.0 / (sh * sh);
        }
        Ok((acc + lattice_const) * scale * scale)
    }

    /// `p'(z)`.
    pub fn weierstrass_p_prime(&self, z: Complex64) -> Result<Complex64> {
        self.guard(z)?;
        let pi = std::f64::consts::PI;
        let scale = pi / self.l;
        let mut acc = Complex64::new(0.0, 0.0);
        for n in -N_ROWS..=N_ROWS {
            let arg = Complex64::new(z.re / self.l, z.im / self.l - n as f64) * pi;
            let s = arg.sin();
            let c = arg.cos();
            acc -= 2.0 * c / (s * s * s);
        }
        Ok(acc * scale * scale * scale)
    }

    /// `e1 = p(L/2)`, real and positive on the square lattice.
    pub fn e1(&self) -> f64 {
        self.weierstrass_p(Complex64::new(0.5 * self.l, 0.0))
            .expect("half-period is not a lattice point")
            .re
    }

    /// `g2 = 4 e1^2` (square lattice; `g3 = 0`).
    pub fn g2(&self) -> f64 {
        let e1 = self.e1();
        4.0 * e1 * e1
    }

    /// The three half-periods.
    pub fn half_periods(&self) -> [Complex64; 3] {
        [
            Complex64::new(0.5 * self.l, 0.0),
            Complex64::new(0.0, 0.5 * self.l),
            Complex64::new(0.5 * self.l, 0.5 * self.l),
        ]
    }

    /// Right side of the duplication identity,
    /// `p(2z) = ((6 p^2 - g2/2) / (2 p'))^2 - 2 p`.
    pub fn duplication_rhs(&self, z: Complex64) -> Result<Complex64> {
        let p = self.weierstrass_p(z)?;
        let dp = self.weierstrass_p_prime(z)?;
        let g2 = self.g2();
        let num = 6.0 * p * p - 0.5 * g2;
        let ratio = num / (2.0 * dp);
        Ok(ratio * ratio - 2.0 * p)
    }
}
