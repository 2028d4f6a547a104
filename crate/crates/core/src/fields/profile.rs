//! Radial profiles for bump constructions.
//!
//! A profile maps distance to a value: `1` inside `r_inner`, `0` outside
//! `r_outer`, monotone in between, with C1 plateau joins.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// Polynomial transition of odd degree `2k + 1` whose first `k`
    /// derivatives vanish at both plateaus (the regularized incomplete
    /// beta polynomial; degree 3 is the classic smoothstep).
    PolyBump { degree: u32 },
    /// Alias for `PolyBump { degree: 3 }`.
    Smoothstep,
    /// Monotone table of `(t, value)` pairs on `[0, 1]`, linearly
    /// interpolated; `t = 1` at the inner plateau.
    Table(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub kind: ProfileKind,
    pub r_inner: f64,
    pub r_outer: f64,
}

impl Profile {
    pub fn poly(r_inner: f64, r_outer: f64, degree: u32) -> Profile {
        Profile {
            kind: ProfileKind::PolyBump { degree },
            r_inner,
            r_outer,
        }
    }

    pub fn smoothstep(r_inner: f64, r_outer: f64) -> Profile {
        Profile {
            kind: ProfileKind::Smoothstep,
            r_inner,
            r_outer,
        }
    }

    /// Value at distance `r` from the center.
    pub fn eval(&self, r: f64) -> f64 {
        if r <= self.r_inner {
            return 1.0;
        }
        if r >= self.r_outer {
            return 0.0;
        }
        let t = (self.r_outer - r) / (self.r_outer - self.r_inner);
        self.shape(t)
    }

    /// Transition shape on `t in [0, 1]`, increasing from 0 to 1.
    pub fn shape(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        match &self.kind {
            ProfileKind::Smoothstep => t * t * (3.0 - 2.0 * t),
            ProfileKind::PolyBump { degree } => {
                let k = ((degree - 1) / 2) as i64;
                // s(t) = t^(k+1) * sum_{j=0..k} C(k+j, j) (1-t)^j
                let omt = 1.0 - t;
                let mut coeff = 1.0f64; // C(k+j, j), j = 0
                let mut pow = 1.0f64;
                let mut acc = 0.0f64;
                for j in 0..=k {
                    if j > 0 {
                        coeff *= (k + j) as f64 / j as f64;
                        pow *= omt;
                    }
                    acc += coeff * pow;
                }
                t.powi(k as i32 + 1) * acc
            }
            ProfileKind::Table(entries) => {
                if entries.is_empty() {
                    return t;
                }
                if t <= entries[0].0 {
                    return entries[0].1;
                }
                for w in entries.windows(2) {
                    let (t0, v0) = w[0];
                    let (t1, v1) = w[1];
                    if t <= t1 {
                        let s = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
                        return v0 + s * (v1 - v0);
                    }
                }
                entries[entries.len() - 1].1
            }
        }
    }

    /// Checks radii ordering, monotonicity, degree, and C1 plateau joins
    /// (finite-difference slope at the joins bounded by `C * h`).
    pub fn validate(&self) -> Result<()> {
        if !(self.r_inner > 0.0 && self.r_inner < self.r_outer) {
            return Err(Error::InvalidProfile(format!(
                "need 0 < r_inner < r_outer, got {} and {}",
                self.r_inner, self.r_outer
            )));
        }
        if let ProfileKind::PolyBump { degree } = self.kind {
            if degree < 3 || degree % 2 == 0 {
                return Err(Error::InvalidProfile(format!(
                    "poly_bump degree must be odd and at least 3, got {degree}"
                )));
            }
        }
        if let ProfileKind::Table(entries) = &self.kind {
            if entries.len() < 2 {
                return Err(Error::InvalidProfile("table needs at least 2 rows".into()));
            }
            for w in entries.windows(2) {
                if w[1].0 <= w[0].0 || w[1].1 < w[0].1 {
                    return Err(Error::InvalidProfile(
                        "table must be strictly increasing in t and nondecreasing in value".into(),
                    ));
                }
            }
        }
        // monotone between plateaus
        let samples = 512;
        let mut prev = self.shape(0.0);
        for i in 1..=samples {
            let cur = self.shape(i as f64 / samples as f64);
            if cur + 1e-12 < prev {
                return Err(Error::InvalidProfile(format!(
                    "shape is not monotone near t = {}",
                    i as f64 / samples as f64
                )));
            }
            prev = cur;
        }
        // C1 joins: slope within h of each plateau must be O(h)
        let h = 1e-3;
        let c = 10.0;
        let slope0 = (self.shape(h) - self.shape(0.0)) / h;
        let slope1 = (self.shape(1.0) - self.shape(1.0 - h)) / h;
        if slope0.abs() > c * h || slope1.abs() > c * h {
            return Err(Error::InvalidProfile(format!(
                "plateau joins are not C1 (slopes {slope0:.3e}, {slope1:.3e})"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_three_matches_smoothstep() {
        let p = Profile::poly(0.1, 0.2, 3);
        let s = Profile::smoothstep(0.1, 0.2);
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            assert!((p.shape(t) - s.shape(t)).abs() < 1e-14);
        }
    }

    #[test]
    fn higher_degree_profiles_validate_and_plateau() {
        for degree in [3u32, 5, 7, 9] {
            let p = Profile::poly(0.1, 0.3, degree);
            p.validate().unwrap();
            assert_eq!(p.eval(0.05), 1.0);
            assert_eq!(p.eval(0.35), 0.0);
            assert!((p.shape(0.5) - 0.5).abs() < 1e-12, "odd symmetry at midpoint");
        }
    }

    #[test]
    fn even_degree_rejected() {
        assert!(Profile::poly(0.1, 0.2, 4).validate().is_err());
    }

    #[test]
    fn linear_table_fails_c1_join() {
        let p = Profile {
            kind: ProfileKind::Table(vec![(0.0, 0.0), (1.0, 1.0)]),
            r_inner: 0.1,
            r_outer: 0.2,
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn flat_ended_table_passes() {
        let p = Profile {
            kind: ProfileKind::Table(vec![
                (0.0, 0.0),
                (0.1, 0.0),
                (0.5, 0.5),
                (0.9, 1.0),
                (1.0, 1.0),
            ]),
            r_inner: 0.1,
            r_outer: 0.2,
        };
        p.validate().unwrap();
    }
}
