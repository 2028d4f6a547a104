//! The averaging chain behind the measure bound, emitted as a report: both
//! sides of `mu(C)/mu(U) <= int P_F omega` plus the Fubini rearrangement
//! recomputed along both summation orders.

use crate::collection::collection::PositiveCollection;
use crate::collection::pb::pb_function;
use crate::cover::cover::Cover;
use crate::error::{Error, Result};
use crate::geometry::chart::ChartKind;
use crate::geometry::ops::{integrate, poisson_bracket};
use crate::sum::pairwise_sum;
use crate::verify::measure::Measure;

#[derive(Debug, Clone)]
pub struct AveragingReport {
    /// `mu(C)` for the star-bound function `C`.
    pub mu_c: f64,
    /// `mu(U) = max_i mu(U_i)`.
    pub mu_u: f64,
    /// `mu(C)/mu(U)`, the averaged lower bound.
    pub lhs: f64,
    /// `int P_F omega`.
    pub rhs: f64,
    /// `sum_ij mu(U_j) int |{f_i, f_j}| omega`, summed disc-first.
    pub fubini_direct: f64,
    /// The same double sum evaluated point-first through the membership sets.
    pub fubini_exchanged: f64,
    /// Whether `lhs <= rhs` within the stated tolerance.
    pub holds: bool,
    pub tolerance: f64,
}

impl AveragingReport {
    pub fn fubini_agrees(&self, rel_tol: f64) -> bool {
        let scale = self.fubini_direct.abs().max(1.0);
        (self.fubini_direct - self.fubini_exchanged).abs() <= rel_tol * scale
    }
}

pub fn averaging_report(
    cover: &Cover,
    coll: &PositiveCollection,
    mu: &Measure,
    localization: Option<&[usize]>,
    tolerance: f64,
) -> Result<AveragingReport> {
    let chart = cover.chart().clone();
    mu.check_probability(&chart)?;

    // the star-bound function C
    let c_at: Box<dyn Fn(usize) -> f64> = match chart.kind() {
        ChartKind::Torus => Box::new(|_| 1.0),
        ChartKind::SphereCyl => {
            let Some(points) = localization else {
                return Err(Error::HypothesesUnmet(
                    "averaging on the sphere needs a declared 3-localization".into(),
                ));
            };
            if points.len() < 3 || !cover.check_localized(points) {
                return Err(Error::HypothesesUnmet(
                    "declared localization is not a verified 3-localization".into(),
                ));
            }
            let pts = points.to_vec();
            Box::new(move |idx| if pts.contains(&idx) { 1.0 } else { 0.25 })
        }
    };

    let mu_c = mu.integrate_fn(&chart, |idx| c_at(idx))?;
    let mut mu_u = 0.0f64;
    let mut mu_disc = Vec::with_capacity(cover.len());
    for disc in cover.discs() {
        let m = mu.of_mask(&chart, disc.mask())?;
        mu_disc.push(m);
        if m > mu_u {
            mu_u = m;
        }
    }

    let rhs = integrate(&pb_function(coll)?);
    let lhs = mu_c / mu_u;

    // I[i][j] = int |{f_i, f_j}| omega
    let n = coll.len();
    let mut pair_integrals = vec![0.0f64; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let b = poisson_bracket(&coll.fields()[i], &coll.fields()[j])?;
            let absb = b.map_samples(|v| v.abs())?;
            let v = integrate(&absb);
            pair_integrals[i * n + j] = v;
            pair_integrals[j * n + i] = v;
        }
    }
    // row sums per *disc* (fields assigned to the disc pool their rows)
    let mut row_of_disc = vec![0.0f64; cover.len()];
    for (jf, &jd) in coll.disc_of().iter().enumerate() {
        let terms: Vec<f64> = (0..n).map(|i| pair_integrals[i * n + jf]).collect();
        row_of_disc[jd] += pairwise_sum(&terms);
    }
    let direct_terms: Vec<f64> = (0..cover.len())
        .map(|jd| mu_disc[jd] * row_of_disc[jd])
        .collect();
    let fubini_direct = pairwise_sum(&direct_terms);

    let fubini_exchanged = mu.integrate_fn(&chart, |idx| {
        let mut acc = 0.0;
        for jd in cover.members_at(idx) {
            acc += row_of_disc[jd];
        }
        acc
    })?;

    let holds = lhs <= rhs + tolerance * rhs.abs().max(1.0);
    Ok(AveragingReport {
        mu_c,
        mu_u,
        lhs,
        rhs,
        fubini_direct,
        fubini_exchanged,
        holds,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collection::builders::{bump_collection, random_plateaus};
    use crate::collection::collection::CollectionMode;
    use crate::cover::builders::{
        jittered_lattice_cover, SCENARIO_JITTER, SCENARIO_K, SCENARIO_R_HI, SCENARIO_R_LO,
    };
    use crate::geometry::chart::SurfaceChart;
    use rand::SeedableRng;

    fn scenario(seed: u64) -> (Cover, PositiveCollection) {
        let chart = SurfaceChart::torus(1.0, 1.0, 192, 192).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let (cover, centers, radii) = jittered_lattice_cover(
            &chart,
            SCENARIO_K,
            SCENARIO_K,
            SCENARIO_R_LO,
            SCENARIO_R_HI,
            SCENARIO_JITTER,
            &mut rng,
        )
        .unwrap();
        let plateaus = random_plateaus(centers.len(), SCENARIO_R_LO, &mut rng);
        let coll = bump_collection(
            &cover,
            &centers,
            &radii,
            &plateaus,
            7,
            CollectionMode::Partition,
        )
        .unwrap();
        (cover, coll)
    }

    #[test]
    fn fubini_rearrangement_is_an_identity() {
        let (cover, coll) = scenario(42);
        let report =
            averaging_report(&cover, &coll, &Measure::area_form(), None, 0.05).unwrap();
        assert!(report.fubini_agrees(1e-9), "{report:?}");
        assert!(report.holds, "{report:?}");
    }

    #[test]
    fn area_form_reproduces_capacity_bound() {
        let (cover, coll) = scenario(7);
        let report =
            averaging_report(&cover, &coll, &Measure::area_form(), None, 0.05).unwrap();
        // mu(C) = 1 (normalized), mu(U) = c(U)/Area
        let chart = cover.chart();
        let expect = chart.declared_area() / cover.capacity();
        assert!(
            (report.lhs - expect).abs() <= 1e-9 * expect,
            "lhs {} vs Area/c {}",
            report.lhs,
            expect
        );
    }

    #[test]
    fn dirac_on_localization_points_has_unit_cover_mass() {
        let (cover, coll) = scenario(3);
        let points = cover.find_localization(4).expect("lattice localizes");
        let mu = Measure::dirac(points, false).unwrap();
        let report = averaging_report(&cover, &coll, &mu, None, 0.05);
        // unit weights: not a probability measure
        assert!(report.is_err());
        let points = cover.find_localization(4).unwrap();
        let mu = Measure::dirac(points, true).unwrap();
        let report = averaging_report(&cover, &coll, &mu, None, 0.05).unwrap();
        // each disc contains at most one point: mu(U) = 1/m exactly
        assert!((report.mu_u - 0.25).abs() <= 1e-12, "mu_u = {}", report.mu_u);
        assert!(report.fubini_agrees(1e-9));
    }
}
