//! Theorem checks over seeded torus scenarios and the sharp example, plus
//! the flattening perturbation on a localization triple.

use pbsurf_core::collection::builders::{bump_collection, random_plateaus};
use pbsurf_core::collection::collection::{CollectionMode, PositiveCollection};
use pbsurf_core::collection::pb::pb_function;
use pbsurf_core::cover::builders::{
    jittered_lattice_cover, SCENARIO_JITTER, SCENARIO_K, SCENARIO_R_HI, SCENARIO_R_LO,
};
use pbsurf_core::cover::cover::Cover;
use pbsurf_core::cover::general_position::{check_general_position, DEFAULT_ANGLE_THRESHOLD};
use pbsurf_core::fields::sharpness::SharpnessParams;
use pbsurf_core::fields::surgery::flatten_on_disc;
use pbsurf_core::geometry::chart::SurfaceChart;
use pbsurf_core::geometry::ops::integrate;
use pbsurf_core::optimize::sharpness::build_sharpness_example;
use pbsurf_core::verify::checks::{
    check_confined_essential, check_partition_refinement, check_pb_bound, check_star,
    confined_essential_discs,
};
use pbsurf_core::verify::measure::Measure;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn scenario(seed: u64, n: usize, mode: CollectionMode) -> (Cover, PositiveCollection) {
    let chart = SurfaceChart::torus(1.0, 1.0, n, n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
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
    let degree = if rng.gen_bool(0.5) { 5 } else { 7 };
    let coll = bump_collection(&cover, &centers, &radii, &plateaus, degree, mode).unwrap();
    (cover, coll)
}

#[test]
fn torus_scenarios_verify_all_bounds() {
    for seed in 0..8u64 {
        let mode = if seed % 2 == 0 {
            CollectionMode::Partition
        } else {
            CollectionMode::Positive
        };
        let (cover, coll) = scenario(seed, 192, mode);
        // machine-verified hypotheses
        assert!(coll.validate(&cover).pass());
        let gp = check_general_position(&cover, DEFAULT_ANGLE_THRESHOLD);
        assert!(gp.pass(), "seed {seed}: general position failed");
        let confined = confined_essential_discs(&cover);
        assert_eq!(confined.len(), cover.len(), "seed {seed}: all discs qualify");

        let j = confined[(seed as usize) % confined.len()];
        let report = check_confined_essential(&cover, &coll, j, 0.05).unwrap();
        assert!(report.pass, "seed {seed}: {report:?}");

        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a);
        for _ in 0..3 {
            let x = rng.gen_range(0..cover.chart().len());
            let star = check_star(&cover, &coll, x, None, 0.05).unwrap();
            assert!(star.pass, "seed {seed} at {x}: {star:?}");
        }

        let bound = check_pb_bound(&cover, &coll, &Measure::area_form(), None, 0.05).unwrap();
        assert!(bound.pass, "seed {seed}: {bound:?}");

        // Dirac measure on greedily found localization points
        if let Some(points) = cover.find_localization(3) {
            let mu = Measure::dirac(points, true).unwrap();
            let dirac = check_pb_bound(&cover, &coll, &mu, None, 0.05).unwrap();
            assert!(dirac.pass, "seed {seed}: {dirac:?}");
            assert!((dirac.bound - 3.0).abs() < 1e-9);
        }
    }
}

#[test]
fn partition_refinement_carries_factor_two() {
    let (cover, coll) = scenario(42, 192, CollectionMode::Partition);
    let confined = confined_essential_discs(&cover);
    let j = confined[0];
    let report = check_partition_refinement(&cover, &coll, j, 0.05).unwrap();
    assert!(report.pass, "{report:?}");
    assert!(report.value >= 2.0 * (1.0 - 0.05));
}

#[test]
fn two_disjoint_confined_essential_discs_give_four() {
    // a 4x4 lattice with two diagonal discs at torus distance ~0.707
    let chart = SurfaceChart::torus(1.0, 1.0, 256, 256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (cover, centers, radii) =
        jittered_lattice_cover(&chart, 4, 4, 0.238, 0.242, 0.002, &mut rng).unwrap();
    let plateaus = random_plateaus(centers.len(), 0.238, &mut rng);
    let coll = bump_collection(
        &cover,
        &centers,
        &radii,
        &plateaus,
        7,
        CollectionMode::Partition,
    )
    .unwrap();
    assert!(coll.validate(&cover).pass());

    // discs (0,0) and (2,2) are disjoint
    let a = 0usize;
    let b = 2 * 4 + 2;
    assert!(!cover.discs()[a]
        .mask()
        .iter()
        .zip(cover.discs()[b].mask())
        .any(|(&x, &y)| x && y));
    for j in [a, b] {
        let report = check_partition_refinement(&cover, &coll, j, 0.05).unwrap();
        assert!(report.pass, "disc {j}: {report:?}");
    }
    let total = integrate(&pb_function(&coll).unwrap());
    assert!(total >= 4.0 * (1.0 - 0.05), "integral {total}");
}

#[test]
fn sharpness_star_at_north_pole_reports_the_row_value() {
    let chart = SurfaceChart::sphere(384, 385).unwrap();
    let d = 4;
    let (cover, coll) = build_sharpness_example(&chart, d, &SharpnessParams::default()).unwrap();
    let north_pole = chart.idx(0, chart.n2() - 1);
    // the star of the north pole is the confined essential north disc
    let report = check_star(&cover, &coll, north_pole, None, 0.05).unwrap();
    let expect = 1.0 + 1.0 / d as f64;
    assert!(
        (report.value - expect).abs() <= 0.02 * expect,
        "star value {} vs {expect}",
        report.value
    );
    assert!(report.pass);
}

#[test]
fn normalized_sharpness_meets_the_partition_factor() {
    let chart = SurfaceChart::sphere(384, 385).unwrap();
    let (cover, coll) = build_sharpness_example(&chart, 4, &SharpnessParams::default()).unwrap();
    let partition = coll.normalize_to_partition().unwrap();
    let report = check_partition_refinement(&cover, &partition, 0, 0.05).unwrap();
    assert!(report.pass, "{report:?}");
    assert!(report.value >= 2.0 * (1.0 - 0.05), "value {}", report.value);
}

#[test]
fn flattening_a_localization_triple_barely_moves_the_integral() {
    // The natural 3-localization of the example is the two poles plus an
    // equatorial point. Near the poles every member is already constant, so
    // the perturbation is the identity there (this is checked); the genuine
    // surgery happens at the equatorial point, where the side functions vary.
    let chart: Arc<SurfaceChart> = SurfaceChart::sphere(512, 513).unwrap();
    let d = 4;
    let (cover, coll) = build_sharpness_example(&chart, d, &SharpnessParams::default()).unwrap();
    let north = chart.idx(0, chart.n2() - 1);
    let south = chart.idx(0, 0);
    let equator = chart.nearest_node((1.3, 0.0));
    assert!(cover.check_localized(&[north, south, equator]));

    let before = integrate(&pb_function(&coll).unwrap());

    // poles: all fields constant on a polar cap, no surgery needed
    for f in coll.fields() {
        for &(row, name) in &[(chart.n2() - 1, "north"), (0usize, "south")] {
            let reference = f.samples()[chart.idx(0, row)];
            for i1 in 0..chart.n1() {
                for di in 0..6 {
                    let i2 = if row == 0 { di } else { row - di };
                    let v = f.samples()[chart.idx(i1, i2)];
                    assert!(
                        (v - reference).abs() <= 1e-12,
                        "{name} cap is not flat already"
                    );
                }
            }
        }
    }

    // equator: flatten every member on a resolvable surgery disc
    let (sigma, delta) = (0.02, 0.12);
    let center = chart.node_coords(equator);
    let mut fields = coll.fields().to_vec();
    for f in fields.iter_mut() {
        *f = flatten_on_disc(f, center, sigma, delta).unwrap();
    }
    let nf = fields.len();
    let flattened = PositiveCollection::new(
        chart.clone(),
        fields,
        (0..nf).collect(),
        CollectionMode::Positive,
    )
    .unwrap();
    let after = integrate(&pb_function(&flattened).unwrap());
    assert!(
        (after - before).abs() <= 0.01 * before,
        "integral moved {before} -> {after}"
    );
    // and the result really is flat on the inner disc
    let d1 = chart.diff1(flattened.fields()[2].samples());
    for idx in 0..chart.len() {
        if chart.coord_dist(chart.node_coords(idx), center) < sigma - 2.0 * chart.h1() {
            assert_eq!(d1[idx], 0.0);
        }
    }
}
