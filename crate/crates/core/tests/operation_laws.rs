//! Laws of condensation, fragmentation, and unrolled lifts on seeded random
//! instances.

use pbsurf_core::collection::collection::{CollectionMode, PositiveCollection};
use pbsurf_core::collection::ops::{condense, fragment};
use pbsurf_core::collection::pb::pb_function;
use pbsurf_core::fields::profile::Profile;
use pbsurf_core::fields::shapes::bump_disc;
use pbsurf_core::geometry::chart::SurfaceChart;
use pbsurf_core::geometry::field::ScalarField;
use pbsurf_core::lift::map::CoveringMap;
use pbsurf_core::lift::ops::pull_back_field;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// A random collection of smooth, occasionally two-component fields. Law
/// tests need no cover; subordination indices are nominal.
fn random_collection(chart: &Arc<SurfaceChart>, seed: u64) -> PositiveCollection {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_fields = rng.gen_range(3..=5);
    let mut fields = Vec::new();
    for _ in 0..n_fields {
        // transition widths of 15+ cells at 128^2 keep the truncation error
        // in the asymptotic regime
        let r = rng.gen_range(0.34..0.40);
        let plateau = r * rng.gen_range(0.15..0.25);
        let p = Profile::poly(plateau, r, 9);
        let c = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let mut f = bump_disc(chart, c, &p).unwrap();
        if rng.gen_bool(0.4) {
            // second component far from the first, supports stay disjoint
            let c2 = (
                (c.0 + 0.5 + rng.gen_range(-0.03..0.03)).rem_euclid(1.0),
                (c.1 + 0.5 + rng.gen_range(-0.03..0.03)).rem_euclid(1.0),
            );
            let r2 = rng.gen_range(0.22..0.26);
            let p2 = Profile::poly(r2 * 0.25, r2, 9);
            f = f.add(&bump_disc(chart, c2, &p2).unwrap()).unwrap();
        }
        fields.push(f);
    }
    let nf = fields.len();
    PositiveCollection::new(
        chart.clone(),
        fields,
        (0..nf).collect(),
        CollectionMode::Positive,
    )
    .unwrap()
}

#[test]
fn condensation_and_fragmentation_laws_on_seeded_instances() {
    let chart = SurfaceChart::torus(1.0, 1.0, 128, 128).unwrap();
    for seed in 0..20u64 {
        let coll = random_collection(&chart, seed);
        let p = pb_function(&coll).unwrap();

        // condensation: P' <= P pointwise
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
        let m = rng.gen_range(1..=coll.len().max(2) - 1);
        let mut map: Vec<usize> = (0..coll.len()).map(|i| i % m).collect();
        // shuffle targets a little
        for i in 0..map.len() {
            if rng.gen_bool(0.5) {
                map[i] = rng.gen_range(0..m);
            }
        }
        let len = map.len();
        for j in 0..m {
            if !map.contains(&j) {
                map[j % len] = j;
            }
        }
        let cond = condense(&coll, &map, m).unwrap();
        let pc = pb_function(&cond).unwrap();
        for i in 0..chart.len() {
            assert!(
                pc.samples()[i] <= p.samples()[i] + 1e-12,
                "seed {seed} node {i}: {} > {}",
                pc.samples()[i],
                p.samples()[i]
            );
        }

        // fragmentation: P' = P pointwise
        let frag = fragment(&coll).unwrap();
        let pf = pb_function(&frag).unwrap();
        for i in 0..chart.len() {
            assert!(
                (pf.samples()[i] - p.samples()[i]).abs() <= 1e-12,
                "seed {seed} node {i}"
            );
        }
        // S preserved by both
        for i in 0..chart.len() {
            let s = coll.sum_field().samples()[i];
            assert!((cond.sum_field().samples()[i] - s).abs() <= 1e-12);
            assert!((frag.sum_field().samples()[i] - s).abs() <= 1e-12);
        }
    }
}

/// `P` of the pulled-back collection vs the pullback of `P`, at matched
/// resolutions where the unroll map sends nodes to nodes. Returns the sup
/// error and the coarse value of the error at a probe point (the coarse
/// argmax when no probe is given): the argmax node shifts between grids at
/// the kinks of `|.|`, so the convergence order is read at a fixed point.
fn unroll_lift_error(seed: u64, n: usize, probe: Option<(f64, f64)>) -> (f64, f64, (f64, f64)) {
    let target = SurfaceChart::torus(1.0, 1.0, n, n).unwrap();
    let coll = random_collection(&target, seed);
    let p_target = pb_function(&coll).unwrap();

    let map = CoveringMap::torus_unroll(&target, 2, 1, n, n).unwrap();
    let pulled_fields: Vec<ScalarField> = coll
        .fields()
        .iter()
        .map(|f| pull_back_field(&map, f).unwrap())
        .collect();
    let nf = pulled_fields.len();
    let lifted = PositiveCollection::new(
        map.source().clone(),
        pulled_fields,
        (0..nf).collect(),
        CollectionMode::Positive,
    )
    .unwrap();
    let p_lift = pb_function(&lifted).unwrap();

    let source = map.source();
    let mut sup = 0.0f64;
    let mut argmax = (0.0, 0.0);
    for idx in 0..source.len() {
        let e = (p_lift.samples()[idx] - p_target.at(map.forward_node(idx))).abs();
        if e > sup {
            sup = e;
            argmax = source.node_coords(idx);
        }
    }
    let probe_pt = probe.unwrap_or(argmax);
    let probe_idx = source.nearest_node(probe_pt);
    let probe_err =
        (p_lift.samples()[probe_idx] - p_target.at(map.forward_node(probe_idx))).abs();
    (sup, probe_err, argmax)
}

#[test]
fn unroll_lift_preserves_pb_at_second_order() {
    for seed in [3u64, 11, 19] {
        let (sup128, e128, argmax) = unroll_lift_error(seed, 128, None);
        let (sup256, e256, _) = unroll_lift_error(seed, 256, Some(argmax));
        let order = (e128 / e256).log2();
        assert!(
            order >= 1.9,
            "seed {seed}: order {order} at the coarse argmax ({e128:.3e} -> {e256:.3e})"
        );
        // the global sup also decays at second order up to argmax shuffling
        let sup_order = (sup128 / sup256).log2();
        assert!(
            sup_order >= 1.5,
            "seed {seed}: sup order {sup_order} ({sup128:.3e} -> {sup256:.3e})"
        );
    }
}
