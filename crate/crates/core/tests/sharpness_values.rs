//! Quadrature values of the sharp example family.

use pbsurf_core::collection::collection::{CollectionMode, PositiveCollection};
use pbsurf_core::collection::pb::pb_function;
use pbsurf_core::fields::sharpness::{sharpness_field, SharpnessParams, SharpnessRole};
use pbsurf_core::geometry::chart::SurfaceChart;
use pbsurf_core::geometry::ops::{integrate, poisson_bracket};

fn family(d: usize, n: usize) -> PositiveCollection {
    let chart = SurfaceChart::sphere(n, n + 1).unwrap();
    let params = SharpnessParams::default();
    let mut fields = vec![
        sharpness_field(&chart, d, SharpnessRole::Plus, &params).unwrap(),
        sharpness_field(&chart, d, SharpnessRole::Minus, &params).unwrap(),
    ];
    for j in 0..=d {
        fields.push(sharpness_field(&chart, d, SharpnessRole::Side(j), &params).unwrap());
    }
    let n_fields = fields.len();
    PositiveCollection::new(
        chart,
        fields,
        (0..n_fields).collect(),
        CollectionMode::Positive,
    )
    .unwrap()
}

#[test]
fn north_row_integral_is_one_plus_inverse_d() {
    for d in [2usize, 4] {
        let coll = family(d, 512);
        let plus = &coll.fields()[0];
        let mut total = 0.0;
        for (j, f) in coll.fields().iter().enumerate() {
            if j == 0 {
                continue;
            }
            let b = poisson_bracket(plus, f).unwrap();
            let absb = b.map_samples(|v| v.abs()).unwrap();
            total += integrate(&absb);
        }
        let expect = 1.0 + 1.0 / d as f64;
        println!("d={d}: north row integral = {total:.6}, expect {expect:.6}");
        assert!(
            (total - expect).abs() <= 0.02 * expect,
            "d={d}: {total} vs {expect}"
        );
    }
}

#[test]
fn total_pb_integral_value() {
    // The ordered double-sum integral of the family: each of the four term
    // families (plus row, minus row, and the side-side pairs) contributes a
    // profile-independent pullback integral; the total is 8 (1 + 1/d).
    for d in [2usize, 4] {
        let coll = family(d, 512);
        let p = pb_function(&coll).unwrap();
        let total = integrate(&p);
        let expect = 8.0 * (1.0 + 1.0 / d as f64);
        println!("d={d}: integral P = {total:.6}, 8(1+1/d) = {expect:.6}");
        assert!(
            (total - expect).abs() <= 0.02 * expect,
            "d={d}: {total} vs {expect}"
        );
    }
}
