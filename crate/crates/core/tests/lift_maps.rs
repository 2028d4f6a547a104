//! Branched covering maps: preimage counting, the duplication identity, and
//! the composite degree pattern.

use pbsurf_core::geometry::chart::SurfaceChart;
use pbsurf_core::lift::map::{CorrectionSpec, CoveringMap};
use pbsurf_core::lift::weierstrass::SquareLattice;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

/// Chordal (3D) distance between two cylindrical-coordinate points.
fn chordal(a: (f64, f64), b: (f64, f64)) -> f64 {
    let p3 = |c: (f64, f64)| {
        let r = (1.0 - c.1 * c.1).max(0.0).sqrt();
        (r * c.0.cos(), r * c.0.sin(), c.1)
    };
    let pa = p3(a);
    let pb = p3(b);
    ((pa.0 - pb.0).powi(2) + (pa.1 - pb.1).powi(2) + (pa.2 - pb.2).powi(2)).sqrt()
}

/// Inverse search oracle: grid candidates nearest the target (in the
/// chordal metric) refined by Newton on `p(z) = A`, deduplicated modulo the
/// lattice. Counts the distinct roots.
fn count_weierstrass_preimages(map: &CoveringMap, lat: &SquareLattice, target: (f64, f64)) -> usize {
    let e1 = lat.e1();
    // target point as a value of p: A = e1 * stereographic coordinate
    let r2 = (1.0 + target.1) / (1.0 - target.1);
    let w_t = Complex64::from_polar(r2.sqrt(), target.0);
    let a = w_t * e1;

    let source = map.source();
    // nearest grid candidates
    let mut scored: Vec<(f64, usize)> = (0..source.len())
        .map(|idx| (chordal(map.forward_node(idx), target), idx))
        .collect();
    scored.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut roots: Vec<Complex64> = Vec::new();
    for &(_, idx) in scored.iter().take(60) {
        let c = source.node_coords(idx);
        let mut z = Complex64::new(c.0, c.1);
        let mut converged = false;
        for _ in 0..60 {
            let (Ok(p), Ok(dp)) = (lat.weierstrass_p(z), lat.weierstrass_p_prime(z)) else {
                break;
            };
            let res = p - a;
            if res.norm() <= 1e-9 * (1.0 + a.norm()) {
                converged = true;
                break;
            }
            if dp.norm() < 1e-12 {
                break;
            }
            z -= res / dp;
        }
        if !converged {
            continue;
        }
        let zr = lat.reduce(z);
        // distinct preimages are far apart; the dedup radius only needs to
        // cover the Newton stall blob around double roots (~1e-5 L)
        let dup = roots.iter().any(|&r| {
            let d = lat.reduce(zr - r);
            let dx = d.re.min(lat.l - d.re);
            let dy = d.im.min(lat.l - d.im);
            (dx * dx + dy * dy).sqrt() < 1e-3 * lat.l
        });
        if !dup {
            roots.push(zr);
        }
    }
    roots.len()
}

#[test]
fn weierstrass_duplication_identity_at_random_points() {
    let lat = SquareLattice::new(1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut checked = 0;
    while checked < 100 {
        let z = Complex64::new(rng.gen_range(0.02..0.98), rng.gen_range(0.02..0.98));
        if lat.dist_to_lattice(z) < 0.05 || lat.dist_to_lattice(z * 2.0) < 0.05 {
            continue;
        }
        // avoid the half-periods where p' vanishes
        if lat
            .half_periods()
            .iter()
            .any(|&h| lat.reduce(z - h).norm_sqr().sqrt() < 0.05)
        {
            continue;
        }
        let lhs = lat.weierstrass_p(z * 2.0).unwrap();
        let rhs = lat.duplication_rhs(z).unwrap();
        let scale = lhs.norm().max(1.0);
        assert!(
            (lhs - rhs).norm() <= 1e-8 * scale,
            "z = {z}: {lhs} vs {rhs}"
        );
        checked += 1;
    }
}

#[test]
fn weierstrass_p_prime_vanishes_at_half_periods() {
    let lat = SquareLattice::new(1.0).unwrap();
    for h in lat.half_periods() {
        let dp = lat.weierstrass_p_prime(h).unwrap();
        assert!(dp.norm() <= 1e-8, "p'({h}) = {dp}");
    }
}

#[test]
fn weierstrass_cover_has_degree_two_off_branch() {
    let target = SurfaceChart::sphere(64, 65).unwrap();
    let spec = CorrectionSpec { branch_radius: 0.25, epsilon: 0.05 };
    let map = CoveringMap::weierstrass(&target, 1.0, 192, 192, spec).unwrap();
    assert_eq!(map.degree(), 2);
    assert_eq!(map.branch_points().len(), 4);
    let lat = SquareLattice::new(1.0).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 40 {
        let target_pt = (rng.gen_range(0.0..std::f64::consts::TAU), rng.gen_range(-0.9..0.9));
        // stay away from the branch values
        if map
            .branch_points()
            .iter()
            .any(|bp| chordal(bp.target, target_pt) < 0.35)
        {
            continue;
        }
        let count = count_weierstrass_preimages(&map, &lat, target_pt);
        assert_eq!(count, 2, "target {target_pt:?}");
        checked += 1;
    }
}

#[test]
fn weierstrass_branch_points_have_single_preimages_at_half_lattice() {
    let target = SurfaceChart::sphere(64, 65).unwrap();
    let spec = CorrectionSpec { branch_radius: 0.25, epsilon: 0.05 };
    let map = CoveringMap::weierstrass(&target, 1.0, 192, 192, spec).unwrap();
    let lat = SquareLattice::new(1.0).unwrap();
    let e1 = lat.e1();

    // the three finite branch values come from the half-lattice points
    let expected: [((f64, f64), Complex64, Complex64); 3] = [
        ((0.0, 0.0), Complex64::new(0.5, 0.0), Complex64::new(e1, 0.0)),
        (
            (std::f64::consts::PI, 0.0),
            Complex64::new(0.0, 0.5),
            Complex64::new(-e1, 0.0),
        ),
        ((0.0, -1.0), Complex64::new(0.5, 0.5), Complex64::new(0.0, 0.0)),
    ];
    for (bp_target, half_lattice, value) in expected {
        let count = count_weierstrass_preimages(&map, &lat, bp_target);
        assert_eq!(count, 1, "branch target {bp_target:?}");
        // and the branch value is the image of the half-lattice point
        let p = lat.weierstrass_p(half_lattice).unwrap();
        assert!(
            (p - value).norm() <= 1e-8 * (1.0 + value.norm()),
            "branch value mismatch at {bp_target:?}: {p} vs {value}"
        );
    }
    // the north pole's preimage is the lattice point itself
    let near_lattice = map.forward((1e-5, 1e-5));
    assert!(near_lattice.1 > 0.999, "near-lattice points map near the north pole");
}

#[test]
fn composite_map_realizes_degree_pattern() {
    let target = SurfaceChart::sphere(64, 65).unwrap();
    let spec = CorrectionSpec { branch_radius: 0.25, epsilon: 0.05 };
    let map =
        CoveringMap::composite_weierstrass_square(&target, 1.0, 256, 256, spec).unwrap();
    assert_eq!(map.degree(), 4);
    let degrees: Vec<usize> = map.branch_points().iter().map(|b| b.local_degree).collect();
    assert_eq!(degrees, vec![4, 4, 2]);

    // generic points have 4 grid preimages, the equatorial branch point 2,
    // counted through chordal proximity cells of the cached forward map
    let count_near = |pt: (f64, f64), radius: f64| -> usize {
        let source = map.source();
        let mask: Vec<bool> = (0..source.len())
            .map(|idx| chordal(map.forward_node(idx), pt) < radius)
            .collect();
        pbsurf_core::topo::components4(source, &mask).len()
    };
    // a generic target point
    assert_eq!(count_near((2.1, 0.37), 0.12), 4);
    assert_eq!(count_near((4.0, -0.43), 0.12), 4);
    // the equatorial branch point (0, 0) has two preimage basins
    assert_eq!(count_near((0.0, 0.0), 0.12), 2);
    // the poles collapse to one basin each
    assert_eq!(count_near((0.0, 1.0), 0.25), 1);
    assert_eq!(count_near((0.0, -1.0), 0.25), 1);
}
