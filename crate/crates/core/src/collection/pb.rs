//! The bracket functions `P_F`, `P_{F,G}` and the pb invariant.

use crate::collection::collection::PositiveCollection;
use crate::error::{Error, Result};
use crate::geometry::field::ScalarField;
use crate::geometry::ops::{poisson_bracket, sup_norm};
use crate::sum::max_abs;

/// Largest collection accepted by the exact pb computation.
pub const PB_EXACT_MAX_FIELDS: usize = 14;

struct Derivatives {
    d1: Vec<Vec<f64>>,
    d2: Vec<Vec<f64>>,
}

fn derivatives(fields: &[ScalarField]) -> Result<Derivatives> {
    let chart = fields[0].chart();
    for f in fields {
        f.check_pole_band()?;
    }
    Ok(Derivatives {
        d1: fields.iter().map(|f| chart.diff1(f.samples())).collect(),
        d2: fields.iter().map(|f| chart.diff2(f.samples())).collect(),
    })
}

fn supports_overlap(a: &ScalarField, b: &ScalarField) -> bool {
    a.support().iter().zip(b.support()).any(|(&x, &y)| x && y)
}

/// Poisson bracket function `P_F(x) = sum_{i,j} |{f_i, f_j}(x)|`.
///
/// Pairs accumulate in a fixed (i < j) order with a factor 2, which is
/// bitwise identical to the ordered double sum and keeps the fragmentation
/// law exact at the node level.
pub fn pb_function(coll: &PositiveCollection) -> Result<ScalarField> {
    let chart = coll.chart().clone();
    let fields = coll.fields();
    let der = derivatives(fields)?;
    let rho = chart.density();
    let n = chart.len();
    let mut p = vec![0.0f64; n];
    let mut mask = vec![false; n];
    for i in 0..fields.len() {
        for j in i + 1..fields.len() {
            if !supports_overlap(&fields[i], &fields[j]) {
                continue;
            }
            let (si, sj) = (fields[i].support(), fields[j].support());
            for idx in 0..n {
                if si[idx] && sj[idx] {
                    let b = (der.d1[i][idx] * der.d2[j][idx]
                        - der.d2[i][idx] * der.d1[j][idx])
                        / rho[idx];
                    p[idx] += 2.0 * b.abs();
                    mask[idx] = true;
                }
            }
        }
    }
    for idx in 0..n {
        if !mask[idx] {
            p[idx] = 0.0;
        }
    }
    ScalarField::new(chart, p, mask)
}

/// Pair bracket function `P_{F,G}(x) = sum_{i,j} |{f_i, g_j}(x)|`.
pub fn pb_pair_function(
    f: &PositiveCollection,
    g: &PositiveCollection,
) -> Result<ScalarField> {
    if !f.chart().compatible(g.chart()) {
        return Err(Error::ChartMismatch { context: "pb_pair_function" });
    }
    let chart = f.chart().clone();
    let n = chart.len();
    let mut p = vec![0.0f64; n];
    let mut mask = vec![false; n];
    for fi in f.fields() {
        for gj in g.fields() {
            if !supports_overlap(fi, gj) {
                continue;
            }
            let b = poisson_bracket(fi, gj)?;
            for idx in 0..n {
                if fi.support()[idx] && gj.support()[idx] {
                    p[idx] += b.samples()[idx].abs();
                    mask[idx] = true;
                }
            }
        }
    }
    for idx in 0..n {
        if !mask[idx] {
            p[idx] = 0.0;
        }
    }
    ScalarField::new(chart, p, mask)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbMethod {
    /// Exact maximum over sign vertices, `N <= 14`.
    Exact,
    /// `(max_{i,j} ||{f_i,f_j}||, ||P_F||)`.
    Sandwich,
}

/// The pb invariant `max_{a,b in [-1,1]^N} || {a.F, b.F} ||` as a
/// `(lower, upper)` pair. Both methods return bounds that sandwich the true
/// invariant; `Exact` returns it on both sides.
///
/// Exactness of the vertex reduction: for fixed `x` the objective
/// `|a^T B(x) b|` is the absolute value of a bilinear form, so its maximum
/// over the product of cubes is attained at a vertex pair `(a, b) in
/// {-1,1}^N x {-1,1}^N`, and the sup over `x` commutes with the max. The
/// implementation evaluates the vertex maximum per node through the rank-2
/// structure of `B(x) = (u v^T - v u^T)/rho`: with `t = u.b`, `s = v.b`,
/// `max_a a^T B b = ||u s - v t||_1 / rho`, a convex function of `(t, s)`
/// maximized at a vertex of the planar zonotope spanned by the generators
/// `(u_j, v_j)`. Walking the zonotope boundary enumerates every vertex, so
/// the result equals the brute-force vertex enumeration exactly.
pub fn pb_invariant(coll: &PositiveCollection, method: PbMethod) -> Result<(f64, f64)> {
    match method {
        PbMethod::Sandwich => {
            let fields = coll.fields();
            let mut lower = 0.0f64;
            for i in 0..fields.len() {
                for j in i + 1..fields.len() {
                    let b = poisson_bracket(&fields[i], &fields[j])?;
                    lower = lower.max(sup_norm(&b));
                }
            }
            let upper = sup_norm(&pb_function(coll)?);
            Ok((lower, upper))
        }
        PbMethod::Exact => {
            let n_fields = coll.len();
            if n_fields > PB_EXACT_MAX_FIELDS {
                return Err(Error::FieldCount {
                    n: n_fields,
                    max: PB_EXACT_MAX_FIELDS,
                });
            }
            let chart = coll.chart().clone();
            let der = derivatives(coll.fields())?;
            let rho = chart.density();
            let n = chart.len();
            let mut gens: Vec<(f64, f64)> = Vec::with_capacity(n_fields);
            let mut value = 0.0f64;
            for idx in 0..n {
                gens.clear();
                for i in 0..n_fields {
                    if coll.fields()[i].support()[idx] {
                        gens.push((der.d1[i][idx], der.d2[i][idx]));
                    } else {
                        gens.push((0.0, 0.0));
                    }
                }
                let v = node_vertex_max(&gens) / rho[idx];
                if v > value {
                    value = v;
                }
            }
            Ok((value, value))
        }
    }
}

/// `max_{b in {-1,1}^N} sum_i |u_i s - v_i t|` where `(t, s) = (u.b, v.b)`,
/// evaluated at the vertices of the zonotope of the generators.
fn node_vertex_max(gens: &[(f64, f64)]) -> f64 {
    // orient generators into the upper half-plane and sort by angle
    let mut dirs: Vec<(f64, f64)> = gens
        .iter()
        .map(|&(u, v)| {
            if v < 0.0 || (v == 0.0 && u < 0.0) {
                (-u, -v)
            } else {
                (u, v)
            }
        })
        .filter(|&(u, v)| u != 0.0 || v != 0.0)
        .collect();
    if dirs.is_empty() {
        return 0.0;
    }
    dirs.sort_by(|a, b| {
        a.1.atan2(a.0)
            .partial_cmp(&b.1.atan2(b.0))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    // walk half the zonotope boundary: start at -sum(dirs), flip one by one
    let mut t = -dirs.iter().map(|d| d.0).sum::<f64>();
    let mut s = -dirs.iter().map(|d| d.1).sum::<f64>();
    let mut best = objective(gens, t, s);
    for d in &dirs {
        t += 2.0 * d.0;
        s += 2.0 * d.1;
        let v = objective(gens, t, s);
        if v > best {
            best = v;
        }
    }
    best
}

fn objective(gens: &[(f64, f64)], t: f64, s: f64) -> f64 {
    let mut acc = 0.0;
    for &(u, v) in gens {
        acc += (u * s - v * t).abs();
    }
    acc
}

/// Brute-force vertex enumeration of the same maximum, `O(2^N * N)` per
/// node. Slow; kept as the independent oracle for the zonotope path.
pub fn pb_exact_bruteforce(coll: &PositiveCollection) -> Result<f64> {
    let n_fields = coll.len();
    if n_fields > 20 {
        return Err(Error::FieldCount { n: n_fields, max: 20 });
    }
    let chart = coll.chart().clone();
    let der = derivatives(coll.fields())?;
    let rho = chart.density();
    let n = chart.len();
    let mut value = 0.0f64;
    let mut bs = vec![0.0f64; n_fields];
    for idx in 0..n {
        let mut u = vec![0.0; n_fields];
        let mut v = vec![0.0; n_fields];
        for i in 0..n_fields {
            if coll.fields()[i].support()[idx] {
                u[i] = der.d1[i][idx];
                v[i] = der.d2[i][idx];
            }
        }
        for signs in 0..(1u32 << n_fields) {
            for (i, b) in bs.iter_mut().enumerate() {
                *b = if signs & (1 << i) != 0 { 1.0 } else { -1.0 };
            }
            let t: f64 = u.iter().zip(&bs).map(|(a, b)| a * b).sum();
            let s: f64 = v.iter().zip(&bs).map(|(a, b)| a * b).sum();
            let mut acc = 0.0;
            for i in 0..n_fields {
                acc += (u[i] * s - v[i] * t).abs();
            }
            let val = acc / rho[idx];
            if val > value {
                value = val;
            }
        }
    }
    Ok(value)
}

/// Convenience accessor used by reports: `sup P_F`.
pub fn sup_pb(coll: &PositiveCollection) -> Result<f64> {
    Ok(max_abs(pb_function(coll)?.samples()))
}
