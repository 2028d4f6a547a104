//! Grid topology on chart masks: connectivity, Euler characteristic,
//! morphology, and homology-class detection for torus masks.
//!
//! Region connectivity is 4-neighbor; boundary-curve connectivity is
//! 8-neighbor so a single smooth curve is not fragmented at diagonal steps.
//! Periodic directions wrap. On the sphere chart all nodes of a pole row
//! represent one point, so components touching a pole row through distinct
//! theta-columns are merged.

use crate::geometry::chart::{ChartKind, SurfaceChart};

/// 4-neighbors of a node, respecting wrap rules. Returns up to 4 indices.
pub fn neighbors4(chart: &SurfaceChart, idx: usize, out: &mut Vec<usize>) {
    out.clear();
    let (n1, n2) = (chart.n1(), chart.n2());
    let (i1, i2) = chart.split_idx(idx);
    let ip = if i1 + 1 == n1 { 0 } else { i1 + 1 };
    let im = if i1 == 0 { n1 - 1 } else { i1 - 1 };
    out.push(ip * n2 + i2);
    out.push(im * n2 + i2);
    if chart.periodic2() {
        let jp = if i2 + 1 == n2 { 0 } else { i2 + 1 };
        let jm = if i2 == 0 { n2 - 1 } else { i2 - 1 };
        out.push(i1 * n2 + jp);
        out.push(i1 * n2 + jm);
    } else {
        if i2 + 1 < n2 {
            out.push(i1 * n2 + i2 + 1);
        }
        if i2 > 0 {
            out.push(i1 * n2 + i2 - 1);
        }
    }
}

/// 8-neighbors of a node, respecting wrap rules.
pub fn neighbors8(chart: &SurfaceChart, idx: usize, out: &mut Vec<usize>) {
    out.clear();
    let (n1, n2) = (chart.n1(), chart.n2());
    let (i1, i2) = chart.split_idx(idx);
    let i1s = [if i1 == 0 { n1 - 1 } else { i1 - 1 }, i1, if i1 + 1 == n1 { 0 } else { i1 + 1 }];
    for (a, &j1) in i1s.iter().enumerate() {
        for db in [-1i64, 0, 1] {
            if a == 1 && db == 0 {
                continue;
            }
            let j2 = i2 as i64 + db;
            let j2 = if chart.periodic2() {
                (j2.rem_euclid(n2 as i64)) as usize
            } else if j2 < 0 || j2 >= n2 as i64 {
                continue;
            } else {
                j2 as usize
            };
            out.push(j1 * n2 + j2);
        }
    }
}

fn merge_pole_rows(chart: &SurfaceChart, mask: &[bool], labels: &mut [usize]) {
    if chart.kind() != ChartKind::SphereCyl {
        return;
    }
    for row in [0usize, chart.n2() - 1] {
        let mut target: Option<usize> = None;
        for i1 in 0..chart.n1() {
            let idx = chart.idx(i1, row);
            if mask[idx] {
                match target {
                    None => target = Some(labels[idx]),
                    Some(t) => {
                        if labels[idx] != t {
                            let old = labels[idx];
                            for l in labels.iter_mut() {
                                if *l == old {
                                    *l = t;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

fn components_with(
    chart: &SurfaceChart,
    mask: &[bool],
    neigh: impl Fn(&SurfaceChart, usize, &mut Vec<usize>),
) -> Vec<Vec<usize>> {
    let n = chart.len();
    let mut labels = vec![usize::MAX; n];
    let mut next = 0usize;
    let mut stack = Vec::new();
    let mut nb = Vec::with_capacity(8);
    for start in 0..n {
        if !mask[start] || labels[start] != usize::MAX {
            continue;
        }
        labels[start] = next;
        stack.push(start);
        while let Some(x) = stack.pop() {
            neigh(chart, x, &mut nb);
            for &y in &nb {
                if mask[y] && labels[y] == usize::MAX {
                    labels[y] = next;
                    stack.push(y);
                }
            }
        }
        next += 1;
    }
    merge_pole_rows(chart, mask, &mut labels);
    // repack labels into components ordered by first node index
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut remap = std::collections::HashMap::new();
    for idx in 0..n {
        if mask[idx] {
            let l = labels[idx];
            let c = *remap.entry(l).or_insert_with(|| {
                comps.push(Vec::new());
                comps.len() - 1
            });
            comps[c].push(idx);
        }
    }
    comps
}

/// 4-connected components of a mask, ordered by first node index.
pub fn components4(chart: &SurfaceChart, mask: &[bool]) -> Vec<Vec<usize>> {
    components_with(chart, mask, neighbors4)
}

/// 8-connected components of a mask (used for boundary node curves).
pub fn components8(chart: &SurfaceChart, mask: &[bool]) -> Vec<Vec<usize>> {
    components_with(chart, mask, neighbors8)
}

/// Euler characteristic `V - E + F` of the mask complex (nodes, lattice
/// edges, unit quads fully inside the mask), with periodic wrap. On the
/// sphere, a fully contained pole row is a circle collapsed to a point and
/// contributes `+1`.
pub fn euler_characteristic(chart: &SurfaceChart, mask: &[bool]) -> i64 {
    let (n1, n2) = (chart.n1(), chart.n2());
    let mut v = 0i64;
    let mut e = 0i64;
    let mut f = 0i64;
    let top2 = if chart.periodic2() { n2 } else { n2 - 1 };
    for i1 in 0..n1 {
        let ip = if i1 + 1 == n1 { 0 } else { i1 + 1 };
        for i2 in 0..n2 {
            let a = mask[i1 * n2 + i2];
            if a {
                v += 1;
            }
            let b = mask[ip * n2 + i2];
            if a && b {
                e += 1;
            }
            if i2 < top2 {
                let j2 = if i2 + 1 == n2 { 0 } else { i2 + 1 };
                let c = mask[i1 * n2 + j2];
                let d = mask[ip * n2 + j2];
                if a && c {
                    e += 1;
                }
                if a && b && c && d {
                    f += 1;
                }
            }
        }
    }
    let mut chi = v - e + f;
    if chart.kind() == ChartKind::SphereCyl {
        for row in [0usize, n2 - 1] {
            if (0..n1).all(|i1| mask[i1 * n2 + row]) {
                chi += 1;
            }
        }
    }
    chi
}

/// One-ring 4-neighborhood dilation.
pub fn dilate(chart: &SurfaceChart, mask: &[bool]) -> Vec<bool> {
    let mut out = mask.to_vec();
    let mut nb = Vec::with_capacity(4);
    for idx in 0..chart.len() {
        if mask[idx] {
            neighbors4(chart, idx, &mut nb);
            for &y in &nb {
                out[y] = true;
            }
        }
    }
    out
}

/// Exterior boundary: nodes outside the mask that are 4-adjacent to it.
pub fn exterior_boundary(chart: &SurfaceChart, mask: &[bool]) -> Vec<bool> {
    let mut out = vec![false; chart.len()];
    let mut nb = Vec::with_capacity(4);
    for idx in 0..chart.len() {
        if !mask[idx] {
            neighbors4(chart, idx, &mut nb);
            if nb.iter().any(|&y| mask[y]) {
                out[idx] = true;
            }
        }
    }
    out
}

/// Whether a 4-connected component winds a periodic direction, detected by
/// flood fill with unwrapped integer coordinates.
pub fn component_winds(chart: &SurfaceChart, component: &[usize]) -> (bool, bool) {
    if component.is_empty() {
        return (false, false);
    }
    let in_comp: std::collections::HashSet<usize> = component.iter().copied().collect();
    let (n1, n2) = (chart.n1() as i64, chart.n2() as i64);
    let mut lifted: std::collections::HashMap<usize, (i64, i64)> = std::collections::HashMap::new();
    let mut stack = vec![component[0]];
    lifted.insert(component[0], (0, 0));
    let mut winds = (false, false);
    let mut nb = Vec::with_capacity(4);
    while let Some(x) = stack.pop() {
        let (a, b) = lifted[&x];
        let (x1, x2) = chart.split_idx(x);
        neighbors4(chart, x, &mut nb);
        for &y in nb.clone().iter() {
            if !in_comp.contains(&y) {
                continue;
            }
            let (y1, y2) = chart.split_idx(y);
            // signed step, accounting for wrap
            let mut d1 = y1 as i64 - x1 as i64;
            if d1 > 1 {
                d1 -= n1;
            } else if d1 < -1 {
                d1 += n1;
            }
            let mut d2 = y2 as i64 - x2 as i64;
            if chart.periodic2() {
                if d2 > 1 {
                    d2 -= n2;
                } else if d2 < -1 {
                    d2 += n2;
                }
            }
            let cand = (a + d1, b + d2);
            match lifted.get(&y) {
                None => {
                    lifted.insert(y, cand);
                    stack.push(y);
                }
                Some(&(pa, pb)) => {
                    if pa != cand.0 {
                        winds.0 = true;
                    }
                    if pb != cand.1 {
                        winds.1 = true;
                    }
                }
            }
        }
    }
    winds
}

/// Fills the holes of a mask. On the torus, complement components that do
/// not wind either period are holes. On the sphere every complement
/// component except the largest is filled.
pub fn fill_holes(chart: &SurfaceChart, mask: &[bool]) -> Vec<bool> {
    let complement: Vec<bool> = mask.iter().map(|m| !m).collect();
    let comps = components4(chart, &complement);
    if comps.is_empty() {
        return mask.to_vec();
    }
    let mut out = mask.to_vec();
    match chart.kind() {
        ChartKind::Torus => {
            for comp in &comps {
                let (w1, w2) = component_winds(chart, comp);
                if !w1 && !w2 {
                    for &idx in comp {
                        out[idx] = true;
                    }
                }
            }
        }
        ChartKind::SphereCyl => {
            let keep = comps
                .iter()
                .enumerate()
                .max_by_key(|(i, c)| (c.len(), usize::MAX - i))
                .map(|(i, _)| i)
                .unwrap();
            for (i, comp) in comps.iter().enumerate() {
                if i != keep {
                    for &idx in comp {
                        out[idx] = true;
                    }
                }
            }
        }
    }
    out
}

pub fn count(mask: &[bool]) -> usize {
    mask.iter().filter(|&&m| m).count()
}

pub fn is_subset(a: &[bool], b: &[bool]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| !x || y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart::SurfaceChart;

    fn disc_mask(chart: &SurfaceChart, c: (f64, f64), r: f64) -> Vec<bool> {
        (0..chart.len())
            .map(|i| chart.coord_dist(chart.node_coords(i), c) < r)
            .collect()
    }

    #[test]
    fn disc_has_chi_one_annulus_zero() {
        let chart = SurfaceChart::torus(1.0, 1.0, 64, 64).unwrap();
        let disc = disc_mask(&chart, (0.5, 0.5), 0.3);
        assert_eq!(euler_characteristic(&chart, &disc), 1);

        let annulus: Vec<bool> = (0..chart.len())
            .map(|i| {
                let d = chart.coord_dist(chart.node_coords(i), (0.5, 0.5));
                d > 0.15 && d < 0.3
            })
            .collect();
        assert_eq!(euler_characteristic(&chart, &annulus), 0);
    }

    #[test]
    fn full_torus_has_chi_zero_and_full_sphere_two() {
        let torus = SurfaceChart::torus(1.0, 1.0, 16, 16).unwrap();
        assert_eq!(euler_characteristic(&torus, &vec![true; torus.len()]), 0);
        let sphere = SurfaceChart::sphere(16, 17).unwrap();
        assert_eq!(euler_characteristic(&sphere, &vec![true; sphere.len()]), 2);
    }

    #[test]
    fn sphere_cap_is_a_disc() {
        let sphere = SurfaceChart::sphere(32, 33).unwrap();
        let cap: Vec<bool> = (0..sphere.len())
            .map(|i| sphere.node_coords(i).1 > 0.25)
            .collect();
        assert_eq!(euler_characteristic(&sphere, &cap), 1);
    }

    #[test]
    fn wrapping_band_winds_and_components_merge_across_wrap() {
        let chart = SurfaceChart::torus(1.0, 1.0, 32, 32).unwrap();
        // band winding direction 1
        let band: Vec<bool> = (0..chart.len())
            .map(|i| {
                let (_, y) = chart.node_coords(i);
                (0.4..0.6).contains(&y)
            })
            .collect();
        let comps = components4(&chart, &band);
        assert_eq!(comps.len(), 1);
        let (w1, w2) = component_winds(&chart, &comps[0]);
        assert!(w1 && !w2);
    }

    #[test]
    fn fill_holes_fills_annulus_to_disc() {
        let chart = SurfaceChart::torus(1.0, 1.0, 64, 64).unwrap();
        let annulus: Vec<bool> = (0..chart.len())
            .map(|i| {
                let d = chart.coord_dist(chart.node_coords(i), (0.5, 0.5));
                d > 0.15 && d < 0.3
            })
            .collect();
        let filled = fill_holes(&chart, &annulus);
        assert_eq!(euler_characteristic(&chart, &filled), 1);
        // outside stays outside
        assert!(!filled[chart.nearest_node((0.0, 0.0))]);
        assert!(filled[chart.nearest_node((0.5, 0.5))]);
    }

    #[test]
    fn pole_row_merges_components_on_sphere() {
        let sphere = SurfaceChart::sphere(16, 17).unwrap();
        // two theta-sectors that both touch the north pole row
        let mask: Vec<bool> = (0..sphere.len())
            .map(|i| {
                let (i1, i2) = sphere.split_idx(i);
                i2 == sphere.n2() - 1 && (i1 < 3 || (8..11).contains(&i1))
            })
            .collect();
        let comps = components4(&sphere, &mask);
        assert_eq!(comps.len(), 1, "pole row represents a single point");
    }
}
