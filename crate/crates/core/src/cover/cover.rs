//! Finite disc covers with cached combinatorics.

use std::sync::Arc;

use crate::cover::disc::Disc;
use crate::error::{Error, Result};
use crate::geometry::chart::SurfaceChart;
use crate::topo;

/// Result of the confinement test at a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Confinement {
    /// Some boundary component of the star lies in no single cover disc.
    Confined,
    /// Every boundary component is contained in a single disc.
    NotConfined,
    /// The star is the whole surface; there is no boundary to test.
    NoBoundary,
}

impl Confinement {
    pub fn is_confined(&self) -> bool {
        matches!(self, Confinement::Confined)
    }
}

/// A finite open cover by discs with per-node membership bitsets and cached
/// capacity, degree and essential set. Queries after construction are
/// read-only and thread-safe.
#[derive(Debug, Clone)]
pub struct Cover {
    chart: Arc<SurfaceChart>,
    discs: Vec<Disc>,
    words: usize,
    membership: Vec<u64>,
    essential: Vec<usize>,
    essential_witness: Vec<usize>,
    capacity: f64,
    degree_bar: usize,
}

impl Cover {
    pub fn new(chart: Arc<SurfaceChart>, discs: Vec<Disc>) -> Result<Cover> {
        if discs.is_empty() {
            return Err(Error::InvalidCollection("cover needs at least one disc".into()));
        }
        for d in &discs {
            if !d.chart().compatible(&chart) {
                return Err(Error::ChartMismatch { context: "cover disc" });
            }
        }
        let n = chart.len();
        let words = discs.len().div_ceil(64);
        let mut membership = vec![0u64; n * words];
        for (i, d) in discs.iter().enumerate() {
            let (w, b) = (i / 64, i % 64);
            for idx in 0..n {
                if d.mask()[idx] {
                    membership[idx * words + w] |= 1u64 << b;
                }
            }
        }
        // cover invariant plus essential set from singleton-membership nodes
        let mut essential = Vec::new();
        let mut essential_witness = Vec::new();
        let mut seen = vec![false; discs.len()];
        for idx in 0..n {
            let bits = &membership[idx * words..(idx + 1) * words];
            let pop: u32 = bits.iter().map(|w| w.count_ones()).sum();
            if pop == 0 {
                return Err(Error::NotACover { uncovered_node: idx });
            }
            if pop == 1 {
                let w = bits.iter().position(|&x| x != 0).unwrap();
                let i = w * 64 + bits[w].trailing_zeros() as usize;
                if !seen[i] {
                    seen[i] = true;
                    essential.push(i);
                    essential_witness.push(idx);
                }
            }
        }
        essential.sort_unstable();
        // recompute witnesses in essential order
        let mut witness_sorted = Vec::with_capacity(essential.len());
        for &i in &essential {
            let idx = (0..n)
                .find(|&idx| {
                    let bits = &membership[idx * words..(idx + 1) * words];
                    let pop: u32 = bits.iter().map(|w| w.count_ones()).sum();
                    pop == 1 && bits[i / 64] & (1 << (i % 64)) != 0
                })
                .unwrap();
            witness_sorted.push(idx);
        }

        let capacity = discs
            .iter()
            .map(|d| d.area())
            .fold(f64::NEG_INFINITY, f64::max);

        // pairwise intersection from per-node membership lists
        let nd = discs.len();
        let mut adj = vec![false; nd * nd];
        let mut ids = Vec::with_capacity(nd);
        for idx in 0..n {
            let bits = &membership[idx * words..(idx + 1) * words];
            ids.clear();
            for (w, &word) in bits.iter().enumerate() {
                let mut word = word;
                while word != 0 {
                    let b = word.trailing_zeros() as usize;
                    ids.push(w * 64 + b);
                    word &= word - 1;
                }
            }
            for &a in &ids {
                for &b in &ids {
                    adj[a * nd + b] = true;
                }
            }
        }
        let degree_bar = (0..nd)
            .map(|i| (0..nd).filter(|&j| adj[i * nd + j]).count())
            .max()
            .unwrap_or(0);

        Ok(Cover {
            chart,
            discs,
            words,
            membership,
            essential,
            essential_witness: witness_sorted,
            capacity,
            degree_bar,
        })
    }

    pub fn chart(&self) -> &Arc<SurfaceChart> {
        &self.chart
    }

    pub fn discs(&self) -> &[Disc] {
        &self.discs
    }

    pub fn len(&self) -> usize {
        self.discs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.discs.is_empty()
    }

    /// Indices of the discs containing node `x` (the star set of `x`).
    pub fn members_at(&self, x: usize) -> Vec<usize> {
        let bits = &self.membership[x * self.words..(x + 1) * self.words];
        let mut out = Vec::new();
        for (w, &word) in bits.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let b = word.trailing_zeros() as usize;
                out.push(w * 64 + b);
                word &= word - 1;
            }
        }
        out
    }

    pub fn member_count(&self, x: usize) -> u32 {
        let bits = &self.membership[x * self.words..(x + 1) * self.words];
        bits.iter().map(|w| w.count_ones()).sum()
    }

    /// Union of the member discs of `x`.
    pub fn star_region(&self, x: usize) -> Vec<bool> {
        let mut star = vec![false; self.chart.len()];
        for i in self.members_at(x) {
            for (idx, &m) in self.discs[i].mask().iter().enumerate() {
                if m {
                    star[idx] = true;
                }
            }
        }
        star
    }

    /// Discs whose removal breaks the cover, witnessed by a node they cover
    /// alone.
    pub fn essential_discs(&self) -> &[usize] {
        &self.essential
    }

    /// A node covered by `self.discs[i]` alone, if `i` is essential.
    pub fn essential_witness(&self, i: usize) -> Option<usize> {
        self.essential
            .iter()
            .position(|&e| e == i)
            .map(|p| self.essential_witness[p])
    }

    /// Confinement of the star of `x`: true when some boundary component of
    /// the star (8-connected exterior boundary nodes) is contained in no
    /// single cover disc.
    pub fn is_confined(&self, x: usize) -> Confinement {
        let star = self.star_region(x);
        let boundary = topo::exterior_boundary(&self.chart, &star);
        if topo::count(&boundary) == 0 {
            return Confinement::NoBoundary;
        }
        let comps = topo::components8(&self.chart, &boundary);
        for comp in &comps {
            let contained_somewhere = self
                .discs
                .iter()
                .any(|d| comp.iter().all(|&idx| d.mask()[idx]));
            if !contained_somewhere {
                return Confinement::Confined;
            }
        }
        Confinement::NotConfined
    }

    /// Whether every disc contains at most one of the given (distinct) nodes.
    pub fn check_localized(&self, points: &[usize]) -> bool {
        let mut sorted = points.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != points.len() {
            return false;
        }
        let mut counts = vec![0usize; self.discs.len()];
        for &p in points {
            for i in self.members_at(p) {
                counts[i] += 1;
                if counts[i] > 1 {
                    return false;
                }
            }
        }
        true
    }

    /// Greedy search for `m` localization points. Candidates are scanned in
    /// order of increasing membership count (then node index); a point is
    /// accepted when none of its member discs is already blocked. Failure
    /// means "unknown", not "impossible".
    pub fn find_localization(&self, m: usize) -> Option<Vec<usize>> {
        if m == 0 {
            return Some(Vec::new());
        }
        let n = self.chart.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&idx| (self.member_count(idx), idx));
        let mut blocked = vec![false; self.discs.len()];
        let mut points = Vec::new();
        for idx in order {
            let members = self.members_at(idx);
            if members.iter().any(|&i| blocked[i]) {
                continue;
            }
            for &i in &members {
                blocked[i] = true;
            }
            points.push(idx);
            if points.len() == m {
                return Some(points);
            }
        }
        None
    }

    /// Maximal disc area.
    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    /// Maximal number of discs meeting a fixed disc (itself included).
    pub fn degree_bar(&self) -> usize {
        self.degree_bar
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::builders::two_caps_cover;
    use crate::geometry::chart::SurfaceChart;

    #[test]
    fn two_caps_membership_and_stars() {
        let chart = SurfaceChart::sphere(64, 65).unwrap();
        let cover = two_caps_cover(&chart).unwrap();
        let north_pole = chart.idx(0, chart.n2() - 1);
        assert_eq!(cover.members_at(north_pole), vec![0]);
        let equator = chart.nearest_node((1.0, 0.0));
        assert_eq!(cover.members_at(equator), vec![0, 1]);
        // star at the overlap band is the whole sphere
        let star = cover.star_region(equator);
        assert_eq!(topo::count(&star), chart.len());
        // star of a pole point is that cap alone
        let star_n = cover.star_region(north_pole);
        assert_eq!(star_n, cover.discs()[0].mask().to_vec());
    }

    #[test]
    fn two_caps_are_essential_never_confined_and_two_localized() {
        let chart = SurfaceChart::sphere(64, 65).unwrap();
        let cover = two_caps_cover(&chart).unwrap();
        assert_eq!(cover.essential_discs(), &[0, 1]);
        assert_eq!(cover.degree_bar(), 2);

        let north_pole = chart.idx(0, chart.n2() - 1);
        let south_pole = chart.idx(0, 0);
        let equator = chart.nearest_node((0.0, 0.0));
        assert_eq!(cover.is_confined(north_pole), Confinement::NotConfined);
        assert_eq!(cover.is_confined(equator), Confinement::NoBoundary);

        assert!(cover.check_localized(&[north_pole, south_pole]));
        assert!(cover.find_localization(2).is_some());
        assert!(cover.find_localization(3).is_none());

        // capacity: each cap has area 3 pi
        let expect = 3.0 * std::f64::consts::PI;
        assert!((cover.capacity() - expect).abs() < 0.02 * expect);
    }

    #[test]
    fn redundant_disc_is_not_essential() {
        let chart = SurfaceChart::torus(1.0, 1.0, 128, 128).unwrap();
        let big = Disc::geometric(&chart, (0.5, 0.5), 0.45).unwrap();
        let small = Disc::geometric(&chart, (0.5, 0.5), 0.1).unwrap();
        // cover the rest with four more discs
        let mut discs = vec![big, small];
        for c in [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5)] {
            discs.push(Disc::geometric(&chart, c, 0.45).unwrap());
        }
        let cover = Cover::new(chart, discs).unwrap();
        assert!(!cover.essential_discs().contains(&1));
    }

    #[test]
    fn uncovered_node_is_an_error() {
        let chart = SurfaceChart::torus(1.0, 1.0, 64, 64).unwrap();
        let d = Disc::geometric(&chart, (0.5, 0.5), 0.2).unwrap();
        assert!(matches!(
            Cover::new(chart, vec![d]),
            Err(Error::NotACover { .. })
        ));
    }

    #[test]
    fn star_area_subadditive() {
        let chart = SurfaceChart::torus(1.0, 1.0, 128, 128).unwrap();
        let mut discs = Vec::new();
        for c in [(0.3, 0.3), (0.5, 0.5), (0.42, 0.35)] {
            discs.push(Disc::geometric(&chart, c, 0.26).unwrap());
        }
        for c in [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.85, 0.85)] {
            discs.push(Disc::geometric(&chart, c, 0.45).unwrap());
        }
        let cover = Cover::new(chart.clone(), discs).unwrap();
        let x = chart.nearest_node((0.4, 0.4));
        let star = cover.star_region(x);
        let star_area = crate::geometry::ops::mask_area(&chart, &star);
        let sum: f64 = cover
            .members_at(x)
            .iter()
            .map(|&i| cover.discs()[i].area())
            .sum();
        assert!(star_area <= sum + 1e-9);
        assert!(star[x]);
    }

    #[test]
    fn capacity_and_degree_invariant_under_relabeling() {
        let chart = SurfaceChart::torus(1.0, 1.0, 96, 96).unwrap();
        let centers = [(0.2, 0.2), (0.7, 0.2), (0.2, 0.7), (0.7, 0.7)];
        let mut discs: Vec<Disc> = centers
            .iter()
            .map(|&c| Disc::geometric(&chart, c, 0.4).unwrap())
            .collect();
        let cover1 = Cover::new(chart.clone(), discs.clone()).unwrap();
        discs.reverse();
        let cover2 = Cover::new(chart, discs).unwrap();
        assert_eq!(cover1.capacity(), cover2.capacity());
        assert_eq!(cover1.degree_bar(), cover2.degree_bar());
    }
}
