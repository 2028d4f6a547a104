//! Covering maps between charts: unramified torus self-covers, the sphere
//! squaring map, the Weierstrass torus-to-sphere map, and their composite.
//!
//! Ramified maps carry branch points and are constructed together with a
//! corrected area density `rho' = |Jac p| rho_target(p(.)) + eta`, where
//! `eta` is a small bump supported in the branch-disc preimages restoring
//! nondegeneracy at a total area cost below the requested epsilon.

use std::sync::Arc;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::chart::{ChartKind, SurfaceChart};
use crate::lift::weierstrass::{SquareLattice, LATTICE_GUARD};
use crate::sum::pairwise_sum;

#[derive(Debug, Clone)]
pub enum MapKind {
    TorusUnroll { k1: usize, k2: usize },
    SphereSquare,
    Weierstrass { lattice: SquareLattice, e1: f64 },
    /// Weierstrass followed by the squaring map; degree 4.
    Composite { lattice: SquareLattice, e1: f64 },
}

/// A branch region on the target: a polar cap or a coordinate disc around a
/// branch point.
#[derive(Debug, Clone, Copy)]
pub enum BranchRegion {
    CapNorth { depth: f64 },
    CapSouth { depth: f64 },
    Disc { center: (f64, f64), radius: f64 },
}

impl BranchRegion {
    /// Radial coordinate: `< 1` inside the region, `0` at the branch point.
    pub fn q(&self, chart: &SurfaceChart, c: (f64, f64)) -> f64 {
        match *self {
            BranchRegion::CapNorth { depth } => (1.0 - c.1) / depth,
            BranchRegion::CapSouth { depth } => (1.0 + c.1) / depth,
            BranchRegion::Disc { center, radius } => chart.coord_dist(c, center) / radius,
        }
    }

    pub fn contains(&self, chart: &SurfaceChart, c: (f64, f64)) -> bool {
        self.q(chart, c) < 1.0
    }
}

#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub target: (f64, f64),
    pub local_degree: usize,
    pub region: BranchRegion,
}

/// Parameters of the corrected area form for ramified maps.
#[derive(Debug, Clone, Copy)]
pub struct CorrectionSpec {
    /// Branch disc size: cap depth in z units, disc radius in coordinates.
    pub branch_radius: f64,
    /// Total area the correction may add.
    pub epsilon: f64,
}

impl Default for CorrectionSpec {
    fn default() -> Self {
        CorrectionSpec {
            branch_radius: 0.2,
            epsilon: 0.05,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CorrectionReport {
    /// Coordinate area added by the bumps (at most epsilon by construction).
    pub added_area: f64,
    /// Measured density floor after correction.
    pub min_density: f64,
    pub amplitudes: Vec<f64>,
}

pub struct CoveringMap {
    kind: MapKind,
    source: Arc<SurfaceChart>,
    target: Arc<SurfaceChart>,
    degree: usize,
    branch_points: Vec<BranchPoint>,
    forward_nodes: Vec<(f64, f64)>,
    raw_density: Vec<f64>,
    correction: Option<CorrectionReport>,
}

impl CoveringMap {
    /// Unramified self-cover of the torus: the source chart has the same
    /// coordinate ranges and `p(x, y) = (k1 x mod L1, k2 y mod L2)`; its
    /// density is the `k1 k2`-sheet copy of the target density.
    pub fn torus_unroll(
        target: &Arc<SurfaceChart>,
        k1: usize,
        k2: usize,
        n1: usize,
        n2: usize,
    ) -> Result<CoveringMap> {
        if target.kind() != ChartKind::Torus {
            return Err(Error::InvalidChart("torus_unroll needs a torus target".into()));
        }
        if k1 == 0 || k2 == 0 {
            return Err(Error::InvalidChart("unroll factors must be positive".into()));
        }
        let kind = MapKind::TorusUnroll { k1, k2 };
        let degree = k1 * k2;
        let l1 = target.range1().1 - target.range1().0;
        let l2 = target.range2().1 - target.range2().0;
        let bare = SurfaceChart::torus(l1, l2, n1, n2)?;
        let forward_nodes: Vec<(f64, f64)> = (0..bare.len())
            .map(|i| forward_of(&kind, target, bare.node_coords(i)))
            .collect();
        let raw_density: Vec<f64> = forward_nodes
            .iter()
            .map(|&c| degree as f64 * target.sample_bilinear(target.density(), c))
            .collect();
        let source = bare.with_density(raw_density.clone())?;
        Ok(CoveringMap {
            kind,
            source,
            target: target.clone(),
            degree,
            branch_points: Vec::new(),
            forward_nodes,
            raw_density,
            correction: None,
        })
    }

    /// Degree-2 self-cover of the sphere, ramified at the two poles
    /// (the squaring map in the stereographic coordinate).
    pub fn sphere_square(
        target: &Arc<SurfaceChart>,
        n1: usize,
        n2: usize,
        correction: CorrectionSpec,
    ) -> Result<CoveringMap> {
        if target.kind() != ChartKind::SphereCyl {
            return Err(Error::InvalidChart("sphere_square needs a sphere target".into()));
        }
        let kind = MapKind::SphereSquare;
        let branch_points = vec![
            BranchPoint {
                target: (0.0, 1.0),
                local_degree: 2,
                region: BranchRegion::CapNorth { depth: correction.branch_radius },
            },
            BranchPoint {
                target: (0.0, -1.0),
                local_degree: 2,
                region: BranchRegion::CapSouth { depth: correction.branch_radius },
            },
        ];
        Self::build_ramified(kind, target, 2, branch_points, n1, n2, correction)
    }

    /// The Weierstrass map of a square lattice torus onto the sphere,
    /// degree 2, ramified over four points. Branch values are normalized by
    /// `W = p(z)/e1`, placing them at the poles and at `(0, 0)`, `(pi, 0)`.
    pub fn weierstrass(
        target: &Arc<SurfaceChart>,
        lattice_side: f64,
        n1: usize,
        n2: usize,
        correction: CorrectionSpec,
    ) -> Result<CoveringMap> {
        if target.kind() != ChartKind::SphereCyl {
            return Err(Error::InvalidChart("weierstrass needs a sphere target".into()));
        }
        let lattice = SquareLattice::new(lattice_side)?;
        let e1 = lattice.e1();
        let kind = MapKind::Weierstrass { lattice, e1 };
        let r = correction.branch_radius;
        let branch_points = vec![
            BranchPoint {
                target: (0.0, 1.0),
                local_degree: 2,
                region: BranchRegion::CapNorth { depth: r },
            },
            BranchPoint {
                target: (0.0, -1.0),
                local_degree: 2,
                region: BranchRegion::CapSouth { depth: r },
            },
            BranchPoint {
                target: (0.0, 0.0),
                local_degree: 2,
                region: BranchRegion::Disc { center: (0.0, 0.0), radius: r },
            },
            BranchPoint {
                target: (std::f64::consts::PI, 0.0),
                local_degree: 2,
                region: BranchRegion::Disc {
                    center: (std::f64::consts::PI, 0.0),
                    radius: r,
                },
            },
        ];
        Self::build_ramified(kind, target, 2, branch_points, n1, n2, correction)
    }

    /// Weierstrass followed by sphere squaring: torus onto sphere, degree 4,
    /// preimage degrees 4 over the poles, 2 over `(0, 0)`, 1 elsewhere.
    pub fn composite_weierstrass_square(
        target: &Arc<SurfaceChart>,
        lattice_side: f64,
        n1: usize,
        n2: usize,
        correction: CorrectionSpec,
    ) -> Result<CoveringMap> {
        if target.kind() != ChartKind::SphereCyl {
            return Err(Error::InvalidChart("composite map needs a sphere target".into()));
        }
        let lattice = SquareLattice::new(lattice_side)?;
        let e1 = lattice.e1();
        let kind = MapKind::Composite { lattice, e1 };
        let r = correction.branch_radius;
        let branch_points = vec![
            BranchPoint {
                target: (0.0, 1.0),
                local_degree: 4,
                region: BranchRegion::CapNorth { depth: r },
            },
            BranchPoint {
                target: (0.0, -1.0),
                local_degree: 4,
                region: BranchRegion::CapSouth { depth: r },
            },
            BranchPoint {
                target: (0.0, 0.0),
                local_degree: 2,
                region: BranchRegion::Disc { center: (0.0, 0.0), radius: r },
            },
        ];
        Self::build_ramified(kind, target, 4, branch_points, n1, n2, correction)
    }

    fn build_ramified(
        kind: MapKind,
        target: &Arc<SurfaceChart>,
        degree: usize,
        branch_points: Vec<BranchPoint>,
        n1: usize,
        n2: usize,
        correction: CorrectionSpec,
    ) -> Result<CoveringMap> {
        let bare = match kind {
            MapKind::SphereSquare => SurfaceChart::sphere_with_pole_band(n1, n2, target.pole_band())?,
            MapKind::Weierstrass { lattice, .. } | MapKind::Composite { lattice, .. } => {
                SurfaceChart::torus(lattice.l, lattice.l, n1, n2)?
            }
            MapKind::TorusUnroll { .. } => unreachable!(),
        };
        let forward_nodes: Vec<(f64, f64)> = (0..bare.len())
            .map(|i| forward_of(&kind, target, bare.node_coords(i)))
            .collect();
        let raw_density: Vec<f64> = (0..bare.len())
            .map(|i| {
                let jac = jacobian_of(&kind, bare.node_coords(i));
                jac * target.sample_bilinear(target.density(), forward_nodes[i])
            })
            .collect();
        let (density, report) = correct_density(
            &bare,
            target,
            &raw_density,
            &forward_nodes,
            &branch_points,
            correction,
        )?;
        let source = bare.with_density(density)?;
        Ok(CoveringMap {
            kind,
            source,
            target: target.clone(),
            degree,
            branch_points,
            forward_nodes,
            raw_density,
            correction: Some(report),
        })
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn source(&self) -> &Arc<SurfaceChart> {
        &self.source
    }

    pub fn target(&self) -> &Arc<SurfaceChart> {
        &self.target
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn branch_points(&self) -> &[BranchPoint] {
        &self.branch_points
    }

    pub fn correction(&self) -> Option<&CorrectionReport> {
        self.correction.as_ref()
    }

    /// Target coordinates of source node `idx` (cached).
    pub fn forward_node(&self, idx: usize) -> (f64, f64) {
        self.forward_nodes[idx]
    }

    /// Target coordinates of an arbitrary source point.
    pub fn forward(&self, c: (f64, f64)) -> (f64, f64) {
        forward_of(&self.kind, &self.target, c)
    }

    /// Pullback density before correction, `|Jac p| * rho_target(p(.))`.
    pub fn raw_density(&self) -> &[f64] {
        &self.raw_density
    }

    /// Deck translations of an unrolled torus cover.
    pub fn deck_translations(&self) -> Vec<(f64, f64)> {
        match self.kind {
            MapKind::TorusUnroll { k1, k2 } => {
                let l1 = self.source.range1().1 - self.source.range1().0;
                let l2 = self.source.range2().1 - self.source.range2().0;
                let mut out = Vec::new();
                for a in 0..k1 {
                    for b in 0..k2 {
                        out.push((a as f64 * l1 / k1 as f64, b as f64 * l2 / k2 as f64));
                    }
                }
                out
            }
            _ => vec![(0.0, 0.0)],
        }
    }
}

/// z-component of the squaring map: doubling of the stereographic radius.
pub fn square_map_z(z: f64) -> f64 {
    if z >= 1.0 {
        return 1.0;
    }
    if z <= -1.0 {
        return -1.0;
    }
    let u = (1.0 + z) / (1.0 - z);
    (u * u - 1.0) / (u * u + 1.0)
}

/// `d/dz` of [`square_map_z`]: `2 (1 - z^2) / (1 + z^2)^2`.
pub fn square_map_z_prime(z: f64) -> f64 {
    let d = 1.0 + z * z;
    2.0 * (1.0 - z * z) / (d * d)
}

fn sphere_square_forward(c: (f64, f64)) -> (f64, f64) {
    ((2.0 * c.0).rem_euclid(std::f64::consts::TAU), square_map_z(c.1))
}

fn weierstrass_forward(lattice: &SquareLattice, e1: f64, c: (f64, f64)) -> (f64, f64) {
    let z = Complex64::new(c.0, c.1);
    if lattice.dist_to_lattice(z) < LATTICE_GUARD * lattice.l {
        return (0.0, 1.0); // the lattice point maps to the north pole
    }
    let w = lattice.weierstrass_p(z).expect("guarded") / e1;
    let r2 = w.norm_sqr();
    let theta = w.arg().rem_euclid(std::f64::consts::TAU);
    ((theta), (r2 - 1.0) / (r2 + 1.0))
}

fn forward_of(kind: &MapKind, target: &SurfaceChart, c: (f64, f64)) -> (f64, f64) {
    match kind {
        MapKind::TorusUnroll { k1, k2 } => {
            let (a1, b1) = target.range1();
            let (a2, b2) = target.range2();
            (
                a1 + (*k1 as f64 * (c.0 - a1)).rem_euclid(b1 - a1),
                a2 + (*k2 as f64 * (c.1 - a2)).rem_euclid(b2 - a2),
            )
        }
        MapKind::SphereSquare => sphere_square_forward(c),
        MapKind::Weierstrass { lattice, e1 } => weierstrass_forward(lattice, *e1, c),
        MapKind::Composite { lattice, e1 } => {
            sphere_square_forward(weierstrass_forward(lattice, *e1, c))
        }
    }
}

/// |Jacobian| of the map in chart coordinates at a source point.
fn jacobian_of(kind: &MapKind, c: (f64, f64)) -> f64 {
    match kind {
        MapKind::TorusUnroll { k1, k2 } => (*k1 * *k2) as f64,
        MapKind::SphereSquare => 2.0 * square_map_z_prime(c.1),
        MapKind::Weierstrass { lattice, e1 } => weierstrass_jacobian(lattice, *e1, c),
        MapKind::Composite { lattice, e1 } => {
            let mid = weierstrass_forward(lattice, *e1, c);
            weierstrass_jacobian(lattice, *e1, c) * 2.0 * square_map_z_prime(mid.1)
        }
    }
}

/// Fubini-Study pullback: `4 |p'(z)|^2 / (e1^2 (1 + |p(z)/e1|^2)^2)`.
fn weierstrass_jacobian(lattice: &SquareLattice, e1: f64, c: (f64, f64)) -> f64 {
    let z = Complex64::new(c.0, c.1);
    if lattice.dist_to_lattice(z) < LATTICE_GUARD * lattice.l {
        return 0.0; // density vanishes quadratically at the pole preimage
    }
    let p = lattice.weierstrass_p(z).expect("guarded");
    let dp = lattice.weierstrass_p_prime(z).expect("guarded");
    let w2 = (p / e1).norm_sqr();
    4.0 * dp.norm_sqr() / (e1 * e1 * (1.0 + w2) * (1.0 + w2))
}

/// Smooth bump shape on the region coordinate: 1 at the branch point, 0 at
/// the region edge.
fn bump_shape(q: f64) -> f64 {
    if q <= 0.0 {
        1.0
    } else if q >= 1.0 {
        0.0
    } else {
        let t = 1.0 - q;
        t * t * t * (t * (t * 6.0 - 15.0) + 10.0)
    }
}

fn correct_density(
    source: &SurfaceChart,
    target: &SurfaceChart,
    raw: &[f64],
    forward: &[(f64, f64)],
    branch_points: &[BranchPoint],
    spec: CorrectionSpec,
) -> Result<(Vec<f64>, CorrectionReport)> {
    if !(spec.epsilon > 0.0 && spec.branch_radius > 0.0) {
        return Err(Error::InvalidChart(
            "correction needs positive branch radius and epsilon".into(),
        ));
    }
    let n = source.len();
    let coord_cell = source.h1() * source.h2();
    let k = branch_points.len();
    let mut bumps: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut amplitudes = Vec::with_capacity(k);
    for bp in branch_points {
        let bump: Vec<f64> = (0..n)
            .map(|i| bump_shape(bp.region.q(target, forward[i])))
            .collect();
        let terms: Vec<f64> = bump.iter().map(|&b| b * coord_cell).collect();
        let mass = pairwise_sum(&terms);
        if mass <= 0.0 {
            return Err(Error::InvalidChart(format!(
                "branch region around {:?} captures no source node; enlarge branch_radius",
                bp.target
            )));
        }
        amplitudes.push(spec.epsilon / (2.0 * k as f64 * mass));
        bumps.push(bump);
    }
    let mut density = raw.to_vec();
    for (a, bump) in amplitudes.iter().zip(&bumps) {
        for (d, &b) in density.iter_mut().zip(bump) {
            *d += a * b;
        }
    }
    let added_terms: Vec<f64> = (0..n).map(|i| (density[i] - raw[i]) * coord_cell).collect();
    let added_area = pairwise_sum(&added_terms);
    let min_density = crate::sum::min(&density);
    if min_density <= 0.0 {
        return Err(Error::NonPositiveField {
            context: "corrected area density".into(),
            min: min_density,
        });
    }
    Ok((
        density,
        CorrectionReport {
            added_area,
            min_density,
            amplitudes,
        },
    ))
}

/// The corrected area density of a ramified map as a standalone value:
/// `|Jac p| rho_target(p(.)) + eta` with `eta` supported in the branch-disc
/// preimages and total mass at most `epsilon`. For unramified maps this is
/// the raw pullback density with a zero correction.
pub fn corrected_area_form(
    map: &CoveringMap,
    spec: CorrectionSpec,
) -> Result<(Vec<f64>, CorrectionReport)> {
    if map.branch_points().is_empty() {
        return Ok((
            map.raw_density().to_vec(),
            CorrectionReport {
                added_area: 0.0,
                min_density: crate::sum::min(map.raw_density()),
                amplitudes: Vec::new(),
            },
        ));
    }
    correct_density(
        map.source(),
        map.target(),
        map.raw_density(),
        &map.forward_nodes,
        map.branch_points(),
        spec,
    )
}
