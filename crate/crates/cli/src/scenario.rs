//! Scenario files: chart, cover and collection sources, optional covering
//! map, checks with tolerances, optional optimizer block, output directory,
//! and the seed that fixes all randomness.

use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use pbsurf_core::collection::builders::{bump_collection, random_plateaus, two_caps_partition};
use pbsurf_core::collection::collection::PositiveCollection;
use pbsurf_core::collection::io as coll_io;
use pbsurf_core::cover::builders::{
    jittered_lattice_cover, two_caps_cover, SCENARIO_JITTER, SCENARIO_R_HI, SCENARIO_R_LO,
};
use pbsurf_core::cover::cover::Cover;
use pbsurf_core::cover::io as cover_io;
use pbsurf_core::fields::sharpness::SharpnessParams;
use pbsurf_core::geometry::chart::{ChartKind, SurfaceChart};
use pbsurf_core::lift::map::{CorrectionSpec, CoveringMap};
use pbsurf_core::optimize::sharpness::build_sharpness_example;

pub const KNOWN_CHECKS: &[&str] = &[
    "confined_essential",
    "star",
    "pb_bound",
    "partition_refinement",
    "averaging",
    "sup_pb",
    "blt_comparison",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    #[serde(default)]
    pub chart: Option<cover_io::ChartSpec>,
    pub cover: SourceSpec,
    pub collection: SourceSpec,
    #[serde(default)]
    pub covering_map: Option<MapSpec>,
    #[serde(default)]
    pub localization: Option<LocalizationSpec>,
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub optimizer: Option<OptimizerSpec>,
    #[serde(default)]
    pub out_dir: Option<String>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SourceSpec {
    Path { path: String },
    Builder { builder: BuilderSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum BuilderSpec {
    #[serde(rename = "sharpness")]
    Sharpness { d: usize },
    #[serde(rename = "two_caps")]
    TwoCaps {},
    #[serde(rename = "lattice")]
    Lattice { k: usize, mode: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapSpec {
    pub kind: String,
    #[serde(default)]
    pub k1: Option<usize>,
    #[serde(default)]
    pub k2: Option<usize>,
    #[serde(default)]
    pub lattice: Option<f64>,
    #[serde(default)]
    pub n1: Option<usize>,
    #[serde(default)]
    pub n2: Option<usize>,
    #[serde(default)]
    pub branch_radius: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LocalizationSpec {
    Points { points: Vec<[f64; 2]> },
    Find { find: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckSpec {
    pub check: String,
    #[serde(default)]
    pub disc: Option<DiscSelector>,
    #[serde(default)]
    pub at: Option<AtSelector>,
    #[serde(default)]
    pub measure: Option<MeasureSpec>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    /// Upper bound for the `sup_pb` row.
    #[serde(default)]
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DiscSelector {
    Index(usize),
    /// `"auto"`: every confined essential disc.
    Named(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AtSelector {
    Point([f64; 2]),
    /// `"localization"` or `"samples:K"`.
    Named(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub kind: String,
    #[serde(default)]
    pub points: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub normalized: Option<bool>,
    /// For `dirac_sum` without explicit points: use this many greedily
    /// found localization points.
    #[serde(default)]
    pub count: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizerSpec {
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default)]
    pub objective: Option<String>,
    #[serde(default = "default_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub step0: Option<f64>,
    #[serde(default)]
    pub softabs_eps: Option<f64>,
    /// Start from the scenario collection (`"collection"`), a theta-rippled
    /// two-cap start (`"ripple"`), or seeded normalized bumps with restarts
    /// (`"bumps"`).
    #[serde(default = "default_init")]
    pub init: String,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    /// Optional acceptance target on the final `int P omega`.
    #[serde(default)]
    pub target_l1: Option<f64>,
}

fn default_mode() -> String {
    "positive".into()
}
fn default_iters() -> usize {
    200
}
fn default_init() -> String {
    "collection".into()
}
fn default_restarts() -> usize {
    1
}

/// Everything a run needs, resolved from the scenario.
pub struct Resolved {
    pub chart: Arc<SurfaceChart>,
    pub cover: Cover,
    pub collection: PositiveCollection,
    pub localization: Option<Vec<usize>>,
    pub map: Option<CoveringMap>,
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let scenario: Scenario = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))?;
    for check in &scenario.checks {
        if !KNOWN_CHECKS.contains(&check.check.as_str()) {
            bail!(
                "unknown check id {:?} (known: {})",
                check.check,
                KNOWN_CHECKS.join(", ")
            );
        }
    }
    Ok(scenario)
}

fn builder_of(source: &SourceSpec) -> Option<&BuilderSpec> {
    match source {
        SourceSpec::Builder { builder } => Some(builder),
        SourceSpec::Path { .. } => None,
    }
}

pub fn resolve(
    scenario: &Scenario,
    base: &Path,
    grid_override: Option<usize>,
    seed: u64,
) -> Result<Resolved> {
    // chart resolution overrides
    let chart_spec = |default_kind: &str| -> cover_io::ChartSpec {
        let mut spec = scenario.chart.clone().unwrap_or(cover_io::ChartSpec {
            kind: default_kind.into(),
            l1: Some(1.0),
            l2: Some(1.0),
            n1: 256,
            n2: if default_kind == "torus" { 256 } else { 257 },
            area: None,
            pole_band: None,
        });
        if let Some(n) = grid_override {
            spec.n1 = n;
            spec.n2 = if spec.kind == "torus" { n } else { n + 1 };
        }
        spec
    };

    let (chart, cover, collection) = match (builder_of(&scenario.cover), builder_of(&scenario.collection)) {
        (Some(b1), Some(b2)) => {
            if b1 != b2 {
                bail!("cover and collection builders must agree when both are builders");
            }
            match b1 {
                BuilderSpec::Sharpness { d } => {
                    let chart = chart_spec("sphere").build()?;
                    let (cover, coll) =
                        build_sharpness_example(&chart, *d, &SharpnessParams::default())?;
                    (chart, cover, coll)
                }
                BuilderSpec::TwoCaps {} => {
                    let chart = chart_spec("sphere").build()?;
                    let cover = two_caps_cover(&chart)?;
                    let coll = two_caps_partition(&chart)?;
                    (chart, cover, coll)
                }
                BuilderSpec::Lattice { k, mode } => {
                    let chart = chart_spec("torus").build()?;
                    let mode = coll_io::parse_mode(mode)?;
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let (cover, centers, radii) = jittered_lattice_cover(
                        &chart,
                        *k,
                        *k,
                        SCENARIO_R_LO,
                        SCENARIO_R_HI,
                        SCENARIO_JITTER,
                        &mut rng,
                    )?;
                    let plateaus = random_plateaus(centers.len(), SCENARIO_R_LO, &mut rng);
                    let coll = bump_collection(&cover, &centers, &radii, &plateaus, 7, mode)?;
                    (chart, cover, coll)
                }
            }
        }
        _ => {
            let SourceSpec::Path { path: cover_path } = &scenario.cover else {
                bail!("mixing a builder cover with a file collection is unsupported");
            };
            let SourceSpec::Path { path: coll_path } = &scenario.collection else {
                bail!("mixing a file cover with a builder collection is unsupported");
            };
            let (chart, cover, _loc) = cover_io::load_cover(&base.join(cover_path))?;
            let coll = coll_io::load_collection(&chart, &base.join(coll_path))?;
            (chart, cover, coll)
        }
    };

    let localization = match &scenario.localization {
        None => None,
        Some(LocalizationSpec::Points { points }) => Some(
            points
                .iter()
                .map(|p| chart.nearest_node((p[0], p[1])))
                .collect(),
        ),
        Some(LocalizationSpec::Find { find }) => cover.find_localization(*find),
    };

    let map = match &scenario.covering_map {
        None => None,
        Some(spec) => Some(build_map(spec, &chart)?),
    };

    Ok(Resolved {
        chart,
        cover,
        collection,
        localization,
        map,
    })
}

fn build_map(spec: &MapSpec, chart: &Arc<SurfaceChart>) -> Result<CoveringMap> {
    let n1 = spec.n1.unwrap_or(chart.n1());
    let n2 = spec.n2.unwrap_or(chart.n2());
    let correction = CorrectionSpec {
        branch_radius: spec.branch_radius.unwrap_or(0.2),
        epsilon: spec.epsilon.unwrap_or(0.05),
    };
    let map = match spec.kind.as_str() {
        "torus_unroll" => CoveringMap::torus_unroll(
            chart,
            spec.k1.unwrap_or(2),
            spec.k2.unwrap_or(1),
            n1,
            n2,
        )?,
        "sphere_square" => CoveringMap::sphere_square(chart, n1, n2, correction)?,
        "weierstrass" => {
            CoveringMap::weierstrass(chart, spec.lattice.unwrap_or(1.0), n1, n2, correction)?
        }
        "composite" => CoveringMap::composite_weierstrass_square(
            chart,
            spec.lattice.unwrap_or(1.0),
            n1,
            n2,
            correction,
        )?,
        other => bail!("unknown covering map kind {other:?}"),
    };
    if chart.kind() == ChartKind::Torus && spec.kind != "torus_unroll" {
        bail!("{} needs a sphere target chart", spec.kind);
    }
    Ok(map)
}
