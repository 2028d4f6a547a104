//! Collection files (JSON): mode plus a list of field sources (bump
//! parameters, field dump paths, or built-in formula ids).

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::collection::collection::{CollectionMode, PositiveCollection};
use crate::error::{Error, Result};
use crate::fields::profile::Profile;
use crate::fields::shapes::{bump_disc, cap_field};
use crate::fields::sharpness::{sharpness_field, SharpnessParams, SharpnessRole};
use crate::geometry::chart::SurfaceChart;
use crate::geometry::dump;
use crate::geometry::field::ScalarField;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSource {
    Bump {
        bump: BumpSpec,
    },
    Dump {
        dump: String,
    },
    /// Formula ids:
    /// `two_caps:north`, `two_caps:south`,
    /// `sharpness:d=<d>:plus`, `sharpness:d=<d>:minus`, `sharpness:d=<d>:side=<j>`.
    Formula {
        formula: String,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BumpSpec {
    pub center: [f64; 2],
    pub r_inner: f64,
    pub r_outer: f64,
    #[serde(default = "default_degree")]
    pub degree: u32,
}

fn default_degree() -> u32 {
    5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CollectionFieldSpec {
    pub disc: usize,
    #[serde(flatten)]
    pub source: FieldSource,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CollectionFile {
    pub mode: String,
    pub fields: Vec<CollectionFieldSpec>,
}

pub fn parse_mode(s: &str) -> Result<CollectionMode> {
    match s {
        "positive" => Ok(CollectionMode::Positive),
        "partition" => Ok(CollectionMode::Partition),
        other => Err(Error::Format(format!("unknown collection mode {other:?}"))),
    }
}

fn formula_field(chart: &Arc<SurfaceChart>, id: &str) -> Result<ScalarField> {
    let parts: Vec<&str> = id.split(':').collect();
    match parts.as_slice() {
        ["two_caps", "north"] => cap_field(chart, -0.35, 0.35, true, 5),
        ["two_caps", "south"] => {
            let f_n = cap_field(chart, -0.35, 0.35, true, 5)?;
            let samples: Vec<f64> = f_n.samples().iter().map(|&v| 1.0 - v).collect();
            ScalarField::from_samples(chart, samples)
        }
        ["sharpness", dspec, role] => {
            let d: usize = dspec
                .strip_prefix("d=")
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Format(format!("bad sharpness d in {id:?}")))?;
            let params = SharpnessParams::default();
            let role = match *role {
                "plus" => SharpnessRole::Plus,
                "minus" => SharpnessRole::Minus,
                side => {
                    let j: usize = side
                        .strip_prefix("side=")
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| Error::Format(format!("bad sharpness role in {id:?}")))?;
                    SharpnessRole::Side(j)
                }
            };
            sharpness_field(chart, d, role, &params)
        }
        _ => Err(Error::Format(format!("unknown formula id {id:?}"))),
    }
}

/// Builds a collection on `chart` from a parsed file; dump paths resolve
/// relative to `base`.
pub fn build_collection(
    chart: &Arc<SurfaceChart>,
    file: &CollectionFile,
    base: &Path,
) -> Result<PositiveCollection> {
    let mode = parse_mode(&file.mode)?;
    let mut fields = Vec::with_capacity(file.fields.len());
    let mut disc_of = Vec::with_capacity(file.fields.len());
    for spec in &file.fields {
        let field = match &spec.source {
            FieldSource::Bump { bump } => bump_disc(
                chart,
                (bump.center[0], bump.center[1]),
                &Profile::poly(bump.r_inner, bump.r_outer, bump.degree),
            )?,
            FieldSource::Dump { dump: path } => {
                let f = dump::read_field(&base.join(path))?;
                if f.chart().n1() != chart.n1()
                    || f.chart().n2() != chart.n2()
                    || f.chart().kind() != chart.kind()
                {
                    return Err(Error::ChartMismatch {
                        context: "collection field dump",
                    });
                }
                ScalarField::from_samples(chart, f.samples().to_vec())?
            }
            FieldSource::Formula { formula } => formula_field(chart, formula)?,
        };
        fields.push(field);
        disc_of.push(spec.disc);
    }
    PositiveCollection::new(chart.clone(), fields, disc_of, mode)
}

/// Loads a collection file from disk.
pub fn load_collection(
    chart: &Arc<SurfaceChart>,
    path: &Path,
) -> Result<PositiveCollection> {
    let text = std::fs::read_to_string(path)?;
    let file: CollectionFile = serde_json::from_str(&text)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    build_collection(chart, &file, base)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_and_bump_sources_build() {
        let chart = SurfaceChart::sphere(96, 97).unwrap();
        let file = CollectionFile {
            mode: "partition".into(),
            fields: vec![
                CollectionFieldSpec {
                    disc: 0,
                    source: FieldSource::Formula { formula: "two_caps:north".into() },
                },
                CollectionFieldSpec {
                    disc: 1,
                    source: FieldSource::Formula { formula: "two_caps:south".into() },
                },
            ],
        };
        let coll = build_collection(&chart, &file, Path::new(".")).unwrap();
        assert_eq!(coll.len(), 2);
        assert!((coll.min_sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sharpness_formula_ids_parse() {
        let chart = SurfaceChart::sphere(256, 257).unwrap();
        for id in ["sharpness:d=4:plus", "sharpness:d=4:minus", "sharpness:d=4:side=3"] {
            formula_field(&chart, id).unwrap();
        }
        assert!(formula_field(&chart, "sharpness:d=4:side=9").is_err());
        assert!(formula_field(&chart, "nope").is_err());
    }
}
