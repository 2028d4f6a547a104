//! Cover description files (JSON): a chart block, an array of geometric or
//! implicit discs, and optional declared localization points.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cover::cover::Cover;
use crate::cover::disc::Disc;
use crate::error::{Error, Result};
use crate::geometry::chart::{ChartKind, SurfaceChart, DEFAULT_POLE_BAND};
use crate::geometry::dump;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChartSpec {
    pub kind: String,
    #[serde(default)]
    pub l1: Option<f64>,
    #[serde(default)]
    pub l2: Option<f64>,
    pub n1: usize,
    pub n2: usize,
    #[serde(default)]
    pub area: Option<f64>,
    #[serde(default)]
    pub pole_band: Option<f64>,
}

impl ChartSpec {
    pub fn build(&self) -> Result<Arc<SurfaceChart>> {
        match self.kind.as_str() {
            "torus" => {
                let l1 = self.l1.unwrap_or(1.0);
                let l2 = self.l2.unwrap_or(1.0);
                match self.area {
                    Some(a) => SurfaceChart::torus_with_area(l1, l2, self.n1, self.n2, a),
                    None => SurfaceChart::torus(l1, l2, self.n1, self.n2),
                }
            }
            "sphere" | "sphere_cyl" => SurfaceChart::sphere_with_pole_band(
                self.n1,
                self.n2,
                self.pole_band.unwrap_or(DEFAULT_POLE_BAND),
            ),
            k => Err(Error::Format(format!("unknown chart kind {k:?}"))),
        }
    }

    pub fn of_chart(chart: &SurfaceChart) -> ChartSpec {
        match chart.kind() {
            ChartKind::Torus => ChartSpec {
                kind: "torus".into(),
                l1: Some(chart.range1().1 - chart.range1().0),
                l2: Some(chart.range2().1 - chart.range2().0),
                n1: chart.n1(),
                n2: chart.n2(),
                area: Some(chart.declared_area()),
                pole_band: None,
            },
            ChartKind::SphereCyl => ChartSpec {
                kind: "sphere".into(),
                l1: None,
                l2: None,
                n1: chart.n1(),
                n2: chart.n2(),
                area: None,
                pole_band: Some(chart.pole_band()),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum DiscSpec {
    #[serde(rename = "geometric")]
    Geometric { center: [f64; 2], radius: f64 },
    #[serde(rename = "implicit")]
    Implicit { field: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverFile {
    pub chart: ChartSpec,
    pub discs: Vec<DiscSpec>,
    #[serde(default)]
    pub localization: Option<Vec<[f64; 2]>>,
}

/// Loads a cover file. Implicit-disc field dumps are resolved relative to
/// the cover file's directory. Returns the chart, the cover and the declared
/// localization nodes, if any.
pub fn load_cover(path: &Path) -> Result<(Arc<SurfaceChart>, Cover, Option<Vec<usize>>)> {
    let text = std::fs::read_to_string(path)?;
    let file: CoverFile = serde_json::from_str(&text)?;
    let chart = file.chart.build()?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    build_cover(&chart, &file, base)
}

pub fn build_cover(
    chart: &Arc<SurfaceChart>,
    file: &CoverFile,
    base: &Path,
) -> Result<(Arc<SurfaceChart>, Cover, Option<Vec<usize>>)> {
    let mut discs = Vec::with_capacity(file.discs.len());
    for spec in &file.discs {
        match spec {
            DiscSpec::Geometric { center, radius } => {
                discs.push(Disc::geometric(chart, (center[0], center[1]), *radius)?);
            }
            DiscSpec::Implicit { field } => {
                let field_path = base.join(field);
                let f = dump::read_field(&field_path)?;
                if f.chart().n1() != chart.n1()
                    || f.chart().n2() != chart.n2()
                    || f.chart().kind() != chart.kind()
                {
                    return Err(Error::ChartMismatch {
                        context: "implicit disc field dump",
                    });
                }
                // re-anchor the dumped samples on the cover's chart
                let field = crate::geometry::field::ScalarField::new(
                    chart.clone(),
                    f.samples().to_vec(),
                    vec![true; chart.len()],
                )?;
                discs.push(Disc::implicit(field)?);
            }
        }
    }
    let cover = Cover::new(chart.clone(), discs)?;
    let localization = file
        .localization
        .as_ref()
        .map(|pts| pts.iter().map(|p| chart.nearest_node((p[0], p[1]))).collect());
    Ok((chart.clone(), cover, localization))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cover_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cover.json");
        let file = CoverFile {
            chart: ChartSpec {
                kind: "torus".into(),
                l1: Some(1.0),
                l2: Some(1.0),
                n1: 64,
                n2: 64,
                area: None,
                pole_band: None,
            },
            discs: vec![
                DiscSpec::Geometric { center: [0.25, 0.25], radius: 0.45 },
                DiscSpec::Geometric { center: [0.75, 0.25], radius: 0.45 },
                DiscSpec::Geometric { center: [0.25, 0.75], radius: 0.45 },
                DiscSpec::Geometric { center: [0.75, 0.75], radius: 0.45 },
            ],
            localization: Some(vec![[0.25, 0.25]]),
        };
        std::fs::write(&path, serde_json::to_string_pretty(&file).unwrap()).unwrap();
        let (chart, cover, loc) = load_cover(&path).unwrap();
        assert_eq!(cover.len(), 4);
        assert_eq!(loc.unwrap()[0], chart.nearest_node((0.25, 0.25)));
    }
}
