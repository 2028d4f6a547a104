//! Grid-sampled scalar fields with a support mask.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::chart::SurfaceChart;

/// A smooth function sampled on a chart. `support` marks the nodes where the
/// field may be nonzero; samples are identically zero off the support.
#[derive(Debug, Clone)]
pub struct ScalarField {
    chart: Arc<SurfaceChart>,
    samples: Vec<f64>,
    support: Vec<bool>,
}

impl ScalarField {
    /// Builds a field, checking finiteness and the zero-off-support invariant.
    pub fn new(chart: Arc<SurfaceChart>, samples: Vec<f64>, support: Vec<bool>) -> Result<Self> {
        if samples.len() != chart.len() || support.len() != chart.len() {
            return Err(Error::InvalidChart(format!(
                "field length {} / mask length {} do not match grid {}",
                samples.len(),
                support.len(),
                chart.len()
            )));
        }
        for (i, &s) in samples.iter().enumerate() {
            if !s.is_finite() {
                return Err(Error::NonFinite {
                    context: format!("sample at node {i}"),
                });
            }
            if !support[i] && s != 0.0 {
                return Err(Error::InvalidCollection(format!(
                    "nonzero sample {s} outside support at node {i}"
                )));
            }
        }
        Ok(ScalarField {
            chart,
            samples,
            support,
        })
    }

    /// Samples a closed-form function at every node. The support is the grid
    /// closure of the nonzero set: the nonzero nodes plus one 4-neighbor
    /// ring, mirroring `supp(f) = closure{f != 0}`. The ring keeps masked
    /// brackets consistent with sums of fields (a derivative stencil reaches
    /// one node past the last nonzero sample).
    pub fn from_fn(chart: &Arc<SurfaceChart>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let samples: Vec<f64> = (0..chart.len())
            .map(|i| {
                let (c1, c2) = chart.node_coords(i);
                f(c1, c2)
            })
            .collect();
        Self::from_samples_vec(chart, samples)
    }

    /// Builds from raw samples; support is the grid closure of the nonzero
    /// set, as in [`ScalarField::from_fn`].
    pub fn from_samples(chart: &Arc<SurfaceChart>, samples: Vec<f64>) -> Result<Self> {
        Self::from_samples_vec(chart, samples)
    }

    fn from_samples_vec(chart: &Arc<SurfaceChart>, samples: Vec<f64>) -> Result<Self> {
        let nonzero: Vec<bool> = samples.iter().map(|&s| s != 0.0).collect();
        let support = crate::topo::dilate(chart, &nonzero);
        Self::new(chart.clone(), samples, support)
    }

    /// Samples a closed-form function with the whole surface as support.
    /// Use for globally supported fields whose zero level sets are interior
    /// (a nonzero-sample mask would punch holes at zero crossings).
    pub fn from_fn_full(chart: &Arc<SurfaceChart>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let samples: Vec<f64> = (0..chart.len())
            .map(|i| {
                let (c1, c2) = chart.node_coords(i);
                f(c1, c2)
            })
            .collect();
        let support = vec![true; chart.len()];
        Self::new(chart.clone(), samples, support)
    }

    pub fn constant(chart: &Arc<SurfaceChart>, c: f64) -> Result<Self> {
        let n = chart.len();
        Self::new(chart.clone(), vec![c; n], vec![c != 0.0; n])
    }

    pub fn zeros(chart: &Arc<SurfaceChart>) -> Self {
        let n = chart.len();
        ScalarField {
            chart: chart.clone(),
            samples: vec![0.0; n],
            support: vec![false; n],
        }
    }

    pub fn chart(&self) -> &Arc<SurfaceChart> {
        &self.chart
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn support(&self) -> &[bool] {
        &self.support
    }

    pub fn value(&self, idx: usize) -> f64 {
        self.samples[idx]
    }

    /// Zeroes every sample outside `mask` and intersects the support with it.
    pub fn masked(&self, mask: &[bool]) -> ScalarField {
        let mut samples = self.samples.clone();
        let mut support = self.support.clone();
        for i in 0..samples.len() {
            if !mask[i] {
                samples[i] = 0.0;
                support[i] = false;
            }
        }
        ScalarField {
            chart: self.chart.clone(),
            samples,
            support,
        }
    }

    /// Pointwise sum; the support is the union of supports.
    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        same_chart(self, other, "add")?;
        let samples: Vec<f64> = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + b)
            .collect();
        let support = self
            .support
            .iter()
            .zip(&other.support)
            .map(|(a, b)| *a || *b)
            .collect();
        Ok(ScalarField {
            chart: self.chart.clone(),
            samples,
            support,
        })
    }

    pub fn scale(&self, c: f64) -> ScalarField {
        let samples: Vec<f64> = self.samples.iter().map(|a| a * c).collect();
        let support = if c == 0.0 {
            vec![false; samples.len()]
        } else {
            self.support.clone()
        };
        ScalarField {
            chart: self.chart.clone(),
            samples,
            support,
        }
    }

    /// Applies a pointwise map to the samples, keeping the support mask and
    /// re-zeroing off-support entries.
    pub fn map_samples(&self, f: impl Fn(f64) -> f64) -> Result<ScalarField> {
        let samples: Vec<f64> = self
            .samples
            .iter()
            .zip(&self.support)
            .map(|(&s, &m)| if m { f(s) } else { 0.0 })
            .collect();
        ScalarField::new(self.chart.clone(), samples, self.support.clone())
    }

    /// Checks the pole-band invariant on sphere charts.
    pub fn check_pole_band(&self) -> Result<()> {
        self.chart.check_pole_band(&self.samples)
    }

    /// Interpolated value at a coordinate pair.
    pub fn at(&self, c: (f64, f64)) -> f64 {
        self.chart.sample_bilinear(&self.samples, c)
    }
}

pub(crate) fn same_chart(a: &ScalarField, b: &ScalarField, context: &'static str) -> Result<()> {
    if Arc::ptr_eq(a.chart(), b.chart()) || a.chart().compatible(b.chart()) {
        Ok(())
    } else {
        Err(Error::ChartMismatch { context })
    }
}
