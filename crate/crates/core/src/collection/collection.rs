//! Positive collections and partitions of unity subordinated to a cover.

use std::sync::Arc;

use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::geometry::chart::SurfaceChart;
use crate::geometry::field::ScalarField;
use crate::sum::min;
use crate::topo;

/// Tolerance on the pointwise-sum constraints.
pub const MODE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollectionMode {
    /// `S_F >= 1` everywhere.
    Positive,
    /// `S_F = 1` everywhere.
    Partition,
}

/// A finite list of nonnegative fields, each assigned to a cover disc, with
/// the cached pointwise sum.
#[derive(Debug, Clone)]
pub struct PositiveCollection {
    chart: Arc<SurfaceChart>,
    fields: Vec<ScalarField>,
    disc_of: Vec<usize>,
    mode: CollectionMode,
    sum: ScalarField,
}

/// Outcome of one validation clause.
#[derive(Debug, Clone)]
pub struct Clause {
    pub name: &'static str,
    pub pass: bool,
    pub worst_node: Option<usize>,
    pub worst_value: f64,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub clauses: Vec<Clause>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.clauses.iter().all(|c| c.pass)
    }

    pub fn failing(&self) -> Vec<&Clause> {
        self.clauses.iter().filter(|c| !c.pass).collect()
    }
}

impl PositiveCollection {
    pub fn new(
        chart: Arc<SurfaceChart>,
        fields: Vec<ScalarField>,
        disc_of: Vec<usize>,
        mode: CollectionMode,
    ) -> Result<PositiveCollection> {
        if fields.is_empty() {
            return Err(Error::InvalidCollection("empty collection".into()));
        }
        if fields.len() != disc_of.len() {
            return Err(Error::InvalidCollection(format!(
                "{} fields but {} disc assignments",
                fields.len(),
                disc_of.len()
            )));
        }
        for f in &fields {
            if !f.chart().compatible(&chart) {
                return Err(Error::ChartMismatch { context: "collection field" });
            }
        }
        let sum = sum_fields(&chart, &fields)?;
        Ok(PositiveCollection {
            chart,
            fields,
            disc_of,
            mode,
            sum,
        })
    }

    pub fn chart(&self) -> &Arc<SurfaceChart> {
        &self.chart
    }

    pub fn fields(&self) -> &[ScalarField] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn disc_of(&self) -> &[usize] {
        &self.disc_of
    }

    pub fn mode(&self) -> CollectionMode {
        self.mode
    }

    /// Cached pointwise sum `S_F`.
    pub fn sum_field(&self) -> &ScalarField {
        &self.sum
    }

    pub fn min_sum(&self) -> f64 {
        min(self.sum.samples())
    }

    /// Checks all collection invariants against a cover: nonnegativity,
    /// strict support containment (disc mask true on a 1-node neighborhood
    /// of every support node), and the mode constraint on `S_F`.
    pub fn validate(&self, cover: &Cover) -> ValidationReport {
        let mut clauses = Vec::new();
        let n = self.chart.len();

        // nonnegativity
        let mut worst = (None, 0.0f64);
        for f in &self.fields {
            for (idx, &v) in f.samples().iter().enumerate() {
                if v < worst.1 {
                    worst = (Some(idx), v);
                }
            }
        }
        clauses.push(Clause {
            name: "nonnegative",
            pass: worst.0.is_none(),
            worst_node: worst.0,
            worst_value: worst.1,
        });

        // strict support containment
        let mut violation = None;
        let mut nb = Vec::with_capacity(4);
        'outer: for (i, f) in self.fields.iter().enumerate() {
            let disc_idx = self.disc_of[i];
            if disc_idx >= cover.len() {
                violation = Some((i, 0));
                break;
            }
            let mask = cover.discs()[disc_idx].mask();
            for idx in 0..n {
                if !f.support()[idx] {
                    continue;
                }
                if !mask[idx] {
                    violation = Some((i, idx));
                    break 'outer;
                }
                topo::neighbors4(&self.chart, idx, &mut nb);
                if nb.iter().any(|&y| !mask[y]) {
                    violation = Some((i, idx));
                    break 'outer;
                }
            }
        }
        clauses.push(Clause {
            name: "support_in_disc",
            pass: violation.is_none(),
            worst_node: violation.map(|(_, idx)| idx),
            worst_value: violation.map(|(i, _)| i as f64).unwrap_or(0.0),
        });

        // mode constraint
        let (name, pass, worst_node, worst_value) = match self.mode {
            CollectionMode::Positive => {
                let mut w = (0usize, f64::INFINITY);
                for (idx, &s) in self.sum.samples().iter().enumerate() {
                    if s < w.1 {
                        w = (idx, s);
                    }
                }
                ("sum_at_least_one", w.1 >= 1.0 - MODE_TOL, Some(w.0), w.1)
            }
            CollectionMode::Partition => {
                let mut w = (0usize, 0.0f64);
                for (idx, &s) in self.sum.samples().iter().enumerate() {
                    let dev = (s - 1.0).abs();
                    if dev > w.1 {
                        w = (idx, dev);
                    }
                }
                ("sum_equals_one", w.1 <= MODE_TOL, Some(w.0), w.1)
            }
        };
        clauses.push(Clause {
            name,
            pass,
            worst_node,
            worst_value,
        });

        ValidationReport { clauses }
    }

    /// Validation as a hard error with the failing clauses listed.
    pub fn validate_strict(&self, cover: &Cover) -> Result<()> {
        let report = self.validate(cover);
        if report.pass() {
            Ok(())
        } else {
            let names: Vec<_> = report.failing().iter().map(|c| c.name).collect();
            Err(Error::InvalidCollection(format!(
                "validation failed: {}",
                names.join(", ")
            )))
        }
    }

    /// Pointwise division by `S_F`, the canonical bridge from positive
    /// collections to partitions of unity.
    pub fn normalize_to_partition(&self) -> Result<PositiveCollection> {
        let s = self.sum.samples();
        let minimum = min(s);
        if minimum <= 0.0 {
            return Err(Error::NonPositiveField {
                context: "collection sum".into(),
                min: minimum,
            });
        }
        let fields: Vec<ScalarField> = self
            .fields
            .iter()
            .map(|f| {
                let samples: Vec<f64> = f
                    .samples()
                    .iter()
                    .zip(s)
                    .map(|(&v, &sv)| if v != 0.0 { v / sv } else { 0.0 })
                    .collect();
                ScalarField::new(self.chart.clone(), samples, f.support().to_vec())
            })
            .collect::<Result<_>>()?;
        PositiveCollection::new(
            self.chart.clone(),
            fields,
            self.disc_of.clone(),
            CollectionMode::Partition,
        )
    }

    /// Same collection under a different declared mode.
    pub fn with_mode(&self, mode: CollectionMode) -> PositiveCollection {
        let mut c = self.clone();
        c.mode = mode;
        c
    }
}

pub(crate) fn sum_fields(
    chart: &Arc<SurfaceChart>,
    fields: &[ScalarField],
) -> Result<ScalarField> {
    let mut samples = vec![0.0f64; chart.len()];
    for f in fields {
        for (a, &b) in samples.iter_mut().zip(f.samples()) {
            *a += b;
        }
    }
    ScalarField::new(chart.clone(), samples, vec![true; chart.len()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collection::builders::two_caps_partition;
    use crate::cover::builders::two_caps_cover;
    use crate::geometry::chart::SurfaceChart;

    #[test]
    fn two_cap_partition_validates() {
        let chart = SurfaceChart::sphere(64, 65).unwrap();
        let cover = two_caps_cover(&chart).unwrap();
        let coll = two_caps_partition(&chart).unwrap();
        let report = coll.validate(&cover);
        assert!(report.pass(), "{:?}", report.failing());
    }

    #[test]
    fn negative_node_fails_with_location() {
        let chart = SurfaceChart::sphere(64, 65).unwrap();
        let cover = two_caps_cover(&chart).unwrap();
        let coll = two_caps_partition(&chart).unwrap();
        let mut samples = coll.fields()[0].samples().to_vec();
        let bad = chart.idx(3, 40);
        samples[bad] = -0.25;
        let mut support = coll.fields()[0].support().to_vec();
        support[bad] = true;
        let f0 = ScalarField::new(chart.clone(), samples, support).unwrap();
        let coll2 = PositiveCollection::new(
            chart.clone(),
            vec![f0, coll.fields()[1].clone()],
            vec![0, 1],
            CollectionMode::Positive,
        )
        .unwrap();
        let report = coll2.validate(&cover);
        let clause = &report.clauses[0];
        assert!(!clause.pass);
        assert_eq!(clause.worst_node, Some(bad));
        assert_eq!(clause.worst_value, -0.25);
    }

    #[test]
    fn support_touching_disc_boundary_fails() {
        let chart = SurfaceChart::sphere(64, 65).unwrap();
        let cover = two_caps_cover(&chart).unwrap();
        // the full north cap itself is not strictly inside U_n
        let f_n = ScalarField::from_fn(&chart, |_, z| if z > -0.5 { 1.0 } else { 0.0 }).unwrap();
        let f_s = ScalarField::from_fn(&chart, |_, z| if z < -0.4 { 1.0 } else { 0.0 }).unwrap();
        let coll = PositiveCollection::new(
            chart,
            vec![f_n, f_s],
            vec![0, 1],
            CollectionMode::Positive,
        )
        .unwrap();
        let report = coll.validate(&cover);
        assert!(!report.clauses[1].pass);
    }
}
