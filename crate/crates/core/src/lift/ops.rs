//! Pullback and lift operations along covering maps.

use crate::collection::collection::PositiveCollection;
use crate::collection::ops::fragment;
use crate::cover::cover::Cover;
use crate::cover::disc::Disc;
use crate::error::{Error, Result};
use crate::geometry::field::ScalarField;
use crate::lift::map::CoveringMap;
use crate::topo;

/// Pullback `(p^* f)(x') = f(p(x'))` via bilinear interpolation at the
/// mapped coordinates.
pub fn pull_back_field(map: &CoveringMap, f: &ScalarField) -> Result<ScalarField> {
    if !f.chart().compatible(map.target()) {
        return Err(Error::ChartMismatch { context: "pull_back_field" });
    }
    let source = map.source().clone();
    let samples: Vec<f64> = (0..source.len())
        .map(|i| f.at(map.forward_node(i)))
        .collect();
    ScalarField::from_samples(&source, samples)
}

/// A lifted cover: each disc of the base cover contributes its preimage
/// sheets, recorded with the parent disc index.
pub struct LiftedCover {
    pub cover: Cover,
    /// Parent disc index of each lifted disc.
    pub parent: Vec<usize>,
}

impl LiftedCover {
    /// Lifted discs descending from base disc `i`.
    pub fn sheets_of(&self, i: usize) -> Vec<usize> {
        (0..self.parent.len()).filter(|&j| self.parent[j] == i).collect()
    }
}

/// Lifts a cover along the map: every disc's preimage is fragmented into its
/// connected sheets, each validated as a disc, and membership caches are
/// rebuilt on the source chart.
pub fn lift_cover(map: &CoveringMap, cover: &Cover) -> Result<LiftedCover> {
    if !cover.chart().compatible(map.target()) {
        return Err(Error::ChartMismatch { context: "lift_cover" });
    }
    let source = map.source().clone();
    let mut discs = Vec::new();
    let mut parent = Vec::new();
    for (i, disc) in cover.discs().iter().enumerate() {
        let pulled = pull_back_field(map, disc.boundary_field())?;
        let mask: Vec<bool> = pulled.samples().iter().map(|&v| v < 0.0).collect();
        let comps = topo::components4(&source, &mask);
        if comps.is_empty() {
            return Err(Error::NotADisc(format!(
                "disc {i} has empty preimage under the lift"
            )));
        }
        for comp in comps {
            let mut sheet = vec![false; source.len()];
            for idx in comp {
                sheet[idx] = true;
            }
            discs.push(Disc::from_mask(&source, sheet)?);
            parent.push(i);
        }
    }
    let cover = Cover::new(source, discs)?;
    Ok(LiftedCover { cover, parent })
}

/// Lifts a collection: the lifted collection is the fragmentation of the
/// pullback, each fragment subordinated to the sheet containing it.
///
/// With branch points present, every field must be constant on every
/// declared branch region, so all brackets vanish there and the corrected
/// form's area surcharge lives where the bracket data is silent. (A field of
/// a positive collection cannot vanish outright on a whole region without
/// the others covering for it; constancy is the invariant the lift needs.)
pub fn lift_collection(
    map: &CoveringMap,
    coll: &PositiveCollection,
    lifted: &LiftedCover,
) -> Result<PositiveCollection> {
    if !coll.chart().compatible(map.target()) {
        return Err(Error::ChartMismatch { context: "lift_collection" });
    }
    let target = map.target();
    for bp in map.branch_points() {
        for (i, f) in coll.fields().iter().enumerate() {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for idx in 0..target.len() {
                if bp.region.contains(target, target.node_coords(idx)) {
                    let v = f.samples()[idx];
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            if hi - lo > 1e-9 * hi.abs().max(1.0) {
                return Err(Error::BranchDiscViolation(format!(
                    "field {i} is not constant on the branch region at {:?} (varies by {:.3e})",
                    bp.target,
                    hi - lo
                )));
            }
        }
    }

    let source = map.source().clone();
    let mut fields = Vec::new();
    let mut disc_of = Vec::new();
    for (i, f) in coll.fields().iter().enumerate() {
        let pulled = pull_back_field(map, f)?;
        let sheets = lifted.sheets_of(coll.disc_of()[i]);
        // fragment the pullback along its support components
        let parts = crate::fields::surgery::support_components(&pulled);
        for part in parts {
            let frag = pulled.masked(&part);
            let anchor = part.iter().position(|&m| m);
            let Some(anchor) = anchor else { continue };
            let sheet = sheets
                .iter()
                .copied()
                .find(|&s| lifted.cover.discs()[s].mask()[anchor]);
            let Some(sheet) = sheet else {
                return Err(Error::NotADisc(format!(
                    "a lifted component of field {i} lies in no sheet of its disc"
                )));
            };
            fields.push(frag);
            disc_of.push(sheet);
        }
    }
    let out = PositiveCollection::new(source, fields, disc_of, coll.mode())?;
    // lifted supports can straddle sheet boundaries only by interpolation
    // smear; fragmentation keeps the bookkeeping exact afterwards
    fragment(&out)
}
