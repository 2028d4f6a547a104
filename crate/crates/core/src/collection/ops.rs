//! Condensation and fragmentation.

use crate::collection::collection::{sum_fields, PositiveCollection};
use crate::error::{Error, Result};
use crate::fields::surgery::support_components;
use crate::geometry::field::ScalarField;

/// Condensation along a surjective index map `c : {0..N} -> {0..m}`:
/// `f'_j = sum_{c(i) = j} f_i`. Preserves `S_F`; never increases `P_F`.
///
/// The condensed field `j` keeps the disc index of its first member, so the
/// result is subordinated to the original cover only when each group lies in
/// one disc; re-validate when that matters.
pub fn condense(
    coll: &PositiveCollection,
    map: &[usize],
    m: usize,
) -> Result<PositiveCollection> {
    if map.len() != coll.len() {
        return Err(Error::InvalidCollection(format!(
            "condensation map has {} entries for {} fields",
            map.len(),
            coll.len()
        )));
    }
    let mut seen = vec![false; m];
    for &j in map {
        if j >= m {
            return Err(Error::InvalidCollection(format!(
                "condensation target {j} out of range {m}"
            )));
        }
        seen[j] = true;
    }
    if !seen.iter().all(|&s| s) {
        return Err(Error::InvalidCollection(
            "condensation map is not surjective".into(),
        ));
    }
    let chart = coll.chart().clone();
    let mut fields = Vec::with_capacity(m);
    let mut disc_of = Vec::with_capacity(m);
    for j in 0..m {
        let members: Vec<usize> = (0..coll.len()).filter(|&i| map[i] == j).collect();
        let group: Vec<ScalarField> = members.iter().map(|&i| coll.fields()[i].clone()).collect();
        let mut summed = sum_fields(&chart, &group)?;
        // tighten the support to the union of member supports
        let mut mask = vec![false; chart.len()];
        for g in &group {
            for (mm, &s) in mask.iter_mut().zip(g.support()) {
                *mm |= s;
            }
        }
        summed = summed.masked(&mask);
        fields.push(summed);
        disc_of.push(coll.disc_of()[members[0]]);
    }
    PositiveCollection::new(chart, fields, disc_of, coll.mode())
}

/// Fragmentation: splits every field along its 4-connected support
/// components. Preserves both `S_F` and `P_F` pointwise; idempotent.
pub fn fragment(coll: &PositiveCollection) -> Result<PositiveCollection> {
    let chart = coll.chart().clone();
    let mut fields = Vec::new();
    let mut disc_of = Vec::new();
    for (i, f) in coll.fields().iter().enumerate() {
        let comps = support_components(f);
        if comps.len() <= 1 {
            fields.push(f.clone());
            disc_of.push(coll.disc_of()[i]);
            continue;
        }
        for comp in comps {
            fields.push(f.masked(&comp));
            disc_of.push(coll.disc_of()[i]);
        }
    }
    PositiveCollection::new(chart, fields, disc_of, coll.mode())
}

/// Identity map for [`condense`]: leaves the collection unchanged.
pub fn identity_map(n: usize) -> Vec<usize> {
    (0..n).collect()
}
