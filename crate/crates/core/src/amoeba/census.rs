use alloc::vec::Vec;

use super::{is_benign, is_compatible, Amoeba};
use crate::decimation::EvenConstraint;
use crate::error::{Error, Result};
use crate::lattice::{extract_contours, Boundary, Contour, SpinField};

/// One diameter bin `[lo, hi)` of the census (`hi = None` is unbounded).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusRow {
    pub lo: u32,
    pub hi: Option<u32>,
    pub amoebas: usize,
    pub compatible: usize,
    pub benign: usize,
}

impl CensusRow {
    /// Benign share among compatible amoebas, `None` when the bin is empty.
    pub fn benign_fraction(&self) -> Option<f64> {
        (self.compatible > 0).then(|| self.benign as f64 / self.compatible as f64)
    }
}

/// Groups the contours of one configuration into amoebas. Every contour not
/// enclosed by another is an exterior; its internals are the contours it
/// encloses directly (not through a third contour) that surround an even site.
pub fn group_amoebas(contours: &[Contour]) -> Vec<Amoeba> {
    let encloses = |a: &Contour, b: &Contour| a != b && a.contains_contour(b);
    let mut out = Vec::new();
    for gamma in contours {
        if contours.iter().any(|c| encloses(c, gamma)) {
            continue;
        }
        let inside: Vec<&Contour> = contours.iter().filter(|c| encloses(gamma, c)).collect();
        let internals: Vec<Contour> = inside
            .iter()
            .filter(|c| !inside.iter().any(|d| encloses(d, c)))
            .filter(|c| c.interior().iter().any(|s| s.is_even()))
            .map(|c| (*c).clone())
            .collect();
        if let Ok(g) = Amoeba::new(gamma.clone(), internals) {
            out.push(g);
        }
    }
    out
}

/// For each plus-boundary configuration, groups its contours into amoebas,
/// reads `ξ` off its even sites, and tallies compatible and benign amoebas
/// by exterior diameter. `edges` are ascending bin lower bounds.
pub fn amoeba_census(fields: &[SpinField], lambda: f64, edges: &[u32]) -> Result<Vec<CensusRow>> {
    if edges.is_empty() || edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("bin edges must be strictly increasing".into()));
    }
    let mut rows: Vec<CensusRow> = edges
        .iter()
        .enumerate()
        .map(|(k, lo)| CensusRow {
            lo: *lo,
            hi: edges.get(k + 1).copied(),
            amoebas: 0,
            compatible: 0,
            benign: 0,
        })
        .collect();
    for field in fields {
        if *field.boundary() != Boundary::Plus {
            return Err(Error::Precondition("the census reads contours of plus-boundary fields".into()));
        }
        let xi = EvenConstraint::from_image(field.rect(), |i| field.get(i.doubled()).unwrap());
        for g in group_amoebas(&extract_contours(field)?) {
            let d = g.diam();
            let Some(row) = rows.iter_mut().rev().find(|r| r.lo <= d) else { continue };
            row.amoebas += 1;
            if is_compatible(&g, &xi) {
                row.compatible += 1;
                row.benign += is_benign(&g, &xi, lambda)? as usize;
            }
        }
    }
    Ok(rows)
}
