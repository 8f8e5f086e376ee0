//! Amoebas: an exterior contour together with mutually external internal
//! contours, checked against a constraint `ξ` on the even sublattice.

mod census;
mod length;
mod pld;

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::vec::Vec;

use crate::decimation::EvenConstraint;
use crate::error::{Error, Result};
use crate::lattice::{extract_contours_on, Contour, Rect, Site, Spin};

pub use census::{amoeba_census, group_amoebas, CensusRow};
pub use length::{image_window, quenched_length, LengthValue, QuenchedLength, SetFamily};
pub use pld::{pld_statistic, PathMode};

/// Default density threshold.
pub const DEFAULT_LAMBDA: f64 = 0.25;

/// An exterior contour `Γ` with internal contours `γ_1..γ_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amoeba {
    exterior: Contour,
    internals: Vec<Contour>,
}

impl Amoeba {
    pub fn new(exterior: Contour, internals: Vec<Contour>) -> Result<Self> {
        let mut all = Vec::with_capacity(internals.len() + 1);
        all.push(exterior.clone());
        all.extend(internals.iter().cloned());
        if !is_amoeba(&all) {
            return Err(Error::Precondition("contours do not form an amoeba".into()));
        }
        Ok(Amoeba { exterior, internals })
    }

    pub fn exterior(&self) -> &Contour {
        &self.exterior
    }

    pub fn internals(&self) -> &[Contour] {
        &self.internals
    }

    /// `|G| = |Γ| + Σ |γ_k|`.
    pub fn size(&self) -> usize {
        self.exterior.len() + self.internals.iter().map(Contour::len).sum::<usize>()
    }

    pub fn diam(&self) -> u32 {
        self.exterior.diam()
    }

    /// `Int G`: sites inside `Γ` and outside every `γ_k`, sorted.
    pub fn interior(&self) -> Vec<Site> {
        self.exterior
            .interior()
            .iter()
            .copied()
            .filter(|s| !self.internals.iter().any(|g| g.surrounds(*s)))
            .collect()
    }
}

/// `true` when exactly one contour encloses all the others, the remaining
/// ones have pairwise disjoint interiors and each encloses an even site.
pub fn is_amoeba(contours: &[Contour]) -> bool {
    if contours.is_empty() {
        return false;
    }
    let exteriors: Vec<usize> = (0..contours.len())
        .filter(|&a| (0..contours.len()).all(|b| a == b || contours[a].contains_contour(&contours[b])))
        .collect();
    let [ext] = exteriors[..] else { return false };
    let internals: Vec<&Contour> = contours.iter().enumerate().filter(|(k, _)| *k != ext).map(|(_, c)| c).collect();
    if internals.iter().any(|c| !c.interior().iter().any(|s| s.is_even())) {
        return false;
    }
    for (a, ca) in internals.iter().enumerate() {
        for cb in &internals[a + 1..] {
            if ca.interior().iter().any(|s| cb.surrounds(*s)) {
                return false;
            }
        }
    }
    true
}

/// Spins forced by the contours of `G` on both sides of each crossed bond:
/// `-` just inside `Γ` and just outside each `γ_k`, `+` on the other sides.
/// `None` when two contours force opposite values on one site.
fn forced_spins(g: &Amoeba) -> Option<BTreeMap<Site, Spin>> {
    let mut forced = BTreeMap::new();
    let mut put = |s: Site, v: Spin| -> bool { *forced.entry(s).or_insert(v) == v };
    for (contour, inside) in core::iter::once((&g.exterior, Spin::Minus))
        .chain(g.internals.iter().map(|c| (c, Spin::Plus)))
    {
        for (a, b) in contour.crossed_bonds() {
            let (inner, outer) = if contour.surrounds(a) { (a, b) } else { (b, a) };
            if !put(inner, inside) || !put(outer, inside.flip()) {
                return None;
            }
        }
    }
    Some(forced)
}

/// Condition (1): a configuration agreeing with `ξ` on the even sites has
/// every contour of `G` among its contours. The witness takes the forced
/// values next to the contours, `ξ` on the remaining even sites, and `-` on
/// the remaining odd sites of `Int G`, `+` elsewhere.
pub fn is_realizable(g: &Amoeba, xi: &EvenConstraint) -> bool {
    let Some(forced) = forced_spins(g) else { return false };
    for (s, v) in &forced {
        if let Some(x) = xi.get(*s) {
            if x != *v {
                return false;
            }
        }
    }
    let inside: BTreeSet<Site> = g.interior().into_iter().collect();
    let witness = |s: Site| -> Spin {
        if let Some(v) = forced.get(&s) {
            return *v;
        }
        if let Some(v) = xi.get(s) {
            return v;
        }
        if inside.contains(&s) {
            Spin::Minus
        } else {
            Spin::Plus
        }
    };
    let rect = bounding_rect(&g.exterior).grow(1);
    let spin_at = |s: Site| -> Result<Option<Spin>> {
        Ok(Some(if rect.contains(s) { witness(s) } else { Spin::Plus }))
    };
    let Ok(found) = extract_contours_on(rect, Spin::Minus, spin_at) else { return false };
    core::iter::once(&g.exterior)
        .chain(g.internals.iter())
        .all(|c| found.contains(c))
}

fn bounding_rect(c: &Contour) -> Rect {
    let pts = c.points();
    let x0 = pts.iter().map(|p| p.x).min().unwrap();
    let x1 = pts.iter().map(|p| p.x).max().unwrap();
    let y0 = pts.iter().map(|p| p.y).min().unwrap();
    let y1 = pts.iter().map(|p| p.y).max().unwrap();
    Rect::new(x0 + 1, y0 + 1, (x1 - x0) as usize, (y1 - y0) as usize)
}

/// Sites inside `Γ` adjacent to a bond crossed by `Γ`.
fn inner_boundary(gamma: &Contour) -> BTreeSet<Site> {
    gamma
        .crossed_bonds()
        .into_iter()
        .map(|(a, b)| if gamma.surrounds(a) { a } else { b })
        .collect()
}

/// `D_Γ(ξ)`: the sites of `D(ξ) ∩ Int Γ` connected, through steps of two
/// along the axes (nearest neighbours of the image lattice), to an even
/// site lying on or next to the inner boundary of `Γ`.
pub fn boundary_minus_component(gamma: &Contour, xi: &EvenConstraint) -> BTreeSet<Site> {
    let in_d = |s: Site| gamma.surrounds(s) && xi.get(s) == Some(Spin::Minus);
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    for b in inner_boundary(gamma) {
        for s in core::iter::once(b).chain(b.neighbors()) {
            if s.is_even() && in_d(s) && seen.insert(s) {
                queue.push_back(s);
            }
        }
    }
    while let Some(s) = queue.pop_front() {
        for t in [(2, 0), (-2, 0), (0, 2), (0, -2)].map(|(dx, dy)| Site::new(s.x + dx, s.y + dy)) {
            if in_d(t) && seen.insert(t) {
                queue.push_back(t);
            }
        }
    }
    seen
}

/// The four compatibility conditions between an amoeba and `ξ`.
pub fn is_compatible(g: &Amoeba, xi: &EvenConstraint) -> bool {
    if !is_realizable(g, xi) {
        return false;
    }
    let plus_covered = g
        .exterior
        .interior()
        .iter()
        .filter(|s| xi.get(**s) == Some(Spin::Plus))
        .all(|s| g.internals.iter().any(|c| c.surrounds(*s)));
    if !plus_covered {
        return false;
    }
    let each_has_plus = g
        .internals
        .iter()
        .all(|c| c.interior().iter().any(|s| xi.get(*s) == Some(Spin::Plus)));
    if !each_has_plus {
        return false;
    }
    let d_gamma = boundary_minus_component(&g.exterior, xi);
    g.internals.iter().all(|c| !d_gamma.iter().any(|s| c.surrounds(*s)))
}

/// `|D(ξ) ∩ Int G| ≤ λ |G|` for a compatible amoeba.
pub fn is_benign(g: &Amoeba, xi: &EvenConstraint, lambda: f64) -> Result<bool> {
    if !is_compatible(g, xi) {
        return Err(Error::Precondition("amoeba is not compatible with the constraint".into()));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    Ok(minus_count(g, xi) as f64 <= lambda * g.size() as f64)
}

/// `|D(ξ) ∩ Int G|`.
pub fn minus_count(g: &Amoeba, xi: &EvenConstraint) -> usize {
    g.interior().iter().filter(|s| xi.get(**s) == Some(Spin::Minus)).count()
}
