//! Peierls contours: closed loops on the dual lattice separating unequal
//! nearest-neighbour spins.
//!
//! Every unequal bond with at least one endpoint in the box contributes one
//! dual edge, oriented so that the minority phase (the phase opposite to the
//! boundary condition) lies on its left. At a dual vertex where four such
//! edges meet, the incoming edge is continued by a left turn, so minority
//! cells touching only at a corner end up in separate contours. The rule is
//! covariant under a global spin flip of field and boundary.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use super::{Rect, Site, Spin, SpinField};
use crate::error::{Error, Result};

/// The dual point `(x + 1/2, y + 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DualPoint {
    pub x: i32,
    pub y: i32,
}

impl DualPoint {
    pub const fn new(x: i32, y: i32) -> Self {
        DualPoint { x, y }
    }
}

/// A closed dual loop and the sites it encloses.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Contour {
    points: Vec<DualPoint>,
    interior: Vec<Site>,
}

impl Contour {
    /// Builds a contour from a cyclic point sequence. Consecutive points
    /// (cyclically) must be at L1 distance 1.
    pub fn from_points(points: Vec<DualPoint>) -> Result<Contour> {
        if points.len() < 4 {
            return Err(Error::InvalidParameter("a contour has at least 4 points".into()));
        }
        for k in 0..points.len() {
            let a = points[k];
            let b = points[(k + 1) % points.len()];
            if a.x.abs_diff(b.x) + a.y.abs_diff(b.y) != 1 {
                return Err(Error::InvalidParameter("contour points are not adjacent".into()));
            }
        }
        let points = canonical_rotation(points);
        let interior = interior_by_ray_casting(&points);
        Ok(Contour { points, interior })
    }

    /// The axis-aligned square loop enclosing exactly the sites of `rect`.
    pub fn around(rect: Rect) -> Contour {
        let (x0, y0, x1, y1) = (rect.x0 - 1, rect.y0 - 1, rect.x1(), rect.y1());
        let mut pts = Vec::new();
        for x in x0..x1 {
            pts.push(DualPoint::new(x, y0));
        }
        for y in y0..y1 {
            pts.push(DualPoint::new(x1, y));
        }
        for x in (x0 + 1..=x1).rev() {
            pts.push(DualPoint::new(x, y1));
        }
        for y in (y0 + 1..=y1).rev() {
            pts.push(DualPoint::new(x0, y));
        }
        Contour::from_points(pts).expect("rectangle loop is closed")
    }

    pub fn points(&self) -> &[DualPoint] {
        &self.points
    }

    /// `|gamma|`, the number of dual points (equivalently, of dual edges).
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Enclosed lattice sites, sorted.
    pub fn interior(&self) -> &[Site] {
        &self.interior
    }

    pub fn surrounds(&self, s: Site) -> bool {
        self.interior.binary_search(&s).is_ok()
    }

    /// `true` when every site enclosed by `other` is enclosed by `self`.
    pub fn contains_contour(&self, other: &Contour) -> bool {
        !other.interior.is_empty() && other.interior.iter().all(|s| self.surrounds(*s))
    }

    /// L-infinity diameter of the point set.
    pub fn diam(&self) -> u32 {
        let (mut x0, mut y0, mut x1, mut y1) = (i32::MAX, i32::MAX, i32::MIN, i32::MIN);
        for p in &self.points {
            x0 = x0.min(p.x);
            y0 = y0.min(p.y);
            x1 = x1.max(p.x);
            y1 = y1.max(p.y);
        }
        x0.abs_diff(x1).max(y0.abs_diff(y1))
    }

    /// Unit dual edges as unordered point pairs.
    pub fn edges(&self) -> Vec<(DualPoint, DualPoint)> {
        let n = self.points.len();
        (0..n)
            .map(|k| {
                let (a, b) = (self.points[k], self.points[(k + 1) % n]);
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect()
    }

    /// Lattice bonds crossed by the loop.
    pub fn crossed_bonds(&self) -> Vec<(Site, Site)> {
        self.edges().into_iter().map(|(a, b)| crossed_bond(a, b)).collect()
    }
}

/// The primal bond crossed by the dual edge `a - b` (with `a < b`).
pub(crate) fn crossed_bond(a: DualPoint, b: DualPoint) -> (Site, Site) {
    if a.x == b.x {
        // vertical dual edge at x + 1/2 crossing row b.y
        (Site::new(a.x, b.y), Site::new(a.x + 1, b.y))
    } else {
        // horizontal dual edge at y + 1/2 crossing column b.x
        (Site::new(b.x, a.y), Site::new(b.x, a.y + 1))
    }
}

/// Lexicographically smallest rotation, read in either direction.
fn canonical_rotation(points: Vec<DualPoint>) -> Vec<DualPoint> {
    let n = points.len();
    let min = *points.iter().min().unwrap();
    let mut best: Option<Vec<DualPoint>> = None;
    for start in (0..n).filter(|&k| points[k] == min) {
        let forward: Vec<DualPoint> = (0..n).map(|k| points[(start + k) % n]).collect();
        let backward: Vec<DualPoint> = (0..n).map(|k| points[(start + n - k) % n]).collect();
        for rot in [forward, backward] {
            if best.as_ref().map_or(true, |b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap()
}

/// Interior by horizontal ray casting: a site is inside when an odd number of
/// vertical dual edges lie to its right on its row.
fn interior_by_ray_casting(points: &[DualPoint]) -> Vec<Site> {
    let n = points.len();
    let mut rows: BTreeMap<i32, Vec<i32>> = BTreeMap::new();
    for k in 0..n {
        let (a, b) = (points[k], points[(k + 1) % n]);
        if a.x == b.x {
            let row = a.y.max(b.y);
            rows.entry(row).or_default().push(a.x);
        }
    }
    let mut out = Vec::new();
    for (y, mut xs) in rows {
        xs.sort_unstable();
        // consecutive pairs of crossings bound interior runs: sites x with xs[2k] < x <= xs[2k+1]
        for pair in xs.chunks(2) {
            if let [lo, hi] = *pair {
                for x in (lo + 1)..=hi {
                    out.push(Site::new(x, y));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Contours of a spin field. Requires exterior values (Plus, Minus or Fixed).
pub fn extract_contours(field: &SpinField) -> Result<Vec<Contour>> {
    if matches!(field.boundary(), super::Boundary::Free) {
        return Err(Error::ContoursWithoutExterior);
    }
    let minority = field.boundary().minority();
    extract_contours_on(field.rect(), minority, |s| field.spin_at(s))
}

/// Contour extraction on a rectangle with spins given by `spin_at` (interior
/// and ring). Only bonds with an endpoint in `rect` are used.
pub fn extract_contours_on(
    rect: Rect,
    minority: Spin,
    spin_at: impl Fn(Site) -> Result<Option<Spin>>,
) -> Result<Vec<Contour>> {
    let value = |s: Site| -> Result<Spin> {
        spin_at(s)?.ok_or(Error::ContoursWithoutExterior)
    };
    // oriented edges (from, to)
    let mut edges: Vec<(DualPoint, DualPoint)> = Vec::new();
    for s in rect.sites() {
        let v = value(s)?;
        for t in s.neighbors() {
            let counted = if rect.contains(t) { s < t } else { true };
            if !counted {
                continue;
            }
            let w = value(t)?;
            if v == w {
                continue;
            }
            let (a, b, va) = if s < t { (s, t, v) } else { (t, s, w) };
            let edge = if b.x == a.x + 1 {
                // horizontal bond, vertical dual edge; moving up keeps `a` on the left
                let (lo, hi) = (DualPoint::new(a.x, a.y - 1), DualPoint::new(a.x, a.y));
                if va == minority {
                    (lo, hi)
                } else {
                    (hi, lo)
                }
            } else {
                // vertical bond, horizontal dual edge; moving right keeps `b` on the left
                let (lo, hi) = (DualPoint::new(a.x - 1, a.y), DualPoint::new(a.x, a.y));
                if va.flip() == minority {
                    (lo, hi)
                } else {
                    (hi, lo)
                }
            };
            edges.push(edge);
        }
    }
    edges.sort();
    let mut out_edges: BTreeMap<DualPoint, Vec<usize>> = BTreeMap::new();
    let mut in_degree: BTreeMap<DualPoint, usize> = BTreeMap::new();
    for (k, (from, to)) in edges.iter().enumerate() {
        out_edges.entry(*from).or_default().push(k);
        *in_degree.entry(*to).or_default() += 1;
    }
    let verts: BTreeSet<DualPoint> = out_edges.keys().chain(in_degree.keys()).copied().collect();
    for v in &verts {
        let o = out_edges.get(v).map_or(0, |e| e.len());
        let i = in_degree.get(v).copied().unwrap_or(0);
        if o != i {
            return Err(Error::OpenContour);
        }
    }
    // successor pairing at each vertex
    let mut succ = vec![usize::MAX; edges.len()];
    let mut taken = vec![false; edges.len()];
    for (k, (from, to)) in edges.iter().enumerate() {
        let d = (to.x - from.x, to.y - from.y);
        let turns = [(-d.1, d.0), d, (d.1, -d.0)];
        let cands = &out_edges[to];
        let mut chosen = None;
        for turn in turns {
            if let Some(&e) = cands.iter().find(|&&e| {
                let (f, t) = edges[e];
                (t.x - f.x, t.y - f.y) == turn && !taken[e]
            }) {
                chosen = Some(e);
                break;
            }
        }
        let e = chosen.ok_or(Error::OpenContour)?;
        taken[e] = true;
        succ[k] = e;
    }
    let mut visited = vec![false; edges.len()];
    let mut contours = Vec::new();
    for start in 0..edges.len() {
        if visited[start] {
            continue;
        }
        let mut pts = Vec::new();
        let mut e = start;
        while !visited[e] {
            visited[e] = true;
            pts.push(edges[e].0);
            e = succ[e];
        }
        contours.push(Contour::from_points(pts)?);
    }
    contours.sort();
    Ok(contours)
}
