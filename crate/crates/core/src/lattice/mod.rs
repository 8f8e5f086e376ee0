//! Finite-box geometry on `Z^2`: sites, rectangles, spin fields with a
//! boundary descriptor, dual-lattice contours, the half-ball sets used by the
//! telescoped potential, and self-avoiding walks.

mod contour;
mod saw;
mod telescope;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

pub use contour::{extract_contours, extract_contours_on, Contour, DualPoint};
pub use saw::{enumerate_saw, for_each_saw, MAX_SAW_LEN};
pub use telescope::{telescope_index, telescope_set, TelescopeSet};

/// A lattice site. The derived order is the lexicographic order on `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Site {
    pub x: i32,
    pub y: i32,
}

impl Site {
    pub const ORIGIN: Site = Site { x: 0, y: 0 };

    pub const fn new(x: i32, y: i32) -> Self {
        Site { x, y }
    }

    /// The four nearest neighbours, in lexicographic order.
    pub fn neighbors(self) -> [Site; 4] {
        let Site { x, y } = self;
        [
            Site::new(x - 1, y),
            Site::new(x, y - 1),
            Site::new(x, y + 1),
            Site::new(x + 1, y),
        ]
    }

    pub fn l1(self, other: Site) -> u32 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }

    pub fn linf(self, other: Site) -> u32 {
        self.x.abs_diff(other.x).max(self.y.abs_diff(other.y))
    }

    /// Both coordinates even, i.e. the site belongs to `2Z^2`.
    pub fn is_even(self) -> bool {
        self.x % 2 == 0 && self.y % 2 == 0
    }

    /// Image-lattice site `i` to its original-lattice position `2i`.
    pub fn doubled(self) -> Site {
        Site::new(2 * self.x, 2 * self.y)
    }

    /// Inverse of [`Site::doubled`] for even sites.
    pub fn halved(self) -> Option<Site> {
        self.is_even().then(|| Site::new(self.x / 2, self.y / 2))
    }

    pub fn translate(self, t: Site) -> Site {
        Site::new(self.x + t.x, self.y + t.y)
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// An Ising spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(i8)]
pub enum Spin {
    Minus = -1,
    Plus = 1,
}

impl Spin {
    #[inline]
    pub fn value(self) -> i8 {
        self as i8
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self as i8 as f64
    }

    #[inline]
    pub fn flip(self) -> Spin {
        match self {
            Spin::Plus => Spin::Minus,
            Spin::Minus => Spin::Plus,
        }
    }

    #[inline]
    pub fn from_sign(v: i8) -> Spin {
        if v >= 0 {
            Spin::Plus
        } else {
            Spin::Minus
        }
    }

    #[inline]
    pub fn from_bit(bit: bool) -> Spin {
        if bit {
            Spin::Plus
        } else {
            Spin::Minus
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Spin::Plus => '+',
            Spin::Minus => '-',
        }
    }
}

/// An axis-parallel rectangle of sites, `[x0, x0+width) x [y0, y0+height)`.
/// Sites are indexed in lexicographic order (x major).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    pub x0: i32,
    pub y0: i32,
    pub width: usize,
    pub height: usize,
}

impl Rect {
    pub fn new(x0: i32, y0: i32, width: usize, height: usize) -> Self {
        Rect {
            x0,
            y0,
            width,
            height,
        }
    }

    /// The centered box `[-n, n]^2`.
    pub fn centered(half_width: u32) -> Self {
        let n = half_width as i32;
        let side = 2 * half_width as usize + 1;
        Rect::new(-n, -n, side, side)
    }

    /// Half-width when the rectangle is a centered square.
    pub fn half_width(&self) -> Option<u32> {
        let side = self.width;
        (self.width == self.height && side % 2 == 1 && self.x0 == -(side as i32 / 2) && self.y0 == self.x0)
            .then_some((side / 2) as u32)
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x1(&self) -> i32 {
        self.x0 + self.width as i32 - 1
    }

    pub fn y1(&self) -> i32 {
        self.y0 + self.height as i32 - 1
    }

    pub fn contains(&self, s: Site) -> bool {
        s.x >= self.x0 && s.y >= self.y0 && s.x <= self.x1() && s.y <= self.y1()
    }

    #[inline]
    pub fn index(&self, s: Site) -> Option<usize> {
        self.contains(s)
            .then(|| (s.x - self.x0) as usize * self.height + (s.y - self.y0) as usize)
    }

    #[inline]
    pub fn site(&self, idx: usize) -> Site {
        Site::new(
            self.x0 + (idx / self.height) as i32,
            self.y0 + (idx % self.height) as i32,
        )
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.len()).map(move |i| self.site(i))
    }

    /// Sites of the box with a neighbour outside it.
    pub fn is_on_edge(&self, s: Site) -> bool {
        self.contains(s) && (s.x == self.x0 || s.y == self.y0 || s.x == self.x1() || s.y == self.y1())
    }

    /// Exterior sites adjacent to the rectangle (the ring, without corners),
    /// in lexicographic order.
    pub fn ring(&self) -> Vec<Site> {
        let mut out = Vec::with_capacity(2 * (self.width + self.height));
        for y in self.y0..=self.y1() {
            out.push(Site::new(self.x0 - 1, y));
        }
        for x in self.x0..=self.x1() {
            out.push(Site::new(x, self.y0 - 1));
            out.push(Site::new(x, self.y1() + 1));
        }
        for y in self.y0..=self.y1() {
            out.push(Site::new(self.x1() + 1, y));
        }
        out.sort();
        out
    }

    pub fn grow(&self, by: u32) -> Rect {
        let b = by as i32;
        Rect::new(
            self.x0 - b,
            self.y0 - b,
            self.width + 2 * by as usize,
            self.height + 2 * by as usize,
        )
    }
}

/// Values prescribed outside a finite volume.
#[derive(Debug, Clone, PartialEq)]
pub enum Boundary {
    Plus,
    Minus,
    Free,
    /// Exterior values on the nearest-neighbour ring of the box.
    Fixed(BTreeMap<Site, Spin>),
}

impl Boundary {
    pub fn uniform(spin: Spin) -> Self {
        match spin {
            Spin::Plus => Boundary::Plus,
            Spin::Minus => Boundary::Minus,
        }
    }

    /// The phase whose islands are traced tightly by the contour corner rule.
    pub(crate) fn minority(&self) -> Spin {
        match self {
            Boundary::Minus => Spin::Plus,
            _ => Spin::Minus,
        }
    }

    pub fn flipped(&self) -> Boundary {
        match self {
            Boundary::Plus => Boundary::Minus,
            Boundary::Minus => Boundary::Plus,
            Boundary::Free => Boundary::Free,
            Boundary::Fixed(m) => Boundary::Fixed(m.iter().map(|(s, v)| (*s, v.flip())).collect()),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Boundary::Plus => "+",
            Boundary::Minus => "-",
            Boundary::Free => "free",
            Boundary::Fixed(_) => "fixed",
        }
    }
}

/// Spins prescribed outside a volume. `Ok(None)` means the bond is dropped
/// (free boundary); an absent value that should exist is an error.
pub trait Exterior {
    fn exterior(&self, site: Site) -> Result<Option<Spin>>;
}

impl Exterior for Boundary {
    fn exterior(&self, site: Site) -> Result<Option<Spin>> {
        match self {
            Boundary::Plus => Ok(Some(Spin::Plus)),
            Boundary::Minus => Ok(Some(Spin::Minus)),
            Boundary::Free => Ok(None),
            Boundary::Fixed(map) => map
                .get(&site)
                .copied()
                .map(Some)
                .ok_or(Error::MissingBoundary { x: site.x, y: site.y }),
        }
    }
}

impl Exterior for Spin {
    fn exterior(&self, _site: Site) -> Result<Option<Spin>> {
        Ok(Some(*self))
    }
}

/// Exterior given by a closure; `None` from the closure is a missing value.
pub struct FromFn<F>(pub F);

impl<F: Fn(Site) -> Option<Spin>> Exterior for FromFn<F> {
    fn exterior(&self, site: Site) -> Result<Option<Spin>> {
        (self.0)(site)
            .map(Some)
            .ok_or(Error::MissingBoundary { x: site.x, y: site.y })
    }
}

impl<E: Exterior + ?Sized> Exterior for &E {
    fn exterior(&self, site: Site) -> Result<Option<Spin>> {
        (**self).exterior(site)
    }
}

/// A +/-1 configuration on a rectangle together with its boundary condition.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinField {
    rect: Rect,
    values: Vec<Spin>,
    boundary: Boundary,
}

impl SpinField {
    pub fn new(rect: Rect, values: Vec<Spin>, boundary: Boundary) -> Result<Self> {
        if values.len() != rect.len() {
            return Err(Error::SizeMismatch(format!(
                "{} values for {} sites",
                values.len(),
                rect.len()
            )));
        }
        if let Boundary::Fixed(map) = &boundary {
            for s in rect.ring() {
                if !map.contains_key(&s) {
                    return Err(Error::MissingBoundary { x: s.x, y: s.y });
                }
            }
        }
        Ok(SpinField {
            rect,
            values,
            boundary,
        })
    }

    pub fn uniform(rect: Rect, spin: Spin, boundary: Boundary) -> Result<Self> {
        SpinField::new(rect, alloc::vec![spin; rect.len()], boundary)
    }

    pub fn from_fn(rect: Rect, boundary: Boundary, f: impl FnMut(Site) -> Spin) -> Result<Self> {
        let values = rect.sites().map(f).collect();
        SpinField::new(rect, values, boundary)
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn boundary(&self) -> &Boundary {
        &self.boundary
    }

    pub fn values(&self) -> &[Spin] {
        &self.values
    }

    pub fn get(&self, s: Site) -> Option<Spin> {
        self.rect.index(s).map(|i| self.values[i])
    }

    pub fn set(&mut self, s: Site, v: Spin) {
        if let Some(i) = self.rect.index(s) {
            self.values[i] = v;
        }
    }

    /// Interior value, or the boundary value for exterior sites.
    pub fn spin_at(&self, s: Site) -> Result<Option<Spin>> {
        match self.get(s) {
            Some(v) => Ok(Some(v)),
            None => self.boundary.exterior(s),
        }
    }

    /// Global spin flip, boundary included.
    pub fn flipped(&self) -> SpinField {
        SpinField {
            rect: self.rect,
            values: self.values.iter().map(|v| v.flip()).collect(),
            boundary: self.boundary.flipped(),
        }
    }

    /// Number of unequal nearest-neighbour pairs with at least one endpoint in
    /// the box (exterior values taken from the boundary).
    pub fn unequal_pairs(&self) -> Result<usize> {
        let mut count = 0;
        for s in self.rect.sites() {
            let v = self.values[self.rect.index(s).unwrap()];
            for t in s.neighbors() {
                if self.rect.contains(t) {
                    if s < t && self.get(t) != Some(v) {
                        count += 1;
                    }
                } else if let Some(w) = self.boundary.exterior(t)? {
                    if w != v {
                        count += 1;
                    }
                }
            }
        }
        Ok(count)
    }

    pub fn magnetization(&self) -> f64 {
        self.values.iter().map(|v| v.as_f64()).sum::<f64>() / self.values.len() as f64
    }
}
