//! The decimation map onto the even sublattice and the constrained and
//! decimated kernels built from it.
//!
//! Image-lattice sites `i` sit at original positions `2i`. A window of
//! size `W` is the original box `[-W/2, W/2]^2`; its even sites carry the
//! image configuration and every other site outside the window carries the
//! far boundary condition.

mod estimate;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{Boundary, Exterior, Rect, Site, Spin, SpinField};
use crate::spec_engine::{kernel_exact, IsingParams, KernelTable, Volume};

pub use estimate::{
    constrained_measure_estimate, decimated_kernel_estimate, window_rect, DecimatedTable, SamplingPlan,
};

/// `ω'_i = ω_{2i}` on the image box `Λ_n` of a field on `Λ_{2n}`.
pub fn decimate(field: &SpinField) -> Result<SpinField> {
    let n2 = field
        .rect()
        .half_width()
        .ok_or_else(|| Error::SizeMismatch("decimation needs a centered square box".into()))?;
    if n2 % 2 != 0 {
        return Err(Error::SizeMismatch(format!("half-width {n2} is odd")));
    }
    let boundary = match field.boundary() {
        Boundary::Fixed(_) => {
            return Err(Error::SizeMismatch(
                "a fixed ring does not reach the image ring".into(),
            ))
        }
        b => b.clone(),
    };
    SpinField::from_fn(Rect::centered(n2 / 2), boundary, |i| {
        field.get(i.doubled()).expect("image site inside source box")
    })
}

/// Places an image field on the even sites of the doubled box, filling the
/// remaining sites with `fill`.
pub fn embed(image: &SpinField, fill: Spin) -> Result<SpinField> {
    let n = image
        .rect()
        .half_width()
        .ok_or_else(|| Error::SizeMismatch("embedding needs a centered square box".into()))?;
    let boundary = match image.boundary() {
        Boundary::Fixed(_) => return Err(Error::SizeMismatch("cannot embed a fixed ring".into())),
        b => b.clone(),
    };
    SpinField::from_fn(Rect::centered(2 * n), boundary, |s| match s.halved() {
        Some(i) => image.get(i).unwrap(),
        None => fill,
    })
}

/// Values `ξ` on the even sites of a window (original coordinates).
#[derive(Debug, Clone, PartialEq)]
pub struct EvenConstraint {
    window: Rect,
    values: BTreeMap<Site, Spin>,
}

impl EvenConstraint {
    /// `ξ_{2i} = f(i)` for every even site `2i` of the window.
    pub fn from_image(window: Rect, f: impl Fn(Site) -> Spin) -> Self {
        let values = window
            .sites()
            .filter(|s| s.is_even())
            .map(|s| (s, f(s.halved().unwrap())))
            .collect();
        EvenConstraint { window, values }
    }

    pub fn uniform(window: Rect, v: Spin) -> Self {
        EvenConstraint::from_image(window, |_| v)
    }

    /// `ξ_{2i} = (-1)^{i_1 + i_2}`.
    pub fn alternating(window: Rect) -> Self {
        EvenConstraint::from_image(window, alternating)
    }

    pub fn window(&self) -> Rect {
        self.window
    }

    pub fn get(&self, s: Site) -> Option<Spin> {
        self.values.get(&s).copied()
    }

    pub fn set(&mut self, s: Site, v: Spin) -> Result<()> {
        match self.values.get_mut(&s) {
            Some(slot) => {
                *slot = v;
                Ok(())
            }
            None => Err(Error::Precondition(format!("{s} is not an even site of the window"))),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Site, Spin)> + '_ {
        self.values.iter().map(|(s, v)| (*s, *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// The alternating image configuration `(-1)^{i_1 + i_2}`.
pub fn alternating(i: Site) -> Spin {
    if (i.x + i.y).rem_euclid(2) == 0 {
        Spin::Plus
    } else {
        Spin::Minus
    }
}

/// `D(ξ)`: even sites where the constraint is `-1`, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsenessSet {
    pub sites: Vec<Site>,
}

impl SparsenessSet {
    pub fn contains(&self, s: Site) -> bool {
        self.sites.binary_search(&s).is_ok()
    }
}

pub fn sparseness(xi: &EvenConstraint) -> SparsenessSet {
    SparsenessSet {
        sites: xi.iter().filter(|(_, v)| *v == Spin::Minus).map(|(s, _)| s).collect(),
    }
}

/// Exterior of a constrained kernel: sites of `S` read `η`, all others `ω`.
struct Split<'a, P, E1, E2> {
    in_s: &'a P,
    eta: &'a E1,
    omega: &'a E2,
}

impl<P: Fn(Site) -> bool, E1: Exterior, E2: Exterior> Exterior for Split<'_, P, E1, E2> {
    fn exterior(&self, site: Site) -> Result<Option<Spin>> {
        if (self.in_s)(site) {
            self.eta.exterior(site)
        } else {
            self.omega.exterior(site)
        }
    }
}

/// `γ^{S,ω}_Δ(· | η) = γ_Δ(· | η_S ω_{S^c})` as an exact table over the free
/// sites `Δ ∩ S`; sites of `Δ \ S` are frozen at `ω`.
pub fn constrained_kernel(
    delta: &Volume,
    in_s: impl Fn(Site) -> bool,
    eta: &impl Exterior,
    omega: &impl Exterior,
    params: &IsingParams,
) -> Result<KernelTable> {
    let free = Volume::new(delta.sites().iter().copied().filter(|s| in_s(*s)).collect());
    let ext = Split {
        in_s: &in_s,
        eta,
        omega,
    };
    kernel_exact(&free, &ext, params)
}

/// Compares the finite-volume approximations `γ_{Δ∩S}(f | +_S ω_{S^c})` of the
/// global kernel on two nested windows: returns whether the larger window
/// gives the smaller expectation (up to `1e-12`), as monotone convergence
/// from above requires for increasing `f`.
///
/// `f` is a table over the configurations of `support` (bit `k` set when
/// `support[k]` is `+`), which must be increasing and lie in `Δ₁ ∩ S`.
pub fn global_kernel_monotonicity(
    in_s: impl Fn(Site) -> bool,
    omega: &impl Exterior,
    params: &IsingParams,
    support: &[Site],
    f: &[f64],
    inner: &Volume,
    outer: &Volume,
) -> Result<bool> {
    if !inner.is_subset_of(outer) {
        return Err(Error::Precondition("windows are not nested".into()));
    }
    if f.len() != 1 << support.len() {
        return Err(Error::SizeMismatch(format!("table of {} for {} sites", f.len(), support.len())));
    }
    for m in 0..f.len() {
        for k in 0..support.len() {
            if m >> k & 1 == 0 && f[m] > f[m | 1 << k] {
                return Err(Error::NotIncreasing);
            }
        }
    }
    let expect = |window: &Volume| -> Result<f64> {
        let table = constrained_kernel(window, &in_s, &Spin::Plus, omega, params)?;
        let pos: Vec<usize> = support
            .iter()
            .map(|s| {
                table
                    .sites()
                    .iter()
                    .position(|t| t == s)
                    .ok_or_else(|| Error::Precondition(format!("{s} is not a free site of the window")))
            })
            .collect::<Result<_>>()?;
        Ok(table.expectation(|m| {
            let key = pos.iter().enumerate().fold(0, |acc, (k, &p)| acc | ((m >> p & 1) << k));
            f[key]
        }))
    };
    Ok(expect(outer)? <= expect(inner)? + 1e-12)
}
