use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{extract_contours, Boundary, Contour, Rect, Site, SpinField};
use crate::math;
use crate::spec_engine::{kernel_exact, mask_config, IsingParams, Volume};

/// Fewest samples accepted by [`contour_tail`].
const MIN_SAMPLES: usize = 100;

/// Diameter of the outermost contour surrounding the origin, 0 if none does.
pub fn origin_contour_diam(field: &SpinField) -> Result<u32> {
    let contours = extract_contours(field)?;
    Ok(contours
        .iter()
        .filter(|c| c.surrounds(Site::ORIGIN))
        .max_by_key(|c| c.interior().len())
        .map_or(0, Contour::diam))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailRow {
    pub l: u32,
    /// Samples with `diam(Θ₀) > l`.
    pub exceed: usize,
    pub freq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourTail {
    pub samples: usize,
    pub rows: Vec<TailRow>,
}

/// Empirical `P[diam(Θ₀) > L]` for `L = 0..=l_max`.
pub fn contour_tail(fields: &[SpinField], l_max: u32) -> Result<ContourTail> {
    if fields.len() < MIN_SAMPLES {
        return Err(Error::Precondition(format!(
            "contour tail needs at least {MIN_SAMPLES} samples, got {}",
            fields.len()
        )));
    }
    let diams = fields.iter().map(origin_contour_diam).collect::<Result<Vec<u32>>>()?;
    let n = diams.len();
    let rows = (0..=l_max)
        .map(|l| {
            let exceed = diams.iter().filter(|d| **d > l).count();
            TailRow {
                l,
                exceed,
                freq: exceed as f64 / n as f64,
            }
        })
        .collect();
    Ok(ContourTail { samples: n, rows })
}

/// `ln P[diam > L] ≈ a − c β L` fitted over `L > l0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit {
    pub c: f64,
    pub c_stderr: f64,
    pub intercept: f64,
    pub used: usize,
}

/// Weighted least squares of `ln freq` on `L` for rows with `L > l0` and a
/// positive count, weights equal to the counts (inverse variance of the log
/// of a Poisson count). Refused at `β = 0`, where `c` is not identifiable.
pub fn tail_fit(tail: &ContourTail, beta: f64, l0: u32) -> Result<TailFit> {
    if !(beta > 0.0) {
        return Err(Error::FitRefused("the decay rate c·β cannot be split at β = 0".into()));
    }
    let pts: Vec<(f64, f64, f64)> = tail
        .rows
        .iter()
        .filter(|r| r.l > l0 && r.exceed > 0)
        .map(|r| (r.l as f64, math::ln(r.freq), r.exceed as f64))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientPoints { have: pts.len(), need: 2 });
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mx = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let slope_se = math::sqrt(1.0 / sxx);
    Ok(TailFit {
        c: -slope / beta,
        c_stderr: slope_se / beta,
        intercept: my - slope * mx,
        used: pts.len(),
    })
}

/// Exact probability of a contour together with its Peierls bound.
#[derive(Debug, Clone, PartialEq)]
pub struct PeierlsRow {
    pub contour: Contour,
    pub prob: f64,
    pub bound: f64,
}

impl PeierlsRow {
    pub fn holds(&self) -> bool {
        self.prob <= self.bound
    }
}

/// Enumerates every configuration of `rect` under a plus boundary and sums
/// the exact probabilities of the configurations containing each contour.
/// Rows come sorted by contour.
pub fn peierls_check(rect: Rect, params: &IsingParams) -> Result<Vec<PeierlsRow>> {
    let volume = Volume::from(rect);
    let table = kernel_exact(&volume, &Boundary::Plus, params)?;
    let mut probs: BTreeMap<Contour, f64> = BTreeMap::new();
    for mask in 0..table.len() {
        let field = SpinField::new(rect, mask_config(mask, volume.len()), Boundary::Plus)?;
        let p = table.prob(mask);
        for c in extract_contours(&field)? {
            *probs.entry(c).or_insert(0.0) += p;
        }
    }
    Ok(probs
        .into_iter()
        .map(|(contour, prob)| {
            let bound = math::exp(-2.0 * params.beta * contour.len() as f64);
            PeierlsRow { contour, prob, bound }
        })
        .collect())
}
