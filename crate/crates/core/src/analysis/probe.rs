use alloc::vec::Vec;

use crate::decimation::{alternating, decimated_kernel_estimate, SamplingPlan};
use crate::error::{Error, Result};
use crate::lattice::{Site, Spin};
use crate::sampler::Estimate;
use crate::spec_engine::IsingParams;

use super::derive_seed;

/// Number of combined standard errors a gap must exceed to count.
pub const GAP_THRESHOLD: f64 = 5.0;

/// Image configuration outside the origin.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbePattern {
    Alternating,
    AllPlus,
    /// Listed image sites, `fill` everywhere else.
    Custom { sites: Vec<(Site, Spin)>, fill: Spin },
}

impl ProbePattern {
    pub fn value(&self, i: Site) -> Spin {
        match self {
            ProbePattern::Alternating => alternating(i),
            ProbePattern::AllPlus => Spin::Plus,
            ProbePattern::Custom { sites, fill } => {
                sites.iter().find(|(s, _)| *s == i).map_or(*fill, |(_, v)| *v)
            }
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            ProbePattern::Alternating => "alternating",
            ProbePattern::AllPlus => "all-plus",
            ProbePattern::Custom { .. } => "custom",
        }
    }
}

/// `P(σ'_0 = +)` under both far boundary conditions at one window.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeWindow {
    pub window: u32,
    pub plus: Estimate,
    pub minus: Estimate,
}

impl ProbeWindow {
    pub fn gap(&self) -> f64 {
        self.plus.mean - self.minus.mean
    }

    pub fn combined_stderr(&self) -> f64 {
        self.plus.combined_stderr(&self.minus)
    }

    /// Gap in units of the combined standard error.
    pub fn z(&self) -> f64 {
        self.plus.z_gap(&self.minus)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub pattern: ProbePattern,
    pub beta: f64,
    pub windows: Vec<ProbeWindow>,
}

impl ProbeResult {
    /// `true` when every window shows a gap beyond `threshold` combined errors.
    pub fn significant_everywhere(&self, threshold: f64) -> bool {
        self.windows.iter().all(|w| w.gap() > threshold * w.combined_stderr())
    }

    /// `true` when the gap at the largest window is below `threshold` combined
    /// errors or smaller than at the first window.
    pub fn vanishing(&self, threshold: f64) -> bool {
        match (self.windows.first(), self.windows.last()) {
            (Some(first), Some(last)) => {
                last.gap().abs() < threshold * last.combined_stderr() || last.gap().abs() < first.gap().abs()
            }
            _ => false,
        }
    }
}

/// One leg of the probe: `P(σ'_0 = +)` given the pattern off the origin, at
/// one window and far boundary condition. The chain seed is derived from
/// `plan.seed`, the window and the boundary condition.
pub fn probe_leg(
    params: &IsingParams,
    pattern: &ProbePattern,
    window: u32,
    bc: Spin,
    plan: &SamplingPlan,
) -> Result<Estimate> {
    let leg = SamplingPlan {
        seed: derive_seed(plan.seed, &[window as u64, (bc == Spin::Plus) as u64]),
        ..*plan
    };
    let table = decimated_kernel_estimate(&[Site::ORIGIN], |i| pattern.value(i), params, bc, window, &leg)?;
    Ok(table.probs[1])
}

/// Runs [`probe_leg`] for both boundary conditions at every window.
pub fn probe_discontinuity(
    params: &IsingParams,
    pattern: &ProbePattern,
    windows: &[u32],
    plan: &SamplingPlan,
) -> Result<ProbeResult> {
    if windows.is_empty() {
        return Err(Error::InvalidParameter("no windows given".into()));
    }
    let windows = windows
        .iter()
        .map(|&w| {
            Ok(ProbeWindow {
                window: w,
                plus: probe_leg(params, pattern, w, Spin::Plus, plan)?,
                minus: probe_leg(params, pattern, w, Spin::Minus, plan)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeResult {
        pattern: pattern.clone(),
        beta: params.beta,
        windows,
    })
}
