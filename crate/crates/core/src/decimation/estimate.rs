use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::EvenConstraint;
use crate::error::{Error, Result};
use crate::lattice::{Boundary, Rect, Site, Spin};
use crate::math;
use crate::sampler::{run_chain, run_chain_with, ChainConfig, Estimate, FrozenMask, Observable};
use crate::spec_engine::IsingParams;

/// Largest image volume whose full table is estimated.
pub const IMAGE_CAP: usize = 4;

/// Seed and length of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingPlan {
    pub seed: u64,
    pub sweeps: usize,
    pub burn_in: usize,
    pub thin: usize,
}

impl SamplingPlan {
    pub fn new(seed: u64, sweeps: usize, burn_in: usize) -> Self {
        SamplingPlan {
            seed,
            sweeps,
            burn_in,
            thin: 1,
        }
    }

    fn config(&self, params: IsingParams, rect: Rect, boundary: Boundary, mask: FrozenMask) -> ChainConfig {
        ChainConfig {
            params,
            rect,
            boundary,
            mask,
            seed: self.seed,
            sweeps: self.sweeps,
            burn_in: self.burn_in,
            thin: self.thin,
        }
    }
}

/// The original-lattice box `[-W/2, W/2]^2` of a window of size `W`.
pub fn window_rect(window: u32) -> Rect {
    Rect::centered(window / 2)
}

/// Ring values: even ring sites from `even`, the rest `bc`.
fn ring(rect: Rect, bc: Spin, even: impl Fn(Site) -> Spin) -> Boundary {
    Boundary::Fixed(
        rect.ring()
            .into_iter()
            .map(|s| (s, if s.is_even() { even(s) } else { bc }))
            .collect(),
    )
}

/// Monte Carlo proxy for `μ_S^{±,ω}` with `S` the odd sites of the window:
/// even sites frozen to `ξ`, ring at `bc`.
pub fn constrained_measure_estimate(
    xi: &EvenConstraint,
    params: &IsingParams,
    bc: Spin,
    plan: &SamplingPlan,
    observables: &[Observable],
) -> Result<Vec<Estimate>> {
    let rect = xi.window();
    let mask: FrozenMask = xi.iter().collect();
    let cfg = plan.config(*params, rect, Boundary::uniform(bc), mask);
    run_chain(&cfg, observables)
}

/// Estimated table `γ^±_{Λ'}(· | ω')` over the configurations of an image
/// volume, with the window it was computed on.
#[derive(Debug, Clone, PartialEq)]
pub struct DecimatedTable {
    /// Image sites in lexicographic order; bit `k` of a row index is set when
    /// `sites[k]` is `+`.
    pub sites: Vec<Site>,
    pub probs: Vec<Estimate>,
    /// Wilson score intervals (95%) using the effective sample size implied
    /// by the batch-means error.
    pub wilson: Vec<(f64, f64)>,
    pub window: u32,
    pub bc: Spin,
}

impl DecimatedTable {
    /// Estimate of `P(σ'_{site} = +)` for a site of the table.
    pub fn plus_probability(&self, site: Site) -> Option<f64> {
        let k = self.sites.iter().position(|s| *s == site)?;
        Some(
            self.probs
                .iter()
                .enumerate()
                .filter(|(m, _)| m >> k & 1 == 1)
                .map(|(_, e)| e.mean)
                .sum(),
        )
    }
}

/// Samples the free system (odd sites of the window plus `2Λ'`) with the
/// other even sites frozen to `ω'` and odd ring sites at `bc`, and histograms
/// the spins on `2Λ'`.
pub fn decimated_kernel_estimate(
    image_sites: &[Site],
    omega: impl Fn(Site) -> Spin,
    params: &IsingParams,
    bc: Spin,
    window: u32,
    plan: &SamplingPlan,
) -> Result<DecimatedTable> {
    let mut sites = image_sites.to_vec();
    sites.sort();
    sites.dedup();
    if sites.len() > IMAGE_CAP {
        return Err(Error::ImageCap {
            size: sites.len(),
            cap: IMAGE_CAP,
        });
    }
    let rect = window_rect(window);
    let originals: Vec<Site> = sites.iter().map(|i| i.doubled()).collect();
    if let Some(s) = originals.iter().find(|s| !rect.contains(**s)) {
        return Err(Error::Precondition(format!("{s} lies outside window {window}")));
    }
    let image_value = |s: Site| omega(s.halved().expect("even site"));
    let mask: FrozenMask = rect
        .sites()
        .filter(|s| s.is_even() && !originals.contains(s))
        .map(|s| (s, image_value(s)))
        .collect();
    let boundary = ring(rect, bc, image_value);
    let cfg = plan.config(*params, rect, boundary, mask);
    let cells = 1usize << sites.len();
    let mut columns = vec![Vec::with_capacity(cfg.epochs()); cells];
    run_chain_with(&cfg, |state| {
        let idx = originals
            .iter()
            .enumerate()
            .fold(0, |acc, (k, s)| if state.spin(*s) == Spin::Plus { acc | 1 << k } else { acc });
        for (m, col) in columns.iter_mut().enumerate() {
            col.push(if m == idx { 1.0 } else { 0.0 });
        }
    })?;
    let probs = columns
        .iter()
        .map(|c| Estimate::batch_means(c, plan.seed))
        .collect::<Result<Vec<_>>>()?;
    let wilson = probs.iter().map(wilson_interval).collect();
    Ok(DecimatedTable {
        sites,
        probs,
        wilson,
        window,
        bc,
    })
}

fn wilson_interval(e: &Estimate) -> (f64, f64) {
    const Z: f64 = 1.959963984540054;
    let p = e.mean;
    let var = p * (1.0 - p);
    let n = if e.stderr > 0.0 && var > 0.0 {
        (var / (e.stderr * e.stderr)).min(e.n_samples as f64)
    } else {
        e.n_samples as f64
    };
    let denom = 1.0 + Z * Z / n;
    let center = (p + Z * Z / (2.0 * n)) / denom;
    let half = Z * math::sqrt(var / n + Z * Z / (4.0 * n * n)) / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::decimation::alternating;

    fn p(beta: f64) -> IsingParams {
        IsingParams::new(beta, 0.0).unwrap()
    }

    #[test]
    fn infinite_temperature_table_is_uniform() {
        let sites = [Site::ORIGIN, Site::new(1, 0)];
        let plan = SamplingPlan::new(4, 6000, 100);
        let t = decimated_kernel_estimate(&sites, alternating, &p(0.0), Spin::Plus, 8, &plan).unwrap();
        for e in &t.probs {
            assert!((e.mean - 0.25).abs() < 4.0 * e.stderr.max(1e-3), "{e:?}");
        }
        for (lo, hi) in &t.wilson {
            assert!(lo < hi);
        }
    }

    #[test]
    fn all_plus_image_is_plus() {
        let plan = SamplingPlan::new(5, 3000, 200);
        let t = decimated_kernel_estimate(&[Site::ORIGIN], |_| Spin::Plus, &p(1.0), Spin::Plus, 8, &plan).unwrap();
        assert!(t.plus_probability(Site::ORIGIN).unwrap() > 0.9);
    }

    #[test]
    fn image_cap() {
        let sites: Vec<Site> = (0..5).map(|x| Site::new(x, 0)).collect();
        let plan = SamplingPlan::new(5, 100, 10);
        assert!(matches!(
            decimated_kernel_estimate(&sites, |_| Spin::Plus, &p(1.0), Spin::Plus, 16, &plan),
            Err(Error::ImageCap { .. })
        ));
    }

    #[test]
    fn constrained_plus_acts_as_field() {
        let xi = EvenConstraint::uniform(Rect::centered(4), Spin::Plus);
        let plan = SamplingPlan::new(9, 2000, 100);
        let e = constrained_measure_estimate(&xi, &p(1.0), Spin::Plus, &plan, &[Observable::Spin(Site::new(1, 1))]).unwrap();
        assert!(e[0].mean > 0.9);
    }
}
