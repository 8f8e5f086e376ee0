use alloc::vec;
use alloc::vec::Vec;

use crate::decimation::{window_rect, SamplingPlan};
use crate::error::{Error, Result};
use crate::lattice::{telescope_set, Boundary, Site, Spin};
use crate::math;
use crate::sampler::{run_chain_with, ChainConfig, Estimate, FrozenMask, BATCHES};
use crate::spec_engine::IsingParams;

/// Whether every ratio entering a term was bounded away from zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermStatus {
    Determinate,
    /// Some denominator's two-sigma interval reached zero.
    Indeterminate,
}

/// Monte Carlo value of a telescoped term.
#[derive(Debug, Clone, PartialEq)]
pub struct TermEstimate {
    pub value: f64,
    pub stderr: f64,
    pub status: TermStatus,
    /// Per annulus site `j_r`: `(j_r, summand, stderr)`. Summands that vanish
    /// identically (`ω'_i = +` or `ω'_{j_r} = +`) are listed with zero error.
    pub summands: Vec<(Site, f64, f64)>,
    pub window: u32,
}

/// `Ψ^n_{L_{i,m}}(ω')` as the annulus sum
/// `-Σ_r ln E[A_i A_{j_r}] / (E[A_i] E[A_{j_r}])`, each expectation taken under
/// the constrained measure with the even sites of the window frozen to
/// `ω'` on `2Q_{i,m,r}` and `+` elsewhere, odd sites free and a `+` ring.
///
/// Here `A_k = exp(2β(Σ_{y∼2k} σ_y + h))` when `ω'_k = -`, the reweighting that
/// turns the frozen `-` at `2k` into a `+`. Since even sites are never
/// nearest neighbours, the joint reweighting of `2i` and `2j_r` is the product
/// `A_i A_{j_r}` for close and distant pairs alike.
///
/// The summand for `j_r` runs its own chain with seed
/// `plan.seed + r * 0x9E3779B97F4A7C15`; errors come from batch means
/// propagated by the delta method and add in quadrature across summands.
pub fn telescoped_term_mc(
    i: Site,
    m: u32,
    omega: impl Fn(Site) -> Spin,
    params: &IsingParams,
    window: u32,
    plan: &SamplingPlan,
) -> Result<TermEstimate> {
    if m == 0 {
        return Err(Error::InvalidParameter("the covariance form needs m >= 1".into()));
    }
    let rect = window_rect(window);
    let set = telescope_set(i, m);
    if let Some(k) = set.members.iter().find(|k| !rect.contains(k.doubled())) {
        return Err(Error::Precondition(alloc::format!(
            "L_(i,m) site {k} falls outside window {window}"
        )));
    }
    let mut q: Vec<Site> = set.inner();
    let mut summands = Vec::with_capacity(set.annulus.len());
    let mut value = 0.0;
    let mut var = 0.0;
    let mut status = TermStatus::Determinate;
    let wi = omega(i);
    for (r, &j) in set.annulus.iter().enumerate() {
        q.push(j);
        if wi == Spin::Plus || omega(j) == Spin::Plus {
            summands.push((j, 0.0, 0.0));
            continue;
        }
        let mask: FrozenMask = rect
            .sites()
            .filter(|s| s.is_even())
            .map(|s| {
                let k = s.halved().unwrap();
                (s, if q.contains(&k) { omega(k) } else { Spin::Plus })
            })
            .collect();
        let cfg = ChainConfig {
            params: *params,
            rect,
            boundary: Boundary::Plus,
            mask,
            seed: plan.seed.wrapping_add((r as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            sweeps: plan.sweeps,
            burn_in: plan.burn_in,
            thin: plan.thin,
        };
        let (si, sj) = (i.doubled(), j.doubled());
        let two_beta = 2.0 * params.beta;
        let mut series = [Vec::new(), Vec::new(), Vec::new()];
        run_chain_with(&cfg, |state| {
            let ai = math::exp(two_beta * (state.local_field(si) + params.h));
            let aj = math::exp(two_beta * (state.local_field(sj) + params.h));
            series[0].push(ai * aj);
            series[1].push(ai);
            series[2].push(aj);
        })?;
        let (s, e, determinate) = log_ratio_delta(&series, cfg.seed)?;
        if !determinate {
            status = TermStatus::Indeterminate;
        }
        summands.push((j, s, e));
        value += s;
        var += e * e;
    }
    Ok(TermEstimate {
        value,
        stderr: math::sqrt(var),
        status,
        summands,
        window,
    })
}

/// `-(ln a - ln b - ln c)` for the means of three series, with a delta-method
/// error from the batch means of the linearized combination.
fn log_ratio_delta(series: &[Vec<f64>; 3], seed: u64) -> Result<(f64, f64, bool)> {
    let est: Vec<Estimate> = series
        .iter()
        .map(|s| Estimate::batch_means(s, seed))
        .collect::<Result<_>>()?;
    let determinate = est.iter().all(|e| e.mean - 2.0 * e.stderr > 0.0);
    let (a, b, c) = (est[0].mean, est[1].mean, est[2].mean);
    let value = -(math::ln(a) - math::ln(b) - math::ln(c));
    let n = series[0].len();
    let size = n / BATCHES;
    let mut lin = vec![0.0; BATCHES];
    for (k, slot) in lin.iter_mut().enumerate() {
        let range = k * size..(k + 1) * size;
        let mean = |s: &Vec<f64>| s[range.clone()].iter().sum::<f64>() / size as f64;
        *slot = -mean(&series[0]) / a + mean(&series[1]) / b + mean(&series[2]) / c;
    }
    let lm = lin.iter().sum::<f64>() / BATCHES as f64;
    let v = lin.iter().map(|x| (x - lm) * (x - lm)).sum::<f64>() / ((BATCHES - 1) * BATCHES) as f64;
    Ok((value, math::sqrt(v), determinate))
}
