use alloc::format;
use alloc::vec::Vec;

use crate::amoeba::{quenched_length, LengthValue, QuenchedLength, SetFamily};
use crate::decimation::{decimate, window_rect, EvenConstraint, SamplingPlan};
use crate::error::{Error, Result};
use crate::lattice::{telescope_set, Boundary, Rect, Site, Spin, SpinField};
use crate::potential::{qcd_fit, telescoped_term_mc, QcdFit, QcdPoint, TermEstimate};
use crate::sampler::{run_chain_with, ChainConfig};
use crate::spec_engine::IsingParams;

use super::derive_seed;

/// Parameters of the quenched-decay experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct QcdConfig {
    pub params: IsingParams,
    pub fields: usize,
    pub mmax: u32,
    pub lambda: f64,
    pub family: SetFamily,
    /// Image half-width `n` of each sampled field; the chain runs on `[-2n, 2n]^2`.
    pub proxy_half_width: u32,
    pub proxy_sweeps: usize,
    /// Window of the constrained chains behind each telescoped term.
    pub term_window: u32,
    pub term_sweeps: usize,
    pub term_burn_in: usize,
    pub seed: u64,
}

/// Evidence for one sampled field.
#[derive(Debug, Clone, PartialEq)]
pub struct QcdRow {
    pub field: usize,
    pub proxy_seed: u64,
    pub site: Site,
    /// Image sites of the field carrying `-`.
    pub minus_sites: usize,
    pub length: QuenchedLength,
    pub terms: Vec<(u32, TermEstimate)>,
    pub fit: Result<QcdFit>,
}

/// A configuration of the plus-boundary chain on `[-2n, 2n]^2` after `sweeps`
/// sweeps, decimated onto `[-n, n]^2`.
pub fn nu_plus_proxy(params: &IsingParams, half_width: u32, sweeps: usize, seed: u64) -> Result<SpinField> {
    if sweeps == 0 {
        return Err(Error::InvalidParameter("the proxy chain needs at least one sweep".into()));
    }
    let rect = Rect::centered(2 * half_width);
    let cfg = ChainConfig::new(*params, rect, Boundary::Plus, seed, sweeps).with_burn_in(sweeps - 1);
    let state = run_chain_with(&cfg, |_| {})?;
    decimate(&state.to_field())
}

/// The image site closest to the origin (L1, then lexicographic) carrying
/// `-` and whose `L_{i,mmax}` fits in the term window; the origin if none.
/// Terms at `+` sites vanish identically, so a `-` site carries the signal.
pub fn choose_site(image: &SpinField, mmax: u32, term_window: u32) -> Site {
    let rect = window_rect(term_window);
    let mut candidates: Vec<Site> = image
        .rect()
        .sites()
        .filter(|i| image.get(*i) == Some(Spin::Minus))
        .filter(|i| telescope_set(*i, mmax).members.iter().all(|k| rect.contains(k.doubled())))
        .collect();
    candidates.sort_by_key(|i| (i.l1(Site::ORIGIN), *i));
    candidates.first().copied().unwrap_or(Site::ORIGIN)
}

/// One field of the pipeline: sample, locate the site, measure its quenched
/// length and the telescoped terms `m = 1..=mmax`, fit the decay beyond the
/// quenched length.
pub fn qcd_field(cfg: &QcdConfig, field: usize) -> Result<QcdRow> {
    let proxy_seed = derive_seed(cfg.seed, &[field as u64, 0]);
    let image = nu_plus_proxy(&cfg.params, cfg.proxy_half_width, cfg.proxy_sweeps, proxy_seed)?;
    qcd_on_image(cfg, field, proxy_seed, &image)
}

/// The measurement half of [`qcd_field`] on a given image configuration
/// (`+` outside its box).
pub fn qcd_on_image(cfg: &QcdConfig, field: usize, proxy_seed: u64, image: &SpinField) -> Result<QcdRow> {
    let omega = |i: Site| image.get(i).unwrap_or(Spin::Plus);
    let site = choose_site(image, cfg.mmax, cfg.term_window);
    let window = Rect::centered(2 * image.rect().half_width().unwrap_or(0));
    let xi = EvenConstraint::from_image(window, omega);
    let length = quenched_length(&xi, site, cfg.lambda, cfg.family)?;
    let mut terms = Vec::with_capacity(cfg.mmax as usize);
    for m in 1..=cfg.mmax {
        let plan = SamplingPlan::new(derive_seed(cfg.seed, &[field as u64, 1, m as u64]), cfg.term_sweeps, cfg.term_burn_in);
        terms.push((m, telescoped_term_mc(site, m, omega, &cfg.params, cfg.term_window, &plan)?));
    }
    let points: Vec<QcdPoint> = terms
        .iter()
        .map(|(m, t)| QcdPoint {
            m: *m,
            value: t.value,
            stderr: t.stderr,
        })
        .collect();
    let fit = match length.value {
        LengthValue::Finite(l) => qcd_fit(&points, l),
        LengthValue::InfiniteWithinWindow => Err(Error::FitRefused(format!(
            "quenched length at {site} is infinite within the window"
        ))),
    };
    Ok(QcdRow {
        field,
        proxy_seed,
        site,
        minus_sites: image.values().iter().filter(|s| **s == Spin::Minus).count(),
        length,
        terms,
        fit,
    })
}

/// Runs [`qcd_field`] for every field in order.
pub fn qcd_pipeline(cfg: &QcdConfig) -> Result<Vec<QcdRow>> {
    (0..cfg.fields).map(|f| qcd_field(cfg, f)).collect()
}
