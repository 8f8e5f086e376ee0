//! Experiment drivers built on the samplers and kernels: the discontinuity
//! probe, contour statistics, entropy estimators and the quenched decay
//! pipeline for the telescoped potential.
//!
//! Every driver is split into independent legs (one window and boundary
//! condition, one field, one sample set) so that callers can run legs in
//! parallel and merge them in a fixed order.

mod contours;
mod entropy;
mod probe;
mod qcd;

use alloc::vec::Vec;

use crate::error::Result;
use crate::lattice::SpinField;
use crate::sampler::{run_chain_with, ChainConfig};

pub use contours::{contour_tail, origin_contour_diam, peierls_check, tail_fit, ContourTail, PeierlsRow, TailFit, TailRow};
pub use entropy::{ks_entropy, relative_entropy_density, EntropyEstimate, MAX_BLOCK};
pub use probe::{probe_discontinuity, probe_leg, ProbePattern, ProbeResult, ProbeWindow, GAP_THRESHOLD};
pub use qcd::{choose_site, nu_plus_proxy, qcd_field, qcd_on_image, qcd_pipeline, QcdConfig, QcdRow};

/// Mixes a base seed with leg labels (SplitMix64 finalizer on each step).
pub fn derive_seed(base: u64, labels: &[u64]) -> u64 {
    let mut z = base;
    for l in labels {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(*l);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

/// Configurations recorded by a Metropolis chain, one per epoch after burn-in.
pub fn collect_fields(cfg: &ChainConfig) -> Result<Vec<SpinField>> {
    let mut out = Vec::with_capacity(cfg.epochs());
    run_chain_with(cfg, |state| out.push(state.to_field()))?;
    Ok(out)
}
