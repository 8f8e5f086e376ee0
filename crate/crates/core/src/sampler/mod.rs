//! Monte Carlo engines: single-site Metropolis with frozen sites, Wolff
//! cluster updates, and a pair of independent chains used to measure
//! disagreement percolation. All randomness comes from ChaCha8 streams keyed
//! by the chain seed, so a run is a pure function of its configuration.

mod coupled;
mod estimate;
mod grid;
mod rng;
mod wolff;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{Boundary, Rect, Site, Spin};
use crate::spec_engine::IsingParams;

pub use coupled::{run_coupled, CoupledEstimates};
pub use estimate::{Estimate, BATCHES};
pub use grid::ChainState;
pub use rng::ChainRng;
pub use wolff::{run_wolff, wolff_series};

/// Sites held fixed during sampling, with their values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrozenMask {
    values: BTreeMap<Site, Spin>,
}

impl FrozenMask {
    pub fn empty() -> Self {
        FrozenMask::default()
    }

    pub fn insert(&mut self, site: Site, value: Spin) {
        self.values.insert(site, value);
    }

    pub fn get(&self, site: Site) -> Option<Spin> {
        self.values.get(&site).copied()
    }

    pub fn contains(&self, site: Site) -> bool {
        self.values.contains_key(&site)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Site, Spin)> + '_ {
        self.values.iter().map(|(s, v)| (*s, *v))
    }
}

impl FromIterator<(Site, Spin)> for FrozenMask {
    fn from_iter<I: IntoIterator<Item = (Site, Spin)>>(iter: I) -> Self {
        FrozenMask {
            values: iter.into_iter().collect(),
        }
    }
}

/// Everything that determines a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub params: IsingParams,
    pub rect: Rect,
    pub boundary: Boundary,
    pub mask: FrozenMask,
    pub seed: u64,
    pub sweeps: usize,
    pub burn_in: usize,
    pub thin: usize,
}

impl ChainConfig {
    /// A configuration with an empty mask, no burn-in and no thinning.
    pub fn new(params: IsingParams, rect: Rect, boundary: Boundary, seed: u64, sweeps: usize) -> Self {
        ChainConfig {
            params,
            rect,
            boundary,
            mask: FrozenMask::empty(),
            seed,
            sweeps,
            burn_in: 0,
            thin: 1,
        }
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn with_mask(mut self, mask: FrozenMask) -> Self {
        self.mask = mask;
        self
    }

    pub fn with_thin(mut self, thin: usize) -> Self {
        self.thin = thin;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.thin == 0 {
            return Err(Error::InvalidParameter("thin must be at least 1".into()));
        }
        if self.burn_in >= self.sweeps {
            return Err(Error::InvalidParameter(format!(
                "burn_in {} must be below sweeps {}",
                self.burn_in, self.sweeps
            )));
        }
        if let Some((s, _)) = self.mask.iter().find(|(s, _)| !self.rect.contains(*s)) {
            return Err(Error::InvalidParameter(format!("frozen site {s} outside the box")));
        }
        Ok(())
    }

    /// Number of recorded epochs.
    pub fn epochs(&self) -> usize {
        (self.sweeps - self.burn_in) / self.thin.max(1)
    }
}

/// Quantities recorded once per epoch.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    Spin(Site),
    /// Mean spin over the box.
    Magnetization,
    /// Product of the spins at the given sites.
    Product(Vec<Site>),
    /// Indicator that the sites carry exactly the given spins.
    Pattern(Vec<Site>, Vec<Spin>),
}

impl Observable {
    pub fn evaluate(&self, state: &ChainState) -> f64 {
        match self {
            Observable::Spin(s) => state.spin(*s).as_f64(),
            Observable::Magnetization => state.magnetization(),
            Observable::Product(sites) => sites.iter().map(|s| state.spin(*s).as_f64()).product(),
            Observable::Pattern(sites, spins) => {
                let hit = sites.iter().zip(spins).all(|(s, v)| state.spin(*s) == *v);
                if hit {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn label(&self) -> alloc::string::String {
        match self {
            Observable::Spin(s) => format!("spin{s}"),
            Observable::Magnetization => "magnetization".into(),
            Observable::Product(sites) => {
                let parts: Vec<_> = sites.iter().map(|s| format!("{s}")).collect();
                format!("product{}", parts.join(""))
            }
            Observable::Pattern(sites, spins) => {
                let parts: Vec<_> = sites
                    .iter()
                    .zip(spins)
                    .map(|(s, v)| format!("{s}{}", v.symbol()))
                    .collect();
                format!("pattern{}", parts.join(""))
            }
        }
    }
}

/// Per-epoch values of each recorded quantity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Series {
    pub columns: Vec<Vec<f64>>,
}

impl Series {
    pub fn estimates(&self, seed: u64) -> Result<Vec<Estimate>> {
        self.columns.iter().map(|c| Estimate::batch_means(c, seed)).collect()
    }
}

/// Runs Metropolis sweeps and calls `record` once per epoch after burn-in.
/// The callback sees the full chain state. Returns the final state.
pub fn run_chain_with(
    cfg: &ChainConfig,
    mut record: impl FnMut(&ChainState),
) -> Result<ChainState> {
    cfg.validate()?;
    let mut state = ChainState::new(cfg)?;
    let mut rng = ChainRng::new(cfg.seed, 0);
    for sweep in 0..cfg.sweeps {
        state.metropolis_sweep(&mut rng);
        if sweep >= cfg.burn_in && (sweep - cfg.burn_in + 1) % cfg.thin == 0 {
            record(&state);
        }
    }
    Ok(state)
}

/// Per-epoch observable values from a Metropolis chain.
pub fn sample_series(cfg: &ChainConfig, observables: &[Observable]) -> Result<Series> {
    let mut columns = vec![Vec::with_capacity(cfg.epochs()); observables.len()];
    run_chain_with(cfg, |state| {
        for (col, obs) in columns.iter_mut().zip(observables) {
            col.push(obs.evaluate(state));
        }
    })?;
    Ok(Series { columns })
}

/// Batch-means estimates of each observable under a Metropolis chain.
pub fn run_chain(cfg: &ChainConfig, observables: &[Observable]) -> Result<Vec<Estimate>> {
    sample_series(cfg, observables)?.estimates(cfg.seed)
}
