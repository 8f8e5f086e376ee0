use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::error::{Error, Result};
use crate::lattice::{Boundary, Rect, Site, Spin};
use crate::spec_engine::{hamiltonian, transfer_log_partition, IsingParams, Volume};

/// Kernels `γ_B(· | +)` as far as the vacuum potential needs them.
pub trait KernelSource {
    /// `ln γ_B(σ | +) / γ_B(+ | +)` for `σ` on `B` (lexicographic order).
    fn log_vacuum_ratio(&self, volume: &Volume, sigma: &[Spin]) -> Result<f64>;
}

impl<S: KernelSource + ?Sized> KernelSource for &S {
    fn log_vacuum_ratio(&self, volume: &Volume, sigma: &[Spin]) -> Result<f64> {
        (**self).log_vacuum_ratio(volume, sigma)
    }
}

/// The nearest-neighbour Ising specification, where the ratio is
/// `-β [H_B(σ | +) - H_B(+ | +)]`.
#[derive(Debug, Clone, Copy)]
pub struct IsingSource {
    pub params: IsingParams,
}

impl KernelSource for IsingSource {
    fn log_vacuum_ratio(&self, volume: &Volume, sigma: &[Spin]) -> Result<f64> {
        let plus = alloc::vec![Spin::Plus; volume.len()];
        let h = hamiltonian(volume, sigma, &Boundary::Plus, &self.params)?;
        let h0 = hamiltonian(volume, &plus, &Boundary::Plus, &self.params)?;
        Ok(-self.params.beta * (h - h0))
    }
}

/// The decimated kernels `γ⁺_B(· | +)` computed exactly on a finite window:
/// the image volume `B` sits at `2B`, every other even site of the window is
/// frozen at `+`, the ring is `+`, and the odd sites are summed over by the
/// transfer matrix.
#[derive(Debug, Clone, Copy)]
pub struct DecimatedExactSource {
    pub params: IsingParams,
    /// Original-lattice window.
    pub window: Rect,
}

impl DecimatedExactSource {
    fn log_z(&self, frozen: &BTreeMap<Site, Spin>) -> Result<f64> {
        transfer_log_partition(
            self.window,
            &Boundary::Plus,
            |s| {
                if s.is_even() {
                    Some(frozen.get(&s).copied().unwrap_or(Spin::Plus))
                } else {
                    None
                }
            },
            &self.params,
        )
    }
}

impl KernelSource for DecimatedExactSource {
    fn log_vacuum_ratio(&self, volume: &Volume, sigma: &[Spin]) -> Result<f64> {
        if sigma.len() != volume.len() {
            return Err(Error::SizeMismatch(format!("{} spins for {} sites", sigma.len(), volume.len())));
        }
        let mut frozen = BTreeMap::new();
        for (i, v) in volume.sites().iter().zip(sigma) {
            let s = i.doubled();
            if !self.window.contains(s) {
                return Err(Error::Precondition(format!("image site {i} outside the window")));
            }
            if *v == Spin::Minus {
                frozen.insert(s, Spin::Minus);
            }
        }
        if frozen.is_empty() {
            return Ok(0.0);
        }
        Ok(self.log_z(&frozen)? - self.log_z(&BTreeMap::new())?)
    }
}

/// Caches ratios by `(volume, configuration)`.
pub struct MemoSource<S> {
    inner: S,
    memo: RefCell<BTreeMap<(Vec<Site>, Vec<Spin>), f64>>,
}

impl<S: KernelSource> MemoSource<S> {
    pub fn new(inner: S) -> Self {
        MemoSource {
            inner,
            memo: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn cached(&self) -> usize {
        self.memo.borrow().len()
    }
}

impl<S: KernelSource> KernelSource for MemoSource<S> {
    fn log_vacuum_ratio(&self, volume: &Volume, sigma: &[Spin]) -> Result<f64> {
        let key = (volume.sites().to_vec(), sigma.to_vec());
        if let Some(v) = self.memo.borrow().get(&key) {
            return Ok(*v);
        }
        let v = self.inner.log_vacuum_ratio(volume, sigma)?;
        self.memo.borrow_mut().insert(key, v);
        Ok(v)
    }
}
