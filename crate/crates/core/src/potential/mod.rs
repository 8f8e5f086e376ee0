//! Potentials recovered from specification kernels: Möbius inversion of set
//! functions, the vacuum potential with vacuum state `+`, the telescoped
//! potential on the half-balls `L_{i,m}`, its Monte Carlo covariance form, and
//! the decay fit of the telescoped terms.

mod fit;
mod mc;
mod source;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{telescope_set, Site, Spin};
use crate::spec_engine::Volume;

pub use fit::{qcd_fit, QcdFit, QcdPoint};
pub use mc::{telescoped_term_mc, TermEstimate, TermStatus};
pub use source::{DecimatedExactSource, IsingSource, KernelSource, MemoSource};

/// Largest ground set accepted by Möbius inversion.
pub const MOEBIUS_CAP: usize = 20;
/// Largest set on which a vacuum-potential term is evaluated.
pub const VACUUM_CAP: usize = 12;

/// A real function on a family of finite site sets (each kept sorted).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SetFunction {
    values: BTreeMap<Vec<Site>, f64>,
}

impl SetFunction {
    pub fn new() -> Self {
        SetFunction::default()
    }

    /// The function `B ↦ f(B)` on every subset of `ground`.
    pub fn on_subsets(ground: &[Site], f: impl Fn(&[Site]) -> f64) -> Result<Self> {
        let ground = sorted(ground);
        if ground.len() > MOEBIUS_CAP {
            return Err(Error::EnumerationCap {
                sites: ground.len(),
                cap: MOEBIUS_CAP,
            });
        }
        let mut out = SetFunction::new();
        for mask in 0..1usize << ground.len() {
            let b = subset(&ground, mask);
            let v = f(&b);
            out.values.insert(b, v);
        }
        Ok(out)
    }

    pub fn insert(&mut self, set: &[Site], value: f64) {
        self.values.insert(sorted(set), value);
    }

    pub fn get(&self, set: &[Site]) -> Option<f64> {
        self.values.get(&sorted(set)).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[Site], f64)> + '_ {
        self.values.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    fn check_domain(&self) -> Result<()> {
        match self.values.get(&Vec::new()) {
            Some(v) if *v == 0.0 => {}
            Some(_) => return Err(Error::Precondition("value on the empty set must be 0".into())),
            None => return Err(Error::NotSubsetClosed),
        }
        for set in self.values.keys() {
            if set.len() > MOEBIUS_CAP {
                return Err(Error::EnumerationCap {
                    sites: set.len(),
                    cap: MOEBIUS_CAP,
                });
            }
            // closure under removing one element implies closure under subsets
            for k in 0..set.len() {
                let mut smaller = set.clone();
                smaller.remove(k);
                if !self.values.contains_key(&smaller) {
                    return Err(Error::NotSubsetClosed);
                }
            }
        }
        Ok(())
    }
}

fn sorted(set: &[Site]) -> Vec<Site> {
    let mut v = set.to_vec();
    v.sort();
    v.dedup();
    v
}

fn subset(ground: &[Site], mask: usize) -> Vec<Site> {
    ground
        .iter()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(_, s)| *s)
        .collect()
}

/// `Φ_A = Σ_{B ⊂ A} (-1)^{|A \ B|} H_B` for every `A` in the domain of `H`,
/// which must be closed under taking subsets and vanish on `∅`.
pub fn moebius_invert(h: &SetFunction) -> Result<SetFunction> {
    h.check_domain()?;
    transform(h, true)
}

/// `H_A = Σ_{B ⊂ A} Φ_B`, the inverse of [`moebius_invert`].
pub fn moebius_sum(phi: &SetFunction) -> Result<SetFunction> {
    phi.check_domain()?;
    transform(phi, false)
}

fn transform(f: &SetFunction, alternate: bool) -> Result<SetFunction> {
    let mut out = SetFunction::new();
    for set in f.values.keys() {
        let n = set.len();
        // subset-lattice transform restricted to the subsets of `set`
        let mut table: Vec<f64> = (0..1usize << n).map(|m| f.values[&subset(set, m)]).collect();
        for k in 0..n {
            for m in 0..table.len() {
                if m >> k & 1 == 1 {
                    let lower = table[m ^ (1 << k)];
                    if alternate {
                        table[m] -= lower;
                    } else {
                        table[m] += lower;
                    }
                }
            }
        }
        out.values.insert(set.clone(), table[(1usize << n) - 1]);
    }
    Ok(out)
}

/// `Φ⁺_A(σ) = -Σ_{B ⊂ A} (-1)^{|A \ B|} ln γ_B(σ | +) / γ_B(+ | +)`, where
/// `sigma` gives the spins on `A` in lexicographic order.
pub fn vacuum_potential(a: &[Site], sigma: &[Spin], source: &impl KernelSource) -> Result<f64> {
    let (sites, spins) = sorted_config(a, sigma)?;
    if sites.len() > VACUUM_CAP {
        return Err(Error::EnumerationCap {
            sites: sites.len(),
            cap: VACUUM_CAP,
        });
    }
    let n = sites.len();
    let mut total = 0.0;
    for mask in 0..1usize << n {
        let b: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).collect();
        let volume = Volume::new(b.iter().map(|&k| sites[k]).collect());
        let config: Vec<Spin> = b.iter().map(|&k| spins[k]).collect();
        let sign = if (n - b.len()) % 2 == 0 { 1.0 } else { -1.0 };
        let ratio = if b.is_empty() {
            0.0
        } else {
            source.log_vacuum_ratio(&volume, &config)?
        };
        total -= sign * ratio;
    }
    Ok(total)
}

fn sorted_config(a: &[Site], sigma: &[Spin]) -> Result<(Vec<Site>, Vec<Spin>)> {
    if a.len() != sigma.len() {
        return Err(Error::SizeMismatch(format!("{} spins for {} sites", sigma.len(), a.len())));
    }
    let mut pairs: Vec<(Site, Spin)> = a.iter().copied().zip(sigma.iter().copied()).collect();
    pairs.sort_by_key(|p| p.0);
    pairs.dedup_by_key(|p| p.0);
    if pairs.len() != a.len() {
        return Err(Error::Precondition("repeated site".into()));
    }
    Ok(pairs.into_iter().unzip())
}

/// `H^{Φ⁺,f}_Λ(σ) = -ln γ_Λ(σ | +) / γ_Λ(+ | +)`.
pub fn free_hamiltonian(volume: &Volume, sigma: &[Spin], source: &impl KernelSource) -> Result<f64> {
    Ok(-source.log_vacuum_ratio(volume, sigma)?)
}

/// `Ψ_{L_{i,m}}(ω)` from an exact kernel source; `omega` is consulted on
/// `L_{i,m}` only.
///
/// For `m = 0` this is `-ln γ_{{i}}(ω | +) / γ_{{i}}(+ | +)`; for `m ≥ 1` the
/// four-kernel ratio on the volume `L_{i,m}` with `ω^L = ω_L +_{L^c}`.
pub fn telescoped_term(
    i: Site,
    m: u32,
    omega: impl Fn(Site) -> Spin,
    source: &impl KernelSource,
) -> Result<f64> {
    let set = telescope_set(i, m);
    let volume = Volume::new(set.members.clone());
    let restricted = |keep: &dyn Fn(Site) -> bool| -> Vec<Spin> {
        volume
            .sites()
            .iter()
            .map(|s| if keep(*s) { omega(*s) } else { Spin::Plus })
            .collect()
    };
    if m == 0 {
        return Ok(-source.log_vacuum_ratio(&volume, &restricted(&|_| true))?);
    }
    let inner = |s: Site| s.l1(i) < m;
    let full = source.log_vacuum_ratio(&volume, &restricted(&|_| true))?;
    let full_minus_i = source.log_vacuum_ratio(&volume, &restricted(&|s| s != i))?;
    let prev = source.log_vacuum_ratio(&volume, &restricted(&inner))?;
    let prev_minus_i = source.log_vacuum_ratio(&volume, &restricted(&|s| inner(s) && s != i))?;
    Ok(-(full + prev_minus_i - full_minus_i - prev))
}
