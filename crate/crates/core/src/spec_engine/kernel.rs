use alloc::vec;
use alloc::vec::Vec;

use super::{IsingParams, LocalModel, Volume};
use crate::error::{Error, Result};
use crate::lattice::{Exterior, Site, Spin};
use crate::math;

/// Largest volume handled by exact enumeration.
pub const ENUMERATION_CAP: usize = 25;

/// The kernel `γ_Λ(· | ω)` as a normalized table over `Ω_Λ`, indexed by
/// configuration bitmask (bit `k` set when the `k`-th site is `+1`).
#[derive(Debug, Clone)]
pub struct KernelTable {
    sites: Vec<Site>,
    log_probs: Vec<f64>,
    log_z: f64,
}

impl KernelTable {
    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.log_probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_probs.is_empty()
    }

    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    pub fn log_prob(&self, mask: usize) -> f64 {
        self.log_probs[mask]
    }

    pub fn prob(&self, mask: usize) -> f64 {
        math::exp(self.log_probs[mask])
    }

    pub fn probs(&self) -> Vec<f64> {
        self.log_probs.iter().map(|l| math::exp(*l)).collect()
    }

    pub fn prob_of(&self, sigma: &[Spin]) -> f64 {
        self.prob(super::config_mask(sigma))
    }

    /// `γ_Λ f (ω)` for `f` given per configuration mask.
    pub fn expectation(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.log_probs
            .iter()
            .enumerate()
            .map(|(m, l)| math::exp(*l) * f(m))
            .sum()
    }

    /// Expected spin at the `k`-th site.
    pub fn mean_spin(&self, k: usize) -> f64 {
        self.expectation(|m| if m >> k & 1 == 1 { 1.0 } else { -1.0 })
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        -self
            .log_probs
            .iter()
            .map(|l| math::exp(*l) * l)
            .sum::<f64>()
    }
}

/// Exact kernel by enumerating all `2^|Λ|` configurations. Log-weights are
/// normalized with a max subtraction.
pub fn kernel_exact(
    volume: &Volume,
    exterior: &impl Exterior,
    params: &IsingParams,
) -> Result<KernelTable> {
    let n = volume.len();
    if n > ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            sites: n,
            cap: ENUMERATION_CAP,
        });
    }
    let model = LocalModel::new(volume, exterior)?;
    let log_w = enumerate_log_weights(&model, n, params);
    let log_z = math::log_sum_exp(&log_w);
    let log_probs = log_w.into_iter().map(|l| l - log_z).collect();
    Ok(KernelTable {
        sites: volume.sites().to_vec(),
        log_probs,
        log_z,
    })
}

/// `-β H` for every mask, walking a Gray code so each step flips one spin.
pub(crate) fn enumerate_log_weights(model: &LocalModel, n: usize, params: &IsingParams) -> Vec<f64> {
    let size = 1usize << n;
    let mut out = vec![0.0; size];
    let mut spins = vec![-1.0; n];
    let mut energy = model.energy(&spins, params.h);
    out[0] = -params.beta * energy;
    for i in 1..size {
        let k = i.trailing_zeros() as usize;
        let gray = i ^ (i >> 1);
        let old = spins[k];
        let local: f64 = model.adjacency[k].iter().map(|&j| spins[j]).sum::<f64>()
            + model.exterior_field[k]
            + params.h;
        // E contains -s_k * local; flipping s_k changes it by 2 s_k local
        energy += 2.0 * old * local;
        spins[k] = -old;
        out[gray] = -params.beta * energy;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Boundary, Rect};
    use crate::spec_engine::{hamiltonian, mask_config};

    #[test]
    fn single_site_closed_form() {
        let v = Volume::new(vec![Site::ORIGIN]);
        let p = IsingParams::new(0.5, 0.0).unwrap();
        let t = kernel_exact(&v, &Boundary::Plus, &p).unwrap();
        let plus = t.prob_of(&[Spin::Plus]);
        assert!((plus - 1.0 / (1.0 + math::exp(-8.0 * 0.5))).abs() < 1e-15);
        assert!((plus - 0.982014).abs() < 1e-6);
    }

    #[test]
    fn infinite_temperature_is_uniform() {
        let v = Volume::from(Rect::centered(1));
        let p = IsingParams::new(1e-9, 0.0).unwrap();
        let t = kernel_exact(&v, &Boundary::Plus, &p).unwrap();
        let u = 1.0 / 512.0;
        assert!(t.probs().iter().all(|q| (q - u).abs() < 1e-7));
    }

    #[test]
    fn matches_brute_force_summation() {
        let v = Volume::from(Rect::centered(1));
        let p = IsingParams::new(0.5, 0.0).unwrap();
        let t = kernel_exact(&v, &Boundary::Plus, &p).unwrap();
        let mut z = 0.0;
        let mut all_plus = 0.0;
        for m in 0..512usize {
            let sigma = mask_config(m, 9);
            let w = math::exp(-0.5 * hamiltonian(&v, &sigma, &Boundary::Plus, &p).unwrap());
            z += w;
            if m == 511 {
                all_plus = w;
            }
        }
        assert!((t.prob(511) - all_plus / z).abs() < 1e-14);
        assert!((t.log_z() - math::ln(z)).abs() < 1e-12);
        let total: f64 = t.probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(t.probs().iter().all(|q| *q > 0.0));
    }

    #[test]
    fn large_beta_does_not_overflow() {
        let v = Volume::from(Rect::centered(1));
        let p = IsingParams::new(40.0, 0.3).unwrap();
        let t = kernel_exact(&v, &Boundary::Plus, &p).unwrap();
        assert!(t.log_z().is_finite());
        assert!((t.prob(511) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spin_flip_symmetry() {
        let v = Volume::from(Rect::new(0, 0, 2, 3));
        let p = IsingParams::new(0.7, 0.0).unwrap();
        let tp = kernel_exact(&v, &Boundary::Plus, &p).unwrap();
        let tm = kernel_exact(&v, &Boundary::Minus, &p).unwrap();
        let full = (1 << 6) - 1;
        for m in 0..=full {
            assert!((tp.log_prob(m) - tm.log_prob(full ^ m)).abs() < 1e-13);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let v = Volume::from(Rect::new(0, 0, 2, 13));
        let p = IsingParams::new(0.5, 0.0).unwrap();
        assert!(matches!(
            kernel_exact(&v, &Boundary::Plus, &p),
            Err(Error::EnumerationCap { .. })
        ));
    }
}
