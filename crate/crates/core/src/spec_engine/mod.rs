//! Exact finite-volume Gibbs specification of the nearest-neighbour Ising
//! model: Hamiltonians, enumerated kernel tables, transfer-matrix partition
//! functions and exact checks of consistency and monotonicity.

mod checks;
mod kernel;
mod transfer;

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{Exterior, Site, Spin};

pub use checks::{kernel_compose, keybar_residual, monotonicity_check};
pub use kernel::{kernel_exact, KernelTable, ENUMERATION_CAP};
pub use transfer::{transfer_log_partition, transfer_matrix_log_z, TRANSFER_CAP};

/// Inverse temperature and magnetic field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsingParams {
    pub beta: f64,
    pub h: f64,
}

impl IsingParams {
    /// `beta = 0` is accepted as the infinite-temperature limit.
    pub fn new(beta: f64, h: f64) -> Result<Self> {
        if !(beta.is_finite() && beta >= 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta={beta} h={h}")));
        }
        Ok(IsingParams { beta, h })
    }

    pub fn zero_field(beta: f64) -> Result<Self> {
        IsingParams::new(beta, 0.0)
    }
}

/// A finite set of sites kept in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Volume {
    sites: Vec<Site>,
}

impl Volume {
    pub fn new(mut sites: Vec<Site>) -> Self {
        sites.sort();
        sites.dedup();
        Volume { sites }
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn index_of(&self, s: Site) -> Option<usize> {
        self.sites.binary_search(&s).ok()
    }

    pub fn contains(&self, s: Site) -> bool {
        self.index_of(s).is_some()
    }

    pub fn is_subset_of(&self, other: &Volume) -> bool {
        self.sites.iter().all(|s| other.contains(*s))
    }

    pub fn difference(&self, other: &Volume) -> Volume {
        Volume {
            sites: self.sites.iter().copied().filter(|s| !other.contains(*s)).collect(),
        }
    }
}

impl From<crate::lattice::Rect> for Volume {
    fn from(r: crate::lattice::Rect) -> Self {
        Volume::new(r.sites().collect())
    }
}

/// Bond and field structure of a volume with its exterior folded into
/// per-site effective fields.
#[derive(Debug, Clone)]
pub(crate) struct LocalModel {
    /// Internal nearest-neighbour bonds as index pairs.
    pub bonds: Vec<(usize, usize)>,
    /// Internal neighbours of each site.
    pub adjacency: Vec<Vec<usize>>,
    /// Sum of exterior neighbour spins (free boundary contributes nothing).
    pub exterior_field: Vec<f64>,
}

impl LocalModel {
    pub fn new(volume: &Volume, exterior: &impl Exterior) -> Result<Self> {
        let n = volume.len();
        let mut bonds = Vec::new();
        let mut adjacency = alloc::vec![Vec::new(); n];
        let mut exterior_field = alloc::vec![0.0; n];
        for (a, &s) in volume.sites().iter().enumerate() {
            for t in s.neighbors() {
                match volume.index_of(t) {
                    Some(b) => {
                        adjacency[a].push(b);
                        if a < b {
                            bonds.push((a, b));
                        }
                    }
                    None => {
                        if let Some(v) = exterior.exterior(t)? {
                            exterior_field[a] += v.as_f64();
                        }
                    }
                }
            }
        }
        Ok(LocalModel {
            bonds,
            adjacency,
            exterior_field,
        })
    }

    pub fn energy(&self, spins: &[f64], h: f64) -> f64 {
        let mut e = 0.0;
        for &(a, b) in &self.bonds {
            e -= spins[a] * spins[b];
        }
        for (i, s) in spins.iter().enumerate() {
            e -= s * (self.exterior_field[i] + h);
        }
        e
    }
}

/// `H_Λ(σ | ω)`: sum of `-σ_iσ_j` over nearest-neighbour pairs meeting the
/// volume (exterior spins from `exterior`) plus `-h σ_i` over the volume.
pub fn hamiltonian(
    volume: &Volume,
    sigma: &[Spin],
    exterior: &impl Exterior,
    params: &IsingParams,
) -> Result<f64> {
    if sigma.len() != volume.len() {
        return Err(Error::SizeMismatch(format!(
            "{} spins for {} sites",
            sigma.len(),
            volume.len()
        )));
    }
    let model = LocalModel::new(volume, exterior)?;
    let spins: Vec<f64> = sigma.iter().map(|s| s.as_f64()).collect();
    Ok(model.energy(&spins, params.h))
}

/// Bitmask of a configuration: bit `k` set when site `k` carries `+1`.
pub fn config_mask(sigma: &[Spin]) -> usize {
    sigma
        .iter()
        .enumerate()
        .fold(0, |m, (k, s)| if *s == Spin::Plus { m | (1 << k) } else { m })
}

/// Exterior that reads `spins` on `sites` (sorted) and defers to `base`
/// everywhere else.
pub struct Overlay<'a, E> {
    sites: &'a [Site],
    spins: &'a [Spin],
    base: E,
}

impl<'a, E: Exterior> Overlay<'a, E> {
    pub fn new(sites: &'a [Site], spins: &'a [Spin], base: E) -> Self {
        debug_assert_eq!(sites.len(), spins.len());
        Overlay { sites, spins, base }
    }
}

impl<E: Exterior> Exterior for Overlay<'_, E> {
    fn exterior(&self, site: Site) -> Result<Option<Spin>> {
        match self.sites.binary_search(&site) {
            Ok(k) => Ok(Some(self.spins[k])),
            Err(_) => self.base.exterior(site),
        }
    }
}

pub fn mask_config(mask: usize, n: usize) -> Vec<Spin> {
    (0..n).map(|k| Spin::from_bit(mask >> k & 1 == 1)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Boundary, Rect};
    use alloc::vec;

    #[test]
    fn single_site_hamiltonians() {
        let v = Volume::new(vec![Site::ORIGIN]);
        let p0 = IsingParams::new(1.0, 0.0).unwrap();
        assert_eq!(hamiltonian(&v, &[Spin::Plus], &Boundary::Plus, &p0).unwrap(), -4.0);
        assert_eq!(hamiltonian(&v, &[Spin::Minus], &Boundary::Plus, &p0).unwrap(), 4.0);
        let p1 = IsingParams::new(1.0, 1.0).unwrap();
        assert_eq!(hamiltonian(&v, &[Spin::Plus], &Boundary::Free, &p1).unwrap(), -1.0);
    }

    #[test]
    fn missing_boundary_value_is_an_error() {
        let v = Volume::from(Rect::centered(0));
        let b = Boundary::Fixed(Default::default());
        let p = IsingParams::new(1.0, 0.0).unwrap();
        assert!(matches!(
            hamiltonian(&v, &[Spin::Plus], &b, &p),
            Err(Error::MissingBoundary { .. })
        ));
    }

    #[test]
    fn masks_round_trip() {
        let c = vec![Spin::Plus, Spin::Minus, Spin::Plus];
        assert_eq!(config_mask(&c), 0b101);
        assert_eq!(mask_config(0b101, 3), c);
    }

    #[test]
    fn rejects_negative_beta() {
        assert!(IsingParams::new(-0.1, 0.0).is_err());
        assert!(IsingParams::new(f64::NAN, 0.0).is_err());
    }
}
