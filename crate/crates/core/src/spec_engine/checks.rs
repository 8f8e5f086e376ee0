use alloc::format;
use alloc::vec::Vec;

use super::{config_mask, kernel_exact, IsingParams, Overlay, Volume};
use crate::error::{Error, Result};
use crate::lattice::{Exterior, Site, Spin};
use crate::math;

fn split(delta: &Volume, lambda: &Volume) -> Result<(Volume, Vec<usize>, Vec<usize>)> {
    if !lambda.is_subset_of(delta) {
        return Err(Error::Precondition("inner volume must lie in the outer one".into()));
    }
    let rest = delta.difference(lambda);
    let inner_pos = lambda.sites().iter().map(|s| delta.index_of(*s).unwrap()).collect();
    let rest_pos = rest.sites().iter().map(|s| delta.index_of(*s).unwrap()).collect();
    Ok((rest, inner_pos, rest_pos))
}

fn gather(mask: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &p)| acc | ((mask >> p & 1) << k))
}

fn spins_of(mask: usize, n: usize) -> Vec<Spin> {
    super::mask_config(mask, n)
}

/// Largest absolute difference between `γ_Δ γ_Λ (σ | ω)` and `γ_Δ(σ | ω)`
/// over all `σ ∈ Ω_Δ`, both sides summed exactly.
pub fn kernel_compose(
    delta: &Volume,
    lambda: &Volume,
    exterior: &impl Exterior,
    params: &IsingParams,
) -> Result<f64> {
    let (rest, inner_pos, rest_pos) = split(delta, lambda)?;
    let outer = kernel_exact(delta, exterior, params)?;
    let n_rest = rest.len();
    // marginal of γ_Δ on Δ \ Λ
    let mut marginal = alloc::vec![0.0; 1 << n_rest];
    for m in 0..outer.len() {
        marginal[gather(m, &rest_pos)] += outer.prob(m);
    }
    let total: f64 = marginal.iter().sum();
    marginal.iter_mut().for_each(|w| *w /= total);
    let mut inner_tables = Vec::with_capacity(1 << n_rest);
    for r in 0..1usize << n_rest {
        let tau = spins_of(r, n_rest);
        let ext = Overlay::new(rest.sites(), &tau, exterior);
        inner_tables.push(kernel_exact(lambda, &ext, params)?);
    }
    let mut worst: f64 = 0.0;
    for m in 0..outer.len() {
        let r = gather(m, &rest_pos);
        let composed = marginal[r] * inner_tables[r].prob(gather(m, &inner_pos));
        worst = worst.max((composed - outer.prob(m)).abs());
    }
    Ok(worst)
}

/// Relative discrepancy `|L - R| / max(L, R)` between the two ratios of the
/// key-bar displacement identity
/// `γ_Δ(σ̃_Λ τ | ω) / γ_Δ(σ_Λ τ | ω) = γ_Λ(σ̃_Λ | τ ω) / γ_Λ(σ_Λ | τ ω)`,
/// with `τ` given on `Δ \ Λ` in lexicographic order.
pub fn keybar_residual(
    lambda: &Volume,
    delta: &Volume,
    sigma_tilde: &[Spin],
    sigma: &[Spin],
    tau: &[Spin],
    exterior: &impl Exterior,
    params: &IsingParams,
) -> Result<f64> {
    let (rest, inner_pos, rest_pos) = split(delta, lambda)?;
    if sigma_tilde.len() != lambda.len() || sigma.len() != lambda.len() || tau.len() != rest.len() {
        return Err(Error::SizeMismatch(format!(
            "configurations do not match volumes of {} and {} sites",
            lambda.len(),
            rest.len()
        )));
    }
    let outer = kernel_exact(delta, exterior, params)?;
    let place = |inner: &[Spin]| -> usize {
        let mut m = 0usize;
        for (k, &p) in inner_pos.iter().enumerate() {
            if inner[k] == Spin::Plus {
                m |= 1 << p;
            }
        }
        for (k, &p) in rest_pos.iter().enumerate() {
            if tau[k] == Spin::Plus {
                m |= 1 << p;
            }
        }
        m
    };
    let lhs = outer.log_prob(place(sigma_tilde)) - outer.log_prob(place(sigma));
    let ext = Overlay::new(rest.sites(), tau, exterior);
    let inner = kernel_exact(lambda, &ext, params)?;
    let rhs = inner.log_prob(config_mask(sigma_tilde)) - inner.log_prob(config_mask(sigma));
    let (l, r) = (math::exp(lhs), math::exp(rhs));
    let scale = l.max(r);
    Ok(if scale == 0.0 { 0.0 } else { (l - r).abs() / scale })
}

/// Checks `γ_Λ f(ω) ≤ γ_Λ f(ω') + 1e-12` for `f` given as a table over
/// configuration masks of `Λ`.
///
/// `f` must be increasing (checked on covering pairs) and `ω ≤ ω'` must hold
/// on the exterior neighbours of `Λ`.
pub fn monotonicity_check(
    lambda: &Volume,
    params: &IsingParams,
    f: &[f64],
    lower: &impl Exterior,
    upper: &impl Exterior,
) -> Result<bool> {
    let n = lambda.len();
    if f.len() != 1 << n {
        return Err(Error::SizeMismatch(format!("table of {} for {} sites", f.len(), n)));
    }
    for m in 0..f.len() {
        for k in 0..n {
            if m >> k & 1 == 0 && f[m] > f[m | 1 << k] {
                return Err(Error::NotIncreasing);
            }
        }
    }
    for s in exterior_neighbors(lambda) {
        let (a, b) = (lower.exterior(s)?, upper.exterior(s)?);
        let ordered = match (a, b) {
            (Some(x), Some(y)) => x <= y,
            (None, None) => true,
            _ => false,
        };
        if !ordered {
            return Err(Error::Precondition(format!("boundary conditions not ordered at {s}")));
        }
    }
    let lo = kernel_exact(lambda, lower, params)?.expectation(|m| f[m]);
    let hi = kernel_exact(lambda, upper, params)?.expectation(|m| f[m]);
    Ok(lo <= hi + 1e-12)
}

/// Sites outside the volume adjacent to it, in lexicographic order.
pub(crate) fn exterior_neighbors(volume: &Volume) -> Vec<Site> {
    let mut out: Vec<Site> = volume
        .sites()
        .iter()
        .flat_map(|s| s.neighbors())
        .filter(|t| !volume.contains(*t))
        .collect();
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Boundary, Rect};
    use alloc::vec;

    fn p(beta: f64) -> IsingParams {
        IsingParams::new(beta, 0.0).unwrap()
    }

    #[test]
    fn compose_with_itself_is_exact() {
        let v = Volume::from(Rect::centered(1));
        assert_eq!(kernel_compose(&v, &v, &Boundary::Plus, &p(0.5)).unwrap(), 0.0);
    }

    #[test]
    fn compose_single_site_in_box() {
        let d = Volume::from(Rect::centered(1));
        let l = Volume::new(vec![Site::ORIGIN]);
        assert!(kernel_compose(&d, &l, &Boundary::Plus, &p(0.5)).unwrap() < 1e-12);
    }

    #[test]
    fn keybar_trivial_and_small() {
        let d = Volume::from(Rect::new(0, 0, 2, 2));
        let l = Volume::new(vec![Site::new(0, 0)]);
        let tau = [Spin::Minus, Spin::Plus, Spin::Minus];
        let r = keybar_residual(&l, &d, &[Spin::Plus], &[Spin::Plus], &tau, &Boundary::Plus, &p(0.7)).unwrap();
        assert_eq!(r, 0.0);
        let r = keybar_residual(&l, &d, &[Spin::Minus], &[Spin::Plus], &tau, &Boundary::Plus, &p(0.7)).unwrap();
        assert!(r < 1e-12);
    }

    #[test]
    fn single_site_magnetization_is_monotone() {
        let l = Volume::new(vec![Site::ORIGIN]);
        let f = [-1.0, 1.0];
        assert!(monotonicity_check(&l, &p(0.4), &f, &Boundary::Minus, &Boundary::Plus).unwrap());
        assert!(monotonicity_check(&l, &p(0.4), &f, &Boundary::Plus, &Boundary::Plus).unwrap());
        assert!(matches!(
            monotonicity_check(&l, &p(0.4), &[1.0, -1.0], &Boundary::Minus, &Boundary::Plus),
            Err(Error::NotIncreasing)
        ));
        assert!(monotonicity_check(&l, &p(0.4), &f, &Boundary::Plus, &Boundary::Minus).is_err());
    }
}
