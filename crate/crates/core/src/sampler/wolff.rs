use alloc::vec;
use alloc::vec::Vec;

use super::{ChainConfig, ChainRng, ChainState, Estimate, Observable, Series};
use crate::error::{Error, Result};
use crate::math;

/// Wolff cluster updates for the unconstrained zero-field model.
///
/// Clusters grow over box sites only. The ghost ring enters through the
/// acceptance step: flipping a cluster with `a` ring bonds agreeing and `d`
/// disagreeing with it is accepted with probability `min(1, e^{-2β(a-d)})`.
/// One epoch is a run of cluster updates whose sizes add up to at least the
/// number of box sites.
pub fn run_wolff(cfg: &ChainConfig, observables: &[Observable]) -> Result<Vec<Estimate>> {
    wolff_series(cfg, observables)?.estimates(cfg.seed)
}

/// Per-epoch observable values from the Wolff chain.
pub fn wolff_series(cfg: &ChainConfig, observables: &[Observable]) -> Result<Series> {
    if !cfg.mask.is_empty() || cfg.params.h != 0.0 {
        return Err(Error::ClusterConstrained);
    }
    cfg.validate()?;
    let mut state = ChainState::new(cfg)?;
    let mut rng = ChainRng::new(cfg.seed, 0);
    let p_add = 1.0 - math::exp(-2.0 * cfg.params.beta);
    let n = state.movable().len();
    let padded = cfg.rect.grow(1);
    // box membership of padded cells
    let mut in_box = vec![false; padded.len()];
    for k in 0..n {
        in_box[state.cell(k)] = true;
    }
    let mut in_cluster = vec![false; padded.len()];
    let mut stack = Vec::new();
    let mut cluster = Vec::new();
    let mut columns = vec![Vec::with_capacity(cfg.epochs()); observables.len()];
    let st = state.stride();
    for sweep in 0..cfg.sweeps {
        let mut flipped = 0;
        while flipped < n {
            let seed_cell = state.cell(rng.below(n));
            let s = state.raw(seed_cell);
            cluster.clear();
            stack.push(seed_cell);
            in_cluster[seed_cell] = true;
            let mut ring_balance = 0i32;
            while let Some(c) = stack.pop() {
                cluster.push(c);
                for t in [c - st, c - 1, c + 1, c + st] {
                    if !in_box[t] {
                        ring_balance += (state.raw(t) * s) as i32;
                        continue;
                    }
                    if !in_cluster[t] && state.raw(t) == s && rng.uniform() < p_add {
                        in_cluster[t] = true;
                        stack.push(t);
                    }
                }
            }
            let accept = ring_balance <= 0 || rng.uniform() < math::exp(-2.0 * state.beta() * ring_balance as f64);
            for &c in &cluster {
                in_cluster[c] = false;
                if accept {
                    state.flip_cell(c);
                }
            }
            flipped += cluster.len();
        }
        if sweep >= cfg.burn_in && (sweep - cfg.burn_in + 1) % cfg.thin == 0 {
            for (col, obs) in columns.iter_mut().zip(observables) {
                col.push(obs.evaluate(&state));
            }
        }
    }
    Ok(Series { columns })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Boundary, Rect, Site, Spin};
    use crate::sampler::{run_chain, FrozenMask};
    use crate::spec_engine::IsingParams;

    fn cfg(beta: f64, n: u32, sweeps: usize) -> ChainConfig {
        ChainConfig::new(IsingParams::new(beta, 0.0).unwrap(), Rect::centered(n), Boundary::Plus, 17, sweeps)
            .with_burn_in(100)
    }

    #[test]
    fn refuses_constraints() {
        let mut mask = FrozenMask::empty();
        mask.insert(Site::ORIGIN, Spin::Plus);
        let c = cfg(0.5, 2, 200).with_mask(mask);
        assert_eq!(run_wolff(&c, &[]), Err(Error::ClusterConstrained));
        let mut c = cfg(0.5, 2, 200);
        c.params.h = 0.1;
        assert_eq!(run_wolff(&c, &[]), Err(Error::ClusterConstrained));
    }

    #[test]
    fn infinite_temperature() {
        let e = run_wolff(&cfg(0.0, 3, 4000), &[Observable::Spin(Site::ORIGIN)]).unwrap();
        assert!(e[0].mean.abs() < 4.0 * e[0].stderr);
    }

    #[test]
    fn agrees_with_metropolis() {
        let mut c = cfg(0.5, 0, 40_000);
        c.rect = Rect::new(-1, -1, 4, 4);
        let obs = [Observable::Spin(Site::ORIGIN)];
        let w = run_wolff(&c, &obs).unwrap()[0];
        let m = run_chain(&c, &obs).unwrap()[0];
        assert!((w.mean - m.mean).abs() < 5.0 * w.combined_stderr(&m), "{w:?} {m:?}");
    }
}
