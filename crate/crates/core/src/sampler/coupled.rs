use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::{ChainConfig, ChainRng, ChainState, Estimate};
use crate::error::{Error, Result};
use crate::lattice::{Rect, Site};

/// Occurrence frequencies measured on a pair of independent chains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledEstimates {
    /// Frequency of an open path from `G` to `F`.
    pub path: Estimate,
    /// Frequency of `diam(C_F) > m`.
    pub diam_exceeds: Estimate,
    /// Mean `L∞` diameter of `C_F` (0 when empty).
    pub mean_diam: Estimate,
}

/// Runs two independent Metropolis chains with the same configuration (streams
/// 1 and 2 of the seed) and, once per epoch, declares a site open when it is
/// unfrozen and the two copies are not both `+` there.
///
/// The path event holds when some open site of `G` is joined to some open site
/// of `F` by nearest-neighbour steps through open sites. `C_F` is the union of
/// the open clusters meeting the outer boundary of `F` (sites adjacent to `F`
/// but outside it); its diameter is measured in the `L∞` norm.
pub fn run_coupled(cfg: &ChainConfig, f: &[Site], g: &[Site], m: u32) -> Result<CoupledEstimates> {
    cfg.validate()?;
    if f.iter().any(|s| g.contains(s)) {
        return Err(Error::Overlap);
    }
    let rect = cfg.rect;
    if let Some(s) = f.iter().chain(g).find(|s| !rect.contains(**s)) {
        return Err(Error::Precondition(alloc::format!("site {s} outside the box")));
    }
    let mut a = ChainState::new(cfg)?;
    let mut b = ChainState::new(cfg)?;
    let mut ra = ChainRng::new(cfg.seed, 1);
    let mut rb = ChainRng::new(cfg.seed, 2);
    let frozen: Vec<bool> = rect.sites().map(|s| cfg.mask.contains(s)).collect();
    let in_f: Vec<bool> = rect.sites().map(|s| f.contains(&s)).collect();
    let in_g: Vec<bool> = rect.sites().map(|s| g.contains(&s)).collect();
    let boundary_f: Vec<usize> = {
        let mut out: Vec<usize> = f
            .iter()
            .flat_map(|s| s.neighbors())
            .filter(|t| !f.contains(t))
            .filter_map(|t| rect.index(t))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    };
    let mut path = Vec::new();
    let mut exceeds = Vec::new();
    let mut diams = Vec::new();
    let mut open = vec![false; rect.len()];
    for sweep in 0..cfg.sweeps {
        a.metropolis_sweep(&mut ra);
        b.metropolis_sweep(&mut rb);
        if sweep < cfg.burn_in || (sweep - cfg.burn_in + 1) % cfg.thin != 0 {
            continue;
        }
        for k in 0..rect.len() {
            let (c1, c2) = (a.cell(k), b.cell(k));
            open[k] = !frozen[k] && !(a.raw(c1) > 0 && b.raw(c2) > 0);
        }
        let starts: Vec<usize> = (0..rect.len()).filter(|&k| in_g[k] && open[k]).collect();
        let reached = flood(rect, &open, &starts);
        let hit = (0..rect.len()).any(|k| in_f[k] && reached[k]);
        path.push(if hit { 1.0 } else { 0.0 });
        let starts: Vec<usize> = boundary_f.iter().copied().filter(|&k| open[k]).collect();
        let cluster = flood(rect, &open, &starts);
        let d = diameter(rect, &cluster);
        exceeds.push(if d > m { 1.0 } else { 0.0 });
        diams.push(d as f64);
    }
    Ok(CoupledEstimates {
        path: Estimate::batch_means(&path, cfg.seed)?,
        diam_exceeds: Estimate::batch_means(&exceeds, cfg.seed)?,
        mean_diam: Estimate::batch_means(&diams, cfg.seed)?,
    })
}

pub(crate) fn flood(rect: Rect, open: &[bool], starts: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; rect.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &k in starts {
        if open[k] && !seen[k] {
            seen[k] = true;
            queue.push_back(k);
        }
    }
    while let Some(k) = queue.pop_front() {
        for t in rect.site(k).neighbors() {
            if let Some(j) = rect.index(t) {
                if open[j] && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    seen
}

/// `L∞` diameter of the marked sites (0 for an empty set).
pub(crate) fn diameter(rect: Rect, marked: &[bool]) -> u32 {
    let mut bounds: Option<(i32, i32, i32, i32)> = None;
    for (k, _) in marked.iter().enumerate().filter(|(_, m)| **m) {
        let s = rect.site(k);
        bounds = Some(match bounds {
            None => (s.x, s.x, s.y, s.y),
            Some((x0, x1, y0, y1)) => (x0.min(s.x), x1.max(s.x), y0.min(s.y), y1.max(s.y)),
        });
    }
    bounds.map_or(0, |(x0, x1, y0, y1)| (x1 - x0).max(y1 - y0) as u32)
}
