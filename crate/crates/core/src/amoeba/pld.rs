use alloc::format;
use alloc::vec;

use crate::error::{Error, Result};
use crate::lattice::{for_each_saw, Boundary, Site, SpinField};

/// Path family for the magnetization-deficit statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathMode {
    /// All nearest-neighbour walks with at most `max_len` steps; an upper
    /// bound for self-avoiding paths of the same length.
    Walks { max_len: usize },
    /// Exact enumeration of self-avoiding paths with at most `max_len` steps.
    Saw { max_len: usize },
}

/// `max_π [m* - (1/|π|) Σ_{i∈π} σ_i]` over paths from the origin ending on the
/// edge of the box. `|π|` counts sites, the origin included.
pub fn pld_statistic(sigma: &SpinField, mstar: f64, mode: PathMode) -> Result<f64> {
    if *sigma.boundary() != Boundary::Plus {
        return Err(Error::Precondition("the path statistic needs a plus boundary".into()));
    }
    let rect = sigma.rect();
    if !rect.contains(Site::ORIGIN) {
        return Err(Error::Precondition("the box does not contain the origin".into()));
    }
    let value = |s: Site| sigma.get(s).unwrap().as_f64();
    let mut best = f64::NEG_INFINITY;
    match mode {
        PathMode::Saw { max_len } => {
            if rect.is_on_edge(Site::ORIGIN) {
                best = mstar - value(Site::ORIGIN);
            }
            for_each_saw(Site::ORIGIN, rect, max_len, |path| {
                if rect.is_on_edge(*path.last().unwrap()) {
                    let avg = path.iter().map(|s| value(*s)).sum::<f64>() / path.len() as f64;
                    best = best.max(mstar - avg);
                }
            })?;
        }
        PathMode::Walks { max_len } => {
            // min_sum[k] = smallest spin sum over walks from the origin ending at k
            let mut min_sum = vec![f64::INFINITY; rect.len()];
            min_sum[rect.index(Site::ORIGIN).unwrap()] = value(Site::ORIGIN);
            for steps in 0..=max_len {
                for (k, m) in min_sum.iter().enumerate() {
                    if m.is_finite() && rect.is_on_edge(rect.site(k)) {
                        best = best.max(mstar - m / (steps + 1) as f64);
                    }
                }
                if steps == max_len {
                    break;
                }
                let mut next = vec![f64::INFINITY; rect.len()];
                for (k, m) in min_sum.iter().enumerate() {
                    if !m.is_finite() {
                        continue;
                    }
                    for t in rect.site(k).neighbors() {
                        if let Some(j) = rect.index(t) {
                            next[j] = next[j].min(m + value(t));
                        }
                    }
                }
                min_sum = next;
            }
        }
    }
    if best == f64::NEG_INFINITY {
        return Err(Error::Precondition(format!("no path reaches the edge within {mode:?}")));
    }
    Ok(best)
}
