use alloc::vec;

use super::IsingParams;
use crate::error::{Error, Result};
use crate::lattice::{Boundary, Exterior, Rect, Site, Spin};
use crate::math;

/// Largest transfer-state width (number of spins carried between steps).
pub const TRANSFER_CAP: usize = 14;

/// `ln Z` of a `width x height` rectangle anchored at the origin.
pub fn transfer_matrix_log_z(
    width: usize,
    height: usize,
    boundary: &Boundary,
    params: &IsingParams,
) -> Result<f64> {
    transfer_log_partition(Rect::new(0, 0, width, height), boundary, |_| None, params)
}

/// `ln Σ exp(-β H)` over the rectangle, where `H` counts every bond with an
/// endpoint in the rectangle plus the field term on every rectangle site.
/// Sites for which `frozen` returns a spin are held at that value and not
/// summed over.
///
/// The sum is carried out one site at a time along the longer axis, keeping
/// the spins of one cross-section (the broken line) as transfer state, so the
/// state space has `2^min(width, height)` entries.
pub fn transfer_log_partition(
    rect: Rect,
    exterior: &impl Exterior,
    frozen: impl Fn(Site) -> Option<Spin>,
    params: &IsingParams,
) -> Result<f64> {
    if rect.is_empty() {
        return Ok(0.0);
    }
    let transpose = rect.height > rect.width;
    let (long, short) = if transpose {
        (rect.height, rect.width)
    } else {
        (rect.width, rect.height)
    };
    if short > TRANSFER_CAP {
        return Err(Error::TransferCap {
            width: short,
            cap: TRANSFER_CAP,
        });
    }
    // (u, v) coordinates: u runs along the long axis, v across it
    let at = |u: i64, v: i64| -> Site {
        if transpose {
            Site::new(rect.x0 + v as i32, rect.y0 + u as i32)
        } else {
            Site::new(rect.x0 + u as i32, rect.y0 + v as i32)
        }
    };
    let ext = |u: i64, v: i64| -> Result<f64> {
        Ok(exterior.exterior(at(u, v))?.map_or(0.0, |s| s.as_f64()))
    };

    let beta = params.beta;
    let mut weights = vec![0.0f64; 1 << short];
    let mut next = vec![0.0f64; 1 << short];
    weights[0] = 1.0;
    let mut log_scale = 0.0;
    for u in 0..long as i64 {
        for v in 0..short as i64 {
            let bit = 1usize << v;
            let mut field = params.h;
            if v == 0 {
                field += ext(u, -1)?;
            }
            if v == short as i64 - 1 {
                field += ext(u, short as i64)?;
            }
            if u == long as i64 - 1 {
                field += ext(long as i64, v)?;
            }
            let left_ext = if u == 0 { Some(ext(-1, v)?) } else { None };
            let choices: &[f64] = match frozen(at(u, v)) {
                Some(Spin::Plus) => &[1.0],
                Some(Spin::Minus) => &[-1.0],
                None => &[-1.0, 1.0],
            };
            next.iter_mut().for_each(|w| *w = 0.0);
            let mut peak = 0.0f64;
            for (state, &w) in weights.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let left = match left_ext {
                    Some(e) => e,
                    None => spin_of(state, v as usize),
                };
                let below = if v > 0 { spin_of(state, v as usize - 1) } else { 0.0 };
                for &s in choices {
                    let factor = math::exp(beta * s * (left + below + field));
                    let target = if s > 0.0 { state | bit } else { state & !bit };
                    next[target] += w * factor;
                }
            }
            for w in &next {
                peak = peak.max(*w);
            }
            if !(peak > 0.0 && peak.is_finite()) {
                return Err(Error::Precondition("transfer weights degenerated".into()));
            }
            for w in next.iter_mut() {
                *w /= peak;
            }
            log_scale += math::ln(peak);
            core::mem::swap(&mut weights, &mut next);
        }
    }
    let total: f64 = weights.iter().sum();
    Ok(log_scale + math::ln(total))
}

#[inline]
fn spin_of(state: usize, slot: usize) -> f64 {
    if state >> slot & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec_engine::{kernel_exact, Volume};
    use alloc::collections::BTreeMap;
    use alloc::vec::Vec;

    fn params(beta: f64, h: f64) -> IsingParams {
        IsingParams::new(beta, h).unwrap()
    }

    #[test]
    fn single_free_site() {
        let z = transfer_matrix_log_z(1, 1, &Boundary::Free, &params(0.7, 0.0)).unwrap();
        assert!((z - math::ln(2.0)).abs() < 1e-15);
    }

    #[test]
    fn infinite_temperature_counts_states() {
        let z = transfer_matrix_log_z(8, 8, &Boundary::Free, &params(0.0, 0.0)).unwrap();
        assert!((z - 64.0 * math::ln(2.0)).abs() < 1e-10);
    }

    #[test]
    fn agrees_with_enumeration() {
        for (w, h) in [(3, 3), (2, 5), (5, 2), (4, 4), (1, 6)] {
            for bc in [Boundary::Plus, Boundary::Minus, Boundary::Free] {
                for (beta, field) in [(0.5, 0.0), (1.3, 0.2), (0.1, -0.4)] {
                    let p = params(beta, field);
                    let rect = Rect::new(0, 0, w, h);
                    let exact = kernel_exact(&Volume::from(rect), &bc, &p).unwrap().log_z();
                    let tm = transfer_matrix_log_z(w, h, &bc, &p).unwrap();
                    assert!((exact - tm).abs() < 1e-10, "{w}x{h} {bc:?} {beta}");
                }
            }
        }
    }

    #[test]
    fn fixed_boundary_and_frozen_sites() {
        let rect = Rect::new(-1, 0, 3, 4);
        let mut ring = BTreeMap::new();
        for (k, s) in rect.ring().into_iter().enumerate() {
            ring.insert(s, if k % 3 == 0 { Spin::Minus } else { Spin::Plus });
        }
        let bc = Boundary::Fixed(ring);
        let p = params(0.8, 0.1);
        let frozen_site = Site::new(0, 1);
        let tm = transfer_log_partition(rect, &bc, |s| (s == frozen_site).then_some(Spin::Minus), &p).unwrap();
        let table = kernel_exact(&Volume::from(rect), &bc, &p).unwrap();
        let k = table.sites().iter().position(|s| *s == frozen_site).unwrap();
        let restricted: Vec<f64> = (0..table.len())
            .filter(|m| m >> k & 1 == 0)
            .map(|m| table.log_prob(m) + table.log_z())
            .collect();
        assert!((math::log_sum_exp(&restricted) - tm).abs() < 1e-10);
    }

    #[test]
    fn width_cap() {
        let r = transfer_matrix_log_z(15, 15, &Boundary::Plus, &params(0.5, 0.0));
        assert!(matches!(r, Err(Error::TransferCap { .. })));
        assert!(transfer_matrix_log_z(40, 14, &Boundary::Plus, &params(0.5, 0.0)).is_ok());
    }
}
