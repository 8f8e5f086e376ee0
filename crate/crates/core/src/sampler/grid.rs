use alloc::vec;
use alloc::vec::Vec;

use super::{ChainConfig, ChainRng};
use crate::error::Result;
use crate::lattice::{Boundary, Exterior, Rect, Site, Spin, SpinField};
use crate::math;

/// Spins of a chain on its box plus a one-site ghost ring holding the
/// boundary values (zero for a free boundary).
#[derive(Debug, Clone)]
pub struct ChainState {
    rect: Rect,
    boundary: Boundary,
    stride: usize,
    spins: Vec<i8>,
    /// Padded index of each box site, in box order.
    cells: Vec<usize>,
    /// Box indices of the sites that are updated, in lexicographic order.
    movable: Vec<usize>,
    beta: f64,
    /// `accept[s][k]` for current spin `s` (0 for -1, 1 for +1) and
    /// neighbour sum `k - 4`: probability of flipping.
    accept: [[f64; 9]; 2],
}

impl ChainState {
    /// Box spins start in the phase of the boundary (`+` for free and fixed
    /// boundaries), frozen sites at their mask values.
    pub fn new(cfg: &ChainConfig) -> Result<Self> {
        let rect = cfg.rect;
        let padded = rect.grow(1);
        let stride = padded.height;
        let mut spins = vec![0i8; padded.len()];
        for s in rect.ring() {
            let v = cfg.boundary.exterior(s)?;
            spins[padded.index(s).unwrap()] = v.map_or(0, |v| v.value());
        }
        let start = match cfg.boundary {
            Boundary::Minus => Spin::Minus,
            _ => Spin::Plus,
        };
        let mut cells = Vec::with_capacity(rect.len());
        let mut movable = Vec::new();
        for (k, s) in rect.sites().enumerate() {
            let c = padded.index(s).unwrap();
            cells.push(c);
            match cfg.mask.get(s) {
                Some(v) => spins[c] = v.value(),
                None => {
                    spins[c] = start.value();
                    movable.push(k);
                }
            }
        }
        let (beta, h) = (cfg.params.beta, cfg.params.h);
        let mut accept = [[0.0; 9]; 2];
        for (si, s) in [-1.0, 1.0].into_iter().enumerate() {
            for k in 0..9 {
                let local = k as f64 - 4.0 + h;
                // flipping s changes the energy by 2 s (local)
                accept[si][k] = math::exp(-2.0 * beta * s * local).min(1.0);
            }
        }
        Ok(ChainState {
            rect,
            boundary: cfg.boundary.clone(),
            stride,
            spins,
            cells,
            movable,
            beta,
            accept,
        })
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    /// Spin at a box or ring site. Free-boundary ring sites read as `+`.
    #[inline]
    pub fn spin(&self, s: Site) -> Spin {
        let padded = self.rect.grow(1);
        match padded.index(s) {
            Some(c) if self.spins[c] < 0 => Spin::Minus,
            _ => Spin::Plus,
        }
    }

    #[inline]
    pub(crate) fn raw(&self, cell: usize) -> i8 {
        self.spins[cell]
    }

    #[inline]
    pub(crate) fn cell(&self, box_index: usize) -> usize {
        self.cells[box_index]
    }

    #[inline]
    pub(crate) fn stride(&self) -> usize {
        self.stride
    }

    pub(crate) fn movable(&self) -> &[usize] {
        &self.movable
    }

    pub(crate) fn beta(&self) -> f64 {
        self.beta
    }

    #[inline]
    pub(crate) fn flip_cell(&mut self, cell: usize) {
        self.spins[cell] = -self.spins[cell];
    }

    #[inline]
    pub(crate) fn neighbor_sum(&self, c: usize) -> i32 {
        let st = self.stride;
        self.spins[c - st] as i32 + self.spins[c - 1] as i32 + self.spins[c + 1] as i32 + self.spins[c + st] as i32
    }

    pub fn magnetization(&self) -> f64 {
        let total: i64 = self.cells.iter().map(|&c| self.spins[c] as i64).sum();
        total as f64 / self.cells.len() as f64
    }

    /// Sum of the neighbour spins of `s` (ring values included, free ring
    /// sites count 0).
    pub fn local_field(&self, s: Site) -> f64 {
        let padded = self.rect.grow(1);
        s.neighbors()
            .iter()
            .map(|t| padded.index(*t).map_or(0.0, |c| self.spins[c] as f64))
            .sum()
    }

    /// One lexicographic pass over the unfrozen sites. Each site proposes a
    /// spin drawn uniformly from `{-1, +1}`; a proposal differing from the
    /// current value is accepted with probability `min(1, e^{-β ΔH})`.
    pub fn metropolis_sweep(&mut self, rng: &mut ChainRng) {
        for i in 0..self.movable.len() {
            let c = self.cells[self.movable[i]];
            let propose_flip = rng.coin();
            let u = rng.uniform();
            if !propose_flip {
                continue;
            }
            let s = self.spins[c];
            let k = (self.neighbor_sum(c) + 4) as usize;
            let p = self.accept[(s > 0) as usize][k];
            if u < p {
                self.spins[c] = -s;
            }
        }
    }

    /// Snapshot of the box spins with the chain's boundary.
    pub fn to_field(&self) -> SpinField {
        let values = self
            .cells
            .iter()
            .map(|&c| if self.spins[c] < 0 { Spin::Minus } else { Spin::Plus })
            .collect();
        SpinField::new(self.rect, values, self.boundary.clone()).expect("chain boundary covers its ring")
    }
}
