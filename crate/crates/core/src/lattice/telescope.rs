use alloc::vec::Vec;

use super::Site;

/// The half-ball `L_{i,m} = { k <= i lexicographically, |k - i|_1 <= m }`
/// (with `k = i` included) and its outer annulus `L_{i,m} \ L_{i,m-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TelescopeSet {
    pub anchor: Site,
    pub radius: u32,
    /// Members in lexicographic order.
    pub members: Vec<Site>,
    /// Annulus `j_1 < ... < j_v` in lexicographic order; empty for `m = 0`.
    pub annulus: Vec<Site>,
}

impl TelescopeSet {
    /// `v(i, m)`, undefined (`None`) for `m = 0`.
    pub fn annulus_size(&self) -> Option<usize> {
        (self.radius > 0).then_some(self.annulus.len())
    }

    pub fn contains(&self, s: Site) -> bool {
        self.members.binary_search(&s).is_ok()
    }

    /// `L_{i,m-1}`, i.e. the members minus the annulus.
    pub fn inner(&self) -> Vec<Site> {
        self.members
            .iter()
            .copied()
            .filter(|k| k.l1(self.anchor) < self.radius)
            .collect()
    }
}

pub fn telescope_set(anchor: Site, radius: u32) -> TelescopeSet {
    let m = radius as i32;
    let mut members = Vec::new();
    let mut annulus = Vec::new();
    for dx in -m..=0 {
        let rest = m - dx.abs();
        for dy in -rest..=rest {
            if dx == 0 && dy > 0 {
                continue;
            }
            let k = Site::new(anchor.x + dx, anchor.y + dy);
            members.push(k);
            if radius > 0 && k.l1(anchor) == radius {
                annulus.push(k);
            }
        }
    }
    TelescopeSet {
        anchor,
        radius,
        members,
        annulus,
    }
}

/// The unique `(i, m)` with `A ∋ i`, `A ⊂ L_{i,m}` and `A ⊄ L_{i,m-1}`:
/// `i` is the lexicographic maximum of `A` and `m` its largest L1 distance to `i`.
pub fn telescope_index(set: &[Site]) -> Option<(Site, u32)> {
    let i = *set.iter().max()?;
    let m = set.iter().map(|k| k.l1(i)).max().unwrap_or(0);
    Some((i, m))
}
