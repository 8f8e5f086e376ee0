use alloc::vec;
use alloc::vec::Vec;

use super::{Rect, Site};
use crate::error::{Error, Result};

/// Hard cap on enumerated path length.
pub const MAX_SAW_LEN: usize = 16;

/// Calls `visit` on every self-avoiding path from `from` with `1..=max_len`
/// steps that stays in `rect`. Paths include the starting site.
pub fn for_each_saw(
    from: Site,
    rect: Rect,
    max_len: usize,
    mut visit: impl FnMut(&[Site]),
) -> Result<()> {
    if max_len > MAX_SAW_LEN {
        return Err(Error::PathBudget {
            requested: max_len,
            cap: MAX_SAW_LEN,
        });
    }
    if !rect.contains(from) {
        return Err(Error::Precondition("start site outside the box".into()));
    }
    let mut visited = vec![false; rect.len()];
    let mut path = Vec::with_capacity(max_len + 1);
    path.push(from);
    visited[rect.index(from).unwrap()] = true;
    extend(rect, max_len, &mut path, &mut visited, &mut visit);
    Ok(())
}

fn extend(
    rect: Rect,
    max_len: usize,
    path: &mut Vec<Site>,
    visited: &mut [bool],
    visit: &mut impl FnMut(&[Site]),
) {
    if path.len() > max_len {
        return;
    }
    let last = *path.last().unwrap();
    for t in last.neighbors() {
        let Some(idx) = rect.index(t) else { continue };
        if visited[idx] {
            continue;
        }
        visited[idx] = true;
        path.push(t);
        visit(path);
        extend(rect, max_len, path, visited, visit);
        path.pop();
        visited[idx] = false;
    }
}

/// All self-avoiding paths from `from` of length `1..=max_len` inside `rect`.
pub fn enumerate_saw(from: Site, rect: Rect, max_len: usize) -> Result<Vec<Vec<Site>>> {
    let mut out = Vec::new();
    for_each_saw(from, rect, max_len, |p| out.push(p.to_vec()))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    /// Independent walker: extends every step sequence and rejects revisits.
    fn brute_count(from: Site, rect: Rect, max_len: usize) -> usize {
        let dirs = [(1, 0), (-1, 0), (0, 1), (0, -1)];
        let mut total = 0;
        let mut frontier: Vec<Vec<Site>> = vec![vec![from]];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for p in &frontier {
                let last = *p.last().unwrap();
                for (dx, dy) in dirs {
                    let t = Site::new(last.x + dx, last.y + dy);
                    let seen: BTreeSet<Site> = p.iter().copied().collect();
                    if rect.contains(t) && !seen.contains(&t) {
                        let mut q = p.clone();
                        q.push(t);
                        next.push(q);
                    }
                }
            }
            total += next.len();
            frontier = next;
        }
        total
    }

    #[test]
    fn small_counts() {
        let big = Rect::centered(10);
        assert_eq!(enumerate_saw(Site::ORIGIN, big, 1).unwrap().len(), 4);
        assert_eq!(enumerate_saw(Site::ORIGIN, big, 2).unwrap().len(), 4 + 12);
        // 4 + 12 + 36 + 100
        assert_eq!(enumerate_saw(Site::ORIGIN, big, 4).unwrap().len(), 152);
    }

    #[test]
    fn matches_brute_force_in_small_box() {
        for (rect, from) in [
            (Rect::centered(1), Site::ORIGIN),
            (Rect::centered(2), Site::new(1, -2)),
            (Rect::new(0, 0, 3, 2), Site::new(0, 0)),
        ] {
            for len in 1..=6 {
                let paths = enumerate_saw(from, rect, len).unwrap();
                assert_eq!(paths.len(), brute_count(from, rect, len));
                for p in &paths {
                    assert!(p.windows(2).all(|w| w[0].l1(w[1]) == 1));
                    let set: BTreeSet<_> = p.iter().collect();
                    assert_eq!(set.len(), p.len());
                }
            }
        }
    }

    #[test]
    fn budget_cap() {
        assert!(matches!(
            enumerate_saw(Site::ORIGIN, Rect::centered(3), MAX_SAW_LEN + 1),
            Err(Error::PathBudget { .. })
        ));
    }
}
