use alloc::collections::BTreeMap;
use alloc::format;

use crate::error::{Error, Result};
use crate::lattice::{Rect, Site, Spin, SpinField};
use crate::math;

/// Largest block side (alphabet `2^16`).
pub const MAX_BLOCK: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyEstimate {
    pub k: usize,
    /// Nats per site.
    pub value: f64,
    /// Configurations the blocks were drawn from.
    pub samples: usize,
    /// Pooled `k × k` blocks.
    pub blocks: usize,
}

/// Counts of `k × k` block patterns over every position of every sample.
/// Bit `dx·k + dy` of a pattern is set when that block site is `+`.
fn block_counts(fields: &[SpinField], k: usize) -> Result<(BTreeMap<u32, u64>, u64, Rect)> {
    if k == 0 || k > MAX_BLOCK {
        return Err(Error::InvalidParameter(format!("block side {k} outside 1..={MAX_BLOCK}")));
    }
    let rect = fields
        .first()
        .ok_or_else(|| Error::InvalidParameter("no samples".into()))?
        .rect();
    if fields.iter().any(|f| f.rect() != rect) {
        return Err(Error::SizeMismatch("samples live on different boxes".into()));
    }
    if rect.width < k || rect.height < k {
        return Err(Error::SizeMismatch(format!("block side {k} exceeds the box")));
    }
    let mut counts = BTreeMap::new();
    let mut total = 0;
    for f in fields {
        for x in rect.x0..=rect.x1() + 1 - k as i32 {
            for y in rect.y0..=rect.y1() + 1 - k as i32 {
                let mut pattern = 0u32;
                for dx in 0..k {
                    for dy in 0..k {
                        if f.get(Site::new(x + dx as i32, y + dy as i32)) == Some(Spin::Plus) {
                            pattern |= 1 << (dx * k + dy);
                        }
                    }
                }
                *counts.entry(pattern).or_insert(0) += 1;
                total += 1;
            }
        }
    }
    Ok((counts, total, rect))
}

/// Plug-in block entropy `−Σ p ln p / k²` from pooled sliding blocks.
pub fn ks_entropy(fields: &[SpinField], k: usize) -> Result<EntropyEstimate> {
    let (counts, total, _) = block_counts(fields, k)?;
    let n = total as f64;
    let h: f64 = counts
        .values()
        .map(|c| {
            let p = *c as f64 / n;
            -p * math::ln(p)
        })
        .sum();
    Ok(EntropyEstimate {
        k,
        value: h / (k * k) as f64,
        samples: fields.len(),
        blocks: total as usize,
    })
}

/// Plug-in `Σ μ(b) ln(μ(b)/ν(b)) / k²` over all `2^{k²}` block patterns,
/// both laws smoothed by adding one to every pattern count.
pub fn relative_entropy_density(mu: &[SpinField], nu: &[SpinField], k: usize) -> Result<EntropyEstimate> {
    let (cm, nm, rm) = block_counts(mu, k)?;
    let (cn, nn, rn) = block_counts(nu, k)?;
    if rm != rn {
        return Err(Error::SizeMismatch("the two sample sets live on different boxes".into()));
    }
    let alphabet = 1u64 << (k * k);
    let dm = (nm + alphabet) as f64;
    let dn = (nn + alphabet) as f64;
    let term = |a: u64, b: u64| {
        let p = (a + 1) as f64 / dm;
        let q = (b + 1) as f64 / dn;
        p * math::ln(p / q)
    };
    let mut seen = 0u64;
    let mut kl = 0.0;
    let keys: alloc::collections::BTreeSet<u32> = cm.keys().chain(cn.keys()).copied().collect();
    for key in keys {
        seen += 1;
        kl += term(cm.get(&key).copied().unwrap_or(0), cn.get(&key).copied().unwrap_or(0));
    }
    kl += (alphabet - seen) as f64 * term(0, 0);
    Ok(EntropyEstimate {
        k,
        value: kl / (k * k) as f64,
        samples: mu.len(),
        blocks: nm as usize,
    })
}
