use alloc::format;
use alloc::vec;

use crate::decimation::EvenConstraint;
use crate::error::{Error, Result};
use crate::lattice::{for_each_saw, Rect, Site, Spin};

/// The family of sets `T` over which the density bound is required.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetFamily {
    /// Axis-parallel squares of the image lattice containing the site.
    Boxes,
    /// Self-avoiding image-lattice paths starting at the site, up to `max_len` steps.
    Saw { max_len: usize },
}

impl SetFamily {
    pub fn tag(&self) -> &'static str {
        match self {
            SetFamily::Boxes => "boxes",
            SetFamily::Saw { .. } => "saw",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthValue {
    Finite(u32),
    /// The bound already fails for the largest set the window allows.
    InfiniteWithinWindow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchedLength {
    /// Image-lattice site `i` (original position `2i`).
    pub site: Site,
    pub lambda: f64,
    pub family: SetFamily,
    pub value: LengthValue,
}

/// Image-lattice rectangle whose doubled sites are the even sites of `window`.
pub fn image_window(window: Rect) -> Rect {
    let lo = |a: i32| a.div_euclid(2) + (a.rem_euclid(2) != 0) as i32;
    let hi = |b: i32| b.div_euclid(2);
    let (x0, x1, y0, y1) = (lo(window.x0), hi(window.x1()), lo(window.y0), hi(window.y1()));
    Rect::new(x0, y0, (x1 - x0 + 1).max(0) as usize, (y1 - y0 + 1).max(0) as usize)
}

/// The smallest `l` such that every member `T` of `family` through `i` with
/// `diam(T) > l` has `|T ∩ D(ξ)| ≤ λ |T|`, within the window of `ξ`.
/// Sizes are counted in image-lattice sites and diameters in image L∞ units.
pub fn quenched_length(xi: &EvenConstraint, i: Site, lambda: f64, family: SetFamily) -> Result<QuenchedLength> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter(format!("lambda must lie in (0, 1), got {lambda}")));
    }
    let img = image_window(xi.window());
    if !img.contains(i) {
        return Err(Error::Precondition(format!("{} is outside the window", i.doubled())));
    }
    let minus = |s: Site| xi.get(s.doubled()) == Some(Spin::Minus);
    let value = match family {
        SetFamily::Boxes => boxes_length(img, i, lambda, minus),
        SetFamily::Saw { max_len } => saw_length(img, i, lambda, max_len, minus)?,
    };
    Ok(QuenchedLength {
        site: i,
        lambda,
        family,
        value,
    })
}

fn boxes_length(img: Rect, i: Site, lambda: f64, minus: impl Fn(Site) -> bool) -> LengthValue {
    let (w, h) = (img.width, img.height);
    // prefix[x][y] counts minus sites in [x0, x0 + x) x [y0, y0 + y)
    let mut prefix = vec![vec![0u32; h + 1]; w + 1];
    for x in 0..w {
        for y in 0..h {
            let m = minus(Site::new(img.x0 + x as i32, img.y0 + y as i32)) as u32;
            prefix[x + 1][y + 1] = m + prefix[x][y + 1] + prefix[x + 1][y] - prefix[x][y];
        }
    }
    let (ix, iy) = ((i.x - img.x0) as usize, (i.y - img.y0) as usize);
    let largest = w.min(h);
    for side in (1..=largest).rev() {
        let xs = ix.saturating_sub(side - 1)..=ix.min(w - side);
        for ax in xs {
            for ay in iy.saturating_sub(side - 1)..=iy.min(h - side) {
                let count = prefix[ax + side][ay + side] + prefix[ax][ay] - prefix[ax][ay + side] - prefix[ax + side][ay];
                if count as f64 > lambda * (side * side) as f64 {
                    return if side == largest {
                        LengthValue::InfiniteWithinWindow
                    } else {
                        LengthValue::Finite(side as u32 - 1)
                    };
                }
            }
        }
    }
    LengthValue::Finite(0)
}

fn saw_length(img: Rect, i: Site, lambda: f64, max_len: usize, minus: impl Fn(Site) -> bool) -> Result<LengthValue> {
    let mut worst: Option<u32> = None;
    let mut at_cap = false;
    let mut check = |path: &[Site]| {
        let count = path.iter().filter(|s| minus(**s)).count();
        if count as f64 > lambda * path.len() as f64 {
            let d = linf_diam(path);
            worst = Some(worst.map_or(d, |w| w.max(d)));
            at_cap |= path.len() == max_len + 1;
        }
    };
    check(&[i]);
    for_each_saw(i, img, max_len, check)?;
    Ok(match (at_cap, worst) {
        (true, _) => LengthValue::InfiniteWithinWindow,
        (false, Some(d)) => LengthValue::Finite(d),
        (false, None) => LengthValue::Finite(0),
    })
}

fn linf_diam(sites: &[Site]) -> u32 {
    let xs = sites.iter().map(|s| s.x);
    let ys = sites.iter().map(|s| s.y);
    let dx = xs.clone().max().unwrap().abs_diff(xs.min().unwrap());
    let dy = ys.clone().max().unwrap().abs_diff(ys.min().unwrap());
    dx.max(dy)
}

