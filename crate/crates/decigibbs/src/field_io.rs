//! Plain-text spin fields.
//!
//! ```text
//! n=2 bc=+
//! +++-+
//! ++--+
//! +++++
//! +-+++
//! +++++
//! ```
//!
//! The header gives the half-width `n` and the boundary condition
//! (`+`, `-`, `free` or `fixed`). Rows run from `y = n` down to `y = -n` and
//! columns from `x = -n` to `x = n`. With `bc=fixed` the file holds `2n + 3`
//! rows of `2n + 3` characters: the outer row and column on each side are the
//! ring and the four corners are written as `.`. Lines starting with `#` are
//! comments.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use decigibbs_core::{Boundary, Rect, Site, Spin, SpinField};

fn spin_char(c: char) -> Result<Spin> {
    match c {
        '+' => Ok(Spin::Plus),
        '-' => Ok(Spin::Minus),
        other => bail!("unexpected character {other:?} in spin row"),
    }
}

pub fn parse_field(text: &str) -> Result<SpinField> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| anyhow!("empty field file"))?;
    let mut n = None;
    let mut bc = None;
    for part in header.split_whitespace() {
        match part.split_once('=') {
            Some(("n", v)) => n = Some(v.parse::<u32>().context("half-width")?),
            Some(("bc", v)) => bc = Some(v.to_string()),
            _ => bail!("unrecognised header entry {part:?}"),
        }
    }
    let n = n.ok_or_else(|| anyhow!("header lacks n="))?;
    let bc = bc.ok_or_else(|| anyhow!("header lacks bc="))?;
    let rows: Vec<&str> = lines.collect();
    let rect = Rect::centered(n);
    let fixed = bc == "fixed";
    let pad = fixed as i32;
    let side = 2 * n as usize + 1 + 2 * pad as usize;
    if rows.len() != side || rows.iter().any(|r| r.chars().count() != side) {
        bail!("expected {side} rows of {side} characters");
    }
    let at = |s: Site| -> char {
        let row = (n as i32 + pad - s.y) as usize;
        let col = (s.x + n as i32 + pad) as usize;
        rows[row].chars().nth(col).unwrap()
    };
    let values = rect.sites().map(|s| spin_char(at(s))).collect::<Result<Vec<_>>>()?;
    let boundary = match bc.as_str() {
        "+" => Boundary::Plus,
        "-" => Boundary::Minus,
        "free" => Boundary::Free,
        "fixed" => {
            let ring: BTreeMap<Site, Spin> =
                rect.ring().into_iter().map(|s| Ok((s, spin_char(at(s))?))).collect::<Result<_>>()?;
            Boundary::Fixed(ring)
        }
        other => bail!("unknown boundary condition {other:?}"),
    };
    Ok(SpinField::new(rect, values, boundary)?)
}

pub fn format_field(field: &SpinField) -> Result<String> {
    let n = field
        .rect()
        .half_width()
        .ok_or_else(|| anyhow!("only centered square boxes have a text form"))?;
    let (tag, ring) = match field.boundary() {
        Boundary::Plus => ("+", None),
        Boundary::Minus => ("-", None),
        Boundary::Free => ("free", None),
        Boundary::Fixed(map) => ("fixed", Some(map)),
    };
    let mut out = String::new();
    writeln!(out, "n={n} bc={tag}")?;
    let r = n as i32 + ring.is_some() as i32;
    for y in (-r..=r).rev() {
        for x in -r..=r {
            let s = Site::new(x, y);
            let c = match field.get(s) {
                Some(v) => v.symbol(),
                None => ring.and_then(|m| m.get(&s)).map_or('.', |v| v.symbol()),
            };
            out.push(c);
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_plain_and_fixed() {
        let rect = Rect::centered(2);
        let f = SpinField::from_fn(rect, Boundary::Minus, |s| Spin::from_bit((s.x * 3 + s.y) % 2 == 0)).unwrap();
        assert_eq!(parse_field(&format_field(&f).unwrap()).unwrap(), f);
        let ring = rect.ring().into_iter().map(|s| (s, Spin::from_bit(s.x > 0))).collect();
        let g = SpinField::new(rect, f.values().to_vec(), Boundary::Fixed(ring)).unwrap();
        let text = format_field(&g).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with('.'));
        assert_eq!(parse_field(&text).unwrap(), g);
    }

    #[test]
    fn orientation() {
        let f = parse_field("# comment\nn=1 bc=+\n-++\n+++\n++-\n").unwrap();
        assert_eq!(f.get(Site::new(-1, 1)), Some(Spin::Minus));
        assert_eq!(f.get(Site::new(1, -1)), Some(Spin::Minus));
        assert_eq!(f.get(Site::ORIGIN), Some(Spin::Plus));
        assert!(parse_field("n=1 bc=+\n+++\n").is_err());
        assert!(parse_field("n=1 bc=?\n+++\n+++\n+++\n").is_err());
    }
}
