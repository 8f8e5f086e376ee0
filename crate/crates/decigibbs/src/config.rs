//! Configuration files and the seed override.
//!
//! A config file is a flat TOML table whose keys are long flag names of the
//! chosen subcommand (`beta = 1.0`, `burn-in = 500`, `windows = [16, 32]`,
//! `decimated = true`). Its entries are inserted right after the subcommand
//! name, followed by `--seed $DECIGIBBS_SEED` when that variable is set and
//! the subcommand takes a seed. Flags given on the command line come later
//! and win, so the precedence is
//! command line > `DECIGIBBS_SEED` > config file > built-in defaults.

use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};

pub const SEED_ENV: &str = "DECIGIBBS_SEED";

/// Global options that consume the following token.
const GLOBAL_WITH_VALUE: [&str; 2] = ["--config", "--threads"];

/// Subcommands with a `--seed` flag.
const SEEDED: [&str; 6] = ["sample", "probe-discontinuity", "potential", "amoeba-census", "qcd", "entropy"];

fn subcommand_position(args: &[OsString]) -> Option<usize> {
    let mut k = 1;
    while k < args.len() {
        let a = args[k].to_string_lossy();
        if GLOBAL_WITH_VALUE.contains(&a.as_ref()) {
            k += 2;
            continue;
        }
        if !a.starts_with('-') {
            return Some(k);
        }
        k += 1;
    }
    None
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

fn scalar(v: &toml::Value) -> Result<String> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        other => bail!("unsupported config value {other}"),
    })
}

/// Flags equivalent to the entries of a config file.
pub fn config_flags(text: &str) -> Result<Vec<OsString>> {
    let table: toml::Table = text.parse().context("config file is not valid TOML")?;
    let mut out = Vec::new();
    for (key, value) in table {
        let flag = format!("--{key}");
        match value {
            toml::Value::Boolean(true) => out.push(flag.into()),
            toml::Value::Boolean(false) => {}
            toml::Value::Array(items) => {
                let parts = items.iter().map(scalar).collect::<Result<Vec<_>>>()?;
                out.push(flag.into());
                out.push(parts.join(",").into());
            }
            toml::Value::Table(_) => bail!("nested table {key:?} in config file"),
            other => {
                out.push(flag.into());
                out.push(scalar(&other)?.into());
            }
        }
    }
    Ok(out)
}

/// Rewrites `args` with config entries and the seed override spliced in.
pub fn expand_args(args: Vec<OsString>, seed_env: Option<String>) -> Result<Vec<OsString>> {
    let Some(pos) = subcommand_position(&args) else { return Ok(args) };
    let sub = args[pos].to_string_lossy().into_owned();
    let mut inserted = Vec::new();
    if let Some(path) = config_path(&args) {
        let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        inserted.extend(config_flags(&text)?);
    }
    if let Some(seed) = seed_env.filter(|_| SEEDED.contains(&sub.as_str())) {
        inserted.push("--seed".into());
        inserted.push(seed.into());
    }
    let mut out = args[..=pos].to_vec();
    out.extend(inserted);
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn flags_from_table() {
        let f = config_flags("beta = 1.5\nwindows = [16, 32]\ndecimated = true\nforce = false\nbc = \"-\"\n").unwrap();
        assert_eq!(f, os(&["--bc", "-", "--beta", "1.5", "--decimated", "--windows", "16,32"]));
        assert!(config_flags("[nested]\na = 1\n").is_err());
    }

    #[test]
    fn seed_spliced_after_subcommand() {
        let a = expand_args(os(&["d", "--threads", "2", "qcd", "--beta", "1"]), Some("9".into())).unwrap();
        assert_eq!(a, os(&["d", "--threads", "2", "qcd", "--seed", "9", "--beta", "1"]));
        let b = expand_args(os(&["d", "kernel", "--box", "1"]), Some("9".into())).unwrap();
        assert_eq!(b, os(&["d", "kernel", "--box", "1"]));
    }
}
