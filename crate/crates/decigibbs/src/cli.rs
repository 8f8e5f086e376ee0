//! Command-line surface: argument types, dispatch and exit codes.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::commands;
use crate::config::{expand_args, SEED_ENV};
use crate::output::{git_describe, write_run, Layout, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "decigibbs", version, about = "Experiments on the decimated two-dimensional Ising model")]
pub struct Cli {
    /// Flat TOML file of default flags for the subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overwrite existing output files.
    #[arg(long, global = true)]
    pub force: bool,
    /// Worker threads for independent legs (results do not depend on it).
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Exact kernel table on the box [-n, n]^2.
    #[command(args_override_self = true)]
    Kernel(KernelArgs),
    /// Metropolis or Wolff chain, one row per epoch and observable.
    #[command(args_override_self = true)]
    Sample(SampleArgs),
    /// Restrict a field to the even sublattice.
    #[command(args_override_self = true)]
    Decimate(DecimateArgs),
    /// P(σ'_0 = +) under plus and minus far boundaries for growing windows.
    #[command(args_override_self = true)]
    ProbeDiscontinuity(ProbeArgs),
    /// Telescoped potential terms of an image configuration.
    #[command(args_override_self = true)]
    Potential(PotentialArgs),
    /// Benign share of amoebas by diameter in sampled configurations.
    #[command(args_override_self = true)]
    AmoebaCensus(CensusArgs),
    /// Quenched decay of the telescoped potential on sampled image fields.
    #[command(args_override_self = true)]
    Qcd(QcdArgs),
    /// Block entropy or relative entropy density of sampled fields.
    #[command(args_override_self = true)]
    Entropy(EntropyArgs),
    /// Re-run a manifest and compare its outputs byte for byte.
    #[command(args_override_self = true)]
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Bc {
    #[value(name = "+")]
    #[serde(rename = "+")]
    Plus,
    #[value(name = "-")]
    #[serde(rename = "-")]
    Minus,
    #[value(name = "free")]
    #[serde(rename = "free")]
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Metropolis,
    Wolff,
}

/// Values frozen on the even sites of the box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FreezeEven {
    None,
    Plus,
    Minus,
    Alternating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialMode {
    Exact,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Boxes,
    Saw,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct KernelArgs {
    /// Half-width n of the box [-n, n]^2.
    #[arg(long = "box")]
    pub half_width: u32,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub h: f64,
    #[arg(long, value_enum, default_value = "+")]
    pub bc: Bc,
    /// CSV destination; the table goes to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SampleArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub h: f64,
    /// Half-width of the box.
    #[arg(long, default_value_t = 8)]
    pub n: u32,
    #[arg(long, value_enum, default_value = "+")]
    pub bc: Bc,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub sweeps: usize,
    #[arg(long, default_value_t = 1_000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 1)]
    pub thin: usize,
    #[arg(long, value_enum, default_value = "metropolis")]
    pub algorithm: Algorithm,
    #[arg(long, value_enum, default_value = "none")]
    pub freeze_even: FreezeEven,
    /// Comma-separated: `magnetization`, `spin:x:y`, `product:x:y/x:y/...`.
    #[arg(long, default_value = "magnetization")]
    pub observables: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DecimateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ProbeArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long, value_delimiter = ',', default_value = "16,32,48")]
    pub windows: Vec<u32>,
    /// `alternating`, `all-plus`, or a field file of image spins (its
    /// boundary condition fills the rest of the lattice).
    #[arg(long, default_value = "alternating")]
    pub pattern: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 20_000)]
    pub sweeps: usize,
    #[arg(long, default_value_t = 2_000)]
    pub burn_in: usize,
    /// Combined standard errors a gap must exceed to be reported significant.
    #[arg(long, default_value_t = 5.0)]
    pub threshold: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PotentialArgs {
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: PotentialMode,
    /// Image site as `x,y`.
    #[arg(long, default_value = "0,0")]
    pub site: String,
    #[arg(long)]
    pub mmax: u32,
    /// Image configuration; its boundary condition fills the rest.
    #[arg(long)]
    pub field: PathBuf,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub h: f64,
    /// Original-lattice window size W (box [-W/2, W/2]^2).
    #[arg(long, default_value_t = 12)]
    pub window: u32,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 20_000)]
    pub sweeps: usize,
    #[arg(long, default_value_t = 2_000)]
    pub burn_in: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CensusArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.25)]
    pub lambda: f64,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Half-width of the sampled box.
    #[arg(long, default_value_t = 16)]
    pub n: u32,
    /// Lower edges of the diameter bins.
    #[arg(long, value_delimiter = ',', default_value = "0,4,8,16")]
    pub bins: Vec<u32>,
    /// Independent chains sharing the samples.
    #[arg(long, default_value_t = 4)]
    pub chains: usize,
    #[arg(long, default_value_t = 2_000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 10)]
    pub thin: usize,
    #[arg(long, value_enum, default_value = "none")]
    pub freeze_even: FreezeEven,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct QcdArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 5)]
    pub fields: usize,
    #[arg(long, default_value_t = 8)]
    pub mmax: u32,
    #[arg(long, default_value_t = 0.25)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value = "boxes")]
    pub family: Family,
    /// Longest path for the `saw` family.
    #[arg(long, default_value_t = 8)]
    pub saw_len: usize,
    /// Image half-width of each sampled field.
    #[arg(long, default_value_t = 12)]
    pub proxy_n: u32,
    #[arg(long, default_value_t = 2_000)]
    pub proxy_sweeps: usize,
    /// Window of the term chains; defaults to `4 mmax + 4`.
    #[arg(long)]
    pub term_window: Option<u32>,
    #[arg(long, default_value_t = 4_000)]
    pub term_sweeps: usize,
    #[arg(long, default_value_t = 500)]
    pub term_burn_in: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EntropyArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 8)]
    pub n: u32,
    #[arg(long, default_value_t = 2_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1_000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 5)]
    pub thin: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub k: Vec<usize>,
    /// Boundary of the sampled law μ.
    #[arg(long, value_enum, default_value = "+")]
    pub mu_bc: Bc,
    /// Boundary of the reference law ν; without it the block entropy of μ is reported.
    #[arg(long, value_enum)]
    pub nu_bc: Option<Bc>,
    /// Decimate every sample before counting blocks.
    #[arg(long)]
    pub decimated: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Directory for the replayed outputs (default: `replay` next to the manifest).
    #[arg(long)]
    pub into: Option<PathBuf>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Kernel(_) => "kernel",
            Command::Sample(_) => "sample",
            Command::Decimate(_) => "decimate",
            Command::ProbeDiscontinuity(_) => "probe-discontinuity",
            Command::Potential(_) => "potential",
            Command::AmoebaCensus(_) => "amoeba-census",
            Command::Qcd(_) => "qcd",
            Command::Entropy(_) => "entropy",
            Command::Replay(_) => "replay",
        }
    }

    pub fn seeds(&self) -> Vec<u64> {
        match self {
            Command::Sample(a) => vec![a.seed],
            Command::ProbeDiscontinuity(a) => vec![a.seed],
            Command::Potential(a) => vec![a.seed],
            Command::AmoebaCensus(a) => vec![a.seed],
            Command::Qcd(a) => vec![a.seed],
            Command::Entropy(a) => vec![a.seed],
            _ => Vec::new(),
        }
    }

    /// Output placement, `None` when the command prints to stdout.
    pub fn layout(&self) -> Option<Layout> {
        match self {
            Command::Kernel(a) => a.out.clone().map(Layout::File),
            Command::Sample(a) => Some(Layout::File(a.out.clone())),
            Command::Decimate(a) => Some(Layout::File(a.out.clone())),
            Command::ProbeDiscontinuity(a) => Some(Layout::File(a.out.clone())),
            Command::Potential(a) => Some(Layout::File(a.out.clone())),
            Command::AmoebaCensus(a) => Some(Layout::File(a.out.clone())),
            Command::Qcd(a) => Some(Layout::Dir(a.out.clone())),
            Command::Entropy(a) => Some(Layout::File(a.out.clone())),
            Command::Replay(_) => None,
        }
    }

    /// The same run with its outputs moved into `dir`.
    pub fn redirected(&self, dir: &std::path::Path) -> Command {
        let file = |p: &PathBuf| dir.join(p.file_name().unwrap_or_default());
        let mut c = self.clone();
        match &mut c {
            Command::Kernel(a) => a.out = a.out.as_ref().map(file),
            Command::Sample(a) => a.out = file(&a.out),
            Command::Decimate(a) => a.out = file(&a.out),
            Command::ProbeDiscontinuity(a) => a.out = file(&a.out),
            Command::Potential(a) => a.out = file(&a.out),
            Command::AmoebaCensus(a) => a.out = file(&a.out),
            Command::Qcd(a) => a.out = dir.to_path_buf(),
            Command::Entropy(a) => a.out = file(&a.out),
            Command::Replay(_) => {}
        }
        c
    }
}

/// Runs one command, writing its outputs and manifest.
pub fn execute(command: &Command, threads: usize, force: bool) -> Result<()> {
    if let Command::Replay(args) = command {
        return commands::replay(args, threads, force);
    }
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build()?;
    let files = pool.install(|| commands::run(command))?;
    match command.layout() {
        None => {
            for f in &files {
                print!("{}", f.contents);
            }
        }
        Some(layout) => {
            let manifest = RunManifest {
                command: command.name().into(),
                params: command.clone(),
                seeds: command.seeds(),
                threads,
                git_describe: git_describe(),
                outputs: files.iter().map(|f| f.name.clone()).collect(),
                wall_clock_secs: started.elapsed().as_secs_f64(),
            };
            write_run(&layout, &files, &manifest, force)?;
        }
    }
    Ok(())
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run(args: Vec<OsString>) -> i32 {
    let args = match expand_args(args, std::env::var(SEED_ENV).ok()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command, cli.threads, cli.force) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_RUNTIME
        }
    }
}
