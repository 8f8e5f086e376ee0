//! Subcommand bodies. Each returns its output files in memory; legs run on
//! the ambient rayon pool and are merged in a fixed order.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;

use decigibbs_core::amoeba::{amoeba_census, CensusRow, LengthValue, SetFamily};
use decigibbs_core::analysis::{
    collect_fields, derive_seed, ks_entropy, probe_leg, qcd_field, relative_entropy_density, ProbePattern,
    QcdConfig, QcdRow,
};
use decigibbs_core::decimation::{alternating, decimate, window_rect, SamplingPlan};
use decigibbs_core::potential::{telescoped_term, telescoped_term_mc, DecimatedExactSource, MemoSource};
use decigibbs_core::sampler::{sample_series, wolff_series, ChainConfig, FrozenMask, Observable};
use decigibbs_core::spec_engine::{kernel_exact, mask_config, Volume};
use decigibbs_core::{Boundary, IsingParams, Rect, Site, Spin, SpinField};

use crate::cli::*;
use crate::field_io::{format_field, parse_field};
use crate::output::{csv_text, num, read_manifest, OutFile};

pub fn run(command: &Command) -> Result<Vec<OutFile>> {
    match command {
        Command::Kernel(a) => kernel(a),
        Command::Sample(a) => sample(a),
        Command::Decimate(a) => decimate_cmd(a),
        Command::ProbeDiscontinuity(a) => probe(a),
        Command::Potential(a) => potential(a),
        Command::AmoebaCensus(a) => census(a),
        Command::Qcd(a) => qcd(a),
        Command::Entropy(a) => entropy(a),
        Command::Replay(_) => bail!("replay is handled by the dispatcher"),
    }
}

fn file_name(p: &Path) -> Result<String> {
    Ok(p.file_name()
        .ok_or_else(|| anyhow!("{} has no file name", p.display()))?
        .to_string_lossy()
        .into_owned())
}

fn one_file(out: &Path, contents: String) -> Result<Vec<OutFile>> {
    Ok(vec![OutFile {
        name: file_name(out)?,
        contents,
    }])
}

fn boundary(bc: Bc) -> Boundary {
    match bc {
        Bc::Plus => Boundary::Plus,
        Bc::Minus => Boundary::Minus,
        Bc::Free => Boundary::Free,
    }
}

fn freeze_mask(rect: Rect, freeze: FreezeEven) -> FrozenMask {
    let value = |s: Site| -> Option<Spin> {
        let i = s.halved()?;
        match freeze {
            FreezeEven::None => None,
            FreezeEven::Plus => Some(Spin::Plus),
            FreezeEven::Minus => Some(Spin::Minus),
            FreezeEven::Alternating => Some(alternating(i)),
        }
    };
    rect.sites().filter_map(|s| value(s).map(|v| (s, v))).collect()
}

fn parse_site(text: &str) -> Result<Site> {
    let parts: Vec<&str> = text.split([',', ':']).collect();
    let [x, y] = parts[..] else { bail!("expected a site as x,y, got {text:?}") };
    Ok(Site::new(x.trim().parse()?, y.trim().parse()?))
}

pub fn parse_observables(text: &str) -> Result<Vec<Observable>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            if t == "magnetization" {
                return Ok(Observable::Magnetization);
            }
            if let Some(rest) = t.strip_prefix("spin:") {
                return Ok(Observable::Spin(parse_site(rest)?));
            }
            if let Some(rest) = t.strip_prefix("product:") {
                let sites = rest.split('/').map(parse_site).collect::<Result<Vec<_>>>()?;
                return Ok(Observable::Product(sites));
            }
            bail!("unknown observable {t:?}")
        })
        .collect()
}

fn read_field(path: &Path) -> Result<SpinField> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_field(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Image values read from a field file, its boundary filling the rest.
fn image_values(field: &SpinField) -> impl Fn(Site) -> Spin + Sync + '_ {
    let fill = match field.boundary() {
        Boundary::Minus => Spin::Minus,
        _ => Spin::Plus,
    };
    move |i| field.get(i).unwrap_or(fill)
}

fn kernel(a: &KernelArgs) -> Result<Vec<OutFile>> {
    let params = IsingParams::new(a.beta, a.h)?;
    let volume = Volume::from(Rect::centered(a.half_width));
    let table = kernel_exact(&volume, &boundary(a.bc), &params)?;
    let rows = (0..table.len()).map(|mask| {
        let config: String = mask_config(mask, volume.len()).iter().map(|s| s.symbol()).collect();
        vec![mask.to_string(), config, num(table.prob(mask))]
    });
    let text = csv_text(&["mask", "config", "probability"], rows)?;
    match &a.out {
        Some(out) => one_file(out, text),
        None => Ok(vec![OutFile {
            name: String::new(),
            contents: text,
        }]),
    }
}

fn sample(a: &SampleArgs) -> Result<Vec<OutFile>> {
    let params = IsingParams::new(a.beta, a.h)?;
    let rect = Rect::centered(a.n);
    let observables = parse_observables(&a.observables)?;
    let cfg = ChainConfig::new(params, rect, boundary(a.bc), a.seed, a.sweeps)
        .with_burn_in(a.burn_in)
        .with_thin(a.thin)
        .with_mask(freeze_mask(rect, a.freeze_even));
    let series = match a.algorithm {
        Algorithm::Metropolis => sample_series(&cfg, &observables)?,
        Algorithm::Wolff => wolff_series(&cfg, &observables)?,
    };
    let labels: Vec<String> = observables.iter().map(Observable::label).collect();
    let epochs = series.columns.first().map_or(0, Vec::len);
    let rows = (0..epochs).flat_map(|e| {
        labels
            .iter()
            .zip(&series.columns)
            .map(move |(l, c)| vec![e.to_string(), l.clone(), num(c[e])])
    });
    one_file(&a.out, csv_text(&["epoch", "observable", "value"], rows)?)
}

fn decimate_cmd(a: &DecimateArgs) -> Result<Vec<OutFile>> {
    let field = read_field(&a.input)?;
    one_file(&a.out, format_field(&decimate(&field)?)?)
}

fn probe_pattern(spec: &str) -> Result<ProbePattern> {
    Ok(match spec {
        "alternating" => ProbePattern::Alternating,
        "all-plus" => ProbePattern::AllPlus,
        path => {
            let field = read_field(Path::new(path))?;
            let fill = if *field.boundary() == Boundary::Minus { Spin::Minus } else { Spin::Plus };
            let sites = field.rect().sites().map(|s| (s, field.get(s).unwrap())).collect();
            ProbePattern::Custom { sites, fill }
        }
    })
}

fn probe(a: &ProbeArgs) -> Result<Vec<OutFile>> {
    let params = IsingParams::zero_field(a.beta)?;
    let pattern = probe_pattern(&a.pattern)?;
    let plan = SamplingPlan::new(a.seed, a.sweeps, a.burn_in);
    let legs: Vec<(u32, Spin)> = a
        .windows
        .iter()
        .flat_map(|w| [(*w, Spin::Plus), (*w, Spin::Minus)])
        .collect();
    let estimates = legs
        .par_iter()
        .map(|(w, bc)| probe_leg(&params, &pattern, *w, *bc, &plan))
        .collect::<Result<Vec<_>, _>>()?;
    for (pair, w) in estimates.chunks(2).zip(&a.windows) {
        let (p, m) = (pair[0], pair[1]);
        let z = p.z_gap(&m);
        let flag = if p.mean - m.mean > a.threshold * p.combined_stderr(&m) { "significant" } else { "not significant" };
        eprintln!("window {w}: gap {} ({z:.2} combined stderr, {flag})", p.mean - m.mean);
    }
    let rows = legs.iter().zip(&estimates).map(|((w, bc), e)| {
        vec![w.to_string(), bc.symbol().to_string(), num(e.mean), num(e.stderr), e.n_samples.to_string()]
    });
    one_file(&a.out, csv_text(&["window", "bc", "p_plus", "stderr", "n_samples"], rows)?)
}

fn potential(a: &PotentialArgs) -> Result<Vec<OutFile>> {
    let params = IsingParams::new(a.beta, a.h)?;
    let site = parse_site(&a.site)?;
    let field = read_field(&a.field)?;
    let omega = image_values(&field);
    let rows: Vec<Vec<String>> = match a.mode {
        PotentialMode::Exact => {
            let source = DecimatedExactSource {
                params,
                window: window_rect(a.window),
            };
            (0..=a.mmax)
                .into_par_iter()
                .map(|m| {
                    let memo = MemoSource::new(source);
                    let v = telescoped_term(site, m, &omega, &memo)?;
                    Ok(vec![site.to_string(), m.to_string(), num(v), num(0.0)])
                })
                .collect::<Result<_>>()?
        }
        PotentialMode::Mc => (1..=a.mmax)
            .into_par_iter()
            .map(|m| {
                let plan = SamplingPlan::new(derive_seed(a.seed, &[m as u64]), a.sweeps, a.burn_in);
                let t = telescoped_term_mc(site, m, &omega, &params, a.window, &plan)?;
                Ok(vec![site.to_string(), m.to_string(), num(t.value), num(t.stderr)])
            })
            .collect::<Result<_>>()?,
    };
    one_file(&a.out, csv_text(&["i", "m", "value", "stderr"], rows)?)
}

fn census(a: &CensusArgs) -> Result<Vec<OutFile>> {
    let params = IsingParams::zero_field(a.beta)?;
    let rect = Rect::centered(a.n);
    let chains = a.chains.max(1);
    let per_chain = a.samples.div_ceil(chains);
    let legs = (0..chains)
        .into_par_iter()
        .map(|c| {
            let take = per_chain.min(a.samples.saturating_sub(c * per_chain));
            if take == 0 {
                return amoeba_census(&[], a.lambda, &a.bins).map_err(anyhow::Error::from);
            }
            let cfg = ChainConfig::new(params, rect, Boundary::Plus, derive_seed(a.seed, &[c as u64]), a.burn_in + take * a.thin)
                .with_burn_in(a.burn_in)
                .with_thin(a.thin)
                .with_mask(freeze_mask(rect, a.freeze_even));
            let fields = collect_fields(&cfg)?;
            Ok(amoeba_census(&fields, a.lambda, &a.bins)?)
        })
        .collect::<Result<Vec<Vec<CensusRow>>>>()?;
    let mut total = legs[0].clone();
    for leg in &legs[1..] {
        for (t, r) in total.iter_mut().zip(leg) {
            t.amoebas += r.amoebas;
            t.compatible += r.compatible;
            t.benign += r.benign;
        }
    }
    let rows = total.iter().map(|r| {
        vec![
            r.lo.to_string(),
            r.hi.map_or(String::new(), |h| h.to_string()),
            r.amoebas.to_string(),
            r.compatible.to_string(),
            r.benign.to_string(),
            r.benign_fraction().map_or(String::new(), num),
        ]
    });
    one_file(
        &a.out,
        csv_text(&["diam_lo", "diam_hi", "amoebas", "compatible", "benign", "benign_fraction"], rows)?,
    )
}

pub fn qcd_config(a: &QcdArgs) -> Result<QcdConfig> {
    Ok(QcdConfig {
        params: IsingParams::zero_field(a.beta)?,
        fields: a.fields,
        mmax: a.mmax,
        lambda: a.lambda,
        family: match a.family {
            Family::Boxes => SetFamily::Boxes,
            Family::Saw => SetFamily::Saw { max_len: a.saw_len },
        },
        proxy_half_width: a.proxy_n,
        proxy_sweeps: a.proxy_sweeps,
        term_window: a.term_window.unwrap_or(4 * a.mmax + 4),
        term_sweeps: a.term_sweeps,
        term_burn_in: a.term_burn_in,
        seed: a.seed,
    })
}

fn qcd(a: &QcdArgs) -> Result<Vec<OutFile>> {
    let cfg = qcd_config(a)?;
    let rows: Vec<QcdRow> = (0..cfg.fields)
        .into_par_iter()
        .map(|f| qcd_field(&cfg, f))
        .collect::<Result<_, _>>()?;
    let terms = rows.iter().flat_map(|r| {
        r.terms.iter().map(move |(m, t)| {
            vec![
                r.field.to_string(),
                r.site.to_string(),
                m.to_string(),
                num(t.value),
                num(t.stderr),
                format!("{:?}", t.status).to_lowercase(),
            ]
        })
    });
    let fits = rows.iter().map(|r| {
        let length = match r.length.value {
            LengthValue::Finite(l) => l.to_string(),
            LengthValue::InfiniteWithinWindow => "inf".into(),
        };
        let mut row = vec![
            r.field.to_string(),
            r.proxy_seed.to_string(),
            r.site.to_string(),
            r.minus_sites.to_string(),
            r.length.family.tag().into(),
            num(r.length.lambda),
            length,
        ];
        match &r.fit {
            Ok(f) => row.extend([
                num(f.c1),
                num(f.c2),
                num(f.lambda),
                num(f.lambda_stderr),
                f.used.to_string(),
                f.decays(2.0).to_string(),
                String::new(),
            ]),
            Err(e) => row.extend([
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                "0".into(),
                "false".into(),
                e.to_string(),
            ]),
        }
        row
    });
    Ok(vec![
        OutFile {
            name: "terms.csv".into(),
            contents: csv_text(&["field", "site", "m", "value", "stderr", "status"], terms)?,
        },
        OutFile {
            name: "fits.csv".into(),
            contents: csv_text(
                &[
                    "field", "proxy_seed", "site", "minus_sites", "family", "lambda", "quenched_length", "c1", "c2",
                    "decay_rate", "decay_rate_stderr", "used", "decays_2sigma", "note",
                ],
                fits,
            )?,
        },
    ])
}

fn entropy_fields(a: &EntropyArgs, bc: Bc, stream: u64) -> Result<Vec<SpinField>> {
    let params = IsingParams::zero_field(a.beta)?;
    let rect = Rect::centered(a.n);
    let cfg = ChainConfig::new(params, rect, boundary(bc), derive_seed(a.seed, &[stream]), a.burn_in + a.samples * a.thin)
        .with_burn_in(a.burn_in)
        .with_thin(a.thin);
    let fields = collect_fields(&cfg)?;
    if a.decimated {
        return fields.iter().map(|f| decimate(f).map_err(anyhow::Error::from)).collect();
    }
    Ok(fields)
}

fn entropy(a: &EntropyArgs) -> Result<Vec<OutFile>> {
    let (mu, nu) = rayon::join(
        || entropy_fields(a, a.mu_bc, 0),
        || a.nu_bc.map(|bc| entropy_fields(a, bc, 1)).transpose(),
    );
    let (mu, nu) = (mu?, nu?);
    let rows = a
        .k
        .iter()
        .map(|&k| {
            let (kind, e) = match &nu {
                Some(nu) => ("relative", relative_entropy_density(&mu, nu, k)?),
                None => ("block", ks_entropy(&mu, k)?),
            };
            Ok(vec![k.to_string(), kind.into(), num(e.value), e.samples.to_string(), e.blocks.to_string()])
        })
        .collect::<Result<Vec<_>>>()?;
    one_file(&a.out, csv_text(&["k", "kind", "value", "samples", "blocks"], rows)?)
}

/// Re-runs a manifest into a fresh directory and compares every output.
pub fn replay(a: &ReplayArgs, threads: usize, force: bool) -> Result<()> {
    let manifest = read_manifest(&a.manifest)?;
    let origin = a.manifest.parent().map(Path::to_path_buf).unwrap_or_default();
    let into: PathBuf = a.into.clone().unwrap_or_else(|| origin.join("replay"));
    let command = manifest.params.redirected(&into);
    crate::cli::execute(&command, threads, force)?;
    let mut differing = Vec::new();
    for name in &manifest.outputs {
        let before = fs::read(origin.join(name)).with_context(|| format!("reading original {name}"))?;
        let after = fs::read(into.join(name)).with_context(|| format!("reading replayed {name}"))?;
        if before == after {
            println!("identical {name}");
        } else {
            println!("differs {name}");
            differing.push(name.clone());
        }
    }
    if !differing.is_empty() {
        bail!("replay differs in {}", differing.join(", "));
    }
    Ok(())
}

