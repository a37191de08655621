use std::path::Path;
use std::time::Instant;

use ddwave::stability::{classify_region, critical_mu, g_eval, roots_in_unit_interval, RegionReport};
use rayon::prelude::*;
use serde::Serialize;

use crate::cli::{AtlasArgs, RegionArgs};
use crate::commands::pool;
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, RunManifest};

#[derive(Debug, Serialize)]
struct FlatRegion {
    p: f64,
    mu: f64,
    kind: ddwave::stability::RegionKind,
    roots_in_unit: Vec<f64>,
    interval_lo: Option<f64>,
    interval_hi: Option<f64>,
}

impl From<RegionReport> for FlatRegion {
    fn from(r: RegionReport) -> Self {
        Self {
            p: r.p,
            mu: r.mu,
            kind: r.kind,
            roots_in_unit: r.roots_in_unit,
            interval_lo: r.interval.map(|i| i.0),
            interval_hi: r.interval.map(|i| i.1),
        }
    }
}

pub fn run(out: &Path, args: &RegionArgs) -> CliResult<()> {
    let started = Instant::now();
    let mus = args.mus()?;
    if args.samples < 2 {
        return Err(CliError::Usage("--samples must be >= 2".into()));
    }
    let reports = mus
        .iter()
        .map(|&mu| classify_region(args.p, mu).map(FlatRegion::from))
        .collect::<Result<Vec<_>, _>>()?;

    let mut manifest = RunManifest::new(out, "region", started)?;
    manifest.extra("p", args.p);
    manifest.extra("mu", &mus);
    manifest.extra("samples", args.samples);
    manifest.json("region.json", &reports)?;
    let n = args.samples;
    let rows = mus.iter().flat_map(|&mu| {
        (0..n).map(move |i| {
            let z = i as f64 / (n - 1) as f64;
            vec![fmt_f64(z), fmt_f64(mu), fmt_f64(g_eval(z, args.p, mu))]
        })
    });
    manifest.csv("gcurve.csv", &["z", "mu", "G"], rows)?;
    manifest.finish()
}

pub fn atlas(out: &Path, args: &AtlasArgs) -> CliResult<()> {
    let started = Instant::now();
    if !(args.p_min > 1.0 && args.p_min < args.p_max && args.p_max <= 12.0) {
        return Err(CliError::Usage(format!(
            "need 1 < p-min < p-max <= 12 (got {}, {})",
            args.p_min, args.p_max
        )));
    }
    if let Some(bad) = args.mu.iter().find(|m| !(0.0..=1.0).contains(*m)) {
        return Err(CliError::Usage(format!("mu must lie in [0, 1] (got {bad})")));
    }
    if args.resolution < 2 {
        return Err(CliError::Usage("--resolution must be >= 2".into()));
    }
    let step = (args.p_max - args.p_min) / (args.resolution - 1) as f64;
    let ps: Vec<f64> = (0..args.resolution)
        .map(|i| args.p_min + i as f64 * step)
        .collect();

    let pool = pool(args.jobs)?;
    let (zero_set, mucrit) = pool.install(|| -> CliResult<_> {
        let zero_set = args
            .mu
            .par_iter()
            .flat_map(|&mu| ps.par_iter().map(move |&p| (mu, p)))
            .map(|(mu, p)| roots_in_unit_interval(p, mu).map(|r| (mu, p, r)))
            .collect::<Result<Vec<_>, _>>()?;
        let mucrit = ps
            .par_iter()
            .filter(|&&p| p > 5.0)
            .map(|&p| critical_mu(p).map(|m| (p, m)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((zero_set, mucrit))
    })?;

    let mut manifest = RunManifest::new(out, "atlas", started)?;
    manifest.extra("p_min", args.p_min);
    manifest.extra("p_max", args.p_max);
    manifest.extra("mu", &args.mu);
    manifest.extra("resolution", args.resolution);
    let rows = zero_set.iter().flat_map(|(mu, p, roots)| {
        roots.iter().enumerate().map(move |(i, z)| {
            vec![fmt_f64(*mu), fmt_f64(*p), fmt_f64(*z), (i + 1).to_string()]
        })
    });
    manifest.csv("atlas.csv", &["mu", "p", "z_root", "root_index"], rows)?;
    let rows = mucrit.iter().map(|(p, m)| vec![fmt_f64(*p), fmt_f64(*m)]);
    manifest.csv("mucrit.csv", &["p", "mu_crit"], rows)?;
    manifest.finish()
}
