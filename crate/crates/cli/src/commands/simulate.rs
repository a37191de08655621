use std::path::Path;
use std::time::Instant;

use ddwave::sim::{dt_bound, integrate, perturbed_initial_data, SimConfig, SimRecord, Verdict};
use ddwave::stability::{critical_velocity_squared, velocity_verdict, VelocityVerdict};
use ddwave::wave::suggested_length;
use ddwave::{Error, Grid, ModelParams, WaveContext};
use rayon::prelude::*;
use serde::Serialize;

use crate::cli::{RunArgs, SimulateArgs, SweepArgs};
use crate::commands::pool;
use crate::error::CliResult;
use crate::output::{fmt_f64, write_csv, RunManifest};

/// Scalar summary of one run, shared by `simulate` and `sweep`.
#[derive(Debug, Clone, Serialize)]
struct RunSummary {
    c: f64,
    c2: f64,
    c0_sq: f64,
    prediction: VelocityVerdict,
    length: f64,
    n_points: usize,
    lambda: f64,
    h_cut: f64,
    t_end: f64,
    dt_requested: f64,
    dt: f64,
    dt_bound: f64,
    steps: usize,
    perturbation_distance: f64,
    verdict: &'static str,
    t_star: Option<f64>,
    energy_drift: Option<f64>,
    momentum_drift: Option<f64>,
    orbital_dist_initial: Option<f64>,
    orbital_dist_max: Option<f64>,
    /// `max / initial`, omitted when the initial distance is at rounding level.
    orbit_growth: Option<f64>,
    max_imag_residue: Option<f64>,
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Completed => "completed",
        Verdict::BlowUpDetected { .. } => "blow_up_detected",
        Verdict::StepRejected { .. } => "step_rejected",
    }
}

fn execute(params: ModelParams, c: f64, args: &RunArgs) -> CliResult<(RunSummary, Option<SimRecord>)> {
    let ctx = WaveContext::new(params, c)?;
    let length = args.grid.length.unwrap_or_else(|| suggested_length(&ctx));
    let grid = Grid::new(length, args.grid.n)?;
    let data = perturbed_initial_data(&ctx, args.lambda, args.h_cut, &grid)?;
    let mut cfg = SimConfig::new(&grid, &params, args.t_end).with_orbit(ctx);
    if let Some(dt) = args.dt {
        cfg.dt = dt;
    }
    cfg.record_every = args.record_every;
    cfg.blow_threshold = args.blow_threshold;
    cfg.dealias = !args.no_dealias;
    let bound = dt_bound(&grid, &params);

    let mut summary = RunSummary {
        c,
        c2: ctx.c2(),
        c0_sq: critical_velocity_squared(&params),
        prediction: velocity_verdict(&ctx)?,
        length,
        n_points: grid.len(),
        lambda: args.lambda,
        h_cut: args.h_cut,
        t_end: args.t_end,
        dt_requested: cfg.dt,
        dt: cfg.dt,
        dt_bound: bound,
        steps: 0,
        perturbation_distance: data.distance,
        verdict: "step_rejected",
        t_star: None,
        energy_drift: None,
        momentum_drift: None,
        orbital_dist_initial: None,
        orbital_dist_max: None,
        orbit_growth: None,
        max_imag_residue: None,
    };
    let rec = match integrate(&data.state, &params, &cfg) {
        Ok(rec) => rec,
        Err(Error::StepRejected { .. }) => return Ok((summary, None)),
        Err(e) => return Err(e.into()),
    };
    summary.dt = rec.dt;
    summary.steps = rec.steps;
    summary.verdict = verdict_name(&rec.verdict);
    if let Verdict::BlowUpDetected { t_star } = rec.verdict {
        summary.t_star = Some(t_star);
    }
    summary.energy_drift = Some(rec.energy_drift());
    summary.momentum_drift = Some(rec.momentum_drift());
    summary.max_imag_residue = Some(rec.max_imag_residue);
    if let Some(d) = &rec.orbital_dist {
        let (d0, dmax) = (d[0], d.iter().fold(0.0f64, |m, &x| m.max(x)));
        summary.orbital_dist_initial = Some(d0);
        summary.orbital_dist_max = Some(dmax);
        summary.orbit_growth = (d0 > 1e-8).then(|| dmax / d0);
    }
    Ok((summary, Some(rec)))
}

fn record_csv(path: &Path, rec: &SimRecord) -> CliResult<()> {
    let file = std::fs::File::create(path)?;
    rec.write_csv(std::io::BufWriter::new(file))?;
    Ok(())
}

fn add_run_extras(manifest: &mut RunManifest, args: &RunArgs) {
    manifest.extra("record_every", args.record_every);
    manifest.extra("blow_threshold", args.blow_threshold);
    manifest.extra("dealias", !args.no_dealias);
}

pub fn simulate(out: &Path, args: &SimulateArgs) -> CliResult<()> {
    let started = Instant::now();
    let params = args.model.params()?;
    let (summary, rec) = execute(params, args.c, &args.run)?;
    let mut manifest = RunManifest::new(out, "simulate", started)?;
    manifest.params(params);
    add_run_extras(&mut manifest, &args.run);
    if let serde_json::Value::Object(m) = serde_json::to_value(&summary)? {
        for (k, v) in m {
            manifest.extra(&k, v);
        }
    }
    match rec {
        Some(rec) => {
            manifest.adopt("run.csv")?;
            record_csv(&manifest.path("run.csv"), &rec)?;
            manifest.finish()
        }
        None => {
            manifest.finish()?;
            Err(Error::StepRejected {
                dt: summary.dt_requested,
                bound: summary.dt_bound,
            }
            .into())
        }
    }
}

pub fn sweep(out: &Path, args: &SweepArgs) -> CliResult<()> {
    let started = Instant::now();
    let params_for = |p: f64| -> CliResult<ModelParams> {
        Ok(match args.mu {
            Some(mu) => ModelParams::from_mu(args.a, mu, p)?,
            None => ModelParams::new(args.a, args.b.unwrap_or(0.0), p)?,
        })
    };
    let mut keys: Vec<(f64, f64)> = args
        .p
        .iter()
        .flat_map(|&p| args.c.iter().map(move |&c| (p, c)))
        .collect();
    keys.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    keys.dedup();
    for &(p, c) in &keys {
        WaveContext::new(params_for(p)?, c)?;
    }

    let mut manifest = RunManifest::new(out, "sweep", started)?;
    std::fs::create_dir_all(manifest.path("runs"))?;
    let names: Vec<String> = (0..keys.len()).map(|i| format!("runs/run_{i:04}.csv")).collect();
    let paths: Vec<_> = names.iter().map(|n| manifest.path(n)).collect();

    let pool = pool(args.jobs)?;
    let results = pool.install(|| {
        keys.par_iter()
            .zip(paths.par_iter())
            .map(|(&(p, c), path)| -> CliResult<(RunSummary, bool)> {
                let (summary, rec) = execute(params_for(p)?, c, &args.run)?;
                if let Some(rec) = &rec {
                    record_csv(path, rec)?;
                }
                Ok((summary, rec.is_some()))
            })
            .collect::<Vec<_>>()
    });

    let header = [
        "p", "c", "c2", "c0_sq", "prediction", "verdict", "t_star", "orbit_growth",
        "energy_drift", "momentum_drift", "file",
    ];
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    let mut rows = vec![];
    for ((&(p, _), name), res) in keys.iter().zip(&names).zip(results) {
        let (s, written) = res?;
        if written {
            manifest.adopt(name)?;
        }
        let prediction = serde_json::to_value(s.prediction)?;
        rows.push(vec![
            fmt_f64(p),
            fmt_f64(s.c),
            fmt_f64(s.c2),
            fmt_f64(s.c0_sq),
            prediction.as_str().unwrap_or_default().to_string(),
            s.verdict.to_string(),
            opt(s.t_star),
            opt(s.orbit_growth),
            opt(s.energy_drift),
            opt(s.momentum_drift),
            if written { name.clone() } else { String::new() },
        ]);
    }
    manifest.adopt("sweep.csv")?;
    write_csv(&manifest.path("sweep.csv"), &header, rows)?;

    manifest.extra("a", args.a);
    manifest.extra("b", args.b);
    manifest.extra("mu", args.mu);
    manifest.extra("p_values", &args.p);
    manifest.extra("c_values", &args.c);
    manifest.extra("lambda", args.run.lambda);
    manifest.extra("h_cut", args.run.h_cut);
    manifest.extra("t_end", args.run.t_end);
    manifest.extra("n_points", args.run.grid.n);
    manifest.extra("length", args.run.grid.length);
    manifest.extra("dt", args.run.dt);
    add_run_extras(&mut manifest, &args.run);
    manifest.finish()
}
