//! Randomized invariant suite. Each invariant draws from its own ChaCha
//! stream so adding or reordering checks never perturbs the others.

use std::path::Path;
use std::time::Instant;

use ddwave::sim::{integrate, SimConfig, StatePair};
use ddwave::stability::{
    alpha_and_c, classify_region, critical_velocity_squared, d_second_derivative_fd,
    g_coefficients, g_eval, quartic_k, roots_in_unit_interval, sigma_with, AlphaC,
};
use ddwave::wave::{
    energy_momentum, functionals, ode_residual, pohozaev_residuals, profile_grid,
    profile_on_grid,
};
use ddwave::{Grid, ModelParams, WaveContext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cli::VerifyArgs;
use crate::error::{CliError, CliResult};
use crate::output::RunManifest;

#[derive(Debug, Serialize)]
struct InvariantResult {
    name: &'static str,
    samples: usize,
    worst: f64,
    tol: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    seed: u64,
    passed: bool,
    invariants: Vec<InvariantResult>,
}

type AlphaCFn = fn(&WaveContext) -> ddwave::Result<AlphaC>;

fn corrupted_alpha_c(ctx: &WaveContext) -> ddwave::Result<AlphaC> {
    let mut ac = alpha_and_c(ctx)?;
    ac.c_const *= 1.0 + 1e-3;
    Ok(ac)
}

struct Suite {
    seed: u64,
    alpha_c: AlphaCFn,
    results: Vec<InvariantResult>,
}

impl Suite {
    fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.results.len() as u64);
        rng
    }

    fn check(&mut self, name: &'static str, samples: usize, tol: f64, worst: f64) {
        self.results.push(InvariantResult {
            name,
            samples,
            worst,
            tol,
            pass: worst <= tol,
        });
    }
}

fn random_params(rng: &mut ChaCha8Rng) -> ModelParams {
    let a = rng.gen_range(0.1..10.0);
    let mu = rng.gen_range(0.0..0.99);
    let p = rng.gen_range(1.05..12.0);
    ModelParams::from_mu(a, mu, p).expect("sampled inside the admissible range")
}

fn random_ctx(rng: &mut ChaCha8Rng, c_max: f64) -> WaveContext {
    let params = random_params(rng);
    let c = rng.gen_range(0.01..c_max);
    WaveContext::new(params, c).expect("sampled inside the admissible range")
}

fn bumps(rng: &mut ChaCha8Rng, grid: &Grid) -> Vec<f64> {
    let n = rng.gen_range(1..5);
    let b: Vec<(f64, f64, f64)> = (0..n)
        .map(|_| (rng.gen_range(-2.0..2.0), rng.gen_range(-8.0..8.0), rng.gen_range(0.7..3.0)))
        .collect();
    grid.points()
        .iter()
        .map(|&x| b.iter().map(|&(h, x0, w)| h * (-((x - x0) / w).powi(2)).exp()).sum())
        .collect()
}

fn max_nan(m: f64, x: f64) -> f64 {
    if x.is_nan() || m.is_nan() {
        f64::NAN
    } else {
        m.max(x)
    }
}

fn algebra(s: &mut Suite) -> CliResult<()> {
    let mut rng = s.rng();
    let n = 2000;
    let mut worst = 0.0;
    for _ in 0..n {
        let params = random_params(&mut rng);
        let (a, p) = (params.a(), params.p());
        let c02 = critical_velocity_squared(&params);
        let over = (c02 - (p - 1.0) / (p + 3.0)).max(0.0);
        worst = max_nan(worst, quartic_k(c02, &params).abs() / (2.0 * a * (p + 3.0)) + over);
    }
    s.check("threshold_consistency", n, 1e-12, worst);

    let mut rng = s.rng();
    let mut mismatches = 0.0;
    for _ in 0..n {
        let ctx = random_ctx(&mut rng, 0.99);
        let c02 = critical_velocity_squared(ctx.params());
        if (ctx.c2() - c02).abs() > 1e-9 && (alpha_and_c(&ctx)?.alpha > 0.5) != (ctx.c2() < c02) {
            mismatches += 1.0;
        }
    }
    s.check("alpha_threshold_duality", n, 0.0, mismatches);

    let mut rng = s.rng();
    let n_sigma = 10_000;
    let mut worst = 0.0;
    for _ in 0..n_sigma {
        let ctx = random_ctx(&mut rng, 0.999);
        worst = max_nan(worst, sigma_with(&ctx, s.alpha_c)?.abs());
    }
    s.check("sigma_residual", n_sigma, 1e-9, worst);

    let mut rng = s.rng();
    let mut worst = 0.0;
    for _ in 0..n {
        let p = rng.gen_range(1.05..12.0);
        let mu = rng.gen_range(0.0..=1.0);
        let want = (mu - 1.0f64).powi(2) * (p + 3.0) * (5.0 - p);
        worst = max_nan(worst, (g_eval(1.0, p, mu) - want).abs() / (p + 3.0).powi(2));
    }
    s.check("g_endpoint", n, 1e-12, worst);

    let mut rng = s.rng();
    let mut worst = 0.0;
    for _ in 0..n {
        let mu: f64 = rng.gen_range(0.0..=1.0);
        let z: f64 = rng.gen_range(0.0..3.0);
        let f = 16.0 * (z - 1.0) * (6.0 * mu * mu * z * z - 9.0 * mu * z + mu + 2.0);
        let scale = g_coefficients(5.0, mu).scale() * (1.0 + z).powi(3);
        worst = max_nan(worst, (g_eval(z, 5.0, mu) - f).abs() / scale);
    }
    s.check("g_factorization_p5", n, 1e-12, worst);

    let mut rng = s.rng();
    let mut worst = 0.0;
    for _ in 0..n {
        let p: f64 = rng.gen_range(1.05..12.0);
        let z: f64 = rng.gen_range(0.0..3.0);
        let f = 2.0 * (p + 1.0) * (p + 3.0) * (z - (p - 1.0) / (p + 3.0)) * (z - 1.0).powi(2);
        let scale = g_coefficients(p, 1.0).scale() * (1.0 + z).powi(3);
        worst = max_nan(worst, (g_eval(z, p, 1.0) - f).abs() / scale);
    }
    s.check("g_factorization_mu1", n, 1e-12, worst);

    let mut rng = s.rng();
    let n_roots = 500;
    let mut mismatches = 0.0;
    for _ in 0..n_roots {
        let p = if rng.gen_bool(0.5) { rng.gen_range(1.1..4.9) } else { rng.gen_range(5.1..12.0) };
        let mu = rng.gen_range(0.0..0.99);
        let odd = roots_in_unit_interval(p, mu)?.len() % 2 == 1;
        if odd != (g_eval(1.0, p, mu) > 0.0) || odd != (p < 5.0) {
            mismatches += 1.0;
        }
    }
    s.check("root_count_parity", n_roots, 0.0, mismatches);

    let mut rng = s.rng();
    let mut mismatches = 0.0;
    for _ in 0..n_roots {
        let p = rng.gen_range(1.1..12.0);
        let mu = rng.gen_range(0.0..0.99);
        let z: f64 = rng.gen_range(1e-6..1.0 - 1e-6);
        let rep = classify_region(p, mu)?;
        if rep.roots_in_unit.iter().all(|r| (r - z).abs() > 1e-6)
            && rep.contains(z) != (g_eval(z, p, mu) > 0.0)
        {
            mismatches += 1.0;
        }
    }
    s.check("region_matches_sign_of_g", n_roots, 0.0, mismatches);

    let mut rng = s.rng();
    let n_d = 200;
    let mut mismatches = 0.0;
    let mut drawn = 0;
    while drawn < n_d {
        let p = rng.gen_range(1.2..10.0);
        let mu = rng.gen_range(0.0..0.95);
        let c2: f64 = rng.gen_range(0.01..0.95);
        if roots_in_unit_interval(p, mu)?.iter().any(|r| (r - c2).abs() < 1e-2) {
            continue;
        }
        drawn += 1;
        let ctx = WaveContext::new(ModelParams::from_mu(1.0, mu, p)?, c2.sqrt())?;
        if (d_second_derivative_fd(&ctx, 1e-4)? > 0.0) != (g_eval(c2, p, mu) > 0.0) {
            mismatches += 1.0;
        }
    }
    s.check("d_second_sign", n_d, 0.0, mismatches);
    Ok(())
}

fn profiles(s: &mut Suite) -> CliResult<()> {
    let mut rng = s.rng();
    let n = 64;
    let (mut poho, mut ode) = (0.0, 0.0);
    for _ in 0..n {
        let params = random_params(&mut rng);
        let params = ModelParams::from_mu(params.a(), params.mu().min(0.9), params.p().clamp(1.5, 8.0))?;
        let ctx = WaveContext::new(params, rng.gen_range(0.0..0.9))?;
        let grid = profile_grid(&ctx, 1024)?;
        let field = profile_on_grid(&ctx, &grid)?;
        let (r1, r2) = pohozaev_residuals(&field, &ctx);
        poho = max_nan(poho, r1.abs().max(r2.abs()));
        ode = max_nan(ode, ode_residual(&field, &ctx));
    }
    s.check("pohozaev", n, 1e-8, poho);
    s.check("profile_equation", n, 1e-8, ode);

    let mut rng = s.rng();
    let n = 200;
    let grid = Grid::new(40.0, 256)?;
    let mut worst = 0.0;
    for _ in 0..n {
        let ctx = random_ctx(&mut rng, 0.9);
        let (u, w) = (bumps(&mut rng, &grid), bumps(&mut rng, &grid));
        let c = ctx.c();
        let (e, m) = energy_momentum(&grid, &u, &w, ctx.params());
        let sum: Vec<f64> = w.iter().zip(&u).map(|(w, u)| w + c * u).collect();
        let sx = grid.derivative(&sum);
        let rep = functionals(&grid, &u, &ctx, 0.0);
        let rhs = 0.5 * grid.l2_sq(&sum) + 0.5 * ctx.params().b() * grid.l2_sq(&sx) + rep.v;
        let scale = grid.l2_sq(&u) + grid.l2_sq(&w) + grid.l2_sq(&sx) + rep.norms.dx_l2_sq + rep.norms.lp1;
        worst = max_nan(worst, (e + c * m - rhs).abs() / scale);
    }
    s.check("energy_momentum_identity", n, 1e-10, worst);
    Ok(())
}

fn dynamics(s: &mut Suite) -> CliResult<()> {
    let ctx = WaveContext::new(ModelParams::new(2.0, 1.0, 3.0)?, 0.8)?;
    let grid = Grid::new(120.0, 1024)?;
    let phi = StatePair::traveling_wave(&ctx, &grid)?;
    let rec = integrate(&phi, ctx.params(), &SimConfig::new(&grid, ctx.params(), 10.0))?;
    let t = rec.final_state.t;
    let err = grid.points().iter().zip(&rec.final_state.u).fold(0.0f64, |m, (&x, u)| {
        m.max((u - ddwave::wave::solitary_profile(&ctx, grid.wrap(x - ctx.c() * t))).abs())
    });
    s.check("conservation", rec.times.len(), 1e-6, rec.energy_drift().max(rec.momentum_drift()));
    s.check("propagation", 1, 1e-5, err);
    s.check("reality", rec.steps, 1e-12, rec.max_imag_residue);
    Ok(())
}

pub fn run(out: &Path, args: &VerifyArgs) -> CliResult<()> {
    let started = Instant::now();
    let alpha_c: AlphaCFn = match args.inject_fault.as_deref() {
        None => alpha_and_c,
        Some("sigma") => corrupted_alpha_c,
        Some(other) => return Err(CliError::Usage(format!("unknown fault '{other}'"))),
    };
    let mut suite = Suite {
        seed: args.seed,
        alpha_c,
        results: vec![],
    };
    algebra(&mut suite)?;
    profiles(&mut suite)?;
    dynamics(&mut suite)?;

    let failed: Vec<String> = suite
        .results
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.name.to_string())
        .collect();
    for r in &suite.results {
        let tag = if r.pass { "ok  " } else { "FAIL" };
        eprintln!("{tag} {:<26} n={:<6} worst={:.3e} tol={:.0e}", r.name, r.samples, r.worst, r.tol);
    }
    let report = VerifyReport {
        seed: args.seed,
        passed: failed.is_empty(),
        invariants: suite.results,
    };
    let mut manifest = RunManifest::new(out, "verify", started)?;
    manifest.seed(args.seed);
    manifest.extra("inject_fault", &args.inject_fault);
    manifest.json("verify.json", &report)?;
    manifest.finish()?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::VerifyFailed(failed))
    }
}
