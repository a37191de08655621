//! Exact solitary waves, the variational functionals evaluated on them and
//! the scalar function `d(c)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::params::{ModelParams, WaveContext};

/// Largest admissible boundary-to-peak amplitude ratio of a sampled profile.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Grid size used when `d(c)` is evaluated by quadrature.
pub const QUADRATURE_POINTS: usize = 2048;

/// The explicit sech-power solitary wave of speed `c`, centered at `x = 0`:
///
/// `phi_c(x) = [(p+1) A / 2]^{1/(p-1)} sech^{2/(p-1)}((p-1)/2 * sqrt(A/B) * x)`.
pub fn solitary_profile(ctx: &WaveContext, x: f64) -> f64 {
    let p = ctx.params().p();
    let amp = (0.5 * (p + 1.0) * ctx.big_a()).powf(1.0 / (p - 1.0));
    let y = (0.5 * (p - 1.0) * ctx.decay_rate() * x).abs();
    // ln cosh y, stable for large y
    let ln_cosh = y + (-2.0 * y).exp().ln_1p() - std::f64::consts::LN_2;
    amp * (-2.0 / (p - 1.0) * ln_cosh).exp()
}

/// Peak value `phi_c(0)`.
pub fn profile_amplitude(ctx: &WaveContext) -> f64 {
    let p = ctx.params().p();
    (0.5 * (p + 1.0) * ctx.big_a()).powf(1.0 / (p - 1.0))
}

/// Default periodic domain length for `ctx`.
///
/// Sixty decay lengths `sqrt(B/A)`, stretched by `2/(p-1)` when the core is
/// wider than the tail scale (p < 3). This keeps the boundary ratio near
/// `e^{-30}` for every `p`.
pub fn suggested_length(ctx: &WaveContext) -> f64 {
    let p = ctx.params().p();
    60.0 * (2.0 / (p - 1.0)).max(1.0) / ctx.decay_rate()
}

/// `phi_c(L/2) / phi_c(0)`.
pub fn tail_ratio(ctx: &WaveContext, length: f64) -> f64 {
    solitary_profile(ctx, 0.5 * length) / profile_amplitude(ctx)
}

/// A profile sampled on a periodic grid.
#[derive(Debug, Clone)]
pub struct ProfileField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl ProfileField {
    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Grid of `n` points on the suggested domain for `ctx`.
pub fn profile_grid(ctx: &WaveContext, n: usize) -> Result<Grid> {
    Grid::new(suggested_length(ctx), n)
}

pub fn profile_on_grid(ctx: &WaveContext, grid: &Grid) -> Result<ProfileField> {
    profile_on_grid_with_tol(ctx, grid, DEFAULT_TAIL_TOL)
}

pub fn profile_on_grid_with_tol(
    ctx: &WaveContext,
    grid: &Grid,
    tail_tol: f64,
) -> Result<ProfileField> {
    let values: Vec<f64> = grid
        .points()
        .iter()
        .map(|&x| solitary_profile(ctx, x))
        .collect();
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let ends = values[0].abs().max(values[values.len() - 1].abs());
    let ratio = if peak > 0.0 { ends / peak } else { 0.0 };
    if ratio.is_nan() || ratio > tail_tol || values.iter().any(|v| !v.is_finite()) {
        return Err(Error::TailTooFat {
            ratio,
            tol: tail_tol,
            suggested_length: suggested_length(ctx),
        });
    }
    Ok(ProfileField {
        grid: grid.clone(),
        values,
    })
}

/// The three integrals every functional is built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    /// `||u||^2_{L^2}`
    pub l2_sq: f64,
    /// `||u_x||^2_{L^2}`
    pub dx_l2_sq: f64,
    /// `||u||^{p+1}_{L^{p+1}}`
    pub lp1: f64,
}

impl Norms {
    pub fn of(grid: &Grid, u: &[f64], params: &ModelParams) -> Self {
        let ux = grid.derivative(u);
        Self {
            l2_sq: grid.l2_sq(u),
            dx_l2_sq: grid.l2_sq(&ux),
            lp1: grid.dx() * u.iter().map(|&v| params.abs_pow_p1(v)).sum::<f64>(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub alpha: f64,
    pub v: f64,
    pub p1: f64,
    pub p2: f64,
    /// Energy of the traveling-wave lift `(u, -c u)`.
    pub e: f64,
    /// Momentum of the traveling-wave lift `(u, -c u)`.
    pub m: f64,
    pub k_alpha: f64,
    #[serde(flatten)]
    pub norms: Norms,
}

impl FunctionalReport {
    pub fn from_norms(norms: Norms, ctx: &WaveContext, alpha: f64, e: f64, m: f64) -> Self {
        let (a_, b_) = (ctx.big_a(), ctx.big_b());
        let q = ctx.params().p() + 1.0;
        let p1 = a_ * norms.l2_sq + b_ * norms.dx_l2_sq - norms.lp1;
        let p2 = 0.5 * a_ * norms.l2_sq - 0.5 * b_ * norms.dx_l2_sq - norms.lp1 / q;
        let v = 0.5 * a_ * norms.l2_sq + 0.5 * b_ * norms.dx_l2_sq - norms.lp1 / q;
        Self {
            alpha,
            v,
            p1,
            p2,
            e,
            m,
            k_alpha: alpha * p1 + p2,
            norms,
        }
    }

    /// Scale used to make the Pohozaev residuals relative.
    pub fn quadratic_scale(&self, ctx: &WaveContext) -> f64 {
        ctx.big_a() * self.norms.l2_sq + ctx.big_b() * self.norms.dx_l2_sq
    }
}

/// `V`, `P1`, `P2`, `K_alpha` of `u`, plus `E` and `M` of `(u, -c u)`.
pub fn functionals(grid: &Grid, u: &[f64], ctx: &WaveContext, alpha: f64) -> FunctionalReport {
    let norms = Norms::of(grid, u, ctx.params());
    let w: Vec<f64> = u.iter().map(|v| -ctx.c() * v).collect();
    let (e, m) = energy_momentum(grid, u, &w, ctx.params());
    FunctionalReport::from_norms(norms, ctx, alpha, e, m)
}

/// Conserved energy and momentum of the state `(u, w)`.
pub fn energy_momentum(grid: &Grid, u: &[f64], w: &[f64], params: &ModelParams) -> (f64, f64) {
    let ux = grid.derivative(u);
    let wx = grid.derivative(w);
    let (a, b, q) = (params.a(), params.b(), params.p() + 1.0);
    let dx = grid.dx();
    let mut e = 0.0;
    let mut m = 0.0;
    for i in 0..u.len() {
        e += 0.5 * (w[i] * w[i] + b * wx[i] * wx[i])
            + 0.5 * (u[i] * u[i] + a * ux[i] * ux[i])
            - params.abs_pow_p1(u[i]) / q;
        m += u[i] * w[i] + b * ux[i] * wx[i];
    }
    (e * dx, m * dx)
}

/// Pohozaev residuals `(P1, P2)` of a profile divided by `A||u||^2 + B||u_x||^2`.
pub fn pohozaev_residuals(field: &ProfileField, ctx: &WaveContext) -> (f64, f64) {
    let rep = functionals(&field.grid, &field.values, ctx, 0.0);
    let scale = rep.quadratic_scale(ctx);
    (rep.p1 / scale, rep.p2 / scale)
}

/// Relative sup-norm of `B u'' - A u + |u|^{p-1} u`, normalized by `sup |A u|`.
pub fn ode_residual(field: &ProfileField, ctx: &WaveContext) -> f64 {
    let uxx = field.grid.second_derivative(&field.values);
    let (a_, b_) = (ctx.big_a(), ctx.big_b());
    let params = ctx.params();
    let res = field
        .values
        .iter()
        .zip(&uxx)
        .fold(0.0f64, |m, (&u, &d2)| {
            m.max((b_ * d2 - a_ * u + params.nonlinearity(u)).abs())
        });
    res / (a_ * field.peak())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DMode {
    /// `d(0) (1-c^2)^{(p+3)/(2(p-1))} (1 - mu c^2)^{1/2}` with `d(0)` by quadrature.
    ClosedForm,
    /// `(p-1)/(p+3) A ||phi_c||^2` by quadrature of `phi_c` itself.
    Quadrature,
}

/// `(p-1)/(p+3) ||phi_0||^2`, the value of `d` at rest.
pub fn d_zero(params: &ModelParams) -> Result<f64> {
    let ctx0 = WaveContext::new(*params, 0.0)?;
    d_quadrature(&ctx0)
}

fn d_quadrature(ctx: &WaveContext) -> Result<f64> {
    let p = ctx.params().p();
    let grid = profile_grid(ctx, QUADRATURE_POINTS)?;
    let field = profile_on_grid(ctx, &grid)?;
    Ok((p - 1.0) / (p + 3.0) * ctx.big_a() * grid.l2_sq(&field.values))
}

/// Velocity dependence of `d`: `d(c) / d(0)`.
pub fn d_ratio(params: &ModelParams, c: f64) -> f64 {
    let p = params.p();
    let c2 = c * c;
    (1.0 - c2).powf((p + 3.0) / (2.0 * (p - 1.0))) * (1.0 - params.mu() * c2).sqrt()
}

pub fn d_of_c(ctx: &WaveContext, mode: DMode) -> Result<f64> {
    match mode {
        DMode::ClosedForm => Ok(d_zero(ctx.params())? * d_ratio(ctx.params(), ctx.c())),
        DMode::Quadrature => d_quadrature(ctx),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(a: f64, b: f64, p: f64, c: f64) -> WaveContext {
        WaveContext::new(ModelParams::new(a, b, p).unwrap(), c).unwrap()
    }

    /// Independent evaluation through `cosh`, valid away from overflow.
    fn sech_oracle(ctx: &WaveContext, x: f64) -> f64 {
        let p = ctx.params().p();
        let (a_, b_) = (ctx.big_a(), ctx.big_b());
        let arg = 0.5 * (p - 1.0) * (a_ / b_).sqrt() * x;
        (0.5 * (p + 1.0) * a_).powf(1.0 / (p - 1.0)) * (1.0 / arg.cosh()).powf(2.0 / (p - 1.0))
    }

    #[test]
    fn peak_values() {
        assert!((solitary_profile(&ctx(1.0, 0.0, 3.0, 0.0), 0.0) - 2f64.sqrt()).abs() < 1e-15);
        assert!((solitary_profile(&ctx(2.0, 1.0, 3.0, 0.5), 0.0) - 1.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn profile_matches_cosh_form_and_is_even() {
        let c = ctx(2.0, 0.7, 2.5, 0.3);
        for i in 0..200 {
            let x = -20.0 + 0.2 * i as f64;
            let v = solitary_profile(&c, x);
            assert!((v - sech_oracle(&c, x)).abs() <= 1e-14 * (1.0 + v));
            assert_eq!(v, solitary_profile(&c, -x));
            assert!(v > 0.0 && v <= solitary_profile(&c, 0.0));
        }
        assert!(solitary_profile(&c, 1e4) < 1e-300);
    }

    #[test]
    fn ode_residual_pointwise() {
        // second derivative by a fine central difference of the closed form
        let c = ctx(2.0, 1.0, 3.0, 0.5);
        let h = 1e-4;
        for i in 0..50 {
            let x = -5.0 + 0.2 * i as f64;
            let f = |x| solitary_profile(&c, x);
            let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
            let r = c.big_b() * d2 - c.big_a() * f(x) + f(x).powi(3);
            assert!(r.abs() < 1e-6, "x = {x}: {r}");
        }
    }

    #[test]
    fn l2_norm_p3_boussinesq() {
        // ||phi||^2 = 4 sqrt(A B) for p = 3
        let c = ctx(1.0, 0.0, 3.0, 0.0);
        let grid = Grid::new(80.0, 1024).unwrap();
        let f = profile_on_grid(&c, &grid).unwrap();
        assert!((grid.l2_sq(&f.values) - 4.0).abs() < 1e-10);
        let (i, _) = f
            .values
            .iter()
            .enumerate()
            .fold((0, 0.0), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
        assert_eq!(i, 512);
        for k in 1..512 {
            assert!((f.values[512 + k] - f.values[512 - k]).abs() < 1e-15);
        }
    }

    #[test]
    fn tail_too_fat_near_sonic() {
        let c = ctx(1.0, 0.0, 3.0, 0.999);
        let grid = Grid::new(80.0, 1024).unwrap();
        // width sqrt(B/A) ~ 22 exceeds what L = 80 can hold
        assert!((c.big_b() / c.big_a()).sqrt() > 20.0);
        match profile_on_grid(&c, &grid) {
            Err(Error::TailTooFat {
                suggested_length, ..
            }) => assert!(suggested_length > 80.0),
            other => panic!("expected TailTooFat, got {other:?}"),
        }
    }

    #[test]
    fn suggested_length_honors_tail_tol() {
        for &p in &[1.2, 1.5, 2.0, 3.0, 5.0, 8.0, 12.0] {
            for &c in &[0.0, 0.5, 0.9] {
                let cx = ctx(2.0, 1.0, p, c);
                assert!(tail_ratio(&cx, suggested_length(&cx)) < DEFAULT_TAIL_TOL);
            }
        }
    }

    #[test]
    fn pohozaev_and_k_alpha_vanish() {
        let c = ctx(2.0, 1.0, 3.0, 0.5);
        let grid = profile_grid(&c, 1024).unwrap();
        let f = profile_on_grid(&c, &grid).unwrap();
        let (r1, r2) = pohozaev_residuals(&f, &c);
        assert!(r1.abs() < 1e-10 && r2.abs() < 1e-10, "{r1} {r2}");
        for &alpha in &[-3.0, 0.0, 0.7, 10.0] {
            let rep = functionals(&grid, &f.values, &c, alpha);
            assert!(rep.k_alpha.abs() < 1e-9 * rep.quadratic_scale(&c));
        }
        assert!(ode_residual(&f, &c) < 1e-9);
    }

    #[test]
    fn zero_field() {
        let c = ctx(2.0, 1.0, 3.0, 0.5);
        let grid = Grid::new(10.0, 64).unwrap();
        let z = vec![0.0; 64];
        let rep = functionals(&grid, &z, &c, 0.9);
        assert_eq!((rep.v, rep.p1, rep.p2, rep.k_alpha, rep.e, rep.m), (0.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        assert_eq!(energy_momentum(&grid, &z, &z, c.params()), (0.0, 0.0));
    }

    #[test]
    fn energy_momentum_of_traveling_wave() {
        let c = ctx(2.0, 1.0, 3.0, 0.6);
        let grid = profile_grid(&c, 1024).unwrap();
        let f = profile_on_grid(&c, &grid).unwrap();
        let rep = functionals(&grid, &f.values, &c, 0.0);
        assert!((rep.e + c.c() * rep.m - rep.v).abs() < 1e-12 * rep.v.abs());

        let c0 = ctx(2.0, 1.0, 3.0, 0.0);
        let f0 = profile_on_grid(&c0, &profile_grid(&c0, 512).unwrap()).unwrap();
        let rep0 = functionals(&f0.grid, &f0.values, &c0, 0.0);
        assert_eq!(rep0.m, 0.0);
    }

    #[test]
    fn d_values_p3() {
        // d = (4/3) A^{3/2} B^{1/2} for p = 3
        let d = d_of_c(&ctx(1.0, 0.0, 3.0, 0.0), DMode::ClosedForm).unwrap();
        assert!((d - 4.0 / 3.0).abs() < 1e-10);
        let d = d_of_c(&ctx(1.0, 0.0, 3.0, 0.0), DMode::Quadrature).unwrap();
        assert!((d - 4.0 / 3.0).abs() < 1e-10);
        let exact = 4.0 / 3.0 * 0.75f64.powf(1.5) * 1.75f64.sqrt();
        assert!((exact - 1.14564).abs() < 1e-5);
        for mode in [DMode::ClosedForm, DMode::Quadrature] {
            let d = d_of_c(&ctx(2.0, 1.0, 3.0, 0.5), mode).unwrap();
            assert!((d - exact).abs() < 1e-10, "{mode:?}: {d}");
        }
    }

    #[test]
    fn d_modes_agree() {
        for &(a, b, p, c) in &[(1.0, 0.2, 2.0, 0.3), (3.0, 2.5, 5.0, 0.8), (0.5, 0.0, 7.0, 0.6)] {
            let cx = ctx(a, b, p, c);
            let d1 = d_of_c(&cx, DMode::ClosedForm).unwrap();
            let d2 = d_of_c(&cx, DMode::Quadrature).unwrap();
            assert!((d1 - d2).abs() <= 1e-9 * d1, "{a} {b} {p} {c}: {d1} {d2}");
        }
    }
}
