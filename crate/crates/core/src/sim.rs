//! Fourier pseudospectral integration of the first-order system
//!
//! ```text
//! u_t = w_x
//! w_t = (1 - b D^2)^{-1} [ (1 - a D^2) u_x - (|u|^{p-1} u)_x ]
//! ```
//!
//! on a periodic grid, with classical RK4 in time. A third field `v` with
//! `v_t = w` (so `u = v_x`) is carried along for the Levine functional
//! `H = (||v||^2 + b ||u||^2) / 2`.

use std::f64::consts::SQRT_2;
use std::io::Write;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::params::{ModelParams, WaveContext};
use crate::wave::{energy_momentum, solitary_profile};

/// Default fraction of the explicit stability limit used for `dt`.
pub const CFL_SAFETY: f64 = 0.4;

/// Default sup-norm growth factor that declares blow-up.
pub const DEFAULT_BLOW_THRESHOLD: f64 = 50.0;

/// Extent of the RK4 stability region along the imaginary axis.
const RK4_IMAG_LIMIT: f64 = 2.0 * SQRT_2;

type Spectrum = Vec<Complex64>;

/// Phase speed `sqrt((1 + a xi^2) / (1 + b xi^2))` of the linear waves.
fn phase_speed(params: &ModelParams, xi: f64) -> f64 {
    ((1.0 + params.a() * xi * xi) / (1.0 + params.b() * xi * xi)).sqrt()
}

/// `dt = safety * dx / max phase speed` over the grid modes.
///
/// For `b = 0` the largest phase speed grows like `sqrt(a) pi / dx`, so this
/// reduces to the parabolic `dt ~ dx^2` restriction.
pub fn stable_dt(grid: &Grid, params: &ModelParams, safety: f64) -> f64 {
    let smax = grid
        .wavenumbers()
        .iter()
        .fold(0.0f64, |m, &xi| m.max(phase_speed(params, xi)));
    safety * grid.dx() / smax
}

/// Largest `dt` for which RK4 is stable on every linear mode:
/// `2 sqrt(2) / max |omega|`.
pub fn dt_bound(grid: &Grid, params: &ModelParams) -> f64 {
    let omega_max = grid
        .wavenumbers()
        .iter()
        .fold(0.0f64, |m, &xi| m.max(xi.abs() * phase_speed(params, xi)));
    RK4_IMAG_LIMIT / omega_max
}

/// Discretized `(u, w)` plus the potential `v` with `v_x = u`, `v_t = w`.
#[derive(Debug, Clone)]
pub struct StatePair {
    pub grid: Grid,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
}

impl StatePair {
    /// `v` is taken as the mean-free periodic antiderivative of `u`.
    pub fn new(grid: Grid, u: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        if u.len() != grid.len() || w.len() != grid.len() {
            return Err(Error::InvalidConfig(format!(
                "field lengths ({}, {}) do not match grid size {}",
                u.len(),
                w.len(),
                grid.len()
            )));
        }
        let v = antiderivative(&grid, &grid.forward(&u));
        Ok(Self {
            grid,
            u,
            w,
            v,
            t: 0.0,
        })
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        Self {
            grid,
            u: vec![0.0; n],
            w: vec![0.0; n],
            v: vec![0.0; n],
            t: 0.0,
        }
    }

    /// `Phi_c = (phi_c, -c phi_c)` sampled on `grid`.
    pub fn traveling_wave(ctx: &WaveContext, grid: &Grid) -> Result<Self> {
        let u: Vec<f64> = grid
            .points()
            .iter()
            .map(|&x| solitary_profile(ctx, x))
            .collect();
        let w = u.iter().map(|v| -ctx.c() * v).collect();
        Self::new(grid.clone(), u, w)
    }

    pub fn sup_u(&self) -> f64 {
        sup(&self.u)
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.w).all(|v| v.is_finite())
    }

    pub fn energy_momentum(&self, params: &ModelParams) -> (f64, f64) {
        energy_momentum(&self.grid, &self.u, &self.w, params)
    }

    /// `||u||^2_{H^1} + ||w||^2_{H^1}`.
    pub fn h1_norm_sq(&self) -> f64 {
        self.grid.h1_sq(&self.u) + self.grid.h1_sq(&self.w)
    }

    /// `H^1 x H^1` distance to another state on the same grid.
    pub fn distance(&self, other: &StatePair) -> f64 {
        let du: Vec<f64> = self.u.iter().zip(&other.u).map(|(a, b)| a - b).collect();
        let dw: Vec<f64> = self.w.iter().zip(&other.w).map(|(a, b)| a - b).collect();
        (self.grid.h1_sq(&du) + self.grid.h1_sq(&dw)).sqrt()
    }
}

fn sup(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn antiderivative(grid: &Grid, u_hat: &[Complex64]) -> Vec<f64> {
    let spec: Spectrum = u_hat
        .iter()
        .enumerate()
        .map(|(k, &z)| {
            let ik = grid.ik(k);
            if ik.im == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                z / ik
            }
        })
        .collect();
    grid.inverse_real(&spec).0
}

/// `H(t) = (||v||^2 + b ||u||^2) / 2`.
pub fn levine_h(state: &StatePair, params: &ModelParams) -> f64 {
    0.5 * (state.grid.l2_sq(&state.v) + params.b() * state.grid.l2_sq(&state.u))
}

/// Fourier-space right-hand side with precomputed multipliers.
struct SpectralRhs {
    grid: Grid,
    params: ModelParams,
    ik: Vec<Complex64>,
    linear: Vec<Complex64>,
    nonlinear: Vec<Complex64>,
    mask: Vec<f64>,
    dealias: bool,
}

/// Spectral state `(u^, w^, v^)`.
#[derive(Clone)]
struct Modes {
    u: Spectrum,
    w: Spectrum,
    v: Spectrum,
}

impl Modes {
    fn axpy(&self, h: f64, d: &Modes) -> Modes {
        let f = |a: &Spectrum, b: &Spectrum| a.iter().zip(b).map(|(x, y)| x + y * h).collect();
        Modes {
            u: f(&self.u, &d.u),
            w: f(&self.w, &d.w),
            v: f(&self.v, &d.v),
        }
    }
}

impl SpectralRhs {
    fn new(grid: &Grid, params: &ModelParams, dealias: bool) -> Self {
        let n = grid.len();
        let (a, b) = (params.a(), params.b());
        let ik: Vec<Complex64> = (0..n).map(|k| grid.ik(k)).collect();
        let xi = grid.wavenumbers();
        let linear = (0..n)
            .map(|k| ik[k] * ((1.0 + a * xi[k] * xi[k]) / (1.0 + b * xi[k] * xi[k])))
            .collect();
        let nonlinear = (0..n)
            .map(|k| -ik[k] / (1.0 + b * xi[k] * xi[k]))
            .collect();
        // 2/3 rule: keep |k| < N/3
        let mask = (0..n)
            .map(|k| {
                let kk = if k <= n / 2 { k } else { n - k };
                if !dealias || 3 * kk < n {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            grid: grid.clone(),
            params: *params,
            ik,
            linear,
            nonlinear,
            mask,
            dealias,
        }
    }

    fn modes_of(&self, state: &StatePair) -> Modes {
        Modes {
            u: self.grid.forward(&state.u),
            w: self.grid.forward(&state.w),
            v: self.grid.forward(&state.v),
        }
    }

    /// Spectrum of `|u|^{p-1} u`, formed from the (optionally filtered) `u^`.
    fn nonlinear_term(&self, u_hat: &[Complex64], t: f64) -> Result<Spectrum> {
        let mut buf: Spectrum = if self.dealias {
            u_hat.iter().zip(&self.mask).map(|(z, m)| z * m).collect()
        } else {
            u_hat.to_vec()
        };
        self.grid.inverse_in_place(&mut buf);
        for z in buf.iter_mut() {
            let u = z.re;
            if !u.is_finite() {
                return Err(Error::NonFinite { t });
            }
            *z = Complex64::new(self.params.nonlinearity(u), 0.0);
        }
        self.grid.forward_in_place(&mut buf);
        if buf.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { t });
        }
        if self.dealias {
            for (z, m) in buf.iter_mut().zip(&self.mask) {
                *z *= m;
            }
        }
        Ok(buf)
    }

    fn eval(&self, s: &Modes, t: f64) -> Result<Modes> {
        let nl = self.nonlinear_term(&s.u, t)?;
        let du = self.ik.iter().zip(&s.w).map(|(ik, w)| ik * w).collect();
        let dw = self
            .linear
            .iter()
            .zip(&s.u)
            .zip(self.nonlinear.iter().zip(&nl))
            .map(|((l, u), (m, f))| l * u + m * f)
            .collect();
        Ok(Modes {
            u: du,
            w: dw,
            v: s.w.clone(),
        })
    }

    fn step(&self, s: &Modes, t: f64, dt: f64) -> Result<Modes> {
        let k1 = self.eval(s, t)?;
        let k2 = self.eval(&s.axpy(0.5 * dt, &k1), t + 0.5 * dt)?;
        let k3 = self.eval(&s.axpy(0.5 * dt, &k2), t + 0.5 * dt)?;
        let k4 = self.eval(&s.axpy(dt, &k3), t + dt)?;
        let n = s.u.len();
        let combine = |y: &Spectrum, a: &Spectrum, b: &Spectrum, c: &Spectrum, d: &Spectrum| {
            (0..n)
                .map(|k| y[k] + (a[k] + (b[k] + c[k]) * 2.0 + d[k]) * (dt / 6.0))
                .collect::<Spectrum>()
        };
        Ok(Modes {
            u: combine(&s.u, &k1.u, &k2.u, &k3.u, &k4.u),
            w: combine(&s.w, &k1.w, &k2.w, &k3.w, &k4.w),
            v: combine(&s.v, &k1.v, &k2.v, &k3.v, &k4.v),
        })
    }

    /// Physical fields and the largest imaginary residue among them.
    fn to_state(&self, s: &Modes, t: f64) -> (StatePair, f64) {
        let (u, iu) = self.grid.inverse_real(&s.u);
        let (w, iw) = self.grid.inverse_real(&s.w);
        let (v, _) = self.grid.inverse_real(&s.v);
        (
            StatePair {
                grid: self.grid.clone(),
                u,
                w,
                v,
                t,
            },
            iu.max(iw),
        )
    }
}

/// Time derivatives `(u_t, w_t)` of a state.
pub fn rhs(state: &StatePair, params: &ModelParams, dealias: bool) -> Result<(Vec<f64>, Vec<f64>)> {
    let op = SpectralRhs::new(&state.grid, params, dealias);
    let d = op.eval(&op.modes_of(state), state.t)?;
    Ok((op.grid.inverse_real(&d.u).0, op.grid.inverse_real(&d.w).0))
}

/// One classical RK4 step of size `dt`.
pub fn step_rk4(state: &StatePair, params: &ModelParams, dt: f64, dealias: bool) -> Result<StatePair> {
    let op = SpectralRhs::new(&state.grid, params, dealias);
    let next = op.step(&op.modes_of(state), state.t, dt)?;
    Ok(op.to_state(&next, state.t + dt).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    pub dealias: bool,
    /// Blow-up is declared once `sup |u| >= blow_threshold * sup |u_0|`.
    pub blow_threshold: f64,
    pub record_every: usize,
    /// Traveling wave whose translates the orbital distance is measured to.
    pub orbit_reference: Option<WaveContext>,
}

impl SimConfig {
    /// Defaults: `dt` at [`CFL_SAFETY`], dealiasing on, 50x blow-up threshold.
    pub fn new(grid: &Grid, params: &ModelParams, t_end: f64) -> Self {
        Self {
            dt: stable_dt(grid, params, CFL_SAFETY),
            t_end,
            dealias: true,
            blow_threshold: DEFAULT_BLOW_THRESHOLD,
            record_every: 10,
            orbit_reference: None,
        }
    }

    pub fn with_orbit(mut self, ctx: WaveContext) -> Self {
        self.orbit_reference = Some(ctx);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt must be > 0 (got {})", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "t_end must be >= 0 (got {})",
                self.t_end
            )));
        }
        if self.blow_threshold.is_nan() || self.blow_threshold <= 1.0 {
            return Err(Error::InvalidConfig(format!(
                "blow_threshold must be > 1 (got {})",
                self.blow_threshold
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig("record_every must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Verdict {
    Completed,
    BlowUpDetected { t_star: f64 },
    StepRejected { bound: f64 },
}

#[derive(Debug, Clone)]
pub struct SimRecord {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub momentum: Vec<f64>,
    pub sup_u: Vec<f64>,
    pub h: Vec<f64>,
    pub orbital_dist: Option<Vec<f64>>,
    pub verdict: Verdict,
    /// Step actually used: `t_end / ceil(t_end / dt)`.
    pub dt: f64,
    pub steps: usize,
    /// Largest imaginary part discarded by an inverse transform, relative to `sup |u|`.
    pub max_imag_residue: f64,
    /// Last finite state reached.
    pub final_state: StatePair,
}

pub const CSV_HEADER: [&str; 6] = ["t", "E", "M", "sup_u", "H", "orbital_dist"];

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

impl SimRecord {
    /// Largest `|q(t) - q(0)| / |q(0)|` over the record.
    pub fn relative_drift(series: &[f64]) -> f64 {
        let q0 = series.first().copied().unwrap_or(0.0);
        let scale = if q0 == 0.0 { 1.0 } else { q0.abs() };
        series.iter().fold(0.0f64, |m, q| m.max((q - q0).abs() / scale))
    }

    pub fn energy_drift(&self) -> f64 {
        Self::relative_drift(&self.energy)
    }

    pub fn momentum_drift(&self) -> f64 {
        Self::relative_drift(&self.momentum)
    }

    /// CSV with columns `t,E,M,sup_u,H,orbital_dist`, 17 significant digits;
    /// `orbital_dist` is empty when no reference wave was tracked.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(CSV_HEADER)?;
        for i in 0..self.times.len() {
            let od = self
                .orbital_dist
                .as_ref()
                .map(|d| fmt17(d[i]))
                .unwrap_or_default();
            wtr.write_record([
                fmt17(self.times[i]),
                fmt17(self.energy[i]),
                fmt17(self.momentum[i]),
                fmt17(self.sup_u[i]),
                fmt17(self.h[i]),
                od,
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// March `state0` to `cfg.t_end`, stopping early on blow-up.
pub fn integrate(state0: &StatePair, params: &ModelParams, cfg: &SimConfig) -> Result<SimRecord> {
    cfg.validate()?;
    let grid = &state0.grid;
    let bound = dt_bound(grid, params);
    if cfg.dt > bound {
        return Err(Error::StepRejected { dt: cfg.dt, bound });
    }
    let steps = if cfg.t_end == 0.0 {
        0
    } else {
        (cfg.t_end / cfg.dt - 1e-9).ceil().max(1.0) as usize
    };
    let dt = if steps == 0 { cfg.dt } else { cfg.t_end / steps as f64 };

    let op = SpectralRhs::new(grid, params, cfg.dealias);
    let tracker = cfg
        .orbit_reference
        .map(|ctx| OrbitTracker::new(&ctx, grid));
    let sup0 = state0.sup_u();

    let mut rec = SimRecord {
        times: vec![],
        energy: vec![],
        momentum: vec![],
        sup_u: vec![],
        h: vec![],
        orbital_dist: tracker.as_ref().map(|_| vec![]),
        verdict: Verdict::Completed,
        dt,
        steps: 0,
        max_imag_residue: 0.0,
        final_state: state0.clone(),
    };
    let record = |rec: &mut SimRecord, state: &StatePair, modes: &Modes| {
        let (e, m) = state.energy_momentum(params);
        rec.times.push(state.t);
        rec.energy.push(e);
        rec.momentum.push(m);
        rec.sup_u.push(state.sup_u());
        rec.h.push(levine_h(state, params));
        if let (Some(t), Some(d)) = (&tracker, rec.orbital_dist.as_mut()) {
            d.push(t.distance(&modes.u, &modes.w).0);
        }
    };

    let mut modes = op.modes_of(state0);
    let mut state = state0.clone();
    state.t = 0.0;
    record(&mut rec, &state, &modes);

    for n in 1..=steps {
        let t_prev = state.t;
        let next = match op.step(&modes, t_prev, dt) {
            Ok(m) => m,
            Err(_) => {
                rec.verdict = Verdict::BlowUpDetected { t_star: t_prev + dt };
                break;
            }
        };
        let (next_state, imag) = op.to_state(&next, n as f64 * dt);
        let s = next_state.sup_u();
        if !next_state.is_finite() {
            rec.verdict = Verdict::BlowUpDetected { t_star: next_state.t };
            break;
        }
        if s > 0.0 {
            rec.max_imag_residue = rec.max_imag_residue.max(imag / s);
        }
        modes = next;
        state = next_state;
        rec.steps = n;
        let blown = sup0 > 0.0 && s >= cfg.blow_threshold * sup0;
        if blown || n % cfg.record_every == 0 || n == steps {
            record(&mut rec, &state, &modes);
        }
        if blown {
            rec.verdict = Verdict::BlowUpDetected { t_star: state.t };
            break;
        }
    }
    rec.final_state = state;
    Ok(rec)
}

/// Initial data `lambda Phi_c` with modes `0 < |xi| < h_cut` removed.
#[derive(Debug, Clone)]
pub struct PerturbedData {
    pub state: StatePair,
    /// `||U_0 - Phi_c||_{H^1 x H^1}`.
    pub distance: f64,
}

/// `u_0^ = lambda phi_c^ 1[|xi| >= h_cut]`, `w_0 = -c u_0`, and
/// `v_0^ = u_0^ / (i xi)`. The zero mode of `phi_c` is always kept.
pub fn perturbed_initial_data(
    ctx: &WaveContext,
    lambda: f64,
    h_cut: f64,
    grid: &Grid,
) -> Result<PerturbedData> {
    if !(lambda >= 1.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "lambda must be >= 1 (got {lambda})"
        )));
    }
    if !(h_cut >= 0.0 && h_cut < 10.0 * grid.first_mode()) {
        return Err(Error::InvalidConfig(format!(
            "h_cut must lie in [0, 10 * {}) (got {h_cut})",
            grid.first_mode()
        )));
    }
    let reference = StatePair::traveling_wave(ctx, grid)?;
    let mut u_hat = grid.forward(&reference.u);
    for (k, z) in u_hat.iter_mut().enumerate() {
        if k != 0 && grid.wavenumbers()[k].abs() < h_cut {
            *z = Complex64::new(0.0, 0.0);
        } else {
            *z *= lambda;
        }
    }
    let (u, _) = grid.inverse_real(&u_hat);
    let w = u.iter().map(|v| -ctx.c() * v).collect();
    let state = StatePair {
        grid: grid.clone(),
        v: antiderivative(grid, &u_hat),
        u,
        w,
        t: 0.0,
    };
    let distance = state.distance(&reference);
    Ok(PerturbedData { state, distance })
}

/// Distance in `H^1 x H^1` from `state` to the closest translate of `Phi_c`.
pub fn orbital_distance(state: &StatePair, ctx: &WaveContext) -> f64 {
    let tracker = OrbitTracker::new(ctx, &state.grid);
    let u_hat = state.grid.forward(&state.u);
    let w_hat = state.grid.forward(&state.w);
    tracker.distance(&u_hat, &w_hat).0
}

/// Optimal shift and distance to translates of `Phi_c`.
///
/// Minimizing `||u - phi(. - s)||^2 + ||w + c phi(. - s)||^2` over `s` is
/// maximizing the `H^1` correlation `g(s) = <u - c w, phi(. - s)>`. The
/// correlation on grid shifts comes from one inverse FFT; the peak is then
/// refined by golden section and a few Newton steps on `g'`.
struct OrbitTracker {
    grid: Grid,
    c: f64,
    phi_hat: Spectrum,
}

impl OrbitTracker {
    fn new(ctx: &WaveContext, grid: &Grid) -> Self {
        let phi: Vec<f64> = grid
            .points()
            .iter()
            .map(|&x| solitary_profile(ctx, x))
            .collect();
        Self {
            grid: grid.clone(),
            c: ctx.c(),
            phi_hat: grid.forward(&phi),
        }
    }

    fn weight(&self, k: usize) -> f64 {
        let xi = if k == self.grid.nyquist() {
            0.0
        } else {
            self.grid.wavenumbers()[k]
        };
        1.0 + xi * xi
    }

    /// `(g(s), g'(s), g''(s))` up to a positive factor.
    fn correlation(&self, coef: &[Complex64], s: f64) -> (f64, f64, f64) {
        let xi = self.grid.wavenumbers();
        let (mut g, mut g1, mut g2) = (0.0, 0.0, 0.0);
        for (k, c) in coef.iter().enumerate() {
            let e = Complex64::from_polar(1.0, xi[k] * s);
            let z = c * e;
            g += z.re;
            g1 -= xi[k] * z.im;
            g2 -= xi[k] * xi[k] * z.re;
        }
        (g, g1, g2)
    }

    fn distance(&self, u_hat: &[Complex64], w_hat: &[Complex64]) -> (f64, f64) {
        let n = self.grid.len();
        let dx = self.grid.dx();
        let coef: Spectrum = (0..n)
            .map(|k| (u_hat[k] - w_hat[k] * self.c) * self.phi_hat[k].conj() * self.weight(k))
            .collect();

        // g at shifts s_j = j dx
        let mut corr = coef.clone();
        self.grid.inverse_in_place(&mut corr);
        let j = (0..n)
            .max_by(|&a, &b| corr[a].re.total_cmp(&corr[b].re))
            .unwrap_or(0);
        let s0 = j as f64 * dx;

        // golden section on [s0 - dx, s0 + dx]
        let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
        let (mut lo, mut hi) = (s0 - dx, s0 + dx);
        let mut x1 = hi - inv_phi * (hi - lo);
        let mut x2 = lo + inv_phi * (hi - lo);
        let mut f1 = self.correlation(&coef, x1).0;
        let mut f2 = self.correlation(&coef, x2).0;
        for _ in 0..40 {
            if f1 > f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = self.correlation(&coef, x1).0;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = self.correlation(&coef, x2).0;
            }
        }
        let mut s = 0.5 * (lo + hi);
        for _ in 0..4 {
            let (_, g1, g2) = self.correlation(&coef, s);
            if g2 >= 0.0 {
                break;
            }
            let next = s - g1 / g2;
            if (next - s0).abs() > dx {
                break;
            }
            s = next;
        }

        let xi = self.grid.wavenumbers();
        let mut ru = Vec::with_capacity(n);
        let mut rw = Vec::with_capacity(n);
        for k in 0..n {
            let shifted = self.phi_hat[k] * Complex64::from_polar(1.0, -xi[k] * s);
            ru.push(u_hat[k] - shifted);
            rw.push(w_hat[k] + shifted * self.c);
        }
        let d2 = self.grid.h1_sq_spectral(&ru) + self.grid.h1_sq_spectral(&rw);
        (d2.max(0.0).sqrt(), self.grid.wrap(s))
    }
}
