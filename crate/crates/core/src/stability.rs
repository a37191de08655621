//! Blow-up threshold `c0^2`, the quantities behind it, and the orbital
//! stability regions cut out by the cubic `G(z, p, mu)` with `z = c^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ModelParams, WaveContext};
use crate::wave::{d_ratio, d_zero};

/// Roots closer than this to `z = 0` or `z = 1` are boundary roots.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Points in the sign scan that cross-checks [`classify_region`].
pub const SCAN_POINTS: usize = 2048;

/// Below this `mu` the cubic is treated through its linear limit.
const LINEAR_MU: f64 = 1e-8;

/// `c0^2 = (p-1)/(p+1) [1 + (1 - b(p+3)(p-1) / (a(p+1)^2))^{1/2}]^{-1}`.
pub fn critical_velocity_squared(params: &ModelParams) -> f64 {
    // the radicand is positive whenever a > b and p > 1
    critical_velocity_squared_unchecked(params.a(), params.b(), params.p())
        .expect("radicand is positive for a > b, p > 1")
}

/// Threshold formula without the `a > b` restriction, for limit studies
/// such as `a = b`.
pub fn critical_velocity_squared_unchecked(a: f64, b: f64, p: f64) -> Result<f64> {
    if !(a > 0.0 && b >= 0.0 && p > 1.0) {
        return Err(Error::InvalidParams(format!(
            "need a > 0, b >= 0, p > 1 (got a = {a}, b = {b}, p = {p})"
        )));
    }
    let radicand = 1.0 - b * (p + 3.0) * (p - 1.0) / (a * (p + 1.0).powi(2));
    if radicand < 0.0 {
        return Err(Error::InvalidParams(format!(
            "negative radicand {radicand} in the threshold formula"
        )));
    }
    Ok((p - 1.0) / (p + 1.0) / (1.0 + radicand.sqrt()))
}

/// `k(z) = b(p+3) z^2 - 2a(p+1) z + a(p-1)`; `c0^2` is its root in `(0, 1)`.
pub fn quartic_k(z: f64, params: &ModelParams) -> f64 {
    let (a, b, p) = (params.a(), params.b(), params.p());
    b * (p + 3.0) * z * z - 2.0 * a * (p + 1.0) * z + a * (p - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaC {
    pub alpha: f64,
    pub c_const: f64,
}

/// The multiplier `alpha` matching `J_c` to `V - K_alpha / (alpha(p+1)+1)`
/// and the resulting constant `C`.
pub fn alpha_and_c(ctx: &WaveContext) -> Result<AlphaC> {
    if ctx.c() == 0.0 {
        return Err(Error::DegenerateVelocity);
    }
    let params = ctx.params();
    let (a, b, p) = (params.a(), params.b(), params.p());
    let c2 = ctx.c2();
    let bb = ctx.big_b();
    let bracket = 1.0 - c2 * (p + 3.0) / (p - 1.0);
    let alpha = bb * bracket / (2.0 * c2 * (a - b));
    let c_const = (bb * bracket * (p + 1.0) + 2.0 * c2 * (a - b)) / (ctx.big_a() * bb);
    Ok(AlphaC { alpha, c_const })
}

/// The coefficient `sigma` of `d(c)` in the lower bound for `H''`; it
/// vanishes identically.
pub fn sigma_residual(ctx: &WaveContext) -> Result<f64> {
    sigma_with(ctx, alpha_and_c)
}

/// `sigma` assembled with a caller-provided `(alpha, C)` routine.
pub fn sigma_with<F>(ctx: &WaveContext, alpha_c: F) -> Result<f64>
where
    F: Fn(&WaveContext) -> Result<AlphaC>,
{
    let AlphaC { c_const, .. } = alpha_c(ctx)?;
    let params = ctx.params();
    let (b, p) = (params.b(), params.p());
    let c2 = ctx.c2();
    let (big_a, big_b) = (ctx.big_a(), ctx.big_b());
    let momentum_term = 2.0 * c2 / big_a
        * (1.0 + b * (p - 1.0) * big_a / ((p + 3.0) * big_b))
        * ((p + 3.0) / (p - 1.0));
    Ok(-(p + 1.0) + momentum_term + c_const)
}

/// Magnitudes of `G(z, p, mu) = P z^3 - Q z^2 + R z - S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GCoefficients {
    /// `P = 2(p+3)(p+1) mu^2`
    pub cubic: f64,
    /// `Q = 3(p+3)(p-1) mu^2 + (3p^2 + 10p + 19) mu`
    pub quadratic: f64,
    /// `R = 2((3p+5)(p-1) mu + 2(p+3))`
    pub linear: f64,
    /// `S = (p-1)^2 mu + (p-1)(p+3)`
    pub constant: f64,
}

impl GCoefficients {
    pub fn eval(&self, z: f64) -> f64 {
        ((self.cubic * z - self.quadratic) * z + self.linear) * z - self.constant
    }

    pub fn derivative(&self, z: f64) -> f64 {
        (3.0 * self.cubic * z - 2.0 * self.quadratic) * z + self.linear
    }

    pub fn scale(&self) -> f64 {
        self.cubic
            .abs()
            .max(self.quadratic.abs())
            .max(self.linear.abs())
            .max(self.constant.abs())
    }

    /// Round-off bound for Horner evaluation on `[0, 1]`; values below it
    /// are treated as zero.
    pub fn eval_tol(&self) -> f64 {
        16.0 * f64::EPSILON * (self.cubic + self.quadratic + self.linear + self.constant)
    }

    /// Real zeros of `G'`, ascending.
    pub fn critical_points(&self) -> Vec<f64> {
        let (qa, qb, qc) = (3.0 * self.cubic, -2.0 * self.quadratic, self.linear);
        if qa == 0.0 {
            return if qb == 0.0 { vec![] } else { vec![-qc / qb] };
        }
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return vec![];
        }
        let q = -0.5 * (qb + qb.signum() * disc.sqrt());
        let mut r = vec![q / qa, qc / q];
        r.sort_by(f64::total_cmp);
        r
    }
}

pub fn g_coefficients(p: f64, mu: f64) -> GCoefficients {
    GCoefficients {
        cubic: 2.0 * (p + 3.0) * (p + 1.0) * mu * mu,
        quadratic: 3.0 * (p + 3.0) * (p - 1.0) * mu * mu + (3.0 * p * p + 10.0 * p + 19.0) * mu,
        linear: 2.0 * ((3.0 * p + 5.0) * (p - 1.0) * mu + 2.0 * (p + 3.0)),
        constant: (p - 1.0).powi(2) * mu + (p - 1.0) * (p + 3.0),
    }
}

pub fn g_eval(z: f64, p: f64, mu: f64) -> f64 {
    g_coefficients(p, mu).eval(z)
}

fn check_p_mu(p: f64, mu: f64, mu_max_inclusive: bool) -> Result<()> {
    let mu_ok = if mu_max_inclusive {
        (0.0..=1.0).contains(&mu)
    } else {
        (0.0..1.0).contains(&mu)
    };
    if !(p > 1.0 && p.is_finite()) || !mu_ok {
        return Err(Error::InvalidParams(format!(
            "need p > 1 and mu in [0, 1{} (got p = {p}, mu = {mu})",
            if mu_max_inclusive { "]" } else { ")" }
        )));
    }
    Ok(())
}

/// Root of `g` in `[lo, hi]`, given a sign change; Newton steps safeguarded
/// by bisection.
fn bracketed_root(g: &GCoefficients, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = g.eval(lo);
    let mut z = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = g.eval(z);
        if f == 0.0 {
            return z;
        }
        if (f < 0.0) == (f_lo < 0.0) {
            lo = z;
            f_lo = f;
        } else {
            hi = z;
        }
        let df = g.derivative(z);
        let newton = z - f / df;
        let next = if df != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - z).abs() <= f64::EPSILON * z.abs() || hi - lo <= f64::EPSILON * hi.abs() {
            return next;
        }
        z = next;
    }
    z
}

/// Sign-changing roots of `G(., p, mu)` in the open interval `(0, 1)`,
/// ascending and polished to machine precision.
///
/// `[0, 1]` is split at the critical points of `G` into monotone pieces, so
/// every sign change brackets exactly one simple root. Roots within
/// [`BOUNDARY_TOL`] of an end point are dropped, as are even-multiplicity
/// (tangent) roots, which do not bound a sign region.
pub fn roots_in_unit_interval(p: f64, mu: f64) -> Result<Vec<f64>> {
    check_p_mu(p, mu, true)?;
    let g = g_coefficients(p, mu);
    let keep = |z: f64| z > BOUNDARY_TOL && z < 1.0 - BOUNDARY_TOL;

    if mu == 0.0 {
        let z = g.constant / g.linear;
        return Ok(if keep(z) { vec![z] } else { vec![] });
    }
    if mu < LINEAR_MU {
        // the other two roots sit near 1/mu; Newton from the linear root
        let mut z = g.constant / g.linear;
        for _ in 0..50 {
            let step = g.eval(z) / g.derivative(z);
            z -= step;
            if step.abs() <= f64::EPSILON * z.abs() {
                break;
            }
        }
        return Ok(if keep(z) { vec![z] } else { vec![] });
    }

    let zero_tol = g.eval_tol();
    let sign = |v: f64| -> i8 {
        if v.abs() <= zero_tol {
            0
        } else if v > 0.0 {
            1
        } else {
            -1
        }
    };
    let mut breaks = vec![0.0];
    breaks.extend(g.critical_points().into_iter().filter(|&z| z > 0.0 && z < 1.0));
    breaks.push(1.0);
    let signs: Vec<i8> = breaks.iter().map(|&z| sign(g.eval(z))).collect();

    let mut roots = Vec::new();
    for i in 0..breaks.len() - 1 {
        if signs[i] * signs[i + 1] == -1 {
            roots.push(bracketed_root(&g, breaks[i], breaks[i + 1]));
        }
        // a zero at an interior critical point counts only if G changes sign there
        if i > 0 && signs[i] == 0 && signs[i - 1] * signs[i + 1] == -1 {
            roots.push(breaks[i]);
        }
    }
    roots.retain(|&z| keep(z));
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    /// No stable velocities.
    Empty,
    /// Stable for `z1 < c^2 < 1`.
    UpToOne,
    /// Stable for `z1 < c^2 < z2`.
    Window,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub p: f64,
    pub mu: f64,
    pub roots_in_unit: Vec<f64>,
    pub kind: RegionKind,
    /// Stable range of `c^2`, open at both ends.
    pub interval: Option<(f64, f64)>,
}

impl RegionReport {
    pub fn contains(&self, c2: f64) -> bool {
        self.interval.is_some_and(|(lo, hi)| c2 > lo && c2 < hi)
    }
}

/// Stability region of `c^2` for `(p, mu)`, cross-checked against a sign
/// scan of `G` on [`SCAN_POINTS`] points of `(0, 1)`.
pub fn classify_region(p: f64, mu: f64) -> Result<RegionReport> {
    check_p_mu(p, mu, false)?;
    let roots = roots_in_unit_interval(p, mu)?;
    let (kind, interval) = match roots.as_slice() {
        [] => (RegionKind::Empty, None),
        [z1] => (RegionKind::UpToOne, Some((*z1, 1.0))),
        [z1, z2] => (RegionKind::Window, Some((*z1, *z2))),
        _ => {
            return Err(Error::InconsistentRootCount {
                p,
                mu,
                count: roots.len(),
                detail: format!("roots {roots:?}"),
            })
        }
    };
    let report = RegionReport {
        p,
        mu,
        roots_in_unit: roots,
        kind,
        interval,
    };

    let g = g_coefficients(p, mu);
    let zero_tol = g.eval_tol();
    for i in 1..SCAN_POINTS {
        let z = i as f64 / SCAN_POINTS as f64;
        if report.roots_in_unit.iter().any(|r| (r - z).abs() < 1e-7) {
            continue;
        }
        let v = g.eval(z);
        let ok = if report.contains(z) {
            v > -zero_tol
        } else {
            v < zero_tol
        };
        if !ok {
            return Err(Error::InconsistentRootCount {
                p,
                mu,
                count: report.roots_in_unit.len(),
                detail: format!("G({z}) = {v:e} disagrees with the claimed region {kind:?}"),
            });
        }
    }
    Ok(report)
}

/// The ratio `mu_p` separating empty regions (`mu < mu_p`) from stability
/// windows (`mu > mu_p`) when `p > 5`; bisection on root existence.
pub fn critical_mu(p: f64) -> Result<f64> {
    if !(p > 5.0 && p.is_finite()) {
        return Err(Error::NotApplicable(p));
    }
    let count = |mu: f64| roots_in_unit_interval(p, mu).map(|r| r.len());
    let mut lo = 1.0 / 3.0;
    let n_lo = count(lo)?;
    if n_lo != 0 {
        return Err(Error::InconsistentRootCount {
            p,
            mu: lo,
            count: n_lo,
            detail: "expected no roots at mu = 1/3".into(),
        });
    }
    // for p just above 5 the upper root hugs z = 1 as mu -> 1, so step the
    // upper end down until the window is resolved
    let mut hi = 1.0 - 1e-6;
    while count(hi)? != 2 {
        hi = 1.0 / 3.0 + 0.5 * (hi - 1.0 / 3.0);
        if hi - lo < 1e-9 {
            return Err(Error::InconsistentRootCount {
                p,
                mu: hi,
                count: count(hi)?,
                detail: "no two-root window found above mu = 1/3".into(),
            });
        }
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        match count(mid)? {
            0 => lo = mid,
            2 => hi = mid,
            n => {
                return Err(Error::InconsistentRootCount {
                    p,
                    mu: mid,
                    count: n,
                    detail: "odd root count for p > 5".into(),
                })
            }
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Central difference `(d(c-h) - 2 d(c) + d(c+h)) / h^2` of the closed-form `d`.
pub fn d_second_derivative_fd(ctx: &WaveContext, h: f64) -> Result<f64> {
    let c = ctx.c();
    if !(h > 1e-6 && h < 1e-2) {
        return Err(Error::InvalidParams(format!(
            "step h must lie in (1e-6, 1e-2) (got {h})"
        )));
    }
    if (c.abs() + h) >= 1.0 {
        return Err(Error::VelocityOutOfRange { c: c.abs() + h });
    }
    let params = ctx.params();
    let d0 = d_zero(params)?;
    let f = |c: f64| d_ratio(params, c);
    Ok(d0 * (f(c - h) - 2.0 * f(c) + f(c + h)) / (h * h))
}

/// `d''(c) = d(0) (p-1)^{-2} (1-c^2)^{(7-3p)/(2(p-1))} (1-mu c^2)^{-3/2} G(c^2)`.
pub fn d_second_derivative(ctx: &WaveContext) -> Result<f64> {
    let params = ctx.params();
    let (p, mu, c2) = (params.p(), params.mu(), ctx.c2());
    let d0 = d_zero(params)?;
    Ok(d0 / (p - 1.0).powi(2)
        * (1.0 - c2).powf((7.0 - 3.0 * p) / (2.0 * (p - 1.0)))
        * (1.0 - mu * c2).powf(-1.5)
        * g_eval(c2, p, mu))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VelocityVerdict {
    /// `c^2 < c0^2`.
    UnstableByBlowUp,
    /// `c^2` strictly inside the convexity region of `d`.
    OrbitallyStable,
    /// Neither criterion applies.
    Undetermined,
    /// `c^2` sits on `c0^2` or on a root of `G`.
    Unclassified,
}

/// What the threshold and the convexity region say about a given speed.
pub fn velocity_verdict(ctx: &WaveContext) -> Result<VelocityVerdict> {
    let params = ctx.params();
    let c2 = ctx.c2();
    let c02 = critical_velocity_squared(params);
    let region = classify_region(params.p(), params.mu())?;
    let near = |z: f64| (c2 - z).abs() <= BOUNDARY_TOL;
    if near(c02) || region.roots_in_unit.iter().any(|&z| near(z)) {
        return Ok(VelocityVerdict::Unclassified);
    }
    Ok(if c2 < c02 {
        VelocityVerdict::UnstableByBlowUp
    } else if region.contains(c2) {
        VelocityVerdict::OrbitallyStable
    } else {
        VelocityVerdict::Undetermined
    })
}
