//! Physical parameters of `u_tt - u_xx + a u_xxxx - b u_xxtt = -(|u|^{p-1} u)_xx`
//! and the velocity-dependent coefficients of its traveling waves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The triple `(a, b, p)` with `a > b >= 0` and `p > 1`.
///
/// `b = 0` is the generalized Boussinesq limit and is admitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    a: f64,
    b: f64,
    p: f64,
    mu: f64,
}

impl ModelParams {
    pub fn new(a: f64, b: f64, p: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && p.is_finite()) {
            return Err(Error::InvalidParams("a, b and p must be finite".into()));
        }
        if a <= 0.0 {
            return Err(Error::InvalidParams(format!("a must be > 0 (got {a})")));
        }
        if b < 0.0 {
            return Err(Error::InvalidParams(format!("b must be >= 0 (got {b})")));
        }
        if b >= a {
            return Err(Error::InvalidParams(format!(
                "a must be > b (got a = {a}, b = {b})"
            )));
        }
        if p <= 1.0 {
            return Err(Error::InvalidParams(format!("p must be > 1 (got {p})")));
        }
        Ok(Self { a, b, p, mu: b / a })
    }

    /// Parameterization by the dispersion ratio `mu = b / a`.
    pub fn from_mu(a: f64, mu: f64, p: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&mu) {
            return Err(Error::InvalidParams(format!(
                "mu must lie in [0, 1) (got {mu})"
            )));
        }
        Self::new(a, mu * a, p)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `|u|^{p-1} u`, evaluated as `sign(u) |u|^p`.
    #[inline]
    pub fn nonlinearity(&self, u: f64) -> f64 {
        u.signum() * u.abs().powf(self.p)
    }

    /// `|u|^{p+1}`.
    #[inline]
    pub fn abs_pow_p1(&self, u: f64) -> f64 {
        u.abs().powf(self.p + 1.0)
    }
}

/// Model parameters together with a wave velocity `c`, `c^2 < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveContext {
    params: ModelParams,
    c: f64,
}

impl WaveContext {
    pub fn new(params: ModelParams, c: f64) -> Result<Self> {
        if !c.is_finite() || c * c >= 1.0 {
            return Err(Error::VelocityOutOfRange { c });
        }
        Ok(Self { params, c })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn c2(&self) -> f64 {
        self.c * self.c
    }

    /// `A = 1 - c^2`.
    pub fn big_a(&self) -> f64 {
        1.0 - self.c2()
    }

    /// `B = a - b c^2`.
    pub fn big_b(&self) -> f64 {
        self.params.a - self.params.b * self.c2()
    }

    /// Same parameters, different velocity.
    pub fn with_velocity(&self, c: f64) -> Result<Self> {
        Self::new(self.params, c)
    }

    /// Exponential decay rate of the profile tails, `sqrt(A / B)`.
    pub fn decay_rate(&self) -> f64 {
        (self.big_a() / self.big_b()).sqrt()
    }
}
