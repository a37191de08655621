//! Periodic grid on `[-L/2, L/2)` with FFT plans and spectral calculus.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 64;

/// Serializable description of a [`Grid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub length: f64,
    pub n_points: usize,
}

/// Uniform periodic grid. Wavenumbers are stored in FFT order
/// (`0, 1, ..., N/2-1, -N/2, ..., -1` times `2 pi / L`).
#[derive(Clone)]
pub struct Grid {
    length: f64,
    n: usize,
    dx: f64,
    x: Vec<f64>,
    xi: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("length", &self.length)
            .field("n", &self.n)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.length == other.length && self.n == other.n
    }
}

impl Grid {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "length must be positive (got {length})"
            )));
        }
        if n < MIN_POINTS || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "point count must be a power of two >= {MIN_POINTS} (got {n})"
            )));
        }
        let dx = length / n as f64;
        let x = (0..n).map(|j| -0.5 * length + j as f64 * dx).collect();
        let xi = (0..n)
            .map(|k| {
                let k = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
                2.0 * PI * k / length
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        Ok(Self {
            length,
            n,
            dx,
            x,
            xi,
            fwd,
            inv,
        })
    }

    pub fn from_spec(spec: GridSpec) -> Result<Self> {
        Self::new(spec.length, spec.n_points)
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            length: self.length,
            n_points: self.n,
        }
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn points(&self) -> &[f64] {
        &self.x
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.xi
    }

    /// Smallest nonzero wavenumber, `2 pi / L`.
    pub fn first_mode(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Index of the unpaired Nyquist mode `-N/2`.
    pub fn nyquist(&self) -> usize {
        self.n / 2
    }

    /// Largest resolved wavenumber magnitude.
    pub fn max_wavenumber(&self) -> f64 {
        PI / self.dx
    }

    /// Map `x` into `[-L/2, L/2)`.
    pub fn wrap(&self, x: f64) -> f64 {
        (x + 0.5 * self.length).rem_euclid(self.length) - 0.5 * self.length
    }

    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(values.len(), self.n);
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        buf
    }

    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        self.fwd.process(buf);
    }

    /// Normalized inverse transform, in place.
    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        self.inv.process(buf);
        let scale = 1.0 / self.n as f64;
        for z in buf.iter_mut() {
            *z *= scale;
        }
    }

    /// Normalized inverse transform returning the real part and the largest
    /// discarded imaginary component.
    pub fn inverse_real(&self, spectrum: &[Complex64]) -> (Vec<f64>, f64) {
        let mut buf = spectrum.to_vec();
        self.inverse_in_place(&mut buf);
        let imag = buf.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
        (buf.into_iter().map(|z| z.re).collect(), imag)
    }

    /// Multiplier `i xi` of `d/dx`, with the Nyquist mode zeroed so that the
    /// derivative of a real field stays real.
    pub fn ik(&self, k: usize) -> Complex64 {
        if k == self.nyquist() {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, self.xi[k])
        }
    }

    pub fn derivative(&self, values: &[f64]) -> Vec<f64> {
        let mut spec = self.forward(values);
        for (k, z) in spec.iter_mut().enumerate() {
            *z *= self.ik(k);
        }
        self.inverse_real(&spec).0
    }

    pub fn second_derivative(&self, values: &[f64]) -> Vec<f64> {
        let mut spec = self.forward(values);
        for (z, &xi) in spec.iter_mut().zip(&self.xi) {
            *z *= -xi * xi;
        }
        self.inverse_real(&spec).0
    }

    /// Rectangle rule, spectrally accurate for smooth periodic integrands.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.dx * values.iter().sum::<f64>()
    }

    pub fn l2_sq(&self, values: &[f64]) -> f64 {
        self.dx * values.iter().map(|v| v * v).sum::<f64>()
    }

    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.dx * f.iter().zip(g).map(|(a, b)| a * b).sum::<f64>()
    }

    /// `||f||^2_{L^2} + ||f_x||^2_{L^2}` from an unnormalized spectrum.
    pub fn h1_sq_spectral(&self, spectrum: &[Complex64]) -> f64 {
        let w = self.dx / self.n as f64;
        w * spectrum
            .iter()
            .enumerate()
            .map(|(k, z)| {
                let xi = if k == self.nyquist() { 0.0 } else { self.xi[k] };
                (1.0 + xi * xi) * z.norm_sqr()
            })
            .sum::<f64>()
    }

    pub fn h1_sq(&self, values: &[f64]) -> f64 {
        self.h1_sq_spectral(&self.forward(values))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(10.0, 100).is_err());
        assert!(Grid::new(10.0, 32).is_err());
        assert!(Grid::new(-1.0, 64).is_err());
        assert!(Grid::new(10.0, 64).is_ok());
    }

    #[test]
    fn layout() {
        let g = Grid::new(8.0, 64).unwrap();
        assert!((g.dx() * g.len() as f64 - g.length()).abs() < 1e-15);
        assert_eq!(g.points()[0], -4.0);
        assert_eq!(g.wavenumbers()[0], 0.0);
        assert!((g.wavenumbers()[1] - g.first_mode()).abs() < 1e-15);
        assert!((g.wavenumbers()[32] + g.max_wavenumber()).abs() < 1e-12);
        assert!((g.wrap(4.5) + 3.5).abs() < 1e-14);
        assert!((g.wrap(-4.5) - 3.5).abs() < 1e-14);
    }

    #[test]
    fn derivative_of_trig() {
        let g = Grid::new(2.0 * PI, 64).unwrap();
        let f: Vec<f64> = g.points().iter().map(|x| (3.0 * x).sin()).collect();
        let df = g.derivative(&f);
        let d2f = g.second_derivative(&f);
        for ((x, d), d2) in g.points().iter().zip(&df).zip(&d2f) {
            assert!((d - 3.0 * (3.0 * x).cos()).abs() < 1e-12);
            assert!((d2 + 9.0 * (3.0 * x).sin()).abs() < 1e-11);
        }
    }

    #[test]
    fn h1_norm_matches_physical() {
        let g = Grid::new(20.0, 256).unwrap();
        let f: Vec<f64> = g.points().iter().map(|x| (-x * x).exp()).collect();
        let df = g.derivative(&f);
        let direct = g.l2_sq(&f) + g.l2_sq(&df);
        assert!((g.h1_sq(&f) - direct).abs() < 1e-13);
        // ||exp(-x^2)||^2 = sqrt(pi/2)
        assert!((g.l2_sq(&f) - (PI / 2.0).sqrt()).abs() < 1e-13);
    }
}
