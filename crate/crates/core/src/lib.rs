//! Traveling waves of the double dispersion equation
//!
//! `u_tt - u_xx + a u_xxxx - b u_xxtt = -(|u|^{p-1} u)_xx`,  `a > b >= 0`, `p > 1`:
//! exact solitary waves and their functionals ([`wave`]), blow-up thresholds
//! and orbital-stability regions ([`stability`]), and a Fourier
//! pseudospectral solver for the first-order system in `(u, w)` ([`sim`]).

pub mod error;
pub mod grid;
pub mod params;
pub mod sim;
pub mod stability;
pub mod wave;

pub use error::{Error, Result};
pub use grid::{Grid, GridSpec};
pub use params::{ModelParams, WaveContext};
