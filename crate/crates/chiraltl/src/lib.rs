//! Near-field Talbot-Lau interferometry of chiral molecules under chiral
//! Casimir-Polder forces.
//!
//! The library computes transmission fringes S(x_3), sinusoidal fringe
//! visibilities and enantiomer-difference metrics for a symmetric
//! three-grating interferometer whose walls act on the molecule through
//! chiral-mirror, bare-dielectric or chiral-coating Casimir-Polder
//! potentials. A brute-force wave-optics oracle validates the Talbot
//! coefficient engine end to end.
//!
//! Modules, bottom-up:
//! - [`constants`]: CODATA constants and rotatory-strength unit conversion;
//! - [`domain`]: molecules, gratings, wall models, the interferometer;
//! - [`quad`]: Gauss-Legendre and adaptive oscillatory quadrature;
//! - [`potentials`]: wall potentials V(x) and analytic forces;
//! - [`cutoff`]: deflection and fly-through cut-off solvers;
//! - [`talbot`]: grating coefficients, Talbot sums, signal and visibility;
//! - [`oracle`]: paraxial wave propagation cross-check;
//! - [`scenarios`]: the three grating-dressing scenarios, velocity binning,
//!   Delta S / Delta V_max and the (R_01, g_e) sweep;
//! - [`config`], [`output`], [`runner`]: CLI-facing configuration, bit-exact
//!   CSV emission and command drivers.

pub mod config;
pub mod constants;
pub mod cutoff;
pub mod domain;
pub mod error;
pub mod oracle;
pub mod output;
pub mod potentials;
pub mod quad;
pub mod runner;
pub mod scenarios;
pub mod talbot;

pub use error::{Error, Result};
