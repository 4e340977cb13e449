//! Gaussian periods and their relatives.
//!
//! The crate evaluates Gaussian periods `η_{n,ω}(k)`, cyclic supercharacters on
//! `(Z/nZ)^m`, the Laurent polynomial envelopes `g_d` that contain them, Weyl-sum
//! equidistribution checks, and ray class field periods built from Weierstrass ℘
//! values at torsion points of CM elliptic curves. Everything that is a plot ends
//! up as a list of [`PlotPoint`]s which [`render`] turns into PNG files.
//!
//! Module map:
//!
//! * [`modring`]: exact residues and matrices mod `n`, orders, factoring, searches.
//! * [`laurent`]: cyclotomic polynomials, reduction tables, `g_d`, hypocycloids.
//! * [`periods`]: Gaussian periods, supercharacters, animation batches, CSV output.
//! * [`weyl`]: exact and brute-force Weyl sums, point sets, discrepancy estimates.
//! * [`cm`]: imaginary quadratic arithmetic, ℘ numerics, torsion points, RCFPs.
//! * [`render`]: deterministic scatter rasterization.

pub mod cm;
pub mod laurent;
pub mod modring;
pub mod numeric;
pub mod periods;
pub mod render;
pub mod weyl;

pub use periods::PlotPoint;

pub use num_complex::Complex64;
