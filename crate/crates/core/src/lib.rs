//! Wave impedance of radially inhomogeneous, cylindrically anisotropic
//! elastic structures.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! * [`numkernel`]: small dense complex matrices (LU, inverse, `expm`).
//! * [`cylfun`]: integer-order Bessel/Hankel functions of complex argument.
//! * [`elastodyn`]: Voigt moduli, radial profiles and the state-space system
//!   matrix `Q(r)` of time-harmonic cylindrical waves.
//! * [`matricant`]: local propagator expansions `M(r+h, r)` (Taylor,
//!   Lagrange, exponential and Magnus families) and global composition.
//! * [`impedance`]: the Riccati equation for the conditional impedance, the
//!   Möbius marching scheme and the impedance/matricant conversions.
//! * [`tilayers`]: closed-form transversely isotropic solutions and the
//!   recursive two-point impedance of layered cylinders.
//! * [`scatter`]: plane-wave acoustic scattering from an elastic cylinder
//!   immersed in fluid.
//!
//! All quantities are dimensionless: lengths by the outer radius, densities
//! by the fluid density, moduli by `rho_f * c_f^2`.
#![no_std]
// negated comparisons reject NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cylfun;
pub mod elastodyn;
mod error;
pub mod impedance;
pub mod matricant;
pub mod numkernel;
pub mod scatter;
pub mod tilayers;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use numkernel::CMat;

/// Shorthand used across the crate.
pub type C64 = Complex64;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}
