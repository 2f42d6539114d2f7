//! Allocation-light numerics for the SQG front equation.
//!
//! This crate carries everything that does not need a Fourier transform or
//! the filesystem:
//!
//! - [`symbols`]: the expansion coefficients `c_n`, `d_{n,l}`, the multilinear
//!   symbols `T_n` (closed form and an independent quadrature route), and the
//!   alternating subset-sum identity they rely on.
//! - [`cutoff`]: the smooth bumps `psi` (Littlewood-Paley) and `chi`
//!   (paraproduct), frozen once so every consumer sees the same profile.
//! - [`resonance`]: the cubic phase `Phi`, stationary points of the linear
//!   flow, the cutoff scale `rho(t)`, the four resonance parallelograms and
//!   the modified-scattering weights.
//! - [`quadrature`]: adaptive Gauss-Kronrod integration.
//! - [`fit`]: log-log decay-rate fitting.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cutoff;
pub mod fit;
pub mod quadrature;
pub mod resonance;
pub mod special;
pub mod symbols;

pub use quadrature::{Estimate, GaussKronrod, QuadratureError};
pub use resonance::{ResonanceSet, ResonanceSets};
pub use symbols::{SymbolError, SymbolQuery};
