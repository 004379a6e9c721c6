//! Sequential closures and asymptotics of limit-periodic continued fractions,
//! perturbed matrix products, q-continued fractions, and Poincaré-type
//! recurrences.
//!
//! The crate is organised around a small set of building blocks:
//!
//! - [`linalg`]: dense complex matrices with the entrywise sup norm, 2×2
//!   diagonalization, companion-matrix powers in closed form, and convergent
//!   infinite products `∏(I + Aᵢ)` with a rigorous truncation bound.
//! - [`products`]: the perturbed-product limit `F = lim (∏ Dᵢ) M⁻ⁿ` and the
//!   asymptotic replacement of `∏ Dᵢ` by `F·Mⁿ`.
//! - [`cf`]: continued fraction elements, convergents, classical and
//!   modified approximants, equivalence and Bauer-Muir transforms.
//! - [`closure`]: the coefficients a, b, c, d of the limiting Möbius map,
//!   circle/line geometry of the set of subsequential limits, and the
//!   limiting Cauchy distribution of approximants.
//! - [`qseries`]: q-Pochhammer symbols, the ₁φ₁ series, and closed-form
//!   evaluation of a five-parameter q-continued fraction.
//! - [`subseq`]: extraction of approximant subsequences converging to a
//!   chosen point of the closure circle.
//! - [`recurrence`]: Poincaré-type recurrences with unimodular characteristic
//!   roots and (r,s)-matrix continued fractions.
//!
//! All computation is complex double precision. The crate is `no_std`
//! compatible (with `alloc`) when built without the default `std` feature.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod angle;
pub mod cf;
pub mod closure;
pub mod error;
pub mod fit;
pub mod linalg;
pub mod mobius;
pub mod products;
pub mod qseries;
pub mod recurrence;
pub mod sphere;
pub mod subseq;

pub use error::{Error, Result};

/// Complex double-precision scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Default absolute tolerance for equality-style checks.
pub const EQ_TOL: f64 = 1e-10;

/// Default relative tolerance below which a pair of 2×2 eigenvalues is
/// treated as coincident (defective case).
pub const EIG_SEP_TOL: f64 = 1e-8;
