//! Smooth functional calculus for tuples of non-commuting complex matrices
//! with real spectra.
//!
//! Given matrices `P_1, ..., P_m` whose spectra lie on the real axis and a
//! smooth compactly supported test function `f`, the central object is
//!
//! ```text
//! f(P_1, ..., P_m) = (-1/pi)^m ∫∫ (dbar_1 ... dbar_m f~)(z)
//!                     (z_1 - P_1)^{-1} ... (z_m - P_m)^{-1} L(dz_1)...L(dz_m)
//! ```
//!
//! where `f~` is an almost-holomorphic extension of `f` whose dbar derivative
//! vanishes to high order at the real axis in each variable separately. The
//! crate provides
//!
//! * [`funcs`] — a closed symbolic algebra of test functions on the line
//!   (bumps, plateaus, pole kernels, tabulated compositions) with exact
//!   derivatives of every order, plus the pole-augmented algebra used for
//!   functions with non-trivial behaviour at infinity;
//! * [`extend`] — almost-holomorphic extension constructors (Fourier,
//!   truncated-Taylor, exact pole) with closed-form dbar evaluators;
//! * [`linop`] — dense complex matrices as operators: resolvents, spectra,
//!   real-spectrum certificates, resolvent growth profiles, joint spectra of
//!   commuting tuples, the Cayley transform, and the diagonalization oracle;
//! * [`quad`] — deterministic panel Gauss-Legendre quadrature over plane
//!   regions with geometric refinement toward the real axis;
//! * [`calculus`] — the functional calculus itself: single and multi
//!   operator application, operator orderings, the extended pole calculus,
//!   the circle calculus, generator recovery and composition;
//! * [`experiments`] — named, seeded experiment drivers behind the `opcalc`
//!   CLI, emitting JSON reports and CSV tables.

pub mod calculus;
pub mod error;
pub mod experiments;
pub mod extend;
pub mod funcs;
pub mod jsonfmt;
pub mod linop;
pub mod quad;
pub mod rng;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix used throughout.
pub type CMatrix = nalgebra::DMatrix<C64>;
