//! Spectral toolkit for the Landau problem and the Klein-Gordon oscillator in
//! non-commutative complex space.
//!
//! The crate has two independent routes to every spectrum:
//!
//! * [`analytic`] evaluates the published closed-form energy levels,
//!   critical-point conditions, Zeeman-like splittings, and non-relativistic
//!   limits.
//! * [`oracle`] assembles each Hamiltonian as a dense matrix on a truncated
//!   two-mode Fock basis (built by [`fock`]), diagonalizes it with the
//!   in-crate Hermitian eigensolver ([`linalg`]), and adjudicates which
//!   closed-form variant the numerics actually match.
//!
//! [`params`] holds the physical inputs and the derived quantities shared by
//! both routes, and [`scan`] adds parameter sweeps and critical-point
//! location on top of the closed forms.

pub mod analytic;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod oracle;
pub mod params;
pub mod scan;

pub use error::CoreError;
pub use params::{derive, validate, DerivedParams, PhysParams};
