//! Cone-adapted shearlet frames and the sequence spaces built on their
//! coefficients.
//!
//! The crate is organised bottom-up:
//!
//! * [`dyadic`] and [`geometry`] give exact arithmetic over the shearlet
//!   index set: sheared cubes `Q_{j,l,k}`, tilings and the measures `nu_beta`.
//! * [`frame`] is the band-limited 2-D frame on the torus (windows, band
//!   spectra, analysis and synthesis by FFT).
//! * [`spaces`] holds the Besov, Triebel-Lizorkin and weighted Lorentz
//!   quasi-norms on finitely supported coefficient sequences.
//! * [`democracy`], [`rnla`] and [`interpolation`] are empirical verifiers for
//!   democracy bounds, restricted nonlinear approximation and real
//!   interpolation identities.
//! * [`decay`] compares shearlet and Haar N-term approximation on a cartoon
//!   image.

pub mod corpus;
pub mod decay;
pub mod democracy;
pub mod dyadic;
pub mod error;
pub mod frame;
pub mod geometry;
pub mod interpolation;
pub mod rnla;
pub mod spaces;
pub mod sum;

pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use frame::{GridFunction, ShearletSystem2D, Window1D};
pub use geometry::{Cube, IndexSet, MeasureSpec, ShearIndex};
pub use num_complex::Complex64;
pub use spaces::{CoeffSeq, SpaceParams, WeightSeq};
