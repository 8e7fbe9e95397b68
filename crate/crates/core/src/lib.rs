//! Direct and inverse two-spectra problem for Jacobi matrices.
//!
//! A finite Jacobi matrix `J` (real diagonal `q`, positive off-diagonal `b`)
//! and its first-entry perturbation `J(θ)`, obtained by replacing `q₁` with
//! `θ²q₁` and `b₁` with `θb₁`, have interlacing spectra. This crate computes
//! those spectra, checks every identity linking them, and runs the inverse
//! problem: from the two spectra alone it recovers `θ`, the spectral measure
//! of `J`, and the matrix itself. The [`mass_spring`] module translates
//! between Jacobi matrices and chains of masses coupled by springs, where
//! `J(θ)` corresponds to changing the first mass.
//!
//! All numerics are generic over [`Real`]. `f64` is the everyday scalar;
//! the inverse problem is exponentially ill-conditioned in the matrix size,
//! so callers reconstructing large matrices supply a wider scalar type.
//!
//! ```
//! use twospectra::{direct, inverse, JacobiMatrix, Theta};
//!
//! let j = JacobiMatrix::new(vec![0.0, 0.0], vec![1.0]).unwrap();
//! let report = direct::spectra_pair(&j, &Theta::new(2.0).unwrap()).unwrap();
//! let solution = inverse::solve(&inverse::InverseInput::new(report.pair.clone(), None).unwrap()).unwrap();
//! assert!((solution.theta.get() - 2.0).abs() < 1e-12);
//! assert!((solution.matrix.off()[0] - 1.0).abs() < 1e-12);
//! ```
#![no_std]
#![warn(rust_2018_idioms, unused_qualifications)]
// `!(a < b)` is used on purpose so that NaN takes the failing branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod admissibility;
pub mod direct;
mod error;
pub mod inverse;
pub mod mass_spring;
mod real;
pub mod summation;
pub mod tridiag;
pub mod types;

pub use error::{Error, Region, Result};
pub use num_complex::Complex;
pub use real::Real;
pub use types::{
    apply_theta, enumerate_spectrum, pair_spectra, IndexedSpectrum, JacobiMatrix, Shift,
    SpectralMeasure, SpectrumPair, Theta,
};
