//! Spectra of transfer operators for one-dimensional expanding interval maps.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! * [`map_model`]: piecewise linear Markov maps and smooth full-branch maps
//!   (the Möbius family),
//! * [`transfer_matrix`]: the exact block upper-triangular representation of
//!   the weighted transfer operator on piecewise polynomials,
//! * [`spectral`]: eigenvalues, topological pressure, Lyapunov exponents,
//!   mixing rates and the bounds relating them,
//! * [`linearize`]: piecewise linear approximation of smooth maps through
//!   cylinder sets,
//! * [`chebyshev`]: Lagrange–Chebyshev collocation of the transfer operator
//!   for analytic full-branch maps,
//! * [`correlation`]: seeded Monte Carlo estimation of correlation functions
//!   and decay rates.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod chebyshev;
pub mod correlation;
pub mod eigen;
mod error;
pub mod linalg;
pub mod linearize;
pub mod map_model;
mod num;
pub mod quadrature;
pub mod random_map;
pub mod rng;
pub mod spectral;
pub mod transfer_matrix;

pub use error::{Error, Result};
pub use linalg::{Complex, Matrix};
pub use map_model::{
    FullBranchMap, Interval, IntervalMap, PiecewiseLinearMarkovMap, SmoothFullBranchMap,
    TransitionMatrix,
};
