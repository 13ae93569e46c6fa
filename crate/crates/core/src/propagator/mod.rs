//! Solution operators for `(∂t + v·∇x − Δv) g = 0` and the Fourier-side
//! decay bounds.
//!
//! Three backends: closed-form Gaussian mixtures
//! ([`GaussianMixtureState::propagate`](crate::GaussianMixtureState::propagate)),
//! the FFT grid pipeline ([`propagate_grid`]), and a first-order
//! finite-difference reference ([`fd_solve`]).

mod decay;
mod fd;
mod pipeline;
mod symbol;

pub use decay::{decay_bound, tail_mass_grid, tail_mass_mixture, DecayConstants};
pub use fd::{fd_solve, FD_CONVERGENCE_ORDER};
pub use pipeline::{propagate_grid, propagate_grid_with, Guards};
pub use symbol::{expanded_exponent, symbol, SymbolEvaluation};
