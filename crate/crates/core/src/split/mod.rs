//! Markov kernels, one-step minorizations, and the split chain built from
//! them.

mod chain;
mod kernel;
mod minorization;
mod validate;

pub use chain::{Advance, SplitChain, SplitState, Strategy, TourFailure, TourRecord, DEFAULT_TOUR_CAP};
pub use kernel::{validate_rows, FiniteChain, MarkovKernel, StateSpace};
pub use minorization::{
    auto_minorization_finite, residual_distribution, FiniteMinorization, Minorization, RejectionResidual,
    Residual, DEFAULT_REJECTION_CAP,
};
pub use validate::{validate_model, MinorizationCheck, ValidationReport, Violation};

/// Row sums must be within this of 1.
pub const STOCHASTIC_TOL: f64 = 1e-9;
/// Slack allowed in pointwise inequalities such as `ε ν(y) ≤ p(x, y)`.
pub const POINTWISE_TOL: f64 = 1e-12;
