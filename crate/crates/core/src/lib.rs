//! Sampling from the stationary distribution of a Markov chain through its
//! split-chain mixture representation.
//!
//! A one-step minorization `P(x, ·) ≥ ε ν(·)` on a small set `C` makes the
//! set `C × {1}` of the split chain an accessible atom. Writing
//! `p_t = Pr(τ ≥ t) / E(τ)` and `Q_t` for the law of `X_t` given no
//! regeneration before `t`, the stationary law is the mixture
//! `π = Σ_t p_t Q_t`. This crate turns that identity into samplers:
//!
//! * [`perfect`]: exact draws when `C` is the whole space (the multigamma
//!   coupler and read-once coupling from the past over random maps).
//! * [`mixture`]: the general case. `Q_t` by rejection over split-chain
//!   tours, and a truncated weight law `T̃` on `{1..M}` whose mixture `π̃`
//!   is within a chosen total-variation budget of `π`.
//! * [`bounds`]: drift-condition tail bounds on the regeneration time and
//!   the truncation level `M` they imply.
//! * [`oracle`]: exact linear-algebra counterparts for finite chains, used
//!   to check every sampler.
//!
//! Every sampler takes an explicit [`RngStream`]; see [`rng`] for the
//! seeding and stream-splitting rule.

pub mod ar1;
pub mod bounds;
pub mod commands;
pub mod error;
pub mod fixtures;
pub mod mixture;
pub mod oracle;
pub mod perfect;
pub mod quadrature;
pub mod rng;
pub mod spec_file;
pub mod split;

pub use error::{Error, Result};
pub use rng::RngStream;
pub use split::{
    FiniteChain, FiniteMinorization, MarkovKernel, Minorization, SplitChain, SplitState,
    StateSpace, Strategy, TourRecord,
};
