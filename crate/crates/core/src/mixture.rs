//! The approximate sampler for the general case `C ≠ X`.
//!
//! `Q_t` is drawn by rejection over tours from the atom; the weight law is
//! truncated to `T̃` on `{1..M}` with `p̃_t ∝ Pr(τ ≥ t)` and drawn by
//! rejection against i.i.d. tour lengths. No attempt is made to sample the
//! untruncated `T` exactly.

use serde::Serialize;

use crate::rng::{cumulative, sample_cumulative, RngStream};
use crate::split::{MarkovKernel, Minorization, SplitChain, Strategy};
use crate::{Error, Result};

/// Attempts allowed per accepted draw in either rejection loop.
pub const DEFAULT_ATTEMPT_CAP: usize = 1_000_000;

/// An accepted `Q_t` draw.
#[derive(Clone, Debug, PartialEq)]
pub struct QtDraw<S> {
    pub state: S,
    /// Tours simulated, including the accepted one.
    pub attempts: usize,
}

/// Draw from `Q_t`, the law of `X_t` from the atom given no regeneration at
/// times `1..t−1`. `Q_1 = ν` is drawn directly.
pub fn sample_qt<K, M>(
    chain: &SplitChain<'_, K, M>,
    t: usize,
    strategy: Strategy,
    rng: &mut RngStream,
    attempt_cap: usize,
) -> Result<QtDraw<K::State>>
where
    K: MarkovKernel,
    M: Minorization<K::State>,
{
    if t == 0 {
        return Err(Error::InvalidArgument("t must be at least 1".into()));
    }
    if t == 1 {
        return Ok(QtDraw {
            state: chain.minor.sample_nu(rng),
            attempts: 1,
        });
    }
    for attempt in 1..=attempt_cap {
        if let Some(state) = chain.survive(t, strategy, rng)? {
            return Ok(QtDraw { state, attempts: attempt });
        }
    }
    Err(Error::CapExceeded {
        what: "Q_t rejection sampling",
        cap: attempt_cap,
        acceptance_rate: 0.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TDraw {
    pub t: usize,
    pub attempts: usize,
}

/// Draw `T̃` on `{1..M}`: `v ~ Uni{1..M}`, `w` an independent tour length,
/// accept `v` when `w ≥ v`.
pub fn sample_t_tilde<F>(m: usize, mut tour_source: F, rng: &mut RngStream, attempt_cap: usize) -> Result<TDraw>
where
    F: FnMut(&mut RngStream) -> Result<usize>,
{
    if m == 0 {
        return Err(Error::InvalidArgument("M must be at least 1".into()));
    }
    for attempt in 1..=attempt_cap {
        let v = rng.uniform_index1(m);
        let w = tour_source(rng)?;
        if w >= v {
            return Ok(TDraw { t: v, attempts: attempt });
        }
    }
    Err(Error::CapExceeded {
        what: "T-tilde rejection sampling",
        cap: attempt_cap,
        acceptance_rate: 0.0,
    })
}

/// A draw from `π̃` with its bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct PiTildeDraw<S> {
    pub state: S,
    pub t: usize,
    pub t_attempts: usize,
    pub q_attempts: usize,
}

/// `π̃ = Σ_{t ≤ M} p̃_t Q_t`: draw `t ~ T̃`, then `X ~ Q_t`.
pub fn sample_pi_tilde<K, M>(
    chain: &SplitChain<'_, K, M>,
    m: usize,
    strategy: Strategy,
    rng: &mut RngStream,
    attempt_cap: usize,
) -> Result<PiTildeDraw<K::State>>
where
    K: MarkovKernel,
    M: Minorization<K::State>,
{
    let td = sample_t_tilde(m, |r| chain.tour_length(strategy, r), rng, attempt_cap)?;
    let q = sample_qt(chain, td.t, strategy, rng, attempt_cap)?;
    Ok(PiTildeDraw {
        state: q.state,
        t: td.t,
        t_attempts: td.attempts,
        q_attempts: q.attempts,
    })
}

/// The truncated weight law `T̃`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncatedWeights {
    pub m: usize,
    /// `p̃_t`, when the tails `Pr(τ ≥ t)` are known exactly.
    pub p_tilde: Option<Vec<f64>>,
    pub gamma_budget: f64,
    #[serde(skip)]
    cdf: Option<Vec<f64>>,
}

impl TruncatedWeights {
    pub fn new(m: usize, gamma_budget: f64) -> Self {
        Self {
            m,
            p_tilde: None,
            gamma_budget,
            cdf: None,
        }
    }

    /// Build `p̃` from exact tails `Pr(τ ≥ t)`, `t = 1..`, of which the
    /// first `m` are used.
    pub fn from_tails(tails: &[f64], m: usize, gamma_budget: f64) -> Result<Self> {
        if m == 0 || tails.len() < m {
            return Err(Error::InvalidArgument(format!("need {m} tail values, got {}", tails.len())));
        }
        let total: f64 = tails[..m].iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidArgument("tails have no mass".into()));
        }
        let p: Vec<f64> = tails[..m].iter().map(|t| t / total).collect();
        Ok(Self {
            m,
            cdf: Some(cumulative(&p)),
            p_tilde: Some(p),
            gamma_budget,
        })
    }

    /// Inversion draw from exact `p̃`; the cross-check path for
    /// [`sample_t_tilde`].
    pub fn sample_inversion(&self, rng: &mut RngStream) -> Result<usize> {
        let cdf = self
            .cdf
            .as_ref()
            .ok_or_else(|| Error::Precondition("exact p-tilde unavailable".into()))?;
        Ok(sample_cumulative(cdf, rng.uniform()) + 1)
    }
}

/// `Σ_t |p_t − p̃_t|`, an upper bound on `TV(π, π̃)` (missing entries are 0).
pub fn tv_budget(p: &[f64], p_tilde: &[f64]) -> f64 {
    let n = p.len().max(p_tilde.len());
    (0..n)
        .map(|i| (p.get(i).copied().unwrap_or(0.0) - p_tilde.get(i).copied().unwrap_or(0.0)).abs())
        .sum()
}
