use serde::{Deserialize, Serialize};

use super::kernel::MarkovKernel;
use super::minorization::Minorization;
use crate::rng::RngStream;
use crate::{Error, Result};

/// Step cap for a single regeneration tour.
pub const DEFAULT_TOUR_CAP: usize = 1_000_000;

/// How the regeneration flag is produced along a split-chain path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Draw `δ_n ~ Ber(ε)` first, then `X_{n+1}` from `ν` or `R(X_n, ·)`.
    #[default]
    Forward,
    /// Draw `X_{n+1} ~ P(X_n, ·)` first, then
    /// `δ_n ~ Ber(ε ν(X_{n+1}) / p(X_n, X_{n+1}))`. Needs densities.
    Retrospective,
}

/// A state of the split chain on `X × {0, 1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitState<S> {
    pub x: S,
    pub delta: bool,
}

/// One move of the chain: the flag of the state left and the next state.
#[derive(Clone, Debug, PartialEq)]
pub struct Advance<S> {
    /// True when `(X_n, δ_n)` is in the atom `C × {1}`.
    pub regenerated: bool,
    pub next: S,
}

/// A regeneration tour started from the atom.
#[derive(Clone, Debug, PartialEq)]
pub struct TourRecord<S> {
    /// Realized `τ_α`.
    pub length: usize,
    /// `X_1, ..., X_τ`.
    pub path: Vec<S>,
    pub regenerated_at_c: bool,
}

/// A tour that did not complete, with whatever path was produced so far.
#[derive(Debug)]
pub struct TourFailure<S> {
    pub partial_path: Vec<S>,
    pub cause: Error,
}

impl<S> From<TourFailure<S>> for Error {
    fn from(f: TourFailure<S>) -> Self {
        f.cause
    }
}

/// The split chain assembled from a kernel and a minorization.
///
/// `δ` is only drawn at states inside `C`; off `C` it never influences the
/// path or the regeneration times, and [`SplitState::delta`] is reported
/// as `false` there.
pub struct SplitChain<'a, K, M> {
    pub kernel: &'a K,
    pub minor: &'a M,
    pub tour_cap: usize,
}

impl<K, M> Clone for SplitChain<'_, K, M> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<K, M> Copy for SplitChain<'_, K, M> {}

impl<'a, K, M> SplitChain<'a, K, M>
where
    K: MarkovKernel,
    M: Minorization<K::State>,
{
    pub fn new(kernel: &'a K, minor: &'a M) -> Self {
        Self {
            kernel,
            minor,
            tour_cap: DEFAULT_TOUR_CAP,
        }
    }

    pub fn with_tour_cap(mut self, cap: usize) -> Self {
        self.tour_cap = cap.max(1);
        self
    }

    pub fn in_atom(&self, s: &SplitState<K::State>) -> bool {
        s.delta && self.minor.in_small_set(&s.x)
    }

    fn draw_delta(&self, x: &K::State, rng: &mut RngStream) -> bool {
        self.minor.in_small_set(x) && rng.bernoulli(self.minor.epsilon())
    }

    /// A split-chain state entering at `x`.
    pub fn enter(&self, x: K::State, rng: &mut RngStream) -> SplitState<K::State> {
        let delta = self.draw_delta(&x, rng);
        SplitState { x, delta }
    }

    /// One transition of the split kernel `P′` from `s`.
    pub fn step(&self, s: &SplitState<K::State>, rng: &mut RngStream) -> Result<SplitState<K::State>> {
        let next = if self.in_atom(s) {
            self.minor.sample_nu(rng)
        } else if self.minor.in_small_set(&s.x) {
            self.kernel.sample_residual(self.minor, &s.x, rng)?
        } else {
            self.kernel.sample_next(&s.x, rng)
        };
        Ok(self.enter(next, rng))
    }

    /// Regeneration probability for a step `x → y` that left `C`, given `y`.
    pub fn retrospective_flag_probability(&self, x: &K::State, y: &K::State) -> Result<f64> {
        if !self.minor.in_small_set(x) {
            return Ok(0.0);
        }
        let p = self
            .kernel
            .density(x, y)
            .ok_or(Error::DensityUnavailable("retrospective splitting"))?;
        let n = self
            .minor
            .nu_density(y)
            .ok_or(Error::DensityUnavailable("retrospective splitting"))?;
        if p <= 0.0 {
            return Err(Error::InconsistentDensity {
                x: format!("{x:?}"),
                y: format!("{y:?}"),
            });
        }
        Ok((self.minor.epsilon() * n / p).min(1.0))
    }

    /// Resolve `δ_n` at `x = X_n` and draw `X_{n+1}`.
    pub fn advance(&self, x: &K::State, strategy: Strategy, rng: &mut RngStream) -> Result<Advance<K::State>> {
        match strategy {
            Strategy::Forward => {
                if !self.minor.in_small_set(x) {
                    return Ok(Advance {
                        regenerated: false,
                        next: self.kernel.sample_next(x, rng),
                    });
                }
                if rng.bernoulli(self.minor.epsilon()) {
                    Ok(Advance {
                        regenerated: true,
                        next: self.minor.sample_nu(rng),
                    })
                } else {
                    Ok(Advance {
                        regenerated: false,
                        next: self.kernel.sample_residual(self.minor, x, rng)?,
                    })
                }
            }
            Strategy::Retrospective => {
                let next = self.kernel.sample_next(x, rng);
                let regenerated = if self.minor.in_small_set(x) {
                    let q = self.retrospective_flag_probability(x, &next)?;
                    rng.bernoulli(q)
                } else {
                    false
                };
                Ok(Advance { regenerated, next })
            }
        }
    }

    /// Run one tour from the atom (`X_1 ~ ν`) until the first `n ≥ 1`
    /// with `(X_n, δ_n)` in the atom.
    pub fn simulate_tour(
        &self,
        strategy: Strategy,
        rng: &mut RngStream,
    ) -> std::result::Result<TourRecord<K::State>, TourFailure<K::State>> {
        let mut x = self.minor.sample_nu(rng);
        let mut path = Vec::new();
        loop {
            let step = match self.advance(&x, strategy, rng) {
                Ok(s) => s,
                Err(cause) => {
                    path.push(x);
                    return Err(TourFailure {
                        partial_path: path,
                        cause,
                    });
                }
            };
            path.push(x);
            if step.regenerated {
                return Ok(TourRecord {
                    length: path.len(),
                    path,
                    regenerated_at_c: true,
                });
            }
            if path.len() >= self.tour_cap {
                return Err(TourFailure {
                    partial_path: path,
                    cause: Error::TourOverflow { cap: self.tour_cap },
                });
            }
            x = step.next;
        }
    }

    /// Length of one tour from the atom, without keeping the path.
    pub fn tour_length(&self, strategy: Strategy, rng: &mut RngStream) -> Result<usize> {
        let mut x = self.minor.sample_nu(rng);
        for n in 1..=self.tour_cap {
            let step = self.advance(&x, strategy, rng)?;
            if step.regenerated {
                return Ok(n);
            }
            x = step.next;
        }
        Err(Error::TourOverflow { cap: self.tour_cap })
    }

    /// Start a tour from the atom and return `X_t` if no regeneration
    /// happened at times `1..t−1`, or `None` at the first regeneration.
    pub fn survive(&self, t: usize, strategy: Strategy, rng: &mut RngStream) -> Result<Option<K::State>> {
        let mut x = self.minor.sample_nu(rng);
        for _ in 1..t {
            let step = self.advance(&x, strategy, rng)?;
            if step.regenerated {
                return Ok(None);
            }
            x = step.next;
        }
        Ok(Some(x))
    }
}
