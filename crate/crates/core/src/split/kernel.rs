use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use super::minorization::{rejection_residual, Minorization, DEFAULT_REJECTION_CAP};
use super::{POINTWISE_TOL, STOCHASTIC_TOL};
use crate::rng::{cumulative, sample_cumulative, RngStream};
use crate::{Error, Result};

/// State-space descriptor. Densities are taken with respect to counting
/// measure on `Finite` spaces and Lebesgue measure on `Continuous` ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateSpace {
    /// States labeled `0..n`.
    Finite(usize),
    /// Real coordinates of the given dimension.
    Continuous(usize),
}

/// A Markov transition kernel `P(x, ·)`.
pub trait MarkovKernel: Sync {
    type State: Clone + Debug + Send + Sync;

    fn space(&self) -> StateSpace;

    /// Draw `y ~ P(x, ·)`.
    fn sample_next(&self, x: &Self::State, rng: &mut RngStream) -> Self::State;

    /// Transition density `p(x, y)` against the space's dominating measure.
    fn density(&self, _x: &Self::State, _y: &Self::State) -> Option<f64> {
        None
    }

    /// The full row `P(x, ·)`, when the space is finite.
    fn transition_row(&self, _x: &Self::State) -> Option<&[f64]> {
        None
    }

    /// All states, when the space is finite.
    fn enumerate_states(&self) -> Option<Vec<Self::State>> {
        None
    }

    /// Draw from the residual kernel `R(x, ·) = (P(x, ·) − ε ν) / (1 − ε)`.
    ///
    /// Finite rows with a known `ν` vector are sampled exactly by inversion.
    /// Otherwise `y ~ P(x, ·)` is accepted with probability
    /// `1 − ε ν(y) / p(x, y)`.
    fn sample_residual<M>(&self, minor: &M, x: &Self::State, rng: &mut RngStream) -> Result<Self::State>
    where
        M: Minorization<Self::State> + ?Sized,
        Self: Sized,
    {
        let eps = minor.epsilon();
        if eps >= 1.0 {
            return Err(Error::DegenerateResidual);
        }
        if let (Some(row), Some(nu), Some(states)) = (self.transition_row(x), minor.nu_vector(), self.enumerate_states()) {
            let target = rng.uniform() * (1.0 - eps);
            let mut acc = 0.0;
            let mut last_positive = None;
            for (j, (&p, &n)) in row.iter().zip(nu).enumerate() {
                let w = p - eps * n;
                if w < -POINTWISE_TOL {
                    return Err(Error::MinorizationViolation {
                        x: format!("{x:?}"),
                        y: j.to_string(),
                        lhs: eps * n,
                        rhs: p,
                    });
                }
                if w > 0.0 {
                    acc += w;
                    last_positive = Some(j);
                    if acc > target {
                        return Ok(states[j].clone());
                    }
                }
            }
            return last_positive.map(|j| states[j].clone()).ok_or(Error::DegenerateResidual);
        }
        rejection_residual(self, minor, x, rng, DEFAULT_REJECTION_CAP).map(|(y, _)| y)
    }
}

/// Check that every row is a probability vector.
pub fn validate_rows(rows: &[Vec<f64>]) -> Result<()> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty transition matrix".into()));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch(row.len(), n));
        }
        if let Some(j) = row.iter().position(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::NotStochastic {
                row: i,
                reason: format!("entry {j} is {}", row[j]),
            });
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::NotStochastic {
                row: i,
                reason: format!("sums to {sum}"),
            });
        }
    }
    Ok(())
}

/// A chain on `{0, ..., n−1}` given by a row-stochastic matrix.
#[derive(Clone, Debug)]
pub struct FiniteChain {
    rows: Vec<Vec<f64>>,
    cdfs: Vec<Vec<f64>>,
}

impl FiniteChain {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        validate_rows(&rows)?;
        let cdfs = rows.iter().map(|r| cumulative(r)).collect();
        Ok(Self { rows, cdfs })
    }

    pub fn n_states(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x]
    }

    /// `(PV)(x) = Σ_y P(x, y) V(y)` for every `x`.
    pub fn apply_to(&self, v: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(v).map(|(p, w)| p * w).sum())
            .collect()
    }

    /// The same chain with states relabeled: new state `perm[x]` is old state `x`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n_states();
        if perm.len() != n {
            return Err(Error::DimensionMismatch(perm.len(), n));
        }
        let mut rows = vec![vec![0.0; n]; n];
        for x in 0..n {
            for y in 0..n {
                rows[perm[x]][perm[y]] = self.rows[x][y];
            }
        }
        Self::new(rows)
    }
}

impl MarkovKernel for FiniteChain {
    type State = usize;

    fn space(&self) -> StateSpace {
        StateSpace::Finite(self.rows.len())
    }

    fn sample_next(&self, x: &usize, rng: &mut RngStream) -> usize {
        sample_cumulative(&self.cdfs[*x], rng.uniform())
    }

    fn density(&self, x: &usize, y: &usize) -> Option<f64> {
        Some(self.rows[*x][*y])
    }

    fn transition_row(&self, x: &usize) -> Option<&[f64]> {
        Some(&self.rows[*x])
    }

    fn enumerate_states(&self) -> Option<Vec<usize>> {
        Some((0..self.rows.len()).collect())
    }
}
