//! Exact computations on finite chains.
//!
//! Total variation is reported as half the L1 distance. Sums of absolute
//! weight differences without the factor 1/2 are called budgets
//! ([`crate::mixture::tv_budget`]) and are never mixed with TV values.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::split::{FiniteMinorization, Minorization, POINTWISE_TOL, STOCHASTIC_TOL};
use crate::{Error, Result};

/// Tail terms below this are treated as zero when summing `E(τ)`.
pub const TAIL_CUTOFF: f64 = 1e-14;
/// Longest regeneration-time tail computed before giving up.
pub const TAIL_HORIZON: usize = 10_000_000;

/// A probability vector over `{0, ..., n−1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiniteDistribution(Vec<f64>);

impl FiniteDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("empty distribution".into()));
        }
        if let Some(w) = weights.iter().find(|&&w| !(w >= -POINTWISE_TOL)) {
            return Err(Error::InvalidArgument(format!("negative weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::InvalidArgument(format!("weights sum to {total}")));
        }
        Ok(Self(weights.into_iter().map(|w| w.max(0.0)).collect()))
    }

    /// Normalize nonnegative masses.
    pub fn from_masses(masses: Vec<f64>) -> Result<Self> {
        let total: f64 = masses.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidArgument("zero total mass".into()));
        }
        Self::new(masses.into_iter().map(|m| m / total).collect())
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        let mut w = vec![0.0; n];
        w[at] = 1.0;
        Self(w)
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    /// Frequencies of `samples` over `n` states.
    pub fn empirical(samples: &[usize], n: usize) -> Result<Self> {
        let mut counts = vec![0.0; n];
        for &s in samples {
            *counts.get_mut(s).ok_or(Error::UnknownLabel(s))? += 1.0;
        }
        Self::from_masses(counts)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mass_on(&self, states: &[usize]) -> f64 {
        states.iter().map(|&s| self.0[s]).sum()
    }
}

/// `(1/2) Σ |a_i − b_i|`.
pub fn tv_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(a.len(), b.len()));
    }
    Ok(0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
}

/// Two-sample TV between the empirical laws of `a` and `b` on `n` states.
pub fn two_sample_tv(a: &[usize], b: &[usize], n: usize) -> Result<f64> {
    let fa = FiniteDistribution::empirical(a, n)?;
    let fb = FiniteDistribution::empirical(b, n)?;
    tv_distance(fa.weights(), fb.weights())
}

fn strongly_connected(rows: &[Vec<f64>]) -> Result<()> {
    let n = rows.len();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for y in 0..n {
                let w = if forward { rows[x][y] } else { rows[y][x] };
                if w > 0.0 && !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    };
    for seen in [reach(true), reach(false)] {
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::Reducible(missing));
        }
    }
    Ok(())
}

/// The unique `π` with `π P = π`, by a direct linear solve.
pub fn stationary_exact(rows: &[Vec<f64>]) -> Result<FiniteDistribution> {
    crate::split::validate_rows(rows)?;
    strongly_connected(rows)?;
    let n = rows.len();
    // (Pᵀ − I) π = 0 with the last equation replaced by Σ π = 1.
    let mut a = DMatrix::from_fn(n, n, |i, j| rows[j][i] - if i == j { 1.0 } else { 0.0 });
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut rhs = DVector::zeros(n);
    rhs[n - 1] = 1.0;
    let lu = a.clone().lu();
    let mut pi = lu
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidArgument("singular stationary system".into()))?;
    // One round of iterative refinement.
    let r = &rhs - &a * &pi;
    if let Some(d) = lu.solve(&r) {
        pi += d;
    }
    let weights: Vec<f64> = pi.iter().map(|w| w.max(0.0)).collect();
    FiniteDistribution::from_masses(weights)
}

/// `‖π P − π‖_∞`.
pub fn stationarity_residual(rows: &[Vec<f64>], pi: &[f64]) -> f64 {
    let n = rows.len();
    (0..n)
        .map(|y| ((0..n).map(|x| pi[x] * rows[x][y]).sum::<f64>() - pi[y]).abs())
        .fold(0.0, f64::max)
}

/// The sub-stochastic kernel `K(x, ·) = P(x, ·) − ε 1_C(x) ν(·)` of moves
/// that do not regenerate.
#[derive(Clone, Debug)]
pub struct TabooKernel {
    rows: Vec<Vec<f64>>,
}

impl TabooKernel {
    pub fn new(rows: &[Vec<f64>], minor: &FiniteMinorization) -> Result<Self> {
        let eps = minor.epsilon();
        let nu = minor.nu();
        if nu.len() != rows.len() {
            return Err(Error::DimensionMismatch(nu.len(), rows.len()));
        }
        let k: Vec<Vec<f64>> = rows
            .iter()
            .enumerate()
            .map(|(x, row)| {
                if minor.in_small_set(&x) {
                    row.iter().zip(nu).map(|(p, n)| p - eps * n).collect()
                } else {
                    row.clone()
                }
            })
            .collect();
        for (x, row) in k.iter().enumerate() {
            if let Some((y, &w)) = row.iter().enumerate().find(|(_, &w)| w < -POINTWISE_TOL) {
                return Err(Error::MinorizationViolation {
                    x: x.to_string(),
                    y: y.to_string(),
                    lhs: rows[x][y] - w,
                    rhs: rows[x][y],
                });
            }
        }
        Ok(Self {
            rows: k.into_iter().map(|r| r.into_iter().map(|w| w.max(0.0)).collect()).collect(),
        })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Row vector times the kernel: `m K`.
    pub fn apply(&self, m: &[f64]) -> Vec<f64> {
        let n = self.rows.len();
        let mut out = vec![0.0; n];
        for (x, &mx) in m.iter().enumerate() {
            if mx == 0.0 {
                continue;
            }
            for (o, k) in out.iter_mut().zip(&self.rows[x]) {
                *o += mx * k;
            }
        }
        out
    }

    /// Sub-probability measures `m_t = ν K^{t−1}`, `t = 1, 2, ...`.
    pub fn survival_measures<'a>(&'a self, nu: &[f64]) -> impl Iterator<Item = Vec<f64>> + 'a {
        std::iter::successors(Some(nu.to_vec()), move |m| Some(self.apply(m)))
    }
}

/// Regeneration-time law from the atom.
#[derive(Clone, Debug, Serialize)]
pub struct TauTails {
    /// `Pr(τ ≥ t)` for `t = 1..=T`.
    pub tails: Vec<f64>,
    /// `E(τ) = Σ_t Pr(τ ≥ t)`.
    pub e_tau: f64,
    /// `p_t = Pr(τ ≥ t) / E(τ)` for `t = 1..=T`.
    pub p: Vec<f64>,
    /// `Σ_{t > T} Pr(τ ≥ t)`.
    pub tail_beyond: f64,
    /// Number of tail terms summed before the cutoff.
    pub terms: usize,
}

impl TauTails {
    /// `Σ_{t > T} p_t`.
    pub fn weight_beyond(&self) -> f64 {
        self.tail_beyond / self.e_tau
    }
}

pub fn tau_tail_exact(k: &TabooKernel, nu: &[f64], horizon: usize) -> Result<TauTails> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("T must be at least 1".into()));
    }
    let mut tails = Vec::with_capacity(horizon);
    let mut tail_beyond = 0.0;
    let mut e_tau = 0.0;
    let mut terms = 0;
    for (i, m) in k.survival_measures(nu).enumerate() {
        let mass: f64 = m.iter().sum();
        let t = i + 1;
        if t > TAIL_HORIZON {
            return Err(Error::AtomInaccessible(TAIL_HORIZON));
        }
        if t <= horizon {
            tails.push(mass);
        } else {
            if mass < TAIL_CUTOFF {
                break;
            }
            tail_beyond += mass;
        }
        e_tau += mass;
        terms = t;
        if t >= horizon && mass < TAIL_CUTOFF {
            break;
        }
    }
    let p = tails.iter().map(|t| t / e_tau).collect();
    Ok(TauTails {
        tails,
        e_tau,
        p,
        tail_beyond,
        terms,
    })
}

/// `Q_t`: the law of `X_t` from the atom given no regeneration before `t`.
pub fn qt_exact(k: &TabooKernel, nu: &[f64], t: usize) -> Result<FiniteDistribution> {
    if t == 0 {
        return Err(Error::InvalidArgument("t must be at least 1".into()));
    }
    let m = k.survival_measures(nu).nth(t - 1).expect("unbounded iterator");
    if !(m.iter().sum::<f64>() > 0.0) {
        return Err(Error::ZeroMass(t));
    }
    FiniteDistribution::from_masses(m)
}

#[derive(Clone, Debug, Serialize)]
pub struct Reconstruction {
    /// `Σ_{t ≤ T} p_t Q_t`, total mass `1 − defect`.
    pub mixture: Vec<f64>,
    /// `Σ_{t > T} p_t`.
    pub defect: f64,
}

impl Reconstruction {
    /// TV from `π` of the partial mixture, with the missing mass `defect`
    /// counted as a discrepancy. Bounded by `defect`.
    pub fn tv_to(&self, pi: &[f64]) -> Result<f64> {
        if pi.len() != self.mixture.len() {
            return Err(Error::DimensionMismatch(pi.len(), self.mixture.len()));
        }
        let l1: f64 = self.mixture.iter().zip(pi).map(|(m, p)| (p - m).abs()).sum();
        Ok(0.5 * (l1 + self.defect))
    }
}

/// Truncated mixture `Σ_{t=1}^{T} p_t Q_t`.
pub fn reconstruct_pi(k: &TabooKernel, nu: &[f64], horizon: usize) -> Result<Reconstruction> {
    let tails = tau_tail_exact(k, nu, horizon)?;
    let n = nu.len();
    let mut mixture = vec![0.0; n];
    for m in k.survival_measures(nu).take(horizon) {
        for (acc, w) in mixture.iter_mut().zip(&m) {
            *acc += w / tails.e_tau;
        }
    }
    Ok(Reconstruction {
        mixture,
        defect: tails.weight_beyond(),
    })
}

/// `π̃ = Σ_{t ≤ M} p̃_t Q_t` with `p̃_t ∝ Pr(τ ≥ t)` on `{1..M}`.
pub fn pi_tilde_exact(k: &TabooKernel, nu: &[f64], m: usize) -> Result<FiniteDistribution> {
    if m == 0 {
        return Err(Error::InvalidArgument("M must be at least 1".into()));
    }
    let n = nu.len();
    let mut acc = vec![0.0; n];
    for mt in k.survival_measures(nu).take(m) {
        for (a, w) in acc.iter_mut().zip(&mt) {
            *a += w;
        }
    }
    FiniteDistribution::from_masses(acc)
}

#[derive(Clone, Debug, Serialize)]
pub struct GofReport {
    pub n_samples: usize,
    pub empirical_tv: f64,
    pub chi_square: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Empirical TV and Pearson statistic against `target`; passes when the
/// TV is at most `max(0.01, 3 √(n / N))`.
pub fn gof_report(samples: &[usize], target: &FiniteDistribution) -> Result<GofReport> {
    let n = target.len();
    let total = samples.len();
    if total < 100 * n {
        return Err(Error::InvalidArgument(format!(
            "goodness of fit needs at least {} samples, got {total}",
            100 * n
        )));
    }
    let emp = FiniteDistribution::empirical(samples, n)?;
    let empirical_tv = tv_distance(emp.weights(), target.weights())?;
    let chi_square = emp
        .weights()
        .iter()
        .zip(target.weights())
        .map(|(&e, &p)| {
            let obs = e * total as f64;
            let exp = p * total as f64;
            if exp > 0.0 {
                (obs - exp).powi(2) / exp
            } else if obs > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .sum();
    let threshold = 0.01f64.max(3.0 * (n as f64 / total as f64).sqrt());
    Ok(GofReport {
        n_samples: total,
        empirical_tv,
        chi_square,
        threshold,
        pass: empirical_tv <= threshold,
    })
}

/// Kolmogorov–Smirnov statistic `sup |F_N − F|`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
