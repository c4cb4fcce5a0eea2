use super::kernel::{validate_rows, MarkovKernel};
use super::{POINTWISE_TOL, STOCHASTIC_TOL};
use crate::rng::{cumulative, sample_cumulative, RngStream};
use crate::{Error, Result};

/// Attempt cap for rejection sampling of `R(x, ·)`.
pub const DEFAULT_REJECTION_CAP: usize = 1_000_000;

/// A one-step minorization `P(x, ·) ≥ ε ν(·)` for all `x` in the small set `C`.
pub trait Minorization<S>: Sync {
    fn in_small_set(&self, x: &S) -> bool;

    fn epsilon(&self) -> f64;

    fn sample_nu(&self, rng: &mut RngStream) -> S;

    fn nu_density(&self, _y: &S) -> Option<f64> {
        None
    }

    /// `ν` as a probability vector on a finite space.
    fn nu_vector(&self) -> Option<&[f64]> {
        None
    }

    /// True when `C` is known to be the entire state space.
    fn covers_space(&self) -> bool;
}

/// Minorization on `{0, ..., n−1}`.
#[derive(Clone, Debug)]
pub struct FiniteMinorization {
    small_set: Vec<bool>,
    epsilon: f64,
    nu: Vec<f64>,
    nu_cdf: Vec<f64>,
}

impl FiniteMinorization {
    /// Build from explicit parts. Checks ranges and normalization only; the
    /// inequality itself is checked by [`validate_model`](super::validate_model).
    pub fn new(small_set: Vec<bool>, epsilon: f64, nu: Vec<f64>) -> Result<Self> {
        if small_set.len() != nu.len() {
            return Err(Error::DimensionMismatch(small_set.len(), nu.len()));
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidArgument(format!("epsilon = {epsilon} is not in (0, 1]")));
        }
        if !small_set.iter().any(|&c| c) {
            return Err(Error::InvalidArgument("small set is empty".into()));
        }
        if nu.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::InvalidArgument("nu has a negative entry".into()));
        }
        let total: f64 = nu.iter().sum();
        if (total - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::InvalidArgument(format!("nu sums to {total}")));
        }
        let nu_cdf = cumulative(&nu);
        Ok(Self {
            small_set,
            epsilon,
            nu,
            nu_cdf,
        })
    }

    pub fn small_set(&self) -> &[bool] {
        &self.small_set
    }

    pub fn small_set_indices(&self) -> Vec<usize> {
        self.small_set
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| c.then_some(i))
            .collect()
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    /// Same minorization with `epsilon` replaced (no validity check of the
    /// inequality).
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.small_set.clone(), epsilon, self.nu.clone())
    }

    /// Relabel states: new state `perm[x]` is old state `x`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.nu.len();
        let mut c = vec![false; n];
        let mut nu = vec![0.0; n];
        for x in 0..n {
            c[perm[x]] = self.small_set[x];
            nu[perm[x]] = self.nu[x];
        }
        Self::new(c, self.epsilon, nu)
    }
}

impl Minorization<usize> for FiniteMinorization {
    fn in_small_set(&self, x: &usize) -> bool {
        self.small_set[*x]
    }

    fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn sample_nu(&self, rng: &mut RngStream) -> usize {
        sample_cumulative(&self.nu_cdf, rng.uniform())
    }

    fn nu_density(&self, y: &usize) -> Option<f64> {
        Some(self.nu[*y])
    }

    fn nu_vector(&self) -> Option<&[f64]> {
        Some(&self.nu)
    }

    fn covers_space(&self) -> bool {
        self.small_set.iter().all(|&c| c)
    }
}

/// The maximal minorization on `C`: `ε ν(y) = min_{x ∈ C} P(x, y)`.
pub fn auto_minorization_finite(rows: &[Vec<f64>], small_set: &[usize]) -> Result<FiniteMinorization> {
    validate_rows(rows)?;
    let n = rows.len();
    if small_set.is_empty() {
        return Err(Error::InvalidArgument("small set is empty".into()));
    }
    if let Some(&bad) = small_set.iter().find(|&&x| x >= n) {
        return Err(Error::UnknownLabel(bad));
    }
    let mins: Vec<f64> = (0..n)
        .map(|y| small_set.iter().map(|&x| rows[x][y]).fold(f64::INFINITY, f64::min))
        .collect();
    let epsilon: f64 = mins.iter().sum();
    if epsilon <= 0.0 {
        return Err(Error::NoMinorization);
    }
    let nu = mins.iter().map(|m| m / epsilon).collect();
    let mut in_c = vec![false; n];
    for &x in small_set {
        in_c[x] = true;
    }
    // Identical rows give ε = 1 only up to rounding, in either direction.
    let epsilon = if (epsilon - 1.0).abs() <= POINTWISE_TOL { 1.0 } else { epsilon };
    FiniteMinorization::new(in_c, epsilon, nu)
}

/// Residual kernel `R(x, ·)` at a point of the small set.
pub enum Residual<'a, K: MarkovKernel, M> {
    /// Exact probability vector on a finite space.
    Exact(Vec<f64>),
    /// Rejection sampler against `P(x, ·)` with density.
    Rejection(RejectionResidual<'a, K, M>),
}

impl<'a, K, M> Residual<'a, K, M>
where
    K: MarkovKernel,
    M: Minorization<K::State>,
{
    pub fn as_exact(&self) -> Option<&[f64]> {
        match self {
            Residual::Exact(v) => Some(v),
            Residual::Rejection(_) => None,
        }
    }
}

pub struct RejectionResidual<'a, K: MarkovKernel, M> {
    kernel: &'a K,
    minor: &'a M,
    x: K::State,
}

impl<'a, K, M> RejectionResidual<'a, K, M>
where
    K: MarkovKernel,
    M: Minorization<K::State>,
{
    /// Draw `y ~ R(x, ·)`, returning `y` and the number of proposals used.
    pub fn sample(&self, rng: &mut RngStream, cap: usize) -> Result<(K::State, usize)> {
        rejection_residual(self.kernel, self.minor, &self.x, rng, cap)
    }

    /// Residual density `(p(x, y) − ε ν(y)) / (1 − ε)`.
    pub fn density(&self, y: &K::State) -> Option<f64> {
        let p = self.kernel.density(&self.x, y)?;
        let n = self.minor.nu_density(y)?;
        let eps = self.minor.epsilon();
        Some(((p - eps * n) / (1.0 - eps)).max(0.0))
    }
}

pub(crate) fn rejection_residual<K, M>(
    kernel: &K,
    minor: &M,
    x: &K::State,
    rng: &mut RngStream,
    cap: usize,
) -> Result<(K::State, usize)>
where
    K: MarkovKernel + ?Sized,
    M: Minorization<K::State> + ?Sized,
{
    let eps = minor.epsilon();
    if eps >= 1.0 {
        return Err(Error::DegenerateResidual);
    }
    for attempt in 1..=cap {
        let y = kernel.sample_next(x, rng);
        let p = kernel
            .density(x, &y)
            .ok_or(Error::DensityUnavailable("residual rejection sampling"))?;
        let n = minor
            .nu_density(&y)
            .ok_or(Error::DensityUnavailable("residual rejection sampling"))?;
        if p <= 0.0 {
            return Err(Error::InconsistentDensity {
                x: format!("{x:?}"),
                y: format!("{y:?}"),
            });
        }
        let ratio = eps * n / p;
        if ratio > 1.0 + 1e-9 {
            return Err(Error::MinorizationViolation {
                x: format!("{x:?}"),
                y: format!("{y:?}"),
                lhs: eps * n,
                rhs: p,
            });
        }
        if rng.uniform() >= ratio {
            return Ok((y, attempt));
        }
    }
    Err(Error::CapExceeded {
        what: "residual rejection sampling",
        cap,
        acceptance_rate: 0.0,
    })
}

/// `R(x, ·)` for `x ∈ C`: an exact vector on finite spaces, a rejection
/// sampler with density otherwise.
pub fn residual_distribution<'a, K, M>(kernel: &'a K, minor: &'a M, x: &K::State) -> Result<Residual<'a, K, M>>
where
    K: MarkovKernel,
    M: Minorization<K::State>,
{
    if !minor.in_small_set(x) {
        return Err(Error::Precondition(format!("{x:?} is not in the small set")));
    }
    let eps = minor.epsilon();
    if eps >= 1.0 {
        return Err(Error::DegenerateResidual);
    }
    if let (Some(row), Some(nu)) = (kernel.transition_row(x), minor.nu_vector()) {
        let mut out = Vec::with_capacity(row.len());
        for (j, (&p, &n)) in row.iter().zip(nu).enumerate() {
            let w = (p - eps * n) / (1.0 - eps);
            if w < -POINTWISE_TOL {
                return Err(Error::MinorizationViolation {
                    x: format!("{x:?}"),
                    y: j.to_string(),
                    lhs: eps * n,
                    rhs: p,
                });
            }
            out.push(w.max(0.0));
        }
        return Ok(Residual::Exact(out));
    }
    Ok(Residual::Rejection(RejectionResidual {
        kernel,
        minor,
        x: x.clone(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::split::FiniteChain;

    #[test]
    fn figure1_auto_minorization() {
        let chain = fixtures::figure1_chain();
        let m = auto_minorization_finite(chain.rows(), &[0, 1, 2]).unwrap();
        assert!((m.epsilon() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.nu(), &[0.0, 1.0, 0.0]);
        assert!(m.covers_space());
    }

    #[test]
    fn single_state_small_set_gives_its_row() {
        let chain = fixtures::drift5().chain;
        for x in 0..5 {
            let m = auto_minorization_finite(chain.rows(), &[x]).unwrap();
            assert!((m.epsilon() - 1.0).abs() < 1e-12);
            for (a, b) in m.nu().iter().zip(chain.row(x)) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_has_no_minorization() {
        let id = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert!(matches!(auto_minorization_finite(&id, &[0, 1, 2]), Err(Error::NoMinorization)));
    }

    #[test]
    fn figure1_residual_rows() {
        let chain = fixtures::figure1_chain();
        let m = fixtures::figure1_minorization();
        let expect = [[0.0, 1.0, 0.0], [0.0, 0.25, 0.75], [1.0, 0.0, 0.0]];
        for x in 0..3 {
            let r = residual_distribution(&chain, &m, &x).unwrap();
            let row = r.as_exact().unwrap();
            for (a, b) in row.iter().zip(expect[x]) {
                assert!((a - b).abs() < 1e-15, "R({x}) = {row:?}");
            }
        }
    }

    #[test]
    fn residual_equals_nu_when_row_is_nu() {
        let chain = FiniteChain::new(vec![vec![0.2, 0.8], vec![0.6, 0.4]]).unwrap();
        let m = FiniteMinorization::new(vec![true, false], 0.4, vec![0.2, 0.8]).unwrap();
        let r = residual_distribution(&chain, &m, &0).unwrap();
        let row = r.as_exact().unwrap();
        assert!((row[0] - 0.2).abs() < 1e-12 && (row[1] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn residual_errors() {
        let chain = fixtures::figure1_chain();
        let m = fixtures::figure1_minorization();
        let one = m.with_epsilon(1.0).unwrap();
        assert!(matches!(residual_distribution(&chain, &one, &0), Err(Error::DegenerateResidual)));
        let bad = m.with_epsilon(0.5).unwrap();
        assert!(matches!(
            residual_distribution(&chain, &bad, &2),
            Err(Error::MinorizationViolation { .. })
        ));
        let c01 = auto_minorization_finite(chain.rows(), &[0, 1]).unwrap();
        assert!(matches!(residual_distribution(&chain, &c01, &2), Err(Error::Precondition(_))));
    }

    #[test]
    fn exact_residual_sampler_matches_vector() {
        let chain = fixtures::figure1_chain();
        let m = fixtures::figure1_minorization();
        let mut rng = RngStream::from_seed(9);
        let n = 40_000;
        let hits = (0..n)
            .filter(|_| chain.sample_residual(&m, &1, &mut rng).unwrap() == 2)
            .count();
        let f = hits as f64 / n as f64;
        assert!((f - 0.75).abs() < 4.0 * (0.75f64 * 0.25 / n as f64).sqrt());
    }
}
