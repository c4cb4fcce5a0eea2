use serde::Serialize;

use crate::split::{residual_distribution, FiniteChain, FiniteMinorization, MarkovKernel, Minorization};
use crate::rng::RngStream;
use crate::{Error, Result};

/// One exact draw from `π` when `C = X`: `x₁ ~ ν`, `t ~ Geo(ε)`, then
/// `t − 1` residual moves.
pub fn multigamma_sample<K, M>(kernel: &K, minor: &M, rng: &mut RngStream) -> Result<K::State>
where
    K: MarkovKernel,
    M: Minorization<K::State>,
{
    if !minor.covers_space() {
        return Err(Error::Precondition("multigamma coupler needs the small set to be the whole space".into()));
    }
    let eps = minor.epsilon();
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon = {eps} is not in (0, 1]")));
    }
    let mut x = minor.sample_nu(rng);
    let t = rng.geometric(eps);
    for _ in 1..t {
        x = kernel.sample_residual(minor, &x, rng)?;
    }
    Ok(x)
}

/// Residual kernel rows `R(x, ·)` for every `x` (requires `C = X`, `ε < 1`).
pub fn residual_matrix(chain: &FiniteChain, minor: &FiniteMinorization) -> Result<Vec<Vec<f64>>> {
    (0..chain.n_states())
        .map(|x| {
            residual_distribution(chain, minor, &x).map(|r| r.as_exact().expect("finite residual").to_vec())
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Corollary1 {
    /// `Σ_{t=1}^{T} ε (1−ε)^{t−1} ν R^{t−1}`; total mass `1 − defect`.
    pub mixture: Vec<f64>,
    pub terms: usize,
    /// Dropped geometric tail `(1 − ε)^T`.
    pub defect: f64,
}

/// Evaluate the geometric mixture of residual iterates that equals `π`
/// when `C = X`, stopping once the dropped tail is at most `tail_tol`.
pub fn corollary1_exact(chain: &FiniteChain, minor: &FiniteMinorization, tail_tol: f64) -> Result<Corollary1> {
    if !(tail_tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tail_tol = {tail_tol} must be positive")));
    }
    if !minor.covers_space() {
        return Err(Error::Precondition("C must be the whole space".into()));
    }
    let eps = minor.epsilon();
    if eps >= 1.0 {
        return Ok(Corollary1 {
            mixture: minor.nu().to_vec(),
            terms: 1,
            defect: 0.0,
        });
    }
    let r = residual_matrix(chain, minor)?;
    let n = chain.n_states();
    let mut mixture = vec![0.0; n];
    let mut current = minor.nu().to_vec();
    let mut weight = eps;
    let mut tail = 1.0;
    let mut terms = 0;
    while tail > tail_tol {
        for (m, c) in mixture.iter_mut().zip(&current) {
            *m += weight * c;
        }
        terms += 1;
        tail *= 1.0 - eps;
        weight *= 1.0 - eps;
        let mut next = vec![0.0; n];
        for (x, &cx) in current.iter().enumerate() {
            for (nx, rxy) in next.iter_mut().zip(&r[x]) {
                *nx += cx * rxy;
            }
        }
        current = next;
    }
    Ok(Corollary1 {
        mixture,
        terms,
        defect: tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::oracle::{stationary_exact, tv_distance, FiniteDistribution};

    #[test]
    fn figure1_corollary_is_pi() {
        let chain = fixtures::figure1_chain();
        let m = fixtures::figure1_minorization();
        let c = corollary1_exact(&chain, &m, 1e-12).unwrap();
        let pi = stationary_exact(chain.rows()).unwrap();
        assert!(tv_distance(&c.mixture, pi.weights()).unwrap() <= 1e-10);
        assert!(c.defect <= 1e-12);
        let mass: f64 = c.mixture.iter().sum();
        assert!((mass - (1.0 - c.defect)).abs() < 1e-12);
    }

    #[test]
    fn partial_sums_have_geometric_mass() {
        let chain = fixtures::figure1_chain();
        let m = fixtures::figure1_minorization();
        for tol in [0.5, 0.1, 1e-3, 1e-6] {
            let c = corollary1_exact(&chain, &m, tol).unwrap();
            let mass: f64 = c.mixture.iter().sum();
            let expect = 1.0 - (2.0f64 / 3.0).powi(c.terms as i32);
            assert!((mass - expect).abs() < 1e-12);
            assert!(c.defect <= tol);
        }
    }

    #[test]
    fn epsilon_one_returns_nu() {
        let rows = vec![vec![0.25, 0.75], vec![0.25, 0.75]];
        let chain = FiniteChain::new(rows.clone()).unwrap();
        let m = crate::split::auto_minorization_finite(&rows, &[0, 1]).unwrap();
        let c = corollary1_exact(&chain, &m, 1e-9).unwrap();
        assert_eq!(c.terms, 1);
        assert_eq!(c.mixture, vec![0.25, 0.75]);
        let mut rng = RngStream::from_seed(3);
        let n = 20_000;
        let ones = (0..n).filter(|_| multigamma_sample(&chain, &m, &mut rng).unwrap() == 1).count();
        assert!((ones as f64 / n as f64 - 0.75).abs() < 4.0 * (0.1875f64 / n as f64).sqrt());
    }

    #[test]
    fn rejects_bad_tolerance_and_partial_c() {
        let chain = fixtures::figure1_chain();
        let m = fixtures::figure1_minorization();
        assert!(corollary1_exact(&chain, &m, 0.0).is_err());
        let partial = crate::split::auto_minorization_finite(chain.rows(), &[0, 1]).unwrap();
        assert!(matches!(
            multigamma_sample(&chain, &partial, &mut RngStream::from_seed(0)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn figure1_three_step_realization() {
        // Starting at x₁ = 1 (1-based label 2): R(1, ·) = (0, 1/4, 3/4),
        // R(2, ·) = δ₀, so the path 1 → 2 → 0 has probability 3/4.
        let r = residual_matrix(&fixtures::figure1_chain(), &fixtures::figure1_minorization()).unwrap();
        assert_eq!(r[1][2], 0.75);
        assert_eq!(r[2][0], 1.0);
    }

    #[test]
    fn multigamma_matches_pi() {
        let chain = fixtures::figure1_chain();
        let m = fixtures::figure1_minorization();
        let mut rng = RngStream::from_seed(21);
        let xs: Vec<usize> = (0..30_000).map(|_| multigamma_sample(&chain, &m, &mut rng).unwrap()).collect();
        let emp = FiniteDistribution::empirical(&xs, 3).unwrap();
        assert!(tv_distance(emp.weights(), &[2.0 / 11.0, 6.0 / 11.0, 3.0 / 11.0]).unwrap() < 0.015);
    }
}
