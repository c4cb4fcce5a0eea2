use serde::Serialize;

use super::kernel::{MarkovKernel, StateSpace};
use super::minorization::Minorization;
use super::{POINTWISE_TOL, STOCHASTIC_TOL};
use crate::rng::RngStream;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub x: String,
    pub y: String,
    /// `ε ν(y)`
    pub lhs: f64,
    /// `p(x, y)`
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum MinorizationCheck {
    Checked { pairs: usize, violations: Vec<Violation> },
    /// Densities are missing, so `ε ν ≤ p` cannot be evaluated.
    NotPerformable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub space: StateSpace,
    pub row_errors: Vec<String>,
    pub minorization: MinorizationCheck,
    pub nu_normalization_error: Option<f64>,
    /// Probed draws `y ~ P(x, ·)` with `p(x, y) = 0`.
    pub support_violations: usize,
    pub passed: bool,
}

impl ValidationReport {
    pub fn violations(&self) -> &[Violation] {
        match &self.minorization {
            MinorizationCheck::Checked { violations, .. } => violations,
            MinorizationCheck::NotPerformable => &[],
        }
    }
}

/// Check the hypotheses the split chain relies on.
///
/// Finite models are checked exhaustively. Otherwise `probes` points of `C`
/// are found by running the chain from `ν`, and at each the inequality is
/// tested at `y ~ P(x, ·)` and `y ~ ν`.
pub fn validate_model<K, M>(kernel: &K, minor: &M, probes: usize, rng: &mut RngStream) -> ValidationReport
where
    K: MarkovKernel,
    M: Minorization<K::State>,
{
    let eps = minor.epsilon();
    let mut row_errors = Vec::new();
    let mut violations = Vec::new();
    let mut pairs = 0usize;
    let mut support_violations = 0usize;
    let mut performable = true;
    let mut nu_normalization_error = None;

    let check = |x: &K::State, y: &K::State, pairs: &mut usize, violations: &mut Vec<Violation>| -> bool {
        match (kernel.density(x, y), minor.nu_density(y)) {
            (Some(p), Some(n)) => {
                *pairs += 1;
                if eps * n > p + POINTWISE_TOL {
                    violations.push(Violation {
                        x: format!("{x:?}"),
                        y: format!("{y:?}"),
                        lhs: eps * n,
                        rhs: p,
                    });
                }
                true
            }
            _ => false,
        }
    };

    if let Some(states) = kernel.enumerate_states() {
        for x in &states {
            let Some(row) = kernel.transition_row(x) else { continue };
            if let Some(j) = row.iter().position(|&p| !(p >= 0.0)) {
                row_errors.push(format!("row {x:?}: entry {j} is {}", row[j]));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                row_errors.push(format!("row {x:?}: sums to {sum}"));
            }
        }
        for x in states.iter().filter(|x| minor.in_small_set(x)) {
            for y in &states {
                if !check(x, y, &mut pairs, &mut violations) {
                    performable = false;
                }
            }
        }
        if let Some(nu) = minor.nu_vector() {
            nu_normalization_error = Some((nu.iter().sum::<f64>() - 1.0).abs());
        }
    } else {
        let mut x = minor.sample_nu(rng);
        let mut found = 0usize;
        let mut steps = 0usize;
        while found < probes && steps < probes.saturating_mul(1000).max(1000) {
            steps += 1;
            if minor.in_small_set(&x) {
                found += 1;
                let y = kernel.sample_next(&x, rng);
                if let Some(p) = kernel.density(&x, &y) {
                    if p <= 0.0 {
                        support_violations += 1;
                    }
                }
                let z = minor.sample_nu(rng);
                if !check(&x, &y, &mut pairs, &mut violations) || !check(&x, &z, &mut pairs, &mut violations) {
                    performable = false;
                }
                x = y;
            } else {
                x = kernel.sample_next(&x, rng);
            }
        }
    }

    let minorization = if performable {
        MinorizationCheck::Checked { pairs, violations }
    } else {
        MinorizationCheck::NotPerformable
    };
    let nu_ok = nu_normalization_error.is_none_or(|e| e <= STOCHASTIC_TOL);
    let minor_ok = match &minorization {
        MinorizationCheck::Checked { violations, .. } => violations.is_empty(),
        MinorizationCheck::NotPerformable => true,
    };
    ValidationReport {
        space: kernel.space(),
        passed: row_errors.is_empty() && minor_ok && nu_ok && support_violations == 0,
        row_errors,
        minorization,
        nu_normalization_error,
        support_violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::split::{auto_minorization_finite, FiniteMinorization};

    #[test]
    fn figure1_passes() {
        let chain = fixtures::figure1_chain();
        let m = fixtures::figure1_minorization();
        let r = validate_model(&chain, &m, 10, &mut RngStream::from_seed(0));
        assert!(r.passed, "{r:?}");
        assert!(matches!(r.minorization, MinorizationCheck::Checked { pairs: 9, .. }));
    }

    #[test]
    fn figure1_with_epsilon_half_fails_on_row_three() {
        let chain = fixtures::figure1_chain();
        let m = fixtures::figure1_minorization().with_epsilon(0.5).unwrap();
        let r = validate_model(&chain, &m, 10, &mut RngStream::from_seed(0));
        assert!(!r.passed);
        let v = r.violations();
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].x.as_str(), v[0].y.as_str()), ("2", "1"));
        assert!((v[0].rhs - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn point_mass_at_column_minimum_passes() {
        let fx = fixtures::drift5();
        for y0 in 0..5 {
            let eps = (0..5).map(|x| fx.chain.row(x)[y0]).fold(f64::INFINITY, f64::min);
            if eps <= 0.0 {
                continue;
            }
            let mut nu = vec![0.0; 5];
            nu[y0] = 1.0;
            let m = FiniteMinorization::new(vec![true; 5], eps, nu).unwrap();
            assert!(validate_model(&fx.chain, &m, 1, &mut RngStream::from_seed(0)).passed);
        }
        let m = auto_minorization_finite(fx.chain.rows(), &fx.small_set).unwrap();
        assert!(validate_model(&fx.chain, &m, 1, &mut RngStream::from_seed(0)).passed);
    }
}
