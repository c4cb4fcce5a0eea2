//! Shipped fixtures.
//!
//! * `figure1`: the three-state chain with maps `g(0, u) = 1`,
//!   `g(1, u) = 1 if u < 1/2 else 2`, `g(2, u) = 0 if u < 2/3 else 1`
//!   (states relabeled to start at 0). Its stationary law is
//!   `(2/11, 6/11, 3/11)`; with `C = X` the maximal minorization is
//!   `ε = 1/3, ν = δ_1`.
//! * `drift5`: a five-state chain with `C = {0, 1}` and drift function
//!   `V = (1, 1, 2, 4, 8)`. Its minorization and drift constants are always
//!   derived from the matrix, never stored.

use crate::bounds::{fit_drift_finite, DriftSpec};
use crate::perfect::ThresholdMap;
use crate::split::{auto_minorization_finite, FiniteChain, FiniteMinorization};
use crate::{Error, Result};

pub fn figure1_map() -> ThresholdMap {
    ThresholdMap::new(vec![
        vec![(1.0, 1)],
        vec![(0.5, 1), (1.0, 2)],
        vec![(2.0 / 3.0, 0), (1.0, 1)],
    ])
    .expect("figure1 map is well formed")
}

pub fn figure1_chain() -> FiniteChain {
    figure1_map().transition_chain()
}

/// `C = X`, `ε = 1/3`, `ν = δ_1`.
pub fn figure1_minorization() -> FiniteMinorization {
    auto_minorization_finite(figure1_chain().rows(), &[0, 1, 2]).expect("figure1 is 1-small")
}

/// A finite chain with a small set and a drift function.
#[derive(Clone, Debug)]
pub struct FiniteFixture {
    pub name: &'static str,
    pub chain: FiniteChain,
    pub small_set: Vec<usize>,
    pub v: Vec<f64>,
}

impl FiniteFixture {
    pub fn minorization(&self) -> FiniteMinorization {
        auto_minorization_finite(self.chain.rows(), &self.small_set).expect("fixture small set minorizes")
    }

    pub fn drift(&self) -> Result<DriftSpec> {
        let m = self.minorization();
        fit_drift_finite(self.chain.rows(), &self.small_set, &self.v, Some(m.nu()))
    }
}

pub fn figure1() -> FiniteFixture {
    FiniteFixture {
        name: "figure1",
        chain: figure1_chain(),
        small_set: vec![0, 1, 2],
        v: vec![1.0; 3],
    }
}

pub fn drift5() -> FiniteFixture {
    let rows = vec![
        vec![0.5, 0.3, 0.2, 0.0, 0.0],
        vec![0.3, 0.4, 0.2, 0.1, 0.0],
        vec![0.4, 0.3, 0.2, 0.1, 0.0],
        vec![0.0, 0.2, 0.5, 0.2, 0.1],
        vec![0.0, 0.0, 0.3, 0.5, 0.2],
    ];
    FiniteFixture {
        name: "drift5",
        chain: FiniteChain::new(rows).expect("drift5 rows are stochastic"),
        small_set: vec![0, 1],
        v: vec![1.0, 1.0, 2.0, 4.0, 8.0],
    }
}

pub fn by_name(name: &str) -> Result<FiniteFixture> {
    match name {
        "figure1" => Ok(figure1()),
        "drift5" => Ok(drift5()),
        other => Err(Error::Spec(format!("unknown fixture {other:?} (known: figure1, drift5)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure1_matrix() {
        let c = figure1_chain();
        let expect = [[0.0, 1.0, 0.0], [0.0, 0.5, 0.5], [2.0 / 3.0, 1.0 / 3.0, 0.0]];
        for x in 0..3 {
            for y in 0..3 {
                assert!((c.row(x)[y] - expect[x][y]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn drift5_constants_are_derived() {
        let fx = drift5();
        let m = fx.minorization();
        // Column minima over rows 0 and 1: (0.3, 0.3, 0.2, 0, 0).
        assert!((m.nu().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let eps = 0.8;
        use crate::split::Minorization;
        assert!((m.epsilon() - eps).abs() < 1e-12);
        for (a, b) in m.nu().iter().zip([0.375, 0.375, 0.25, 0.0, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
