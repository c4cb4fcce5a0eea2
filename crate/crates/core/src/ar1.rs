//! Gaussian AR(1) chain `X' = ρ X + σ Z` with small set `C = [lo, hi]` and
//! drift function `V(x) = 1 + x²`.
//!
//! For `x ∈ C` the transition mean `ρx` ranges over an interval, and the
//! pointwise minimum of the Gaussian densities over that interval is
//! attained at its endpoints. That minimum is `ε ν`. The constants `ε`,
//! `ν(V)`, `λ`, `b`, `A`, `d` are computed by quadrature at construction.

use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::bounds::{DriftSpec, NuV};
use crate::quadrature::integrate;
use crate::rng::RngStream;
use crate::split::{MarkovKernel, Minorization, StateSpace};
use crate::{Error, Result};

/// Absolute tolerance for every integral in this module.
pub const QUADRATURE_TOL: f64 = 1e-10;
const HALF_WIDTH_SIGMAS: f64 = 40.0;

fn normal_pdf(y: f64, mean: f64, sigma: f64) -> f64 {
    let z = (y - mean) / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ar1Chain {
    pub rho: f64,
    pub sigma: f64,
}

impl Ar1Chain {
    pub fn new(rho: f64, sigma: f64) -> Result<Self> {
        if !(rho.abs() < 1.0) {
            return Err(Error::InvalidArgument(format!("AR(1) needs |rho| < 1, got {rho}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("sigma = {sigma} must be positive")));
        }
        Ok(Self { rho, sigma })
    }

    /// Standard deviation of the stationary law `N(0, σ² / (1 − ρ²))`.
    pub fn stationary_sd(&self) -> f64 {
        self.sigma / (1.0 - self.rho * self.rho).sqrt()
    }

    /// `(PV)(x) = ∫ (1 + y²) p(x, y) dy`, by quadrature.
    pub fn pv(&self, x: f64) -> f64 {
        let m = self.rho * x;
        let w = HALF_WIDTH_SIGMAS * self.sigma;
        integrate(|y| (1.0 + y * y) * normal_pdf(y, m, self.sigma), m - w, m + w, QUADRATURE_TOL)
    }
}

impl MarkovKernel for Ar1Chain {
    type State = f64;

    fn space(&self) -> StateSpace {
        StateSpace::Continuous(1)
    }

    fn sample_next(&self, x: &f64, rng: &mut RngStream) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.rho * x + self.sigma * z
    }

    fn density(&self, x: &f64, y: &f64) -> Option<f64> {
        Some(normal_pdf(*y, self.rho * x, self.sigma))
    }
}

/// `ε ν(y) = min_{x ∈ C} p(x, y)` for the AR(1) chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ar1Minorization {
    pub lo: f64,
    pub hi: f64,
    pub epsilon: f64,
    mean_lo: f64,
    mean_hi: f64,
    sigma: f64,
}

impl Ar1Minorization {
    pub fn new(chain: &Ar1Chain, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::InvalidArgument(format!("small set [{lo}, {hi}] is empty")));
        }
        let (a, b) = {
            let (p, q) = (chain.rho * lo, chain.rho * hi);
            (p.min(q), p.max(q))
        };
        let s = chain.sigma;
        let overlap = |y: f64| normal_pdf(y, a, s).min(normal_pdf(y, b, s));
        let mid = 0.5 * (a + b);
        let w = HALF_WIDTH_SIGMAS * s;
        // Split at the kink of the minimum.
        let epsilon = integrate(overlap, a - w, mid, QUADRATURE_TOL / 2.0)
            + integrate(overlap, mid, b + w, QUADRATURE_TOL / 2.0);
        if !(epsilon > 0.0) {
            return Err(Error::NoMinorization);
        }
        Ok(Self {
            lo,
            hi,
            epsilon: epsilon.min(1.0),
            mean_lo: a,
            mean_hi: b,
            sigma: s,
        })
    }

    fn unnormalized(&self, y: f64) -> f64 {
        normal_pdf(y, self.mean_lo, self.sigma).min(normal_pdf(y, self.mean_hi, self.sigma))
    }

    /// `ν(V) = ∫ (1 + y²) ν(y) dy`.
    pub fn nu_v(&self) -> f64 {
        let mid = 0.5 * (self.mean_lo + self.mean_hi);
        let w = HALF_WIDTH_SIGMAS * self.sigma;
        let f = |y: f64| (1.0 + y * y) * self.unnormalized(y);
        (integrate(f, self.mean_lo - w, mid, QUADRATURE_TOL / 2.0)
            + integrate(f, mid, self.mean_hi + w, QUADRATURE_TOL / 2.0))
            / self.epsilon
    }
}

impl Minorization<f64> for Ar1Minorization {
    fn in_small_set(&self, x: &f64) -> bool {
        *x >= self.lo && *x <= self.hi
    }

    fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Rejection from `N(mean_lo, σ²)`, accepting with the ratio of the
    /// minimum density to the proposal density.
    fn sample_nu(&self, rng: &mut RngStream) -> f64 {
        loop {
            let z: f64 = StandardNormal.sample(rng);
            let y = self.mean_lo + self.sigma * z;
            let ratio = self.unnormalized(y) / normal_pdf(y, self.mean_lo, self.sigma);
            if rng.uniform() < ratio {
                return y;
            }
        }
    }

    fn nu_density(&self, y: &f64) -> Option<f64> {
        Some(self.unnormalized(*y) / self.epsilon)
    }

    fn covers_space(&self) -> bool {
        false
    }
}

/// Minorization and drift constants for `V(x) = 1 + x²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ar1Constants {
    pub epsilon: f64,
    pub lambda: f64,
    pub b: f64,
    pub d: f64,
    pub a: f64,
    pub nu_v: f64,
}

impl Ar1Constants {
    /// `PV(x)/V(x) = (1 + σ² + ρ² x²)/(1 + x²)` decreases in `|x|`, so its
    /// supremum off `C` is attained at the point of the closure of `X \ C`
    /// nearest 0. `PV − λV` and `PV` are quadratics in `x`, so their suprema
    /// over `C` are at an endpoint or at 0.
    pub fn compute(chain: &Ar1Chain, minor: &Ar1Minorization) -> Result<Self> {
        let (lo, hi) = (minor.lo, minor.hi);
        let v = |x: f64| 1.0 + x * x;
        let off_c = if lo > 0.0 || hi < 0.0 { vec![0.0] } else { vec![lo, hi] };
        let lambda = off_c.iter().map(|&x| chain.pv(x) / v(x)).fold(0.0, f64::max);
        if lambda >= 1.0 {
            return Err(Error::NoDrift(lambda));
        }
        let mut in_c = vec![lo, hi];
        if lo <= 0.0 && hi >= 0.0 {
            in_c.push(0.0);
        }
        let b = in_c.iter().map(|&x| chain.pv(x) - lambda * v(x)).fold(0.0, f64::max);
        let a = in_c.iter().map(|&x| chain.pv(x)).fold(f64::NEG_INFINITY, f64::max);
        let d = in_c.iter().map(|&x| v(x)).fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            epsilon: minor.epsilon,
            lambda,
            b,
            d,
            a,
            nu_v: minor.nu_v(),
        })
    }

    pub fn drift(&self) -> DriftSpec {
        DriftSpec {
            lambda: self.lambda,
            b: self.b,
            d: self.d,
            a: self.a,
            nu_v: NuV::Exact(self.nu_v),
        }
    }
}
